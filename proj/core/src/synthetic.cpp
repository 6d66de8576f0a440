#include "jive/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "jive/error.hpp"

namespace jive {
namespace {

constexpr double kRadPerDeg = std::numbers::pi / 180.0;

Matrix gaussian(Index rows, Index cols, double scale, Engine& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) m(i, j) = scale * normal(rng);
  }
  return m;
}

Vector unit(Vector v) { return v / v.norm(); }

// Piecewise-constant column patterns on n objects split into quarters.
Vector quarter_pattern(Index n, const double (&signs)[4]) {
  Vector v(n);
  for (Index j = 0; j < n; ++j) v(j) = signs[(4 * j) / n];
  return unit(std::move(v));
}

// Within every quarter: +1 on the first third, 0 in the middle, -1 on the
// last third. Orthogonal to every quarter-constant pattern.
Vector within_quarter_pattern(Index n) {
  const Index q = n / 4;
  const Index third = q / 3;
  Vector v = Vector::Zero(n);
  for (Index b = 0; b < 4; ++b) {
    v.segment(b * q, third).setOnes();
    v.segment(b * q + q - third, third).setConstant(-1.0);
  }
  return unit(std::move(v));
}

Vector row_indicator(Index d, Index begin, Index end, double value = 1.0) {
  Vector v = Vector::Zero(d);
  v.segment(begin, end - begin).setConstant(value);
  return v;
}

}  // namespace

Matrix random_orthonormal(Index n, Index r, Engine& rng) {
  if (r == 0) return Matrix(n, 0);
  const Matrix g = gaussian(n, r, 1.0, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(n, r);
  const Matrix rfac = qr.matrixQR().topRows(r).triangularView<Eigen::Upper>();
  for (Index j = 0; j < r; ++j) {
    if (rfac(j, j) < 0.0) q.col(j) *= -1.0;
  }
  return q;
}

SyntheticInstance generate_toy(std::uint64_t seed, const ToySpec& spec) {
  const Index n = spec.n;
  if (n < 12 || n % 4 != 0) throw ValidationError("toy object count must be a multiple of 4, >= 12");
  if (spec.d_x < 2 || spec.d_y < 20 || spec.d_y % 20 != 0) {
    throw ValidationError("toy feature counts: d_x >= 2, d_y a positive multiple of 20");
  }

  const Vector joint = quarter_pattern(n, {1, 1, -1, -1});
  const Vector x_ind = quarter_pattern(n, {1, -1, 1, -1});
  const Vector y_two = quarter_pattern(n, {1, -1, -1, 1});
  const Vector w = within_quarter_pattern(n);
  const double a = spec.individual_angle_deg * kRadPerDeg;
  const Vector y_three = unit(std::cos(a) * x_ind + std::sin(a) * w);

  const Index dx = spec.d_x;
  const Index dy = spec.d_y;
  const Vector ux_joint = unit(row_indicator(dx, 0, dx / 2));
  const Vector ux_ind = unit(row_indicator(dx, dx / 2, dx));
  Vector uy_joint = row_indicator(dy, 8 * dy / 10, 9 * dy / 10);
  uy_joint.segment(9 * dy / 10, dy / 10).setConstant(-1.0);
  uy_joint = unit(std::move(uy_joint));
  const Vector uy_three = unit(row_indicator(dy, 0, dy / 2));
  const Vector uy_two = unit(row_indicator(dy, dy / 2, dy));

  GroundTruth truth;
  truth.joint_scores = joint;
  truth.individual_scores.push_back(x_ind);
  Matrix y_scores(n, 2);
  y_scores << y_three, y_two;
  truth.individual_scores.push_back(y_scores);

  truth.joint.push_back(spec.x_joint * ux_joint * joint.transpose());
  truth.joint.push_back(spec.y_joint * uy_joint * joint.transpose());
  truth.individual.push_back(spec.x_individual * ux_ind * x_ind.transpose());
  truth.individual.push_back(spec.y_individual_three_group * uy_three * y_three.transpose() +
                             spec.y_individual_two_group * uy_two * y_two.transpose());

  const RandomStreams streams(seed);
  Engine rx = streams.substream(0).engine(0);
  Engine ry = streams.substream(1).engine(0);
  truth.noise.push_back(gaussian(dx, n, spec.x_noise, rx));
  truth.noise.push_back(gaussian(dy, n, spec.y_noise, ry));

  std::vector<DataBlock> blocks(2);
  blocks[0].name = "X";
  blocks[1].name = "Y";
  for (std::size_t k = 0; k < 2; ++k) {
    blocks[k].values = truth.joint[k] + truth.individual[k] + truth.noise[k];
  }
  return SyntheticInstance{MultiBlock(std::move(blocks)), std::move(truth)};
}

SyntheticInstance generate_random_instance(const RandomInstanceSpec& spec, std::uint64_t seed) {
  const std::size_t K = spec.features.size();
  const Index n = spec.objects;
  const Index rj = spec.joint_rank;
  if (K < 2) throw ValidationError("random instance needs at least two blocks");
  if (spec.individual_ranks.size() != K) {
    throw ValidationError("individual_ranks needs one entry per block");
  }
  if (rj < 0 || n < 2) throw ValidationError("invalid joint rank or object count");
  if (!(spec.signal_min > 0.0 && spec.signal_max >= spec.signal_min)) {
    throw ValidationError("signal range must be positive and ordered");
  }
  const Index free_dims = n - rj;
  Index total_individual = 0;
  for (std::size_t k = 0; k < K; ++k) {
    const Index ri = spec.individual_ranks[k];
    if (ri < 0 || ri > free_dims) throw ValidationError("individual rank out of range");
    if (spec.features[k] < rj + ri || spec.features[k] < 1) {
      throw ValidationError("block " + std::to_string(k + 1) + ": d_k smaller than its signal rank");
    }
    total_individual += ri;
  }
  if (free_dims < 0) throw ValidationError("joint rank exceeds object count");

  const RandomStreams streams(seed);
  Engine rng = streams.substream(0).engine(0);
  const Matrix frame = random_orthonormal(n, n, rng);
  const Matrix joint_scores = frame.leftCols(rj);
  const Matrix pool = frame.rightCols(free_dims);

  std::vector<Matrix> individual_scores(K);
  if (spec.individual_angle_deg) {
    if (rj + total_individual > n) {
      throw ValidationError("angle construction needs r_J + sum r_I <= n");
    }
    if (spec.individual_ranks[0] < 1) {
      throw ValidationError("angle construction needs an individual component in block 1");
    }
    const double a = *spec.individual_angle_deg * kRadPerDeg;
    Index next = 1;
    for (std::size_t k = 0; k < K; ++k) {
      const Index ri = spec.individual_ranks[k];
      Matrix w(n, ri);
      for (Index j = 0; j < ri; ++j) {
        if (j == 0 && k == 0) {
          w.col(j) = pool.col(0);
        } else if (j == 0) {
          w.col(j) = std::cos(a) * pool.col(0) + std::sin(a) * pool.col(next++);
        } else {
          w.col(j) = pool.col(next++);
        }
      }
      individual_scores[k] = std::move(w);
    }
  } else {
    Index codims = 0;
    for (std::size_t k = 0; k < K; ++k) codims += free_dims - spec.individual_ranks[k];
    if (free_dims > 0 && total_individual > 0 && codims < free_dims) {
      throw ValidationError("individual ranks too large for a trivial intersection");
    }
    for (std::size_t k = 0; k < K; ++k) {
      Engine rk = streams.substream(100 + k).engine(0);
      individual_scores[k] = pool * random_orthonormal(free_dims, spec.individual_ranks[k], rk);
    }
  }

  GroundTruth truth;
  truth.joint_scores = joint_scores;
  std::vector<DataBlock> blocks(K);
  for (std::size_t k = 0; k < K; ++k) {
    Engine rk = streams.substream(1000 + k).engine(0);
    const Index d = spec.features[k];
    const Index ri = spec.individual_ranks[k];
    std::uniform_real_distribution<double> strength(spec.signal_min, spec.signal_max);
    const Matrix loadings = random_orthonormal(d, rj + ri, rk);
    Vector sj(rj), si(ri);
    for (Index i = 0; i < rj; ++i) sj(i) = strength(rk);
    for (Index i = 0; i < ri; ++i) si(i) = strength(rk);

    truth.joint.push_back(loadings.leftCols(rj) * sj.asDiagonal() * joint_scores.transpose());
    truth.individual.push_back(loadings.rightCols(ri) * si.asDiagonal() *
                               individual_scores[k].transpose());
    truth.noise.push_back(spec.noise_level > 0.0 ? gaussian(d, n, spec.noise_level, rk)
                                                 : Matrix::Zero(d, n));
    truth.individual_scores.push_back(individual_scores[k]);

    blocks[k].name = "block" + std::to_string(k + 1);
    blocks[k].values = truth.joint[k] + truth.individual[k] + truth.noise[k];
  }
  return SyntheticInstance{MultiBlock(std::move(blocks)), std::move(truth)};
}

Matrix intersection_oracle(std::span<const Matrix> bases) {
  if (bases.empty()) throw ValidationError("intersection of zero subspaces");
  const Index n = bases.front().rows();
  Index total = 0;
  for (const auto& b : bases) total += b.cols();
  if (total == 0) return Matrix(n, 0);

  Matrix stacked(total, n);
  Index row = 0;
  for (const auto& b : bases) {
    stacked.middleRows(row, b.cols()) = b.transpose();
    row += b.cols();
  }
  Eigen::JacobiSVD<Matrix> svd(stacked, Eigen::ComputeThinV);
  const double K = static_cast<double>(bases.size());
  Index count = 0;
  while (count < svd.singularValues().size() &&
         svd.singularValues()(count) * svd.singularValues()(count) >= K - 1e-9) {
    ++count;
  }
  return svd.matrixV().leftCols(count);
}

std::vector<double> cross_product_angle_oracle(const Matrix& v1, const Matrix& v2) {
  const Matrix cross = v1.transpose() * v2;
  if (cross.size() == 0) return {};
  Eigen::JacobiSVD<Matrix> svd(cross);
  std::vector<double> angles;
  for (Index i = 0; i < svd.singularValues().size(); ++i) {
    angles.push_back(std::acos(std::clamp(svd.singularValues()(i), -1.0, 1.0)));
  }
  std::sort(angles.begin(), angles.end());
  return angles;
}

double subspace_distance(const Matrix& q1, const Matrix& q2) {
  const Matrix q2_out = q2 - q1 * (q1.transpose() * q2);
  const Matrix q1_out = q1 - q2 * (q2.transpose() * q1);
  return std::max(linalg::spectral_norm(q2_out), linalg::spectral_norm(q1_out));
}

double largest_principal_angle(const Matrix& q1, const Matrix& q2) {
  return std::asin(std::min(1.0, subspace_distance(q1, q2)));
}

}  // namespace jive
