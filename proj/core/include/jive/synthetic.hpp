#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "jive/block_model.hpp"
#include "jive/linalg.hpp"
#include "jive/random.hpp"

namespace jive {

/// Planted components of a generated instance: X_k = J_k + I_k + E_k.
struct GroundTruth {
  std::vector<Matrix> joint;
  std::vector<Matrix> individual;
  std::vector<Matrix> noise;
  Matrix joint_scores;                     // n x r_J orthonormal
  std::vector<Matrix> individual_scores;   // n x r_Ik orthonormal

  Matrix signal(std::size_t k) const { return joint[k] + individual[k]; }
};

struct SyntheticInstance {
  MultiBlock blocks;
  GroundTruth truth;
};

/// Two-block toy: X (100 x 100) with a rank-1 joint and a rank-1 individual
/// part under heavy noise, Y (10000 x 100) with the same joint score and a
/// rank-2 individual part under unit noise.
struct ToySpec {
  Index n = 100;
  Index d_x = 100;
  Index d_y = 10000;
  // Singular values of the planted parts.
  double x_joint = 270000.0;
  double x_individual = 245000.0;
  double y_joint = 900.0;
  double y_individual_three_group = 800.0;
  double y_individual_two_group = 450.0;
  double x_noise = 5000.0;
  double y_noise = 1.0;
  double individual_angle_deg = 48.0;
};

/// Joint score: left/right half contrast. X individual: two groups of 50
/// orthogonal to it. Y individual: a three-group pattern on the top half of
/// the features, tilted so its subspace sits at the requested angle from X's,
/// and a two-group pattern on the bottom half. All scores sum to zero, so
/// signal rows have mean 0.
SyntheticInstance generate_toy(std::uint64_t seed, const ToySpec& spec = {});

struct RandomInstanceSpec {
  std::vector<Index> features;  // d_k, one per block
  Index objects = 40;
  Index joint_rank = 1;
  std::vector<Index> individual_ranks;
  /// When set, the first individual direction of every block k >= 2 sits
  /// at exactly this angle from block 1's first individual direction; all
  /// other individual directions are mutually orthogonal.
  std::optional<double> individual_angle_deg;
  double noise_level = 0.0;
  /// Planted singular values are drawn uniformly from this range.
  double signal_min = 5.0;
  double signal_max = 10.0;
};

/// Random instance satisfying the identifiability conditions: shared joint
/// row space, individual rows orthogonal to it, trivial individual
/// intersection. Throws ValidationError when the dimensions do not fit.
SyntheticInstance generate_random_instance(const RandomInstanceSpec& spec, std::uint64_t seed);

/// Orthonormal basis of the intersection of the column spans of the given
/// column-orthonormal bases: right singular vectors of the stacked
/// transposes whose squared singular value is >= K - 1e-9.
Matrix intersection_oracle(std::span<const Matrix> bases);

/// Principal angles in radians, ascending: arccos of the singular values of
/// V1^T V2.
std::vector<double> cross_product_angle_oracle(const Matrix& v1, const Matrix& v2);

/// rho(Q1, Q2) = ||P1 - P2|| computed as max(||(I-P1)Q2||, ||(I-P2)Q1||);
/// the sine of the largest principal angle for equal dimensions. Accurate
/// for tiny angles, unlike arccos.
double subspace_distance(const Matrix& q1, const Matrix& q2);

/// Largest principal angle (radians) between equal-dimension subspaces.
double largest_principal_angle(const Matrix& q1, const Matrix& q2);

/// Uniformly random n x r matrix with orthonormal columns.
Matrix random_orthonormal(Index n, Index r, Engine& rng);

}  // namespace jive
