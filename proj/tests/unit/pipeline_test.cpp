#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "json.hpp"
#include "test_support.hpp"

namespace jive {
namespace {

using json = nlohmann::json;

PipelineConfig toy_config(std::uint64_t seed) {
  PipelineConfig c;
  c.initial_ranks = {2, 3};
  c.rng_seed = seed;
  return c;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(Pipeline, ToyRanksUnderBothCriteria) {
  const auto toy = generate_toy(1);
  for (Criterion c : {Criterion::multi_block_singular_value, Criterion::two_block_angle}) {
    PipelineConfig config = toy_config(1);
    config.criterion = c;
    const auto r = run_pipeline(toy.blocks, config);
    EXPECT_EQ(r.segmentation.provisional_joint_rank, 1) << to_string(c);
    EXPECT_EQ(r.decomposition.joint_rank, 1);
    EXPECT_EQ(r.decomposition.individual_ranks, (std::vector<Index>{1, 2}));
    EXPECT_EQ(r.segmentation.alternate_joint_rank, std::optional<Index>(1));
    // The recovered joint score is the planted half contrast.
    EXPECT_LE(largest_principal_angle(r.decomposition.joint_basis, toy.truth.joint_scores), 0.25);
  }
}

TEST(Pipeline, IdenticalCopiesAreFullyJoint) {
  const Matrix a = test::gaussian_matrix(15, 3, 1) * test::gaussian_matrix(3, 12, 2);
  const auto blocks = test::make_blocks({a, a});
  PipelineConfig c;
  c.initial_ranks = {3, 3};
  c.n_resamples = 50;
  const auto r = run_pipeline(blocks, c);
  EXPECT_EQ(r.decomposition.joint_rank, 3);
  for (std::size_t k = 0; k < 2; ++k) {
    EXPECT_EQ(r.decomposition.individual_ranks[k], 0);
    EXPECT_EQ(r.decomposition.individual[k].norm(), 0.0);
    EXPECT_LE(test::relative_error(r.decomposition.joint[k], a), 1e-10);
  }
}

TEST(Pipeline, NoiselessRecovery) {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    RandomInstanceSpec spec{.features = {20, 25, 30}, .objects = 30, .joint_rank = 1 + static_cast<Index>(seed % 3),
                            .individual_ranks = {1, 2, 3}};
    const auto inst = generate_random_instance(spec, seed);
    PipelineConfig c;
    for (Index ri : spec.individual_ranks) c.initial_ranks.push_back(spec.joint_rank + ri);
    c.n_resamples = 50;
    const auto r = run_pipeline(inst.blocks, c);
    ASSERT_EQ(r.decomposition.joint_rank, spec.joint_rank) << "seed " << seed;
    EXPECT_LE(largest_principal_angle(r.decomposition.joint_basis, inst.truth.joint_scores), 1e-8);
    for (std::size_t k = 0; k < 3; ++k) {
      EXPECT_LE(test::relative_error(r.decomposition.joint[k], inst.truth.joint[k]), 1e-8);
      EXPECT_LE(test::relative_error(r.decomposition.individual[k], inst.truth.individual[k]), 1e-8);
    }
  }
}

TEST(Pipeline, BoundedSvdCount) {
  for (std::size_t K : {2u, 3u, 5u}) {
    RandomInstanceSpec spec{.objects = 25, .joint_rank = 1};
    for (std::size_t k = 0; k < K; ++k) {
      spec.features.push_back(10 + static_cast<Index>(k));
      spec.individual_ranks.push_back(1);
    }
    spec.noise_level = 0.05;
    const auto inst = generate_random_instance(spec, K);
    PipelineConfig c;
    c.initial_ranks.assign(K, 2);
    c.n_resamples = 100;
    const auto r = run_pipeline(inst.blocks, c);
    EXPECT_LE(r.svd_count, max_svd_count(K));
    EXPECT_EQ(r.svd_count, 3 * K + 1);
  }
}

TEST(Pipeline, SquaredSingularValuesIgnoreBlockScale) {
  RandomInstanceSpec spec{.features = {12, 14}, .objects = 20, .joint_rank = 1,
                          .individual_ranks = {2, 1}, .noise_level = 0.2};
  const auto inst = generate_random_instance(spec, 4);
  PipelineConfig c;
  c.initial_ranks = {3, 2};
  c.n_resamples = 100;
  const auto base = run_pipeline(inst.blocks, c);
  const auto scaled = run_pipeline(test::make_blocks({1e6 * inst.blocks[0].values, inst.blocks[1].values}), c);
  ASSERT_EQ(base.segmentation.squared_singular_values.size(), scaled.segmentation.squared_singular_values.size());
  for (std::size_t i = 0; i < base.segmentation.squared_singular_values.size(); ++i) {
    EXPECT_NEAR(base.segmentation.squared_singular_values[i], scaled.segmentation.squared_singular_values[i], 1e-10);
  }
  EXPECT_NEAR(base.sv_threshold.value, scaled.sv_threshold.value, 1e-10);
  EXPECT_EQ(base.decomposition.joint_rank, scaled.decomposition.joint_rank);
}

TEST(Pipeline, NoJointComponentWarns) {
  Engine rng = RandomStreams(1).engine(0);
  const Matrix q = random_orthonormal(10, 2, rng);
  const auto blocks = test::make_blocks({test::gaussian_matrix(6, 1, 2) * q.col(0).transpose(),
                                         test::gaussian_matrix(7, 1, 3) * q.col(1).transpose()});
  PipelineConfig c;
  c.initial_ranks = {1, 1};
  c.n_resamples = 20;
  const auto r = run_pipeline(blocks, c);
  EXPECT_EQ(r.decomposition.joint_rank, 0);
  EXPECT_EQ(r.decomposition.individual_ranks, (std::vector<Index>{1, 1}));
  ASSERT_FALSE(r.warnings.empty());
  EXPECT_NE(r.warnings.back().find("no joint component"), std::string::npos);
}

TEST(Pipeline, CenteringIsApplied) {
  Matrix a = test::gaussian_matrix(6, 10, 1);
  a.colwise() += Vector::Constant(6, 100.0);
  PipelineConfig c;
  c.initial_ranks = {2, 2};
  c.center_rows = true;
  c.n_resamples = 20;
  const auto r = run_pipeline(test::make_blocks({a, 2 * a}), c);
  EXPECT_LE(r.blocks[0].values.rowwise().mean().cwiseAbs().maxCoeff(), 1e-12 * a.norm());
  EXPECT_EQ(r.timing.front().stage, "center");
}

TEST(Pipeline, ValidatesConfig) {
  const auto blocks = test::make_blocks({Matrix::Identity(3, 4), Matrix::Identity(3, 4)});
  PipelineConfig c;
  c.initial_ranks = {4, 1};
  EXPECT_THROW(run_pipeline(blocks, c), ValidationError);
}

TEST(Diagnostics, SchemaAndDeterminism) {
  const auto toy = generate_toy(2);
  PipelineConfig c = toy_config(2);
  c.n_resamples = 200;
  const auto r1 = run_pipeline(toy.blocks, c);
  const auto r2 = run_pipeline(toy.blocks, c);
  EXPECT_EQ(diagnostics_json(r1, false), diagnostics_json(r2, false));

  const json d = json::parse(diagnostics_json(r1));
  for (const char* key : {"config", "scree", "wedin", "segmentation", "decomposition", "warnings", "svd_count", "timing"}) {
    EXPECT_TRUE(d.contains(key)) << key;
  }
  EXPECT_EQ(d["scree"]["X"].size(), 100u);
  EXPECT_EQ(d["scree"]["Y"].size(), 100u);
  EXPECT_EQ(d["wedin"]["Y"]["n_resamples"], 200);
  EXPECT_TRUE(d["wedin"]["X"]["samples_summary"].contains("median"));
  EXPECT_EQ(d["segmentation"]["criterion"], "multi_block_singular_value");
  EXPECT_EQ(d["segmentation"]["principal_angles_deg"].size(), 2u);
  EXPECT_EQ(d["segmentation"]["provisional_joint_rank"], 1);
  EXPECT_EQ(d["decomposition"]["joint_rank"], 1);
  EXPECT_EQ(d["decomposition"]["individual_ranks"]["Y"], 2);
  EXPECT_EQ(d["decomposition"]["final_ranks"]["X"], 2);
  EXPECT_EQ(d["config"]["initial_ranks"], json::array({2, 3}));
  EXPECT_TRUE(d["timing"].contains("total"));
}

TEST(Diagnostics, AnglesNullBeyondTwoBlocks) {
  RandomInstanceSpec spec{.features = {8, 9, 10}, .objects = 15, .joint_rank = 1,
                          .individual_ranks = {1, 1, 1}, .noise_level = 0.01};
  const auto inst = generate_random_instance(spec, 1);
  PipelineConfig c;
  c.initial_ranks = {2, 2, 2};
  c.n_resamples = 30;
  const json d = json::parse(diagnostics_json(run_pipeline(inst.blocks, c)));
  EXPECT_TRUE(d["segmentation"]["principal_angles_deg"].is_null());
}

TEST(Outputs, FilesShapesAndByteIdentity) {
  const auto toy = generate_toy(3);
  PipelineConfig c = toy_config(3);
  c.n_resamples = 100;
  const auto r = run_pipeline(toy.blocks, c);
  const auto dir1 = test::scratch_dir("outputs1");
  const auto dir2 = test::scratch_dir("outputs2");
  write_outputs(r, dir1);
  write_outputs(run_pipeline(toy.blocks, c), dir2);

  for (const std::string stem : {"joint_", "individual_", "residual_", "bss_joint_", "ins_", "cns_loadings_"}) {
    for (const std::string block : {"X", "Y"}) {
      const auto name = stem + block + ".csv";
      ASSERT_TRUE(std::filesystem::exists(dir1 / name)) << name;
      EXPECT_EQ(slurp(dir1 / name), slurp(dir2 / name)) << name;
    }
  }
  const DataBlock cns = load_block(dir1 / "cns.csv");
  EXPECT_EQ(cns.values.rows(), 1);
  EXPECT_EQ(cns.values.cols(), 100);
  EXPECT_EQ(cns.values, r.representations.cns);
  const DataBlock joint = load_block(dir1 / "joint_Y.csv");
  EXPECT_EQ(joint.values, r.decomposition.joint[1]);
  EXPECT_EQ(load_block(dir1 / "ins_Y.csv").values.rows(), 2);
  EXPECT_TRUE(std::filesystem::exists(dir1 / "diagnostics.json"));
}

TEST(Outputs, LabelsCarriedThrough) {
  DataBlock a = test::make_block("a", test::gaussian_matrix(4, 6, 1));
  DataBlock b = test::make_block("b", test::gaussian_matrix(5, 6, 2));
  a.object_labels = {"s1", "s2", "s3", "s4", "s5", "s6"};
  a.feature_labels = {"f1", "f2", "f3", "f4"};
  PipelineConfig c;
  c.initial_ranks = {2, 2};
  c.n_resamples = 20;
  const auto r = run_pipeline(MultiBlock({a, b}), c);
  const auto dir = test::scratch_dir("labels");
  write_outputs(r, dir);
  const DataBlock joint = load_block(dir / "individual_a.csv");
  EXPECT_EQ(joint.object_labels, a.object_labels);
  EXPECT_EQ(joint.feature_labels, a.feature_labels);
  EXPECT_EQ(load_block(dir / "individual_b.csv").object_labels, a.object_labels);
}

}  // namespace
}  // namespace jive
