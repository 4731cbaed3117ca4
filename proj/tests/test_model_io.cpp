#include <gtest/gtest.h>

#include <bit>

#include "test_support.hpp"

namespace forest_share {
namespace {

ModelErrc error_code(const std::string& json) {
  try {
    load_model(json);
  } catch (const ModelError& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected ModelError for " << json;
  return ModelErrc::schema;
}

TEST(LoadModel, SingleLeafRegressionTree) {
  const Forest f = load_model(R"({"task":"regression","n_features":3,"aggregation":{"mode":"mean"},
                                  "trees":[{"root":0,"nodes":[{"kind":"leaf","value":2.5}]}]})");
  EXPECT_EQ(f.trees.size(), 1u);
  EXPECT_EQ(count_distinct_conditions(f), 0u);
  EXPECT_EQ(std::get<double>(f.trees[0].nodes[0].value), 2.5);
}

TEST(LoadModel, Example1Fixture) {
  const Forest f = load_model(save_model(fixtures::example1_forest()));
  EXPECT_EQ(f.trees.size(), 2u);
  EXPECT_EQ(f.internal_count(), 4u);
  ASSERT_TRUE(f.bootstrap_indices.has_value());
  EXPECT_EQ((*f.bootstrap_indices)[1], (std::vector<RowIndex>{0, 1, 3}));
}

TEST(LoadModel, ReportsStructuralErrors) {
  const std::string head = R"({"task":"classification","n_features":2,"n_classes":2,"aggregation":{"mode":"majority"},"trees":[{"root":0,"nodes":[)";
  const std::string leaf = R"({"kind":"leaf","value":[1,0]})";
  EXPECT_EQ(error_code(head + R"({"kind":"internal","feature":0,"threshold":1.0,"left":0,"right":1},)" + leaf + "]}]}"),
            ModelErrc::cycle);
  EXPECT_EQ(error_code(head + R"({"kind":"internal","feature":0,"threshold":1.0,"left":1,"right":7},)" + leaf + "]}]}"),
            ModelErrc::dangling_child);
  EXPECT_EQ(error_code(head + R"({"kind":"internal","feature":5,"threshold":1.0,"left":1,"right":2},)" + leaf + "," +
                       leaf + "]}]}"),
            ModelErrc::feature_out_of_range);
  EXPECT_EQ(error_code(head + R"({"kind":"branch"}]}]})"), ModelErrc::schema);
  EXPECT_EQ(error_code(R"({"task":"regression","n_features":1,"aggregation":{"mode":"majority"},"trees":[]})"),
            ModelErrc::aggregation);
  EXPECT_EQ(error_code("{not json"), ModelErrc::schema);
}

TEST(LoadModel, ErrorMessageNamesLocation) {
  try {
    load_model(R"({"task":"regression","n_features":1,"aggregation":{"mode":"mean"},
                   "trees":[{"root":0,"nodes":[{"kind":"leaf","value":1}]},
                            {"root":0,"nodes":[{"kind":"internal","feature":3,"threshold":0,"left":1,"right":2},
                                               {"kind":"leaf","value":1},{"kind":"leaf","value":2}]}]})");
    FAIL();
  } catch (const ModelError& e) {
    EXPECT_NE(std::string(e.what()).find("tree 1, node 0"), std::string::npos) << e.what();
  }
}

TEST(SaveModel, EmptyTreeList) {
  Forest f;
  f.task = Task::regression;
  f.n_features = 2;
  f.aggregation.mode = AggregationMode::mean;
  const std::string json = save_model(f);
  EXPECT_NE(json.find(R"("trees":[])"), std::string::npos);
  EXPECT_TRUE(load_model(json).trees.empty());
}

// Property: load(save(f)) reproduces structure and threshold bit patterns for random forests,
// including awkward thresholds.
TEST(SaveModel, RoundTripPreservesThresholdBits) {
  Rng rng(11);
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    Forest f = testing::cart_fixture(seed, 60, 3, 4, 4, seed % 2 ? Task::regression : Task::classification).forest;
    for (auto& tree : f.trees)
      for (auto& node : tree.nodes)
        if (!node.is_leaf()) {
          const double noise = uniform_unit(rng);
          node.condition.threshold += noise * 1e-7 + (seed == 3 ? 1e300 : 0.0);
        }
    const Forest g = load_model(save_model(f));
    ASSERT_TRUE(same_topology(f, g));
    for (std::size_t t = 0; t < f.trees.size(); ++t)
      for (std::size_t h = 0; h < f.trees[t].nodes.size(); ++h) {
        const Node& a = f.trees[t].nodes[h];
        const Node& b = g.trees[t].nodes[h];
        EXPECT_EQ(a.value, b.value);
        if (!a.is_leaf()) {
          EXPECT_EQ(std::bit_cast<std::uint64_t>(a.condition.threshold),
                    std::bit_cast<std::uint64_t>(b.condition.threshold));
        }
      }
    EXPECT_EQ(save_model(g), save_model(f));
  }
}

TEST(SaveModel, WeightedSumRoundTrip) {
  Forest f;
  f.task = Task::regression;
  f.n_features = 1;
  Tree t;
  t.nodes = {Node::make_internal(0, 0.1 + 0.2, 1, 2), Node::make_leaf(-0.25), Node::make_leaf(1.0 / 3.0)};
  f.trees = {t, t};
  f.aggregation = {AggregationMode::weighted_sum, {0.1, 0.7}, 1.0 / 7.0};
  const Forest g = load_model(save_model(f, 2));
  EXPECT_EQ(g.aggregation.weights, f.aggregation.weights);
  EXPECT_EQ(g.aggregation.bias, f.aggregation.bias);
  EXPECT_EQ(g.trees[1].nodes[0].condition.threshold, 0.1 + 0.2);
}

TEST(ReadCsv, LabelSelectionByNameAndIndex) {
  std::istringstream in("a,label,b\n1,0,2\n3,1,4\n");
  CsvOptions opts;
  opts.label_column = "label";
  const Dataset d = read_csv(in, opts);
  EXPECT_EQ(d.n_features(), 2u);
  EXPECT_EQ(d.at(1, 1), 4.0);
  EXPECT_EQ(d.labels(), (std::vector<double>{0, 1}));

  std::istringstream in2("1,0,2\n3,1,4\n");
  CsvOptions opts2;
  opts2.has_header = false;
  opts2.label_column = "0";
  const Dataset d2 = read_csv(in2, opts2);
  EXPECT_EQ(d2.labels(), (std::vector<double>{1, 3}));

  std::istringstream in3("x0,x1\n1,2\n");
  CsvOptions opts3;
  opts3.label_column = "target";
  try {
    read_csv(in3, opts3);
    FAIL();
  } catch (const CsvError& e) {
    EXPECT_NE(std::string(e.what()).find("target"), std::string::npos);
  }
}

TEST(ReadCsv, FeatureOnlyFileWhenWidthMatchesModel) {
  std::istringstream in("x0,x1\n1,2\n3,4\n");
  CsvOptions opts;
  opts.expected_features = 2;
  const Dataset d = read_csv(in, opts);
  EXPECT_FALSE(d.has_labels());
  EXPECT_EQ(d.size(), 2u);
}

TEST(ReadCsv, WriteReadRoundTrip) {
  const Dataset d = fixtures::synthetic_dataset(30, 3, Task::regression, 5);
  std::stringstream buf;
  write_csv(buf, d);
  const Dataset e = read_csv(buf);
  ASSERT_EQ(e.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    for (std::size_t f = 0; f < 3; ++f) EXPECT_EQ(e.at(i, f), d.at(i, f));
    EXPECT_EQ(e.labels()[i], d.labels()[i]);
  }
}

}  // namespace
}  // namespace forest_share
