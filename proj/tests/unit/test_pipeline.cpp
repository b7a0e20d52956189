#include <cmath>
#include <algorithm>
#include <map>
#include <sstream>

#include <gtest/gtest.h>

#include "typicality/error.hpp"
#include "typicality/metrics.hpp"
#include "typicality/pipeline.hpp"
#include "typicality/synth.hpp"

using namespace typicality;

namespace {

SynthConfig small_config() {
  SynthConfig c;
  c.categories = 3;
  c.attributes = 12;
  c.groups = 3;
  c.manifold_dim = 2;
  c.manifold_attributes_per_group = 2;
  c.train_per_category = 60;
  c.test_typical_per_category = 15;
  c.test_abnormal_per_category = 15;
  c.shifted_attributes = 2;
  return c;
}

struct Trained {
  SyntheticSet data;
  TrainedSuite suite;
};

const Trained& trained() {
  static const Trained t = [] {
    Trained out{synth_generate(small_config(), 5), {}};
    const ModelKind kinds[] = {ModelKind::naive_bayes, ModelKind::kde, ModelKind::manifold_global,
                               ModelKind::ocsvm, ModelKind::baseline};
    out.suite = train_suite(out.data.train, kinds, TrainConfig{});
    return out;
  }();
  return t;
}

/// AUC of one model on one category, computed sample by sample over the stage-1-correct samples.
double manual_auc(const Dataset& eval, const MulticlassModel& stage1, const TypicalityModel& model,
                  std::size_t category, ScoreMode mode) {
  std::vector<double> scores;
  std::vector<bool> typical;
  for (const auto& s : eval.samples()) {
    if (s.label != category) continue;
    const auto dist = predict_category_distribution(stage1, s.values);
    if (dist.argmax() != s.label) continue;
    double v = model.score(*model.category_index(eval.category_names()[category]), s.values).value;
    if (mode == ScoreMode::joint) v += std::log(dist.probs[s.label]);
    scores.push_back(v);
    typical.push_back(s.flag == TypicalityFlag::typical);
  }
  return roc_auc(scores, typical);
}

/// Copy of `d` with sample `index` moved to category `label`.
Dataset relabel(const Dataset& d, std::size_t index, std::size_t label) {
  auto samples = d.samples();
  samples[index].label = label;
  return Dataset(d.attribute_names(), d.category_names(), d.grouping(), samples);
}

}  // namespace

TEST(Pipeline, AucMatchesSampleBySampleComputation) {
  const auto& t = trained();
  const auto table = run_pipeline(t.data.test, t.suite.stage1, t.suite.models);
  ASSERT_EQ(table.auc.size(), t.suite.models.size());
  for (std::size_t m = 0; m < t.suite.models.size(); ++m) {
    EXPECT_EQ(table.auc[m].name, model_kind_title(t.suite.models[m].kind()));
    for (std::size_t c = 0; c < 3; ++c) {
      ASSERT_TRUE(table.auc[m].per_category[c].has_value());
      EXPECT_EQ(*table.auc[m].per_category[c],
                manual_auc(t.data.test, t.suite.stage1, t.suite.models[m], c, ScoreMode::likelihood_given_class));
    }
  }
}

TEST(Pipeline, JointModeAddsLogConfidence) {
  const auto& t = trained();
  EvalConfig cfg;
  cfg.mode = ScoreMode::joint;
  const auto table = run_pipeline(t.data.test, t.suite.stage1, t.suite.models, cfg);
  for (std::size_t c = 0; c < 3; ++c)
    EXPECT_EQ(*table.auc[0].per_category[c],
              manual_auc(t.data.test, t.suite.stage1, t.suite.models[0], c, ScoreMode::joint));
}

TEST(Pipeline, MiscategorizedSamplesAreExcluded) {
  const auto& t = trained();
  const auto base = run_pipeline(t.data.test, t.suite.stage1, t.suite.models);
  // A typical c0 sample labeled c1 is predicted as c0, so it must be left out everywhere.
  std::size_t target = 0;
  while (t.data.test[target].label != 0 || t.data.test[target].flag != TypicalityFlag::typical) ++target;
  ASSERT_EQ(predict_category_distribution(t.suite.stage1, t.data.test[target].values).argmax(), 0u);
  const Dataset moved = relabel(t.data.test, target, 1);
  const auto table = run_pipeline(moved, t.suite.stage1, t.suite.models);
  EXPECT_EQ(table.excluded, base.excluded + 1);
  EXPECT_EQ(table.evaluated, base.evaluated);
  for (std::size_t m = 0; m < table.auc.size(); ++m)
    for (std::size_t c = 0; c < 3; ++c)
      EXPECT_EQ(*table.auc[m].per_category[c],
                manual_auc(moved, t.suite.stage1, t.suite.models[m], c, ScoreMode::likelihood_given_class));
  EXPECT_GT(table.confusion(1, 0), 0.0);
}

TEST(Pipeline, PerfectStageOneLeavesNothingOut) {
  const auto& t = trained();
  const auto table = run_pipeline(t.data.test, t.suite.stage1, t.suite.models);
  std::size_t wrong = 0;
  for (const auto& s : t.data.test.samples())
    if (predict_category_distribution(t.suite.stage1, s.values).argmax() != s.label) ++wrong;
  EXPECT_EQ(table.excluded, wrong);
  for (Eigen::Index r = 0; r < table.confusion.rows(); ++r) EXPECT_NEAR(table.confusion.row(r).sum(), 1.0, 1e-12);
}

TEST(Pipeline, CategoryWithoutAbnormalSamplesHasNoCell) {
  const auto& t = trained();
  std::vector<Sample> samples;
  for (const auto& s : t.data.test.samples())
    if (!(s.label == 2 && s.flag == TypicalityFlag::abnormal)) samples.push_back(s);
  const Dataset eval(t.data.test.attribute_names(), t.data.test.category_names(), t.data.test.grouping(), samples);
  const auto table = run_pipeline(eval, t.suite.stage1, t.suite.models);
  for (const auto& row : table.auc) {
    EXPECT_FALSE(row.per_category[2].has_value());
    ASSERT_TRUE(row.average.has_value());
    EXPECT_DOUBLE_EQ(*row.average, (*row.per_category[0] + *row.per_category[1]) / 2.0);
  }
}

TEST(Pipeline, ReportingRowsAndRequirements) {
  const auto& t = trained();
  EvalConfig cfg;
  cfg.ratings = &t.data.ratings;
  const auto table = run_pipeline(t.data.test, t.suite.stage1, t.suite.models, cfg);
  ASSERT_EQ(table.kl.size(), 3u);
  ASSERT_EQ(table.plurality.size(), 3u);
  EXPECT_EQ(table.kl[0].name, kInformationContentRow);
  EXPECT_EQ(table.kl[1].name, kTwoSigmaRow);
  EXPECT_EQ(table.kl[2].name, kFourSigmaRow);
  ASSERT_NE(table.find_kl(kInformationContentRow), nullptr);
  EXPECT_EQ(table.find_kl("nope"), nullptr);
  for (const auto& row : table.kl)
    for (const auto& cell : row.per_category) {
      ASSERT_TRUE(cell.has_value());
      EXPECT_GE(*cell, 0.0);
    }
  for (const auto& row : table.plurality)
    for (const auto& cell : row.per_category) EXPECT_TRUE(*cell >= 0.0 && *cell <= 1.0);

  const std::vector<TypicalityModel> only_kde{t.suite.models[1]};
  EXPECT_THROW(run_pipeline(t.data.test, t.suite.stage1, only_kde, cfg), ValidationError);
  EXPECT_THROW(run_pipeline(t.data.test, t.suite.stage1, std::vector<TypicalityModel>{}), ValidationError);
}

TEST(Pipeline, RejectsCategoriesUnknownToStageOne) {
  const auto& t = trained();
  auto names = t.data.test.category_names();
  names[2] = "submarine";
  const Dataset renamed(t.data.test.attribute_names(), names, t.data.test.grouping(), t.data.test.samples());
  EXPECT_THROW(run_pipeline(renamed, t.suite.stage1, t.suite.models), ValidationError);
}

TEST(Pipeline, ParallelScoringIsIdentical) {
  const auto& t = trained();
  EvalConfig serial;
  serial.ratings = &t.data.ratings;
  EvalConfig parallel = serial;
  parallel.jobs = 4;
  const auto a = run_pipeline(t.data.test, t.suite.stage1, t.suite.models, serial);
  const auto b = run_pipeline(t.data.test, t.suite.stage1, t.suite.models, parallel);
  EXPECT_EQ(result_table_csv(a), result_table_csv(b));
}

TEST(ResultTable, CsvLayout) {
  const auto& t = trained();
  EvalConfig cfg;
  cfg.ratings = &t.data.ratings;
  const auto table = run_pipeline(t.data.test, t.suite.stage1, t.suite.models, cfg);
  std::istringstream in(result_table_csv(table));
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "section,row," + table.categories[0] + "," + table.categories[1] + "," + table.categories[2] +
                      ",average");
  std::map<std::string, int> sections;
  int lines = 0;
  while (std::getline(in, line)) {
    ++lines;
    sections[line.substr(0, line.find(','))]++;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 5) << line;
  }
  EXPECT_EQ(sections["auc"], 5);
  EXPECT_EQ(sections["kl"], 3);
  EXPECT_EQ(sections["plurality"], 3);
  EXPECT_EQ(sections["confusion"], 3);
  EXPECT_EQ(lines, 14);
}

TEST(ResultTable, TextMentionsEverySection) {
  const auto& t = trained();
  EvalConfig cfg;
  cfg.ratings = &t.data.ratings;
  const auto text = result_table_text(run_pipeline(t.data.test, t.suite.stage1, t.suite.models, cfg));
  for (const char* needle : {"AUC", "KL divergence", "top group", "confusion", "excluded", kInformationContentRow})
    EXPECT_NE(text.find(needle), std::string::npos) << needle;
}
