#include "typicality/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "typicality/csv.hpp"
#include "typicality/error.hpp"
#include "typicality/metrics.hpp"
#include "typicality/parallel.hpp"
#include "typicality/report.hpp"

namespace typicality {
namespace {

std::optional<double> mean_of_present(const std::vector<std::optional<double>>& cells) {
  double total = 0.0;
  std::size_t n = 0;
  for (const auto& c : cells)
    if (c) {
      total += *c;
      ++n;
    }
  if (n == 0) return std::nullopt;
  return total / static_cast<double>(n);
}

template <class Set>
const TypicalityModel* find_payload(std::span<const TypicalityModel> models) {
  for (const auto& m : models)
    if (std::holds_alternative<Set>(m.payload())) return &m;
  return nullptr;
}

std::size_t argmax(std::span<const double> v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

struct Prepared {
  std::vector<std::size_t> label;  // stage-1 index per sample
  std::vector<std::size_t> predicted;
  std::vector<double> log_confidence;  // log p(c*|x)
  std::vector<std::size_t> kept;
};

Prepared categorize(const Dataset& eval_set, const MulticlassModel& stage1, std::size_t jobs) {
  std::vector<std::size_t> remap(eval_set.num_categories());
  for (std::size_t c = 0; c < remap.size(); ++c) {
    auto it = std::find(stage1.categories.begin(), stage1.categories.end(), eval_set.category_names()[c]);
    if (it == stage1.categories.end())
      throw ValidationError("evaluation category '" + eval_set.category_names()[c] + "' unknown to the stage-1 model");
    remap[c] = static_cast<std::size_t>(it - stage1.categories.begin());
  }
  const std::size_t n = eval_set.size();
  Prepared p;
  p.label.resize(n);
  p.predicted.resize(n);
  p.log_confidence.resize(n);
  parallel_for(n, jobs, [&](std::size_t i) {
    const auto& s = eval_set[i];
    const auto dist = predict_category_distribution(stage1, s.values);
    p.label[i] = remap[s.label];
    p.predicted[i] = dist.argmax();
    p.log_confidence[i] = std::log(dist.probs[p.predicted[i]]);
  });
  for (std::size_t i = 0; i < n; ++i)
    if (p.predicted[i] == p.label[i]) p.kept.push_back(i);
  return p;
}

MetricRow auc_row(const Dataset& eval_set, const MulticlassModel& stage1, const TypicalityModel& model,
                  const Prepared& prep, const EvalConfig& config) {
  const std::size_t k = stage1.num_categories();
  std::vector<std::optional<std::size_t>> model_index(k);
  for (std::size_t c = 0; c < k; ++c) model_index[c] = model.category_index(stage1.categories[c]);

  std::vector<double> scores(prep.kept.size(), std::numeric_limits<double>::quiet_NaN());
  parallel_for(prep.kept.size(), config.jobs, [&](std::size_t t) {
    const std::size_t i = prep.kept[t];
    const auto& s = eval_set[i];
    const auto mi = model_index[prep.label[i]];
    if (s.flag == TypicalityFlag::unlabeled || !mi) return;
    double v = model.score(*mi, s.values).value;
    if (config.mode == ScoreMode::joint) v += prep.log_confidence[i];
    scores[t] = v;
  });

  MetricRow row;
  row.name = std::string(model_kind_title(model.kind()));
  row.per_category.resize(k);
  for (std::size_t c = 0; c < k; ++c) {
    std::vector<double> cell_scores;
    std::vector<bool> typical;
    for (std::size_t t = 0; t < prep.kept.size(); ++t) {
      const std::size_t i = prep.kept[t];
      if (prep.label[i] != c || std::isnan(scores[t])) continue;
      cell_scores.push_back(scores[t]);
      typical.push_back(eval_set[i].flag == TypicalityFlag::typical);
    }
    const bool both = std::find(typical.begin(), typical.end(), true) != typical.end() &&
                      std::find(typical.begin(), typical.end(), false) != typical.end();
    if (both) row.per_category[c] = roc_auc(cell_scores, typical);
  }
  row.average = mean_of_present(row.per_category);
  return row;
}

void reporting_rows(const Dataset& eval_set, const MulticlassModel& stage1, std::span<const TypicalityModel> models,
                    const Prepared& prep, const EvalConfig& config, ResultTable& table) {
  const auto* manifold_model = find_payload<ManifoldSet>(models);
  const auto* nb_model = find_payload<NaiveBayesSet>(models);
  if (!manifold_model || !nb_model)
    throw ValidationError("attribute reporting needs a manifold model and a naive Bayes model");
  const auto& manifolds = std::get<ManifoldSet>(manifold_model->payload());
  const auto& nbs = std::get<NaiveBayesSet>(nb_model->payload());
  const RatingTable& ratings = *config.ratings;
  const AttributeGrouping& grouping = eval_set.grouping();

  // Ratings columns may be ordered differently from the dataset's groups.
  if (ratings.group_names.size() != grouping.num_groups())
    throw ValidationError("ratings and attribute grouping have different group counts");
  std::vector<std::size_t> column_of(grouping.num_groups());
  for (std::size_t g = 0; g < grouping.num_groups(); ++g) {
    auto it = std::find(ratings.group_names.begin(), ratings.group_names.end(), grouping.group_names[g]);
    if (it == ratings.group_names.end())
      throw ValidationError("ratings have no column for group '" + grouping.group_names[g] + "'");
    column_of[g] = static_cast<std::size_t>(it - ratings.group_names.begin());
  }

  const std::size_t k = stage1.num_categories();
  constexpr std::size_t kMethods = 3;
  const char* names[kMethods] = {kInformationContentRow, kTwoSigmaRow, kFourSigmaRow};
  std::vector<std::vector<double>> kl_sum(kMethods, std::vector<double>(k, 0.0));
  std::vector<std::vector<double>> hits(kMethods, std::vector<double>(k, 0.0));
  std::vector<std::size_t> count(k, 0);

  for (std::size_t i : prep.kept) {
    const auto& s = eval_set[i];
    if (s.flag != TypicalityFlag::abnormal) continue;
    auto rating = ratings.ratings.find(s.id);
    if (rating == ratings.ratings.end()) continue;
    const std::size_t c = prep.label[i];
    const auto mi = manifold_model->category_index(stage1.categories[c]);
    const auto ni = nb_model->category_index(stage1.categories[c]);
    if (!mi || !ni) continue;
    std::vector<double> truth(grouping.num_groups());
    for (std::size_t g = 0; g < truth.size(); ++g) truth[g] = rating->second[column_of[g]];

    const AbnormalityReport reports[kMethods] = {
        information_content_report(manifolds.models[*mi], manifolds.relevance, s.values,
                                   CategoryLabel{*mi, stage1.categories[c]}, grouping),
        baseline_report(nbs.models[*ni], s.values, 2.0, grouping),
        baseline_report(nbs.models[*ni], s.values, 4.0, grouping)};
    for (std::size_t r = 0; r < kMethods; ++r) {
      kl_sum[r][c] += kl_divergence(truth, reports[r].group_distribution, config.kl_epsilon);
      if (argmax(reports[r].group_distribution) == argmax(truth)) hits[r][c] += 1.0;
    }
    ++count[c];
  }

  for (std::size_t r = 0; r < kMethods; ++r) {
    MetricRow kl{names[r], std::vector<std::optional<double>>(k), std::nullopt};
    MetricRow plural{names[r], std::vector<std::optional<double>>(k), std::nullopt};
    for (std::size_t c = 0; c < k; ++c)
      if (count[c] > 0) {
        kl.per_category[c] = kl_sum[r][c] / static_cast<double>(count[c]);
        plural.per_category[c] = hits[r][c] / static_cast<double>(count[c]);
      }
    kl.average = mean_of_present(kl.per_category);
    plural.average = mean_of_present(plural.per_category);
    table.kl.push_back(std::move(kl));
    table.plurality.push_back(std::move(plural));
  }
}

}  // namespace

const MetricRow* ResultTable::find_auc(std::string_view name) const {
  for (const auto& r : auc)
    if (r.name == name) return &r;
  return nullptr;
}

const MetricRow* ResultTable::find_kl(std::string_view name) const {
  for (const auto& r : kl)
    if (r.name == name) return &r;
  return nullptr;
}

ResultTable run_pipeline(const Dataset& eval_set, const MulticlassModel& stage1,
                         std::span<const TypicalityModel> models, const EvalConfig& config) {
  if (models.empty()) throw ValidationError("evaluation needs at least one typicality model");
  const Prepared prep = categorize(eval_set, stage1, config.jobs);

  ResultTable table;
  table.categories = stage1.categories;
  table.evaluated = eval_set.size();
  table.excluded = eval_set.size() - prep.kept.size();
  table.confusion = confusion_matrix(prep.predicted, prep.label, stage1.num_categories());
  for (const auto& model : models) table.auc.push_back(auc_row(eval_set, stage1, model, prep, config));
  if (config.ratings) reporting_rows(eval_set, stage1, models, prep, config, table);
  return table;
}

namespace {

std::string cell_csv(const std::optional<double>& v) { return v ? csv::format_double(*v) : std::string(); }

void emit_rows(std::vector<std::string>& lines, std::string_view section, const std::vector<MetricRow>& rows) {
  for (const auto& r : rows) {
    std::vector<std::string> fields{std::string(section), r.name};
    for (const auto& c : r.per_category) fields.push_back(cell_csv(c));
    fields.push_back(cell_csv(r.average));
    lines.push_back(csv::join_record(fields));
  }
}

}  // namespace

std::string result_table_csv(const ResultTable& table) {
  std::vector<std::string> lines;
  std::vector<std::string> header{"section", "row"};
  header.insert(header.end(), table.categories.begin(), table.categories.end());
  header.emplace_back("average");
  lines.push_back(csv::join_record(header));
  emit_rows(lines, "auc", table.auc);
  emit_rows(lines, "kl", table.kl);
  emit_rows(lines, "plurality", table.plurality);
  for (Eigen::Index r = 0; r < table.confusion.rows(); ++r) {
    std::vector<std::string> fields{"confusion", table.categories[static_cast<std::size_t>(r)]};
    for (Eigen::Index c = 0; c < table.confusion.cols(); ++c) fields.push_back(csv::format_double(table.confusion(r, c)));
    fields.emplace_back();
    lines.push_back(csv::join_record(fields));
  }
  std::string out;
  for (const auto& l : lines) out += l + '\n';
  return out;
}

std::string result_table_text(const ResultTable& table) {
  std::size_t name_width = 10;
  for (const auto* rows : {&table.auc, &table.kl, &table.plurality})
    for (const auto& r : *rows) name_width = std::max(name_width, r.name.size());
  std::size_t col_width = 8;
  for (const auto& c : table.categories) col_width = std::max(col_width, c.size());

  std::ostringstream out;
  auto header = [&](std::string_view title) {
    out << title << '\n' << std::left << std::setw(static_cast<int>(name_width)) << "";
    for (const auto& c : table.categories) out << "  " << std::right << std::setw(static_cast<int>(col_width)) << c;
    out << "  " << std::setw(static_cast<int>(col_width)) << "average" << '\n';
  };
  auto rows = [&](const std::vector<MetricRow>& rs) {
    for (const auto& r : rs) {
      out << std::left << std::setw(static_cast<int>(name_width)) << r.name;
      for (const auto& c : r.per_category) {
        out << "  " << std::right << std::setw(static_cast<int>(col_width));
        if (c) out << std::fixed << std::setprecision(4) << *c;
        else out << "-";
      }
      out << "  " << std::right << std::setw(static_cast<int>(col_width));
      if (r.average) out << std::fixed << std::setprecision(4) << *r.average;
      else out << "-";
      out << '\n';
    }
  };
  header("Typicality within each category (AUC)");
  rows(table.auc);
  if (!table.kl.empty()) {
    out << '\n';
    header("Abnormal attribute reporting (KL divergence from ground truth, bits)");
    rows(table.kl);
    out << '\n';
    header("Abnormal attribute reporting (top group agrees with ground truth)");
    rows(table.plurality);
  }
  out << '\n' << "Stage-1 confusion (rows: true, columns: predicted)\n";
  for (Eigen::Index r = 0; r < table.confusion.rows(); ++r) {
    out << std::left << std::setw(static_cast<int>(name_width)) << table.categories[static_cast<std::size_t>(r)];
    for (Eigen::Index c = 0; c < table.confusion.cols(); ++c)
      out << "  " << std::right << std::setw(static_cast<int>(col_width)) << std::fixed << std::setprecision(4)
          << table.confusion(r, c);
    out << '\n';
  }
  out << '\n' << "evaluated " << table.evaluated << " samples, excluded " << table.excluded
      << " miscategorized by stage 1\n";
  return out.str();
}

}  // namespace typicality
