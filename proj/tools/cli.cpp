#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "bundle.hpp"
#include "typicality/csv.hpp"
#include "typicality/dataset.hpp"
#include "typicality/error.hpp"
#include "typicality/log.hpp"
#include "typicality/model_io.hpp"
#include "typicality/parallel.hpp"
#include "typicality/pipeline.hpp"
#include "typicality/relevance.hpp"
#include "typicality/report.hpp"
#include "typicality/synth.hpp"

namespace typicality::cli {
namespace {

namespace fs = std::filesystem;

/// A flag value that parses but makes no sense; reported like a parse error.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

constexpr std::size_t kTopAttributes = 5;

double parse_number(const std::string& flag, const std::string& text) {
  double v = 0.0;
  if (!csv::parse_double(text, v)) throw UsageError(flag + ": expected a number, got '" + text + "'");
  return v;
}

std::vector<ModelKind> parse_kinds(const std::vector<std::string>& tokens) {
  std::vector<ModelKind> kinds;
  for (const auto& t : tokens) {
    if (t == "all") {
      for (ModelKind k : kAllModelKinds)
        if (std::find(kinds.begin(), kinds.end(), k) == kinds.end()) kinds.push_back(k);
      continue;
    }
    const auto k = parse_model_kind(t);
    if (!k) throw UsageError("--model: unknown kind '" + t + "'");
    if (std::find(kinds.begin(), kinds.end(), *k) == kinds.end()) kinds.push_back(*k);
  }
  return kinds;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open '" + path.string() + "' for writing");
  f << text;
  if (!f) throw Error("failed writing '" + path.string() + "'");
}

/// Writes to `path`, or to `out` when no path was given.
void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty()) out << text;
  else write_text(path, text);
}

std::string csv_text(const std::vector<std::vector<std::string>>& rows) {
  std::string text;
  for (const auto& r : rows) text += csv::join_record(r) + '\n';
  return text;
}

struct DataArgs {
  std::string data;
  std::string groups;

  void add_to(CLI::App* sub) {
    sub->add_option("--data", data, "Dataset file (.csv or .json)")->required();
    sub->add_option("--groups", groups, "Attribute grouping sidecar CSV (attribute,group)");
  }

  Dataset load(bool training) const {
    LoadOptions options;
    options.training = training;
    if (!groups.empty()) options.grouping_path = groups;
    return load_dataset(data, options);
  }
};

// ---------------------------------------------------------------- synth

struct SynthArgs {
  std::string out_dir;
  std::uint64_t seed = 0;
  std::string format = "csv";
  std::vector<std::string> abnormalities{"shift", "offset", "mixing"};
  SynthConfig config;

  void add_to(CLI::App* sub) {
    sub->add_option("--out", out_dir, "Output directory for train, test, groups.csv and ratings.csv")->required();
    sub->add_option("--seed", seed, "Random seed")->capture_default_str();
    sub->add_option("--format", format, "Dataset format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    sub->add_option("--categories", config.categories, "Number of categories")->capture_default_str();
    sub->add_option("--attributes", config.attributes, "Number of attributes")->capture_default_str();
    sub->add_option("--num-groups", config.groups, "Number of attribute groups")->capture_default_str();
    sub->add_option("--dim", config.manifold_dim, "Planted manifold dimension")->capture_default_str();
    sub->add_option("--train", config.train_per_category, "Typical training samples per category")
        ->capture_default_str();
    sub->add_option("--test-typical", config.test_typical_per_category, "Typical test samples per category")
        ->capture_default_str();
    sub->add_option("--test-abnormal", config.test_abnormal_per_category, "Abnormal test samples per category")
        ->capture_default_str();
    sub->add_option("--noise", config.noise_sd, "Noise standard deviation")->capture_default_str();
    sub->add_option("--spread", config.spread, "Standard deviation along the manifold")->capture_default_str();
    sub->add_option("--shift", config.shift, "Abnormal displacement in noise standard deviations")
        ->capture_default_str();
    sub->add_option("--abnormality", abnormalities, "Abnormality types, assigned round-robin (shift,offset,mixing)")
        ->delimiter(',')
        ->capture_default_str();
  }

  int run(std::ostream& out) {
    config.abnormalities.clear();
    for (const auto& a : abnormalities) {
      const auto t = parse_abnormality(a);
      if (!t) throw UsageError("--abnormality: unknown type '" + a + "'");
      config.abnormalities.push_back(*t);
    }
    const SyntheticSet set = synth_generate(config, seed);
    fs::create_directories(out_dir);
    const fs::path dir(out_dir);
    const auto fmt = format == "json" ? DataFormat::json : DataFormat::csv;
    const std::string ext = format == "json" ? ".json" : ".csv";
    save_dataset(set.train, dir / ("train" + ext), fmt);
    save_dataset(set.test, dir / ("test" + ext), fmt);
    save_grouping(set.train.grouping(), set.train.attribute_names(), dir / "groups.csv");
    save_ratings(set.ratings, dir / "ratings.csv");
    out << "wrote " << set.train.size() << " training and " << set.test.size() << " test samples to "
        << dir.string() << '\n';
    return kExitOk;
  }
};

// ---------------------------------------------------------------- train

struct TrainArgs {
  DataArgs data;
  std::string out_path;
  bool stage1 = false;
  std::vector<std::string> models;
  TrainConfig config;
  std::string bandwidth = "silverman";
  bool scalar_bandwidth = false;
  int bins = config.relevance.bins;
  double floor = config.relevance.entropy_floor;
  std::optional<int> k;
  std::optional<int> d;
  double nu = config.ocsvm.nu;
  std::string gamma = "scale";

  void add_to(CLI::App* sub) {
    data.add_to(sub);
    sub->add_option("--out", out_path, "Model bundle to write (JSON)")->required();
    sub->add_flag("--stage1", stage1, "Train the stage-1 multiclass classifier");
    sub->add_option("--model", models,
                    "Typicality models: baseline, nb, nbw, kde, mdist-global, mdist-local, mdensity, ocsvm or all")
        ->delimiter(',');
    sub->add_option("--l2", config.stage1.l2, "Stage-1 l2 penalty")->capture_default_str();
    sub->add_option("--tol", config.stage1.tol, "Stage-1 gradient-norm tolerance")->capture_default_str();
    sub->add_option("--max-iter", config.stage1.max_iter, "Stage-1 iteration cap")->capture_default_str();
    sub->add_option("--bins", bins, "Histogram bins for relevance entropy")->capture_default_str();
    sub->add_option("--floor", floor, "Entropy floor for relevance weights")->capture_default_str();
    sub->add_option("--bandwidth", bandwidth, "KDE bandwidth: silverman or a positive number")->capture_default_str();
    sub->add_flag("--scalar-bandwidth", scalar_bandwidth, "Use one KDE bandwidth for all attributes");
    sub->add_option("--k", k, "Manifold patch size (default min(10, N-1))");
    sub->add_option("--d", d, "Manifold tangent dimension (default min(3, k-1))");
    sub->add_flag("--weighted-density", config.weighted_manifold_density,
                  "Weight the manifold density by attribute relevance");
    sub->add_option("--nu", nu, "One-class SVM nu")->capture_default_str();
    sub->add_option("--gamma", gamma, "One-class SVM RBF gamma: scale or a positive number")->capture_default_str();
  }

  int run(std::ostream& out) {
    if (!stage1 && models.empty()) throw UsageError("train: give --stage1, --model or both");
    const auto kinds = parse_kinds(models);
    config.relevance.bins = bins;
    config.relevance.entropy_floor = floor;
    if (bandwidth == "silverman") {
      config.kde.rule = BandwidthRule::silverman;
    } else {
      config.kde.rule = BandwidthRule::fixed;
      config.kde.fixed_bandwidth = parse_number("--bandwidth", bandwidth);
    }
    config.kde.scalar = scalar_bandwidth;
    config.manifold.k = k;
    config.manifold.d = d;
    config.ocsvm.nu = nu;
    if (gamma != "scale") config.ocsvm.gamma = parse_number("--gamma", gamma);

    const Dataset train = data.load(true);
    ModelBundle bundle;
    const bool needs_stage1 = stage1 || std::find(kinds.begin(), kinds.end(), ModelKind::baseline) != kinds.end();
    if (needs_stage1) bundle.stage1 = train_multiclass(train, config.stage1);
    bundle.models = train_models(train, kinds, config, bundle.stage1 ? &*bundle.stage1 : nullptr);
    save_model(bundle, out_path);
    out << "trained " << (bundle.stage1 ? "stage-1 and " : "") << bundle.models.size() << " typicality model"
        << (bundle.models.size() == 1 ? "" : "s") << " on " << train.size() << " samples\n";
    return kExitOk;
  }
};

// ---------------------------------------------------------------- relevance

struct RelevanceArgs {
  DataArgs data;
  std::string out_path;
  RelevanceOptions options;

  void add_to(CLI::App* sub) {
    data.add_to(sub);
    sub->add_option("--out", out_path, "Weights CSV (default: standard output)");
    sub->add_option("--bins", options.bins, "Histogram bins")->capture_default_str();
    sub->add_option("--floor", options.entropy_floor, "Entropy floor")->capture_default_str();
  }

  int run(std::ostream& out) {
    const Dataset train = data.load(true);
    const RelevanceWeights w = compute_relevance(train, options);
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> header{"category"};
    header.insert(header.end(), train.attribute_names().begin(), train.attribute_names().end());
    rows.push_back(header);
    for (std::size_t c = 0; c < w.categories.size(); ++c) {
      std::vector<std::string> row{w.categories[c]};
      for (Eigen::Index i = 0; i < w.weights.cols(); ++i)
        row.push_back(csv::format_double(w.weights(static_cast<Eigen::Index>(c), i)));
      rows.push_back(std::move(row));
    }
    emit(out_path, csv_text(rows), out);
    return kExitOk;
  }
};

// ---------------------------------------------------------------- score

struct ScoreArgs {
  DataArgs data;
  std::string model_path;
  std::string out_path;
  std::string mode = "likelihood";
  std::size_t jobs = 1;

  void add_to(CLI::App* sub) {
    data.add_to(sub);
    sub->add_option("--models", model_path, "Model bundle from train")->required();
    sub->add_option("--out", out_path, "Scores CSV (default: standard output)");
    sub->add_option("--mode", mode, "likelihood (given the category) or joint (adds log p(c*|x))")
        ->check(CLI::IsMember({"likelihood", "joint"}))
        ->capture_default_str();
    sub->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  }

  int run(std::ostream& out) {
    const auto bundle = load_model<ModelBundle>(model_path);
    const auto& stage1 = bundle.require_stage1();
    const Dataset set = data.load(false);
    const bool joint = mode == "joint";

    std::vector<std::vector<std::string>> rows(set.size() + 1);
    rows[0] = {"id", "label", "category", "confidence"};
    for (const auto& m : bundle.models) rows[0].emplace_back(model_kind_token(m.kind()));
    parallel_for(set.size(), jobs, [&](std::size_t i) {
      const auto& s = set[i];
      const auto dist = predict_category_distribution(stage1, s.values);
      const std::size_t c = dist.argmax();
      const double confidence = dist.probs[c];
      auto& row = rows[i + 1];
      row = {s.id, set.category_names()[s.label], stage1.categories[c], csv::format_double(confidence)};
      for (const auto& m : bundle.models) {
        const auto mc = m.category_index(stage1.categories[c]);
        if (!mc) {
          row.emplace_back();
          continue;
        }
        double v = m.score(*mc, s.values).value;
        if (joint) v += std::log(confidence);
        row.push_back(csv::format_double(v));
      }
    });
    emit(out_path, csv_text(rows), out);
    return kExitOk;
  }
};

// ---------------------------------------------------------------- report

struct ReportArgs {
  DataArgs data;
  std::string model_path;
  std::string out_path;
  std::string method = "ic";

  void add_to(CLI::App* sub) {
    data.add_to(sub);
    sub->add_option("--models", model_path, "Model bundle from train (needs stage-1 and a manifold or nb model)")
        ->required();
    sub->add_option("--out", out_path, "Report CSV (default: standard output)");
    sub->add_option("--method", method, "ic, baseline2 or baseline4")
        ->check(CLI::IsMember({"ic", "baseline2", "baseline4"}))
        ->capture_default_str();
  }

  template <class Set>
  static const TypicalityModel* find(const ModelBundle& b) {
    for (const auto& m : b.models)
      if (std::holds_alternative<Set>(m.payload())) return &m;
    return nullptr;
  }

  int run(std::ostream& out) {
    const auto bundle = load_model<ModelBundle>(model_path);
    const auto& stage1 = bundle.require_stage1();
    const Dataset set = data.load(false);
    const auto& grouping = set.grouping();

    const TypicalityModel* model = method == "ic" ? find<ManifoldSet>(bundle) : find<NaiveBayesSet>(bundle);
    if (!model)
      throw ValidationError(method == "ic" ? "report --method ic needs a manifold model (mdist-global, mdist-local or mdensity)"
                                           : "interval baselines need a naive Bayes model (nb or nbw)");

    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> header{"id", "category"};
    header.insert(header.end(), grouping.group_names.begin(), grouping.group_names.end());
    for (std::size_t t = 1; t <= kTopAttributes; ++t) header.push_back("top_" + std::to_string(t));
    rows.push_back(header);

    for (const auto& s : set.samples()) {
      const std::size_t c = predict_category_distribution(stage1, s.values).argmax();
      const std::string& name = stage1.categories[c];
      const auto mc = model->category_index(name);
      if (!mc) throw ValidationError("no reporting model for category '" + name + "'");
      AbnormalityReport report;
      if (method == "ic") {
        const auto& set_m = std::get<ManifoldSet>(model->payload());
        report = information_content_report(set_m.models[*mc], set_m.relevance, s.values, CategoryLabel{*mc, name},
                                            grouping);
      } else {
        const auto& nb = std::get<NaiveBayesSet>(model->payload()).models[*mc];
        report = baseline_report(nb, s.values, method == "baseline2" ? 2.0 : 4.0, grouping);
      }
      std::vector<std::string> row{s.id, name};
      for (double p : report.group_distribution) row.push_back(csv::format_double(p));
      const auto top = report.top_attributes(kTopAttributes);
      for (std::size_t t = 0; t < kTopAttributes; ++t)
        row.push_back(t < top.size() ? set.attribute_names()[top[t]] : std::string());
      rows.push_back(std::move(row));
    }
    emit(out_path, csv_text(rows), out);
    return kExitOk;
  }
};

// ---------------------------------------------------------------- eval

struct EvalArgs {
  DataArgs data;
  std::string model_path;
  std::string ratings_path;
  std::string out_path;
  std::string text_path;
  std::string mode = "likelihood";
  double kl_epsilon = 1e-4;
  std::size_t jobs = 1;

  void add_to(CLI::App* sub) {
    data.add_to(sub);
    sub->add_option("--models", model_path, "Model bundle from train")->required();
    sub->add_option("--ratings", ratings_path, "Ground-truth group ratings CSV (id,<groups>) for reporting rows");
    sub->add_option("--out", out_path, "Result table CSV (default: standard output)");
    sub->add_option("--text", text_path, "Also write the aligned text table here");
    sub->add_option("--mode", mode, "likelihood (given the category) or joint (adds log p(c*|x))")
        ->check(CLI::IsMember({"likelihood", "joint"}))
        ->capture_default_str();
    sub->add_option("--kl-epsilon", kl_epsilon, "Smoothing added before KL divergence")->capture_default_str();
    sub->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  }

  int run(std::ostream& out) {
    const auto bundle = load_model<ModelBundle>(model_path);
    const Dataset set = data.load(false);
    std::optional<RatingTable> ratings;
    if (!ratings_path.empty()) ratings = load_ratings(ratings_path);
    EvalConfig cfg;
    cfg.mode = mode == "joint" ? ScoreMode::joint : ScoreMode::likelihood_given_class;
    cfg.kl_epsilon = kl_epsilon;
    cfg.jobs = jobs;
    cfg.ratings = ratings ? &*ratings : nullptr;
    const ResultTable table = run_pipeline(set, bundle.require_stage1(), bundle.models, cfg);
    emit(out_path, result_table_csv(table), out);
    if (!text_path.empty()) write_text(text_path, result_table_text(table));
    return kExitOk;
  }
};

/// Routes library warnings to the caller's error stream while a command runs.
class WarningScope {
 public:
  explicit WarningScope(std::ostream& err)
      : previous_(set_warning_handler([&err](std::string_view msg) { err << "warning: " << msg << '\n'; })) {}
  ~WarningScope() { set_warning_handler(previous_); }
  WarningScope(const WarningScope&) = delete;
  WarningScope& operator=(const WarningScope&) = delete;

 private:
  WarningHandler previous_;
};

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Abnormality detection and explanation in attribute space", "typicality"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every subcommand");

  SynthArgs synth;
  TrainArgs train;
  RelevanceArgs relevance;
  ScoreArgs score;
  ReportArgs report;
  EvalArgs eval;
  std::function<int()> action;

  auto* s = app.add_subcommand("synth", "Generate a seeded synthetic dataset with planted abnormalities");
  synth.add_to(s);
  s->callback([&] { action = [&] { return synth.run(out); }; });
  auto* t = app.add_subcommand("train", "Train stage-1 and typicality models on typical samples");
  train.add_to(t);
  t->callback([&] { action = [&] { return train.run(out); }; });
  auto* r = app.add_subcommand("relevance", "Per-category attribute relevance weights as CSV");
  relevance.add_to(r);
  r->callback([&] { action = [&] { return relevance.run(out); }; });
  auto* sc = app.add_subcommand("score", "Categorize samples and score their typicality");
  score.add_to(sc);
  sc->callback([&] { action = [&] { return score.run(out); }; });
  auto* rp = app.add_subcommand("report", "Explain abnormality as a distribution over attribute groups");
  report.add_to(rp);
  rp->callback([&] { action = [&] { return report.run(out); }; });
  auto* ev = app.add_subcommand("eval", "AUC, reporting KL and confusion on a labeled test set");
  eval.add_to(ev);
  ev->callback([&] { action = [&] { return eval.run(out); }; });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  WarningScope warnings(err);
  try {
    return action();
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
}

}  // namespace typicality::cli
