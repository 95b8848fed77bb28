#include "semprobe/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "semprobe/align.hpp"
#include "semprobe/builder.hpp"
#include "semprobe/clustering.hpp"
#include "semprobe/embedding.hpp"
#include "semprobe/errors.hpp"
#include "semprobe/evaluation.hpp"
#include "semprobe/loocv.hpp"
#include "semprobe/model_io.hpp"
#include "semprobe/norms.hpp"
#include "semprobe/report.hpp"
#include "text_util.hpp"

namespace semprobe {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct CommonOptions {
  std::string embeddings;
  std::string norms;
  std::string format = "auto";
  bool fold_case = false;
};

struct ProbeOptions : CommonOptions {
  std::string domains;
  std::string method = "linear";
  std::string out_dir;
  std::string label = "probe";
  std::string save_model_path;
  bool normalize_norms = false;
  bool standardize = false;
  TrainConfig train;
  Index hidden = 150;
  int threads = 1;
};

struct ClusterOptions : CommonOptions {
  std::string gold;
  std::string out_dir;
  Index k = 28;
  int trials = 10;
  int max_iters = 300;
  std::uint64_t seed = 0;
  bool zscore = false;
};

struct BuildOptions {
  std::string corpus;
  std::string out_path;
  std::string include_words_path;
  int window = 10;
  std::int64_t min_count = 1;
  Index dim = 300;
  std::uint64_t seed = 0;
};

struct MergeOptions {
  std::vector<std::string> inputs;
  std::string out_path;
};

EmbeddingFormat parse_format(const std::string& name) {
  if (name == "auto") return EmbeddingFormat::autodetect;
  if (name == "headered") return EmbeddingFormat::headered;
  return EmbeddingFormat::plain;
}

/// Column z-score with the column's own mean/sd; constant columns are
/// centered but not scaled.
void zscore_columns(Mat<double>& m) {
  const Eigen::RowVectorXd mean = m.colwise().mean();
  Eigen::RowVectorXd sd =
      ((m.rowwise() - mean).array().square().colwise().sum() / double(m.rows())).sqrt();
  for (Index j = 0; j < sd.size(); ++j)
    if (sd(j) == 0.0) sd(j) = 1.0;
  m = (m.rowwise() - mean).array().rowwise() / sd.array();
}

json group_stats_json(const std::vector<std::pair<std::string, GroupStat>>& groups) {
  json rows = json::array();
  for (const auto& [name, stat] : groups) {
    rows.push_back({{"name", name},
                    {"mean_rho", stat.mean},
                    {"n_defined", stat.n_defined},
                    {"n_excluded", stat.n_excluded}});
  }
  return rows;
}

json optional_rho(const std::optional<double>& v) {
  if (!v) return nullptr;
  return *v;
}

void write_json_atomic(const fs::path& path, const json& j) {
  detail::write_file_atomic(path, j.dump(2) + "\n");
}

void write_echo(const fs::path& dir, const std::string& echo) {
  detail::write_file_atomic(dir / "config_echo.cfg", echo);
}

std::vector<std::string> load_word_list(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open word list: " + path.string());
  std::vector<std::string> words;
  std::string line;
  while (std::getline(in, line))
    for (auto& tok : detail::split_ws(line)) words.push_back(std::move(tok));
  return words;
}

int cmd_probe(const ProbeOptions& opt, const std::string& echo, std::ostream& out) {
  const fs::path dir(opt.out_dir);
  fs::create_directories(dir);

  const EmbeddingSpace space = load_embeddings(fs::path(opt.embeddings), parse_format(opt.format));
  NormsDataset norms = load_norms(fs::path(opt.norms));
  if (!opt.domains.empty()) attach_domain_map(norms, fs::path(opt.domains));

  AlignedData data =
      align(space, norms, opt.fold_case ? CasePolicy::fold_lower : CasePolicy::exact);
  if (data.size() < 2) throw DataError("probe: need at least two aligned words for LOOCV");
  if (opt.normalize_norms) zscore_columns(data.B);

  LoocvConfig lc;
  lc.method = opt.method == "mlp" ? MappingMethod::mlp : MappingMethod::linear;
  lc.train = opt.train;
  lc.hidden = opt.hidden;
  lc.standardize_inputs = opt.standardize;
  lc.threads = opt.threads;
  const LoocvResult res = loocv(data, lc);

  std::vector<std::string> categories(static_cast<std::size_t>(data.size()));
  for (std::size_t i = 0; i < categories.size(); ++i)
    categories[i] = norms.categories()[static_cast<std::size_t>(data.norm_rows[i])];
  const std::vector<std::string> domains =
      norms.has_domains() ? norms.attribute_domains() : std::vector<std::string>{};

  const CorrelationReport report =
      score_estimates(res.estimates, data.B, domains, categories, &res.fold_ok);

  write_attribute_csv(dir / "attribute.csv", norms.attributes(), domains, report.per_attribute);
  write_word_csv(dir / "word.csv", data.words, categories, report.per_word);
  write_group_csv(dir / "domain.csv", "domain", report.domain_means);
  write_group_csv(dir / "category.csv", "category", report.category_means);

  SummaryRow summary;
  summary.label = opt.label;
  summary.method = opt.method;
  summary.n_words = data.size();
  summary.n_missing = static_cast<Index>(data.missing.size());
  summary.n_failed_folds = res.failed_count();
  summary.attribute = report.attribute_overall;
  summary.word = report.word_overall;
  double loss_sum = 0.0;
  Index loss_n = 0;
  for (std::size_t i = 0; i < res.fold_ok.size(); ++i) {
    if (res.fold_ok[i]) {
      loss_sum += res.fold_loss[i];
      ++loss_n;
    }
  }
  summary.mean_fold_loss =
      loss_n > 0 ? loss_sum / double(loss_n) : std::numeric_limits<double>::quiet_NaN();
  write_summary_csv(dir / "summary.csv", summary);

  // Estimated vectors of the successfully predicted words, reusable as an
  // embedding space (e.g. for the cluster subcommand).
  std::vector<std::string> ok_words;
  std::vector<Index> ok_rows;
  for (Index i = 0; i < data.size(); ++i) {
    if (res.fold_ok[static_cast<std::size_t>(i)]) {
      ok_words.push_back(data.words[static_cast<std::size_t>(i)]);
      ok_rows.push_back(i);
    }
  }
  if (!ok_words.empty()) {
    Mat<double> ok_estimates(static_cast<Index>(ok_rows.size()), res.estimates.cols());
    for (std::size_t r = 0; r < ok_rows.size(); ++r)
      ok_estimates.row(static_cast<Index>(r)) = res.estimates.row(ok_rows[r]);
    save_embeddings(EmbeddingSpace(ok_words, std::move(ok_estimates)), dir / "estimates.txt",
                    /*with_header=*/true, /*precision=*/17);
  }

  if (!opt.save_model_path.empty()) {
    TrainDiagnostics diag;
    if (lc.method == MappingMethod::linear)
      save_model(train_linear(data, opt.train, &diag), fs::path(opt.save_model_path));
    else
      save_model(train_mlp(data, opt.train, opt.hidden, &diag), fs::path(opt.save_model_path));
  }

  json bundle;
  bundle["command"] = "probe";
  bundle["config_echo"] = echo;
  bundle["config"] = {{"embeddings", opt.embeddings},
                      {"norms", opt.norms},
                      {"domains", opt.domains},
                      {"format", opt.format},
                      {"fold_case", opt.fold_case},
                      {"method", opt.method},
                      {"label", opt.label},
                      {"normalize_norms", opt.normalize_norms},
                      {"standardize", opt.standardize},
                      {"learning_rate", opt.train.learning_rate},
                      {"epochs", opt.train.epochs},
                      {"adagrad_epsilon", opt.train.adagrad_epsilon},
                      {"batch_size", opt.train.batch_size},
                      {"seed", opt.train.seed},
                      {"init_scale", opt.train.init_scale},
                      {"stop_rel_tol", opt.train.stop_rel_tol},
                      {"stop_window", opt.train.stop_window},
                      {"hidden", opt.hidden},
                      {"threads", opt.threads}};
  bundle["summary"] = {{"n_words", summary.n_words},
                       {"n_missing", summary.n_missing},
                       {"n_failed_folds", summary.n_failed_folds},
                       {"mean_attribute_rho", summary.attribute.mean},
                       {"attributes_defined", summary.attribute.n_defined},
                       {"attributes_excluded", summary.attribute.n_excluded},
                       {"mean_word_rho", summary.word.mean},
                       {"words_defined", summary.word.n_defined},
                       {"words_excluded", summary.word.n_excluded},
                       {"mean_fold_loss", summary.mean_fold_loss}};
  json attrs = json::array();
  for (std::size_t j = 0; j < norms.attributes().size(); ++j) {
    attrs.push_back({{"attribute", norms.attributes()[j]},
                     {"domain", domains.empty() ? json(nullptr) : json(domains[j])},
                     {"rho", optional_rho(report.per_attribute[j])}});
  }
  bundle["attributes"] = std::move(attrs);
  json words = json::array();
  for (std::size_t i = 0; i < data.words.size(); ++i) {
    words.push_back({{"word", data.words[i]},
                     {"category", categories[i]},
                     {"rho", optional_rho(report.per_word[i])},
                     {"fold_ok", static_cast<bool>(res.fold_ok[i])}});
  }
  bundle["words"] = std::move(words);
  bundle["domains"] = group_stats_json(report.domain_means);
  bundle["categories"] = group_stats_json(report.category_means);
  bundle["missing_words"] = data.missing;
  json failed = json::array();
  for (std::size_t i = 0; i < res.fold_ok.size(); ++i)
    if (!res.fold_ok[i])
      failed.push_back({{"word", data.words[i]}, {"error", res.fold_error[i]}});
  bundle["failed_folds"] = std::move(failed);
  write_json_atomic(dir / "report.json", bundle);
  write_echo(dir, echo);

  out << "aligned " << summary.n_words << " words, " << summary.n_missing << " missing, "
      << summary.n_failed_folds << " failed folds\n";
  out << "mean attribute rho " << csv_number(summary.attribute.mean) << " over "
      << summary.attribute.n_defined << " attributes\n";
  out << "mean word rho " << csv_number(summary.word.mean) << " over "
      << summary.word.n_defined << " words\n";
  return 0;
}

int cmd_cluster(const ClusterOptions& opt, const std::string& echo, std::ostream& out) {
  const fs::path dir(opt.out_dir);
  fs::create_directories(dir);

  const EmbeddingSpace space = load_embeddings(fs::path(opt.embeddings), parse_format(opt.format));
  NormsDataset norms = load_norms(fs::path(opt.norms));
  attach_gold_clusters(norms, fs::path(opt.gold));

  const AlignedData data =
      align(space, norms, opt.fold_case ? CasePolicy::fold_lower : CasePolicy::exact);

  std::vector<Index> rows;
  std::vector<int> gold;
  for (Index i = 0; i < data.size(); ++i) {
    const auto& label = norms.gold_clusters()[static_cast<std::size_t>(data.norm_rows[i])];
    if (label) {
      rows.push_back(i);
      gold.push_back(*label);
    }
  }
  if (rows.empty()) throw DataError("cluster: no aligned words carry gold cluster labels");

  Mat<double> points(static_cast<Index>(rows.size()), data.W.cols());
  for (std::size_t r = 0; r < rows.size(); ++r)
    points.row(static_cast<Index>(r)) = data.W.row(rows[r]);
  if (opt.zscore) zscore_columns(points);

  const EntropyReport report =
      entropy_trials(points, gold, opt.k, opt.trials, opt.seed, opt.max_iters);

  write_entropy_csv(dir / "entropy.csv", report);

  json bundle;
  bundle["command"] = "cluster";
  bundle["config_echo"] = echo;
  bundle["config"] = {{"embeddings", opt.embeddings}, {"norms", opt.norms},
                      {"gold_clusters", opt.gold},   {"format", opt.format},
                      {"fold_case", opt.fold_case},  {"k", opt.k},
                      {"trials", opt.trials},        {"max_iters", opt.max_iters},
                      {"seed", opt.seed},            {"zscore", opt.zscore}};
  json groups = json::array();
  for (const auto& row : report.per_group)
    groups.push_back(
        {{"gold_id", row.gold_id}, {"size", row.size}, {"mean_entropy", row.mean_entropy}});
  bundle["groups"] = std::move(groups);
  bundle["overall_mean_entropy"] = report.overall_mean;
  bundle["clustered_words"] = static_cast<Index>(rows.size());
  bundle["missing_words"] = data.missing;
  write_json_atomic(dir / "cluster.json", bundle);
  write_echo(dir, echo);

  out << "clustered " << rows.size() << " words into " << opt.k << " clusters, "
      << opt.trials << " trials\n";
  out << "overall mean normalized entropy " << csv_number(report.overall_mean) << "\n";
  return 0;
}

int cmd_build(const BuildOptions& opt, const std::string& echo, std::ostream& out) {
  std::ifstream corpus(opt.corpus);
  if (!corpus) throw ParseError("cannot open corpus: " + opt.corpus);

  BuilderConfig bc;
  bc.window = opt.window;
  bc.min_count = opt.min_count;
  bc.dim = opt.dim;
  bc.svd_seed = opt.seed;
  if (!opt.include_words_path.empty())
    bc.include_words = load_word_list(fs::path(opt.include_words_path));

  const fs::path out_path(opt.out_path);
  if (out_path.has_parent_path()) fs::create_directories(out_path.parent_path());

  BuildInfo info;
  const EmbeddingSpace space = build_ppmi_space(corpus, bc, &info);
  save_embeddings(space, out_path, /*with_header=*/true, /*precision=*/9);

  json meta;
  meta["command"] = "build";
  meta["config_echo"] = echo;
  meta["config"] = {{"corpus", opt.corpus},
                    {"out", opt.out_path},
                    {"window", info.window},
                    {"min_count", info.min_count},
                    {"dim", info.dim},
                    {"seed", opt.seed},
                    {"include_words", bc.include_words}};
  meta["vocab_size"] = info.vocab_size;
  meta["total_tokens"] = info.total_tokens;
  meta["cooccurrence_total"] = info.cooccurrence_total;
  write_json_atomic(fs::path(opt.out_path + ".meta.json"), meta);

  out << "built " << info.vocab_size << " x " << info.dim << " space from "
      << info.total_tokens << " tokens\n";
  return 0;
}

int cmd_merge(const MergeOptions& opt, std::ostream& out) {
  std::vector<fs::path> inputs(opt.inputs.begin(), opt.inputs.end());
  const fs::path out_path(opt.out_path);
  if (out_path.has_parent_path()) fs::create_directories(out_path.parent_path());
  merge_summaries(inputs, out_path);
  out << "merged " << inputs.size() << " summaries\n";
  return 0;
}

void add_train_options(CLI::App* cmd, ProbeOptions& opt) {
  cmd->add_option("--learning-rate", opt.train.learning_rate, "AdaGrad learning rate")
      ->capture_default_str();
  cmd->add_option("--epochs", opt.train.epochs, "Maximum training epochs")
      ->capture_default_str();
  cmd->add_option("--adagrad-epsilon", opt.train.adagrad_epsilon,
                  "Denominator offset added after the square root")
      ->capture_default_str();
  cmd->add_option("--batch-size", opt.train.batch_size, "Mini-batch rows; 0 = full batch")
      ->capture_default_str();
  cmd->add_option("--seed", opt.train.seed, "Global seed; fold seeds derive from it")
      ->capture_default_str();
  cmd->add_option("--init-scale", opt.train.init_scale,
                  "Weight init range scale, init_scale/sqrt(fan-in)")
      ->capture_default_str();
  cmd->add_option("--stop-rel-tol", opt.train.stop_rel_tol,
                  "Early stop when relative loss change stays below this")
      ->capture_default_str();
  cmd->add_option("--stop-window", opt.train.stop_window,
                  "Consecutive small-change epochs required to stop")
      ->capture_default_str();
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Attribute-norm prediction toolkit for word embedding spaces"};
  app.set_config("--config", "", "Read options from a key=value config file");

  ProbeOptions probe_opt;
  ClusterOptions cluster_opt;
  BuildOptions build_opt;
  MergeOptions merge_opt;

  CLI::App* probe = app.add_subcommand(
      "probe", "Evaluate an embedding space against attribute norms with LOOCV");
  probe->configurable();
  probe->add_option("--embeddings", probe_opt.embeddings, "Embedding text file")
      ->required()
      ->check(CLI::ExistingFile);
  probe->add_option("--norms", probe_opt.norms, "Attribute norms TSV")
      ->required()
      ->check(CLI::ExistingFile);
  probe->add_option("--domains", probe_opt.domains, "attribute<TAB>domain map")
      ->check(CLI::ExistingFile);
  probe->add_option("--method", probe_opt.method, "Mapping model")
      ->check(CLI::IsMember({"linear", "mlp"}))
      ->capture_default_str();
  probe->add_option("--out", probe_opt.out_dir, "Report output directory")->required();
  probe->add_option("--format", probe_opt.format, "Embedding file format")
      ->check(CLI::IsMember({"auto", "headered", "plain"}))
      ->capture_default_str();
  probe->add_flag("--fold-case", probe_opt.fold_case,
                  "Lowercase-fold word matching during alignment");
  probe->add_flag("--normalize-norms", probe_opt.normalize_norms,
                  "Column z-score the norm matrix before training");
  probe->add_flag("--standardize", probe_opt.standardize,
                  "Z-score inputs per fold with training-rows statistics");
  probe->add_option("--hidden", probe_opt.hidden, "Hidden units (mlp)")->capture_default_str();
  probe->add_option("--threads", probe_opt.threads, "Concurrent folds")->capture_default_str();
  probe->add_option("--label", probe_opt.label, "Row label in summary.csv")
      ->capture_default_str();
  probe->add_option("--save-model", probe_opt.save_model_path,
                    "Also train on all rows and save the model here");
  add_train_options(probe, probe_opt);

  CLI::App* cluster = app.add_subcommand(
      "cluster", "Cluster word vectors and score them against gold groups");
  cluster->configurable();
  cluster->add_option("--embeddings", cluster_opt.embeddings,
                      "Vector file (e.g. estimates.txt from probe)")
      ->required()
      ->check(CLI::ExistingFile);
  cluster->add_option("--norms", cluster_opt.norms, "Attribute norms TSV")
      ->required()
      ->check(CLI::ExistingFile);
  cluster->add_option("--gold-clusters", cluster_opt.gold, "word<TAB>cluster_id map")
      ->required()
      ->check(CLI::ExistingFile);
  cluster->add_option("--out", cluster_opt.out_dir, "Report output directory")->required();
  cluster->add_option("--format", cluster_opt.format, "Embedding file format")
      ->check(CLI::IsMember({"auto", "headered", "plain"}))
      ->capture_default_str();
  cluster->add_flag("--fold-case", cluster_opt.fold_case,
                    "Lowercase-fold word matching during alignment");
  cluster->add_option("--k", cluster_opt.k, "Cluster count")->capture_default_str();
  cluster->add_option("--trials", cluster_opt.trials, "Clustering repetitions")
      ->capture_default_str();
  cluster->add_option("--max-iters", cluster_opt.max_iters, "Lloyd iteration cap")
      ->capture_default_str();
  cluster->add_option("--seed", cluster_opt.seed, "Global seed; trial seeds derive from it")
      ->capture_default_str();
  cluster->add_flag("--zscore", cluster_opt.zscore, "Column z-score vectors before clustering");

  CLI::App* build = app.add_subcommand(
      "build", "Build a PPMI-SVD embedding space from a plain-text corpus");
  build->configurable();
  build->add_option("--corpus", build_opt.corpus, "Corpus file, blank line = document break")
      ->required()
      ->check(CLI::ExistingFile);
  build->add_option("--out", build_opt.out_path, "Output embedding file")->required();
  build->add_option("--window", build_opt.window, "Context window size")->capture_default_str();
  build->add_option("--min-count", build_opt.min_count, "Vocabulary frequency threshold")
      ->capture_default_str();
  build->add_option("--dim", build_opt.dim, "Embedding dimension")->capture_default_str();
  build->add_option("--seed", build_opt.seed, "SVD seed")->capture_default_str();
  build->add_option("--include-words", build_opt.include_words_path,
                    "Words kept regardless of frequency, one per line")
      ->check(CLI::ExistingFile);

  CLI::App* merge = app.add_subcommand(
      "report-merge", "Concatenate summary.csv files into one table");
  merge->configurable();
  merge->add_option("inputs", merge_opt.inputs, "summary.csv files")
      ->required()
      ->check(CLI::ExistingFile);
  merge->add_option("--out", merge_opt.out_path, "Merged output file")->required();

  app.require_subcommand(0, 1);

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("semprobe");
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    const std::string echo = app.config_to_str(/*default_also=*/true, /*write_description=*/false);
    if (probe->parsed()) return cmd_probe(probe_opt, echo, out);
    if (cluster->parsed()) return cmd_cluster(cluster_opt, echo, out);
    if (build->parsed()) return cmd_build(build_opt, echo, out);
    if (merge->parsed()) return cmd_merge(merge_opt, out);
    err << app.help();
    return 1;
  } catch (const DataError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace semprobe
