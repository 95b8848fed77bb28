#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "semprobe/cli.hpp"
#include "semprobe/embedding.hpp"
#include "semprobe/model_io.hpp"

using namespace semprobe;
namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code = -1;
  std::string out;
  std::string err;
};

CliRun run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  CliRun r;
  r.code = run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string data_path(const std::string& name) {
  return std::string(SEMPROBE_DATA_DIR) + "/" + name;
}

// Unique scratch directory, removed on destruction.
struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("semprobe_cli_" + tag + "_" + std::to_string(counter++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t line_count(const std::string& text) {
  std::size_t lines = 0;
  for (const char c : text) lines += c == '\n';
  return lines;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

std::vector<std::string> probe_args(const std::string& out_dir,
                                    const std::string& epochs = "40") {
  return {"probe",    "--embeddings", data_path("fixture_embeddings.txt"),
          "--norms",  data_path("fixture_norms.tsv"),
          "--domains", data_path("attribute_domains.tsv"),
          "--out",    out_dir,
          "--epochs", epochs};
}

}  // namespace

TEST_CASE("probe writes the full report set") {
  TempDir dir("probe");
  const CliRun r = run(probe_args(dir / ""));
  CHECK(r.code == 0);
  CHECK(r.out.find("aligned 60 words, 0 missing, 0 failed folds") != std::string::npos);

  const std::string attribute = slurp(dir / "attribute.csv");
  CHECK(line_count(attribute) == 66);  // header + 65 attributes
  CHECK(attribute.rfind("attribute,domain,rho\n", 0) == 0);

  CHECK(line_count(slurp(dir / "word.csv")) == 61);
  CHECK(line_count(slurp(dir / "domain.csv")) == 15);    // 14 domains
  CHECK(line_count(slurp(dir / "category.csv")) == 7);   // 6 categories
  CHECK(line_count(slurp(dir / "summary.csv")) == 2);

  // Estimates are themselves a loadable embedding space.
  const EmbeddingSpace estimates = load_embeddings(fs::path(dir / "estimates.txt"));
  CHECK(estimates.size() == 60);
  CHECK(estimates.dim() == 65);

  const auto report = nlohmann::json::parse(slurp(dir / "report.json"));
  CHECK(report.at("command") == "probe");
  CHECK(report.at("summary").at("n_words") == 60);
  CHECK(report.at("attributes").size() == 65);
  CHECK(report.at("words").size() == 60);
  CHECK(report.at("domains").size() == 14);
  CHECK(report.at("summary").at("mean_attribute_rho").get<double>() > 0.9);
  CHECK(report.at("failed_folds").empty());
}

TEST_CASE("probe rejects missing inputs by name") {
  TempDir dir("missing");
  const CliRun r = run({"probe", "--embeddings", dir / "no_such_file.txt", "--norms",
                        data_path("fixture_norms.tsv"), "--out", dir / "out"});
  CHECK(r.code == 1);
  CHECK(r.err.find("no_such_file.txt") != std::string::npos);
}

TEST_CASE("usage errors exit 1, help exits 0") {
  CHECK(run({"probe", "--bogus-flag"}).code == 1);
  CHECK(run({"no-such-command"}).code == 1);

  const CliRun bare = run({});
  CHECK(bare.code == 1);
  CHECK(bare.err.find("probe") != std::string::npos);

  const CliRun help = run({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("probe") != std::string::npos);
  CHECK(help.out.find("cluster") != std::string::npos);
}

TEST_CASE("an embedding space sharing no words with the norms exits 2") {
  TempDir dir("overlap");
  write_file(dir / "space.txt", "2 3\nfoo 1 0 0\nbar 0 1 0\n");
  const CliRun r = run({"probe", "--embeddings", dir / "space.txt", "--norms",
                        data_path("fixture_norms.tsv"), "--out", dir / "out"});
  CHECK(r.code == 2);
  CHECK(r.err.find("error:") != std::string::npos);
}

TEST_CASE("cluster runs deterministically on the fixture space") {
  TempDir a("cluster_a");
  TempDir b("cluster_b");
  const std::vector<std::string> common = {
      "cluster",         "--embeddings", data_path("fixture_embeddings.txt"),
      "--norms",         data_path("fixture_norms.tsv"),
      "--gold-clusters", data_path("fixture_gold_clusters.tsv"),
      "--k",             "6",
      "--trials",        "3",
      "--seed",          "11"};

  auto with_out = [&](const TempDir& d) {
    auto args = common;
    args.push_back("--out");
    args.push_back(d / "");
    return args;
  };

  const CliRun first = run(with_out(a));
  CHECK(first.code == 0);
  CHECK(first.out.find("clustered 60 words into 6 clusters") != std::string::npos);

  const std::string entropy = slurp(a / "entropy.csv");
  CHECK(line_count(entropy) == 8);  // header + 6 gold groups + OVERALL
  CHECK(entropy.rfind("category,size,mean_entropy,trials\n", 0) == 0);
  CHECK(entropy.find("OVERALL") != std::string::npos);

  const auto c = nlohmann::json::parse(slurp(a / "cluster.json"));
  CHECK(c.at("clustered_words") == 60);
  CHECK(c.at("groups").size() == 6);
  // The fixture categories are linearly separable blobs, so repeated
  // k-means should rarely split one; allow some slack but expect order.
  CHECK(c.at("overall_mean_entropy").get<double>() < 0.5);

  const CliRun second = run(with_out(b));
  CHECK(second.code == 0);
  CHECK(slurp(b / "entropy.csv") == entropy);
  CHECK(second.out == first.out);
}

TEST_CASE("cluster argument errors") {
  TempDir dir("cluster_err");
  const CliRun r = run({"cluster", "--embeddings", data_path("fixture_embeddings.txt"),
                        "--norms", data_path("fixture_norms.tsv"), "--gold-clusters",
                        data_path("fixture_gold_clusters.tsv"), "--out", dir / "", "--k", "100"});
  CHECK(r.code == 1);
  CHECK(r.err.find("error:") != std::string::npos);

  write_file(dir / "bad_gold.tsv", "not_a_fixture_word\t1\n");
  const CliRun g = run({"cluster", "--embeddings", data_path("fixture_embeddings.txt"),
                        "--norms", data_path("fixture_norms.tsv"), "--gold-clusters",
                        dir / "bad_gold.tsv", "--out", dir / "", "--k", "2"});
  CHECK(g.code == 1);
}

TEST_CASE("build emits a loadable space that probes cleanly") {
  TempDir dir("build");
  const CliRun r = run({"build", "--corpus", data_path("fixture_corpus.txt"), "--out",
                        dir / "space.txt", "--dim", "8", "--seed", "3"});
  CHECK(r.code == 0);
  CHECK(r.out.find("built 66 x 8 space") != std::string::npos);

  const EmbeddingSpace space = load_embeddings(fs::path(dir / "space.txt"));
  CHECK(space.size() == 66);
  CHECK(space.dim() == 8);

  const auto meta = nlohmann::json::parse(slurp(dir / "space.txt.meta.json"));
  CHECK(meta.at("vocab_size") == 66);
  CHECK(meta.at("config").at("dim") == 8);
  CHECK(meta.at("cooccurrence_total").get<long long>() > 0);

  const CliRun probe =
      run({"probe", "--embeddings", dir / "space.txt", "--norms", data_path("fixture_norms.tsv"),
           "--out", dir / "probe", "--epochs", "20"});
  CHECK(probe.code == 0);
  CHECK(probe.out.find("aligned 60 words") != std::string::npos);
}

TEST_CASE("build on an empty corpus exits 2") {
  TempDir dir("build_empty");
  write_file(dir / "empty.txt", "");
  const CliRun r = run({"build", "--corpus", dir / "empty.txt", "--out", dir / "space.txt"});
  CHECK(r.code == 2);
}

TEST_CASE("report-merge concatenates matching summaries") {
  TempDir a("merge_a");
  TempDir b("merge_b");
  auto args_a = probe_args(a / "");
  args_a.insert(args_a.end(), {"--label", "first"});
  auto args_b = probe_args(b / "", "10");
  args_b.insert(args_b.end(), {"--label", "second"});
  REQUIRE(run(args_a).code == 0);
  REQUIRE(run(args_b).code == 0);

  TempDir m("merge_out");
  const CliRun r = run({"report-merge", a / "summary.csv", b / "summary.csv", "--out",
                        m / "all.csv"});
  CHECK(r.code == 0);
  const std::string merged = slurp(m / "all.csv");
  CHECK(line_count(merged) == 3);
  CHECK(merged.find("first,linear") != std::string::npos);
  CHECK(merged.find("second,linear") != std::string::npos);

  SUBCASE("merge rejects a mismatched header") {
    write_file(m / "odd.csv", "label,other\nx,1\n");
    const CliRun bad =
        run({"report-merge", a / "summary.csv", m / "odd.csv", "--out", m / "all2.csv"});
    CHECK(bad.code == 1);
    CHECK(bad.err.find("header") != std::string::npos);
  }
}

TEST_CASE("the echoed config reproduces the run byte for byte") {
  TempDir dir("echo");
  REQUIRE(run(probe_args(dir / "")).code == 0);
  const std::string attribute = slurp(dir / "attribute.csv");
  const std::string summary = slurp(dir / "summary.csv");
  const std::string estimates = slurp(dir / "estimates.txt");

  fs::remove(dir / "attribute.csv");
  fs::remove(dir / "summary.csv");
  fs::remove(dir / "estimates.txt");

  const CliRun replay = run({"--config", dir / "config_echo.cfg"});
  CHECK(replay.code == 0);
  CHECK(slurp(dir / "attribute.csv") == attribute);
  CHECK(slurp(dir / "summary.csv") == summary);
  CHECK(slurp(dir / "estimates.txt") == estimates);
}

TEST_CASE("probe can persist the full-data model") {
  TempDir dir("model");
  auto linear = probe_args(dir / "out");
  linear.insert(linear.end(), {"--save-model", dir / "map.txt"});
  REQUIRE(run(linear).code == 0);
  const AnyModel lm = load_model(fs::path(dir / "map.txt"));
  REQUIRE(std::holds_alternative<LinearMap>(lm));
  CHECK(std::get<LinearMap>(lm).M.rows() == 12);
  CHECK(std::get<LinearMap>(lm).M.cols() == 65);

  auto mlp = probe_args(dir / "out_mlp", "5");
  mlp.insert(mlp.end(), {"--save-model", dir / "mlp.txt", "--method", "mlp", "--hidden", "6"});
  REQUIRE(run(mlp).code == 0);
  const AnyModel mm = load_model(fs::path(dir / "mlp.txt"));
  REQUIRE(std::holds_alternative<MlpMap>(mm));
  CHECK(std::get<MlpMap>(mm).W1.rows() == 12);
  CHECK(std::get<MlpMap>(mm).W1.cols() == 6);
  CHECK(std::get<MlpMap>(mm).W2.cols() == 65);
}
