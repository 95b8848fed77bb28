#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "semprobe/align.hpp"
#include "semprobe/embedding.hpp"
#include "semprobe/errors.hpp"
#include "semprobe/norms.hpp"

using namespace semprobe;

namespace {

std::filesystem::path data_file(const char* name) {
  return std::filesystem::path(SEMPROBE_DATA_DIR) / name;
}

NormsDataset norms_from(const std::string& text) {
  std::istringstream in(text);
  return load_norms(in, "test");
}

const char* kTinyNorms =
    "word\tcategory\tColor\tMotion\tHuman\n"
    "dog\tanimal\t1.5\t4.0\t2.0\n"
    "car\tvehicle\t3.0\t5.0\t0.5\n"
    "girl\tperson\t2.0\t3.0\t6.0\n";

EmbeddingSpace tiny_space() {
  std::istringstream in("dog 1 0\ncar 0 1\ngirl 1 1\nthe 2 2\n");
  return load_embeddings(in, EmbeddingFormat::plain, "test");
}

}  // namespace

TEST_CASE("norms TSV parses header order and values") {
  const auto ds = norms_from(kTinyNorms);
  CHECK(ds.size() == 3);
  CHECK(ds.n_attributes() == 3);
  CHECK(ds.attributes() == std::vector<std::string>{"Color", "Motion", "Human"});
  CHECK(ds.categories()[1] == "vehicle");
  CHECK(ds.values()(0, 1) == 4.0);
  CHECK(ds.values()(2, 2) == 6.0);
  REQUIRE(ds.find("car"));
  CHECK(*ds.find("car") == 1);
}

TEST_CASE("norms rows with the wrong column count are rejected") {
  CHECK_THROWS_AS(norms_from("word\tcategory\tA\tB\nx\tcat\t1.0\n"), ParseError);
  CHECK_THROWS_AS(norms_from("word\tcategory\tA\tB\nx\tcat\t1.0\t2.0\t3.0\n"), ParseError);
}

TEST_CASE("norms header must lead with word and category") {
  CHECK_THROWS_AS(norms_from("term\tcategory\tA\nx\tc\t1\n"), ParseError);
  CHECK_THROWS_AS(norms_from("word\tpos\tA\nx\tc\t1\n"), ParseError);
}

TEST_CASE("empty norms dataset is a data error") {
  CHECK_THROWS_AS(norms_from("word\tcategory\tA\tB\n"), DataError);
}

TEST_CASE("duplicate norm words and attributes are rejected") {
  CHECK_THROWS_AS(norms_from("word\tcategory\tA\nx\tc\t1\nx\tc\t2\n"), ParseError);
  CHECK_THROWS_AS(norms_from("word\tcategory\tA\tA\nx\tc\t1\t2\n"), ParseError);
}

TEST_CASE("domain map attaches totally and rejects unknown attributes") {
  auto ds = norms_from(kTinyNorms);
  const auto dir = std::filesystem::temp_directory_path() / "semprobe_norms";
  std::filesystem::create_directories(dir);

  SUBCASE("total map attaches in attribute order") {
    const auto path = dir / "domains_ok.tsv";
    {
      std::ofstream out(path);
      out << "attribute\tdomain\nMotion\tVision\nColor\tVision\nHuman\tSocial\n";
    }
    attach_domain_map(ds, path);
    REQUIRE(ds.has_domains());
    CHECK(ds.attribute_domains() ==
          std::vector<std::string>{"Vision", "Vision", "Social"});
  }

  SUBCASE("missing attribute is an error") {
    const auto path = dir / "domains_missing.tsv";
    {
      std::ofstream out(path);
      out << "Color\tVision\nHuman\tSocial\n";
    }
    CHECK_THROWS_WITH_AS(attach_domain_map(ds, path), doctest::Contains("Motion"), ParseError);
  }

  SUBCASE("unknown attribute is an error") {
    const auto path = dir / "domains_unknown.tsv";
    {
      std::ofstream out(path);
      out << "Color\tVision\nMotion\tVision\nHuman\tSocial\nTaste\tGustation\n";
    }
    CHECK_THROWS_WITH_AS(attach_domain_map(ds, path), doctest::Contains("Taste"), ParseError);
  }
}

TEST_CASE("gold cluster map may be partial but must reference known words") {
  auto ds = norms_from(kTinyNorms);
  const auto dir = std::filesystem::temp_directory_path() / "semprobe_norms";
  std::filesystem::create_directories(dir);

  SUBCASE("partial map attaches") {
    const auto path = dir / "gold_ok.tsv";
    {
      std::ofstream out(path);
      out << "word\tcluster_id\ndog\t2\ngirl\t1\n";
    }
    attach_gold_clusters(ds, path);
    REQUIRE(ds.has_gold_clusters());
    CHECK(ds.gold_clusters()[0] == 2);
    CHECK(!ds.gold_clusters()[1].has_value());
    CHECK(ds.gold_clusters()[2] == 1);
  }

  SUBCASE("unknown word is an error") {
    const auto path = dir / "gold_unknown.tsv";
    {
      std::ofstream out(path);
      out << "cat\t1\n";
    }
    CHECK_THROWS_AS(attach_gold_clusters(ds, path), ParseError);
  }

  SUBCASE("non-positive ids are rejected") {
    const auto path = dir / "gold_bad_id.tsv";
    {
      std::ofstream out(path);
      out << "dog\t0\n";
    }
    CHECK_THROWS_AS(attach_gold_clusters(ds, path), ParseError);
  }
}

TEST_CASE("align joins on norms order and reports absentees") {
  const auto space = tiny_space();
  const auto ds = norms_from(kTinyNorms);
  const auto data = align(space, ds);
  CHECK(data.size() == 3);
  CHECK(data.words == std::vector<std::string>{"dog", "car", "girl"});
  CHECK(data.missing.empty());
  // Row i of W is the embedding of words[i]; row i of B its norm row.
  for (Index i = 0; i < data.size(); ++i) {
    const auto row = space.find(data.words[static_cast<std::size_t>(i)]);
    REQUIRE(row);
    CHECK(data.W.row(i) == space.vectors().row(*row));
    CHECK(data.B.row(i) == ds.values().row(*ds.find(data.words[static_cast<std::size_t>(i)])));
  }
}

TEST_CASE("align excludes missing words instead of zero-filling") {
  std::istringstream in("dog 1 0\ngirl 1 1\n");
  const auto space = load_embeddings(in, EmbeddingFormat::plain, "test");
  const auto data = align(space, norms_from(kTinyNorms));
  CHECK(data.size() == 2);
  CHECK(data.missing == std::vector<std::string>{"car"});
  CHECK(data.words == std::vector<std::string>{"dog", "girl"});
}

TEST_CASE("align with zero overlap is a data error") {
  std::istringstream in("xo 1 0\n");
  const auto space = load_embeddings(in, EmbeddingFormat::plain, "test");
  CHECK_THROWS_AS(align(space, norms_from(kTinyNorms)), DataError);
}

TEST_CASE("case folding rescues unmatched words and flags ambiguity") {
  const auto ds = norms_from(kTinyNorms);

  SUBCASE("exact match misses different case") {
    std::istringstream in("Dog 1 0\ncar 0 1\ngirl 1 1\n");
    const auto space = load_embeddings(in, EmbeddingFormat::plain, "test");
    CHECK(align(space, ds, CasePolicy::exact).size() == 2);
    CHECK(align(space, ds, CasePolicy::fold_lower).size() == 3);
  }

  SUBCASE("exact hits take precedence over folded ones") {
    std::istringstream in("dog 9 9\nDOG 1 0\ncar 0 1\ngirl 1 1\n");
    const auto space = load_embeddings(in, EmbeddingFormat::plain, "test");
    const auto data = align(space, ds, CasePolicy::fold_lower);
    CHECK(data.W(0, 0) == 9.0);
  }

  SUBCASE("two folded candidates and no exact hit is ambiguous") {
    std::istringstream in("DOG 1 0\nDog 2 0\ncar 0 1\ngirl 1 1\n");
    const auto space = load_embeddings(in, EmbeddingFormat::plain, "test");
    CHECK_THROWS_WITH_AS(align(space, ds, CasePolicy::fold_lower), doctest::Contains("dog"),
                         Error);
  }
}

TEST_CASE("align is idempotent on its own word set") {
  const auto space = tiny_space();
  const auto ds = norms_from(kTinyNorms);
  const auto once = align(space, ds);
  const auto twice = align(space, ds);
  CHECK(once.words == twice.words);
  CHECK(once.W == twice.W);
  CHECK(once.B == twice.B);
}

TEST_CASE("fixture norms, domains and gold clusters load together") {
  auto ds = load_norms(data_file("fixture_norms.tsv"));
  CHECK(ds.size() == 60);
  CHECK(ds.n_attributes() == 65);
  attach_domain_map(ds, data_file("attribute_domains.tsv"));
  REQUIRE(ds.has_domains());
  attach_gold_clusters(ds, data_file("fixture_gold_clusters.tsv"));
  REQUIRE(ds.has_gold_clusters());
  for (const auto& g : ds.gold_clusters()) REQUIRE(g.has_value());

  const auto space = load_embeddings(data_file("fixture_embeddings.txt"));
  const auto data = align(space, ds);
  CHECK(data.size() == 60);
  CHECK(data.missing.empty());
}
