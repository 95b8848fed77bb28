#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "semprobe/embedding.hpp"
#include "semprobe/errors.hpp"

using namespace semprobe;

namespace {

EmbeddingSpace from_string(const std::string& text,
                           EmbeddingFormat format = EmbeddingFormat::autodetect) {
  std::istringstream in(text);
  return load_embeddings(in, format, "test");
}

std::filesystem::path data_file(const char* name) {
  return std::filesystem::path(SEMPROBE_DATA_DIR) / name;
}

}  // namespace

TEST_CASE("headered embedding file parses with declared shape") {
  const auto space = from_string("2 3\na 1 0 0\nb 0 1 0\n");
  CHECK(space.size() == 2);
  CHECK(space.dim() == 3);
  CHECK(space.vocab()[0] == "a");
  CHECK(space.vocab()[1] == "b");
  CHECK(space.vectors()(0, 0) == 1.0);
  CHECK(space.vectors()(1, 1) == 1.0);
}

TEST_CASE("plain file and autodetect agree") {
  const auto space = from_string("a 1 2\nb 3 4\n", EmbeddingFormat::plain);
  CHECK(space.dim() == 2);
  const auto detected = from_string("a 1 2\nb 3 4\n");
  CHECK(detected.size() == space.size());
  CHECK(detected.vectors() == space.vectors());
}

TEST_CASE("autodetect does not mistake a two-token data line for a header") {
  // "x 5" is a word with one component, not a count/dim pair.
  const auto space = from_string("x 5\ny 7\n");
  CHECK(space.size() == 2);
  CHECK(space.dim() == 1);
}

TEST_CASE("dimension mismatch between lines is rejected") {
  CHECK_THROWS_AS(from_string("a 1 0\nb 0 1 0\n"), ParseError);
}

TEST_CASE("non-numeric and non-finite components are rejected") {
  CHECK_THROWS_AS(from_string("a 1 zzz\n"), ParseError);
  CHECK_THROWS_AS(from_string("a 1 nan\n"), ParseError);
  CHECK_THROWS_AS(from_string("a 1 inf\n"), ParseError);
}

TEST_CASE("duplicate word is rejected, not silently resolved") {
  CHECK_THROWS_WITH_AS(from_string("a 1 2\na 3 4\n"), doctest::Contains("duplicate"),
                       ParseError);
}

TEST_CASE("header row/dim mismatches are rejected") {
  CHECK_THROWS_AS(from_string("3 2\na 1 2\nb 3 4\n", EmbeddingFormat::headered), ParseError);
  CHECK_THROWS_AS(from_string("2 3\na 1 2\nb 3 4\n", EmbeddingFormat::headered), ParseError);
}

TEST_CASE("empty input is an error") {
  CHECK_THROWS_AS(from_string(""), ParseError);
  CHECK_THROWS_AS(from_string("\n\n"), ParseError);
}

TEST_CASE("find is exact and total over the vocabulary") {
  const auto space = from_string("Alpha 1 2\nalpha 3 4\n");
  REQUIRE(space.find("Alpha"));
  REQUIRE(space.find("alpha"));
  CHECK(*space.find("Alpha") == 0);
  CHECK(*space.find("alpha") == 1);
  CHECK(!space.find("ALPHA"));
}

TEST_CASE("save/load round-trips vocab and vectors") {
  const auto dir = std::filesystem::temp_directory_path() / "semprobe_embed_rt";
  std::filesystem::create_directories(dir);
  const auto path = dir / "space.txt";

  const auto space = from_string("a -1.25 3.5e-3 7\nb 0.125 -42 9.75\n");
  save_embeddings(space, path);
  const auto back = load_embeddings(path);
  CHECK(back.vocab() == space.vocab());
  // These values are exact in 9 significant digits, so the round trip is bit-true.
  CHECK(back.vectors() == space.vectors());

  SUBCASE("17-digit precision round-trips arbitrary doubles bit-exactly") {
    Mat<double> m(1, 3);
    m << 1.0 / 3.0, -2.0 / 7.0, 1e-300;
    const EmbeddingSpace awkward({"w"}, m);
    save_embeddings(awkward, path, true, 17);
    const auto again = load_embeddings(path);
    CHECK(again.vectors() == awkward.vectors());
  }
}

TEST_CASE("fixture embedding file loads") {
  const auto space = load_embeddings(data_file("fixture_embeddings.txt"));
  CHECK(space.size() == 66);
  CHECK(space.dim() == 12);
  CHECK(space.find("apricot"));
  CHECK(space.find("the"));
}
