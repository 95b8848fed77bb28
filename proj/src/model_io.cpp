#include "semprobe/model_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "text_util.hpp"

namespace semprobe {

namespace {

constexpr int kDigits = 17;  // shortest precision that round-trips a double
constexpr const char* kMagic = "semprobe-model";

void append_matrix(std::string& out, const char* label, const Mat<double>& m) {
  out += label;
  out += '\n';
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) out += ' ';
      out += detail::format_double(m(i, j), kDigits);
    }
    out += '\n';
  }
}

void append_vector(std::string& out, const char* label, const Vec<double>& v) {
  out += label;
  out += '\n';
  for (Index i = 0; i < v.size(); ++i) {
    if (i) out += ' ';
    out += detail::format_double(v(i), kDigits);
  }
  out += '\n';
}

class ModelReader {
 public:
  ModelReader(std::istream& in, std::string name) : in_(in), name_(std::move(name)) {}

  std::vector<std::string> line_tokens() {
    std::string line;
    while (std::getline(in_, line)) {
      ++lineno_;
      auto tokens = detail::split_ws(line);
      if (!tokens.empty()) return tokens;
    }
    fail("unexpected end of file");
  }

  void expect_label(const std::string& label) {
    const auto tokens = line_tokens();
    if (tokens.size() != 1 || tokens[0] != label) fail("expected section '" + label + "'");
  }

  Mat<double> read_matrix(const std::string& label, Index rows, Index cols) {
    expect_label(label);
    Mat<double> m(rows, cols);
    for (Index i = 0; i < rows; ++i) {
      const auto tokens = line_tokens();
      if (static_cast<Index>(tokens.size()) != cols)
        fail("section '" + label + "': expected " + std::to_string(cols) + " values per row");
      for (Index j = 0; j < cols; ++j) m(i, j) = parse_value(tokens[static_cast<std::size_t>(j)]);
    }
    return m;
  }

  Vec<double> read_vector(const std::string& label, Index size) {
    expect_label(label);
    const auto tokens = line_tokens();
    if (static_cast<Index>(tokens.size()) != size)
      fail("section '" + label + "': expected " + std::to_string(size) + " values");
    Vec<double> v(size);
    for (Index i = 0; i < size; ++i) v(i) = parse_value(tokens[static_cast<std::size_t>(i)]);
    return v;
  }

  [[noreturn]] void fail(const std::string& what) {
    throw ParseError(name_ + ":" + std::to_string(lineno_) + ": " + what);
  }

 private:
  double parse_value(const std::string& tok) {
    double v = 0.0;
    if (!detail::parse_double(tok, v)) fail("non-numeric value '" + tok + "'");
    if (!std::isfinite(v)) fail("non-finite value '" + tok + "'");
    return v;
  }

  std::istream& in_;
  std::string name_;
  std::size_t lineno_ = 0;
};

}  // namespace

void save_model(const LinearMap& model, const std::filesystem::path& path) {
  std::string out;
  out += kMagic;
  out += " linear\ndims ";
  out += std::to_string(model.M.rows());
  out += ' ';
  out += std::to_string(model.M.cols());
  out += '\n';
  append_matrix(out, "M", model.M);
  detail::write_file_atomic(path, out);
}

void save_model(const MlpMap& model, const std::filesystem::path& path) {
  std::string out;
  out += kMagic;
  out += " mlp\ndims ";
  out += std::to_string(model.W1.rows());
  out += ' ';
  out += std::to_string(model.W1.cols());
  out += ' ';
  out += std::to_string(model.W2.cols());
  out += '\n';
  append_matrix(out, "W1", model.W1);
  append_vector(out, "b1", model.b1);
  append_matrix(out, "W2", model.W2);
  append_vector(out, "b2", model.b2);
  detail::write_file_atomic(path, out);
}

void save_model(const AnyModel& model, const std::filesystem::path& path) {
  std::visit([&](const auto& m) { save_model(m, path); }, model);
}

AnyModel load_model(std::istream& in, const std::string& name) {
  ModelReader reader(in, name);

  const auto magic = reader.line_tokens();
  if (magic.size() != 2 || magic[0] != kMagic)
    reader.fail(std::string("expected '") + kMagic + " <kind>' header");
  const std::string& kind = magic[1];

  const auto dims = reader.line_tokens();
  auto dim_at = [&](std::size_t i) {
    std::int64_t v = 0;
    if (!detail::parse_int64(dims[i], v) || v < 1) reader.fail("bad dimension '" + dims[i] + "'");
    return static_cast<Index>(v);
  };

  if (kind == "linear") {
    if (dims.size() != 3 || dims[0] != "dims") reader.fail("expected 'dims <d> <a>'");
    const Index d = dim_at(1), a = dim_at(2);
    LinearMap model;
    model.M = reader.read_matrix("M", d, a);
    return model;
  }
  if (kind == "mlp") {
    if (dims.size() != 4 || dims[0] != "dims") reader.fail("expected 'dims <d> <h> <a>'");
    const Index d = dim_at(1), h = dim_at(2), a = dim_at(3);
    MlpMap model;
    model.W1 = reader.read_matrix("W1", d, h);
    model.b1 = reader.read_vector("b1", h);
    model.W2 = reader.read_matrix("W2", h, a);
    model.b2 = reader.read_vector("b2", a);
    return model;
  }
  reader.fail("unknown model kind '" + kind + "'");
}

AnyModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open model file: " + path.string());
  return load_model(in, path.string());
}

}  // namespace semprobe
