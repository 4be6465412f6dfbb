#include "edwsvr/model_io.hpp"

#include <fstream>
#include <sstream>
#include <vector>

#include "edwsvr/textio.hpp"

namespace edwsvr {

namespace {

void write_vector(std::ostream& out, const char* tag, const Eigen::VectorXd& v) {
  out << tag;
  for (Eigen::Index i = 0; i < v.size(); ++i) out << ' ' << format_double(v(i));
  out << '\n';
}

void write_preprocessing(std::ostream& out, const Preprocessing& prep) {
  out << "norm " << prep.norm.feature_min.size() << '\n';
  write_vector(out, "fmin", prep.norm.feature_min);
  write_vector(out, "fmax", prep.norm.feature_max);
  out << "trange " << format_double(prep.norm.target_min) << ' '
      << format_double(prep.norm.target_max) << '\n';
  if (!prep.pca) {
    out << "pca none\n";
    return;
  }
  const PcaTransform& pca = *prep.pca;
  out << "pca " << pca.in_dim() << ' ' << pca.out_dim() << ' '
      << format_double(pca.retained_variance_fraction) << '\n';
  write_vector(out, "mean", pca.mean);
  write_vector(out, "eigenvalues", pca.eigenvalues);
  for (Eigen::Index j = 0; j < pca.out_dim(); ++j)
    write_vector(out, "component", pca.components.col(j));
}

class LineReader {
 public:
  LineReader(std::istream& in, std::string path) : in_(in), path_(std::move(path)) {}

  // Next nonempty line split on spaces; throws if the stream is exhausted.
  std::vector<std::string> next_raw(const std::string& context) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (line.empty()) continue;
      std::vector<std::string> tokens;
      std::istringstream split(line);
      std::string tok;
      while (split >> tok) tokens.push_back(tok);
      if (tokens.empty()) continue;
      return tokens;
    }
    throw std::runtime_error(path_ + ": unexpected end of file, expected " + context);
  }

  std::vector<std::string> next(const std::string& expect_tag) {
    auto tokens = next_raw("'" + expect_tag + "'");
    if (tokens[0] != expect_tag) fail("expected '" + expect_tag + "', got '" + tokens[0] + "'");
    return tokens;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw std::runtime_error(path_ + ":" + std::to_string(line_no_) + ": " + msg);
  }

  double parse_double(const std::string& tok) const {
    double v;
    if (!try_parse_double(tok, v)) fail("bad number '" + tok + "'");
    return v;
  }

  long parse_count(const std::string& tok) const {
    long v;
    if (!try_parse_long(tok, v) || v < 0) fail("bad count '" + tok + "'");
    return v;
  }

  Eigen::VectorXd parse_vector(const std::string& tag, Eigen::Index size) {
    auto tokens = next(tag);
    if (static_cast<Eigen::Index>(tokens.size()) != size + 1)
      fail("'" + tag + "' expects " + std::to_string(size) + " values");
    Eigen::VectorXd v(size);
    for (Eigen::Index i = 0; i < size; ++i) v(i) = parse_double(tokens[i + 1]);
    return v;
  }

 private:
  std::istream& in_;
  std::string path_;
  long line_no_ = 0;
};

Preprocessing read_preprocessing(LineReader& reader) {
  Preprocessing prep;
  auto norm = reader.next("norm");
  if (norm.size() != 2) reader.fail("'norm' expects the feature count");
  const Eigen::Index d = reader.parse_count(norm[1]);
  prep.norm.feature_min = reader.parse_vector("fmin", d);
  prep.norm.feature_max = reader.parse_vector("fmax", d);
  auto trange = reader.next("trange");
  if (trange.size() != 3) reader.fail("'trange' expects two values");
  prep.norm.target_min = reader.parse_double(trange[1]);
  prep.norm.target_max = reader.parse_double(trange[2]);

  auto pca = reader.next("pca");
  if (pca.size() == 2 && pca[1] == "none") return prep;
  if (pca.size() != 4) reader.fail("'pca' expects 'none' or in-dim, out-dim, retained fraction");
  PcaTransform t;
  const Eigen::Index in_dim = reader.parse_count(pca[1]);
  const Eigen::Index out_dim = reader.parse_count(pca[2]);
  t.retained_variance_fraction = reader.parse_double(pca[3]);
  t.mean = reader.parse_vector("mean", in_dim);
  t.eigenvalues = reader.parse_vector("eigenvalues", out_dim);
  t.components.resize(in_dim, out_dim);
  for (Eigen::Index j = 0; j < out_dim; ++j)
    t.components.col(j) = reader.parse_vector("component", in_dim);
  prep.pca = std::move(t);
  return prep;
}

void write_kernel(std::ostream& out, const KernelSpec& spec) {
  if (spec.kind == KernelSpec::Kind::linear)
    out << "kernel linear\n";
  else
    out << "kernel rbf " << format_double(spec.gamma) << '\n';
}

KernelSpec read_kernel(LineReader& reader) {
  auto tokens = reader.next("kernel");
  KernelSpec spec;
  if (tokens.size() == 2 && tokens[1] == "linear") {
    spec.kind = KernelSpec::Kind::linear;
    return spec;
  }
  if (tokens.size() == 3 && tokens[1] == "rbf") {
    spec.kind = KernelSpec::Kind::rbf;
    spec.gamma = reader.parse_double(tokens[2]);
    return spec;
  }
  reader.fail("'kernel' expects 'linear' or 'rbf <gamma>'");
}

Eigen::VectorXd read_weights(LineReader& reader) {
  auto head = reader.next("weights");
  if (head.size() != 2) reader.fail("'weights' expects a count");
  return reader.parse_vector("values", reader.parse_count(head[1]));
}

}  // namespace

void save_model(const std::string& path, const Model& model) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << "edwsvr-model v1\n";

  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, cd::DualModel>) {
          out << "kind dual\n";
          write_preprocessing(out, m.prep);
          write_kernel(out, m.spec);
          out << "support " << m.theta.size() << ' ' << m.support_points.cols() << '\n';
          for (Eigen::Index i = 0; i < m.theta.size(); ++i) {
            out << format_double(m.theta(i));
            for (Eigen::Index j = 0; j < m.support_points.cols(); ++j)
              out << ' ' << format_double(m.support_points(i, j));
            out << '\n';
          }
        } else if constexpr (std::is_same_v<T, asgd::LinearModel>) {
          out << "kind linear\n";
          write_preprocessing(out, m.prep);
          out << "weights " << m.w_aug.size() << '\n';
          write_vector(out, "values", m.w_aug);
        } else {
          out << "kind ols\n";
          write_preprocessing(out, m.prep);
          out << "weights " << m.w_aug.size() << '\n';
          write_vector(out, "values", m.w_aug);
        }
      },
      model);

  out << "end\n";
  if (!out) throw std::runtime_error(path + ": write failed");
}

Model load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open");
  LineReader reader(in, path);

  auto header = reader.next("edwsvr-model");
  if (header.size() != 2 || header[1] != "v1")
    reader.fail("unsupported model format version");

  auto kind = reader.next("kind");
  if (kind.size() != 2) reader.fail("'kind' expects one token");

  Model model;
  if (kind[1] == "dual") {
    cd::DualModel m;
    m.prep = read_preprocessing(reader);
    m.spec = read_kernel(reader);
    auto head = reader.next("support");
    if (head.size() != 3) reader.fail("'support' expects row and column counts");
    const Eigen::Index rows = reader.parse_count(head[1]);
    const Eigen::Index cols = reader.parse_count(head[2]);
    m.theta.resize(rows);
    m.support_points.resize(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
      auto row = reader.next_raw("a support row");
      if (static_cast<Eigen::Index>(row.size()) != cols + 1)
        reader.fail("support row expects " + std::to_string(cols + 1) + " values");
      m.theta(i) = reader.parse_double(row[0]);
      for (Eigen::Index j = 0; j < cols; ++j)
        m.support_points(i, j) = reader.parse_double(row[j + 1]);
    }
    model = std::move(m);
  } else if (kind[1] == "linear") {
    asgd::LinearModel m;
    m.prep = read_preprocessing(reader);
    m.w_aug = read_weights(reader);
    model = std::move(m);
  } else if (kind[1] == "ols") {
    baselines::OlsModel m;
    m.prep = read_preprocessing(reader);
    m.w_aug = read_weights(reader);
    model = std::move(m);
  } else {
    reader.fail("unknown model kind '" + kind[1] + "'");
  }

  reader.next("end");
  return model;
}

}  // namespace edwsvr
