#include "covreg/io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "covreg/errors.hpp"

namespace covreg::io {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

namespace {

class TokenReader {
 public:
  TokenReader(std::istream& in, std::string what) : in_(in), what_(std::move(what)) {}

  std::string word() {
    std::string tok;
    if (!(in_ >> tok)) fail("unexpected end of input");
    return tok;
  }

  void expect(const std::string& keyword) {
    const std::string tok = word();
    if (tok != keyword) fail("expected '" + keyword + "', found '" + tok + "'");
  }

  double number() {
    const std::string tok = word();
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0' || errno == ERANGE) fail("not a number: '" + tok + "'");
    return v;
  }

  long long integer() {
    const std::string tok = word();
    errno = 0;
    char* end = nullptr;
    const long long v = std::strtoll(tok.c_str(), &end, 10);
    if (end == tok.c_str() || *end != '\0' || errno == ERANGE) fail("not an integer: '" + tok + "'");
    return v;
  }

  int positive(const char* field) {
    const long long v = integer();
    if (v < 1 || v > 1'000'000) fail(std::string(field) + " must be a positive integer");
    return static_cast<int>(v);
  }

  Eigen::MatrixXd matrix(Eigen::Index rows, Eigen::Index cols) {
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = number();
    return m;
  }

  Eigen::VectorXd vector(Eigen::Index size) {
    Eigen::VectorXd v(size);
    for (Eigen::Index i = 0; i < size; ++i) v(i) = number();
    return v;
  }

  void expect_end() {
    std::string tok;
    if (in_ >> tok) fail("trailing content '" + tok + "'");
  }

  [[noreturn]] void fail(const std::string& msg) const { throw Error(ErrorKind::Format, what_ + ": " + msg); }

 private:
  std::istream& in_;
  std::string what_;
};

template <typename Derived>
void write_rows(std::ostream& out, const Eigen::DenseBase<Derived>& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ' ';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

void write_vector_line(std::ostream& out, const char* key, const Eigen::VectorXd& v) {
  out << key << ' ' << v.size();
  for (Eigen::Index i = 0; i < v.size(); ++i) out << ' ' << format_double(v(i));
  out << '\n';
}

Eigen::VectorXd read_vector_line(TokenReader& r, const char* key) {
  r.expect(key);
  const long long size = r.integer();
  if (size < 0 || size > 10'000'000) r.fail(std::string(key) + ": bad length");
  return r.vector(static_cast<Eigen::Index>(size));
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Format, "cannot open '" + path.string() + "' for reading");
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Format, "cannot open '" + path.string() + "' for writing");
  return out;
}

}  // namespace

void write_covb(std::ostream& out, const CovarianceBundle& bundle) {
  bundle.validate();
  out << "COVB v1 " << bundle.size() << ' ' << bundle.dim() << ' ' << bundle.nominal_rank << '\n';
  for (std::size_t i = 0; i < bundle.size(); ++i) {
    out << "y " << format_double(bundle.labels(static_cast<Eigen::Index>(i))) << '\n';
    write_rows(out, bundle.matrices[i].matrix());
  }
}

CovarianceBundle read_covb(std::istream& in, const std::string& provenance) {
  TokenReader r(in, "COVB " + provenance);
  r.expect("COVB");
  r.expect("v1");
  const int n = r.positive("N");
  const int p = r.positive("P");
  const int rank = r.positive("R");
  CovarianceBundle bundle;
  bundle.labels.resize(n);
  bundle.matrices.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    r.expect("y");
    bundle.labels(i) = r.number();
    bundle.matrices.emplace_back(r.matrix(p, p));
  }
  r.expect_end();
  bundle.nominal_rank = rank;
  bundle.provenance = provenance;
  try {
    bundle.validate();
  } catch (const Error& e) {
    r.fail(e.detail());
  }
  return bundle;
}

void write_leadfield(std::ostream& out, const Leadfield& lead) {
  lead.validate();
  out << "LEADFIELD v1 " << lead.g.rows() << ' ' << lead.g.cols() << '\n';
  write_rows(out, lead.g);
}

Leadfield read_leadfield(std::istream& in) {
  TokenReader r(in, "LEADFIELD");
  r.expect("LEADFIELD");
  r.expect("v1");
  const int p = r.positive("P");
  const int q = r.positive("Q");
  Leadfield lead{r.matrix(p, q)};
  r.expect_end();
  if (!lead.g.allFinite()) r.fail("non-finite entries");
  return lead;
}

void write_symmat(std::ostream& out, const SymMatd& m) {
  out << "SYMMAT v1 " << m.dim() << '\n';
  write_rows(out, m.matrix());
}

SymMatd read_symmat(std::istream& in) {
  TokenReader r(in, "SYMMAT");
  r.expect("SYMMAT");
  r.expect("v1");
  const int p = r.positive("P");
  SymMatd m(r.matrix(p, p));
  r.expect_end();
  return m;
}

// MODEL v1 layout:
//   MODEL v1
//   filter <kind> <P> <R> <mne_lambda>
//   <P rows of R values>
//   eigenvalues <k> <values...>
//   embedding <kind> <rank>
//   reference <D>            (D = 0 when the embedding has none)
//   <D rows of D values>
//   ridge <lambda> <intercept>
//   mean <K> <values...>
//   scale <K> <values...>
//   beta <K> <values...>
//   end
void write_model(std::ostream& out, const FittedPipeline& model) {
  out << "MODEL v1\n";
  out << "filter " << to_string(model.filter.kind) << ' ' << model.filter.w.rows() << ' ' << model.filter.w.cols()
      << ' ' << format_double(model.filter.mne_lambda) << '\n';
  write_rows(out, model.filter.w);
  write_vector_line(out, "eigenvalues", model.filter.eigenvalues);
  out << "embedding " << to_string(model.embedding.kind()) << ' ' << model.embedding.rank() << '\n';
  const auto& ref = model.embedding.reference();
  out << "reference " << (ref ? ref->dim() : 0) << '\n';
  if (ref) write_rows(out, ref->matrix());
  out << "ridge " << format_double(model.ridge.lambda_star) << ' ' << format_double(model.ridge.intercept) << '\n';
  write_vector_line(out, "mean", model.ridge.feature_mean);
  write_vector_line(out, "scale", model.ridge.feature_scale);
  write_vector_line(out, "beta", model.ridge.beta);
  out << "end\n";
}

FittedPipeline read_model(std::istream& in) {
  TokenReader r(in, "MODEL");
  r.expect("MODEL");
  r.expect("v1");
  r.expect("filter");
  SpatialFilter filter;
  try {
    filter.kind = parse_filter_kind(r.word());
  } catch (const Error& e) {
    r.fail(e.detail());
  }
  const int p = r.positive("P");
  const int cols = r.positive("R");
  filter.mne_lambda = r.number();
  filter.w = r.matrix(p, cols);
  filter.eigenvalues = read_vector_line(r, "eigenvalues");

  r.expect("embedding");
  EmbeddingKind kind{};
  try {
    kind = parse_embedding_kind(r.word());
  } catch (const Error& e) {
    r.fail(e.detail());
  }
  const int rank = r.positive("rank");
  r.expect("reference");
  const long long dim = r.integer();
  if (dim < 0 || dim > 100'000) r.fail("bad reference dimension");
  std::optional<SymMatd> reference;
  if (dim > 0) reference.emplace(r.matrix(dim, dim));

  r.expect("ridge");
  RidgeModel ridge;
  ridge.lambda_star = r.number();
  ridge.intercept = r.number();
  ridge.feature_mean = read_vector_line(r, "mean");
  ridge.feature_scale = read_vector_line(r, "scale");
  ridge.beta = read_vector_line(r, "beta");
  r.expect("end");
  r.expect_end();
  if (ridge.feature_mean.size() != ridge.beta.size() || ridge.feature_scale.size() != ridge.beta.size()) {
    r.fail("ridge vectors have inconsistent lengths");
  }
  try {
    TangentEmbedding<double> embedding(kind, std::move(reference), rank);
    return {std::move(filter), std::move(embedding), std::move(ridge)};
  } catch (const Error& e) {
    r.fail(e.detail());
  }
}

void write_cv_csv(std::ostream& out, const PipelineSpec& spec, int rank, const CVReport& report, bool header) {
  if (header) out << "method,filter,embedding,rank,fold,lambda,mae,seed\n";
  for (std::size_t f = 0; f < report.per_fold_mae.size(); ++f) {
    out << spec.name() << ',' << to_string(spec.filter_kind) << ',' << to_string(spec.embedding) << ',' << rank
        << ',' << f << ',' << format_double(report.per_fold_lambda[f]) << ','
        << format_double(report.per_fold_mae[f]) << ',' << report.seed << '\n';
  }
}

namespace {

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

}  // namespace

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "axis,value,repeat,method,filter,embedding,rank,fold,lambda,mae,seed,y_std,error\n";
  for (const auto& row : rows) {
    out << to_string(row.axis) << ',' << format_double(row.value) << ',' << row.repeat << ','
        << csv_quote(row.method) << ',' << row.filter << ',' << row.embedding << ',' << row.rank << ','
        << row.fold << ',' << format_double(row.lambda) << ',' << format_double(row.mae) << ',' << row.seed
        << ',' << format_double(row.y_std) << ',' << csv_quote(row.error) << '\n';
  }
}

void write_features_csv(std::ostream& out, const Eigen::MatrixXd& features, const Eigen::VectorXd& labels) {
  for (Eigen::Index j = 0; j < features.cols(); ++j) out << 'f' << j << ',';
  out << "y\n";
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    for (Eigen::Index j = 0; j < features.cols(); ++j) out << format_double(features(i, j)) << ',';
    out << format_double(labels(i)) << '\n';
  }
}

CovarianceBundle load_covb(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_covb(in, path.string());
}

void save_covb(const std::filesystem::path& path, const CovarianceBundle& bundle) {
  auto out = open_out(path);
  write_covb(out, bundle);
}

Leadfield load_leadfield(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_leadfield(in);
}

FittedPipeline load_model(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_model(in);
}

void save_model(const std::filesystem::path& path, const FittedPipeline& model) {
  auto out = open_out(path);
  write_model(out, model);
}

}  // namespace covreg::io
