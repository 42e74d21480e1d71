#include "covreg/simgen.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <atomic>
#include <cmath>
#include <random>
#include <thread>

#include "covreg/errors.hpp"
#include "covreg/rng.hpp"

namespace covreg {

const char* to_string(LinkFunction f) noexcept {
  switch (f) {
    case LinkFunction::Identity: return "identity";
    case LinkFunction::Log: return "log";
    case LinkFunction::Sqrt: return "sqrt";
  }
  return "unknown";
}

LinkFunction parse_link_function(const std::string& name) {
  for (auto f : {LinkFunction::Identity, LinkFunction::Log, LinkFunction::Sqrt}) {
    if (name == to_string(f)) return f;
  }
  throw Error(ErrorKind::InvalidArgument, "unknown link function '" + name + "' (expected identity|log|sqrt)");
}

double apply_link(LinkFunction f, double power) {
  switch (f) {
    case LinkFunction::Identity: return power;
    case LinkFunction::Log: return std::log(power);
    case LinkFunction::Sqrt: return std::sqrt(power);
  }
  return power;
}

void GenerativeConfig::validate() const {
  if (q < 1 || q >= p) {
    throw Error(ErrorKind::InvalidArgument,
                "need 1 <= q < p, got q = " + std::to_string(q) + ", p = " + std::to_string(p));
  }
  if (n < 2) throw Error(ErrorKind::InvalidArgument, "need n >= 2, got " + std::to_string(n));
  if (!(mu >= 0.0) || !std::isfinite(mu)) throw Error(ErrorKind::InvalidArgument, "mu must be finite and >= 0");
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw Error(ErrorKind::InvalidArgument, "sigma must be finite and >= 0");
  }
  if (!(sigma_mix >= 0.0) || !std::isfinite(sigma_mix)) {
    throw Error(ErrorKind::InvalidArgument, "sigma_mix must be finite and >= 0");
  }
}

Eigen::MatrixXd matrix_exp(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw Error(ErrorKind::DimensionMismatch, "matrix_exp needs a square matrix");
  if (!m.allFinite()) throw Error(ErrorKind::InvalidArgument, "matrix_exp: non-finite entries");
  return m.exp();
}

namespace {

Eigen::MatrixXd draw_matrix(SplitMix64& rng, std::normal_distribution<double>& normal, int rows, int cols) {
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = normal(rng);
  return m;
}

Eigen::MatrixXd mixing_from(const Eigen::MatrixXd& b, const GenerativeConfig& cfg) {
  const Eigen::Index p = b.rows();
  if (cfg.mu == 0.0) return Eigen::MatrixXd::Identity(p, p);
  Eigen::MatrixXd a = matrix_exp(cfg.mu * b);
  if (cfg.orthogonal_a) {
    const SvdResult<double> svd = svd_rect(a);
    a = svd.u * svd.v.transpose();
  }
  return a;
}

}  // namespace

Eigen::MatrixXd make_mixing(const GenerativeConfig& cfg) {
  cfg.validate();
  SplitMix64 rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  return mixing_from(draw_matrix(rng, normal, cfg.p, cfg.p), cfg);
}

SimulatedData sample_bundle(const GenerativeConfig& cfg) {
  cfg.validate();
  SplitMix64 rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int p = cfg.p;
  const int q = cfg.q;
  const int n = cfg.n;

  SimulatedData out;
  out.mixing = mixing_from(draw_matrix(rng, normal, p, p), cfg);
  out.alpha = draw_matrix(rng, normal, q, 1);

  Eigen::MatrixXd powers(n, p);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < q; ++j) powers(i, j) = std::exp(normal(rng));
    for (int j = q; j < p; ++j) powers(i, j) = std::exp(-2.0 + 0.5 * normal(rng));
  }
  out.source_powers = powers.leftCols(q);

  Eigen::VectorXd noise(n);
  for (int i = 0; i < n; ++i) noise(i) = normal(rng);

  CovarianceBundle& bundle = out.bundle;
  bundle.labels.resize(n);
  bundle.matrices.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const Eigen::MatrixXd perturbation = draw_matrix(rng, normal, p, p);
    const Eigen::MatrixXd a_i = cfg.sigma_mix == 0.0 ? out.mixing : Eigen::MatrixXd(out.mixing + cfg.sigma_mix * perturbation);
    bundle.matrices.emplace_back(a_i * powers.row(i).asDiagonal() * a_i.transpose());
    double y = 0.0;
    for (int j = 0; j < q; ++j) y += out.alpha(j) * apply_link(cfg.f_kind, powers(i, j));
    bundle.labels(i) = y + cfg.sigma * noise(i);
  }
  bundle.nominal_rank = p;
  bundle.provenance = "simulated seed=" + std::to_string(cfg.seed);
  return out;
}

// ---------------------------------------------------------------------------

const char* to_string(SweepAxis axis) noexcept {
  switch (axis) {
    case SweepAxis::SigmaNoise: return "sigma";
    case SweepAxis::Mu: return "mu";
    case SweepAxis::SigmaMix: return "sigma_mix";
  }
  return "unknown";
}

SweepAxis parse_sweep_axis(const std::string& name) {
  for (auto axis : {SweepAxis::SigmaNoise, SweepAxis::Mu, SweepAxis::SigmaMix}) {
    if (name == to_string(axis)) return axis;
  }
  throw Error(ErrorKind::InvalidArgument, "unknown sweep axis '" + name + "' (expected sigma|mu|sigma_mix)");
}

void SweepPlan::validate() const {
  base.validate();
  if (values.empty()) throw Error(ErrorKind::InvalidArgument, "sweep needs at least one axis value");
  if (specs.empty()) throw Error(ErrorKind::InvalidArgument, "sweep needs at least one pipeline");
  if (repeats < 1) throw Error(ErrorKind::InvalidArgument, "sweep needs repeats >= 1");
  if (folds < 2 || folds > base.n) {
    throw Error(ErrorKind::InvalidArgument, "sweep folds must be in [2, n]");
  }
  for (double v : values) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw Error(ErrorKind::InvalidArgument, "sweep axis values must be finite and >= 0");
    }
  }
  for (const auto& spec : specs) spec.validate();
}

namespace {

struct Cell {
  std::size_t value_idx;
  std::size_t spec_idx;
  int repeat;
};

std::vector<SweepRow> run_cell(const SweepPlan& plan, const Cell& cell) {
  GenerativeConfig cfg = plan.base;
  const double value = plan.values[cell.value_idx];
  switch (plan.axis) {
    case SweepAxis::SigmaNoise: cfg.sigma = value; break;
    case SweepAxis::Mu: cfg.mu = value; break;
    case SweepAxis::SigmaMix: cfg.sigma_mix = value; break;
  }
  cfg.seed = plan.base.seed + static_cast<std::uint64_t>(cell.repeat);
  const PipelineSpec& spec = plan.specs[cell.spec_idx];

  SweepRow proto;
  proto.axis = plan.axis;
  proto.value = value;
  proto.repeat = cell.repeat;
  proto.seed = cfg.seed;
  proto.method = spec.name();
  proto.filter = to_string(spec.filter_kind);
  proto.embedding = to_string(spec.embedding);
  proto.rank = spec.filter_rank > 0 ? spec.filter_rank : cfg.p;

  std::vector<SweepRow> rows;
  try {
    const SimulatedData data = sample_bundle(cfg);
    const Eigen::VectorXd& y = data.bundle.labels;
    proto.y_std = std::sqrt((y.array() - y.mean()).square().mean());
    const CVReport report = run_pipeline_cv(data.bundle, spec, plan.folds, cfg.seed);
    for (std::size_t f = 0; f < report.per_fold_mae.size(); ++f) {
      SweepRow row = proto;
      row.fold = static_cast<int>(f);
      row.lambda = report.per_fold_lambda[f];
      row.mae = report.per_fold_mae[f];
      rows.push_back(std::move(row));
    }
  } catch (const std::exception& e) {
    SweepRow row = proto;
    row.fold = -1;
    row.lambda = std::nan("");
    row.mae = std::nan("");
    row.error = e.what();
    rows.assign(1, std::move(row));
  }
  return rows;
}

}  // namespace

std::vector<SweepRow> sweep(const SweepPlan& plan, int jobs) {
  plan.validate();
  std::vector<Cell> cells;
  for (std::size_t v = 0; v < plan.values.size(); ++v)
    for (std::size_t s = 0; s < plan.specs.size(); ++s)
      for (int r = 0; r < plan.repeats; ++r) cells.push_back({v, s, r});

  std::vector<std::vector<SweepRow>> results(cells.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t k = next++; k < cells.size(); k = next++) results[k] = run_cell(plan, cells[k]);
  };
  const int threads = std::max(1, std::min<int>(jobs, static_cast<int>(cells.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  std::vector<SweepRow> rows;
  for (auto& cell_rows : results)
    for (auto& row : cell_rows) rows.push_back(std::move(row));
  return rows;
}

std::vector<std::string> sweep_preset_names() { return {"fig3-left", "fig3-middle", "fig3-right"}; }

SweepPlan sweep_preset(const std::string& name) {
  SweepPlan plan;
  plan.base = GenerativeConfig{};
  plan.folds = 10;
  plan.repeats = 3;

  const auto make_spec = [](FilterKind filter, EmbeddingKind embedding) {
    PipelineSpec spec;
    spec.filter_kind = filter;
    spec.embedding = embedding;
    return spec;
  };
  plan.specs = {make_spec(FilterKind::Identity, EmbeddingKind::GeometricTangent),
                make_spec(FilterKind::Identity, EmbeddingKind::WassersteinTangent),
                make_spec(FilterKind::Identity, EmbeddingKind::LogDiag),
                make_spec(FilterKind::Supervised, EmbeddingKind::LogDiag)};

  if (name == "fig3-left") {
    plan.axis = SweepAxis::SigmaNoise;
    plan.values = {0.0, 0.01, 0.1, 0.5, 1.0};
  } else if (name == "fig3-middle") {
    plan.axis = SweepAxis::Mu;
    plan.values = {0.0, 0.25, 0.5, 0.75, 1.0};
  } else if (name == "fig3-right") {
    plan.axis = SweepAxis::SigmaMix;
    plan.values = {0.0, 0.01, 0.05, 0.1, 0.2};
  } else {
    throw Error(ErrorKind::InvalidArgument,
                "unknown sweep preset '" + name + "' (expected fig3-left|fig3-middle|fig3-right)");
  }
  return plan;
}

}  // namespace covreg
