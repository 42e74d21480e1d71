#pragma once

// Synthetic covariances from the linear instantaneous mixing model with
// block-structured noise:
//
//   C_i = A_i E_i A_i^T,  E_i = diag(p_i1..p_iQ, nu_i1..nu_i(P-Q)),
//   A = exp(mu B),  A_i = A + sigma_mix Xi_i,
//   y_i = sum_j alpha_j f(p_ij) + sigma eps_i.
//
// Draw order from one SplitMix64 stream seeded with `seed`:
//   1. B, P x P row-major, N(0, 1)
//   2. alpha, Q values, N(0, 1)
//   3. per subject i: Q source log-powers N(0, 1), then P-Q noise
//      log-powers N(-2, 0.5^2)
//   4. eps, N values, N(0, 1)
//   5. per subject i: Xi_i, P x P row-major, N(0, 1)
// Every draw happens regardless of mu, sigma and sigma_mix, so changing one of
// those knobs leaves all other random quantities unchanged.

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include "covreg/bundle.hpp"
#include "covreg/regress.hpp"

namespace covreg {

enum class LinkFunction { Identity, Log, Sqrt };

[[nodiscard]] const char* to_string(LinkFunction f) noexcept;
[[nodiscard]] LinkFunction parse_link_function(const std::string& name);
[[nodiscard]] double apply_link(LinkFunction f, double power);

struct GenerativeConfig {
  int p = 5;
  int q = 2;
  int n = 100;
  double mu = 1.0;
  double sigma = 0.0;
  double sigma_mix = 0.0;
  LinkFunction f_kind = LinkFunction::Log;
  bool orthogonal_a = false;
  std::uint64_t seed = 0;

  void validate() const;
};

/// General (non-symmetric) matrix exponential, Pade approximation with
/// scaling and squaring.
[[nodiscard]] Eigen::MatrixXd matrix_exp(const Eigen::MatrixXd& m);

/// exp(mu B), or its orthogonal polar factor when orthogonal_a is set.
/// mu == 0 gives the identity exactly.
[[nodiscard]] Eigen::MatrixXd make_mixing(const GenerativeConfig& cfg);

struct SimulatedData {
  CovarianceBundle bundle;
  Eigen::VectorXd alpha;
  Eigen::MatrixXd mixing;
  /// N x Q source powers p_ij.
  Eigen::MatrixXd source_powers;
};

[[nodiscard]] SimulatedData sample_bundle(const GenerativeConfig& cfg);

enum class SweepAxis { SigmaNoise, Mu, SigmaMix };

[[nodiscard]] const char* to_string(SweepAxis axis) noexcept;
[[nodiscard]] SweepAxis parse_sweep_axis(const std::string& name);

struct SweepRow {
  SweepAxis axis = SweepAxis::SigmaNoise;
  double value = 0.0;
  int repeat = 0;
  std::uint64_t seed = 0;
  std::string method;
  std::string filter;
  std::string embedding;
  int rank = 0;
  /// -1 when the whole cell failed.
  int fold = -1;
  double lambda = 0.0;
  double mae = 0.0;
  double y_std = 0.0;
  std::string error;
};

struct SweepPlan {
  GenerativeConfig base;
  SweepAxis axis = SweepAxis::SigmaNoise;
  std::vector<double> values;
  std::vector<PipelineSpec> specs;
  int folds = 10;
  int repeats = 1;

  void validate() const;
};

/// Every (value x spec x repeat) cell: simulate with seed base.seed + repeat,
/// run K-fold CV, one row per fold. Cells run on `jobs` threads; rows come
/// back in cell order regardless. A failing cell yields one row carrying the
/// error text.
[[nodiscard]] std::vector<SweepRow> sweep(const SweepPlan& plan, int jobs = 1);

/// Named presets for the three simulation panels: "fig3-left" (label noise),
/// "fig3-middle" (distance of A from identity), "fig3-right" (per-subject
/// mixing perturbation). Five axis values, four pipelines, three repeats.
[[nodiscard]] SweepPlan sweep_preset(const std::string& name);
[[nodiscard]] std::vector<std::string> sweep_preset_names();

}  // namespace covreg
