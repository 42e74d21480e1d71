// covreg: command-line driver for covariance regression pipelines.
//
// Exit codes: 0 success, 2 configuration / validation error, 3 numerical
// failure. Standard output carries summaries only; data goes to --out files.

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "covreg/config.hpp"
#include "covreg/errors.hpp"
#include "covreg/filters.hpp"
#include "covreg/io.hpp"
#include "covreg/manifold.hpp"
#include "covreg/regress.hpp"
#include "covreg/simgen.hpp"

namespace {

using namespace covreg;

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

/// Validation failure detected by the CLI itself.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  return out;
}

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("bad number '" + item + "' in list");
    }
  }
  return values;
}

// ---------------------------------------------------------------------------
// Options shared between subcommands

struct GenerativeOptions {
  GenerativeConfig cfg;
  std::string link = "log";

  void add_to(CLI::App& app) {
    app.add_option("--p", cfg.p, "Number of sensors P")->capture_default_str();
    app.add_option("--q", cfg.q, "Number of sources Q (< P)")->capture_default_str();
    app.add_option("--n", cfg.n, "Number of subjects N")->capture_default_str();
    app.add_option("--mu", cfg.mu, "Distance of the mixing matrix from identity")->capture_default_str();
    app.add_option("--sigma", cfg.sigma, "Label noise standard deviation")->capture_default_str();
    app.add_option("--sigma-mix", cfg.sigma_mix, "Per-subject mixing perturbation")->capture_default_str();
    app.add_option("--link", link, "Link between source power and target: identity|log|sqrt")
        ->capture_default_str();
    app.add_flag("--orthogonal-a", cfg.orthogonal_a, "Replace A by its orthogonal polar factor");
    app.add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
  }

  GenerativeConfig resolve() {
    cfg.f_kind = parse_link_function(link);
    cfg.validate();
    return cfg;
  }
};

struct PipelineOptions {
  std::string filter = "identity";
  int rank = 0;
  std::string embedding = "geometric";
  std::string leadfield;
  double mne_lambda = 1.0;
  double grid_lo = 1e-5;
  double grid_hi = 1e3;
  int grid_n = 100;

  void add_to(CLI::App& app) {
    app.add_option("--filter", filter, "identity|unsupervised|supervised|mne")->capture_default_str();
    app.add_option("--rank", rank, "Filter output rank (0: nominal rank of the bundle)")->capture_default_str();
    app.add_option("--embedding", embedding, "euclidean|geometric|wasserstein|logdiag")->capture_default_str();
    app.add_option("--leadfield", leadfield, "LEADFIELD v1 file (mne filter)");
    app.add_option("--mne-lambda", mne_lambda, "Tikhonov parameter of the mne filter")->capture_default_str();
    app.add_option("--grid-lo", grid_lo, "Smallest ridge penalty")->capture_default_str();
    app.add_option("--grid-hi", grid_hi, "Largest ridge penalty")->capture_default_str();
    app.add_option("--grid-n", grid_n, "Number of log-spaced ridge penalties")->capture_default_str();
  }

  PipelineSpec resolve() const {
    PipelineSpec spec;
    spec.filter_kind = parse_filter_kind(filter);
    spec.filter_rank = rank;
    spec.embedding = parse_embedding_kind(embedding);
    spec.ridge_grid = log_grid(grid_lo, grid_hi, grid_n);
    spec.mne_lambda = mne_lambda;
    if (spec.filter_kind == FilterKind::MNE) {
      if (leadfield.empty()) throw ConfigError("--filter mne needs --leadfield");
      spec.leadfield = io::load_leadfield(leadfield);
    }
    spec.validate();
    return spec;
  }
};

/// "filter[:rank]+embedding", e.g. "supervised:3+logdiag".
PipelineSpec parse_spec_token(const std::string& token) {
  const auto plus = token.find('+');
  if (plus == std::string::npos) throw ConfigError("pipeline '" + token + "' is not of the form filter+embedding");
  std::string filter = token.substr(0, plus);
  PipelineSpec spec;
  if (const auto colon = filter.find(':'); colon != std::string::npos) {
    try {
      spec.filter_rank = std::stoi(filter.substr(colon + 1));
    } catch (const std::exception&) {
      throw ConfigError("bad rank in pipeline '" + token + "'");
    }
    filter.erase(colon);
  }
  spec.filter_kind = parse_filter_kind(filter);
  spec.embedding = parse_embedding_kind(token.substr(plus + 1));
  if (spec.filter_kind == FilterKind::MNE) throw ConfigError("mne pipelines are not available in sweeps");
  return spec;
}

int filter_output_rank(const PipelineSpec& spec, const CovarianceBundle& bundle) {
  switch (spec.filter_kind) {
    case FilterKind::Identity: return static_cast<int>(bundle.dim());
    case FilterKind::MNE: return static_cast<int>(spec.leadfield->g.cols());
    default: return spec.filter_rank > 0 ? spec.filter_rank : bundle.nominal_rank;
  }
}

CovarianceBundle load_bundle(const std::string& path) {
  if (path.empty()) throw ConfigError("--bundle is required");
  return io::load_covb(path);
}

double population_std(const Eigen::VectorXd& y) { return std::sqrt((y.array() - y.mean()).square().mean()); }

// ---------------------------------------------------------------------------
// Subcommands

struct Simulate {
  GenerativeOptions gen;
  std::string out;

  void add_to(CLI::App& app) {
    gen.add_to(app);
    app.add_option("--out", out, "Output COVB v1 file")->required();
  }

  int run() {
    const GenerativeConfig cfg = gen.resolve();
    const SimulatedData data = sample_bundle(cfg);
    auto file = open_output(out);
    io::write_covb(file, data.bundle);
    const auto& y = data.bundle.labels;
    std::cout << "N=" << data.bundle.size() << " P=" << data.bundle.dim() << " R=" << data.bundle.nominal_rank
              << " label_mean=" << io::format_double(y.mean()) << " label_std=" << io::format_double(population_std(y))
              << '\n';
    return 0;
  }
};

struct Evaluate {
  PipelineOptions pipe;
  std::string bundle_path;
  std::string out;
  std::string model_path;
  int folds = 10;
  std::uint64_t seed = 0;
  bool write_model = false;

  void add_to(CLI::App& app, bool fit) {
    write_model = fit;
    pipe.add_to(app);
    app.add_option("--bundle", bundle_path, "Input COVB v1 file")->required();
    app.add_option("--folds", folds, "Cross-validation folds")->capture_default_str();
    app.add_option("--seed", seed, "Fold-assignment seed")->capture_default_str();
    app.add_option("--out", out, "Results CSV")->required();
    if (fit) app.add_option("--model", model_path, "Output MODEL v1 file (fitted on the whole bundle)")->required();
  }

  int run() {
    const PipelineSpec spec = pipe.resolve();
    const CovarianceBundle bundle = load_bundle(bundle_path);
    if (folds < 2 || static_cast<std::size_t>(folds) > bundle.size()) {
      throw ConfigError("--folds must be in [2, N = " + std::to_string(bundle.size()) + "]");
    }
    const CVReport report = [&] {
      try {
        return run_pipeline_cv(bundle, spec, folds, seed);
      } catch (const Error& e) {
        throw Error(e.kind(), "cross-validation: " + e.detail());
      }
    }();
    auto csv = open_output(out);
    io::write_cv_csv(csv, spec, filter_output_rank(spec, bundle), report);
    if (write_model) {
      const FittedPipeline model = [&] {
        try {
          return fit_pipeline(bundle, spec);
        } catch (const Error& e) {
          throw Error(e.kind(), "final fit: " + e.detail());
        }
      }();
      io::save_model(model_path, model);
    }
    std::cout << spec.name() << " folds=" << folds << " mean_mae=" << io::format_double(report.mean_mae)
              << " label_std=" << io::format_double(population_std(bundle.labels)) << '\n';
    return 0;
  }
};

struct Predict {
  std::string model_path;
  std::string bundle_path;
  std::string out;

  void add_to(CLI::App& app) {
    app.add_option("--model", model_path, "MODEL v1 file")->required();
    app.add_option("--bundle", bundle_path, "Input COVB v1 file")->required();
    app.add_option("--out", out, "Predictions CSV (index,y,prediction)")->required();
  }

  int run() {
    const FittedPipeline model = io::load_model(model_path);
    const CovarianceBundle bundle = load_bundle(bundle_path);
    const Eigen::VectorXd predicted = model.predict(bundle);
    auto csv = open_output(out);
    csv << "index,y,prediction\n";
    for (Eigen::Index i = 0; i < predicted.size(); ++i) {
      csv << i << ',' << io::format_double(bundle.labels(i)) << ',' << io::format_double(predicted(i)) << '\n';
    }
    std::cout << "predicted " << predicted.size() << " samples, mae="
              << io::format_double((predicted - bundle.labels).cwiseAbs().mean()) << '\n';
    return 0;
  }
};

struct Sweep {
  GenerativeOptions gen;
  std::string preset;
  std::string axis;
  std::string values;
  std::string pipelines;
  int folds = 10;
  int repeats = 3;
  int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  std::string out;
  CLI::App* app = nullptr;

  void add_to(CLI::App& sub) {
    app = &sub;
    gen.add_to(sub);
    sub.add_option("--preset", preset, "fig3-left|fig3-middle|fig3-right");
    sub.add_option("--axis", axis, "sigma|mu|sigma_mix");
    sub.add_option("--values", values, "Comma-separated axis values");
    sub.add_option("--pipelines", pipelines,
                   "Comma-separated filter[:rank]+embedding list, e.g. identity+geometric,supervised+logdiag");
    sub.add_option("--folds", folds, "Cross-validation folds")->capture_default_str();
    sub.add_option("--repeats", repeats, "Repeats per cell (seed + repeat)")->capture_default_str();
    sub.add_option("--jobs", jobs, "Worker threads")->capture_default_str();
    sub.add_option("--out", out, "Results CSV")->required();
  }

  bool given(const char* name) const { return app->get_option(name)->count() > 0; }

  int run() {
    SweepPlan plan;
    if (!preset.empty()) {
      plan = sweep_preset(preset);
    } else if (axis.empty() || !given("--values")) {
      throw ConfigError("sweep needs --preset or both --axis and --values");
    }
    gen.link = given("--link") ? gen.link : to_string(plan.base.f_kind);
    // Explicit generative flags override the preset's base configuration.
    const GenerativeConfig cli_cfg = gen.resolve();
    for (const char* name : {"--p", "--q", "--n", "--mu", "--sigma", "--sigma-mix", "--link", "--orthogonal-a",
                             "--seed"}) {
      if (!given(name) && !preset.empty()) continue;
      const std::string key = name;
      if (key == "--p") plan.base.p = cli_cfg.p;
      if (key == "--q") plan.base.q = cli_cfg.q;
      if (key == "--n") plan.base.n = cli_cfg.n;
      if (key == "--mu") plan.base.mu = cli_cfg.mu;
      if (key == "--sigma") plan.base.sigma = cli_cfg.sigma;
      if (key == "--sigma-mix") plan.base.sigma_mix = cli_cfg.sigma_mix;
      if (key == "--link") plan.base.f_kind = cli_cfg.f_kind;
      if (key == "--orthogonal-a") plan.base.orthogonal_a = cli_cfg.orthogonal_a;
      if (key == "--seed") plan.base.seed = cli_cfg.seed;
    }
    if (!axis.empty()) plan.axis = parse_sweep_axis(axis);
    if (given("--values")) {
      plan.values = parse_values(values);
      if (plan.values.empty()) throw ConfigError("--values is empty");
    }
    if (given("--pipelines")) {
      plan.specs.clear();
      std::stringstream ss(pipelines);
      std::string token;
      while (std::getline(ss, token, ',')) {
        if (!token.empty()) plan.specs.push_back(parse_spec_token(token));
      }
    } else if (preset.empty()) {
      plan.specs = sweep_preset("fig3-left").specs;
    }
    if (given("--folds") || preset.empty()) plan.folds = folds;
    if (given("--repeats") || preset.empty()) plan.repeats = repeats;
    if (jobs < 1) throw ConfigError("--jobs must be >= 1");
    plan.validate();

    const std::vector<SweepRow> rows = sweep(plan, jobs);
    auto csv = open_output(out);
    io::write_sweep_csv(csv, rows);

    // Mean MAE per (value, method), in plan order.
    std::size_t failed = 0;
    std::cout << to_string(plan.axis) << ",method,mean_mae,mean_y_std\n";
    for (double value : plan.values) {
      for (const auto& spec : plan.specs) {
        double mae = 0.0, ystd = 0.0;
        int count = 0;
        for (const auto& row : rows) {
          if (row.value != value || row.method != spec.name()) continue;
          if (!row.error.empty()) {
            ++failed;
            continue;
          }
          mae += row.mae;
          ystd += row.y_std;
          ++count;
        }
        std::cout << io::format_double(value) << ',' << spec.name() << ','
                  << (count ? io::format_double(mae / count) : std::string("nan")) << ','
                  << (count ? io::format_double(ystd / count) : std::string("nan")) << '\n';
      }
    }
    if (failed) std::cout << failed << " cell(s) failed; see the error column\n";
    return 0;
  }
};

struct Mean {
  std::string bundle_path;
  std::string metric = "geometric";
  int rank = 0;
  std::string out;

  void add_to(CLI::App& app) {
    app.add_option("--bundle", bundle_path, "Input COVB v1 file")->required();
    app.add_option("--metric", metric, "euclidean|geometric|wasserstein")->capture_default_str();
    app.add_option("--rank", rank, "Wasserstein rank (0: nominal rank)")->capture_default_str();
    app.add_option("--out", out, "Output SYMMAT v1 file")->required();
  }

  int run() {
    const EmbeddingKind kind = parse_embedding_kind(metric);
    if (kind == EmbeddingKind::LogDiag) throw ConfigError("--metric must be euclidean|geometric|wasserstein");
    const CovarianceBundle bundle = load_bundle(bundle_path);
    std::optional<MeanResult<double>> result;
    switch (kind) {
      case EmbeddingKind::Euclidean: result = MeanResult<double>{mean_euclidean(bundle.view()), 0, 0.0}; break;
      case EmbeddingKind::GeometricTangent: result = karcher_mean(bundle.view()); break;
      default: result = wasserstein_mean(bundle.view(), rank > 0 ? rank : bundle.nominal_rank); break;
    }
    auto file = open_output(out);
    io::write_symmat(file, result->mean);
    std::cout << metric << " mean of " << bundle.size() << " matrices: iterations=" << result->iterations
              << " gradient_norm=" << io::format_double(result->gradient_norm) << '\n';
    return 0;
  }
};

struct Embed {
  std::string bundle_path;
  std::string embedding = "geometric";
  int rank = 0;
  std::string out;

  void add_to(CLI::App& app) {
    app.add_option("--bundle", bundle_path, "Input COVB v1 file")->required();
    app.add_option("--embedding", embedding, "euclidean|geometric|wasserstein|logdiag")->capture_default_str();
    app.add_option("--rank", rank, "Wasserstein rank (0: nominal rank)")->capture_default_str();
    app.add_option("--out", out, "Features CSV")->required();
  }

  int run() {
    const EmbeddingKind kind = parse_embedding_kind(embedding);
    const CovarianceBundle bundle = load_bundle(bundle_path);
    const auto tangent = TangentEmbedding<double>::fit(kind, bundle.view(), rank > 0 ? rank : bundle.nominal_rank);
    const Eigen::MatrixXd features = tangent.transform(bundle.view());
    auto csv = open_output(out);
    io::write_features_csv(csv, features, bundle.labels);
    std::cout << embedding << " features: " << features.rows() << " x " << features.cols() << '\n';
    return 0;
  }
};

struct Witness {
  std::string out;

  void add_to(CLI::App& app) { app.add_option("--out", out, "Also write the table to this file"); }

  int run() {
    const auto w = no_affine_invariance_witness<double>();
    std::ostringstream table;
    table << "# d_W(A, B) = " << io::format_double(w.base_distance) << '\n';
    table << "epsilon,distance\n";
    for (std::size_t k = 0; k < w.epsilons.size(); ++k) {
      table << io::format_double(w.epsilons[k]) << ',' << io::format_double(w.distances[k]) << '\n';
    }
    std::cout << table.str();
    if (!out.empty()) {
      auto file = open_output(out);
      file << table.str();
    }
    return 0;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Regression on covariance matrices through Riemannian tangent-space embeddings", "covreg"};
  app.require_subcommand(1);
  app.footer("Every subcommand also accepts --config <file> with `key = value` lines; explicit flags override it.");
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  Simulate simulate;
  Evaluate fit;
  Evaluate eval;
  Predict predict_cmd;
  Sweep sweep_cmd;
  Mean mean_cmd;
  Embed embed;
  Witness witness;

  std::map<CLI::App*, std::function<int()>> runners;
  const auto add = [&](const char* name, const char* help, auto& cmd, auto&& setup) {
    CLI::App* sub = app.add_subcommand(name, help);
    setup(*sub);
    runners[sub] = [&cmd] { return cmd.run(); };
  };
  add("simulate", "Sample a synthetic covariance bundle", simulate, [&](CLI::App& s) { simulate.add_to(s); });
  add("fit", "Cross-validate a pipeline and fit it on the whole bundle", fit, [&](CLI::App& s) { fit.add_to(s, true); });
  add("eval", "Cross-validate a pipeline", eval, [&](CLI::App& s) { eval.add_to(s, false); });
  add("predict", "Apply a fitted model to a bundle", predict_cmd, [&](CLI::App& s) { predict_cmd.add_to(s); });
  add("sweep", "Run a simulation sweep", sweep_cmd, [&](CLI::App& s) { sweep_cmd.add_to(s); });
  add("mean", "Mean of a bundle under a metric", mean_cmd, [&](CLI::App& s) { mean_cmd.add_to(s); });
  add("embed", "Tangent-space features of a bundle", embed, [&](CLI::App& s) { embed.add_to(s); });
  add("witness", "Show that the Wasserstein distance is not affine invariant on rank-deficient matrices", witness,
      [&](CLI::App& s) { witness.add_to(s); });

  std::vector<std::string> args;
  try {
    std::vector<std::string> raw(argv + 1, argv + argc);
    if (!raw.empty() && raw.front().rfind("-", 0) != 0) {
      std::vector<std::string> tail(raw.begin() + 1, raw.end());
      args = cli::expand_config_args(tail);
      args.insert(args.begin(), raw.front());
    } else {
      args = raw;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  for (auto& [sub, run] : runners) {
    if (!sub->parsed()) continue;
    try {
      return run();
    } catch (const ConfigError& e) {
      std::cerr << "error: " << e.what() << '\n';
      return kExitConfig;
    } catch (const Error& e) {
      std::cerr << "error: " << e.what() << '\n';
      return e.is_usage_error() ? kExitConfig : kExitNumerical;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return kExitNumerical;
    }
  }
  return kExitConfig;
}
