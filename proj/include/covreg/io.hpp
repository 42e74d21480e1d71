#pragma once

// Plain-text file formats. All writers emit doubles with 17 significant
// digits so values round-trip exactly.
//
//   COVB v1 N P R          covariance bundle; per subject a `y <label>` line
//                          followed by P rows of P values
//   LEADFIELD v1 P Q       P rows of Q values
//   SYMMAT v1 P            P rows of P values
//   MODEL v1               fitted pipeline (see write_model)
//   results CSV            method,filter,embedding,rank,fold,lambda,mae,seed

#include <Eigen/Dense>

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "covreg/bundle.hpp"
#include "covreg/filters.hpp"
#include "covreg/regress.hpp"
#include "covreg/simgen.hpp"

namespace covreg::io {

[[nodiscard]] std::string format_double(double x);

void write_covb(std::ostream& out, const CovarianceBundle& bundle);
/// Matrices are symmetrized on load.
[[nodiscard]] CovarianceBundle read_covb(std::istream& in, const std::string& provenance = "stream");

void write_leadfield(std::ostream& out, const Leadfield& lead);
[[nodiscard]] Leadfield read_leadfield(std::istream& in);

void write_symmat(std::ostream& out, const SymMatd& m);
[[nodiscard]] SymMatd read_symmat(std::istream& in);

void write_model(std::ostream& out, const FittedPipeline& model);
[[nodiscard]] FittedPipeline read_model(std::istream& in);

/// One row per fold; `rank` is the filter output rank.
void write_cv_csv(std::ostream& out, const PipelineSpec& spec, int rank, const CVReport& report,
                  bool header = true);
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

/// Features as CSV: f0..f{K-1},y.
void write_features_csv(std::ostream& out, const Eigen::MatrixXd& features, const Eigen::VectorXd& labels);

// File-path conveniences; they throw Error(Format) when the file cannot be
// opened.
[[nodiscard]] CovarianceBundle load_covb(const std::filesystem::path& path);
void save_covb(const std::filesystem::path& path, const CovarianceBundle& bundle);
[[nodiscard]] Leadfield load_leadfield(const std::filesystem::path& path);
[[nodiscard]] FittedPipeline load_model(const std::filesystem::path& path);
void save_model(const std::filesystem::path& path, const FittedPipeline& model);

}  // namespace covreg::io
