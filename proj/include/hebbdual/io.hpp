#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hebbdual/datagen.hpp"
#include "hebbdual/linalg.hpp"

namespace hebbdual {

// Serialized artifacts.  JSON is emitted with sorted keys and shortest
// round-trip doubles, so identical in-memory values always produce identical
// bytes; CSV rows use CRLF line endings.

struct EpochMetrics {
  int epoch = 0;
  std::optional<double> primal_objective;
  std::optional<double> dual_objective;
  std::optional<double> duality_gap;
  std::optional<double> mean_update_norm;
  std::optional<double> update_density;
  std::optional<double> train_error;
  std::optional<double> subspace_error;
};

struct RunHyper {
  int epochs = 0;
  double eta = 0.0;
  std::string schedule = "constant";  // "constant" | "inverse-time"
  double decay = 0.0;
  std::uint64_t seed = 0;  // learner-side seed (filter init)
  std::optional<double> lambda;
  std::optional<double> lambda_eff;
  std::optional<double> kappa;
  std::optional<double> mu_scale;
  std::optional<double> eta_m;
  std::optional<std::size_t> m;
};

struct Verification {
  std::optional<double> oracle_distance;
  std::optional<double> span_residual;
  std::optional<double> subspace_error;
  std::optional<double> fixed_point_residuals;
};

struct RunReport {
  std::string model;  // "ridge" | "svm" | "logistic" | "expgrad" | "sm"
  RunHyper hyper;
  DatasetMeta dataset_meta;
  std::string tool_version;
  std::vector<EpochMetrics> epochs;
  std::optional<Vec> final_w;
  std::optional<Mat> final_W;
  std::optional<Mat> final_M;
  std::optional<Vec> dual_snapshot;  // final-epoch settled activities
  Verification verification;
};

std::string dataset_to_json(const Dataset& d);
Dataset dataset_from_json(const std::string& text);

std::string report_to_json(const RunReport& r);
RunReport report_from_json(const std::string& text);

// epoch,primal_objective,dual_objective,duality_gap,mean_update_norm,
// update_density,train_error -- blank cells for absent values.
std::string report_to_csv(const RunReport& r);

std::string read_file(const std::filesystem::path& path);
// Writes to a sibling temp file then renames, so readers never observe a
// partial artifact.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

// Shortest round-trip decimal form of a double (to_chars).
std::string format_double(double v);

}  // namespace hebbdual
