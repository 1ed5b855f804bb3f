#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "config.hpp"
#include "dynslip/spaces.hpp"

namespace dynslip::cli {

enum ExitCode { kSuccess = 0, kFailure = 1, kFlagged = 2 };

struct ConvergenceRow {
  int level = 0;
  double h = 0.0;
  double dt = 0.0;
  double error = 0.0;      // primary error (relative)
  double secondary = 0.0;  // pressure error (resolvent) or final-time error (evolve)
};

struct ConvergenceTable {
  std::string target;
  std::string parameter;  // "h" or "dt"
  std::vector<ConvergenceRow> rows;
  std::vector<double> orders;  // between successive levels
  double fitted_order = 0.0;   // least squares slope of log error against log parameter

  void write_csv(std::ostream& os) const;
  std::string to_json() const;
};

/// Requires a ladder of at least three levels (mesh sizes for the resolvent
/// target, step counts for the evolve target).
ConvergenceTable convergence_study(const ExperimentConfig& cfg);

/// Output bookkeeping for one run: files written, their hashes, mesh cache.
class RunContext {
 public:
  explicit RunContext(ExperimentConfig cfg);

  const ExperimentConfig& config() const { return cfg_; }
  void write(const std::string& name, const std::string& content);
  /// Mesh from the cache under <out>/meshes, generated on a miss.
  std::shared_ptr<const Mesh> mesh(const DomainSpec& spec, double h);
  void flag(const std::string& what) { flags_.push_back(what); }
  const std::vector<std::string>& flags() const { return flags_; }
  void write_manifest();

 private:
  ExperimentConfig cfg_;
  std::filesystem::path out_;
  std::map<std::string, std::string> files_;   // name -> sha256
  std::map<std::string, std::string> meshes_;  // key -> sha256
  std::vector<std::string> flags_;
};

/// Runs the configured study and writes reports plus manifest.json.
/// Returns kSuccess or kFlagged; throws on failure.
int run(const ExperimentConfig& cfg);

std::string sha256_hex(const std::string& data);
/// Stable textual form of the configuration (hashed into the manifest).
std::string canonical_config(const ExperimentConfig& cfg);

}  // namespace dynslip::cli
