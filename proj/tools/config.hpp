#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dynslip/geometry.hpp"

namespace dynslip::cli {

enum class Study { resolvent, sweep, korn, evolve, maxreg, convergence, interp };

std::string to_string(Study s);
std::optional<Study> parse_study(const std::string& s);

/// Raised with every violated field, one per line.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

struct ExperimentConfig {
  Study study = Study::resolvent;
  std::vector<DomainSpec> domains{DomainSpec::disk(1.0)};
  double alpha = 1.0;
  double beta = 1.0;
  std::optional<double> alpha_fraction_of_alpha0;  // α = fraction·α₀ (α₀ from the Korn study)

  std::vector<double> h_levels{0.1};  // single h or refinement ladder (coarse to fine)

  // resolvent
  std::optional<std::vector<cplx>> lambdas;  // sweep: explicit grid instead of rays
  std::string data = "rigid_rotation";  // rigid_rotation | stream | random
  // sweep
  std::optional<double> omega;          // default max(1, −4α)/β
  double theta = 0.56 * kPi;
  std::optional<std::vector<double>> angles;  // radians; default {0, ±π/4, ±π/2, ±0.55π}
  double rho_min = 0.1, rho_max = 1e4;
  int n_per_ray = 9;
  int n_probes = 3;
  int krylov_steps = 20;
  // time
  double t_end = 1.0;
  std::vector<int> n_steps{20};         // one per level
  std::vector<double> q{2.0};
  int ensemble = 10;
  std::string initial = "zero";         // zero | random | rigid_rotation
  std::string forcing = "random";       // zero | random | manufactured_decay
  // convergence
  std::string target = "resolvent";     // resolvent | evolve

  std::uint64_t seed = 1;
  int threads = 1;
  std::string output_dir = "out";
};

/// Domain strings as produced by DomainSpec::id(): disk(R), ellipse(a,b),
/// fourier(r0;c=c1,c2;s=s1,s2).
DomainSpec parse_domain(const std::string& s);
cplx parse_complex(const std::string& s);

/// INI file: [study] name, domain(s), alpha, beta, alpha_fraction_of_alpha0;
/// [mesh] h or ladder; [lambda] resolvent values and sweep grid; [time]; [run] seed,
/// threads, output.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& text);
/// Checks cross-field constraints; throws ConfigError listing all problems.
void validate(const ExperimentConfig& c);

}  // namespace dynslip::cli
