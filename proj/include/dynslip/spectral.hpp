#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "dynslip/resolvent.hpp"

namespace dynslip {

/// Inner-product data for X₀ = L²_σ ⊕ H^{1/2}(∂Ω). Operator norms use the
/// Hilbert form ‖(f,h)‖² = ‖f‖²_{L²} + ‖h‖²_{H^{1/2}}, which is within √2 of the
/// sum norm.
class X0Geometry {
 public:
  explicit X0Geometry(const OperatorBundle& b);

  const OperatorBundle& bundle() const { return bundle_; }
  const LerayProjector& leray() const { return leray_; }
  /// H^{1/2} Gram matrix on boundary coefficients and its inverse action.
  const RMat& gram() const { return bundle_.ops().gram_half; }
  CVec gram_solve(const CVec& x) const;

 private:
  OperatorBundle bundle_;
  LerayProjector leray_;
  Eigen::LLT<RMat> gram_llt_;
};

struct NormEstimateOptions {
  int n_probes = 3;
  int krylov_steps = 20;
  std::uint64_t seed = 1;
};

/// Lower bound on ‖(λ − A_h)^{-1}‖ in X₀: Lanczos on R*R (adjoint w.r.t. the X₀
/// inner products) from seeded random starts; the maximum over probes is
/// returned, so the value never decreases when n_probes grows.
double resolvent_norm_estimate(const ResolventSolver& R, const X0Geometry& g,
                               const NormEstimateOptions& opts = {});
double resolvent_norm_estimate(const OperatorBundle& b, cplx lambda,
                               const NormEstimateOptions& opts = {});

/// Exact discrete operator norm by dense SVD on a divergence-free basis.
/// Only for coarse bundles (velocity dofs ≤ max_dofs).
double resolvent_norm_dense(const OperatorBundle& b, cplx lambda, int max_dofs = 1500);

/// Orthonormal (Euclidean) basis of {u : B u ∈ span(m)}.
RMat divergence_free_basis(const OperatorBundle& b, int max_dofs = 1500);

struct SectorRecord {
  cplx lambda;
  double norm = 0.0;        // resolvent norm estimate
  double ratio = 0.0;       // |λ − ω|·norm
  double condition = 0.0;
  std::string flag;         // empty, "ill_conditioned", "outside_known_regimes", "failed: ..."
};

struct SectorReport {
  double theta = 0.0;
  double omega = 0.0;
  std::string method;
  std::vector<SectorRecord> records;

  /// max ratio over records that did not fail; 0 for an empty report.
  double c_sector() const;
  bool any_flagged() const;
  void write_csv(std::ostream& os) const;
  std::string summary_json() const;
};

/// λ = ω + ρ e^{iφ} for each angle and n_per_ray log-spaced ρ in [rho_min, rho_max].
std::vector<cplx> sector_grid(double omega, const std::vector<double>& angles, double rho_min,
                              double rho_max, int n_per_ray);
/// Angles {0, ±π/4, ±π/2, ±0.55π}.
std::vector<double> default_sector_angles();
/// ω = max(1, −4α)/β
double sector_shift(double alpha, double beta);

SectorReport sector_sweep(const OperatorBundle& b, double theta, double omega,
                          const std::vector<cplx>& grid, const NormEstimateOptions& opts = {},
                          const ResolventOptions& ropts = {}, int threads = 1);

struct KornReport {
  std::string domain;
  double h = 0.0;
  double q1 = 0.0;  // min uᵀKu / uᵀGu
  double q2 = 0.0;  // min uᵀKu / (Tu)ᵀM_b(Tu)
  double alpha0 = 0.0;
  int iterations = 0;

  std::string to_json() const;
};

KornReport korn_constants(const OperatorBundle& b);

}  // namespace dynslip
