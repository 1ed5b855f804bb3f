#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dynslip/saddle.hpp"
#include "dynslip/spaces.hpp"

namespace dynslip {

/// Parameter regimes in which the resolvent problem is known to be uniquely solvable.
enum class Regime {
  none = 0,
  large_real_part = 1,  // β Re λ ≥ max(1, −4α)
  positive_alpha = 2,   // α > 0, Re λ ≥ 0, λ ≠ 0
  korn = 3,             // α ∈ (α₀, 0], non-axisymmetric domain, Re λ ≥ 0, λ ≠ 0
};

std::string to_string(Regime r);

/// `alpha0` is the Korn threshold; without it regime 3 cannot be certified.
Regime classify(const OperatorBundle& b, cplx lambda, std::optional<double> alpha0 = std::nullopt);

struct ResolventOptions {
  std::optional<double> alpha0;
  bool estimate_condition = true;
  double condition_threshold = 1e13;
};

struct ResolventDiagnostics {
  double u_l2 = 0.0;
  double ub_l2 = 0.0;
  double ub_h12 = 0.0;
  double p_h1 = 0.0;
  double residual = 0.0;        // relative residual of the full saddle system
  double divergence = 0.0;      // divergence_residual(u)
  double pressure_mean = 0.0;   // |∫π| / ‖π‖
  double condition = 0.0;       // 0 when not estimated
};

struct ResolventSolution {
  CVec u;
  BoundaryScalar ub;
  CVec p;
  cplx multiplier;
  cplx lambda;
  Regime regime = Regime::none;
  std::vector<std::string> flags;
  ResolventDiagnostics diag;

  bool flagged() const { return !flags.empty(); }
  State state() const { return {u, ub, true}; }
};

/// Factorization of the resolvent saddle system at one λ:
///   A_λ = λ(M + βW) + K + αW.
/// Immutable and shareable across threads once built.
class ResolventSolver {
 public:
  ResolventSolver(const OperatorBundle& b, cplx lambda, ResolventOptions opts = {});

  const OperatorBundle& bundle() const { return bundle_; }
  cplx lambda() const { return lambda_; }
  Regime regime() const { return regime_; }
  double condition() const { return fact_->condition_estimate(); }
  const SaddleFactorization& factorization() const { return *fact_; }
  const CSpMat& velocity_block() const { return A_; }

  ResolventSolution solve(const Data& F) const;
  /// Solve with an arbitrary velocity right-hand side (already tested against φ).
  ResolventSolution solve_rhs(const CVec& rhs_u) const;

 private:
  OperatorBundle bundle_;
  cplx lambda_;
  ResolventOptions opts_;
  Regime regime_;
  CSpMat A_;
  std::shared_ptr<const SaddleFactorization> fact_;
};

ResolventSolution solve_resolvent(const OperatorBundle& b, cplx lambda, const Data& F,
                                  const ResolventOptions& opts = {});

/// Discrete generator. The interior part is the Stokes projection of the
/// viscous term, the boundary part −(1/β)(σ + α T u) where σ is the L²(∂Ω)
/// projection of (2Du ν)_τ.
class OperatorA {
 public:
  explicit OperatorA(const OperatorBundle& b);

  State apply(const CVec& u) const;
  State apply(const State& U) const { return apply(U.u); }
  /// L²(∂Ω) projection of the normal stress (2Du ν)_τ.
  BoundaryScalar boundary_flux(const CVec& u) const;
  /// Divergence-free z with (z, φ)_M = functional·φ for all divergence-free φ.
  CVec riesz(const CVec& functional) const;
  const OperatorBundle& bundle() const { return bundle_; }

 private:
  OperatorBundle bundle_;
  std::shared_ptr<const SaddleFactorization> mass_;
  std::shared_ptr<const Eigen::SimplicialLDLT<SpMat>> mb_;
};

State apply_A(const OperatorBundle& b, const CVec& u);

/// |λ|(‖u‖ + β‖u_b‖_{L²(∂Ω)}) / (‖f‖ + β‖h‖_{L²(∂Ω)})
double apriori_ratio(const OperatorBundle& b, const ResolventSolution& sol, const Data& F);

/// (‖u_b‖_{H^{3/2}} + ‖u‖ + ‖(AU)_u‖ + ‖π‖_{H¹}) / ‖F‖_{X₀}
double elliptic_regularity_ratio(const OperatorBundle& b, const ResolventSolution& sol,
                                 const Data& F);
double elliptic_regularity_ratio(const OperatorA& A, const ResolventSolution& sol, const Data& F);

/// H-weighted weak identity (λU − AU − F, Φ)_H over discretely divergence-free Φ,
/// relative to ‖F‖ in the same dual norm. Uses the H inner product
/// (u,φ) + β(u_b,φ_b), the one in which A is defined.
double weak_identity_residual(const OperatorA& A, cplx lambda, const State& U, const Data& F);

/// Per-node CSV: node,x,y,ux_re,ux_im,uy_re,uy_im,p_re,p_im (p empty at edge nodes),
/// followed by a second table of boundary Fourier coefficients.
void write_solution_csv(std::ostream& os, const OperatorBundle& b, const ResolventSolution& sol);
std::string diagnostics_json(const ResolventSolution& sol);

}  // namespace dynslip
