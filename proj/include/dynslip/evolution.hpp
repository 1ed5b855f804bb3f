#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "dynslip/resolvent.hpp"

namespace dynslip {

struct TimeGrid {
  double t_end = 1.0;
  int n_steps = 10;

  TimeGrid() = default;
  TimeGrid(double t_end, int n_steps);
  double dt() const { return t_end / n_steps; }
  double t(int n) const { return t_end * n / n_steps; }
};

/// Forcing F(t) = (f(t), h(t)).
using Forcing = std::function<Data(double)>;
Forcing zero_forcing(const OperatorBundle& b);

struct StepResult {
  State U;
  CVec p;
};

/// Backward Euler with a fixed step: one factorization at λ = 1/dt + shift,
/// reused for every step. With shift λ₀ it integrates ∂ₜU = (A − λ₀)U + F.
class ImplicitStepper {
 public:
  ImplicitStepper(const OperatorBundle& b, double dt, double shift = 0.0, ResolventOptions opts = {});

  double dt() const { return dt_; }
  const ResolventSolver& solver() const { return solver_; }
  /// (1/dt + shift − A) U_{n+1} = U_n/dt + F_{n+1}
  StepResult step(const State& Un, const Data& F) const;

 private:
  double dt_;
  ResolventSolver solver_;
};

StepResult step_implicit(const OperatorBundle& b, const State& Un, const Data& F, double dt,
                         const ResolventOptions& opts = {});

struct EvolutionOptions {
  bool store_states = true;
  ResolventOptions resolvent;
};

struct EvolutionTrace {
  TimeGrid grid;
  double q = 2.0;
  std::vector<double> t;
  std::vector<State> states;     // U_0..U_N (empty if not stored)
  std::vector<CVec> pressures;   // π_1..π_N at index 1..N (index 0 empty)
  std::vector<double> h_norm;
  std::vector<double> dt_norm;   // ‖(U_n − U_{n−1})/dt‖_{X₀}, 0 at n = 0
  std::vector<double> AU_norm;   // ‖A U_n‖_{X₀}
  std::vector<double> pressure_h1;
  std::vector<double> F_norm;    // ‖F(t_n)‖_{X₀}
  std::vector<std::string> flags;

  // L^q(I) norms by rectangle rule over steps 1..N
  double dt_lq = 0.0;
  double AU_lq = 0.0;
  double pressure_lq = 0.0;
  double F_lq = 0.0;

  void write_csv(std::ostream& os) const;
  std::string summary_json(double interp_norm = 0.0) const;
};

/// Rectangle-rule L^q norm over samples 1..N.
double lq_norm(const std::vector<double>& values, double dt, double q);

EvolutionTrace evolve(const OperatorBundle& b, const State& U0, const Forcing& F, const TimeGrid& grid,
                      double q, const EvolutionOptions& opts = {});

struct MildOptions {
  int max_dofs = 400;
  int panels = 48;         // geometrically graded toward s = t
  int gauss_points = 10;   // per panel
};

/// Dense variation-of-constants solution U(t) = T(t)U₀ + ∫₀ᵗ T(t−s)F(s) ds of the
/// divergence-free reduced model, at t = t_end.
State mild_solution_oracle(const OperatorBundle& b, const State& U0, const Forcing& F, double t_end,
                           const MildOptions& opts = {});
/// Closed form for time-independent F: T(t)U₀ + (T(t) − I)A⁻¹F.
State mild_solution_constant(const OperatorBundle& b, const State& U0, const Data& F, double t_end,
                             const MildOptions& opts = {});

double max_reg_ratio(const EvolutionTrace& trace, double interp_norm_u0);
/// ‖π‖_{L^q(I,H¹)} / ‖F‖_{L^q(I,X₀)}
double pressure_ratio(const EvolutionTrace& trace);

enum class InterpMethod { semigroup, k_functional };

struct InterpOptions {
  int n_steps = 200;  // semigroup method, on (0, 1)
  int n_t = 24;       // K-functional sample points on [1e-4, 1]
  int max_dofs = 1500;
};

double interp_norm(const OperatorBundle& b, const State& U0, double q, InterpMethod method,
                   const InterpOptions& opts = {});

/// Max over steps of the relative residual of the Galerkin weak form with
/// backward-difference time derivative. Requires stored states.
double weak_solution_residual(const OperatorBundle& b, const EvolutionTrace& trace, const Forcing& F);
/// Per-step residuals (index 0 is 0).
std::vector<double> weak_solution_residuals(const OperatorBundle& b, const EvolutionTrace& trace,
                                            const Forcing& F);

struct DecayFit {
  double omega = 0.0;  // fitted rate in h_norm ~ C e^{ωt}
  double C = 0.0;      // relative to h_norm(U₀)
};
/// Least squares fit of log h_norm over the last `tail_fraction` of the steps.
DecayFit fit_decay(const EvolutionTrace& trace, double tail_fraction = 0.5);

/// Evolve (A, F) and (A − λ₀, F + λ₀U) and return max_n ‖U_n − V_n‖_{X₀} / max_n ‖U_n‖_{X₀}.
double shift_trick_discrepancy(const OperatorBundle& b, const State& U0, const Forcing& F,
                               const TimeGrid& grid, double lambda0);

}  // namespace dynslip
