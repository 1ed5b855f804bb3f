#include "dynslip/evolution.hpp"

#include <cmath>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <nlohmann/json.hpp>

#include "dynslip/quadrature.hpp"
#include "dynslip/spectral.hpp"

namespace dynslip {

TimeGrid::TimeGrid(double t_end_, int n_steps_) : t_end(t_end_), n_steps(n_steps_) {
  if (!(t_end_ > 0.0) || !std::isfinite(t_end_))
    throw InvalidArgument("TimeGrid: a finite positive horizon is required");
  if (n_steps_ < 2) throw InvalidArgument("TimeGrid: at least two steps are required");
}

Forcing zero_forcing(const OperatorBundle& b) {
  const Data z = b.zero_data();
  return [z](double) { return z; };
}

ImplicitStepper::ImplicitStepper(const OperatorBundle& b, double dt, double shift, ResolventOptions opts)
    : dt_(dt), solver_(b, cplx(1.0 / dt + shift), opts) {
  if (!(dt > 0.0)) throw InvalidArgument("ImplicitStepper: dt must be positive");
}

StepResult ImplicitStepper::step(const State& Un, const Data& F) const {
  Data rhs;
  rhs.f = Un.u / dt_ + F.f;
  rhs.h = BoundaryScalar(Un.ub.values / dt_ + F.h.values);
  auto sol = solver_.solve(rhs);
  return {sol.state(), std::move(sol.p)};
}

StepResult step_implicit(const OperatorBundle& b, const State& Un, const Data& F, double dt,
                         const ResolventOptions& opts) {
  return ImplicitStepper(b, dt, 0.0, opts).step(Un, F);
}

double lq_norm(const std::vector<double>& values, double dt, double q) {
  double s = 0.0;
  for (std::size_t n = 1; n < values.size(); ++n) s += dt * std::pow(values[n], q);
  return std::pow(s, 1.0 / q);
}

namespace {

void check_state(const OperatorBundle& b, const State& U) {
  if (U.u.size() != b.n_velocity() || U.ub.size() != b.n_boundary())
    throw InvalidArgument("initial state does not conform to the discrete spaces");
}

State difference(const State& a, const State& b, double scale) {
  return {(a.u - b.u) * scale, BoundaryScalar((a.ub.values - b.ub.values) * scale), false};
}

}  // namespace

EvolutionTrace evolve(const OperatorBundle& b, const State& U0, const Forcing& F, const TimeGrid& grid,
                      double q, const EvolutionOptions& opts) {
  check_state(b, U0);
  if (!(q > 1.0)) throw InvalidArgument("evolve: q must exceed 1");
  const TimeGrid g(grid.t_end, grid.n_steps);
  const double dt = g.dt();
  const ImplicitStepper stepper(b, dt, 0.0, opts.resolvent);
  const OperatorA A(b);

  EvolutionTrace tr;
  tr.grid = g;
  tr.q = q;
  auto record = [&](int n, const State& U, const CVec* p, const State* prev) {
    tr.t.push_back(g.t(n));
    tr.h_norm.push_back(h_norm(b, U));
    tr.dt_norm.push_back(prev ? x0_norm(b, difference(U, *prev, 1.0 / dt)) : 0.0);
    tr.AU_norm.push_back(x0_norm(b, A.apply(U)));
    tr.pressure_h1.push_back(p ? pressure_h1(b, *p) : 0.0);
    tr.F_norm.push_back(x0_norm(b, F(g.t(n))));
    if (opts.store_states) {
      tr.states.push_back(U);
      tr.pressures.push_back(p ? *p : CVec());
    }
  };

  record(0, U0, nullptr, nullptr);
  State U = U0;
  for (int n = 1; n <= g.n_steps; ++n) {
    auto res = stepper.step(U, F(g.t(n)));
    record(n, res.U, &res.p, &U);
    U = std::move(res.U);
  }
  if (stepper.solver().regime() == Regime::none) tr.flags.push_back("outside_known_regimes");
  if (opts.resolvent.estimate_condition &&
      !(stepper.solver().condition() < opts.resolvent.condition_threshold))
    tr.flags.push_back("ill_conditioned");

  tr.dt_lq = lq_norm(tr.dt_norm, dt, q);
  tr.AU_lq = lq_norm(tr.AU_norm, dt, q);
  tr.pressure_lq = lq_norm(tr.pressure_h1, dt, q);
  tr.F_lq = lq_norm(tr.F_norm, dt, q);
  for (std::size_t n = 0; n < tr.t.size(); ++n)
    if (!std::isfinite(tr.h_norm[n]) || !std::isfinite(tr.AU_norm[n])) {
      tr.flags.push_back("non_finite");
      break;
    }
  return tr;
}

void EvolutionTrace::write_csv(std::ostream& os) const {
  fmt::print(os, "step,t,h_norm,x0_dt_norm,AU_norm,pressure_H1\n");
  for (std::size_t n = 0; n < t.size(); ++n)
    fmt::print(os, "{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", n, t[n], h_norm[n], dt_norm[n], AU_norm[n],
               pressure_h1[n]);
}

std::string EvolutionTrace::summary_json(double interp) const {
  nlohmann::ordered_json j;
  j["q"] = q;
  j["t_end"] = grid.t_end;
  j["n_steps"] = grid.n_steps;
  j["dt_lq"] = dt_lq;
  j["AU_lq"] = AU_lq;
  j["pressure_lq"] = pressure_lq;
  j["F_lq"] = F_lq;
  j["interp_norm_u0"] = interp;
  const double den = F_lq + interp;
  j["max_reg_ratio"] = den > 0.0 ? (dt_lq + AU_lq) / den : 0.0;
  const DecayFit fit = fit_decay(*this);
  j["decay_omega"] = fit.omega;
  // Tail beyond the horizon, extrapolated with the fitted rate.
  if (fit.omega < 0.0 && !AU_norm.empty()) {
    const double tail = std::pow(AU_norm.back(), q) / (-q * fit.omega);
    j["AU_lq_tail_corrected"] = std::pow(std::pow(AU_lq, q) + tail, 1.0 / q);
  }
  j["flags"] = flags;
  return j.dump(2);
}

namespace {

/// Modal form of the reduced model (M_z ż = −K_z z + Zᵀ r): z = Z V y with
/// VᵀM_zV = I, ẏ = −μ y + VᵀZᵀ r.
struct ReducedModel {
  RMat ZV;
  RVec mu;
  const OperatorBundle* b;

  ReducedModel(const OperatorBundle& bundle, int max_dofs) : b(&bundle) {
    const auto& o = bundle.ops();
    if (o.n_velocity() > max_dofs)
      throw InvalidArgument(fmt::format("mild_solution_oracle: {} velocity dofs exceed the dense limit {}",
                                        o.n_velocity(), max_dofs));
    const RMat Z = divergence_free_basis(bundle, max_dofs);
    const RMat Mw = RMat(o.M + bundle.beta() * o.W);
    const RMat Kw = RMat(o.K + bundle.alpha() * o.W);
    RMat Mz = Z.transpose() * Mw * Z, Kz = Z.transpose() * Kw * Z;
    Mz = 0.5 * (Mz + Mz.transpose());
    Kz = 0.5 * (Kz + Kz.transpose());
    Eigen::GeneralizedSelfAdjointEigenSolver<RMat> ges(Kz, Mz);
    if (ges.info() != Eigen::Success) throw SolverError("mild_solution_oracle: eigensolver failed", {}, 0.0);
    mu = ges.eigenvalues();
    ZV = Z * ges.eigenvectors();
  }

  CVec project(const CVec& functional) const { return ZV.transpose().cast<cplx>() * functional; }
  CVec initial(const State& U0) const {
    const auto& o = b->ops();
    return project(o.M * U0.u + b->beta() * (o.T.transpose() * (o.Mb * U0.ub.values)));
  }
  State state(const CVec& y) const {
    CVec u = ZV.cast<cplx>() * y;
    return make_tied(*b, std::move(u));
  }
};

}  // namespace

State mild_solution_oracle(const OperatorBundle& b, const State& U0, const Forcing& F, double t_end,
                           const MildOptions& opts) {
  check_state(b, U0);
  if (!(t_end >= 0.0)) throw InvalidArgument("mild_solution_oracle: t_end must be nonnegative");
  if (t_end == 0.0) return U0;
  const ReducedModel rm(b, opts.max_dofs);
  const Eigen::Index n = rm.mu.size();
  CVec y(n);
  const CVec y0 = rm.initial(U0);
  for (Eigen::Index i = 0; i < n; ++i) y[i] = std::exp(-rm.mu[i] * t_end) * y0[i];

  // ∫₀ᵗ e^{−μ(t−s)} g(s) ds on panels [t − t 2^{-k}, t − t 2^{-k-1}], last panel ends at t.
  const auto& gl = quad::gauss_legendre(opts.gauss_points);
  for (int k = 0; k < opts.panels; ++k) {
    const double a = t_end - t_end * std::ldexp(1.0, -k);
    const double c = k + 1 == opts.panels ? t_end : t_end - t_end * std::ldexp(1.0, -k - 1);
    for (std::size_t j = 0; j < gl.x.size(); ++j) {
      const double s = a + (c - a) * gl.x[j];
      const CVec g = rm.project(b.rhs(F(s)));
      const double w = (c - a) * gl.w[j];
      for (Eigen::Index i = 0; i < n; ++i) y[i] += w * std::exp(-rm.mu[i] * (t_end - s)) * g[i];
    }
  }
  return rm.state(y);
}

State mild_solution_constant(const OperatorBundle& b, const State& U0, const Data& F, double t_end,
                             const MildOptions& opts) {
  check_state(b, U0);
  if (t_end == 0.0) return U0;
  const ReducedModel rm(b, opts.max_dofs);
  const CVec y0 = rm.initial(U0);
  const CVec g = rm.project(b.rhs(F));
  CVec y(y0.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double mu = rm.mu[i];
    const double e = std::exp(-mu * t_end);
    const double phi = std::abs(mu * t_end) < 1e-8 ? t_end : -std::expm1(-mu * t_end) / mu;
    y[i] = e * y0[i] + phi * g[i];
  }
  return rm.state(y);
}

double max_reg_ratio(const EvolutionTrace& trace, double interp) {
  const double den = trace.F_lq + interp;
  if (!(den > 0.0)) throw InvalidArgument("max_reg_ratio: undefined for zero data");
  return (trace.dt_lq + trace.AU_lq) / den;
}

double pressure_ratio(const EvolutionTrace& trace) {
  if (!(trace.F_lq > 0.0)) throw InvalidArgument("pressure_ratio: undefined for zero forcing");
  return trace.pressure_lq / trace.F_lq;
}

double interp_norm(const OperatorBundle& b, const State& U0, double q, InterpMethod method,
                   const InterpOptions& opts) {
  check_state(b, U0);
  if (!(q > 1.0)) throw InvalidArgument("interp_norm: q must exceed 1");
  const double base = x0_norm(b, U0);
  if (method == InterpMethod::semigroup) {
    const TimeGrid g(1.0, opts.n_steps);
    EvolutionOptions eo;
    eo.store_states = false;
    eo.resolvent.estimate_condition = false;
    // Homogeneous evolution; only ‖AU_n‖ is needed.
    const ImplicitStepper stepper(b, g.dt(), 0.0, eo.resolvent);
    const OperatorA A(b);
    const Data zero = b.zero_data();
    double s = 0.0;
    State U = U0;
    for (int n = 1; n <= g.n_steps; ++n) {
      U = stepper.step(U, zero).U;
      s += g.dt() * std::pow(x0_norm(b, A.apply(U)), q);
    }
    return base + std::pow(s, 1.0 / q);
  }

  // K-functional: K(t) = inf ‖U₀ − U₁‖ + t(‖U₁‖ + ‖AU₁‖) over tied divergence-free U₁,
  // with the minimizer taken from the squared (Hilbert) problem.
  const auto& o = b.ops();
  const RMat Z = divergence_free_basis(b, opts.max_dofs);
  const Eigen::Index nz = Z.cols();
  const OperatorA A(b);
  RMat AZu(o.n_velocity(), nz), AZb(o.n_boundary(), nz);
  for (Eigen::Index j = 0; j < nz; ++j) {
    const State a = A.apply(CVec(Z.col(j).cast<cplx>()));
    AZu.col(j) = a.u.real();
    AZb.col(j) = a.ub.values.real();
  }
  const RMat M = RMat(o.M);
  const RMat& Gh = o.gram_half;
  const RMat TZ = RMat(o.T) * Z;
  const RMat EJE = Z.transpose() * M * Z + TZ.transpose() * Gh * TZ;
  const RMat AJA = AZu.transpose() * M * AZu + AZb.transpose() * Gh * AZb;
  const CVec rhs = (Z.transpose() * M).cast<cplx>() * U0.u + (TZ.transpose() * Gh).cast<cplx>() * U0.ub.values;

  const double theta = 1.0 - 1.0 / q;
  std::vector<double> lt, vals;
  for (int i = 0; i < opts.n_t; ++i) {
    const double t = std::pow(10.0, -4.0 + 4.0 * i / (opts.n_t - 1));
    const RMat H = (1.0 + t * t) * EJE + t * t * AJA;
    const Eigen::LDLT<RMat> ldlt(H);
    CVec c(nz);
    c.real() = ldlt.solve(RVec(rhs.real()));
    c.imag() = ldlt.solve(RVec(rhs.imag()));
    const CVec u1 = Z.cast<cplx>() * c;
    const State U1 = make_tied(b, u1);
    const State AU1{AZu.cast<cplx>() * c, BoundaryScalar(AZb.cast<cplx>() * c), false};
    const double K = x0_norm(b, difference(U0, U1, 1.0)) + t * (x0_norm(b, U1) + x0_norm(b, AU1));
    lt.push_back(std::log(t));
    vals.push_back(std::pow(std::pow(t, -theta) * K, q));
  }
  double integral = 0.0;
  for (std::size_t i = 1; i < lt.size(); ++i) integral += 0.5 * (lt[i] - lt[i - 1]) * (vals[i] + vals[i - 1]);
  return base + std::pow(integral, 1.0 / q);
}

std::vector<double> weak_solution_residuals(const OperatorBundle& b, const EvolutionTrace& trace,
                                            const Forcing& F) {
  if (trace.states.size() != trace.t.size())
    throw InvalidArgument("weak_solution_residual: trace has no stored states");
  const auto& o = b.ops();
  const double dt = trace.grid.dt();
  const SpMat Kw = o.K + b.alpha() * o.W;
  std::vector<double> out(trace.states.size(), 0.0);
  for (std::size_t n = 1; n < trace.states.size(); ++n) {
    const State& U = trace.states[n];
    const State& P = trace.states[n - 1];
    const CVec time = (o.M * (U.u - P.u) + b.beta() * (o.T.transpose() * (o.Mb * (U.ub.values - P.ub.values)))) / dt;
    const CVec visc = Kw * U.u;
    const CVec pres = o.B.transpose() * trace.pressures[n];
    const CVec load = b.rhs(F(trace.t[n]));
    const CVec r = time + visc - pres - load;
    const double scale = time.norm() + visc.norm() + pres.norm() + load.norm();
    double rel = scale > 0.0 ? r.norm() / scale : r.norm();
    // the boundary component of a stored state must be the trace of its velocity
    const double tie = (U.ub.values - o.T * U.u).norm() / std::max(U.ub.values.norm(), 1e-300);
    rel = std::max({rel, divergence_residual(b, U.u), U.ub.values.norm() > 0.0 ? tie : 0.0});
    out[n] = rel;
  }
  return out;
}

double weak_solution_residual(const OperatorBundle& b, const EvolutionTrace& trace, const Forcing& F) {
  const auto r = weak_solution_residuals(b, trace, F);
  return r.empty() ? 0.0 : *std::max_element(r.begin(), r.end());
}

DecayFit fit_decay(const EvolutionTrace& trace, double tail_fraction) {
  DecayFit fit;
  const std::size_t n = trace.h_norm.size();
  if (n < 3 || !(trace.h_norm[0] > 0.0)) return fit;
  const std::size_t start = std::min(n - 2, static_cast<std::size_t>((1.0 - tail_fraction) * (n - 1)));
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (std::size_t i = start; i < n; ++i) {
    if (!(trace.h_norm[i] > 0.0)) continue;
    const double x = trace.t[i], y = std::log(trace.h_norm[i]);
    sx += x; sy += y; sxx += x * x; sxy += x * y;
    ++m;
  }
  if (m < 2) return fit;
  const double det = m * sxx - sx * sx;
  fit.omega = (m * sxy - sx * sy) / det;
  fit.C = std::exp((sy - fit.omega * sx) / m) / trace.h_norm[0];
  return fit;
}

double shift_trick_discrepancy(const OperatorBundle& b, const State& U0, const Forcing& F,
                               const TimeGrid& grid, double lambda0) {
  check_state(b, U0);
  const TimeGrid g(grid.t_end, grid.n_steps);
  ResolventOptions ro;
  ro.estimate_condition = false;
  const ImplicitStepper plain(b, g.dt(), 0.0, ro);
  const ImplicitStepper shifted(b, g.dt(), lambda0, ro);
  State U = U0, V = U0;
  double diff = 0.0, scale = x0_norm(b, U0);
  for (int n = 1; n <= g.n_steps; ++n) {
    const Data Fn = F(g.t(n));
    U = plain.step(U, Fn).U;
    Data Ft;
    Ft.f = Fn.f + lambda0 * U.u;
    Ft.h = BoundaryScalar(Fn.h.values + lambda0 * U.ub.values);
    V = shifted.step(V, Ft).U;
    diff = std::max(diff, x0_norm(b, difference(U, V, 1.0)));
    scale = std::max(scale, x0_norm(b, U));
  }
  return scale > 0.0 ? diff / scale : diff;
}

}  // namespace dynslip
