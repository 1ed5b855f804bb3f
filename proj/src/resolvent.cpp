#include "dynslip/resolvent.hpp"

#include <cmath>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <nlohmann/json.hpp>

namespace dynslip {

std::string to_string(Regime r) {
  switch (r) {
    case Regime::large_real_part: return "large_real_part";
    case Regime::positive_alpha: return "positive_alpha";
    case Regime::korn: return "korn";
    default: return "none";
  }
}

Regime classify(const OperatorBundle& b, cplx lambda, std::optional<double> alpha0) {
  const double a = b.alpha(), be = b.beta();
  if (be * lambda.real() >= std::max(1.0, -4.0 * a)) return Regime::large_real_part;
  const bool right = lambda.real() >= 0.0 && lambda != cplx(0.0);
  if (a > 0.0 && right) return Regime::positive_alpha;
  if (alpha0 && a <= 0.0 && a > *alpha0 && !b.ops().axisymmetric && right) return Regime::korn;
  return Regime::none;
}

ResolventSolver::ResolventSolver(const OperatorBundle& b, cplx lambda, ResolventOptions opts)
    : bundle_(b), lambda_(lambda), opts_(opts), regime_(classify(b, lambda, opts.alpha0)) {
  const auto& o = b.ops();
  const SpMat mw = o.M + b.beta() * o.W;
  const SpMat kw = o.K + b.alpha() * o.W;
  A_ = lambda * mw.cast<cplx>() + kw.cast<cplx>();
  try {
    fact_ = std::make_shared<SaddleFactorization>(A_, o.B, o.pressure.mean);
  } catch (const SolverError& e) {
    throw SolverError(fmt::format("resolvent system singular at lambda = {}{:+}i: {}", lambda.real(),
                                  lambda.imag(), e.what()),
                      lambda, e.condition());
  }
}

ResolventSolution ResolventSolver::solve(const Data& F) const {
  return solve_rhs(bundle_.rhs(F));
}

ResolventSolution ResolventSolver::solve_rhs(const CVec& rhs_u) const {
  const auto& b = bundle_;
  const auto& o = b.ops();
  if (rhs_u.size() != o.n_velocity()) throw InvalidArgument("resolvent: rhs size mismatch");
  ResolventSolution sol;
  sol.lambda = lambda_;
  sol.regime = regime_;

  CVec full = CVec::Zero(fact_->size());
  full.head(o.n_velocity()) = rhs_u;
  const CVec x = fact_->solve_full(full);
  sol.u = x.head(o.n_velocity());
  sol.p = x.segment(o.n_velocity(), o.n_pressure());
  sol.multiplier = x[x.size() - 1];
  sol.ub = tangential_trace(b, sol.u);

  auto& d = sol.diag;
  d.u_l2 = velocity_l2(b, sol.u);
  d.ub_l2 = boundary_l2(b, sol.ub);
  d.ub_h12 = boundary_sobolev_norm(b, sol.ub, 0.5);
  d.p_h1 = pressure_h1(b, sol.p);
  const double bn = full.norm();
  d.residual = bn > 0.0 ? (fact_->apply_full(x) - full).norm() / bn : (fact_->apply_full(x)).norm();
  d.divergence = divergence_residual(b, sol.u);
  const double pl2 = pressure_l2(b, sol.p);
  d.pressure_mean = pl2 > 0.0 ? std::abs(o.pressure.mean.cast<cplx>().dot(sol.p)) / pl2 : 0.0;

  if (regime_ == Regime::none) sol.flags.push_back("outside_known_regimes");
  if (opts_.estimate_condition) {
    d.condition = fact_->condition_estimate();
    if (!(d.condition < opts_.condition_threshold)) sol.flags.push_back("ill_conditioned");
  }
  if (!std::isfinite(d.u_l2)) sol.flags.push_back("non_finite");
  return sol;
}

ResolventSolution solve_resolvent(const OperatorBundle& b, cplx lambda, const Data& F,
                                  const ResolventOptions& opts) {
  return ResolventSolver(b, lambda, opts).solve(F);
}

OperatorA::OperatorA(const OperatorBundle& b)
    : bundle_(b),
      mass_(std::make_shared<SaddleFactorization>(b.ops().M.cast<cplx>(), b.ops().B,
                                                  b.ops().pressure.mean)),
      mb_(std::make_shared<Eigen::SimplicialLDLT<SpMat>>(b.ops().Mb)) {
  if (mb_->info() != Eigen::Success) throw SolverError("boundary mass factorization failed", {}, 0.0);
}

BoundaryScalar OperatorA::boundary_flux(const CVec& u) const {
  const auto& o = bundle_.ops();
  const CVec r = o.Flux * u;
  CVec s(r.size());
  s.real() = mb_->solve(RVec(r.real()));
  s.imag() = mb_->solve(RVec(r.imag()));
  return BoundaryScalar(std::move(s));
}

State OperatorA::apply(const CVec& u) const {
  const auto& o = bundle_.ops();
  if (u.size() != o.n_velocity()) throw InvalidArgument("apply_A: dimension mismatch");
  const BoundaryScalar sigma = boundary_flux(u);
  const CVec rhs = -(o.K * u) + o.T.transpose() * (o.Mb * sigma.values);
  State out;
  out.u = mass_->solve(rhs).u;
  out.ub = BoundaryScalar(-(sigma.values + bundle_.alpha() * (o.T * u)) / bundle_.beta());
  out.tied = false;
  return out;
}

CVec OperatorA::riesz(const CVec& functional) const { return mass_->solve(functional).u; }

State apply_A(const OperatorBundle& b, const CVec& u) { return OperatorA(b).apply(u); }

double apriori_ratio(const OperatorBundle& b, const ResolventSolution& sol, const Data& F) {
  const double den = velocity_l2(b, F.f) + b.beta() * boundary_l2(b, F.h);
  if (!(den > 0.0)) throw InvalidArgument("apriori_ratio: undefined for zero data");
  return std::abs(sol.lambda) * (velocity_l2(b, sol.u) + b.beta() * boundary_l2(b, sol.ub)) / den;
}

double elliptic_regularity_ratio(const OperatorA& A, const ResolventSolution& sol, const Data& F) {
  const auto& b = A.bundle();
  const double den = x0_norm(b, F);
  if (!(den > 0.0)) throw InvalidArgument("elliptic_regularity_ratio: undefined for zero data");
  const State AU = A.apply(sol.u);
  const double num = boundary_sobolev_norm(b, sol.ub, 1.5) + velocity_l2(b, sol.u) +
                     velocity_l2(b, AU.u) + pressure_h1(b, sol.p);
  return num / den;
}

double elliptic_regularity_ratio(const OperatorBundle& b, const ResolventSolution& sol,
                                 const Data& F) {
  return elliptic_regularity_ratio(OperatorA(b), sol, F);
}

double weak_identity_residual(const OperatorA& A, cplx lambda, const State& U, const Data& F) {
  const auto& b = A.bundle();
  const auto& o = b.ops();
  const State AU = A.apply(U.u);
  const CVec ru = lambda * U.u - AU.u - F.f;
  const CVec rb = lambda * U.ub.values - AU.ub.values - F.h.values;
  const CVec res = o.M * ru + b.beta() * (o.T.transpose() * (o.Mb * rb));
  const double den = velocity_l2(b, A.riesz(b.rhs(F)));
  const double num = velocity_l2(b, A.riesz(res));
  return den > 0.0 ? num / den : num;
}

void write_solution_csv(std::ostream& os, const OperatorBundle& b, const ResolventSolution& sol) {
  const Mesh& mesh = b.mesh();
  const auto& vs = b.ops().velocity;
  fmt::print(os, "node,x,y,ux_re,ux_im,uy_re,uy_im,p_re,p_im\n");
  for (int n = 0; n < mesh.n_nodes(); ++n) {
    const Vec2& x = mesh.nodes[static_cast<std::size_t>(n)];
    const int dof = vs.node_dof[static_cast<std::size_t>(n)];
    const int bi = vs.node_boundary[static_cast<std::size_t>(n)];
    cplx ux, uy;
    if (bi < 0) {
      ux = sol.u[dof];
      uy = sol.u[dof + 1];
    } else {
      const Vec2& t = mesh.boundary_tangent[static_cast<std::size_t>(bi)];
      ux = sol.u[dof] * t.x();
      uy = sol.u[dof] * t.y();
    }
    std::string p = ",";
    if (n < mesh.n_vertices()) p = fmt::format("{:.17g},{:.17g}", sol.p[n].real(), sol.p[n].imag());
    fmt::print(os, "{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{}\n", n, x.x(), x.y(), ux.real(),
               ux.imag(), uy.real(), uy.imag(), p);
  }
  os << "\n";
  fmt::print(os, "mode,re,im\n");
  const CVec gh = boundary_fourier(b, sol.ub);
  const int nm = b.ops().n_modes;
  for (int k = -nm; k <= nm; ++k)
    fmt::print(os, "{},{:.17g},{:.17g}\n", k, gh[k + nm].real(), gh[k + nm].imag());
}

std::string diagnostics_json(const ResolventSolution& sol) {
  nlohmann::ordered_json j;
  j["lambda"] = {sol.lambda.real(), sol.lambda.imag()};
  j["regime"] = to_string(sol.regime);
  j["flags"] = sol.flags;
  const auto& d = sol.diag;
  j["u_l2"] = d.u_l2;
  j["ub_l2"] = d.ub_l2;
  j["ub_h12"] = d.ub_h12;
  j["p_h1"] = d.p_h1;
  j["residual"] = d.residual;
  j["divergence"] = d.divergence;
  j["pressure_mean"] = d.pressure_mean;
  j["condition"] = d.condition;
  return j.dump(2);
}

}  // namespace dynslip
