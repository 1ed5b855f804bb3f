#include "dynslip/spectral.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <ostream>
#include <random>
#include <thread>

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <nlohmann/json.hpp>

namespace dynslip {

namespace {

CVec random_cvec(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> nd;
  CVec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = cplx(nd(rng), nd(rng));
  return v;
}

struct Pair {
  CVec g;  // divergence-free velocity
  CVec h;  // boundary coefficients
};

}  // namespace

X0Geometry::X0Geometry(const OperatorBundle& b)
    : bundle_(b), leray_(b), gram_llt_(b.ops().gram_half) {
  if (gram_llt_.info() != Eigen::Success)
    throw SolverError("H^{1/2} Gram matrix is not positive definite", {}, 0.0);
}

CVec X0Geometry::gram_solve(const CVec& x) const {
  CVec y(x.size());
  y.real() = gram_llt_.solve(RVec(x.real()));
  y.imag() = gram_llt_.solve(RVec(x.imag()));
  return y;
}

double resolvent_norm_estimate(const ResolventSolver& R, const X0Geometry& geo,
                               const NormEstimateOptions& opts) {
  if (opts.n_probes < 1 || opts.krylov_steps < 1)
    throw InvalidArgument("resolvent_norm_estimate: n_probes and krylov_steps must be positive");
  const auto& b = R.bundle();
  const auto& o = b.ops();
  const auto& fact = R.factorization();
  const int nu = o.n_velocity();
  const RMat& Gh = geo.gram();

  auto inner = [&](const Pair& x, const Pair& y) {
    return x.g.dot(o.M * y.g) + x.h.dot(Gh * y.h);
  };
  auto apply_N = [&](const Pair& x) {
    const CVec rhs = o.M * x.g + b.beta() * (o.T.transpose() * (o.Mb * x.h));
    const CVec u = fact.solve(rhs).u;
    const CVec Tu = o.T * u;
    CVec w = CVec::Zero(fact.size());
    w.head(nu) = o.M * u + o.T.transpose() * (Gh * Tu);
    const CVec y = fact.solve_full(w, true).head(nu);
    Pair out;
    out.g = geo.leray()(y);
    out.h = b.beta() * geo.gram_solve(o.Mb * (o.T * y));
    return out;
  };

  double best = 0.0;
  for (int probe = 0; probe < opts.n_probes; ++probe) {
    std::seed_seq seq{static_cast<std::uint32_t>(opts.seed), static_cast<std::uint32_t>(opts.seed >> 32),
                      static_cast<std::uint32_t>(probe)};
    std::mt19937_64 rng(seq);
    Pair x{geo.leray()(random_cvec(rng, nu)), random_cvec(rng, o.n_boundary())};
    double nrm = std::sqrt(std::max(0.0, inner(x, x).real()));
    if (!(nrm > 0.0)) continue;
    x.g /= nrm;
    x.h /= nrm;

    std::vector<Pair> basis{x};
    std::vector<double> alpha, beta;
    double ritz = 0.0;
    for (int k = 0; k < opts.krylov_steps; ++k) {
      Pair w = apply_N(basis.back());
      const double a = inner(basis.back(), w).real();
      alpha.push_back(a);
      // full reorthogonalization (twice is enough)
      for (int pass = 0; pass < 2; ++pass)
        for (const auto& v : basis) {
          const cplx c = inner(v, w);
          w.g -= c * v.g;
          w.h -= c * v.h;
        }
      Eigen::MatrixXd Tm = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(alpha.size()),
                                                 static_cast<Eigen::Index>(alpha.size()));
      for (std::size_t i = 0; i < alpha.size(); ++i) {
        Tm(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = alpha[i];
        if (i + 1 < alpha.size()) {
          Tm(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i + 1)) = beta[i];
          Tm(static_cast<Eigen::Index>(i + 1), static_cast<Eigen::Index>(i)) = beta[i];
        }
      }
      const double prev = ritz;
      ritz = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(Tm, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
      const double bn = std::sqrt(std::max(0.0, inner(w, w).real()));
      if (bn <= 1e-12 * std::abs(ritz) || (k > 2 && std::abs(ritz - prev) <= 1e-12 * ritz)) break;
      beta.push_back(bn);
      w.g /= bn;
      w.h /= bn;
      basis.push_back(std::move(w));
    }
    best = std::max(best, std::sqrt(std::max(0.0, ritz)));
  }
  return best;
}

double resolvent_norm_estimate(const OperatorBundle& b, cplx lambda, const NormEstimateOptions& opts) {
  ResolventOptions ro;
  ro.estimate_condition = false;
  const ResolventSolver R(b, lambda, ro);
  const X0Geometry geo(b);
  return resolvent_norm_estimate(R, geo, opts);
}

RMat divergence_free_basis(const OperatorBundle& b, int max_dofs) {
  const auto& o = b.ops();
  if (o.n_velocity() > max_dofs)
    throw InvalidArgument(fmt::format("dense computation limited to {} velocity dofs (got {})", max_dofs,
                                      o.n_velocity()));
  const RVec& m = o.pressure.mean;
  RMat C = RMat(o.B);
  C -= m * (m.transpose() * C) / m.squaredNorm();
  Eigen::BDCSVD<RMat> svd(C, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double tol = 1e-10 * (s.size() ? s[0] : 1.0);
  Eigen::Index rank = 0;
  while (rank < s.size() && s[rank] > tol) ++rank;
  return svd.matrixV().rightCols(o.n_velocity() - rank);
}

double resolvent_norm_dense(const OperatorBundle& b, cplx lambda, int max_dofs) {
  const auto& o = b.ops();
  const RMat Z = divergence_free_basis(b, max_dofs);
  ResolventOptions ro;
  ro.estimate_condition = false;
  const ResolventSolver R(b, lambda, ro);
  const auto& fact = R.factorization();
  const Eigen::Index nz = Z.cols(), nb = o.n_boundary(), nu = o.n_velocity();
  const RMat M = RMat(o.M);
  const RMat T = RMat(o.T);
  const RMat Mb = RMat(o.Mb);
  const RMat& Gh = o.gram_half;

  CMat Rm(nu, nz + nb);
  const RMat in_u = M * Z;
  const RMat in_b = b.beta() * T.transpose() * Mb;
  for (Eigen::Index j = 0; j < nz; ++j) Rm.col(j) = fact.solve(in_u.col(j).cast<cplx>()).u;
  for (Eigen::Index j = 0; j < nb; ++j) Rm.col(nz + j) = fact.solve(in_b.col(j).cast<cplx>()).u;

  const RMat Q = M + T.transpose() * Gh * T;
  RMat J = RMat::Zero(nz + nb, nz + nb);
  J.topLeftCorner(nz, nz) = Z.transpose() * M * Z;
  J.bottomRightCorner(nb, nb) = Gh;
  const Eigen::LLT<RMat> lq(Q), lj(J);
  if (lq.info() != Eigen::Success || lj.info() != Eigen::Success)
    throw SolverError("dense norm: Gram factorization failed", lambda, 0.0);
  // ‖R‖ = σ_max(L_Qᵀ R L_J^{-ᵀ})
  const CMat left = lq.matrixU().toDenseMatrix().cast<cplx>() * Rm;
  const CMat X = lj.matrixU().toDenseMatrix().cast<cplx>().transpose().triangularView<Eigen::Lower>().solve(
      left.transpose()).transpose();
  Eigen::BDCSVD<CMat> svd(X);
  return svd.singularValues()[0];
}

double SectorReport::c_sector() const {
  double c = 0.0;
  for (const auto& r : records)
    if (r.flag.rfind("failed", 0) != 0) c = std::max(c, r.ratio);
  return c;
}

bool SectorReport::any_flagged() const {
  return std::any_of(records.begin(), records.end(), [](const SectorRecord& r) { return !r.flag.empty(); });
}

void SectorReport::write_csv(std::ostream& os) const {
  fmt::print(os, "re_lambda,im_lambda,ratio,norm,condition,flag\n");
  for (const auto& r : records)
    fmt::print(os, "{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{}\n", r.lambda.real(), r.lambda.imag(), r.ratio,
               r.norm, r.condition, r.flag);
}

std::string SectorReport::summary_json() const {
  nlohmann::ordered_json j;
  j["theta"] = theta;
  j["omega"] = omega;
  j["C_sector"] = c_sector();
  j["method"] = method;
  j["n_points"] = records.size();
  j["n_flagged"] = std::count_if(records.begin(), records.end(),
                                 [](const SectorRecord& r) { return !r.flag.empty(); });
  return j.dump(2);
}

std::vector<double> default_sector_angles() {
  return {0.0, kPi / 4, -kPi / 4, kPi / 2, -kPi / 2, 0.55 * kPi, -0.55 * kPi};
}

double sector_shift(double alpha, double beta) {
  if (!(beta > 0.0)) throw InvalidArgument("sector_shift: beta must be positive");
  return std::max(1.0, -4.0 * alpha) / beta;
}

std::vector<cplx> sector_grid(double omega, const std::vector<double>& angles, double rho_min,
                              double rho_max, int n_per_ray) {
  if (!(rho_min > 0.0) || !(rho_max >= rho_min) || n_per_ray < 1)
    throw InvalidArgument("sector_grid: need 0 < rho_min <= rho_max and n_per_ray >= 1");
  std::vector<cplx> grid;
  for (double phi : angles)
    for (int i = 0; i < n_per_ray; ++i) {
      const double t = n_per_ray == 1 ? 0.0 : double(i) / (n_per_ray - 1);
      const double rho = rho_min * std::pow(rho_max / rho_min, t);
      grid.push_back(omega + std::polar(rho, phi));
    }
  return grid;
}

SectorReport sector_sweep(const OperatorBundle& b, double theta, double omega,
                          const std::vector<cplx>& grid, const NormEstimateOptions& opts,
                          const ResolventOptions& ropts, int threads) {
  SectorReport rep;
  rep.theta = theta;
  rep.omega = omega;
  rep.method = fmt::format("lanczos(probes={}, steps={}, seed={})", opts.n_probes, opts.krylov_steps, opts.seed);
  for (const cplx& l : grid)
    if (l == cplx(omega) || std::abs(std::arg(l - omega)) >= theta)
      throw InvalidArgument(fmt::format("sector_sweep: lambda {}{:+}i outside the sector", l.real(), l.imag()));
  rep.records.resize(grid.size());
  if (grid.empty()) return rep;

  const X0Geometry geo(b);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < grid.size(); i = next++) {
      auto& rec = rep.records[i];
      rec.lambda = grid[i];
      try {
        const ResolventSolver R(b, grid[i], ropts);
        rec.norm = resolvent_norm_estimate(R, geo, opts);
        rec.ratio = std::abs(grid[i] - omega) * rec.norm;
        if (R.regime() == Regime::none) rec.flag = "outside_known_regimes";
        if (ropts.estimate_condition) {
          rec.condition = R.condition();
          if (!(rec.condition < ropts.condition_threshold)) rec.flag = "ill_conditioned";
        }
      } catch (const std::exception& e) {
        rec.flag = fmt::format("failed: {}", e.what());
      }
    }
  };
  const int nt = std::max(1, std::min<int>(threads, static_cast<int>(grid.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < nt; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return rep;
}

std::string KornReport::to_json() const {
  nlohmann::ordered_json j;
  j["domain"] = domain;
  j["h"] = h;
  j["q1"] = q1;
  j["q2"] = q2;
  j["alpha0"] = alpha0;
  j["iterations"] = iterations;
  return j.dump(2);
}

KornReport korn_constants(const OperatorBundle& b) {
  const auto& o = b.ops();
  KornReport rep;
  rep.domain = b.mesh().domain;
  rep.h = b.mesh().h;
  const int nu = o.n_velocity();
  const auto& bdofs = o.velocity.boundary_dof;
  const auto& idofs = o.velocity.interior_dofs;
  const int nb = static_cast<int>(bdofs.size()), ni = static_cast<int>(idofs.size());

  // q2: eliminate interior dofs (minimize K for fixed trace), then the pencil (S, M_b).
  {
    std::vector<int> local(static_cast<std::size_t>(nu), -1);
    for (int i = 0; i < ni; ++i) local[static_cast<std::size_t>(idofs[static_cast<std::size_t>(i)])] = i;
    std::vector<int> blocal(static_cast<std::size_t>(nu), -1);
    for (int i = 0; i < nb; ++i) blocal[static_cast<std::size_t>(bdofs[static_cast<std::size_t>(i)])] = i;
    std::vector<Eigen::Triplet<double>> tii, tib;
    RMat Kbb = RMat::Zero(nb, nb);
    for (int k = 0; k < o.K.outerSize(); ++k)
      for (SpMat::InnerIterator it(o.K, k); it; ++it) {
        const auto r = static_cast<std::size_t>(it.row()), c = static_cast<std::size_t>(it.col());
        if (local[r] >= 0 && local[c] >= 0) tii.emplace_back(local[r], local[c], it.value());
        else if (local[r] >= 0 && blocal[c] >= 0) tib.emplace_back(local[r], blocal[c], it.value());
        else if (blocal[r] >= 0 && blocal[c] >= 0) Kbb(blocal[r], blocal[c]) += it.value();
      }
    SpMat Kii(ni, ni), Kib(ni, nb);
    Kii.setFromTriplets(tii.begin(), tii.end());
    Kib.setFromTriplets(tib.begin(), tib.end());
    Eigen::SimplicialLDLT<SpMat> ldlt(Kii);
    if (ldlt.info() != Eigen::Success) throw SolverError("korn: interior stiffness factorization failed", {}, 0.0);
    const RMat X = ldlt.solve(RMat(Kib));
    RMat S = Kbb - RMat(Kib.transpose()) * X;
    S = 0.5 * (S + S.transpose());
    Eigen::GeneralizedSelfAdjointEigenSolver<RMat> ges(S, RMat(o.Mb), Eigen::EigenvaluesOnly);
    if (ges.info() != Eigen::Success) throw SolverError("korn: boundary eigenproblem failed", {}, 0.0);
    rep.q2 = std::max(0.0, ges.eigenvalues().minCoeff());
  }

  // q1: shift-invert block iteration with Rayleigh–Ritz on (K, G).
  {
    const double shift = 1e-2;
    const SpMat Ks = o.K + shift * o.G;
    Eigen::SimplicialLDLT<SpMat> ldlt(Ks);
    if (ldlt.info() != Eigen::Success) throw SolverError("korn: shifted stiffness factorization failed", {}, 0.0);
    const int p = 4;
    std::mt19937_64 rng(12345);
    std::normal_distribution<double> nd;
    RMat X(nu, p);
    for (Eigen::Index i = 0; i < X.size(); ++i) X.data()[i] = nd(rng);
    double prev = std::numeric_limits<double>::infinity();
    int it = 0;
    double q1 = 0.0;
    for (; it < 1000; ++it) {
      const RMat Y = ldlt.solve(RMat(o.G * X));
      const RMat Kr = Y.transpose() * (o.K * Y);
      const RMat Gr = Y.transpose() * (o.G * Y);
      Eigen::GeneralizedSelfAdjointEigenSolver<RMat> ges(0.5 * (Kr + Kr.transpose()), 0.5 * (Gr + Gr.transpose()));
      if (ges.info() != Eigen::Success) throw SolverError("korn: Rayleigh-Ritz step failed", {}, 0.0);
      X = Y * ges.eigenvectors();
      q1 = ges.eigenvalues()[0];
      if (std::abs(q1 - prev) <= 1e-12 * std::max(std::abs(q1), 1e-3)) break;
      prev = q1;
    }
    if (it == 1000) throw SolverError("korn: inverse iteration did not converge", {}, 0.0);
    rep.q1 = std::max(0.0, q1);
    rep.iterations = it + 1;
  }
  rep.alpha0 = rep.q2 > 0.0 ? -rep.q2 : 0.0;
  return rep;
}

}  // namespace dynslip
