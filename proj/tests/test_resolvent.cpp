#include <cmath>

#include <gtest/gtest.h>

#include "dynslip/manufactured.hpp"
#include "dynslip/random_fields.hpp"
#include "dynslip/resolvent.hpp"
#include "support.hpp"

using namespace dynslip;
using namespace dynslip::testing;

namespace {

const VectorField kRotation = [](const Vec2& x) { return Eigen::Vector2cd(-x.y(), x.x()); };

double rel_velocity_error(const OperatorBundle& b, const CVec& u, const VectorField& ex) {
  return velocity_l2_error(b, u, ex) / velocity_l2_error(b, CVec::Zero(b.n_velocity()), ex);
}

}  // namespace

TEST(Regime, Classification) {
  const auto b = disk(0.3, 1.0, 1.0);
  EXPECT_EQ(classify(b, {2.0, 5.0}), Regime::large_real_part);
  EXPECT_EQ(classify(b, {0.1, 5.0}), Regime::positive_alpha);
  EXPECT_EQ(classify(b.with_parameters(-0.1, 1.0), {0.1, 1.0}), Regime::none);
  const auto e = ellipse(0.3, -0.1, 1.0);
  EXPECT_EQ(classify(e, {0.1, 1.0}), Regime::none);
  EXPECT_EQ(classify(e, {0.1, 1.0}, -0.2), Regime::korn);
  EXPECT_EQ(classify(e, {0.1, 1.0}, -0.05), Regime::none);
}

TEST(Resolvent, ZeroDataGivesZero) {
  const auto b = disk(0.2);
  const auto sol = solve_resolvent(b, {1.0, 1.0}, b.zero_data());
  EXPECT_EQ(sol.u.norm(), 0.0);
  EXPECT_EQ(sol.p.norm(), 0.0);
}

TEST(Resolvent, RigidRotationReproduced) {
  for (cplx lam : {cplx(1, 1), cplx(10, 0), cplx(0.5, -20)}) {
    const auto b = disk(0.1, 1.0, 2.0);
    const auto sol = solve_resolvent(b, lam, rigid_rotation_data(b, lam));
    EXPECT_LE(rel_velocity_error(b, sol.u, kRotation), 1e-10) << lam;
    EXPECT_LE(pressure_l2(b, sol.p), 1e-10) << lam;
    EXPECT_FALSE(sol.flagged());
  }
}

TEST(Resolvent, StreamSolutionConverges) {
  const StreamSolution S;
  const VectorField ue = [&](const Vec2& x) { return Eigen::Vector2cd(S.velocity(x).cast<cplx>()); };
  std::vector<double> err;
  for (double h : {0.2, 0.1}) {
    const auto b = disk(h);
    const cplx lam(1.0, 1.0);
    const auto sol = solve_resolvent(b, lam, S.resolvent_data(b, lam));
    err.push_back(rel_velocity_error(b, sol.u, ue));
  }
  EXPECT_GE(std::log2(err[0] / err[1]), 2.0);
}

TEST(Resolvent, GradientForcingGoesToPressure) {
  double prev = 1e300;
  for (double h : {0.2, 0.1}) {
    const auto b = disk(h);
    Data F = b.zero_data();
    F.f = l2_projection(b, [](const Vec2& x) { return Eigen::Vector2cd(2 * x.x(), -2 * x.y()); });
    const auto sol = solve_resolvent(b, 1.0, F);
    const double perr = pressure_l2_error(b, sol.p, [](const Vec2& x) { return cplx(x.x() * x.x() - x.y() * x.y()); });
    const double unorm = velocity_l2(b, sol.u) / velocity_l2(b, F.f);
    EXPECT_LT(perr, prev);
    EXPECT_LT(unorm, 0.05);
    prev = perr;
  }
  EXPECT_LT(prev, 1e-2);
}

TEST(Resolvent, SolutionInvariants) {
  const auto b = ellipse(0.2, 0.5, 1.5);
  const cplx lam(2.0, -3.0);
  const Data F = random_smooth_data(b, 3, 0);
  const auto sol = solve_resolvent(b, lam, F);
  EXPECT_LE(sol.diag.pressure_mean, 1e-10);
  EXPECT_LE((sol.ub.values - tangential_trace(b, sol.u).values).norm(), 1e-12 * sol.ub.values.norm());
  EXPECT_LE(sol.diag.residual, 1e-10);
  EXPECT_LE(weak_identity_residual(OperatorA(b), lam, sol.state(), F), 1e-10);
}

TEST(Resolvent, Linearity) {
  const auto b = disk(0.2);
  const cplx lam(1.0, 2.0);
  const Data F1 = random_smooth_data(b, 5, 0), F2 = random_smooth_data(b, 5, 1);
  const cplx c(0.3, -1.2);
  Data F{F1.f + c * F2.f, BoundaryScalar(F1.h.values + c * F2.h.values)};
  const auto s1 = solve_resolvent(b, lam, F1), s2 = solve_resolvent(b, lam, F2), s = solve_resolvent(b, lam, F);
  EXPECT_LE((s.u - s1.u - c * s2.u).norm(), 1e-10 * s.u.norm());
}

TEST(Resolvent, UniqueUnderKornRegime) {
  const auto b = ellipse(0.2, -0.1, 1.0);
  ResolventOptions ro;
  ro.alpha0 = -0.27;
  const auto sol = solve_resolvent(b, {0.1, 1.0}, b.zero_data(), ro);
  EXPECT_EQ(sol.regime, Regime::korn);
  EXPECT_EQ(sol.u.norm(), 0.0);
}

TEST(Resolvent, OutsideRegimesIsFlagged) {
  const auto b = disk(0.3, -1.0, 1.0);
  const auto sol = solve_resolvent(b, {0.5, 1.0}, random_smooth_data(b, 1, 0));
  EXPECT_TRUE(sol.flagged());
  EXPECT_EQ(sol.flags.front(), "outside_known_regimes");
}

TEST(OperatorA, RigidRotationWithoutFriction) {
  const auto b = disk(0.1, 0.0, 1.0);
  const State AU = apply_A(b, rigid_rotation(b));
  EXPECT_LE(x0_norm(b, AU), 1e-6);
}

TEST(OperatorA, RigidRotationWithFriction) {
  const auto b = disk(0.1, 1.0, 2.0);
  const State AU = apply_A(b, rigid_rotation(b));
  EXPECT_LE(velocity_l2(b, AU.u), 1e-6);
  EXPECT_LE((AU.ub.values.array() + 0.5).abs().maxCoeff(), 1e-6);
}

TEST(OperatorA, ResolventIdentity) {
  const auto b = ellipse(0.2, 1.0, 1.0);
  const OperatorA A(b);
  const cplx lam(3.0, 1.0);
  const Data F = random_smooth_data(b, 9, 0);
  const auto sol = solve_resolvent(b, lam, F);
  EXPECT_LE(weak_identity_residual(A, lam, sol.state(), F), 1e-8);
}

TEST(Ratios, AprioriClosedForm) {
  // u = (−y, x): ‖u‖ = √(π/2), ‖u_b‖ = √(2π); f = λu, h = (λ + α/β)·1.
  const double alpha = 1.0, beta = 1.0;
  const cplx lam = 10.0;
  const auto b = disk(0.05, alpha, beta);
  const Data F = rigid_rotation_data(b, lam);
  const auto sol = solve_resolvent(b, lam, F);
  const double nu = std::sqrt(kPi / 2), nb = std::sqrt(2 * kPi);
  const double expect = std::abs(lam) * (nu + beta * nb) / (std::abs(lam) * nu + beta * std::abs(lam + alpha / beta) * nb);
  EXPECT_LT(rel(apriori_ratio(b, sol, F), expect), 1e-3);
}

TEST(Ratios, EllipticClosedForm) {
  // AU = (0, −α/β·1), π = 0; ‖u_b‖_{H^{3/2}} = √L, ‖F‖_{X₀} = |λ|√(π/2) + |λ + α/β|√L.
  const double alpha = 1.0, beta = 1.0;
  const cplx lam(2.0, 1.0);
  const auto b = disk(0.05, alpha, beta);
  const Data F = rigid_rotation_data(b, lam);
  const auto sol = solve_resolvent(b, lam, F);
  const double L = 2 * kPi;
  const double expect = (std::sqrt(L) + std::sqrt(kPi / 2) + 0.0) /
                        (std::abs(lam) * std::sqrt(kPi / 2) + std::abs(lam + alpha / beta) * std::sqrt(L));
  EXPECT_LT(rel(elliptic_regularity_ratio(b, sol, F), expect), 1e-3);
}

TEST(Ratios, ZeroDataIsAnError) {
  const auto b = disk(0.3);
  const auto sol = solve_resolvent(b, 1.0, b.zero_data());
  EXPECT_THROW(apriori_ratio(b, sol, b.zero_data()), InvalidArgument);
  EXPECT_THROW(elliptic_regularity_ratio(b, sol, b.zero_data()), InvalidArgument);
}

TEST(Ratios, EllipticStableUnderRefinement) {
  std::vector<double> r;
  for (double h : {0.2, 0.1}) {
    const auto b = ellipse(h);
    const Data F = random_smooth_data(b, 11, 0);
    r.push_back(elliptic_regularity_ratio(b, solve_resolvent(b, {1.0, 2.0}, F), F));
  }
  EXPECT_LE(std::max(r[0], r[1]) / std::min(r[0], r[1]), 2.0);
}
