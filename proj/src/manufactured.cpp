#include "dynslip/manufactured.hpp"

#include <cmath>

#include "dynslip/element.hpp"
#include "dynslip/quadrature.hpp"

namespace dynslip {

namespace {

double binom(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

std::array<Vec2, 6> element_coords(const Mesh& mesh, int e) {
  std::array<Vec2, 6> xc;
  const auto& el = mesh.elements[static_cast<std::size_t>(e)];
  for (std::size_t k = 0; k < 6; ++k) xc[k] = mesh.nodes[static_cast<std::size_t>(el[k])];
  return xc;
}

}  // namespace

CVec rigid_rotation(const OperatorBundle& b) {
  return interpolate_velocity(b, [](const Vec2& x) { return Eigen::Vector2cd(-x.y(), x.x()); });
}

Data rigid_rotation_data(const OperatorBundle& b, cplx lambda) {
  Data F;
  F.f = lambda * rigid_rotation(b);
  F.h = BoundaryScalar(CVec::Constant(b.n_boundary(), lambda + b.alpha() / b.beta()));
  return F;
}

StreamSolution::StreamSolution(double radius, double a, double b) : radius_(radius), a_(a), b_(b) {
  if (!(radius > 0.0)) throw InvalidArgument("StreamSolution: radius must be positive");
}

double StreamSolution::psi_derivative(const Vec2& x, int m, int n) const {
  // ψ = P g with P = R² − x² − y², g = sin(a x + b y)
  auto P = [&](int i, int j) -> double {
    if (i == 0 && j == 0) return radius_ * radius_ - x.squaredNorm();
    if (i == 1 && j == 0) return -2 * x.x();
    if (i == 0 && j == 1) return -2 * x.y();
    if ((i == 2 && j == 0) || (i == 0 && j == 2)) return -2.0;
    return 0.0;
  };
  auto g = [&](int i, int j) {
    return std::pow(a_, i) * std::pow(b_, j) * std::sin(a_ * x.x() + b_ * x.y() + (i + j) * kPi / 2);
  };
  double s = 0.0;
  for (int i = 0; i <= std::min(m, 2); ++i)
    for (int j = 0; j <= std::min(n, 2); ++j) {
      const double p = P(i, j);
      if (p != 0.0) s += binom(m, i) * binom(n, j) * p * g(m - i, n - j);
    }
  return s;
}

Eigen::Vector2d StreamSolution::velocity(const Vec2& x) const {
  return {psi_derivative(x, 0, 1), -psi_derivative(x, 1, 0)};
}

Eigen::Matrix2d StreamSolution::gradient(const Vec2& x) const {
  Eigen::Matrix2d g;
  g << psi_derivative(x, 1, 1), psi_derivative(x, 0, 2),
      -psi_derivative(x, 2, 0), -psi_derivative(x, 1, 1);
  return g;
}

Eigen::Vector2d StreamSolution::laplacian(const Vec2& x) const {
  return {psi_derivative(x, 2, 1) + psi_derivative(x, 0, 3),
          -psi_derivative(x, 3, 0) - psi_derivative(x, 1, 2)};
}

double StreamSolution::pressure(const Vec2& x) const { return std::sin(x.x()) * std::cos(x.y()); }

Eigen::Vector2d StreamSolution::pressure_gradient(const Vec2& x) const {
  return {std::cos(x.x()) * std::cos(x.y()), -std::sin(x.x()) * std::sin(x.y())};
}

Data StreamSolution::resolvent_data(const OperatorBundle& b, cplx lambda) const {
  Data F;
  F.f = l2_projection(b, [&](const Vec2& x) -> Eigen::Vector2cd {
    const Eigen::Vector2cd r = lambda * velocity(x).cast<cplx>();
    return r + (-laplacian(x) + pressure_gradient(x)).cast<cplx>();
  });
  const Mesh& mesh = b.mesh();
  CVec h(b.n_boundary());
  for (int i = 0; i < b.n_boundary(); ++i) {
    const Vec2& x = mesh.nodes[static_cast<std::size_t>(mesh.boundary_nodes[static_cast<std::size_t>(i)])];
    const Vec2& nu = mesh.boundary_normal[static_cast<std::size_t>(i)];
    const Vec2& tau = mesh.boundary_tangent[static_cast<std::size_t>(i)];
    const Eigen::Matrix2d G = gradient(x);
    const double stress = tau.dot((G + G.transpose()) * nu);
    const double ut = velocity(x).dot(tau);
    h[i] = lambda * ut + (stress + b.alpha() * ut) / b.beta();
  }
  F.h = BoundaryScalar(std::move(h));
  return F;
}

CVec l2_projection(const OperatorBundle& b, const VectorField& field) {
  const CVec load = load_vector(b, field);
  Eigen::SimplicialLDLT<SpMat> ldlt(b.ops().M);
  if (ldlt.info() != Eigen::Success) throw SolverError("mass matrix factorization failed", {}, 0.0);
  CVec f(load.size());
  f.real() = ldlt.solve(RVec(load.real()));
  f.imag() = ldlt.solve(RVec(load.imag()));
  return f;
}

double velocity_l2_error(const OperatorBundle& b, const CVec& u, const VectorField& exact) {
  const Mesh& mesh = b.mesh();
  const auto& rule = quad::triangle(6);
  double sum = 0.0;
  for (int e = 0; e < mesh.n_triangles(); ++e) {
    const auto xc = element_coords(mesh, e);
    for (std::size_t q = 0; q < rule.x.size(); ++q) {
      const auto mp = element::map_point(xc, rule.x[q]);
      const Eigen::Vector2cd d = evaluate_velocity(b, u, e, rule.x[q]) - exact(mp.x);
      sum += rule.w[q] * mp.det * d.squaredNorm();
    }
  }
  return std::sqrt(sum);
}

double pressure_l2_error(const OperatorBundle& b, const CVec& p, const ScalarField& exact) {
  const Mesh& mesh = b.mesh();
  const auto& rule = quad::triangle(6);
  double sum = 0.0;
  for (int e = 0; e < mesh.n_triangles(); ++e) {
    const auto xc = element_coords(mesh, e);
    const auto& tri = mesh.triangles[static_cast<std::size_t>(e)];
    for (std::size_t q = 0; q < rule.x.size(); ++q) {
      const auto mp = element::map_point(xc, rule.x[q]);
      const auto psi = element::p1_values(rule.x[q]);
      cplx ph = 0.0;
      for (std::size_t k = 0; k < 3; ++k) ph += psi[k] * p[tri[k]];
      sum += rule.w[q] * mp.det * std::norm(ph - exact(mp.x));
    }
  }
  return std::sqrt(sum);
}

}  // namespace dynslip
