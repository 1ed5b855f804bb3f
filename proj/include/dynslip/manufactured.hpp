#pragma once

#include "dynslip/spaces.hpp"

namespace dynslip {

/// Data for the rigid rotation u = (−y, x) on the unit disk:
/// f = λ(−y, x), h = (λ + α/β)·1.
Data rigid_rotation_data(const OperatorBundle& b, cplx lambda);
CVec rigid_rotation(const OperatorBundle& b);

/// Smooth non-polynomial solution on the disk of radius R with stream function
/// ψ = (R² − |x|²) sin(a x + b y) and pressure p = sin x cos y. Velocity is
/// divergence free with u·ν = 0; p has zero mean on any domain symmetric under x → −x.
class StreamSolution {
 public:
  StreamSolution(double radius = 1.0, double a = 1.3, double b = 0.7);

  Eigen::Vector2d velocity(const Vec2& x) const;
  Eigen::Matrix2d gradient(const Vec2& x) const;  // (∂_j u_i)
  Eigen::Vector2d laplacian(const Vec2& x) const;
  double pressure(const Vec2& x) const;
  Eigen::Vector2d pressure_gradient(const Vec2& x) const;

  /// Resolvent data: f = λu − Δu + ∇p (L²-projected), βh = β λ u_τ + (2Du ν)_τ + α u_τ
  /// at the boundary nodes.
  Data resolvent_data(const OperatorBundle& b, cplx lambda) const;

 private:
  double psi_derivative(const Vec2& x, int m, int n) const;
  double radius_, a_, b_;
};

/// L² errors of discrete fields against exact ones, by element quadrature.
double velocity_l2_error(const OperatorBundle& b, const CVec& u, const VectorField& exact);
double pressure_l2_error(const OperatorBundle& b, const CVec& p, const ScalarField& exact);

/// Coefficients f with M f equal to the load vector of `field` on the constrained space.
CVec l2_projection(const OperatorBundle& b, const VectorField& field);

}  // namespace dynslip
