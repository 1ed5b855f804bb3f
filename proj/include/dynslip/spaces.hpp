#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <vector>

#include "dynslip/common.hpp"
#include "dynslip/geometry.hpp"
#include "dynslip/saddle.hpp"

namespace dynslip {

/// Quadratic vector-valued nodal space with u·ν = 0 imposed at boundary nodes.
/// Interior nodes carry (u_x, u_y); boundary node j carries the coefficient of
/// the field N_j τ_j.
struct VelocitySpace {
  int n_dofs = 0;
  std::vector<int> node_dof;            // first dof of each node
  std::vector<int> node_boundary;       // boundary index of each node, or -1
  std::vector<int> boundary_dof;        // velocity dof of each boundary node
  std::vector<int> interior_dofs;       // dofs of interior nodes, increasing

  bool is_boundary_node(int node) const { return node_boundary[static_cast<std::size_t>(node)] >= 0; }
};

/// Linear nodal pressures on the mesh vertices.
struct PressureSpace {
  int n_dofs = 0;
  RVec mean;  // ∫ψ_i, so that meanᵀp = ∫p
};

/// Tangential boundary field g = g_τ·τ stored as nodal values of g_τ at the
/// boundary nodes (quadratic on each boundary edge in arclength).
struct BoundaryScalar {
  CVec values;

  BoundaryScalar() = default;
  explicit BoundaryScalar(CVec v) : values(std::move(v)) {}
  Eigen::Index size() const { return values.size(); }
};

/// Element of X₀ (or D(A) when tied): interior velocity coefficients plus the
/// boundary tangential scalar.
struct State {
  CVec u;
  BoundaryScalar ub;
  bool tied = false;
};

/// Data pair F = (f, h) in X₀.
struct Data {
  CVec f;
  BoundaryScalar h;
};

/// Matrices of the discrete problem. Independent of α and β.
struct Operators {
  std::shared_ptr<const Mesh> mesh;
  VelocitySpace velocity;
  PressureSpace pressure;

  SpMat M;      // ∫ u·v
  SpMat K;      // 2∫ Du:Dv
  SpMat G;      // ∫ u·v + ∇u:∇v
  SpMat B;      // ∫ q div v   (pressure × velocity)
  SpMat Mp;     // pressure mass
  SpMat Kp;     // pressure stiffness
  SpMat Mb;     // boundary mass on the tangential scalar
  SpMat T;      // tangential trace (boundary × velocity)
  SpMat W;      // TᵀMbT
  SpMat Flux;   // ∮ (2Dφ_j ν)·τ ψ_i ds   (boundary × velocity)

  int n_modes = 0;        // Fourier modes k = -n_modes..n_modes
  CMat fourier;           // (2 n_modes + 1) × boundary nodes, ĝ = fourier·g
  RMat gram_l2;           // Fourier Gram matrices of the boundary norms
  RMat gram_half;
  RMat gram_three_half;

  double length = 0.0;    // boundary length
  bool axisymmetric = false;

  int n_velocity() const { return velocity.n_dofs; }
  int n_pressure() const { return pressure.n_dofs; }
  int n_boundary() const { return static_cast<int>(T.rows()); }
};

/// Assembled operators plus the physical parameters. α and β enter only as
/// scalars when forming systems, so rebinding them is cheap.
class OperatorBundle {
 public:
  OperatorBundle(std::shared_ptr<const Operators> ops, double alpha, double beta);

  const Operators& ops() const { return *ops_; }
  std::shared_ptr<const Operators> shared_ops() const { return ops_; }
  const Mesh& mesh() const { return *ops_->mesh; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  OperatorBundle with_parameters(double alpha, double beta) const {
    return OperatorBundle(ops_, alpha, beta);
  }

  int n_velocity() const { return ops_->n_velocity(); }
  int n_pressure() const { return ops_->n_pressure(); }
  int n_boundary() const { return ops_->n_boundary(); }

  /// Right-hand side of the weak form: M f + β Tᵀ Mb h.
  CVec rhs(const CVec& f, const BoundaryScalar& h) const;
  CVec rhs(const Data& F) const { return rhs(F.f, F.h); }
  Data zero_data() const { return {CVec::Zero(n_velocity()), BoundaryScalar(CVec::Zero(n_boundary()))}; }

 private:
  std::shared_ptr<const Operators> ops_;
  double alpha_;
  double beta_;
};

OperatorBundle assemble(const Mesh& mesh, double alpha, double beta);
OperatorBundle assemble(std::shared_ptr<const Mesh> mesh, double alpha, double beta);

using VectorField = std::function<Eigen::Vector2cd(const Vec2&)>;
using ScalarField = std::function<cplx(const Vec2&)>;

/// Nodal interpolation; at boundary nodes only the tangential part is kept.
CVec interpolate_velocity(const OperatorBundle& b, const VectorField& f);
CVec interpolate_pressure(const OperatorBundle& b, const ScalarField& p);
/// g(x, s) sampled at boundary nodes (position, arclength).
BoundaryScalar interpolate_boundary(const OperatorBundle& b,
                                    const std::function<cplx(const Vec2&, double)>& g);
/// Load vector ∫ f·φ_j by quadrature (no nodal interpolation of f).
CVec load_vector(const OperatorBundle& b, const VectorField& f);

/// Velocity field at a physical point inside element `elem` (reference coords r).
Eigen::Vector2cd evaluate_velocity(const OperatorBundle& b, const CVec& u, int elem, const Vec2& r);

BoundaryScalar tangential_trace(const OperatorBundle& b, const CVec& u);

/// Fourier coefficients ĝ_k = L^{-1/2} ∮ g e^{-2πiks/L} ds, k = -n..n, evaluated
/// exactly for the piecewise quadratic g.
CVec boundary_fourier(const OperatorBundle& b, const BoundaryScalar& g);
/// (Σ_k (1 + (2πk/L)²)^order |ĝ_k|²)^{1/2}; order is any real ≥ 0.
double boundary_sobolev_norm(const OperatorBundle& b, const BoundaryScalar& g, double order);

double velocity_l2(const OperatorBundle& b, const CVec& u);
double boundary_l2(const OperatorBundle& b, const BoundaryScalar& g);
double pressure_l2(const OperatorBundle& b, const CVec& p);
double pressure_h1(const OperatorBundle& b, const CVec& p);

/// ‖f‖_{L²(Ω)} + ‖h‖_{H^{1/2}(∂Ω)}
double x0_norm(const OperatorBundle& b, const CVec& f, const BoundaryScalar& h);
double x0_norm(const OperatorBundle& b, const State& U);
inline double x0_norm(const OperatorBundle& b, const Data& F) { return x0_norm(b, F.f, F.h); }
/// (‖u‖² + β‖u_b‖²_{L²(∂Ω)})^{1/2}
double h_norm(const OperatorBundle& b, const State& U);

State make_tied(const OperatorBundle& b, CVec u);

/// M-orthogonal projection onto discretely divergence-free velocities.
class LerayProjector {
 public:
  explicit LerayProjector(const OperatorBundle& b);
  CVec operator()(const CVec& f) const;

 private:
  const Operators* ops_;
  std::shared_ptr<const SaddleFactorization> fact_;
};

CVec leray_project(const OperatorBundle& b, const CVec& f);

/// Residual of the discrete divergence constraint against mean-zero pressures.
double divergence_residual(const OperatorBundle& b, const CVec& u);

/// Coordinate-format export: one "row col real imag" line per stored entry.
void export_matrix(std::ostream& os, const SpMat& m);
void export_matrix(std::ostream& os, const CSpMat& m);

}  // namespace dynslip
