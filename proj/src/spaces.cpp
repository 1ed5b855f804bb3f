#include "dynslip/spaces.hpp"

#include <cmath>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "dynslip/element.hpp"
#include "dynslip/quadrature.hpp"

namespace dynslip {

namespace {

using Trip = Eigen::Triplet<double>;

struct DofEntry {
  int dof;
  double coef;
};

// Global dofs touched by the Cartesian component d of node `node`.
DofEntry component_dof(const VelocitySpace& vs, const Mesh& mesh, int node, int d) {
  const int bi = vs.node_boundary[static_cast<std::size_t>(node)];
  const int dof = vs.node_dof[static_cast<std::size_t>(node)];
  if (bi < 0) return {dof + d, 1.0};
  return {dof, mesh.boundary_tangent[static_cast<std::size_t>(bi)][d]};
}

std::array<Vec2, 6> element_coords(const Mesh& mesh, int e) {
  std::array<Vec2, 6> xc;
  const auto& el = mesh.elements[static_cast<std::size_t>(e)];
  for (std::size_t k = 0; k < 6; ++k) xc[k] = mesh.nodes[static_cast<std::size_t>(el[k])];
  return xc;
}

// μ_m(θ) = ∫_0^1 ξ^m e^{-iθξ} dξ for m = 0, 1, 2.
std::array<cplx, 3> exp_moments(double theta) {
  const cplx mi(0.0, -1.0);  // -i
  std::array<cplx, 3> mu{};
  if (std::abs(theta) < 0.5) {
    cplx term = 1.0;  // (-iθ)^j / j!
    for (int j = 0; j < 30; ++j) {
      for (int m = 0; m < 3; ++m) mu[static_cast<std::size_t>(m)] += term / double(m + j + 1);
      term *= mi * theta / double(j + 1);
    }
    return mu;
  }
  const cplx e = std::exp(mi * theta);
  const cplx a = mi * theta;  // -iθ
  mu[0] = (e - 1.0) / a;
  mu[1] = (e - 1.0 * mu[0]) / a;
  mu[2] = (e - 2.0 * mu[1]) / a;
  return mu;
}

}  // namespace

OperatorBundle::OperatorBundle(std::shared_ptr<const Operators> ops, double alpha, double beta)
    : ops_(std::move(ops)), alpha_(alpha), beta_(beta) {
  if (!(beta > 0.0)) throw InvalidArgument("OperatorBundle: beta must be positive");
  if (!std::isfinite(alpha)) throw InvalidArgument("OperatorBundle: alpha must be finite");
}

CVec OperatorBundle::rhs(const CVec& f, const BoundaryScalar& h) const {
  const auto& o = ops();
  if (f.size() != o.n_velocity() || h.size() != o.n_boundary())
    throw InvalidArgument("rhs: data does not conform to the discrete spaces");
  CVec r = o.M * f;
  r += beta_ * (o.T.transpose() * (o.Mb * h.values));
  return r;
}

OperatorBundle assemble(const Mesh& mesh, double alpha, double beta) {
  return assemble(std::make_shared<const Mesh>(mesh), alpha, beta);
}

OperatorBundle assemble(std::shared_ptr<const Mesh> mesh_ptr, double alpha, double beta) {
  if (!(beta > 0.0)) throw InvalidArgument("assemble: beta must be positive");
  const Mesh& mesh = *mesh_ptr;
  auto ops = std::make_shared<Operators>();
  ops->mesh = mesh_ptr;
  ops->length = mesh.boundary_length;
  ops->axisymmetric = mesh.axisymmetric;

  // Velocity dofs in node order.
  auto& vs = ops->velocity;
  const int nn = mesh.n_nodes();
  const int nbn = static_cast<int>(mesh.boundary_nodes.size());
  vs.node_boundary.assign(static_cast<std::size_t>(nn), -1);
  for (int i = 0; i < nbn; ++i)
    vs.node_boundary[static_cast<std::size_t>(mesh.boundary_nodes[static_cast<std::size_t>(i)])] = i;
  vs.node_dof.resize(static_cast<std::size_t>(nn));
  vs.boundary_dof.resize(static_cast<std::size_t>(nbn));
  int dof = 0;
  for (int n = 0; n < nn; ++n) {
    vs.node_dof[static_cast<std::size_t>(n)] = dof;
    const int bi = vs.node_boundary[static_cast<std::size_t>(n)];
    if (bi >= 0) {
      vs.boundary_dof[static_cast<std::size_t>(bi)] = dof;
      dof += 1;
    } else {
      vs.interior_dofs.push_back(dof);
      vs.interior_dofs.push_back(dof + 1);
      dof += 2;
    }
  }
  vs.n_dofs = dof;
  const int nu = dof;
  const int np = mesh.n_vertices();
  ops->pressure.n_dofs = np;

  std::vector<Trip> tm, tk, tg, tb, tmp, tkp;
  const auto& rule = quad::triangle(5);
  const auto gp1 = element::p1_gradients();

  for (int e = 0; e < mesh.n_triangles(); ++e) {
    const auto xc = element_coords(mesh, e);
    const auto& el = mesh.elements[static_cast<std::size_t>(e)];
    Eigen::Matrix<double, 12, 12> Me = Eigen::Matrix<double, 12, 12>::Zero();
    Eigen::Matrix<double, 12, 12> Ke = Me, Ge = Me;
    Eigen::Matrix<double, 3, 12> Be = Eigen::Matrix<double, 3, 12>::Zero();
    Eigen::Matrix3d Mpe = Eigen::Matrix3d::Zero(), Kpe = Eigen::Matrix3d::Zero();

    for (std::size_t q = 0; q < rule.x.size(); ++q) {
      const auto mp = element::map_point(xc, rule.x[q]);
      if (!(mp.det > 0.0))
        throw AssemblyError(fmt::format("assemble: non-positive Jacobian in element {}", e), e);
      const double w = rule.w[q] * mp.det;
      const auto psi = element::p1_values(rule.x[q]);
      const Eigen::Matrix<double, 3, 2> gpsi = gp1 * mp.jac.inverse();
      for (int k = 0; k < 6; ++k) {
        const Vec2 gk = mp.grad.row(k).transpose();
        const double nk = mp.value[static_cast<std::size_t>(k)];
        for (int l = 0; l < 6; ++l) {
          const Vec2 gl = mp.grad.row(l).transpose();
          const double nl = mp.value[static_cast<std::size_t>(l)];
          const double mass = w * nk * nl;
          const double lap = w * gk.dot(gl);
          for (int d = 0; d < 2; ++d) {
            Me(2 * k + d, 2 * l + d) += mass;
            Ge(2 * k + d, 2 * l + d) += mass + lap;
            for (int c = 0; c < 2; ++c)
              Ke(2 * k + d, 2 * l + c) += (d == c ? lap : 0.0) + w * gk[c] * gl[d];
          }
        }
        for (int i = 0; i < 3; ++i)
          for (int d = 0; d < 2; ++d) Be(i, 2 * k + d) += w * psi[static_cast<std::size_t>(i)] * gk[d];
      }
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          Mpe(i, j) += w * psi[static_cast<std::size_t>(i)] * psi[static_cast<std::size_t>(j)];
          Kpe(i, j) += w * gpsi.row(i).dot(gpsi.row(j));
        }
    }

    std::array<DofEntry, 12> map;
    for (int k = 0; k < 6; ++k)
      for (int d = 0; d < 2; ++d)
        map[static_cast<std::size_t>(2 * k + d)] = component_dof(vs, mesh, el[static_cast<std::size_t>(k)], d);
    for (int a = 0; a < 12; ++a) {
      const auto ea = map[static_cast<std::size_t>(a)];
      for (int b = 0; b < 12; ++b) {
        const auto eb = map[static_cast<std::size_t>(b)];
        const double c = ea.coef * eb.coef;
        if (c == 0.0) continue;
        tm.emplace_back(ea.dof, eb.dof, c * Me(a, b));
        tk.emplace_back(ea.dof, eb.dof, c * Ke(a, b));
        tg.emplace_back(ea.dof, eb.dof, c * Ge(a, b));
      }
      for (int i = 0; i < 3; ++i)
        if (ea.coef != 0.0) tb.emplace_back(el[static_cast<std::size_t>(i)], ea.dof, ea.coef * Be(i, a));
    }
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        tmp.emplace_back(el[static_cast<std::size_t>(i)], el[static_cast<std::size_t>(j)], Mpe(i, j));
        tkp.emplace_back(el[static_cast<std::size_t>(i)], el[static_cast<std::size_t>(j)], Kpe(i, j));
      }
  }

  auto build = [](int r, int c, const std::vector<Trip>& t) {
    SpMat m(r, c);
    m.setFromTriplets(t.begin(), t.end());
    m.prune(0.0);
    m.makeCompressed();
    return m;
  };
  ops->M = build(nu, nu, tm);
  ops->K = build(nu, nu, tk);
  ops->G = build(nu, nu, tg);
  ops->B = build(np, nu, tb);
  ops->Mp = build(np, np, tmp);
  ops->Kp = build(np, np, tkp);
  // Exact symmetry (element contributions are symmetric up to summation order).
  ops->M = SpMat(0.5 * (ops->M + SpMat(ops->M.transpose())));
  ops->K = SpMat(0.5 * (ops->K + SpMat(ops->K.transpose())));
  ops->G = SpMat(0.5 * (ops->G + SpMat(ops->G.transpose())));
  ops->pressure.mean = ops->Mp * RVec::Ones(np);

  // Boundary operators.
  std::vector<Trip> tmb, tt, tfl;
  for (int i = 0; i < nbn; ++i) tt.emplace_back(i, vs.boundary_dof[static_cast<std::size_t>(i)], 1.0);
  const double mb_ref[3][3] = {{4, 2, -1}, {2, 16, 2}, {-1, 2, 4}};
  const auto& g1 = quad::gauss_legendre(8);
  const int nbe = static_cast<int>(mesh.boundary_edges.size());
  for (int i = 0; i < nbe; ++i) {
    const auto& be = mesh.boundary_edges[static_cast<std::size_t>(i)];
    const double ell = be.s1 - be.s0;
    const std::array<int, 3> bidx{2 * i, 2 * i + 1, (2 * i + 2) % nbn};
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        tmb.emplace_back(bidx[static_cast<std::size_t>(a)], bidx[static_cast<std::size_t>(b)], ell * mb_ref[a][b] / 30.0);

    const auto xc = element_coords(mesh, be.triangle);
    const auto& el = mesh.elements[static_cast<std::size_t>(be.triangle)];
    for (std::size_t q = 0; q < g1.x.size(); ++q) {
      const double t = g1.x[q];
      const Vec2 r = element::edge_point(be.local_edge, t);
      const auto mp = element::map_point(xc, r);
      const Vec2 dr = element::edge_point(be.local_edge, 1.0) - element::edge_point(be.local_edge, 0.0);
      const Vec2 tau = (mp.jac * dr).normalized();
      const Vec2 nu_h(tau.y(), -tau.x());
      const auto psi = element::p2_1d(t);
      for (int k = 0; k < 6; ++k) {
        const Vec2 g = mp.grad.row(k).transpose();
        for (int d = 0; d < 2; ++d) {
          // (2 D(N_k e_d) ν)·τ
          const double val = tau[d] * g.dot(nu_h) + g.dot(tau) * nu_h[d];
          const auto ent = component_dof(vs, mesh, el[static_cast<std::size_t>(k)], d);
          if (ent.coef == 0.0) continue;
          for (int m = 0; m < 3; ++m)
            tfl.emplace_back(bidx[static_cast<std::size_t>(m)], ent.dof,
                             g1.w[q] * ell * psi[static_cast<std::size_t>(m)] * ent.coef * val);
        }
      }
    }
  }
  ops->Mb = build(nbn, nbn, tmb);
  ops->T = build(nbn, nu, tt);
  ops->Flux = build(nbn, nu, tfl);
  ops->W = SpMat(ops->T.transpose() * ops->Mb * ops->T);

  // Exact Fourier analysis of the piecewise quadratic boundary scalar.
  const double L = mesh.boundary_length;
  const int nm = std::max(32, 2 * nbn);
  ops->n_modes = nm;
  ops->fourier = CMat::Zero(2 * nm + 1, nbn);
  // Coefficients of the quadratic basis in powers of ξ.
  const double basis[3][3] = {{1, -3, 2}, {0, 4, -4}, {0, -1, 2}};
  for (int k = -nm; k <= nm; ++k) {
    const double omega = 2 * kPi * k / L;
    for (int i = 0; i < nbe; ++i) {
      const auto& be = mesh.boundary_edges[static_cast<std::size_t>(i)];
      const double ell = be.s1 - be.s0;
      const auto mu = exp_moments(omega * ell);
      const cplx phase = std::exp(cplx(0.0, -omega * be.s0)) * (ell / std::sqrt(L));
      const std::array<int, 3> bidx{2 * i, 2 * i + 1, (2 * i + 2) % nbn};
      for (int m = 0; m < 3; ++m) {
        const cplx integral = basis[m][0] * mu[0] + basis[m][1] * mu[1] + basis[m][2] * mu[2];
        ops->fourier(k + nm, bidx[static_cast<std::size_t>(m)]) += phase * integral;
      }
    }
  }
  auto gram = [&](double order) {
    RVec w(2 * nm + 1);
    for (int k = -nm; k <= nm; ++k) w[k + nm] = std::pow(1.0 + std::pow(2 * kPi * k / L, 2), order);
    const CMat G = ops->fourier.adjoint() * w.asDiagonal() * ops->fourier;
    RMat Gr = G.real();
    return RMat(0.5 * (Gr + Gr.transpose()));
  };
  ops->gram_l2 = gram(0.0);
  ops->gram_half = gram(0.5);
  ops->gram_three_half = gram(1.5);

  return OperatorBundle(std::move(ops), alpha, beta);
}

CVec interpolate_velocity(const OperatorBundle& b, const VectorField& f) {
  const auto& o = b.ops();
  const Mesh& mesh = b.mesh();
  CVec u(o.n_velocity());
  for (int n = 0; n < mesh.n_nodes(); ++n) {
    const auto v = f(mesh.nodes[static_cast<std::size_t>(n)]);
    const int dof = o.velocity.node_dof[static_cast<std::size_t>(n)];
    const int bi = o.velocity.node_boundary[static_cast<std::size_t>(n)];
    if (bi < 0) {
      u[dof] = v[0];
      u[dof + 1] = v[1];
    } else {
      const Vec2& t = mesh.boundary_tangent[static_cast<std::size_t>(bi)];
      u[dof] = v[0] * t.x() + v[1] * t.y();
    }
  }
  return u;
}

CVec interpolate_pressure(const OperatorBundle& b, const ScalarField& p) {
  const Mesh& mesh = b.mesh();
  CVec out(mesh.n_vertices());
  for (int i = 0; i < mesh.n_vertices(); ++i) out[i] = p(mesh.vertices[static_cast<std::size_t>(i)]);
  return out;
}

BoundaryScalar interpolate_boundary(const OperatorBundle& b,
                                    const std::function<cplx(const Vec2&, double)>& g) {
  const Mesh& mesh = b.mesh();
  CVec v(b.n_boundary());
  for (int i = 0; i < b.n_boundary(); ++i)
    v[i] = g(mesh.nodes[static_cast<std::size_t>(mesh.boundary_nodes[static_cast<std::size_t>(i)])],
             mesh.boundary_s[static_cast<std::size_t>(i)]);
  return BoundaryScalar(std::move(v));
}

CVec load_vector(const OperatorBundle& b, const VectorField& f) {
  const auto& o = b.ops();
  const Mesh& mesh = b.mesh();
  CVec r = CVec::Zero(o.n_velocity());
  const auto& rule = quad::triangle(6);
  for (int e = 0; e < mesh.n_triangles(); ++e) {
    const auto xc = element_coords(mesh, e);
    const auto& el = mesh.elements[static_cast<std::size_t>(e)];
    for (std::size_t q = 0; q < rule.x.size(); ++q) {
      const auto mp = element::map_point(xc, rule.x[q]);
      const auto fv = f(mp.x);
      const double w = rule.w[q] * mp.det;
      for (int k = 0; k < 6; ++k)
        for (int d = 0; d < 2; ++d) {
          const auto ent = component_dof(o.velocity, mesh, el[static_cast<std::size_t>(k)], d);
          r[ent.dof] += w * mp.value[static_cast<std::size_t>(k)] * ent.coef * fv[d];
        }
    }
  }
  return r;
}

Eigen::Vector2cd evaluate_velocity(const OperatorBundle& b, const CVec& u, int elem, const Vec2& r) {
  const auto& o = b.ops();
  const Mesh& mesh = b.mesh();
  const auto& el = mesh.elements[static_cast<std::size_t>(elem)];
  const auto n = element::p2_values(r);
  Eigen::Vector2cd v = Eigen::Vector2cd::Zero();
  for (int k = 0; k < 6; ++k)
    for (int d = 0; d < 2; ++d) {
      const auto ent = component_dof(o.velocity, mesh, el[static_cast<std::size_t>(k)], d);
      v[d] += n[static_cast<std::size_t>(k)] * ent.coef * u[ent.dof];
    }
  return v;
}

BoundaryScalar tangential_trace(const OperatorBundle& b, const CVec& u) {
  if (u.size() != b.n_velocity()) throw InvalidArgument("tangential_trace: dimension mismatch");
  return BoundaryScalar(b.ops().T * u);
}

CVec boundary_fourier(const OperatorBundle& b, const BoundaryScalar& g) {
  if (g.size() != b.n_boundary()) throw InvalidArgument("boundary_fourier: dimension mismatch");
  return b.ops().fourier * g.values;
}

double boundary_sobolev_norm(const OperatorBundle& b, const BoundaryScalar& g, double order) {
  if (!(order >= 0.0)) throw InvalidArgument("boundary_sobolev_norm: order must be >= 0");
  const CVec gh = boundary_fourier(b, g);
  const int nm = b.ops().n_modes;
  const double L = b.ops().length;
  double sum = 0.0;
  for (int k = -nm; k <= nm; ++k)
    sum += std::pow(1.0 + std::pow(2 * kPi * k / L, 2), order) * std::norm(gh[k + nm]);
  return std::sqrt(sum);
}

double velocity_l2(const OperatorBundle& b, const CVec& u) {
  return std::sqrt(std::max(0.0, u.dot(b.ops().M * u).real()));
}

double boundary_l2(const OperatorBundle& b, const BoundaryScalar& g) {
  return std::sqrt(std::max(0.0, g.values.dot(b.ops().Mb * g.values).real()));
}

double pressure_l2(const OperatorBundle& b, const CVec& p) {
  return std::sqrt(std::max(0.0, p.dot(b.ops().Mp * p).real()));
}

double pressure_h1(const OperatorBundle& b, const CVec& p) {
  const auto& o = b.ops();
  return std::sqrt(std::max(0.0, p.dot(o.Mp * p).real() + p.dot(o.Kp * p).real()));
}

double x0_norm(const OperatorBundle& b, const CVec& f, const BoundaryScalar& h) {
  return velocity_l2(b, f) + boundary_sobolev_norm(b, h, 0.5);
}

double x0_norm(const OperatorBundle& b, const State& U) { return x0_norm(b, U.u, U.ub); }

double h_norm(const OperatorBundle& b, const State& U) {
  const double u2 = U.u.dot(b.ops().M * U.u).real();
  const double g2 = U.ub.values.dot(b.ops().Mb * U.ub.values).real();
  return std::sqrt(std::max(0.0, u2 + b.beta() * g2));
}

State make_tied(const OperatorBundle& b, CVec u) {
  State s;
  s.ub = tangential_trace(b, u);
  s.u = std::move(u);
  s.tied = true;
  return s;
}

LerayProjector::LerayProjector(const OperatorBundle& b)
    : ops_(&b.ops()),
      fact_(std::make_shared<SaddleFactorization>(b.ops().M.cast<cplx>(), b.ops().B,
                                                  b.ops().pressure.mean)) {}

CVec LerayProjector::operator()(const CVec& f) const {
  if (f.size() != ops_->n_velocity()) throw InvalidArgument("leray_project: dimension mismatch");
  return fact_->solve(ops_->M * f).u;
}

CVec leray_project(const OperatorBundle& b, const CVec& f) { return LerayProjector(b)(f); }

double divergence_residual(const OperatorBundle& b, const CVec& u) {
  const auto& o = b.ops();
  const RVec& m = o.pressure.mean;
  CVec r = o.B * u;
  r -= m * (m.dot(r.real()) / m.squaredNorm()) + cplx(0, 1) * m * (m.dot(r.imag()) / m.squaredNorm());
  const RVec scale = o.B.cwiseAbs() * u.cwiseAbs();
  return r.norm() / std::max(scale.norm(), 1e-300);
}

void export_matrix(std::ostream& os, const SpMat& m) {
  for (int k = 0; k < m.outerSize(); ++k)
    for (SpMat::InnerIterator it(m, k); it; ++it)
      fmt::print(os, "{} {} {:.17g} {:.17g}\n", it.row(), it.col(), it.value(), 0.0);
}

void export_matrix(std::ostream& os, const CSpMat& m) {
  for (int k = 0; k < m.outerSize(); ++k)
    for (CSpMat::InnerIterator it(m, k); it; ++it)
      fmt::print(os, "{} {} {:.17g} {:.17g}\n", it.row(), it.col(), it.value().real(),
                 it.value().imag());
}

}  // namespace dynslip
