#include "dynslip/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "delaunay.hpp"
#include "dynslip/element.hpp"
#include "dynslip/quadrature.hpp"

namespace dynslip {

// ---------------------------------------------------------------------------
// DomainSpec

namespace {

double fourier_radius(const FourierBoundary& f, double t, int deriv) {
  double r = deriv == 0 ? f.r0 : 0.0;
  for (std::size_t k = 0; k < std::max(f.cos_amp.size(), f.sin_amp.size()); ++k) {
    const double m = static_cast<double>(k + 1);
    const double a = k < f.cos_amp.size() ? f.cos_amp[k] : 0.0;
    const double b = k < f.sin_amp.size() ? f.sin_amp[k] : 0.0;
    const double c = std::cos(m * t), s = std::sin(m * t);
    switch (deriv) {
      case 0: r += a * c + b * s; break;
      case 1: r += m * (-a * s + b * c); break;
      default: r += -m * m * (a * c + b * s); break;
    }
  }
  return r;
}

}  // namespace

DomainSpec::DomainSpec(Shape shape) : shape_(std::move(shape)) {
  std::visit(
      [](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Disk>) {
          if (!(s.radius > 0.0)) throw InvalidArgument("disk radius must be positive");
        } else if constexpr (std::is_same_v<T, Ellipse>) {
          if (!(s.a > 0.0) || !(s.b > 0.0))
            throw InvalidArgument("ellipse semi-axes must be positive");
        } else {
          if (!(s.r0 > 0.0)) throw InvalidArgument("fourier_boundary r0 must be positive");
          double total = 0.0;
          for (double a : s.cos_amp) total += std::abs(a);
          for (double b : s.sin_amp) total += std::abs(b);
          if (total > 0.9 * s.r0)
            throw InvalidArgument(fmt::format(
                "fourier_boundary amplitudes sum to {} > 0.9*r0; r(theta) >= 0.1*r0 "
                "is not guaranteed",
                total));
        }
      },
      shape_);
}

Vec2 DomainSpec::point(double t) const {
  return std::visit(
      [t](const auto& s) -> Vec2 {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Disk>) {
          return s.radius * Vec2(std::cos(t), std::sin(t));
        } else if constexpr (std::is_same_v<T, Ellipse>) {
          return {s.a * std::cos(t), s.b * std::sin(t)};
        } else {
          return fourier_radius(s, t, 0) * Vec2(std::cos(t), std::sin(t));
        }
      },
      shape_);
}

Vec2 DomainSpec::d1(double t) const {
  return std::visit(
      [t](const auto& s) -> Vec2 {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Disk>) {
          return s.radius * Vec2(-std::sin(t), std::cos(t));
        } else if constexpr (std::is_same_v<T, Ellipse>) {
          return {-s.a * std::sin(t), s.b * std::cos(t)};
        } else {
          const double r = fourier_radius(s, t, 0), dr = fourier_radius(s, t, 1);
          const Vec2 e(std::cos(t), std::sin(t)), n(-std::sin(t), std::cos(t));
          return dr * e + r * n;
        }
      },
      shape_);
}

Vec2 DomainSpec::d2(double t) const {
  return std::visit(
      [t](const auto& s) -> Vec2 {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Disk>) {
          return -s.radius * Vec2(std::cos(t), std::sin(t));
        } else if constexpr (std::is_same_v<T, Ellipse>) {
          return {-s.a * std::cos(t), -s.b * std::sin(t)};
        } else {
          const double r = fourier_radius(s, t, 0), dr = fourier_radius(s, t, 1),
                       ddr = fourier_radius(s, t, 2);
          const Vec2 e(std::cos(t), std::sin(t)), n(-std::sin(t), std::cos(t));
          return (ddr - r) * e + 2.0 * dr * n;
        }
      },
      shape_);
}

double DomainSpec::area() const {
  return std::visit(
      [](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Disk>) {
          return kPi * s.radius * s.radius;
        } else if constexpr (std::is_same_v<T, Ellipse>) {
          return kPi * s.a * s.b;
        } else {
          // (1/2)∫ r² dθ
          double sum = s.r0 * s.r0;
          for (double a : s.cos_amp) sum += 0.5 * a * a;
          for (double b : s.sin_amp) sum += 0.5 * b * b;
          return kPi * sum;
        }
      },
      shape_);
}

bool DomainSpec::contains(const Vec2& x) const {
  return std::visit(
      [&x](const auto& s) -> bool {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Disk>) {
          return x.norm() < s.radius;
        } else if constexpr (std::is_same_v<T, Ellipse>) {
          return std::pow(x.x() / s.a, 2) + std::pow(x.y() / s.b, 2) < 1.0;
        } else {
          return x.norm() < fourier_radius(s, std::atan2(x.y(), x.x()), 0);
        }
      },
      shape_);
}

std::string DomainSpec::id() const {
  return std::visit(
      [](const auto& s) -> std::string {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Disk>) {
          return fmt::format("disk({})", s.radius);
        } else if constexpr (std::is_same_v<T, Ellipse>) {
          return fmt::format("ellipse({},{})", s.a, s.b);
        } else {
          return fmt::format("fourier({};c={};s={})", s.r0, fmt::join(s.cos_amp, ","),
                             fmt::join(s.sin_amp, ","));
        }
      },
      shape_);
}

bool is_axisymmetric(const DomainSpec& spec) {
  return std::visit(
      [](const auto& s) -> bool {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Disk>) {
          return true;
        } else if constexpr (std::is_same_v<T, Ellipse>) {
          return s.a == s.b;
        } else {
          auto zero = [](double v) { return v == 0.0; };
          return std::all_of(s.cos_amp.begin(), s.cos_amp.end(), zero) &&
                 std::all_of(s.sin_amp.begin(), s.sin_amp.end(), zero);
        }
      },
      spec.shape());
}

// ---------------------------------------------------------------------------
// BoundaryParam

namespace {
constexpr int kPanelGauss = 12;
}

BoundaryParam::BoundaryParam(DomainSpec spec, int n_samples) : spec_(std::move(spec)) {
  if (n_samples < 16) throw InvalidArgument("build_boundary_param: n_samples must be >= 16");

  const int panels = std::max(256, 4 * n_samples);
  const auto& g = quad::gauss_legendre(kPanelGauss);
  panel_t_.resize(static_cast<std::size_t>(panels + 1));
  panel_s_.resize(static_cast<std::size_t>(panels + 1));
  panel_s_[0] = 0.0;
  for (int p = 0; p <= panels; ++p) panel_t_[static_cast<std::size_t>(p)] = 2 * kPi * p / panels;
  for (int p = 0; p < panels; ++p) {
    const double t0 = panel_t_[static_cast<std::size_t>(p)];
    const double dt = panel_t_[static_cast<std::size_t>(p + 1)] - t0;
    double sum = 0.0;
    for (std::size_t q = 0; q < g.x.size(); ++q) sum += g.w[q] * spec_.d1(t0 + dt * g.x[q]).norm();
    panel_s_[static_cast<std::size_t>(p + 1)] = panel_s_[static_cast<std::size_t>(p)] + dt * sum;
  }
  length_ = panel_s_.back();

  s_.resize(static_cast<std::size_t>(n_samples));
  x_.resize(s_.size());
  nu_.resize(s_.size());
  tau_.resize(s_.size());
  kappa_.resize(s_.size());
  for (int i = 0; i < n_samples; ++i) {
    const double s = length_ * i / n_samples;
    const auto f = at(s);
    s_[static_cast<std::size_t>(i)] = s;
    x_[static_cast<std::size_t>(i)] = f.position;
    nu_[static_cast<std::size_t>(i)] = f.normal;
    tau_[static_cast<std::size_t>(i)] = f.tangent;
    kappa_[static_cast<std::size_t>(i)] = f.curvature;
  }
}

double BoundaryParam::arclength_of(double t) const {
  const double two_pi = 2 * kPi;
  const int panels = static_cast<int>(panel_t_.size()) - 1;
  int p = static_cast<int>(std::floor(t / two_pi * panels));
  p = std::clamp(p, 0, panels - 1);
  const double t0 = panel_t_[static_cast<std::size_t>(p)];
  const double dt = t - t0;
  const auto& g = quad::gauss_legendre(kPanelGauss);
  double sum = 0.0;
  for (std::size_t q = 0; q < g.x.size(); ++q) sum += g.w[q] * spec_.d1(t0 + dt * g.x[q]).norm();
  return panel_s_[static_cast<std::size_t>(p)] + dt * sum;
}

double BoundaryParam::parameter_at(double s) const {
  s = std::fmod(s, length_);
  if (s < 0) s += length_;
  auto it = std::upper_bound(panel_s_.begin(), panel_s_.end(), s);
  const auto p = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - panel_s_.begin() - 1, 0));
  const double ta = panel_t_[p], tb = panel_t_[std::min(p + 1, panel_t_.size() - 1)];
  const double sa = panel_s_[p], sb = panel_s_[std::min(p + 1, panel_s_.size() - 1)];
  double t = sb > sa ? ta + (tb - ta) * (s - sa) / (sb - sa) : ta;
  for (int iter = 0; iter < 50; ++iter) {
    const double f = arclength_of(t) - s;
    const double step = f / spec_.d1(t).norm();
    t -= step;
    t = std::clamp(t, ta, tb);
    if (std::abs(step) < 1e-15 * (1.0 + std::abs(t))) break;
  }
  return t;
}

BoundaryFrame BoundaryParam::at_parameter(double t) const {
  const Vec2 d1 = spec_.d1(t), d2 = spec_.d2(t);
  const double speed = d1.norm();
  BoundaryFrame f;
  f.position = spec_.point(t);
  f.tangent = d1 / speed;
  f.normal = Vec2(f.tangent.y(), -f.tangent.x());
  f.curvature = (d1.x() * d2.y() - d1.y() * d2.x()) / (speed * speed * speed);
  return f;
}

BoundaryFrame BoundaryParam::at(double s) const { return at_parameter(parameter_at(s)); }

BoundaryParam build_boundary_param(const DomainSpec& spec, int n_samples) {
  return BoundaryParam(spec, n_samples);
}

// ---------------------------------------------------------------------------
// Mesh generation

namespace {

double segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double t = std::clamp((p - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

double triangle_min_angle(const Vec2& a, const Vec2& b, const Vec2& c) {
  auto angle = [](const Vec2& p, const Vec2& q, const Vec2& r) {
    const Vec2 u = q - p, v = r - p;
    return std::acos(std::clamp(u.dot(v) / (u.norm() * v.norm()), -1.0, 1.0));
  };
  return std::min({angle(a, b, c), angle(b, c, a), angle(c, a, b)}) * 180.0 / kPi;
}

std::pair<int, int> edge_key(int a, int b) { return a < b ? std::pair{a, b} : std::pair{b, a}; }

double signed_area(const Vec2& a, const Vec2& b, const Vec2& c) {
  return 0.5 * ((b - a).x() * (c - a).y() - (b - a).y() * (c - a).x());
}

// Triangulate and drop triangles outside the domain.
std::vector<std::array<int, 3>> triangulate(const DomainSpec& spec, const std::vector<Vec2>& pts) {
  auto tris = detail::delaunay(pts);
  std::erase_if(tris, [&](const std::array<int, 3>& t) {
    const Vec2 c = (pts[static_cast<std::size_t>(t[0])] + pts[static_cast<std::size_t>(t[1])] +
                    pts[static_cast<std::size_t>(t[2])]) /
                   3.0;
    return !spec.contains(c) ||
           signed_area(pts[static_cast<std::size_t>(t[0])], pts[static_cast<std::size_t>(t[1])],
                       pts[static_cast<std::size_t>(t[2])]) <= 0.0;
  });
  return tris;
}

}  // namespace

Mesh generate_mesh(const DomainSpec& spec, double h) {
  return generate_mesh(BoundaryParam(spec, 1024), h);
}

Mesh generate_mesh(const BoundaryParam& bp, double h) {
  const DomainSpec& spec = bp.spec();
  const double L = bp.length();
  if (!(h > 0.0) || !(h < L / 8.0))
    throw InvalidArgument(fmt::format("generate_mesh: need 0 < h < L/8 (h = {}, L = {})", h, L));

  const int nb = std::max(8, static_cast<int>(std::lround(L / h)));
  std::vector<Vec2> pts;
  std::vector<double> bs;
  for (int i = 0; i < nb; ++i) {
    const double s = L * i / nb;
    bs.push_back(s);
    pts.push_back(bp.at(s).position);
  }

  // Dense polyline for distance queries.
  std::vector<Vec2> poly;
  const int dense = 8 * nb;
  for (int i = 0; i < dense; ++i) poly.push_back(bp.at(L * i / dense).position);
  auto boundary_distance = [&](const Vec2& p) {
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < poly.size(); ++i)
      d = std::min(d, segment_distance(p, poly[i], poly[(i + 1) % poly.size()]));
    return d;
  };

  // Interior points from a triangular lattice, kept away from the boundary.
  Vec2 lo = poly[0], hi = poly[0];
  for (const auto& p : poly) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const double dy = h * std::sqrt(3.0) / 2.0;
  const int jmin = static_cast<int>(std::floor(lo.y() / dy)) - 1;
  const int jmax = static_cast<int>(std::ceil(hi.y() / dy)) + 1;
  for (int j = jmin; j <= jmax; ++j) {
    const double y = j * dy;
    const double shift = (j & 1) ? 0.5 * h : 0.0;
    const int imin = static_cast<int>(std::floor(lo.x() / h)) - 1;
    const int imax = static_cast<int>(std::ceil(hi.x() / h)) + 1;
    for (int i = imin; i <= imax; ++i) {
      // Tiny deterministic jitter breaks exact lattice cocircularity.
      const double jit = 1e-7 * h * std::sin(12.9898 * i + 78.233 * j);
      const Vec2 p(i * h + shift + jit, y - jit);
      if (!spec.contains(p)) continue;
      if (boundary_distance(p) < 0.6 * h) continue;
      pts.push_back(p);
    }
  }
  const int n_total = static_cast<int>(pts.size());

  // Laplacian smoothing of interior points with retriangulation.
  std::vector<std::array<int, 3>> tris = triangulate(spec, pts);
  for (int sweep = 0; sweep < 8; ++sweep) {
    std::vector<Vec2> acc(pts.size(), Vec2::Zero());
    std::vector<int> cnt(pts.size(), 0);
    for (const auto& t : tris) {
      for (int e = 0; e < 3; ++e) {
        const int a = t[static_cast<std::size_t>(e)], b = t[static_cast<std::size_t>((e + 1) % 3)];
        acc[static_cast<std::size_t>(a)] += pts[static_cast<std::size_t>(b)];
        cnt[static_cast<std::size_t>(a)]++;
        acc[static_cast<std::size_t>(b)] += pts[static_cast<std::size_t>(a)];
        cnt[static_cast<std::size_t>(b)]++;
      }
    }
    for (int i = nb; i < n_total; ++i) {
      const auto k = static_cast<std::size_t>(i);
      if (cnt[k] == 0) continue;
      const Vec2 target = acc[k] / cnt[k];
      if (spec.contains(target)) pts[k] = target;
    }
    tris = triangulate(spec, pts);
  }

  // Validate topology: every boundary segment present, and the edges used by
  // exactly one triangle are precisely the boundary segments.
  std::map<std::pair<int, int>, int> edge_use;
  for (const auto& t : tris)
    for (int e = 0; e < 3; ++e) {
      edge_use[edge_key(t[static_cast<std::size_t>(e)], t[static_cast<std::size_t>((e + 1) % 3)])]++;
    }
  for (int i = 0; i < nb; ++i) {
    const auto [a, b] = edge_key(i, (i + 1) % nb);
    auto it = edge_use.find({a, b});
    if (it == edge_use.end() || it->second != 1)
      throw MeshingError(fmt::format("generate_mesh: boundary segment {}-{} not recovered", i,
                                     (i + 1) % nb),
                         0.5 * (pts[static_cast<std::size_t>(a)] + pts[static_cast<std::size_t>(b)]));
  }
  for (const auto& [e, count] : edge_use) {
    const bool is_boundary = (e.second == e.first + 1 && e.second < nb) ||
                             (e.first == 0 && e.second == nb - 1);
    if (count == 1 && !is_boundary)
      throw MeshingError("generate_mesh: triangulation has a hole or dangling edge",
                         0.5 * (pts[static_cast<std::size_t>(e.first)] +
                                pts[static_cast<std::size_t>(e.second)]));
    if (count > 2)
      throw MeshingError("generate_mesh: overlapping triangles",
                         pts[static_cast<std::size_t>(e.first)]);
  }
  for (const auto& t : tris) {
    const auto& a = pts[static_cast<std::size_t>(t[0])];
    const auto& b = pts[static_cast<std::size_t>(t[1])];
    const auto& c = pts[static_cast<std::size_t>(t[2])];
    if (triangle_min_angle(a, b, c) < 20.0)
      throw MeshingError(fmt::format("generate_mesh: triangle angle {:.2f} deg below 20",
                                     triangle_min_angle(a, b, c)),
                         (a + b + c) / 3.0);
  }

  Mesh mesh;
  mesh.h = h;
  mesh.boundary_length = L;
  mesh.domain = spec.id();
  mesh.axisymmetric = is_axisymmetric(spec);
  mesh.vertices = pts;
  mesh.triangles = tris;
  mesh.nodes = pts;

  // Edge nodes. Boundary edges are numbered first, in boundary order, so that
  // the boundary node sequence v0, m0, v1, m1, ... is easy to read off.
  std::map<std::pair<int, int>, int> edge_node;
  for (int i = 0; i < nb; ++i) {
    const double s0 = bs[static_cast<std::size_t>(i)];
    const double s1 = (i + 1 < nb) ? bs[static_cast<std::size_t>(i + 1)] : L;
    const int node = mesh.n_nodes();
    mesh.nodes.push_back(bp.at(0.5 * (s0 + s1)).position);
    edge_node[edge_key(i, (i + 1) % nb)] = node;
    Mesh::BoundaryEdge be;
    be.v0 = i;
    be.v1 = (i + 1) % nb;
    be.mid = node;
    be.s0 = s0;
    be.s1 = s1;
    mesh.boundary_edges.push_back(be);
  }
  for (int t = 0; t < static_cast<int>(tris.size()); ++t) {
    const auto& tri = tris[static_cast<std::size_t>(t)];
    std::array<int, 6> el{tri[0], tri[1], tri[2], -1, -1, -1};
    for (int e = 0; e < 3; ++e) {
      const int a = tri[static_cast<std::size_t>(e)], b = tri[static_cast<std::size_t>((e + 1) % 3)];
      const auto key = edge_key(a, b);
      auto it = edge_node.find(key);
      if (it == edge_node.end()) {
        const int node = mesh.n_nodes();
        mesh.nodes.push_back(0.5 * (pts[static_cast<std::size_t>(a)] + pts[static_cast<std::size_t>(b)]));
        it = edge_node.emplace(key, node).first;
      }
      el[static_cast<std::size_t>(3 + e)] = it->second;
      if (it->second < nb + mesh.n_vertices()) {
        auto& be = mesh.boundary_edges[static_cast<std::size_t>(it->second - mesh.n_vertices())];
        be.triangle = t;
        be.local_edge = e;
      }
    }
    mesh.elements.push_back(el);
  }

  for (int i = 0; i < nb; ++i) {
    const auto& be = mesh.boundary_edges[static_cast<std::size_t>(i)];
    for (auto [node, s] : {std::pair{be.v0, be.s0}, std::pair{be.mid, 0.5 * (be.s0 + be.s1)}}) {
      const auto f = bp.at(s);
      mesh.boundary_nodes.push_back(node);
      mesh.boundary_s.push_back(s);
      mesh.boundary_normal.push_back(f.normal);
      mesh.boundary_tangent.push_back(f.tangent);
    }
  }
  return mesh;
}

double mesh_area(const Mesh& mesh) {
  const auto& rule = quad::triangle(5);
  double area = 0.0;
  for (const auto& el : mesh.elements) {
    std::array<Vec2, 6> xc;
    for (std::size_t k = 0; k < 6; ++k) xc[k] = mesh.nodes[static_cast<std::size_t>(el[k])];
    for (std::size_t q = 0; q < rule.x.size(); ++q)
      area += rule.w[q] * element::map_point(xc, rule.x[q]).det;
  }
  return area;
}

double min_angle_degrees(const Mesh& mesh) {
  double m = 180.0;
  for (const auto& t : mesh.triangles)
    m = std::min(m, triangle_min_angle(mesh.vertices[static_cast<std::size_t>(t[0])],
                                       mesh.vertices[static_cast<std::size_t>(t[1])],
                                       mesh.vertices[static_cast<std::size_t>(t[2])]));
  return m;
}

// ---------------------------------------------------------------------------
// Mesh IO

namespace {

constexpr const char* kMeshMagic = "dynslip-mesh";
constexpr int kMeshVersion = 1;

std::string hex(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

double parse_double(std::istream& is) {
  std::string tok;
  if (!(is >> tok)) throw Error("read_mesh: unexpected end of input");
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str() || *end != '\0') throw Error("read_mesh: bad number '" + tok + "'");
  return v;
}

int parse_int(std::istream& is) {
  long long v = 0;
  if (!(is >> v)) throw Error("read_mesh: expected integer");
  return static_cast<int>(v);
}

void expect(std::istream& is, const std::string& word) {
  std::string tok;
  if (!(is >> tok) || tok != word)
    throw Error("read_mesh: expected '" + word + "', got '" + tok + "'");
}

}  // namespace

void write_mesh(std::ostream& os, const Mesh& m) {
  os << kMeshMagic << ' ' << kMeshVersion << '\n';
  os << "h " << hex(m.h) << '\n';
  os << "boundary_length " << hex(m.boundary_length) << '\n';
  os << "domain " << m.domain << '\n';
  os << "axisymmetric " << (m.axisymmetric ? 1 : 0) << '\n';
  os << "vertices " << m.vertices.size() << '\n';
  for (const auto& v : m.vertices) os << hex(v.x()) << ' ' << hex(v.y()) << '\n';
  os << "triangles " << m.triangles.size() << '\n';
  for (const auto& t : m.triangles) os << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  os << "nodes " << m.nodes.size() << '\n';
  for (const auto& v : m.nodes) os << hex(v.x()) << ' ' << hex(v.y()) << '\n';
  os << "elements " << m.elements.size() << '\n';
  for (const auto& e : m.elements)
    os << e[0] << ' ' << e[1] << ' ' << e[2] << ' ' << e[3] << ' ' << e[4] << ' ' << e[5] << '\n';
  os << "boundary_edges " << m.boundary_edges.size() << '\n';
  for (const auto& b : m.boundary_edges)
    os << b.v0 << ' ' << b.v1 << ' ' << b.mid << ' ' << b.triangle << ' ' << b.local_edge << ' '
       << hex(b.s0) << ' ' << hex(b.s1) << '\n';
  os << "boundary_nodes " << m.boundary_nodes.size() << '\n';
  for (std::size_t i = 0; i < m.boundary_nodes.size(); ++i)
    os << m.boundary_nodes[i] << ' ' << hex(m.boundary_s[i]) << ' ' << hex(m.boundary_normal[i].x())
       << ' ' << hex(m.boundary_normal[i].y()) << ' ' << hex(m.boundary_tangent[i].x()) << ' '
       << hex(m.boundary_tangent[i].y()) << '\n';
  os << "end\n";
}

Mesh read_mesh(std::istream& is) {
  expect(is, kMeshMagic);
  if (const int v = parse_int(is); v != kMeshVersion)
    throw Error(fmt::format("read_mesh: unsupported version {}", v));
  Mesh m;
  expect(is, "h");
  m.h = parse_double(is);
  expect(is, "boundary_length");
  m.boundary_length = parse_double(is);
  expect(is, "domain");
  if (!(is >> m.domain)) throw Error("read_mesh: missing domain id");
  expect(is, "axisymmetric");
  m.axisymmetric = parse_int(is) != 0;
  expect(is, "vertices");
  m.vertices.resize(static_cast<std::size_t>(parse_int(is)));
  for (auto& v : m.vertices) {
    v.x() = parse_double(is);
    v.y() = parse_double(is);
  }
  expect(is, "triangles");
  m.triangles.resize(static_cast<std::size_t>(parse_int(is)));
  for (auto& t : m.triangles)
    for (auto& i : t) i = parse_int(is);
  expect(is, "nodes");
  m.nodes.resize(static_cast<std::size_t>(parse_int(is)));
  for (auto& v : m.nodes) {
    v.x() = parse_double(is);
    v.y() = parse_double(is);
  }
  expect(is, "elements");
  m.elements.resize(static_cast<std::size_t>(parse_int(is)));
  for (auto& e : m.elements)
    for (auto& i : e) i = parse_int(is);
  expect(is, "boundary_edges");
  m.boundary_edges.resize(static_cast<std::size_t>(parse_int(is)));
  for (auto& b : m.boundary_edges) {
    b.v0 = parse_int(is);
    b.v1 = parse_int(is);
    b.mid = parse_int(is);
    b.triangle = parse_int(is);
    b.local_edge = parse_int(is);
    b.s0 = parse_double(is);
    b.s1 = parse_double(is);
  }
  expect(is, "boundary_nodes");
  const auto nbn = static_cast<std::size_t>(parse_int(is));
  m.boundary_nodes.resize(nbn);
  m.boundary_s.resize(nbn);
  m.boundary_normal.resize(nbn);
  m.boundary_tangent.resize(nbn);
  for (std::size_t i = 0; i < nbn; ++i) {
    m.boundary_nodes[i] = parse_int(is);
    m.boundary_s[i] = parse_double(is);
    m.boundary_normal[i].x() = parse_double(is);
    m.boundary_normal[i].y() = parse_double(is);
    m.boundary_tangent[i].x() = parse_double(is);
    m.boundary_tangent[i].y() = parse_double(is);
  }
  expect(is, "end");
  return m;
}

std::string serialize_mesh(const Mesh& mesh) {
  std::ostringstream os;
  write_mesh(os, mesh);
  return os.str();
}

}  // namespace dynslip
