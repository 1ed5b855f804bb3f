#pragma once

#include <array>
#include <iosfwd>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "dynslip/common.hpp"

namespace dynslip {

struct Disk {
  double radius = 1.0;
};

struct Ellipse {
  double a = 1.0;
  double b = 1.0;
};

/// r(θ) = r0 + Σ_k cos_amp[k-1]·cos(kθ) + sin_amp[k-1]·sin(kθ)
struct FourierBoundary {
  double r0 = 1.0;
  std::vector<double> cos_amp;
  std::vector<double> sin_amp;
};

/// A smooth star-shaped domain centered at the origin. Validated on construction.
class DomainSpec {
 public:
  using Shape = std::variant<Disk, Ellipse, FourierBoundary>;

  explicit DomainSpec(Shape shape);

  static DomainSpec disk(double radius) { return DomainSpec(Disk{radius}); }
  static DomainSpec ellipse(double a, double b) { return DomainSpec(Ellipse{a, b}); }
  static DomainSpec fourier(double r0, std::vector<double> cos_amp,
                            std::vector<double> sin_amp = {}) {
    return DomainSpec(FourierBoundary{r0, std::move(cos_amp), std::move(sin_amp)});
  }

  const Shape& shape() const { return shape_; }

  // Curve c(t), t in [0, 2π), counterclockwise, with first and second derivatives.
  Vec2 point(double t) const;
  Vec2 d1(double t) const;
  Vec2 d2(double t) const;

  /// Analytic enclosed area.
  double area() const;
  bool contains(const Vec2& x) const;

  /// Short identifier, e.g. "disk(1)".
  std::string id() const;

 private:
  Shape shape_;
};

bool is_axisymmetric(const DomainSpec& spec);

struct BoundaryFrame {
  Vec2 position;
  Vec2 normal;   // outward
  Vec2 tangent;  // counterclockwise
  double curvature = 0.0;
};

/// Arclength parametrization of the boundary curve with a sample table at
/// equispaced arclength. Evaluation at arbitrary arclength goes through an
/// inverse of the accumulated panel quadrature.
class BoundaryParam {
 public:
  BoundaryParam(DomainSpec spec, int n_samples);

  const DomainSpec& spec() const { return spec_; }
  double length() const { return length_; }
  int size() const { return static_cast<int>(s_.size()); }

  const std::vector<double>& arclength() const { return s_; }
  const std::vector<Vec2>& positions() const { return x_; }
  const std::vector<Vec2>& normals() const { return nu_; }
  const std::vector<Vec2>& tangents() const { return tau_; }
  const std::vector<double>& curvatures() const { return kappa_; }

  /// Curve parameter t with s(t) = s (s taken modulo the length).
  double parameter_at(double s) const;
  BoundaryFrame at(double s) const;
  BoundaryFrame at_parameter(double t) const;

 private:
  double arclength_of(double t) const;

  DomainSpec spec_;
  double length_ = 0.0;
  std::vector<double> panel_t_;    // panel breakpoints in t
  std::vector<double> panel_s_;    // accumulated arclength at breakpoints
  std::vector<double> s_;
  std::vector<Vec2> x_, nu_, tau_;
  std::vector<double> kappa_;
};

BoundaryParam build_boundary_param(const DomainSpec& spec, int n_samples);

/// Quadratic (six-node) triangulation. Nodes 0..n_vertices-1 are the mesh
/// vertices, followed by one node per edge. Boundary edges are curved: their
/// middle node sits on the exact curve at the arclength midpoint.
struct Mesh {
  struct BoundaryEdge {
    int v0 = -1, v1 = -1;       // vertices, counterclockwise order
    int mid = -1;               // middle node
    int triangle = -1;
    int local_edge = -1;        // 0: (0,1), 1: (1,2), 2: (2,0)
    double s0 = 0.0, s1 = 0.0;  // arclength of v0 and v1 (s1 may equal length for wrap)
  };

  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;  // counterclockwise
  std::vector<Vec2> nodes;                    // vertices then edge nodes
  std::vector<std::array<int, 6>> elements;   // v0 v1 v2 m01 m12 m20
  std::vector<BoundaryEdge> boundary_edges;   // in boundary order

  // Per boundary node: node id, arclength and exact frame.
  std::vector<int> boundary_nodes;
  std::vector<double> boundary_s;
  std::vector<Vec2> boundary_normal;
  std::vector<Vec2> boundary_tangent;

  double h = 0.0;
  double boundary_length = 0.0;
  std::string domain;         // DomainSpec::id()
  bool axisymmetric = false;  // domain is a disk

  int n_vertices() const { return static_cast<int>(vertices.size()); }
  int n_nodes() const { return static_cast<int>(nodes.size()); }
  int n_triangles() const { return static_cast<int>(triangles.size()); }
};

Mesh generate_mesh(const DomainSpec& spec, double h);
Mesh generate_mesh(const BoundaryParam& bp, double h);

/// Area of the curved mesh (sum of isoparametric Jacobian integrals).
double mesh_area(const Mesh& mesh);
/// Smallest interior angle (degrees) of the straight-sided vertex triangles.
double min_angle_degrees(const Mesh& mesh);

/// Versioned text format; doubles are written as hexfloats so a
/// read/write cycle reproduces the file byte for byte.
void write_mesh(std::ostream& os, const Mesh& mesh);
Mesh read_mesh(std::istream& is);
std::string serialize_mesh(const Mesh& mesh);

}  // namespace dynslip
