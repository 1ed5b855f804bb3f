#include "delaunay.hpp"

#include <algorithm>
#include <map>
#include <utility>

namespace dynslip::detail {

namespace {

struct Tri {
  std::array<int, 3> v;
  Vec2 center;
  double r2;
  bool alive;
};

double orient(const Vec2& a, const Vec2& b, const Vec2& c) {
  return (b - a).x() * (c - a).y() - (b - a).y() * (c - a).x();
}

Tri make_tri(const std::vector<Vec2>& p, int a, int b, int c) {
  if (orient(p[a], p[b], p[c]) < 0) std::swap(b, c);
  const Vec2& A = p[a];
  const Vec2& B = p[b];
  const Vec2& C = p[c];
  const double d = 2.0 * (A.x() * (B.y() - C.y()) + B.x() * (C.y() - A.y()) +
                          C.x() * (A.y() - B.y()));
  const double a2 = A.squaredNorm(), b2 = B.squaredNorm(), c2 = C.squaredNorm();
  Vec2 center((a2 * (B.y() - C.y()) + b2 * (C.y() - A.y()) + c2 * (A.y() - B.y())) / d,
              (a2 * (C.x() - B.x()) + b2 * (A.x() - C.x()) + c2 * (B.x() - A.x())) / d);
  return {{a, b, c}, center, (A - center).squaredNorm(), true};
}

}  // namespace

std::vector<std::array<int, 3>> delaunay(const std::vector<Vec2>& input) {
  const int n = static_cast<int>(input.size());
  if (n < 3) return {};

  Vec2 lo = input[0], hi = input[0];
  for (const auto& p : input) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const Vec2 mid = 0.5 * (lo + hi);
  const double span = std::max((hi - lo).maxCoeff(), 1e-12);

  std::vector<Vec2> pts = input;
  pts.emplace_back(mid + Vec2(-20 * span, -20 * span));
  pts.emplace_back(mid + Vec2(20 * span, -20 * span));
  pts.emplace_back(mid + Vec2(0.0, 20 * span));

  std::vector<Tri> tris;
  tris.reserve(static_cast<std::size_t>(4 * n));
  tris.push_back(make_tri(pts, n, n + 1, n + 2));

  std::vector<int> bad;
  std::map<std::pair<int, int>, int> edge_count;
  for (int i = 0; i < n; ++i) {
    const Vec2& p = pts[static_cast<std::size_t>(i)];
    bad.clear();
    for (int t = 0; t < static_cast<int>(tris.size()); ++t) {
      const Tri& tr = tris[static_cast<std::size_t>(t)];
      if (!tr.alive) continue;
      if ((p - tr.center).squaredNorm() < tr.r2 * (1.0 - 1e-12)) bad.push_back(t);
    }
    edge_count.clear();
    for (int t : bad) {
      auto& tr = tris[static_cast<std::size_t>(t)];
      tr.alive = false;
      for (int e = 0; e < 3; ++e) {
        const int a = tr.v[static_cast<std::size_t>(e)];
        const int b = tr.v[static_cast<std::size_t>((e + 1) % 3)];
        // Keep the orientation of the first occurrence.
        auto key = std::minmax(a, b);
        auto it = edge_count.find({key.first, key.second});
        if (it == edge_count.end())
          edge_count.emplace(std::pair{key.first, key.second}, a == key.first ? 1 : -1);
        else
          it->second = 0;
      }
    }
    for (const auto& [edge, sign] : edge_count) {
      if (sign == 0) continue;
      const int a = sign > 0 ? edge.first : edge.second;
      const int b = sign > 0 ? edge.second : edge.first;
      tris.push_back(make_tri(pts, a, b, i));
    }
    // Compact occasionally so the scan stays proportional to live triangles.
    if (tris.size() > static_cast<std::size_t>(8 * (i + 16))) {
      std::erase_if(tris, [](const Tri& t) { return !t.alive; });
    }
  }

  std::vector<std::array<int, 3>> out;
  for (const auto& t : tris) {
    if (!t.alive) continue;
    if (t.v[0] >= n || t.v[1] >= n || t.v[2] >= n) continue;
    out.push_back(t.v);
  }
  return out;
}

}  // namespace dynslip::detail
