#include "dynslip/quadrature.hpp"

#include <array>
#include <map>
#include <mutex>

#include <boost/math/quadrature/gauss.hpp>

namespace dynslip::quad {

namespace {

template <int N>
Rule1D make_gauss() {
  using G = boost::math::quadrature::gauss<double, N>;
  const auto& a = G::abscissa();
  const auto& w = G::weights();
  Rule1D r;
  // abscissa() holds the non-negative half of the symmetric rule.
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0.0) {
      r.x.push_back(0.5);
      r.w.push_back(0.5 * w[i]);
      continue;
    }
    r.x.push_back(0.5 * (1.0 - a[i]));
    r.w.push_back(0.5 * w[i]);
    r.x.push_back(0.5 * (1.0 + a[i]));
    r.w.push_back(0.5 * w[i]);
  }
  return r;
}

template <int... Ns>
std::array<Rule1D, sizeof...(Ns)> make_all(std::integer_sequence<int, Ns...>) {
  return {make_gauss<Ns + 2>()...};
}

}  // namespace

const Rule1D& gauss_legendre(int n) {
  static const auto rules = make_all(std::make_integer_sequence<int, 19>{});
  if (n < 2 || n > 20) throw InvalidArgument("gauss_legendre: n must be in [2, 20]");
  return rules[static_cast<std::size_t>(n - 2)];
}

const RuleTri& triangle(int n) {
  static std::mutex mu;
  static std::map<int, RuleTri> cache;
  std::lock_guard lock(mu);
  if (auto it = cache.find(n); it != cache.end()) return it->second;
  const Rule1D& g = gauss_legendre(n);
  RuleTri r;
  for (std::size_t i = 0; i < g.x.size(); ++i) {
    for (std::size_t j = 0; j < g.x.size(); ++j) {
      const double u = g.x[i];
      const double v = g.x[j];
      r.x.emplace_back(u, (1.0 - u) * v);
      r.w.push_back(g.w[i] * g.w[j] * (1.0 - u));
    }
  }
  return cache.emplace(n, std::move(r)).first->second;
}

}  // namespace dynslip::quad
