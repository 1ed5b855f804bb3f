#include "dynslip/random_fields.hpp"

#include <cmath>
#include <memory>
#include <random>

namespace dynslip {

std::uint64_t member_seed(std::uint64_t seed, std::uint64_t member) {
  // splitmix64 of the pair
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (member + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

namespace {

CVec random_velocity(const OperatorBundle& b, std::mt19937_64& rng, int n_modes) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  struct Mode {
    double kx, ky, ph, ax, ay;
  };
  std::vector<Mode> modes;
  for (int j = 0; j < n_modes; ++j) modes.push_back({2 * U(rng), 2 * U(rng), kPi * U(rng), U(rng), U(rng)});
  const CVec f = interpolate_velocity(b, [&](const Vec2& x) {
    Eigen::Vector2cd v = Eigen::Vector2cd::Zero();
    for (const auto& m : modes) {
      const double s = std::sin(m.kx * x.x() + m.ky * x.y() + m.ph);
      v += Eigen::Vector2cd(m.ax * s, m.ay * s);
    }
    // add a rotational part so the divergence-free projection is never tiny
    return Eigen::Vector2cd(v[0] - 0.5 * x.y(), v[1] + 0.5 * x.x());
  });
  return leray_project(b, f);
}

BoundaryScalar random_boundary(const OperatorBundle& b, std::mt19937_64& rng, int n_modes) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  const double L = b.ops().length;
  std::vector<double> ac, as;
  for (int k = 0; k <= n_modes; ++k) {
    ac.push_back(U(rng) / (1.0 + k));
    as.push_back(U(rng) / (1.0 + k));
  }
  return interpolate_boundary(b, [&](const Vec2&, double s) {
    double v = 0.0;
    for (int k = 0; k <= n_modes; ++k) {
      const double w = 2 * kPi * k * s / L;
      v += ac[static_cast<std::size_t>(k)] * std::cos(w) + as[static_cast<std::size_t>(k)] * std::sin(w);
    }
    return cplx(v);
  });
}

}  // namespace

Data random_smooth_data(const OperatorBundle& b, std::uint64_t seed, std::uint64_t member, int n_modes) {
  std::mt19937_64 rng(member_seed(seed, member));
  Data d;
  d.f = random_velocity(b, rng, n_modes);
  d.h = random_boundary(b, rng, n_modes);
  return d;
}

State random_smooth_state(const OperatorBundle& b, std::uint64_t seed, std::uint64_t member, int n_modes) {
  std::mt19937_64 rng(member_seed(seed, member));
  return make_tied(b, random_velocity(b, rng, n_modes));
}

Forcing random_smooth_forcing(const OperatorBundle& b, std::uint64_t seed, std::uint64_t member) {
  std::mt19937_64 rng(member_seed(seed, member));
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  auto parts = std::make_shared<std::vector<Data>>();
  std::vector<std::array<double, 3>> prof;
  for (std::uint64_t j = 0; j < 3; ++j) {
    parts->push_back(random_smooth_data(b, rng(), j));
    prof.push_back({U(rng), 1.0 + 2.0 * std::abs(U(rng)), kPi * U(rng)});
  }
  return [parts, prof](double t) {
    Data d{CVec::Zero((*parts)[0].f.size()), BoundaryScalar(CVec::Zero((*parts)[0].h.size()))};
    for (std::size_t j = 0; j < parts->size(); ++j) {
      const double c = 1.0 + prof[j][0] * std::cos(prof[j][1] * t + prof[j][2]);
      d.f += c * (*parts)[j].f;
      d.h.values += c * (*parts)[j].h.values;
    }
    return d;
  };
}

}  // namespace dynslip
