#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "dynslip/spaces.hpp"

namespace dynslip::testing {

/// Assembled operators cached per (domain, h); α and β are rebound cheaply.
inline OperatorBundle bundle(const DomainSpec& d, double h, double alpha = 1.0, double beta = 1.0) {
  static std::map<std::string, std::shared_ptr<const Operators>> cache;
  static std::mutex mu;
  const std::string key = d.id() + "@" + std::to_string(h);
  std::lock_guard<std::mutex> lk(mu);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, assemble(generate_mesh(d, h), 1.0, 1.0).shared_ops()).first;
  return OperatorBundle(it->second, alpha, beta);
}

inline OperatorBundle disk(double h, double alpha = 1.0, double beta = 1.0) {
  return bundle(DomainSpec::disk(1.0), h, alpha, beta);
}

inline OperatorBundle ellipse(double h, double alpha = 1.0, double beta = 1.0) {
  return bundle(DomainSpec::ellipse(2.0, 1.0), h, alpha, beta);
}

inline double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace dynslip::testing
