#pragma once

#include <vector>

#include "dynslip/common.hpp"

namespace dynslip::quad {

struct Rule1D {
  std::vector<double> x;  // on [0, 1]
  std::vector<double> w;
};

struct RuleTri {
  std::vector<Vec2> x;  // reference triangle (0,0), (1,0), (0,1)
  std::vector<double> w;
};

/// Gauss–Legendre rule with n points mapped to [0, 1]; n in {2..20}.
const Rule1D& gauss_legendre(int n);

/// Collapsed (Duffy) product rule, exact for polynomials of degree 2n-2.
const RuleTri& triangle(int n);

}  // namespace dynslip::quad
