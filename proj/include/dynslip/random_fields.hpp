#pragma once

#include <cstdint>

#include "dynslip/evolution.hpp"

namespace dynslip {

/// Generator for member `member` of an ensemble drawn from `seed`. The stream
/// depends only on (seed, member), so ensembles are reproducible under any
/// execution order.
std::uint64_t member_seed(std::uint64_t seed, std::uint64_t member);

/// Smooth random data: f is the Leray projection of a few random trigonometric
/// modes, h a random trigonometric polynomial in arclength.
Data random_smooth_data(const OperatorBundle& b, std::uint64_t seed, std::uint64_t member, int n_modes = 3);

/// Tied divergence-free state with smooth random velocity.
State random_smooth_state(const OperatorBundle& b, std::uint64_t seed, std::uint64_t member, int n_modes = 3);

/// F(t) = Σ_j c_j(t) D_j with three random smooth data D_j and smooth random
/// time profiles c_j.
Forcing random_smooth_forcing(const OperatorBundle& b, std::uint64_t seed, std::uint64_t member);

}  // namespace dynslip
