#pragma once

#include <memory>

#include "dynslip/common.hpp"

namespace dynslip {

/// Sparse LU factorization (UMFPACK) of the bordered saddle-point matrix
///
///     [  A   -Bᵀ  0 ]
///     [ -B    0   m ]
///     [  0    mᵀ  0 ]
///
/// where A is the (complex) velocity block, B the divergence coupling and m
/// the pressure-mean functional. The scalar multiplier absorbs the constant
/// pressure mode, so the velocity is divergence free against mean-zero
/// pressures and the pressure has zero mean.
///
/// Immutable after construction; solve() may be called concurrently.
class SaddleFactorization {
 public:
  struct Solution {
    CVec u;
    CVec p;
    cplx multiplier;
  };

  SaddleFactorization(const CSpMat& A, const SpMat& B, const RVec& mean);
  ~SaddleFactorization();
  SaddleFactorization(const SaddleFactorization&) = delete;
  SaddleFactorization& operator=(const SaddleFactorization&) = delete;

  int n_velocity() const { return n_u_; }
  int n_pressure() const { return n_p_; }
  int size() const { return n_u_ + n_p_ + 1; }

  Solution solve(const CVec& rhs_u) const;
  Solution solve(const CVec& rhs_u, const CVec& rhs_p) const;
  /// Solve with the full system vector. `adjoint` solves with the conjugate transpose.
  CVec solve_full(const CVec& rhs, bool adjoint = false) const;
  /// Multiply by the full matrix.
  CVec apply_full(const CVec& x) const;

  /// 1-norm condition estimate (Hager/Higham), computed once on first use.
  double condition_estimate() const;

 private:
  struct Impl;
  int n_u_ = 0;
  int n_p_ = 0;
  std::unique_ptr<Impl> impl_;
};

}  // namespace dynslip
