#include "dynslip/saddle.hpp"

#include <mutex>
#include <vector>

#include <fmt/format.h>
#include <umfpack.h>

namespace dynslip {

struct SaddleFactorization::Impl {
  std::vector<SuiteSparse_long> ap, ai;
  std::vector<cplx> ax;
  void* symbolic = nullptr;
  void* numeric = nullptr;
  double control[UMFPACK_CONTROL];
  double norm1 = 0.0;
  mutable std::once_flag cond_once;
  mutable double cond = 0.0;

  ~Impl() {
    if (numeric) umfpack_zl_free_numeric(&numeric);
    if (symbolic) umfpack_zl_free_symbolic(&symbolic);
  }

  double* values() { return reinterpret_cast<double*>(ax.data()); }
  const double* values() const { return reinterpret_cast<const double*>(ax.data()); }

  void solve(int sys, const cplx* b, cplx* x) const {
    double info[UMFPACK_INFO];
    const auto status = umfpack_zl_solve(sys, ap.data(), ai.data(), values(), nullptr,
                                         reinterpret_cast<double*>(x), nullptr,
                                         reinterpret_cast<const double*>(b), nullptr, numeric,
                                         control, info);
    if (status != UMFPACK_OK && status != UMFPACK_WARNING_singular_matrix)
      throw SolverError(fmt::format("umfpack solve failed with status {}", status), {}, 0.0);
  }
};

SaddleFactorization::SaddleFactorization(const CSpMat& A, const SpMat& B, const RVec& mean)
    : n_u_(static_cast<int>(A.rows())), n_p_(static_cast<int>(B.rows())), impl_(std::make_unique<Impl>()) {
  if (A.cols() != n_u_ || B.cols() != n_u_ || mean.size() != n_p_)
    throw InvalidArgument("SaddleFactorization: inconsistent block sizes");
  const int n = size();
  std::vector<Eigen::Triplet<cplx>> trip;
  trip.reserve(static_cast<std::size_t>(A.nonZeros() + 2 * B.nonZeros() + 2 * n_p_));
  for (int k = 0; k < A.outerSize(); ++k)
    for (CSpMat::InnerIterator it(A, k); it; ++it)
      trip.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
  for (int k = 0; k < B.outerSize(); ++k)
    for (SpMat::InnerIterator it(B, k); it; ++it) {
      const int p = n_u_ + static_cast<int>(it.row());
      const int u = static_cast<int>(it.col());
      trip.emplace_back(p, u, -it.value());
      trip.emplace_back(u, p, -it.value());
    }
  for (int i = 0; i < n_p_; ++i) {
    trip.emplace_back(n_u_ + i, n - 1, mean[i]);
    trip.emplace_back(n - 1, n_u_ + i, mean[i]);
  }
  Eigen::SparseMatrix<cplx, Eigen::ColMajor, SuiteSparse_long> S(n, n);
  S.setFromTriplets(trip.begin(), trip.end());
  S.makeCompressed();

  auto& im = *impl_;
  im.ap.assign(S.outerIndexPtr(), S.outerIndexPtr() + n + 1);
  im.ai.assign(S.innerIndexPtr(), S.innerIndexPtr() + S.nonZeros());
  im.ax.assign(S.valuePtr(), S.valuePtr() + S.nonZeros());
  for (int j = 0; j < n; ++j) {
    double col = 0.0;
    for (auto k = im.ap[static_cast<std::size_t>(j)]; k < im.ap[static_cast<std::size_t>(j + 1)]; ++k)
      col += std::abs(im.ax[static_cast<std::size_t>(k)]);
    im.norm1 = std::max(im.norm1, col);
  }

  umfpack_zl_defaults(im.control);
  im.control[UMFPACK_STRATEGY] = UMFPACK_STRATEGY_SYMMETRIC;
  double info[UMFPACK_INFO];
  auto status = umfpack_zl_symbolic(n, n, im.ap.data(), im.ai.data(), im.values(), nullptr,
                                    &im.symbolic, im.control, info);
  if (status != UMFPACK_OK)
    throw SolverError(fmt::format("umfpack symbolic factorization failed ({})", status), {}, 0.0);
  status = umfpack_zl_numeric(im.ap.data(), im.ai.data(), im.values(), nullptr, im.symbolic,
                              &im.numeric, im.control, info);
  if (status == UMFPACK_WARNING_singular_matrix)
    throw SolverError("saddle matrix is exactly singular", {},
                      std::numeric_limits<double>::infinity());
  if (status != UMFPACK_OK)
    throw SolverError(fmt::format("umfpack numeric factorization failed ({})", status), {}, 0.0);
}

SaddleFactorization::~SaddleFactorization() = default;

CVec SaddleFactorization::solve_full(const CVec& rhs, bool adjoint) const {
  if (rhs.size() != size()) throw InvalidArgument("SaddleFactorization: rhs size mismatch");
  CVec x(size());
  impl_->solve(adjoint ? UMFPACK_At : UMFPACK_A, rhs.data(), x.data());
  return x;
}

CVec SaddleFactorization::apply_full(const CVec& x) const {
  const auto& im = *impl_;
  CVec y = CVec::Zero(size());
  for (int j = 0; j < size(); ++j)
    for (auto k = im.ap[static_cast<std::size_t>(j)]; k < im.ap[static_cast<std::size_t>(j + 1)]; ++k)
      y[im.ai[static_cast<std::size_t>(k)]] += im.ax[static_cast<std::size_t>(k)] * x[j];
  return y;
}

SaddleFactorization::Solution SaddleFactorization::solve(const CVec& rhs_u) const {
  return solve(rhs_u, CVec::Zero(n_p_));
}

SaddleFactorization::Solution SaddleFactorization::solve(const CVec& rhs_u, const CVec& rhs_p) const {
  if (rhs_u.size() != n_u_ || rhs_p.size() != n_p_)
    throw InvalidArgument("SaddleFactorization: rhs size mismatch");
  CVec b = CVec::Zero(size());
  b.head(n_u_) = rhs_u;
  b.segment(n_u_, n_p_) = rhs_p;
  const CVec x = solve_full(b);
  return {x.head(n_u_), x.segment(n_u_, n_p_), x[size() - 1]};
}

double SaddleFactorization::condition_estimate() const {
  std::call_once(impl_->cond_once, [this] {
    const int n = size();
    auto sgn = [](const CVec& y) {
      CVec s(y.size());
      for (Eigen::Index i = 0; i < y.size(); ++i) {
        const double a = std::abs(y[i]);
        s[i] = a > 0.0 ? y[i] / a : cplx(1.0);
      }
      return s;
    };
    CVec x = CVec::Constant(n, 1.0 / n);
    CVec y = solve_full(x);
    double est = y.cwiseAbs().sum();
    CVec z = solve_full(sgn(y), true);
    Eigen::Index j = 0;
    z.cwiseAbs().maxCoeff(&j);
    for (int iter = 0; iter < 4; ++iter) {
      x.setZero();
      x[j] = 1.0;
      y = solve_full(x);
      const double next = y.cwiseAbs().sum();
      if (next <= est) break;
      est = next;
      z = solve_full(sgn(y), true);
      Eigen::Index jn = 0;
      z.cwiseAbs().maxCoeff(&jn);
      if (jn == j) break;
      j = jn;
    }
    for (int i = 0; i < n; ++i)
      x[i] = ((i % 2) ? -1.0 : 1.0) * (1.0 + static_cast<double>(i) / std::max(n - 1, 1));
    y = solve_full(x);
    est = std::max(est, 2.0 * y.cwiseAbs().sum() / (3.0 * n));
    impl_->cond = est * impl_->norm1;
  });
  return impl_->cond;
}

}  // namespace dynslip
