#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace dynslip {

using cplx = std::complex<double>;
using Vec2 = Eigen::Vector2d;
using RVec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using CMat = Eigen::MatrixXcd;
using SpMat = Eigen::SparseMatrix<double>;
using CSpMat = Eigen::SparseMatrix<cplx>;

inline constexpr double kPi = 3.14159265358979323846;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Mesh generation failed; `region` is a point near the offending triangles.
class MeshingError : public Error {
 public:
  MeshingError(const std::string& what, Vec2 region) : Error(what), region_(region) {}
  Vec2 region() const { return region_; }

 private:
  Vec2 region_;
};

class AssemblyError : public Error {
 public:
  AssemblyError(const std::string& what, int element) : Error(what), element_(element) {}
  int element() const { return element_; }

 private:
  int element_;
};

class SolverError : public Error {
 public:
  SolverError(const std::string& what, cplx lambda, double condition)
      : Error(what), lambda_(lambda), condition_(condition) {}
  cplx lambda() const { return lambda_; }
  double condition() const { return condition_; }

 private:
  cplx lambda_;
  double condition_;
};

}  // namespace dynslip
