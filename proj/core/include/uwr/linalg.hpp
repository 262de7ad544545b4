#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "uwr/volume.hpp"

namespace uwr {

// Small dense complex matrix, row-major.
class CMatrix {
 public:
  CMatrix() = default;
  CMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  CMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> data);

  static CMatrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  cplx& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const cplx& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  std::span<const cplx> values() const noexcept { return data_; }
  std::span<cplx> values() noexcept { return data_; }

  CMatrix adjoint() const;
  std::vector<cplx> operator*(std::span<const cplx> v) const;
  CMatrix operator*(const CMatrix& rhs) const;

  friend bool operator==(const CMatrix&, const CMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cplx> data_;
};

// Hermitian positive-definite L x L noise covariance between coils.
class NoiseCovariance {
 public:
  explicit NoiseCovariance(CMatrix psi);

  const CMatrix& matrix() const noexcept { return psi_; }
  const CMatrix& inverse() const noexcept { return inverse_; }
  // W with W^H W = Psi^-1, so ||x||^2_{Psi^-1} = ||W x||^2.
  const CMatrix& whitener() const noexcept { return whitener_; }
  std::size_t coils() const noexcept { return psi_.rows(); }

 private:
  CMatrix psi_;
  CMatrix inverse_;
  CMatrix whitener_;
};

// Solves A x = b for Hermitian positive-definite A by Cholesky.
// Throws Error(NotPositiveDefinite) when a pivot is not positive.
std::vector<cplx> hermitian_solve(const CMatrix& a, std::span<const cplx> b);

// Inverse of a Hermitian positive-definite matrix (same failure mode).
CMatrix hermitian_inverse(const CMatrix& a);

// Moore-Penrose pseudo-inverse of a Hermitian matrix; eigenvalues below
// 1e-12 times the largest magnitude are treated as zero.
CMatrix hermitian_pseudo_inverse(const CMatrix& a);

// Minimum-norm weighted least-squares solution (S^H Psi^-1 S)^# S^H Psi^-1 d.
std::vector<cplx> pseudo_inverse_solve(const CMatrix& s, const NoiseCovariance& psi,
                                       std::span<const cplx> d);

// Eigenvalues of a Hermitian matrix, ascending.
std::vector<double> hermitian_eigenvalues(const CMatrix& a);

// Singular values, descending.
std::vector<double> singular_values(const CMatrix& a);

}  // namespace uwr
