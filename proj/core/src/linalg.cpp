#include "uwr/linalg.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "uwr/error.hpp"

namespace uwr {
namespace {

using EMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using EVec = Eigen::Matrix<cplx, Eigen::Dynamic, 1>;

Eigen::Map<const EMat> view(const CMatrix& m) {
  return Eigen::Map<const EMat>(m.values().data(), static_cast<Eigen::Index>(m.rows()),
                                static_cast<Eigen::Index>(m.cols()));
}

CMatrix from_eigen(const EMat& m) {
  CMatrix out(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()));
  Eigen::Map<EMat>(out.values().data(), m.rows(), m.cols()) = m;
  return out;
}

void require_square(const CMatrix& a) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw Error(ErrorKind::ShapeMismatch, "expected a non-empty square matrix");
  }
}

// Cholesky with explicit pivot check; Eigen's LLT does not report the
// failing pivot reliably for complex input.
EMat cholesky_lower(const CMatrix& a) {
  require_square(a);
  const auto n = static_cast<Eigen::Index>(a.rows());
  EMat l = EMat::Zero(n, n);
  auto av = view(a);
  for (Eigen::Index j = 0; j < n; ++j) {
    double d = av(j, j).real();
    for (Eigen::Index k = 0; k < j; ++k) d -= std::norm(l(j, k));
    if (!(d > 0.0)) {
      throw Error(ErrorKind::NotPositiveDefinite,
                  "non-positive pivot " + std::to_string(d) + " at row " + std::to_string(j));
    }
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      cplx s = av(i, j);
      for (Eigen::Index k = 0; k < j; ++k) s -= l(i, k) * std::conj(l(j, k));
      l(i, j) = s / ljj;
    }
  }
  return l;
}

}  // namespace

CMatrix::CMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) throw Error(ErrorKind::ShapeMismatch, "matrix data length");
}

CMatrix CMatrix::identity(std::size_t n) {
  CMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

CMatrix CMatrix::adjoint() const {
  CMatrix out(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) out(c, r) = std::conj((*this)(r, c));
  return out;
}

std::vector<cplx> CMatrix::operator*(std::span<const cplx> v) const {
  if (v.size() != cols_) throw Error(ErrorKind::ShapeMismatch, "matrix-vector size");
  std::vector<cplx> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) {
    cplx s = 0.0;
    for (std::size_t c = 0; c < cols_; ++c) s += (*this)(r, c) * v[c];
    out[r] = s;
  }
  return out;
}

CMatrix CMatrix::operator*(const CMatrix& rhs) const {
  if (cols_ != rhs.rows_) throw Error(ErrorKind::ShapeMismatch, "matrix-matrix size");
  return from_eigen(view(*this) * view(rhs));
}

NoiseCovariance::NoiseCovariance(CMatrix psi) : psi_(std::move(psi)) {
  require_square(psi_);
  const std::size_t n = psi_.rows();
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::abs(psi_(i, i)));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (std::abs(psi_(i, j) - std::conj(psi_(j, i))) > 1e-12 * std::max(scale, 1.0)) {
        throw Error(ErrorKind::InvalidArgument, "noise covariance is not Hermitian");
      }
    }
  }
  const EMat l = cholesky_lower(psi_);
  const auto m = l.rows();
  whitener_ = from_eigen(l.triangularView<Eigen::Lower>().solve(EMat::Identity(m, m)));
  inverse_ = hermitian_inverse(psi_);
}

std::vector<cplx> hermitian_solve(const CMatrix& a, std::span<const cplx> b) {
  if (b.size() != a.rows()) throw Error(ErrorKind::ShapeMismatch, "rhs length");
  const EMat l = cholesky_lower(a);
  const Eigen::Map<const EVec> rhs(b.data(), static_cast<Eigen::Index>(b.size()));
  EVec y = l.triangularView<Eigen::Lower>().solve(rhs);
  EVec x = l.adjoint().triangularView<Eigen::Upper>().solve(y);
  return {x.data(), x.data() + x.size()};
}

CMatrix hermitian_inverse(const CMatrix& a) {
  const EMat l = cholesky_lower(a);
  const auto n = l.rows();
  EMat linv = l.triangularView<Eigen::Lower>().solve(EMat::Identity(n, n));
  EMat inv = linv.adjoint() * linv;
  // Exact Hermitian symmetry.
  inv = (0.5 * (inv + inv.adjoint())).eval();
  return from_eigen(inv);
}

CMatrix hermitian_pseudo_inverse(const CMatrix& a) {
  require_square(a);
  Eigen::SelfAdjointEigenSolver<EMat> eig(EMat(view(a)));
  const auto& w = eig.eigenvalues();
  const double largest = w.cwiseAbs().maxCoeff();
  const double cutoff = 1e-12 * largest;
  Eigen::VectorXd winv = Eigen::VectorXd::Zero(w.size());
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    if (std::abs(w(i)) > cutoff && largest > 0.0) winv(i) = 1.0 / w(i);
  }
  const auto& v = eig.eigenvectors();
  EMat pinv = v * winv.cast<cplx>().asDiagonal() * v.adjoint();
  return from_eigen(pinv);
}

std::vector<cplx> pseudo_inverse_solve(const CMatrix& s, const NoiseCovariance& psi,
                                       std::span<const cplx> d) {
  if (s.rows() != psi.coils() || d.size() != s.rows()) {
    throw Error(ErrorKind::ShapeMismatch, "sensitivity/covariance/data sizes disagree");
  }
  const CMatrix sh_pinv = s.adjoint() * psi.inverse();
  const CMatrix normal = sh_pinv * s;
  return hermitian_pseudo_inverse(normal) * std::span<const cplx>(sh_pinv * d);
}

std::vector<double> hermitian_eigenvalues(const CMatrix& a) {
  require_square(a);
  Eigen::SelfAdjointEigenSolver<EMat> eig(EMat(view(a)), Eigen::EigenvaluesOnly);
  const auto& w = eig.eigenvalues();
  return {w.data(), w.data() + w.size()};
}

std::vector<double> singular_values(const CMatrix& a) {
  Eigen::JacobiSVD<EMat> svd(EMat(view(a)));
  const auto& s = svd.singularValues();
  return {s.data(), s.data() + s.size()};
}

}  // namespace uwr
