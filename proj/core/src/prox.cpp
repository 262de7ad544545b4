#include "uwr/prox.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "uwr/error.hpp"
#include "uwr/parallel.hpp"

namespace uwr {

void TemporalParams::validate() const {
  if (!(kappa >= 0.0) || !std::isfinite(kappa)) {
    throw Error(ErrorKind::InvalidArgument, "temporal kappa must be finite and >= 0");
  }
  if (!(p >= 1.0) || !std::isfinite(p)) {
    throw Error(ErrorKind::InvalidArgument, "temporal exponent p must be >= 1");
  }
}

double soft_threshold(double x, double threshold) noexcept {
  const double m = std::abs(x) - threshold;
  if (m <= 0.0) return 0.0;
  return x >= 0.0 ? m : -m;
}

cplx prox_complex_split(const ScalarProx& phi_re, const ScalarProx& phi_im, cplx x) {
  return {phi_re(x.real()), phi_im(x.imag())};
}

double prox_ggl(double x, const GGLPart& part, double weight) noexcept {
  const double e = x - part.mu;
  const double sign = e >= 0.0 ? 1.0 : -1.0;
  return sign / (weight * part.beta + 1.0) * std::max(std::abs(e) - weight * part.alpha, 0.0) +
         part.mu;
}

cplx prox_ggl(cplx xi, const GGLParams& params, double weight) noexcept {
  return {prox_ggl(xi.real(), params.re, weight), prox_ggl(xi.imag(), params.im, weight)};
}

void prox_ggl(CoeffField& field, std::span<const GGLParams> params, double weight) {
  const auto& bands = field.layout().subbands();
  if (params.size() != bands.size()) {
    throw Error(ErrorKind::ShapeMismatch, "expected " + std::to_string(bands.size()) +
                                              " subband parameter sets, got " +
                                              std::to_string(params.size()));
  }
  for (std::size_t b = 0; b < bands.size(); ++b) {
    if (params[b].inert()) continue;
    for (auto& v : field.subband(b)) v = prox_ggl(v, params[b], weight);
  }
}

double lp_shrink_magnitude(double r, double c, double p) {
  if (r <= 0.0 || c <= 0.0) return std::max(r, 0.0);
  if (p == 1.0) return std::max(r - c, 0.0);
  if (p == 2.0) return r / (1.0 + c);
  // f(t) = t + c t^(p-1) - r is increasing on [0, r] with f(0) < 0 <= f(r).
  // Newton steps, falling back to bisection whenever they leave the bracket.
  double lo = 0.0;
  double hi = r;
  double t = r / (1.0 + c * std::pow(r, p - 2.0));
  if (!(t > lo && t < hi)) t = 0.5 * r;
  const double tol = 1e-12 * std::max(1.0, r);
  for (int it = 0; it < 200; ++it) {
    const double tp = std::pow(t, p - 2.0);
    const double f = t + c * tp * t - r;
    if (f > 0.0) hi = t;
    else lo = t;
    const double df = 1.0 + c * (p - 1.0) * tp;
    double next = t - f / df;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - t) <= tol || hi - lo <= tol) return next;
    t = next;
  }
  return t;
}

cplx prox_lp_scalar(cplx v, double kappa, double p, double weight) {
  if (p < 1.0) throw Error(ErrorKind::InvalidArgument, "p must be >= 1");
  const double r = std::abs(v);
  if (r == 0.0 || kappa == 0.0) return v;
  const double t = lp_shrink_magnitude(r, weight * kappa * p, p);
  return v * (t / r);
}

DataFidelityProx::DataFidelityProx(const SenseSystem& system, const CoilDataset& data,
                                   double weight, WaveletSpec spec)
    : system_(&system), weight_(weight), spec_(std::move(spec)) {
  if (!(weight > 0.0)) throw Error(ErrorKind::InvalidArgument, "prox weight must be positive");
  const std::size_t r = system.reduction();
  const std::size_t n = system.voxels();
  inverse_.resize(n * r * r);
  parallel_for(n, 256, [&](std::size_t v0, std::size_t v1) {
    for (std::size_t v = v0; v < v1; ++v) {
      auto a = system.normal_matrix(v);
      CMatrix m(r, r);
      for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j) {
          m(i, j) = 2.0 * weight * a[i * r + j] + (i == j ? 1.0 : 0.0);
        }
      const CMatrix inv = hermitian_inverse(m);
      std::copy(inv.values().begin(), inv.values().end(), &inverse_[v * r * r]);
    }
  });
  rhs_.reserve(data.frames());
  for (std::size_t t = 0; t < data.frames(); ++t) {
    std::vector<cplx> b = system.back_project(data, t);
    for (auto& x : b) x *= 2.0 * weight;
    rhs_.push_back(std::move(b));
  }
}

ComplexVolume DataFidelityProx::apply_image(const ComplexVolume& rho, std::size_t frame) const {
  const std::size_t r = system_->reduction();
  const std::vector<cplx>& b = rhs_.at(frame);
  ComplexVolume u(rho.dims());
  parallel_for(system_->voxels(), 1024, [&](std::size_t v0, std::size_t v1) {
    std::vector<cplx> x(r), y(r);
    for (std::size_t v = v0; v < v1; ++v) {
      system_->gather(rho, v, x.data());
      for (std::size_t k = 0; k < r; ++k) x[k] += b[v * r + k];
      const cplx* m = &inverse_[v * r * r];
      for (std::size_t i = 0; i < r; ++i) {
        cplx s = 0.0;
        for (std::size_t j = 0; j < r; ++j) s += m[i * r + j] * x[j];
        y[i] = s;
      }
      system_->scatter(u, v, y.data());
    }
  });
  return u;
}

CoeffField DataFidelityProx::apply(const CoeffField& zeta, std::size_t frame) const {
  return forward(apply_image(inverse(zeta, spec_), frame), spec_);
}

CoeffField prox_data_fidelity(const CoeffField& zeta, const CoilDataset& d_frame,
                              const EncodingOperator& enc, const NoiseCovariance& psi,
                              double weight, const WaveletSpec& spec) {
  if (d_frame.frames() != 1) {
    throw Error(ErrorKind::ShapeMismatch, "prox_data_fidelity expects a single-frame dataset");
  }
  const SenseSystem system(enc, psi);
  const DataFidelityProx prox(system, d_frame, weight, spec);
  return prox.apply(zeta, 0);
}

std::pair<CoeffField, CoeffField> prox_temporal_pair(const CoeffField& a, const CoeffField& b,
                                                     const TemporalParams& params, double weight,
                                                     const WaveletSpec& spec) {
  if (!a.same_shape(b)) throw Error(ErrorKind::ShapeMismatch, "temporal pair shapes differ");
  params.validate();
  std::pair<CoeffField, CoeffField> out{a, b};
  if (params.kappa == 0.0) return out;

  const std::size_t n = a.size();
  std::vector<cplx> diff(n);
  for (std::size_t i = 0; i < n; ++i) diff[i] = a[i] - b[i];

  // delta = prox_{2w psi}(diff) - diff, psi = kappa ||T* .||_p^p.
  std::vector<cplx> delta(n);
  if (params.p == 2.0) {
    // Linear shrink commutes with the orthonormal transform.
    const double scale = 1.0 / (1.0 + 4.0 * weight * params.kappa) - 1.0;
    for (std::size_t i = 0; i < n; ++i) delta[i] = scale * diff[i];
  } else {
    const ComplexVolume img = inverse(CoeffField(a.layout(), diff), spec);
    ComplexVolume moved(img.dims());
    for (std::size_t i = 0; i < img.size(); ++i) {
      moved[i] = prox_lp_scalar(img[i], params.kappa, params.p, 2.0 * weight) - img[i];
    }
    const CoeffField back = forward(moved, spec);
    std::copy(back.values().begin(), back.values().end(), delta.begin());
  }
  for (std::size_t i = 0; i < n; ++i) {
    out.first[i] += 0.5 * delta[i];
    out.second[i] -= 0.5 * delta[i];
  }
  return out;
}

}  // namespace uwr
