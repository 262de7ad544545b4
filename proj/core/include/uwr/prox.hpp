#pragma once

#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "uwr/sense.hpp"
#include "uwr/volume.hpp"
#include "uwr/wavelet.hpp"

namespace uwr {

// Gauss-Laplace penalty on one real component:
// alpha |u - mu| + beta/2 (u - mu)^2.
struct GGLPart {
  double mu = 0.0;
  double alpha = 0.0;
  double beta = 0.0;

  double value(double u) const noexcept {
    const double e = u - mu;
    return alpha * std::abs(e) + 0.5 * beta * e * e;
  }
  friend bool operator==(const GGLPart&, const GGLPart&) = default;
};

// Penalty on a complex coefficient, real and imaginary parts separately.
struct GGLParams {
  GGLPart re;
  GGLPart im;

  cplx mu() const noexcept { return {re.mu, im.mu}; }
  double value(cplx xi) const noexcept { return re.value(xi.real()) + im.value(xi.imag()); }
  bool inert() const noexcept {
    return re.alpha == 0.0 && re.beta == 0.0 && im.alpha == 0.0 && im.beta == 0.0;
  }
  friend bool operator==(const GGLParams&, const GGLParams&) = default;
};

// kappa * |x|^p on the modulus of complex image differences.
struct TemporalParams {
  double kappa = 0.0;
  double p = 2.0;

  void validate() const;
  friend bool operator==(const TemporalParams&, const TemporalParams&) = default;
};

using ScalarProx = std::function<double(double)>;

double soft_threshold(double x, double threshold) noexcept;

// prox of phi_re(Re x) + phi_im(Im x).
cplx prox_complex_split(const ScalarProx& phi_re, const ScalarProx& phi_im, cplx x);

// prox of weight * penalty for one real component.
double prox_ggl(double x, const GGLPart& part, double weight) noexcept;
// prox of weight * Phi(xi); weight scales alpha and beta.
cplx prox_ggl(cplx xi, const GGLParams& params, double weight) noexcept;

// Applies prox_ggl to every coefficient, params indexed by subband.
void prox_ggl(CoeffField& field, std::span<const GGLParams> params, double weight);

// prox of weight * kappa * |v|^p for complex v (shrinks the modulus).
cplx prox_lp_scalar(cplx v, double kappa, double p, double weight);

// Root t >= 0 of t + c t^(p-1) = r for r >= 0, c >= 0, p >= 1.
double lp_shrink_magnitude(double r, double c, double p);

// prox of weight * J_WLS for every frame of a dataset. Per reduced voxel the
// matrix (I_R + 2w S^H Psi^-1 S)^-1 and the vector 2w S^H Psi^-1 d^t are
// computed once, so apply() costs one T*, one T and an R x R product.
class DataFidelityProx {
 public:
  DataFidelityProx(const SenseSystem& system, const CoilDataset& data, double weight,
                   WaveletSpec spec);

  double weight() const noexcept { return weight_; }
  std::size_t frames() const noexcept { return rhs_.size(); }

  CoeffField apply(const CoeffField& zeta, std::size_t frame) const;
  ComplexVolume apply_image(const ComplexVolume& rho, std::size_t frame) const;

 private:
  const SenseSystem* system_;
  double weight_;
  WaveletSpec spec_;
  std::vector<cplx> inverse_;             // per voxel R x R
  std::vector<std::vector<cplx>> rhs_;    // per frame, per voxel R
};

CoeffField prox_data_fidelity(const CoeffField& zeta, const CoilDataset& d_frame,
                              const EncodingOperator& enc, const NoiseCovariance& psi,
                              double weight, const WaveletSpec& spec);

// prox of weight * kappa ||T* a - T* b||_p^p over the pair (a, b), using
// H H* = 2 Id for H(a, b) = a - b.
std::pair<CoeffField, CoeffField> prox_temporal_pair(const CoeffField& a, const CoeffField& b,
                                                     const TemporalParams& params, double weight,
                                                     const WaveletSpec& spec);

}  // namespace uwr
