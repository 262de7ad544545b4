#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "uwr/powell.hpp"
#include "uwr/ppxa.hpp"
#include "uwr/prox.hpp"
#include "uwr/volume.hpp"
#include "uwr/wavelet.hpp"

namespace uwr {

// Negative log-likelihood of real samples under the Gauss-Laplace density
// f(x) = sqrt(beta / 2 pi) exp(-(alpha |x-mu| + beta/2 (x-mu)^2 + alpha^2/(2 beta)))
//        / erfc(alpha / sqrt(2 beta)),
// without the constant n/2 log(2 pi). alpha >= 0, beta > 0.
class GGLLikelihood {
 public:
  explicit GGLLikelihood(std::span<const double> samples);

  double operator()(double mu, double alpha, double beta) const;
  std::size_t size() const noexcept { return sorted_.size(); }
  double mean() const noexcept { return mean_; }
  double variance() const noexcept { return variance_; }

  double sum_abs(double mu) const;     // sum |x - mu|
  double sum_square(double mu) const;  // sum (x - mu)^2

 private:
  std::vector<double> sorted_;
  std::vector<double> prefix_;
  double mean_ = 0.0;
  double variance_ = 0.0;
  double sum_ = 0.0;
  double sum_sq_ = 0.0;
};

struct GGLFit {
  GGLPart params;
  double objective = 0.0;
  bool degenerate = false;  // zero sample variance
  bool converged = true;
};

// Maximum-likelihood (mu, alpha, beta) by Powell over (mu, log alpha, log beta)
// on standardized samples. Needs >= 32 samples (TooFewSamples otherwise).
GGLFit fit_ggl(std::span<const double> samples, const PowellConfig& cfg = {});

// Closed-form kappa maximizing the GG likelihood at fixed p:
// (n) / (p sum |e|^p) for n difference magnitudes e.
double gg_kappa_closed_form(std::span<const double> magnitudes, double p);

// kappa sum |e|^p - n log(p kappa^(1/p) / (2 Gamma(1/p))).
double gg_negative_log_likelihood(std::span<const double> magnitudes, double kappa, double p);

struct TemporalFitConfig {
  PowellConfig powell{};
  double p_min = 1.0;
  double p_max = 8.0;
  // kappa assigned where every successive difference vanishes.
  double kappa_cap = 1e6;
};

struct TemporalFit {
  std::vector<TemporalParams> voxels;  // kappa = 0 off-mask
  std::vector<std::uint8_t> flagged;   // all differences zero
  TemporalParams global;               // medians over fitted mask voxels
  std::size_t masked = 0;
  std::size_t flagged_count = 0;
};

// Per-voxel (kappa, p) of successive-difference magnitudes |rho^{t+1} - rho^t|.
// Needs N_r >= 3 and a nonempty mask.
TemporalFit fit_gg_temporal(const VolumeSeries& reference, const Mask& mask,
                            const TemporalFitConfig& cfg = {});

// Voxels whose |temporal mean| exceeds threshold * max.
Mask brain_mask(const VolumeSeries& reference, double threshold = 0.1);

struct SubbandFit {
  SubbandId id;
  GGLFit re;
  GGLFit im;
  std::size_t samples = 0;
  bool fitted = true;  // false: too few samples, penalty left inert
};

struct HyperParams {
  WaveletSpec wavelet;
  std::vector<SubbandFit> subbands;    // CoeffLayout order
  std::optional<TemporalFit> temporal; // absent for N_r < 3
  double mask_threshold = 0.1;
  double mask_fraction = 0.0;

  std::vector<GGLParams> spatial() const;
  RegularizationParams regularization() const;
};

struct EstimateConfig {
  PowellConfig powell{};
  TemporalFitConfig temporal{};
  double mask_threshold = 0.1;
};

// Spatial GGL fits per subband (real and imaginary parts, pooled over frames)
// of T(reference), plus temporal GG fits on the mask.
HyperParams estimate_all(const VolumeSeries& reference, const WaveletSpec& spec,
                         const Mask& mask, const EstimateConfig& cfg = {});
HyperParams estimate_all(const VolumeSeries& reference, const WaveletSpec& spec,
                         const EstimateConfig& cfg = {});

nlohmann::json to_json(const HyperParams& hp);
// Rebuilds solver parameters from a document written by to_json.
RegularizationParams regularization_from_json(const nlohmann::json& doc, const CoeffLayout& layout);

}  // namespace uwr
