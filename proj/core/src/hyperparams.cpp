#include "uwr/hyperparams.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "uwr/error.hpp"
#include "uwr/parallel.hpp"
#include "uwr/special.hpp"

namespace uwr {
namespace {

constexpr std::size_t kMinSpatialSamples = 32;

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

nlohmann::json part_json(const GGLPart& p) {
  return {{"mu", p.mu}, {"alpha", p.alpha}, {"beta", p.beta}};
}

GGLPart part_from_json(const nlohmann::json& j) {
  return {j.at("mu").get<double>(), j.at("alpha").get<double>(), j.at("beta").get<double>()};
}

}  // namespace

GGLLikelihood::GGLLikelihood(std::span<const double> samples)
    : sorted_(samples.begin(), samples.end()) {
  if (sorted_.empty()) throw Error(ErrorKind::TooFewSamples, "no samples");
  std::sort(sorted_.begin(), sorted_.end());
  prefix_.resize(sorted_.size() + 1, 0.0);
  for (std::size_t i = 0; i < sorted_.size(); ++i) {
    prefix_[i + 1] = prefix_[i] + sorted_[i];
    sum_sq_ += sorted_[i] * sorted_[i];
  }
  sum_ = prefix_.back();
  const double n = static_cast<double>(sorted_.size());
  mean_ = sum_ / n;
  double var = 0.0;
  for (double x : sorted_) var += (x - mean_) * (x - mean_);
  variance_ = var / n;
}

double GGLLikelihood::sum_abs(double mu) const {
  const auto idx = static_cast<std::size_t>(
      std::lower_bound(sorted_.begin(), sorted_.end(), mu) - sorted_.begin());
  const double below = mu * static_cast<double>(idx) - prefix_[idx];
  const double above = (sum_ - prefix_[idx]) - mu * static_cast<double>(sorted_.size() - idx);
  return below + above;
}

double GGLLikelihood::sum_square(double mu) const {
  const double n = static_cast<double>(sorted_.size());
  // n var + n (mean - mu)^2 keeps precision for samples far from zero.
  return n * variance_ + n * (mean_ - mu) * (mean_ - mu);
}

double GGLLikelihood::operator()(double mu, double alpha, double beta) const {
  const double n = static_cast<double>(sorted_.size());
  const double z = alpha / std::sqrt(2.0 * beta);
  return alpha * sum_abs(mu) + 0.5 * beta * sum_square(mu) + n * (log_erfcx(z) - 0.5 * std::log(beta));
}

GGLFit fit_ggl(std::span<const double> samples, const PowellConfig& cfg) {
  if (samples.size() < kMinSpatialSamples) {
    throw Error(ErrorKind::TooFewSamples, std::to_string(samples.size()) +
                                              " samples, GGL fit needs at least 32");
  }
  const GGLLikelihood raw(samples);
  const double mean = raw.mean();
  const double var = raw.variance();
  GGLFit fit;
  if (!(var > 1e-24 * std::max(1.0, mean * mean))) {
    const double tiny = 1e-12 * std::max(1.0, mean * mean);
    fit.params = {mean, 0.0, 1.0 / tiny};
    fit.degenerate = true;
    return fit;
  }
  const double scale = std::sqrt(var);
  std::vector<double> standardized(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) standardized[i] = (samples[i] - mean) / scale;
  const GGLLikelihood like(standardized);

  const Objective objective = [&like](std::span<const double> th) {
    return like(th[0], std::exp(th[1]), std::exp(th[2]));
  };
  const std::vector<Interval> box{{-5.0, 5.0}, {-25.0, 8.0}, {-25.0, 8.0}};
  // Gaussian-like and Laplace-like starting points.
  const std::vector<std::vector<double>> starts{{0.0, std::log(1e-3), 0.0},
                                                {0.0, std::log(std::sqrt(2.0)), std::log(1e-3)}};
  double best_value = like(0.0, 0.0, 1.0);  // Gaussian MLE: alpha = 0
  GGLPart best{0.0, 0.0, 1.0};
  bool converged = true;
  for (const auto& s : starts) {
    const PowellResult r = powell_minimize(objective, s, box, cfg);
    if (r.value < best_value) {
      best_value = r.value;
      best = {r.x[0], std::exp(r.x[1]), std::exp(r.x[2])};
      converged = r.converged;
    }
  }
  fit.params = {mean + scale * best.mu, best.alpha / scale, best.beta / (scale * scale)};
  fit.objective = raw(fit.params.mu, fit.params.alpha, fit.params.beta);
  fit.converged = converged;
  return fit;
}

double gg_kappa_closed_form(std::span<const double> magnitudes, double p) {
  double s = 0.0;
  for (double e : magnitudes) s += std::pow(std::abs(e), p);
  if (s == 0.0) throw Error(ErrorKind::InvalidArgument, "all differences are zero");
  return static_cast<double>(magnitudes.size()) / (p * s);
}

double gg_negative_log_likelihood(std::span<const double> magnitudes, double kappa, double p) {
  double s = 0.0;
  for (double e : magnitudes) s += std::pow(std::abs(e), p);
  const double n = static_cast<double>(magnitudes.size());
  return kappa * s - n * (std::log(p) + std::log(kappa) / p - std::log(2.0) - std::lgamma(1.0 / p));
}

TemporalFit fit_gg_temporal(const VolumeSeries& reference, const Mask& mask,
                            const TemporalFitConfig& cfg) {
  const std::size_t nr = reference.frames();
  const std::size_t nv = reference.dims().count();
  if (nr < 3) throw Error(ErrorKind::InvalidArgument, "temporal fit needs at least 3 frames");
  if (mask.size() != nv) throw Error(ErrorKind::ShapeMismatch, "mask size differs from volume");
  TemporalFit out;
  out.masked = static_cast<std::size_t>(std::count(mask.begin(), mask.end(), true));
  if (out.masked == 0) throw Error(ErrorKind::EmptyMask, "temporal fit mask is empty");
  out.voxels.assign(nv, TemporalParams{0.0, 2.0});
  out.flagged.assign(nv, 0);

  parallel_for(nv, 512, [&](std::size_t v0, std::size_t v1) {
    std::vector<double> mags(nr - 1), scaled(nr - 1);
    for (std::size_t v = v0; v < v1; ++v) {
      if (!mask[v]) continue;
      double rms = 0.0;
      for (std::size_t t = 0; t + 1 < nr; ++t) {
        mags[t] = std::abs(reference[t + 1][v] - reference[t][v]);
        rms += mags[t] * mags[t];
      }
      rms = std::sqrt(rms / static_cast<double>(nr - 1));
      if (rms == 0.0) {
        out.voxels[v] = {cfg.kappa_cap, 2.0};
        out.flagged[v] = 1;
        continue;
      }
      // p-profile likelihood is scale invariant; fit on unit-RMS magnitudes.
      for (std::size_t t = 0; t + 1 < nr; ++t) scaled[t] = mags[t] / rms;
      const Objective profile = [&scaled](std::span<const double> x) {
        const double p = x[0];
        return gg_negative_log_likelihood(scaled, gg_kappa_closed_form(scaled, p), p);
      };
      const PowellResult r = powell_minimize(profile, {2.0}, {{cfg.p_min, cfg.p_max}}, cfg.powell);
      const double p = r.x[0];
      out.voxels[v] = {gg_kappa_closed_form(mags, p), p};
    }
  });

  std::vector<double> kappas, ps;
  for (std::size_t v = 0; v < nv; ++v) {
    if (!mask[v]) continue;
    if (out.flagged[v]) {
      ++out.flagged_count;
      continue;
    }
    kappas.push_back(out.voxels[v].kappa);
    ps.push_back(out.voxels[v].p);
  }
  out.global = kappas.empty() ? TemporalParams{cfg.kappa_cap, 2.0}
                              : TemporalParams{median(kappas), median(ps)};
  return out;
}

Mask brain_mask(const VolumeSeries& reference, double threshold) {
  const std::size_t nv = reference.dims().count();
  std::vector<double> mag(nv, 0.0);
  for (std::size_t v = 0; v < nv; ++v) {
    cplx mean = 0.0;
    for (const auto& frame : reference) mean += frame[v];
    mag[v] = std::abs(mean) / static_cast<double>(reference.frames());
  }
  const double peak = nv ? *std::max_element(mag.begin(), mag.end()) : 0.0;
  Mask mask(nv, false);
  for (std::size_t v = 0; v < nv; ++v) mask[v] = mag[v] > threshold * peak;
  return mask;
}

std::vector<GGLParams> HyperParams::spatial() const {
  std::vector<GGLParams> out;
  out.reserve(subbands.size());
  for (const auto& s : subbands) {
    out.push_back(s.fitted ? GGLParams{s.re.params, s.im.params} : GGLParams{});
  }
  return out;
}

RegularizationParams HyperParams::regularization() const {
  return {spatial(), temporal ? temporal->global : TemporalParams{0.0, 2.0}};
}

HyperParams estimate_all(const VolumeSeries& reference, const WaveletSpec& spec, const Mask& mask,
                         const EstimateConfig& cfg) {
  const CoeffSeries coeffs = forward(reference, spec);
  const CoeffLayout& layout = coeffs.front().layout();
  HyperParams hp;
  hp.wavelet = spec;
  hp.mask_threshold = cfg.mask_threshold;
  hp.subbands.resize(layout.subband_count());

  parallel_for(layout.subband_count(), 1, [&](std::size_t b0, std::size_t b1) {
    for (std::size_t b = b0; b < b1; ++b) {
      SubbandFit& fit = hp.subbands[b];
      fit.id = layout.subbands()[b].id;
      std::vector<double> re, im;
      for (const auto& c : coeffs) {
        for (const auto& v : c.subband(b)) {
          re.push_back(v.real());
          im.push_back(v.imag());
        }
      }
      fit.samples = re.size();
      if (re.size() < kMinSpatialSamples) {
        fit.fitted = false;
        continue;
      }
      fit.re = fit_ggl(re, cfg.powell);
      fit.im = fit_ggl(im, cfg.powell);
    }
  });

  if (mask.size() != reference.dims().count()) {
    throw Error(ErrorKind::ShapeMismatch, "mask size differs from volume");
  }
  const auto masked = std::count(mask.begin(), mask.end(), true);
  hp.mask_fraction = static_cast<double>(masked) / static_cast<double>(mask.size());
  if (reference.frames() >= 3) hp.temporal = fit_gg_temporal(reference, mask, cfg.temporal);
  return hp;
}

HyperParams estimate_all(const VolumeSeries& reference, const WaveletSpec& spec,
                         const EstimateConfig& cfg) {
  return estimate_all(reference, spec, brain_mask(reference, cfg.mask_threshold), cfg);
}

nlohmann::json to_json(const HyperParams& hp) {
  nlohmann::json spatial = nlohmann::json::object();
  for (const auto& s : hp.subbands) {
    nlohmann::json entry{{"samples", s.samples}, {"fitted", s.fitted}};
    if (s.fitted) {
      entry["re"] = part_json(s.re.params);
      entry["im"] = part_json(s.im.params);
      entry["degenerate"] = s.re.degenerate || s.im.degenerate;
    }
    spatial[s.id.name()] = std::move(entry);
  }
  nlohmann::json doc{
      {"wavelet", {{"family", hp.wavelet.name()}, {"levels", hp.wavelet.levels}}},
      {"spatial", std::move(spatial)},
      {"mask", {{"threshold", hp.mask_threshold}, {"fraction", hp.mask_fraction}}},
  };
  if (hp.temporal) {
    doc["temporal"] = {{"kappa", hp.temporal->global.kappa},
                       {"p", hp.temporal->global.p},
                       {"aggregation", "median"},
                       {"masked_voxels", hp.temporal->masked},
                       {"flagged_voxels", hp.temporal->flagged_count}};
  }
  return doc;
}

RegularizationParams regularization_from_json(const nlohmann::json& doc, const CoeffLayout& layout) {
  RegularizationParams params = RegularizationParams::none(layout);
  try {
    const auto& spatial = doc.at("spatial");
    for (std::size_t b = 0; b < layout.subband_count(); ++b) {
      const std::string name = layout.subbands()[b].id.name();
      if (!spatial.contains(name)) {
        throw Error(ErrorKind::InvalidArgument, "parameter file lacks subband " + name);
      }
      const auto& entry = spatial.at(name);
      if (entry.value("fitted", true) && entry.contains("re")) {
        params.spatial[b] = {part_from_json(entry.at("re")), part_from_json(entry.at("im"))};
      }
    }
    if (doc.contains("temporal")) {
      params.temporal = {doc["temporal"].at("kappa").get<double>(), doc["temporal"].at("p").get<double>()};
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidArgument, std::string("malformed parameter file: ") + e.what());
  }
  params.temporal.validate();
  return params;
}

}  // namespace uwr
