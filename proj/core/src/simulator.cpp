#include "uwr/simulator.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "uwr/error.hpp"

namespace uwr {
namespace {

double normalized(std::size_t i, std::size_t n) {
  return (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(n) - 1.0;
}

CMatrix cholesky_factor(const CMatrix& psi) {
  const std::size_t n = psi.rows();
  CMatrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = psi(j, j).real();
    for (std::size_t k = 0; k < j; ++k) d -= std::norm(l(j, k));
    if (!(d > 0.0)) throw Error(ErrorKind::NotPositiveDefinite, "noise covariance is not PD");
    l(j, j) = std::sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      cplx s = psi(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * std::conj(l(j, k));
      l(i, j) = s / l(j, j);
    }
  }
  return l;
}

std::vector<ComplexVolume> coil_attempt(Dims dims, std::size_t coils, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter(-1.0, 1.0);
  std::vector<ComplexVolume> maps(coils, ComplexVolume(dims));
  for (std::size_t l = 0; l < coils; ++l) {
    const double theta = 2.0 * std::numbers::pi * (static_cast<double>(l) + 0.15 * jitter(rng)) /
                         static_cast<double>(coils);
    const std::array<double, 3> c{1.3 * std::cos(theta), 1.3 * std::sin(theta), 0.4 * jitter(rng)};
    const double width = 0.6 + 0.15 * jitter(rng);
    const std::array<double, 3> ramp{0.8 * jitter(rng), 0.8 * jitter(rng), 0.4 * jitter(rng)};
    const double phase0 = std::numbers::pi * jitter(rng);
    for (std::size_t z = 0; z < dims.z; ++z)
      for (std::size_t y = 0; y < dims.y; ++y)
        for (std::size_t x = 0; x < dims.x; ++x) {
          const double u = normalized(x, dims.x), v = normalized(y, dims.y), w = normalized(z, dims.z);
          const double r2 = (u - c[0]) * (u - c[0]) + (v - c[1]) * (v - c[1]) + (w - c[2]) * (w - c[2]);
          const double mag = std::exp(-r2 / (2.0 * width * width));
          const double ph = phase0 + ramp[0] * u + ramp[1] * v + ramp[2] * w;
          maps[l](x, y, z) = std::polar(mag, ph);
        }
  }
  for (std::size_t i = 0; i < dims.count(); ++i) {
    double s = 0.0;
    for (const auto& m : maps) s += std::norm(m[i]);
    const double root = std::sqrt(s);
    for (auto& m : maps) m[i] /= root;
  }
  return maps;
}

}  // namespace

bool Ellipsoid::contains(double u, double v, double w) const noexcept {
  const double a = (u - center[0]) / semi_axes[0];
  const double b = (v - center[1]) / semi_axes[1];
  const double c = (w - center[2]) / semi_axes[2];
  return a * a + b * b + c * c <= 1.0;
}

PhantomSpec brain_phantom(Dims dims, std::uint64_t seed, double peak) {
  PhantomSpec spec;
  spec.dims = dims;
  spec.seed = seed;
  spec.smooth_phase = 0.4;
  spec.ellipsoids = {
      {{0.0, 0.0, 0.0}, {0.82, 0.9, 0.8}, 1.0, 0.0},       // scalp / skull rim
      {{0.0, -0.02, 0.0}, {0.7, 0.8, 0.68}, -0.3, 0.0},    // brain tissue
      {{-0.18, 0.05, 0.05}, {0.12, 0.3, 0.25}, -0.35, 0.0},  // ventricles
      {{0.18, 0.05, 0.05}, {0.12, 0.3, 0.25}, -0.35, 0.0},
      {{0.0, -0.5, -0.2}, {0.25, 0.15, 0.3}, 0.2, 0.0},    // grey-matter blobs
      {{0.35, 0.45, 0.2}, {0.15, 0.12, 0.2}, 0.15, 0.0},
      {{-0.4, -0.3, -0.3}, {0.1, 0.1, 0.15}, 0.25, 0.0},   // small lesion
  };
  for (auto& e : spec.ellipsoids) e.intensity *= peak;
  return spec;
}

ComplexVolume make_phantom(const PhantomSpec& spec) {
  const Dims d = spec.dims;
  ComplexVolume out(d);
  std::array<double, 4> phase_coef{0.0, 0.0, 0.0, 0.0};
  if (spec.smooth_phase != 0.0) {
    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (auto& c : phase_coef) c = unit(rng);
  }
  for (std::size_t z = 0; z < d.z; ++z)
    for (std::size_t y = 0; y < d.y; ++y)
      for (std::size_t x = 0; x < d.x; ++x) {
        const double u = normalized(x, d.x), v = normalized(y, d.y), w = normalized(z, d.z);
        cplx value = 0.0;
        for (const auto& e : spec.ellipsoids) {
          if (e.contains(u, v, w)) value += std::polar(e.intensity, e.phase);
        }
        if (spec.smooth_phase != 0.0 && value != 0.0) {
          const double field = 0.25 * (phase_coef[0] * u + phase_coef[1] * v + phase_coef[2] * w +
                                       phase_coef[3] * u * v);
          value *= std::polar(1.0, spec.smooth_phase * field);
        }
        out(x, y, z) = value;
      }
  return out;
}

double well_conditioned_fraction(const EncodingOperator& enc, double limit) {
  const std::size_t n = enc.geometry().reduced_dims().count();
  std::size_t good = 0;
  for (std::size_t v = 0; v < n; ++v) {
    const auto s = singular_values(enc.matrix(v));
    if (!s.empty() && s.back() > 0.0 && s.front() / s.back() < limit) ++good;
  }
  return static_cast<double>(good) / static_cast<double>(n);
}

std::vector<ComplexVolume> make_coils(Dims dims, std::size_t coils, std::uint64_t seed,
                                      std::size_t reduction) {
  if (coils == 0) throw Error(ErrorKind::InvalidArgument, "need at least one coil");
  for (int attempt = 0; attempt < 10; ++attempt) {
    auto maps = coil_attempt(dims, coils, mix_seed(seed, static_cast<std::uint64_t>(attempt)));
    if (reduction <= 1 || coils < 2 * reduction) return maps;
    const EncodingOperator enc(SensitivitySet(maps), SenseGeometry(dims, reduction));
    if (well_conditioned_fraction(enc) >= 0.99) return maps;
  }
  throw Error(ErrorKind::RankDeficientGeometry,
              "no well-conditioned coil geometry for L=" + std::to_string(coils) +
                  ", R=" + std::to_string(reduction) + " after 10 attempts");
}

std::vector<ComplexVolume> reference_scan(const std::vector<ComplexVolume>& coils, double level) {
  std::vector<ComplexVolume> out;
  out.reserve(coils.size());
  for (const auto& s : coils) {
    ComplexVolume img(s.dims());
    for (std::size_t i = 0; i < s.size(); ++i) img[i] = level * s[i];
    out.push_back(std::move(img));
  }
  return out;
}

CMatrix correlated_noise_cov(std::size_t coils, double sigma, double correlation) {
  if (!(correlation >= 0.0 && correlation < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "coil noise correlation must lie in [0,1)");
  }
  CMatrix psi(coils, coils);
  for (std::size_t l = 0; l < coils; ++l)
    for (std::size_t m = 0; m < coils; ++m) {
      const double lag = static_cast<double>(l) - static_cast<double>(m);
      psi(l, m) = sigma * sigma * std::pow(correlation, std::abs(lag)) * std::polar(1.0, 0.3 * lag);
    }
  return psi;
}

VolumeSeries make_series(const ComplexVolume& base, const AcquisitionSpec& acq) {
  if (acq.frames == 0) throw Error(ErrorKind::InvalidArgument, "need at least one frame");
  const Dims d = base.dims();
  const TemporalModel& tm = acq.temporal;
  std::vector<ComplexVolume> frames;
  frames.reserve(acq.frames);
  for (std::size_t t = 0; t < acq.frames; ++t) {
    const double tau = acq.frames > 1 ? static_cast<double>(t) / static_cast<double>(acq.frames - 1) : 0.0;
    const double drift = tm.drift_linear * tau + tm.drift_quadratic * tau * tau;
    const bool on = tm.block_length > 0 && (t / tm.block_length) % 2 == 1;
    const double act = on ? tm.activation_amplitude : 0.0;
    ComplexVolume f(d);
    for (std::size_t z = 0; z < d.z; ++z)
      for (std::size_t y = 0; y < d.y; ++y)
        for (std::size_t x = 0; x < d.x; ++x) {
          cplx v = base(x, y, z) * (1.0 + drift);
          if (act != 0.0 && tm.region.contains(normalized(x, d.x), normalized(y, d.y), normalized(z, d.z))) {
            v += act;
          }
          f(x, y, z) = v;
        }
    frames.push_back(std::move(f));
  }
  return VolumeSeries(std::move(frames));
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  // splitmix64 finalizer over the combined state.
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

CoilDataset acquire(const VolumeSeries& rho, const SensitivitySet& coils, const AcquisitionSpec& acq) {
  const SenseGeometry geometry(rho.dims(), acq.reduction);
  const EncodingOperator enc(coils, geometry);
  const std::size_t nl = coils.coils();
  CoilDataset out(geometry, nl, rho.frames());
  CMatrix chol;
  if (acq.noise_enabled) {
    if (acq.noise_cov.rows() != nl) {
      throw Error(ErrorKind::GeometryMismatch, "noise covariance size differs from coil count");
    }
    chol = cholesky_factor(acq.noise_cov);
  }
  const std::size_t nv = geometry.reduced_dims().count();
  for (std::size_t t = 0; t < rho.frames(); ++t) {
    const CoilDataset clean = fold(rho[t], enc);
    for (std::size_t l = 0; l < nl; ++l) {
      auto src = clean.image(l, 0);
      std::copy(src.begin(), src.end(), out.image(l, t).begin());
    }
    if (!acq.noise_enabled) continue;
    std::mt19937_64 rng(mix_seed(acq.seed, t));
    std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
    std::vector<cplx> z(nl);
    for (std::size_t v = 0; v < nv; ++v) {
      for (auto& zi : z) zi = cplx(gauss(rng), gauss(rng));
      for (std::size_t l = 0; l < nl; ++l) {
        cplx n = 0.0;
        for (std::size_t m = 0; m <= l; ++m) n += chol(l, m) * z[m];
        out.at(l, t, v) += n;
      }
    }
  }
  return out;
}

std::vector<std::vector<cplx>> noise_scan(const AcquisitionSpec& acq, std::size_t samples) {
  const std::size_t nl = acq.noise_cov.rows();
  if (nl == 0) throw Error(ErrorKind::InvalidArgument, "noise covariance is empty");
  const CMatrix chol = cholesky_factor(acq.noise_cov);
  std::mt19937_64 rng(mix_seed(acq.seed, 0xA11CE));
  std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
  std::vector<std::vector<cplx>> out(nl, std::vector<cplx>(samples));
  std::vector<cplx> z(nl);
  for (std::size_t k = 0; k < samples; ++k) {
    for (auto& zi : z) zi = cplx(gauss(rng), gauss(rng));
    for (std::size_t l = 0; l < nl; ++l) {
      cplx n = 0.0;
      for (std::size_t m = 0; m <= l; ++m) n += chol(l, m) * z[m];
      out[l][k] = n;
    }
  }
  return out;
}

}  // namespace uwr
