#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "uwr/linalg.hpp"
#include "uwr/sense.hpp"
#include "uwr/volume.hpp"

namespace uwr {

// Ellipsoid in normalized coordinates: each axis maps voxel centres to (-1, 1).
struct Ellipsoid {
  std::array<double, 3> center{0.0, 0.0, 0.0};
  std::array<double, 3> semi_axes{1.0, 1.0, 1.0};
  double intensity = 1.0;
  double phase = 0.0;  // radians

  bool contains(double u, double v, double w) const noexcept;
};

struct PhantomSpec {
  Dims dims{};
  std::vector<Ellipsoid> ellipsoids;
  // Peak amplitude (radians) of a seeded smooth phase field; 0 disables it.
  double smooth_phase = 0.0;
  std::uint64_t seed = 0;
};

// Head-like test object: bright rim, brain tissue, ventricles, small
// lesions; every nonzero magnitude is at least 0.3 of the peak. Intensities
// are in scanner-like units (peak 1000 by default).
PhantomSpec brain_phantom(Dims dims, std::uint64_t seed = 1, double peak = 1000.0);

ComplexVolume make_phantom(const PhantomSpec& spec);

// Smooth surface-coil profiles: complex Gaussian bumps on a ring around the
// FOV with linear phase ramps, normalized so sum_l |s_l|^2 = 1 everywhere.
// With reduction R and L >= 2R, S(r) must have condition number below 1e3 at
// >= 99% of voxels; otherwise the seed is advanced (10 attempts, then
// RankDeficientGeometry).
std::vector<ComplexVolume> make_coils(Dims dims, std::size_t coils, std::uint64_t seed,
                                      std::size_t reduction = 1);

// Calibration scan of a uniform object of magnitude `level` filling the FOV
// (body-coil style reference): coil image l is level * s_l.
std::vector<ComplexVolume> reference_scan(const std::vector<ComplexVolume>& coils, double level = 1000.0);

// Fraction of reduced voxels whose L x R matrix S(r) has condition < limit.
double well_conditioned_fraction(const EncodingOperator& enc, double limit = 1e3);

struct TemporalModel {
  double drift_linear = 0.0;     // relative change from first to last frame
  double drift_quadratic = 0.0;
  double activation_amplitude = 0.0;
  std::size_t block_length = 4;  // alternating off/on blocks
  Ellipsoid region{{0.2, -0.2, 0.0}, {0.2, 0.2, 0.3}, 1.0, 0.0};
};

struct AcquisitionSpec {
  std::size_t coils = 4;
  std::size_t reduction = 2;
  std::size_t frames = 1;
  CMatrix noise_cov;        // Psi_true, L x L Hermitian PD
  bool noise_enabled = true;
  TemporalModel temporal{};
  std::uint64_t seed = 0;
};

// sigma^2 C with C_lm = c^|l-m| exp(i 0.3 (l-m)), c in [0, 1).
CMatrix correlated_noise_cov(std::size_t coils, double sigma, double correlation = 0.2);

// frame t = base (1 + drift(t)) + activation(t) region_mask.
VolumeSeries make_series(const ComplexVolume& base, const AcquisitionSpec& acq);

// d^t = fold(rho^t) + n^t with n^t ~ CN(0, Psi_true) per reduced voxel,
// seeded per frame so the draw does not depend on evaluation order.
CoilDataset acquire(const VolumeSeries& rho, const SensitivitySet& coils, const AcquisitionSpec& acq);

// Noise-only samples (no RF excitation), one vector per coil.
std::vector<std::vector<cplx>> noise_scan(const AcquisitionSpec& acq, std::size_t samples);

// Deterministic 64-bit mixing of a seed with a stream index.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

}  // namespace uwr
