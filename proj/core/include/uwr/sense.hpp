#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "uwr/linalg.hpp"
#include "uwr/volume.hpp"

namespace uwr {

// Full-FOV complex sensitivity map of every coil. S(r) for a reduced-FOV
// voxel stacks s_l at the R aliased positions (see EncodingOperator).
class SensitivitySet {
 public:
  SensitivitySet() = default;
  explicit SensitivitySet(std::vector<ComplexVolume> maps);

  std::size_t coils() const noexcept { return maps_.size(); }
  const Dims& dims() const noexcept { return dims_; }
  const ComplexVolume& map(std::size_t coil) const { return maps_.at(coil); }
  const std::vector<ComplexVolume>& maps() const noexcept { return maps_; }

 private:
  Dims dims_{};
  std::vector<ComplexVolume> maps_;
};

class EncodingOperator {
 public:
  EncodingOperator(SensitivitySet sensitivities, SenseGeometry geometry);

  const SensitivitySet& sensitivities() const noexcept { return sens_; }
  const SenseGeometry& geometry() const noexcept { return geometry_; }
  std::size_t coils() const noexcept { return sens_.coils(); }

  // L x R matrix S(r) of reduced voxel (ix, iy, iz).
  CMatrix matrix(std::size_t ix, std::size_t iy, std::size_t iz) const;
  CMatrix matrix(std::size_t reduced_voxel) const;

 private:
  SensitivitySet sens_;
  SenseGeometry geometry_;
};

// Per reduced-FOV voxel quantities of the whitened model, computed once and
// shared by the closed-form reconstruction, the data-fidelity prox and the
// criterion. Normal matrix A(r) = S^H Psi^-1 S (R x R).
class SenseSystem {
 public:
  SenseSystem(const EncodingOperator& enc, const NoiseCovariance& psi);

  const SenseGeometry& geometry() const noexcept { return geometry_; }
  std::size_t coils() const noexcept { return coils_; }
  std::size_t reduction() const noexcept { return geometry_.reduction(); }
  std::size_t voxels() const noexcept { return geometry_.reduced_dims().count(); }

  std::span<const cplx> normal_matrix(std::size_t voxel) const;

  // Whitened data W d^t for one frame, L values per reduced voxel.
  std::vector<cplx> whiten(const CoilDataset& d, std::size_t frame) const;
  // S^H Psi^-1 d^t for one frame, R values per reduced voxel.
  std::vector<cplx> back_project(const CoilDataset& d, std::size_t frame) const;

  // J_WLS(rho) = sum_r ||d(r) - S(r) rho(r)||^2_{Psi^-1}, given whitened data.
  double residual(const ComplexVolume& rho, std::span<const cplx> whitened) const;

  // Stacks / scatters the R aliased full-FOV values of a reduced voxel.
  void gather(const ComplexVolume& rho, std::size_t voxel, cplx* out) const;
  void scatter(ComplexVolume& rho, std::size_t voxel, const cplx* in) const;

 private:
  SenseGeometry geometry_;
  std::size_t coils_ = 0;
  std::vector<cplx> whitened_s_;  // per voxel, L x R row-major
  std::vector<cplx> normal_;      // per voxel, R x R row-major
  CMatrix whitener_;
};

// Aliased single-frame acquisition d_l = sum_k s_l(y + k dy) rho(y + k dy).
CoilDataset fold(const ComplexVolume& rho, const EncodingOperator& enc);

// Per voxel S^H Psi^-1 d, the adjoint of fold in the Psi^-1 inner product.
ComplexVolume fold_adjoint(const CoilDataset& d, std::size_t frame, const EncodingOperator& enc,
                           const NoiseCovariance& psi);

// Root sum of squares of full-FOV coil images.
RealVolume sos(std::span<const ComplexVolume> coil_images);

// Coil images divided by their SOS on the mask SOS > threshold * max(SOS),
// zero elsewhere. Throws EmptyMask if the SOS is identically zero.
SensitivitySet estimate_sensitivities(std::span<const ComplexVolume> coil_images,
                                      double threshold = 0.05);

// Sample covariance mean(n_l conj(n_m)) of noise-only samples (one vector per
// coil) plus diagonal loading 1e-8 trace / L. Needs >= 10 L samples.
NoiseCovariance estimate_noise_cov(std::span<const std::vector<cplx>> samples);

// Closed-form 1D-SENSE: minimum-norm WLS unfolding of every frame.
VolumeSeries sense_wls(const CoilDataset& d, const EncodingOperator& enc,
                       const NoiseCovariance& psi);

// J_WLS of one frame.
double wls_criterion(const ComplexVolume& rho, const CoilDataset& d, std::size_t frame,
                     const EncodingOperator& enc, const NoiseCovariance& psi);

}  // namespace uwr
