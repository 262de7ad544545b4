#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace uwr {

using cplx = std::complex<double>;

struct Dims {
  std::size_t x = 0;
  std::size_t y = 0;
  std::size_t z = 0;

  std::size_t count() const noexcept { return x * y * z; }
  // Linear index, x fastest, then y, then z.
  std::size_t index(std::size_t ix, std::size_t iy, std::size_t iz) const noexcept {
    return (iz * y + iy) * x + ix;
  }
  friend bool operator==(const Dims&, const Dims&) = default;
};

// Complex 3D image, voxel order x-fastest then y then z.
class ComplexVolume {
 public:
  ComplexVolume() = default;
  explicit ComplexVolume(Dims dims);
  ComplexVolume(Dims dims, std::vector<cplx> data);

  const Dims& dims() const noexcept { return dims_; }
  std::size_t size() const noexcept { return data_.size(); }

  cplx& operator()(std::size_t ix, std::size_t iy, std::size_t iz) {
    return data_[dims_.index(ix, iy, iz)];
  }
  const cplx& operator()(std::size_t ix, std::size_t iy, std::size_t iz) const {
    return data_[dims_.index(ix, iy, iz)];
  }
  cplx& operator[](std::size_t i) { return data_[i]; }
  const cplx& operator[](std::size_t i) const { return data_[i]; }

  std::span<cplx> values() noexcept { return data_; }
  std::span<const cplx> values() const noexcept { return data_; }
  std::vector<cplx>& storage() noexcept { return data_; }
  const std::vector<cplx>& storage() const noexcept { return data_; }

  double squared_norm() const noexcept;
  bool all_finite() const noexcept;

  friend bool operator==(const ComplexVolume&, const ComplexVolume&) = default;

 private:
  Dims dims_{};
  std::vector<cplx> data_;
};

// Real-valued companion (SOS images, masks as 0/1).
struct RealVolume {
  Dims dims{};
  std::vector<double> data;
};

using Mask = std::vector<bool>;

// 3D+t sequence; every frame shares dims.
class VolumeSeries {
 public:
  VolumeSeries() = default;
  explicit VolumeSeries(std::vector<ComplexVolume> frames);
  VolumeSeries(Dims dims, std::size_t frames);

  std::size_t frames() const noexcept { return frames_.size(); }
  const Dims& dims() const noexcept { return dims_; }
  ComplexVolume& operator[](std::size_t t) { return frames_[t]; }
  const ComplexVolume& operator[](std::size_t t) const { return frames_[t]; }
  auto begin() const { return frames_.begin(); }
  auto end() const { return frames_.end(); }

  friend bool operator==(const VolumeSeries&, const VolumeSeries&) = default;

 private:
  Dims dims_{};
  std::vector<ComplexVolume> frames_;
};

// Undersampling along y: R aliased copies spaced delta_y = Y / R apart.
class SenseGeometry {
 public:
  SenseGeometry() = default;
  SenseGeometry(Dims full, std::size_t reduction);

  std::size_t reduction() const noexcept { return reduction_; }
  std::size_t delta_y() const noexcept { return full_.y / reduction_; }
  const Dims& full_dims() const noexcept { return full_; }
  Dims reduced_dims() const noexcept { return {full_.x, delta_y(), full_.z}; }

  // Full-FOV linear index of alias k of reduced voxel (ix, iy, iz).
  std::size_t alias_index(std::size_t ix, std::size_t iy, std::size_t iz, std::size_t k) const noexcept {
    return full_.index(ix, iy + k * delta_y(), iz);
  }

  friend bool operator==(const SenseGeometry&, const SenseGeometry&) = default;

 private:
  Dims full_{};
  std::size_t reduction_ = 1;
};

// Reduced-FOV coil images for every coil and frame. Sample order matches the
// PVOL payload: x, y, z, then frame, coil outermost.
class CoilDataset {
 public:
  CoilDataset() = default;
  CoilDataset(SenseGeometry geometry, std::size_t coils, std::size_t frames);

  const SenseGeometry& geometry() const noexcept { return geometry_; }
  std::size_t coils() const noexcept { return coils_; }
  std::size_t frames() const noexcept { return frames_; }
  Dims reduced_dims() const noexcept { return geometry_.reduced_dims(); }
  std::size_t voxels() const noexcept { return reduced_dims().count(); }

  std::span<cplx> image(std::size_t coil, std::size_t frame);
  std::span<const cplx> image(std::size_t coil, std::size_t frame) const;
  cplx& at(std::size_t coil, std::size_t frame, std::size_t voxel) {
    return samples_[(coil * frames_ + frame) * voxels() + voxel];
  }
  const cplx& at(std::size_t coil, std::size_t frame, std::size_t voxel) const {
    return samples_[(coil * frames_ + frame) * voxels() + voxel];
  }

  // Single-frame view copied out of a multi-frame dataset.
  CoilDataset frame(std::size_t t) const;

  std::vector<cplx>& samples() noexcept { return samples_; }
  const std::vector<cplx>& samples() const noexcept { return samples_; }

  friend bool operator==(const CoilDataset&, const CoilDataset&) = default;

 private:
  SenseGeometry geometry_{};
  std::size_t coils_ = 0;
  std::size_t frames_ = 0;
  std::vector<cplx> samples_;
};

}  // namespace uwr
