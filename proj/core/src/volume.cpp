#include "uwr/volume.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "uwr/error.hpp"

namespace uwr {

ComplexVolume::ComplexVolume(Dims dims) : dims_(dims), data_(dims.count()) {}

ComplexVolume::ComplexVolume(Dims dims, std::vector<cplx> data)
    : dims_(dims), data_(std::move(data)) {
  if (data_.size() != dims_.count()) {
    throw Error(ErrorKind::ShapeMismatch, "volume data length " + std::to_string(data_.size()) +
                                              " != X*Y*Z " + std::to_string(dims_.count()));
  }
}

double ComplexVolume::squared_norm() const noexcept {
  double s = 0.0;
  for (const auto& v : data_) s += std::norm(v);
  return s;
}

bool ComplexVolume::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](const cplx& v) {
    return std::isfinite(v.real()) && std::isfinite(v.imag());
  });
}

VolumeSeries::VolumeSeries(std::vector<ComplexVolume> frames) : frames_(std::move(frames)) {
  if (frames_.empty()) throw Error(ErrorKind::InvalidArgument, "series needs at least one frame");
  dims_ = frames_.front().dims();
  for (const auto& f : frames_) {
    if (f.dims() != dims_) throw Error(ErrorKind::ShapeMismatch, "series frames differ in dims");
  }
}

VolumeSeries::VolumeSeries(Dims dims, std::size_t frames)
    : dims_(dims), frames_(frames, ComplexVolume(dims)) {
  if (frames == 0) throw Error(ErrorKind::InvalidArgument, "series needs at least one frame");
}

SenseGeometry::SenseGeometry(Dims full, std::size_t reduction) : full_(full), reduction_(reduction) {
  if (reduction == 0) throw Error(ErrorKind::GeometryMismatch, "R must be >= 1");
  if (full.y % reduction != 0) {
    throw Error(ErrorKind::GeometryMismatch, "R must divide Y (Y=" + std::to_string(full.y) +
                                                 ", R=" + std::to_string(reduction) + ")");
  }
}

CoilDataset::CoilDataset(SenseGeometry geometry, std::size_t coils, std::size_t frames)
    : geometry_(geometry), coils_(coils), frames_(frames),
      samples_(coils * frames * geometry.reduced_dims().count()) {
  if (coils == 0 || frames == 0) {
    throw Error(ErrorKind::InvalidArgument, "dataset needs at least one coil and one frame");
  }
}

std::span<cplx> CoilDataset::image(std::size_t coil, std::size_t frame) {
  return std::span<cplx>(samples_).subspan((coil * frames_ + frame) * voxels(), voxels());
}

std::span<const cplx> CoilDataset::image(std::size_t coil, std::size_t frame) const {
  return std::span<const cplx>(samples_).subspan((coil * frames_ + frame) * voxels(), voxels());
}

CoilDataset CoilDataset::frame(std::size_t t) const {
  if (t >= frames_) throw Error(ErrorKind::InvalidArgument, "frame index out of range");
  CoilDataset out(geometry_, coils_, 1);
  for (std::size_t l = 0; l < coils_; ++l) {
    auto src = image(l, t);
    std::copy(src.begin(), src.end(), out.image(l, 0).begin());
  }
  return out;
}

}  // namespace uwr
