#include "uwr/sense.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "uwr/error.hpp"
#include "uwr/parallel.hpp"

namespace uwr {

SensitivitySet::SensitivitySet(std::vector<ComplexVolume> maps) : maps_(std::move(maps)) {
  if (maps_.empty()) throw Error(ErrorKind::InvalidArgument, "need at least one coil map");
  dims_ = maps_.front().dims();
  for (const auto& m : maps_) {
    if (m.dims() != dims_) throw Error(ErrorKind::GeometryMismatch, "coil maps differ in dims");
    if (!m.all_finite()) throw Error(ErrorKind::InvalidArgument, "non-finite sensitivity value");
  }
}

EncodingOperator::EncodingOperator(SensitivitySet sensitivities, SenseGeometry geometry)
    : sens_(std::move(sensitivities)), geometry_(geometry) {
  if (sens_.dims() != geometry_.full_dims()) {
    throw Error(ErrorKind::GeometryMismatch, "sensitivity dims do not match acquisition geometry");
  }
}

CMatrix EncodingOperator::matrix(std::size_t ix, std::size_t iy, std::size_t iz) const {
  const std::size_t r = geometry_.reduction();
  CMatrix s(coils(), r);
  for (std::size_t l = 0; l < coils(); ++l) {
    for (std::size_t k = 0; k < r; ++k) s(l, k) = sens_.map(l)[geometry_.alias_index(ix, iy, iz, k)];
  }
  return s;
}

CMatrix EncodingOperator::matrix(std::size_t reduced_voxel) const {
  const Dims rd = geometry_.reduced_dims();
  const std::size_t ix = reduced_voxel % rd.x;
  const std::size_t iy = (reduced_voxel / rd.x) % rd.y;
  const std::size_t iz = reduced_voxel / (rd.x * rd.y);
  return matrix(ix, iy, iz);
}

SenseSystem::SenseSystem(const EncodingOperator& enc, const NoiseCovariance& psi)
    : geometry_(enc.geometry()), coils_(enc.coils()), whitener_(psi.whitener()) {
  if (psi.coils() != coils_) {
    throw Error(ErrorKind::GeometryMismatch, "noise covariance is " + std::to_string(psi.coils()) +
                                                 " coils, sensitivities " + std::to_string(coils_));
  }
  const std::size_t r = reduction();
  const std::size_t n = voxels();
  whitened_s_.resize(n * coils_ * r);
  normal_.resize(n * r * r);
  parallel_for(n, 256, [&](std::size_t v0, std::size_t v1) {
    for (std::size_t v = v0; v < v1; ++v) {
      const CMatrix ws = whitener_ * enc.matrix(v);
      cplx* out = &whitened_s_[v * coils_ * r];
      std::copy(ws.values().begin(), ws.values().end(), out);
      cplx* a = &normal_[v * r * r];
      for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j = 0; j < r; ++j) {
          cplx s = 0.0;
          for (std::size_t l = 0; l < coils_; ++l) s += std::conj(ws(l, i)) * ws(l, j);
          a[i * r + j] = s;
        }
      }
    }
  });
}

std::span<const cplx> SenseSystem::normal_matrix(std::size_t voxel) const {
  const std::size_t r = reduction();
  return std::span<const cplx>(normal_).subspan(voxel * r * r, r * r);
}

std::vector<cplx> SenseSystem::whiten(const CoilDataset& d, std::size_t frame) const {
  if (d.geometry() != geometry_ || d.coils() != coils_) {
    throw Error(ErrorKind::GeometryMismatch, "dataset does not match the encoding model");
  }
  const std::size_t n = voxels();
  std::vector<cplx> out(n * coils_);
  for (std::size_t v = 0; v < n; ++v) {
    for (std::size_t l = 0; l < coils_; ++l) {
      cplx s = 0.0;
      for (std::size_t m = 0; m <= l; ++m) s += whitener_(l, m) * d.at(m, frame, v);
      out[v * coils_ + l] = s;
    }
  }
  return out;
}

std::vector<cplx> SenseSystem::back_project(const CoilDataset& d, std::size_t frame) const {
  const std::vector<cplx> wd = whiten(d, frame);
  const std::size_t r = reduction();
  const std::size_t n = voxels();
  std::vector<cplx> out(n * r);
  for (std::size_t v = 0; v < n; ++v) {
    const cplx* ws = &whitened_s_[v * coils_ * r];
    for (std::size_t k = 0; k < r; ++k) {
      cplx s = 0.0;
      for (std::size_t l = 0; l < coils_; ++l) s += std::conj(ws[l * r + k]) * wd[v * coils_ + l];
      out[v * r + k] = s;
    }
  }
  return out;
}

double SenseSystem::residual(const ComplexVolume& rho, std::span<const cplx> whitened) const {
  if (rho.dims() != geometry_.full_dims() || whitened.size() != voxels() * coils_) {
    throw Error(ErrorKind::ShapeMismatch, "residual inputs do not match the encoding model");
  }
  const std::size_t r = reduction();
  return parallel_sum(voxels(), 512, [&](std::size_t v0, std::size_t v1) {
    std::vector<cplx> x(r);
    double acc = 0.0;
    for (std::size_t v = v0; v < v1; ++v) {
      gather(rho, v, x.data());
      const cplx* ws = &whitened_s_[v * coils_ * r];
      for (std::size_t l = 0; l < coils_; ++l) {
        cplx e = whitened[v * coils_ + l];
        for (std::size_t k = 0; k < r; ++k) e -= ws[l * r + k] * x[k];
        acc += std::norm(e);
      }
    }
    return acc;
  });
}

void SenseSystem::gather(const ComplexVolume& rho, std::size_t voxel, cplx* out) const {
  const Dims rd = geometry_.reduced_dims();
  const std::size_t ix = voxel % rd.x;
  const std::size_t iy = (voxel / rd.x) % rd.y;
  const std::size_t iz = voxel / (rd.x * rd.y);
  for (std::size_t k = 0; k < reduction(); ++k) out[k] = rho[geometry_.alias_index(ix, iy, iz, k)];
}

void SenseSystem::scatter(ComplexVolume& rho, std::size_t voxel, const cplx* in) const {
  const Dims rd = geometry_.reduced_dims();
  const std::size_t ix = voxel % rd.x;
  const std::size_t iy = (voxel / rd.x) % rd.y;
  const std::size_t iz = voxel / (rd.x * rd.y);
  for (std::size_t k = 0; k < reduction(); ++k) rho[geometry_.alias_index(ix, iy, iz, k)] = in[k];
}

CoilDataset fold(const ComplexVolume& rho, const EncodingOperator& enc) {
  const SenseGeometry& g = enc.geometry();
  if (rho.dims() != g.full_dims()) {
    throw Error(ErrorKind::GeometryMismatch, "image dims do not match acquisition geometry");
  }
  CoilDataset out(g, enc.coils(), 1);
  const Dims rd = g.reduced_dims();
  for (std::size_t l = 0; l < enc.coils(); ++l) {
    const ComplexVolume& s = enc.sensitivities().map(l);
    auto img = out.image(l, 0);
    for (std::size_t z = 0; z < rd.z; ++z)
      for (std::size_t y = 0; y < rd.y; ++y)
        for (std::size_t x = 0; x < rd.x; ++x) {
          cplx acc = 0.0;
          for (std::size_t k = 0; k < g.reduction(); ++k) {
            const std::size_t i = g.alias_index(x, y, z, k);
            acc += s[i] * rho[i];
          }
          img[rd.index(x, y, z)] = acc;
        }
  }
  return out;
}

ComplexVolume fold_adjoint(const CoilDataset& d, std::size_t frame, const EncodingOperator& enc,
                           const NoiseCovariance& psi) {
  const SenseSystem sys(enc, psi);
  const std::vector<cplx> b = sys.back_project(d, frame);
  ComplexVolume out(enc.geometry().full_dims());
  for (std::size_t v = 0; v < sys.voxels(); ++v) sys.scatter(out, v, &b[v * sys.reduction()]);
  return out;
}

RealVolume sos(std::span<const ComplexVolume> coil_images) {
  if (coil_images.empty()) throw Error(ErrorKind::InvalidArgument, "no coil images");
  const Dims d = coil_images.front().dims();
  RealVolume out{d, std::vector<double>(d.count(), 0.0)};
  for (const auto& c : coil_images) {
    if (c.dims() != d) throw Error(ErrorKind::ShapeMismatch, "coil images differ in dims");
    for (std::size_t i = 0; i < d.count(); ++i) out.data[i] += std::norm(c[i]);
  }
  for (auto& v : out.data) v = std::sqrt(v);
  return out;
}

SensitivitySet estimate_sensitivities(std::span<const ComplexVolume> coil_images, double threshold) {
  const RealVolume root = sos(coil_images);
  const double peak = *std::max_element(root.data.begin(), root.data.end());
  if (!(peak > 0.0)) throw Error(ErrorKind::EmptyMask, "sum of squares is identically zero");
  const double cut = threshold * peak;
  std::vector<ComplexVolume> maps;
  maps.reserve(coil_images.size());
  for (const auto& c : coil_images) {
    ComplexVolume s(root.dims);
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (root.data[i] > cut) s[i] = c[i] / root.data[i];
    }
    maps.push_back(std::move(s));
  }
  return SensitivitySet(std::move(maps));
}

NoiseCovariance estimate_noise_cov(std::span<const std::vector<cplx>> samples) {
  const std::size_t coils = samples.size();
  if (coils == 0) throw Error(ErrorKind::TooFewSamples, "no noise channels");
  const std::size_t n = samples.front().size();
  for (const auto& s : samples) {
    if (s.size() != n) throw Error(ErrorKind::ShapeMismatch, "noise channels differ in length");
  }
  if (n < 10 * coils) {
    throw Error(ErrorKind::TooFewSamples, std::to_string(n) + " samples for " +
                                              std::to_string(coils) + " coils (need >= 10 L)");
  }
  CMatrix psi(coils, coils);
  for (std::size_t l = 0; l < coils; ++l) {
    for (std::size_t m = l; m < coils; ++m) {
      cplx acc = 0.0;
      for (std::size_t k = 0; k < n; ++k) acc += samples[l][k] * std::conj(samples[m][k]);
      acc /= static_cast<double>(n);
      if (l == m) acc = acc.real();
      psi(l, m) = acc;
      psi(m, l) = std::conj(acc);
    }
  }
  double trace = 0.0;
  for (std::size_t l = 0; l < coils; ++l) trace += psi(l, l).real();
  const double loading = 1e-8 * trace / static_cast<double>(coils);
  for (std::size_t l = 0; l < coils; ++l) psi(l, l) += loading;
  return NoiseCovariance(std::move(psi));
}

VolumeSeries sense_wls(const CoilDataset& d, const EncodingOperator& enc,
                       const NoiseCovariance& psi) {
  const SenseSystem sys(enc, psi);
  const std::size_t r = sys.reduction();
  const std::size_t n = sys.voxels();
  std::vector<cplx> pinv(n * r * r);
  parallel_for(n, 256, [&](std::size_t v0, std::size_t v1) {
    for (std::size_t v = v0; v < v1; ++v) {
      auto a = sys.normal_matrix(v);
      const CMatrix p = hermitian_pseudo_inverse(CMatrix(r, r, {a.begin(), a.end()}));
      std::copy(p.values().begin(), p.values().end(), &pinv[v * r * r]);
    }
  });
  VolumeSeries out(enc.geometry().full_dims(), d.frames());
  for (std::size_t t = 0; t < d.frames(); ++t) {
    const std::vector<cplx> b = sys.back_project(d, t);
    ComplexVolume& rho = out[t];
    std::vector<cplx> x(r);
    for (std::size_t v = 0; v < n; ++v) {
      const cplx* p = &pinv[v * r * r];
      for (std::size_t i = 0; i < r; ++i) {
        cplx s = 0.0;
        for (std::size_t j = 0; j < r; ++j) s += p[i * r + j] * b[v * r + j];
        x[i] = s;
      }
      sys.scatter(rho, v, x.data());
    }
  }
  return out;
}

double wls_criterion(const ComplexVolume& rho, const CoilDataset& d, std::size_t frame,
                     const EncodingOperator& enc, const NoiseCovariance& psi) {
  const SenseSystem sys(enc, psi);
  return sys.residual(rho, sys.whiten(d, frame));
}

}  // namespace uwr
