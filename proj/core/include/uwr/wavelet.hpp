#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "uwr/volume.hpp"

namespace uwr {

enum class WaveletFamily { Haar, Symmlet8 };

// Orthonormal two-channel filter bank plus decomposition depth. The
// highpass filter is the alternating flip g[n] = (-1)^n h[L-1-n] of the
// lowpass taps; synthesis uses the same taps (time-reversed convolution).
struct WaveletSpec {
  WaveletFamily family = WaveletFamily::Symmlet8;
  int levels = 3;
  std::vector<double> lowpass;

  std::size_t filter_length() const noexcept { return lowpass.size(); }
  std::vector<double> highpass() const;
  std::string name() const;

  static WaveletSpec haar(int levels);
  static WaveletSpec symmlet8(int levels = 3);
  static WaveletSpec from_name(const std::string& family, int levels);
};

// One subband of the coefficient field: the approximation band at the
// coarsest level, or a detail band for orientation o in {0,1}^3 \ {0}
// (bit 0 = x, bit 1 = y, bit 2 = z; a set bit means highpass on that axis)
// at level j in 1..levels.
struct SubbandId {
  bool approx = false;
  int orientation = 0;
  int level = 0;

  std::string name() const;  // "approx" or e.g. "d101_j2"
  friend bool operator==(const SubbandId&, const SubbandId&) = default;
};

struct Subband {
  SubbandId id;
  std::size_t offset = 0;
  std::size_t size = 0;
  Dims dims{};
};

// Packed subband order: approx first, then levels 1..J, orientations 1..7.
class CoeffLayout {
 public:
  CoeffLayout() = default;
  CoeffLayout(Dims dims, int levels);

  const Dims& dims() const noexcept { return dims_; }
  int levels() const noexcept { return levels_; }
  std::size_t total() const noexcept { return dims_.count(); }
  const std::vector<Subband>& subbands() const noexcept { return bands_; }
  std::size_t subband_count() const noexcept { return bands_.size(); }
  // Index of the detail band (orientation, level) or of the approx band.
  std::size_t index_of(const SubbandId& id) const;

  friend bool operator==(const CoeffLayout& a, const CoeffLayout& b) {
    return a.dims_ == b.dims_ && a.levels_ == b.levels_;
  }

 private:
  Dims dims_{};
  int levels_ = 0;
  std::vector<Subband> bands_;
};

// Wavelet coefficients of one volume, stored contiguously in layout order.
class CoeffField {
 public:
  CoeffField() = default;
  explicit CoeffField(CoeffLayout layout);
  CoeffField(CoeffLayout layout, std::vector<cplx> data);

  const CoeffLayout& layout() const noexcept { return layout_; }
  std::size_t size() const noexcept { return data_.size(); }
  std::span<cplx> values() noexcept { return data_; }
  std::span<const cplx> values() const noexcept { return data_; }
  std::span<cplx> subband(std::size_t index);
  std::span<const cplx> subband(std::size_t index) const;
  std::span<const cplx> approx() const { return subband(0); }

  cplx& operator[](std::size_t i) { return data_[i]; }
  const cplx& operator[](std::size_t i) const { return data_[i]; }

  double squared_norm() const noexcept;
  bool same_shape(const CoeffField& other) const noexcept { return layout_ == other.layout_; }

  friend bool operator==(const CoeffField& a, const CoeffField& b) {
    return a.layout_ == b.layout_ && a.data_ == b.data_;
  }

 private:
  CoeffLayout layout_{};
  std::vector<cplx> data_;
};

using CoeffSeries = std::vector<CoeffField>;

// Dyadic periodic 3D orthonormal DWT (operator T). Throws DimsNotDivisible
// unless every extent is a multiple of 2^levels.
CoeffField forward(const ComplexVolume& volume, const WaveletSpec& spec);

// Synthesis (operator T*), exact inverse and adjoint of forward. Throws
// MalformedField if the field's layout does not match spec.levels.
ComplexVolume inverse(const CoeffField& coeffs, const WaveletSpec& spec);

CoeffSeries forward(const VolumeSeries& series, const WaveletSpec& spec);
VolumeSeries inverse(const CoeffSeries& coeffs, const WaveletSpec& spec);

}  // namespace uwr
