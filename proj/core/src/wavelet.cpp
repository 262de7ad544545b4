#include "uwr/wavelet.hpp"

#include <array>
#include <cmath>
#include <string>

#include "uwr/error.hpp"
#include "uwr/parallel.hpp"

namespace uwr {
namespace {

// Least-asymmetric Daubechies, 4 vanishing moments (8 taps).
constexpr std::array<double, 8> kSymmlet8 = {
    -0.075765714789502464531, -0.029635527646003882431, 0.49761866763277296498,
    0.80373875180513240454,   0.29785779560530857835,   -0.099219543576632561103,
    -0.012603967262032106851, 0.032223100604052115845,
};

void check_divisible(const Dims& d, int levels) {
  if (levels < 1) throw Error(ErrorKind::InvalidArgument, "wavelet levels must be >= 1");
  const std::size_t m = std::size_t{1} << levels;
  if (d.x == 0 || d.y == 0 || d.z == 0 || d.x % m || d.y % m || d.z % m) {
    throw Error(ErrorKind::DimsNotDivisible,
                "dims " + std::to_string(d.x) + "x" + std::to_string(d.y) + "x" +
                    std::to_string(d.z) + " not divisible by 2^" + std::to_string(levels));
  }
}

struct Filters {
  std::vector<double> lo;
  std::vector<double> hi;
};

// One periodic analysis step on a line of length n (even): first half low,
// second half high.
void analyze_line(const cplx* in, cplx* out, std::size_t n, const Filters& f) {
  const std::size_t half = n / 2;
  const std::size_t taps = f.lo.size();
  for (std::size_t k = 0; k < half; ++k) {
    cplx a = 0.0;
    cplx d = 0.0;
    std::size_t idx = (2 * k) % n;
    for (std::size_t t = 0; t < taps; ++t) {
      a += f.lo[t] * in[idx];
      d += f.hi[t] * in[idx];
      if (++idx == n) idx = 0;
    }
    out[k] = a;
    out[half + k] = d;
  }
}

// Transpose of analyze_line.
void synthesize_line(const cplx* in, cplx* out, std::size_t n, const Filters& f) {
  const std::size_t half = n / 2;
  const std::size_t taps = f.lo.size();
  for (std::size_t m = 0; m < n; ++m) out[m] = 0.0;
  for (std::size_t k = 0; k < half; ++k) {
    const cplx a = in[k];
    const cplx d = in[half + k];
    std::size_t idx = (2 * k) % n;
    for (std::size_t t = 0; t < taps; ++t) {
      out[idx] += f.lo[t] * a + f.hi[t] * d;
      if (++idx == n) idx = 0;
    }
  }
}

// Applies a line operation along one axis of the sub-cube [0,nx)x[0,ny)x[0,nz)
// embedded in a buffer with full dims.
template <class LineOp>
void along_axis(std::vector<cplx>& buf, const Dims& full, std::size_t nx, std::size_t ny,
                std::size_t nz, int axis, LineOp op) {
  const std::size_t len = axis == 0 ? nx : axis == 1 ? ny : nz;
  const std::size_t stride = axis == 0 ? 1 : axis == 1 ? full.x : full.x * full.y;
  const std::size_t outer_a = axis == 0 ? ny : nx;
  const std::size_t outer_b = axis == 2 ? ny : nz;
  const std::size_t lines = outer_a * outer_b;
  parallel_for(lines, 64, [&](std::size_t l0, std::size_t l1) {
    std::vector<cplx> in(len);
    std::vector<cplx> out(len);
    for (std::size_t l = l0; l < l1; ++l) {
      const std::size_t a = l % outer_a;
      const std::size_t b = l / outer_a;
      std::size_t base = 0;
      if (axis == 0) base = full.index(0, a, b);
      else if (axis == 1) base = full.index(a, 0, b);
      else base = full.index(a, b, 0);
      for (std::size_t i = 0; i < len; ++i) in[i] = buf[base + i * stride];
      op(in.data(), out.data(), len);
      for (std::size_t i = 0; i < len; ++i) buf[base + i * stride] = out[i];
    }
  });
}

Filters filters_of(const WaveletSpec& spec) {
  if (spec.lowpass.empty() || spec.lowpass.size() % 2) {
    throw Error(ErrorKind::InvalidArgument, "wavelet lowpass must have even, nonzero length");
  }
  return {spec.lowpass, spec.highpass()};
}

// Iterates the region of subband `b` inside a Mallat-layout volume.
template <class Fn>
void for_each_in_band(const Dims& full, const Subband& b, Fn fn) {
  std::size_t x0 = 0, y0 = 0, z0 = 0;
  if (!b.id.approx) {
    x0 = (b.id.orientation & 1) ? b.dims.x : 0;
    y0 = (b.id.orientation & 2) ? b.dims.y : 0;
    z0 = (b.id.orientation & 4) ? b.dims.z : 0;
  }
  std::size_t k = 0;
  for (std::size_t z = 0; z < b.dims.z; ++z)
    for (std::size_t y = 0; y < b.dims.y; ++y)
      for (std::size_t x = 0; x < b.dims.x; ++x) fn(full.index(x0 + x, y0 + y, z0 + z), k++);
}

}  // namespace

std::vector<double> WaveletSpec::highpass() const {
  const std::size_t n = lowpass.size();
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = (i % 2 ? -1.0 : 1.0) * lowpass[n - 1 - i];
  return g;
}

std::string WaveletSpec::name() const {
  return family == WaveletFamily::Haar ? "haar" : "symmlet8";
}

WaveletSpec WaveletSpec::haar(int levels) {
  const double r = 1.0 / std::sqrt(2.0);
  return {WaveletFamily::Haar, levels, {r, r}};
}

WaveletSpec WaveletSpec::symmlet8(int levels) {
  return {WaveletFamily::Symmlet8, levels, {kSymmlet8.begin(), kSymmlet8.end()}};
}

WaveletSpec WaveletSpec::from_name(const std::string& family, int levels) {
  if (family == "haar") return haar(levels);
  if (family == "symmlet8" || family == "sym8" || family == "symmlet") return symmlet8(levels);
  throw Error(ErrorKind::InvalidArgument, "unknown wavelet family '" + family + "'");
}

std::string SubbandId::name() const {
  if (approx) return "approx";
  std::string s = "d";
  s += (orientation & 1) ? '1' : '0';
  s += (orientation & 2) ? '1' : '0';
  s += (orientation & 4) ? '1' : '0';
  return s + "_j" + std::to_string(level);
}

CoeffLayout::CoeffLayout(Dims dims, int levels) : dims_(dims), levels_(levels) {
  check_divisible(dims, levels);
  std::size_t offset = 0;
  const std::size_t c = std::size_t{1} << levels;
  Dims coarse{dims.x / c, dims.y / c, dims.z / c};
  bands_.push_back({{true, 0, levels}, offset, coarse.count(), coarse});
  offset += coarse.count();
  for (int j = 1; j <= levels; ++j) {
    const std::size_t s = std::size_t{1} << j;
    Dims bd{dims.x / s, dims.y / s, dims.z / s};
    for (int o = 1; o <= 7; ++o) {
      bands_.push_back({{false, o, j}, offset, bd.count(), bd});
      offset += bd.count();
    }
  }
}

std::size_t CoeffLayout::index_of(const SubbandId& id) const {
  if (id.approx) return 0;
  if (id.orientation < 1 || id.orientation > 7 || id.level < 1 || id.level > levels_) {
    throw Error(ErrorKind::InvalidArgument, "no such subband " + id.name());
  }
  return 1 + static_cast<std::size_t>((id.level - 1) * 7 + (id.orientation - 1));
}

CoeffField::CoeffField(CoeffLayout layout) : layout_(std::move(layout)), data_(layout_.total()) {}

CoeffField::CoeffField(CoeffLayout layout, std::vector<cplx> data)
    : layout_(std::move(layout)), data_(std::move(data)) {
  if (data_.size() != layout_.total()) {
    throw Error(ErrorKind::MalformedField, "coefficient count " + std::to_string(data_.size()) +
                                               " != " + std::to_string(layout_.total()));
  }
}

std::span<cplx> CoeffField::subband(std::size_t index) {
  const auto& b = layout_.subbands().at(index);
  return std::span<cplx>(data_).subspan(b.offset, b.size);
}

std::span<const cplx> CoeffField::subband(std::size_t index) const {
  const auto& b = layout_.subbands().at(index);
  return std::span<const cplx>(data_).subspan(b.offset, b.size);
}

double CoeffField::squared_norm() const noexcept {
  double s = 0.0;
  for (const auto& v : data_) s += std::norm(v);
  return s;
}

CoeffField forward(const ComplexVolume& volume, const WaveletSpec& spec) {
  const Dims d = volume.dims();
  CoeffLayout layout(d, spec.levels);
  const Filters f = filters_of(spec);
  std::vector<cplx> buf = volume.storage();
  auto op = [&f](const cplx* in, cplx* out, std::size_t n) { analyze_line(in, out, n, f); };
  std::size_t nx = d.x, ny = d.y, nz = d.z;
  for (int j = 1; j <= spec.levels; ++j) {
    along_axis(buf, d, nx, ny, nz, 0, op);
    along_axis(buf, d, nx, ny, nz, 1, op);
    along_axis(buf, d, nx, ny, nz, 2, op);
    nx /= 2;
    ny /= 2;
    nz /= 2;
  }
  CoeffField out(layout);
  auto values = out.values();
  for (const auto& b : layout.subbands()) {
    for_each_in_band(d, b, [&](std::size_t src, std::size_t k) { values[b.offset + k] = buf[src]; });
  }
  return out;
}

ComplexVolume inverse(const CoeffField& coeffs, const WaveletSpec& spec) {
  const CoeffLayout& layout = coeffs.layout();
  if (layout.levels() != spec.levels || coeffs.size() != layout.total() || layout.total() == 0) {
    throw Error(ErrorKind::MalformedField, "coefficient field does not match wavelet depth");
  }
  const Dims d = layout.dims();
  const Filters f = filters_of(spec);
  std::vector<cplx> buf(d.count());
  auto values = coeffs.values();
  for (const auto& b : layout.subbands()) {
    for_each_in_band(d, b, [&](std::size_t dst, std::size_t k) { buf[dst] = values[b.offset + k]; });
  }
  auto op = [&f](const cplx* in, cplx* out, std::size_t n) { synthesize_line(in, out, n, f); };
  for (int j = spec.levels; j >= 1; --j) {
    const std::size_t s = std::size_t{1} << (j - 1);
    const std::size_t nx = d.x / s, ny = d.y / s, nz = d.z / s;
    along_axis(buf, d, nx, ny, nz, 2, op);
    along_axis(buf, d, nx, ny, nz, 1, op);
    along_axis(buf, d, nx, ny, nz, 0, op);
  }
  return ComplexVolume(d, std::move(buf));
}

CoeffSeries forward(const VolumeSeries& series, const WaveletSpec& spec) {
  CoeffSeries out;
  out.reserve(series.frames());
  for (const auto& frame : series) out.push_back(forward(frame, spec));
  return out;
}

VolumeSeries inverse(const CoeffSeries& coeffs, const WaveletSpec& spec) {
  std::vector<ComplexVolume> frames;
  frames.reserve(coeffs.size());
  for (const auto& c : coeffs) frames.push_back(inverse(c, spec));
  return VolumeSeries(std::move(frames));
}

}  // namespace uwr
