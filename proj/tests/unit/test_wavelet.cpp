#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "uwr/error.hpp"
#include "uwr/wavelet.hpp"

namespace uwr {
namespace {

using testing::random_volume;

double rel_err(const ComplexVolume& a, const ComplexVolume& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - b[i]);
    den += std::norm(b[i]);
  }
  return std::sqrt(num / den);
}

cplx inner(std::span<const cplx> a, std::span<const cplx> b) {
  cplx s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * std::conj(b[i]);
  return s;
}

TEST(WaveletSpec, FilterInvariants) {
  for (const auto& spec : {WaveletSpec::haar(1), WaveletSpec::symmlet8(3)}) {
    const auto& h = spec.lowpass;
    EXPECT_NEAR(std::accumulate(h.begin(), h.end(), 0.0), std::sqrt(2.0), 1e-12) << spec.name();
    // Orthonormal to even shifts.
    for (std::size_t shift = 0; shift < h.size(); shift += 2) {
      double s = 0.0;
      for (std::size_t n = 0; n + shift < h.size(); ++n) s += h[n] * h[n + shift];
      EXPECT_NEAR(s, shift == 0 ? 1.0 : 0.0, 1e-14) << spec.name() << " shift " << shift;
    }
    const auto g = spec.highpass();
    EXPECT_NEAR(std::accumulate(g.begin(), g.end(), 0.0), 0.0, 1e-14);
  }
  EXPECT_EQ(WaveletSpec::symmlet8().filter_length(), 8u);
  EXPECT_EQ(WaveletSpec::from_name("haar", 2).family, WaveletFamily::Haar);
  EXPECT_THROW(WaveletSpec::from_name("db4", 2), Error);
}

TEST(CoeffLayout, SubbandAccounting) {
  const CoeffLayout layout(Dims{16, 16, 8}, 3);
  EXPECT_EQ(layout.subband_count(), 1u + 7u * 3u);
  std::size_t total = 0;
  for (const auto& b : layout.subbands()) {
    EXPECT_EQ(b.offset, total);
    total += b.size;
    if (!b.id.approx) EXPECT_EQ(b.size, layout.total() >> (3 * b.id.level)) << b.id.name();
  }
  EXPECT_EQ(total, 16u * 16u * 8u);
  EXPECT_EQ(layout.subbands()[0].size, 2u * 2u * 1u);
  EXPECT_EQ(layout.subbands()[0].id.name(), "approx");
  EXPECT_EQ(layout.subbands()[layout.index_of({false, 5, 2})].id.name(), "d101_j2");
  try {
    CoeffLayout(Dims{16, 12, 8}, 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DimsNotDivisible);
  }
}

TEST(Wavelet, ConstantKillsHaarDetails) {
  const Dims d{4, 4, 4};
  const ComplexVolume c(d, std::vector<cplx>(d.count(), cplx(2.0, -1.0)));
  const CoeffField f = forward(c, WaveletSpec::haar(1));
  EXPECT_EQ(f.layout().subband_count(), 8u);
  for (std::size_t b = 1; b < 8; ++b)
    for (cplx v : f.subband(b)) EXPECT_NEAR(std::abs(v), 0.0, 1e-14);
  EXPECT_EQ(f.size(), d.count());
}

TEST(Wavelet, HaarApproxOnlyGivesBlocks) {
  // Synthesis of an approx-only field at level J: each 2^J block is
  // constant with value a / 2^(3J/2).
  const Dims d{8, 8, 8};
  const auto spec = WaveletSpec::haar(2);
  CoeffField f(CoeffLayout(d, 2));
  auto approx = f.subband(0);
  for (std::size_t i = 0; i < approx.size(); ++i) approx[i] = cplx(static_cast<double>(i + 1), 0.5);
  const ComplexVolume v = inverse(f, spec);
  const double scale = std::pow(2.0, 3.0 * 2 / 2.0);
  for (std::size_t z = 0; z < 8; ++z)
    for (std::size_t y = 0; y < 8; ++y)
      for (std::size_t x = 0; x < 8; ++x) {
        const std::size_t bi = (z / 4 * 2 + y / 4) * 2 + x / 4;
        EXPECT_NEAR(std::abs(v(x, y, z) - approx[bi] / scale), 0.0, 1e-14);
      }
}

TEST(Wavelet, DeltaRoundTrip) {
  const Dims d{16, 16, 8};
  ComplexVolume delta(d);
  delta(3, 9, 5) = 1.0;
  const auto spec = WaveletSpec::symmlet8(3);
  const ComplexVolume back = inverse(forward(delta, spec), spec);
  for (std::size_t i = 0; i < d.count(); ++i) EXPECT_NEAR(std::abs(back[i] - delta[i]), 0.0, 1e-12);
}

TEST(Wavelet, PerfectReconstructionAndParseval) {
  std::mt19937_64 rng(17);
  for (const auto& spec : {WaveletSpec::haar(3), WaveletSpec::symmlet8(3), WaveletSpec::symmlet8(1)}) {
    for (int rep = 0; rep < 5; ++rep) {
      const auto v = random_volume(Dims{16, 16, 16}, rng);
      const CoeffField f = forward(v, spec);
      EXPECT_NEAR(f.squared_norm() / v.squared_norm(), 1.0, 1e-10);
      EXPECT_LE(rel_err(inverse(f, spec), v), 1e-10);
    }
  }
}

TEST(Wavelet, AdjointIdentity) {
  std::mt19937_64 rng(19);
  const Dims d{16, 8, 8};
  const auto spec = WaveletSpec::symmlet8(3);
  const CoeffLayout layout(d, 3);
  for (int rep = 0; rep < 10; ++rep) {
    const auto x = random_volume(d, rng);
    const auto yv = random_volume(d, rng);
    const CoeffField y(layout, yv.storage());
    const cplx lhs = inner(forward(x, spec).values(), y.values());
    const cplx rhs = inner(x.values(), inverse(y, spec).values());
    EXPECT_LE(std::abs(lhs - rhs), 1e-10 * std::sqrt(x.squared_norm() * yv.squared_norm()));
  }
}

// A volume constant along z, Haar at one level: the z-highpass bands vanish
// and the z-lowpass bands equal the brute-force 2D Haar transform of the
// slice, scaled by sqrt(2) and replicated along z.
TEST(Wavelet, SeparableConsistencyHaar) {
  std::mt19937_64 rng(23);
  const Dims d{8, 8, 8};
  const auto slice = random_volume(Dims{8, 8, 1}, rng);
  ComplexVolume v(d);
  for (std::size_t z = 0; z < 8; ++z)
    for (std::size_t y = 0; y < 8; ++y)
      for (std::size_t x = 0; x < 8; ++x) v(x, y, z) = slice(x, y, 0);
  const CoeffField f = forward(v, WaveletSpec::haar(1));
  const auto& layout = f.layout();
  const double r = 1.0 / std::sqrt(2.0);
  for (int o = 0; o < 8; ++o) {
    const std::size_t b = o == 0 ? 0 : layout.index_of({false, o, 1});
    const auto band = f.subband(b);
    const Dims bd = layout.subbands()[b].dims;
    const bool hx = o & 1, hy = o & 2, hz = o & 4;
    for (std::size_t z = 0; z < bd.z; ++z)
      for (std::size_t y = 0; y < bd.y; ++y)
        for (std::size_t x = 0; x < bd.x; ++x) {
          cplx expect = 0.0;
          if (!hz) {
            for (int dy = 0; dy < 2; ++dy)
              for (int dx = 0; dx < 2; ++dx) {
                const double wx = hx ? (dx == 0 ? r : -r) : r;
                const double wy = hy ? (dy == 0 ? r : -r) : r;
                expect += wx * wy * slice(2 * x + dx, 2 * y + dy, 0);
              }
            expect *= std::sqrt(2.0);
          }
          // Sign convention of the highpass is a global +-1 per axis.
          EXPECT_NEAR(std::abs(band[bd.index(x, y, z)]), std::abs(expect), 1e-13) << "o=" << o;
        }
  }
}

TEST(Wavelet, MalformedField) {
  const CoeffLayout layout(Dims{8, 8, 8}, 1);
  EXPECT_THROW(CoeffField(layout, std::vector<cplx>(10)), Error);
  CoeffField f(layout);
  try {
    inverse(f, WaveletSpec::haar(2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MalformedField);
  }
}

}  // namespace
}  // namespace uwr
