#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "uwr/error.hpp"
#include "uwr/metrics.hpp"
#include "uwr/sense.hpp"
#include "uwr/simulator.hpp"

namespace uwr {
namespace {

using testing::random_cplx;
using testing::random_volume;

SensitivitySet unit_coils(Dims d, std::size_t l) {
  return SensitivitySet(std::vector<ComplexVolume>(l, ComplexVolume(d, std::vector<cplx>(d.count(), 1.0))));
}

SensitivitySet random_coils(Dims d, std::size_t l, std::mt19937_64& rng) {
  std::vector<ComplexVolume> maps;
  for (std::size_t i = 0; i < l; ++i) maps.push_back(random_volume(d, rng));
  return SensitivitySet(std::move(maps));
}

CMatrix random_psi(std::size_t l, std::mt19937_64& rng) {
  CMatrix b(l, l);
  for (auto& v : b.values()) v = random_cplx(rng, 0.3);
  CMatrix a = b.adjoint() * b;
  for (std::size_t i = 0; i < l; ++i) a(i, i) += 1.0;
  return a;
}

TEST(Fold, HandSumOfAliasedPair) {
  const Dims d{1, 4, 1};
  const EncodingOperator enc(unit_coils(d, 1), SenseGeometry(d, 2));
  const ComplexVolume rho(d, {1.0, 2.0, 3.0, 4.0});
  const CoilDataset out = fold(rho, enc);
  ASSERT_EQ(out.samples().size(), 2u);
  EXPECT_EQ(out.at(0, 0, 0), cplx(4.0));
  EXPECT_EQ(out.at(0, 0, 1), cplx(6.0));
}

TEST(Fold, NoFoldingIsPointwiseProduct) {
  std::mt19937_64 rng(1);
  const Dims d{4, 4, 2};
  const auto sens = random_coils(d, 3, rng);
  const auto rho = random_volume(d, rng);
  const CoilDataset out = fold(rho, EncodingOperator(sens, SenseGeometry(d, 1)));
  for (std::size_t l = 0; l < 3; ++l)
    for (std::size_t i = 0; i < d.count(); ++i) EXPECT_EQ(out.at(l, 0, i), sens.map(l)[i] * rho[i]);
}

TEST(Fold, SingleAliasBandPassesThrough) {
  std::mt19937_64 rng(2);
  const Dims d{4, 8, 2};
  ComplexVolume rho(d);
  for (std::size_t z = 0; z < 2; ++z)
    for (std::size_t y = 0; y < 2; ++y)
      for (std::size_t x = 0; x < 4; ++x) rho(x, y, z) = random_cplx(rng);
  const CoilDataset out = fold(rho, EncodingOperator(unit_coils(d, 1), SenseGeometry(d, 4)));
  const Dims r = out.geometry().reduced_dims();
  for (std::size_t z = 0; z < 2; ++z)
    for (std::size_t y = 0; y < 2; ++y)
      for (std::size_t x = 0; x < 4; ++x) EXPECT_EQ(out.at(0, 0, r.index(x, y, z)), rho(x, y, z));
}

TEST(Fold, AdjointConsistencyInPsiInverseProduct) {
  std::mt19937_64 rng(3);
  const Dims d{4, 8, 4};
  for (std::size_t R : {1u, 2u, 4u}) {
    const EncodingOperator enc(random_coils(d, 4, rng), SenseGeometry(d, R));
    const NoiseCovariance psi(random_psi(4, rng));
    const auto rho = random_volume(d, rng);
    CoilDataset dat(enc.geometry(), 4, 1);
    for (auto& v : dat.samples()) v = random_cplx(rng);
    const CoilDataset f = fold(rho, enc);
    // <S rho, d>_{Psi^-1} = sum_r d(r)^H Psi^-1 (S rho)(r)
    const std::size_t nv = enc.geometry().reduced_dims().count();
    cplx lhs = 0.0;
    for (std::size_t v = 0; v < nv; ++v)
      for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) lhs += std::conj(dat.at(i, 0, v)) * psi.inverse()(i, j) * f.at(j, 0, v);
    const ComplexVolume adj = fold_adjoint(dat, 0, enc, psi);
    cplx rhs = 0.0;
    for (std::size_t i = 0; i < rho.size(); ++i) rhs += std::conj(adj[i]) * rho[i];
    EXPECT_LE(std::abs(lhs - rhs), 1e-9 * std::abs(lhs)) << "R=" << R;
  }
}

TEST(Sos, Examples) {
  const Dims d{1, 1, 1};
  const std::vector<ComplexVolume> two{ComplexVolume(d, {3.0}), ComplexVolume(d, {cplx(0.0, 4.0)})};
  EXPECT_DOUBLE_EQ(sos(two).data[0], 5.0);
  const std::vector<ComplexVolume> one{ComplexVolume(d, {cplx(-3.0, 4.0)})};
  EXPECT_DOUBLE_EQ(sos(one).data[0], 5.0);
  const std::vector<ComplexVolume> zero{ComplexVolume(d), ComplexVolume(d)};
  EXPECT_EQ(sos(zero).data[0], 0.0);
}

TEST(EstimateSensitivities, Examples) {
  const Dims d{2, 1, 1};
  const std::vector<ComplexVolume> one{ComplexVolume(d, {5.0, 0.01})};
  const auto s1 = estimate_sensitivities(one);
  EXPECT_DOUBLE_EQ(s1.map(0)[0].real(), 1.0);
  EXPECT_EQ(s1.map(0)[1], cplx(0.0));  // below 5% of max SOS

  const std::vector<ComplexVolume> two{ComplexVolume(d, {3.0, 3.0}), ComplexVolume(d, {4.0, 4.0})};
  const auto s2 = estimate_sensitivities(two);
  EXPECT_NEAR(s2.map(0)[0].real(), 0.6, 1e-15);
  EXPECT_NEAR(s2.map(1)[0].real(), 0.8, 1e-15);
  EXPECT_NEAR(std::norm(s2.map(0)[1]) + std::norm(s2.map(1)[1]), 1.0, 1e-15);

  const std::vector<ComplexVolume> none{ComplexVolume(d)};
  try {
    estimate_sensitivities(none);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EmptyMask);
  }
}

std::vector<std::vector<cplx>> gaussian_noise(std::size_t l, std::size_t n, double sigma, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, sigma / std::sqrt(2.0));
  std::vector<std::vector<cplx>> out(l, std::vector<cplx>(n));
  for (auto& c : out)
    for (auto& v : c) v = {g(rng), g(rng)};
  return out;
}

TEST(EstimateNoiseCov, IidUnitVariance) {
  const auto samples = gaussian_noise(4, 100000, 1.0, 9);
  const NoiseCovariance psi = estimate_noise_cov(samples);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(std::abs(psi.matrix()(i, j) - (i == j ? 1.0 : 0.0)), 0.0, 0.05);
}

TEST(EstimateNoiseCov, IdenticalChannelsRankOnePlusLoading) {
  auto samples = gaussian_noise(1, 1000, 1.0, 4);
  samples.push_back(samples[0]);
  samples.push_back(samples[0]);
  const NoiseCovariance psi = estimate_noise_cov(samples);
  const auto ev = hermitian_eigenvalues(psi.matrix());
  const double trace = psi.matrix()(0, 0).real() + psi.matrix()(1, 1).real() + psi.matrix()(2, 2).real();
  const double loading = 1e-8 * (trace / (1.0 + 1e-8)) / 3.0;
  EXPECT_NEAR(ev[0], loading, 1e-3 * loading);
  EXPECT_NEAR(ev[1], loading, 1e-3 * loading);
  EXPECT_GT(ev[2], 1.0);
}

TEST(EstimateNoiseCov, SingleCoilAndTooFew) {
  const auto samples = gaussian_noise(1, 200000, 3.0, 5);
  const NoiseCovariance psi = estimate_noise_cov(samples);
  EXPECT_NEAR(psi.matrix()(0, 0).real(), 9.0, 9.0 * 0.02);
  try {
    estimate_noise_cov(gaussian_noise(4, 39, 1.0, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::TooFewSamples);
  }
}

TEST(SenseWls, NoiselessExactInversion) {
  const Dims d{16, 16, 8};
  const auto coils = make_coils(d, 4, 3, 2);
  const auto rho = make_phantom(brain_phantom(d, 3));
  const EncodingOperator enc(SensitivitySet(coils), SenseGeometry(d, 2));
  std::mt19937_64 rng(1);
  const NoiseCovariance psi(random_psi(4, rng));
  const VolumeSeries est = sense_wls(fold(rho, enc), enc, psi);
  EXPECT_LE(nmse(est[0], rho), 1e-10);
}

TEST(SenseWls, TrivialGeometryReturnsData) {
  std::mt19937_64 rng(6);
  const Dims d{4, 4, 2};
  const EncodingOperator enc(unit_coils(d, 1), SenseGeometry(d, 1));
  CoilDataset dat(enc.geometry(), 1, 2);
  for (auto& v : dat.samples()) v = random_cplx(rng);
  const VolumeSeries est = sense_wls(dat, enc, NoiseCovariance(CMatrix::identity(1)));
  ASSERT_EQ(est.frames(), 2u);
  for (std::size_t t = 0; t < 2; ++t)
    for (std::size_t i = 0; i < d.count(); ++i) EXPECT_NEAR(std::abs(est[t][i] - dat.at(0, t, i)), 0.0, 1e-14);
}

TEST(SenseWls, RankDeficientVoxelSplitsEvenly) {
  // Identical sensitivity columns: only the aliased sum is observable and the
  // minimum-norm solution splits it equally.
  const Dims d{1, 2, 1};
  const SensitivitySet sens({ComplexVolume(d, {cplx(1.0, 1.0), cplx(1.0, 1.0)}),
                             ComplexVolume(d, {cplx(0.5, 0.0), cplx(0.5, 0.0)})});
  const EncodingOperator enc(sens, SenseGeometry(d, 2));
  const ComplexVolume rho(d, {cplx(3.0, 1.0), cplx(-1.0, 2.0)});
  const VolumeSeries est = sense_wls(fold(rho, enc), enc, NoiseCovariance(CMatrix::identity(2)));
  const cplx half = 0.5 * (rho[0] + rho[1]);
  EXPECT_NEAR(std::abs(est[0][0] - half), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(est[0][1] - half), 0.0, 1e-12);
}

TEST(SenseWls, GradientVanishesAtSolution) {
  std::mt19937_64 rng(8);
  const Dims d{8, 8, 4};
  const EncodingOperator enc(random_coils(d, 5, rng), SenseGeometry(d, 2));
  const NoiseCovariance psi(random_psi(5, rng));
  CoilDataset dat(enc.geometry(), 5, 1);
  for (auto& v : dat.samples()) v = random_cplx(rng);
  const ComplexVolume est = sense_wls(dat, enc, psi)[0];
  CoilDataset resid = fold(est, enc);
  for (std::size_t i = 0; i < resid.samples().size(); ++i) resid.samples()[i] -= dat.samples()[i];
  const ComplexVolume grad = fold_adjoint(resid, 0, enc, psi);
  const ComplexVolume scale = fold_adjoint(dat, 0, enc, psi);
  EXPECT_LE(std::sqrt(grad.squared_norm() / scale.squared_norm()), 1e-8);
}

TEST(SenseSystem, ResidualMatchesDirectCriterion) {
  std::mt19937_64 rng(12);
  const Dims d{8, 8, 4};
  const EncodingOperator enc(random_coils(d, 4, rng), SenseGeometry(d, 2));
  const NoiseCovariance psi(random_psi(4, rng));
  CoilDataset dat(enc.geometry(), 4, 1);
  for (auto& v : dat.samples()) v = random_cplx(rng);
  const auto rho = random_volume(d, rng);
  // Direct: sum_r (d - S rho)^H Psi^-1 (d - S rho).
  const CoilDataset f = fold(rho, enc);
  double direct = 0.0;
  const std::size_t nv = enc.geometry().reduced_dims().count();
  for (std::size_t v = 0; v < nv; ++v) {
    std::vector<cplx> r(4);
    for (std::size_t l = 0; l < 4; ++l) r[l] = dat.at(l, 0, v) - f.at(l, 0, v);
    const auto pr = psi.inverse() * std::span<const cplx>(r);
    for (std::size_t l = 0; l < 4; ++l) direct += (std::conj(r[l]) * pr[l]).real();
  }
  EXPECT_NEAR(wls_criterion(rho, dat, 0, enc, psi), direct, 1e-10 * direct);
}

}  // namespace
}  // namespace uwr
