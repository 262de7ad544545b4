#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <numbers>
#include <tuple>
#include <random>

#include "oracles.hpp"
#include "uwr/error.hpp"
#include "uwr/hyperparams.hpp"
#include "uwr/powell.hpp"
#include "uwr/special.hpp"

namespace uwr {
namespace {

using testing::brute_minimize;
using testing::sample_ggl;

TEST(Powell, Quadratic) {
  auto f = [](std::span<const double> x) {
    return (x[0] - 1.0) * (x[0] - 1.0) + 10.0 * (x[1] + 2.0) * (x[1] + 2.0) + x[0] * x[1];
  };
  // grad = 0: 2x + y = 2, x + 20y = -40
  const double ex = 80.0 / 39.0;
  const double ey = -82.0 / 39.0;
  const auto r = powell_minimize(f, {0.0, 0.0}, {{}, {}});
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.x[0], ex, 1e-5);
  EXPECT_NEAR(r.x[1], ey, 1e-5);
}

TEST(Powell, Rosenbrock) {
  auto f = [](std::span<const double> x) {
    return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2);
  };
  PowellConfig cfg;
  cfg.function_tol = 1e-14;
  cfg.max_sweeps = 2000;
  const auto r = powell_minimize(f, {-1.2, 1.0}, {{}, {}}, cfg);
  EXPECT_NEAR(r.x[0], 1.0, 1e-3);
  EXPECT_NEAR(r.x[1], 1.0, 2e-3);
}

TEST(Powell, NonSmoothAndBounded) {
  auto f = [](std::span<const double> x) { return std::abs(x[0] - 3.0); };
  const auto r = powell_minimize(f, {0.0}, {{}});
  EXPECT_NEAR(r.x[0], 3.0, 1e-6);
  const auto b = powell_minimize(f, {0.0}, {{-1.0, 2.0}});
  EXPECT_NEAR(b.x[0], 2.0, 1e-6);
  EXPECT_LE(b.x[0], 2.0);
}

TEST(LogErfcx, AgainstDirectAndAsymptotic) {
  for (double z : {-3.0, -1.0, 0.0, 0.5, 1.0, 2.0, 5.0}) {
    EXPECT_NEAR(log_erfcx(z), z * z + std::log(std::erfc(z)), 1e-12) << z;
  }
  // Large z: erfcx(z) ~ 1 / (z sqrt(pi)) sum_k (-1)^k (2k-1)!! / (2 z^2)^k.
  for (double z : {30.0, 100.0, 1e4}) {
    const double w = 1.0 / (2.0 * z * z);
    const double s = 1.0 / (z * std::sqrt(std::numbers::pi)) * (1.0 - w + 3.0 * w * w - 15.0 * w * w * w);
    EXPECT_NEAR(log_erfcx(z), std::log(s), 1e-9) << z;
  }
}

TEST(GGLLikelihood, MatchesDirectSum) {
  const auto xs = sample_ggl(500, 0.3, 1.2, 0.8, 5);
  const GGLLikelihood nll(xs);
  using P = std::tuple<double, double, double>;
  for (auto [mu, a, b] : std::array{P{0.3, 1.2, 0.8}, P{0.0, 0.5, 2.0}, P{-1.0, 3.0, 0.1}}) {
    double direct = 0.0;
    for (double x : xs) {
      const double pdf = std::sqrt(b / (2.0 * std::numbers::pi)) *
                         std::exp(-(a * std::abs(x - mu) + 0.5 * b * (x - mu) * (x - mu) + a * a / (2.0 * b))) /
                         std::erfc(a / std::sqrt(2.0 * b));
      direct -= std::log(pdf);
    }
    direct -= 0.5 * xs.size() * std::log(2.0 * std::numbers::pi);
    EXPECT_NEAR(nll(mu, a, b), direct, 1e-9 * std::abs(direct));
  }
}

// 5% relative, or 0.05 absolute for a zero-valued parameter.
void expect_recovered(double got, double want, const char* what) {
  const double tol = want == 0.0 ? 0.05 : 0.05 * std::abs(want);
  EXPECT_NEAR(got, want, tol) << what;
}

TEST(FitGGL, RecoversGeneratingParameters) {
  struct Case {
    double mu, alpha, beta;
  };
  // Balanced, pure Gaussian, pure Laplace.
  for (const Case c : {Case{0.0, 1.0, 1.0}, Case{1.5, 0.0, 2.0}, Case{-1.0, 2.0, 0.0}}) {
    const auto xs = sample_ggl(100000, c.mu, c.alpha, c.beta, 42);
    const auto fit = fit_ggl(xs);
    EXPECT_TRUE(fit.converged);
    EXPECT_FALSE(fit.degenerate);
    expect_recovered(fit.params.mu, c.mu, "mu");
    expect_recovered(fit.params.alpha, c.alpha, "alpha");
    expect_recovered(fit.params.beta, c.beta, "beta");
  }
}

TEST(FitGGL, FitIsAtLeastAsGoodAsTruth) {
  const auto xs = sample_ggl(2000, 0.5, 2.0, 1.0, 7);
  const auto fit = fit_ggl(xs);
  const GGLLikelihood nll(xs);
  EXPECT_LE(nll(fit.params.mu, fit.params.alpha, fit.params.beta), nll(0.5, 2.0, 1.0) + 1e-6);
}

TEST(FitGGL, GaussianSampleHasSmallAlpha) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> n(1.0, 2.0);
  std::vector<double> xs(50000);
  for (auto& x : xs) x = n(rng);
  const auto fit = fit_ggl(xs);
  EXPECT_NEAR(fit.params.mu, 1.0, 0.05);
  EXPECT_NEAR(fit.params.beta, 0.25, 0.0125);
  EXPECT_LT(fit.params.alpha, 0.05);
}

TEST(FitGGL, DegenerateAndTooFew) {
  const std::vector<double> same(64, 3.5);
  const auto fit = fit_ggl(same);
  EXPECT_TRUE(fit.degenerate);
  EXPECT_EQ(fit.params.mu, 3.5);
  const std::vector<double> few(31, 1.0);
  try {
    fit_ggl(few);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::TooFewSamples);
  }
}

TEST(GGKappa, HandCase) {
  const std::vector<double> e{1.0, 2.0};
  EXPECT_DOUBLE_EQ(gg_kappa_closed_form(e, 2.0), 0.2);
}

TEST(GGKappa, ClosedFormMinimizesLikelihood) {
  std::mt19937_64 rng(11);
  std::exponential_distribution<double> ex(0.7);
  std::vector<double> e(400);
  for (auto& v : e) v = ex(rng);
  for (double p : {1.0, 1.5, 2.0, 3.3, 8.0}) {
    const double k = gg_kappa_closed_form(e, p);
    const double num = std::exp(
        brute_minimize([&](double lk) { return gg_negative_log_likelihood(e, std::exp(lk), p); }, -40.0, 10.0));
    EXPECT_NEAR(k, num, 1e-6 * k) << "p=" << p;
  }
}

TEST(GGKappa, EqualMagnitudes) {
  const std::vector<double> e(10, 1.5);
  for (double p : {1.0, 2.0, 4.0}) EXPECT_NEAR(gg_kappa_closed_form(e, p), 1.0 / (p * std::pow(1.5, p)), 1e-15);
}

VolumeSeries random_walk(Dims dims, std::size_t frames, double step, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, step);
  VolumeSeries s(dims, frames);
  for (std::size_t i = 0; i < dims.count(); ++i) s[0][i] = 100.0;
  for (std::size_t t = 1; t < frames; ++t)
    for (std::size_t i = 0; i < dims.count(); ++i) s[t][i] = s[t - 1][i] + cplx(n(rng), n(rng));
  return s;
}

TEST(FitTemporal, MaskAndFlags) {
  const Dims dims{4, 4, 2};
  VolumeSeries s = random_walk(dims, 6, 1.0, 3);
  for (std::size_t t = 0; t < 6; ++t) s[t][5] = 100.0;  // constant voxel
  Mask mask(dims.count(), true);
  mask[0] = false;
  const auto fit = fit_gg_temporal(s, mask);
  EXPECT_EQ(fit.voxels[0].kappa, 0.0);
  EXPECT_EQ(fit.masked, dims.count() - 1);
  EXPECT_EQ(fit.flagged_count, 1u);
  EXPECT_TRUE(fit.flagged[5]);
  for (std::size_t i = 1; i < dims.count(); ++i) {
    EXPECT_GE(fit.voxels[i].p, 1.0);
    EXPECT_LE(fit.voxels[i].p, 8.0);
    EXPECT_GT(fit.voxels[i].kappa, 0.0);
  }
  EXPECT_GT(fit.global.kappa, 0.0);
}

TEST(FitTemporal, ProfileMaximizesLikelihood) {
  // One voxel: the fitted (kappa, p) must beat every (closed-form kappa, p) on a grid.
  const Dims dims{1, 1, 1};
  const VolumeSeries s = random_walk(dims, 40, 2.0, 8);
  const auto fit = fit_gg_temporal(s, Mask(1, true));
  std::vector<double> e;
  for (std::size_t t = 1; t < 40; ++t) e.push_back(std::abs(s[t][0] - s[t - 1][0]));
  const double best = gg_negative_log_likelihood(e, fit.voxels[0].kappa, fit.voxels[0].p);
  for (double p = 1.0; p <= 8.0; p += 0.05)
    EXPECT_LE(best, gg_negative_log_likelihood(e, gg_kappa_closed_form(e, p), p) + 1e-7) << p;
}

TEST(FitTemporal, Errors) {
  const Dims dims{2, 2, 2};
  EXPECT_THROW(fit_gg_temporal(random_walk(dims, 2, 1.0, 1), Mask(8, true)), Error);
  EXPECT_THROW(fit_gg_temporal(random_walk(dims, 4, 1.0, 1), Mask(8, false)), Error);
}

TEST(BrainMask, Threshold) {
  VolumeSeries s(Dims{4, 1, 1}, 2);
  const double v[] = {10.0, 0.5, 1.5, 0.0};
  for (std::size_t t = 0; t < 2; ++t)
    for (std::size_t i = 0; i < 4; ++i) s[t][i] = v[i];
  const Mask m = brain_mask(s, 0.1);
  EXPECT_EQ(m, (Mask{true, false, true, false}));
}

TEST(EstimateAll, SingleFrameAndJsonRoundTrip) {
  std::mt19937_64 rng(13);
  const Dims dims{16, 16, 8};
  VolumeSeries ref({testing::random_volume(dims, rng, 10.0)});
  const auto spec = WaveletSpec::symmlet8(2);
  const auto hp = estimate_all(ref, spec);
  EXPECT_FALSE(hp.temporal.has_value());
  const CoeffLayout layout(dims, 2);
  ASSERT_EQ(hp.subbands.size(), layout.subband_count());
  // 16x16x8 at level 2: the coarsest bands hold 4*4*2 = 32 samples, the boundary case.
  for (const auto& sb : hp.subbands) {
    const auto& band = layout.subbands()[layout.index_of(sb.id)];
    EXPECT_EQ(sb.samples, band.size);
    EXPECT_EQ(sb.fitted, band.size >= 32);
  }
  const auto params = hp.regularization();
  EXPECT_EQ(params.temporal.kappa, 0.0);
  const auto doc = to_json(hp);
  const auto back = regularization_from_json(nlohmann::json::parse(doc.dump()), layout);
  EXPECT_EQ(back.spatial, params.spatial);
  EXPECT_EQ(back.temporal, params.temporal);
}

TEST(EstimateAll, TemporalBlockPresentForThreeFrames) {
  const Dims dims{8, 8, 8};
  const auto s = random_walk(dims, 3, 1.0, 21);
  const auto hp = estimate_all(s, WaveletSpec::haar(1));
  ASSERT_TRUE(hp.temporal.has_value());
  EXPECT_EQ(hp.regularization().temporal, hp.temporal->global);
  EXPECT_GT(hp.mask_fraction, 0.0);
}

}  // namespace
}  // namespace uwr
