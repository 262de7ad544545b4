#include "uwr/metrics.hpp"

#include <cmath>
#include <limits>

#include "uwr/error.hpp"

namespace uwr {
namespace {

void check_dims(const ComplexVolume& a, const ComplexVolume& b) {
  if (a.dims() != b.dims()) throw Error(ErrorKind::ShapeMismatch, "metric inputs differ in dims");
}

template <class Map>
double nmse_with(const ComplexVolume& est, const ComplexVolume& ref, Map map) {
  check_dims(est, ref);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    num += std::norm(map(est[i]) - map(ref[i]));
    den += std::norm(map(ref[i]));
  }
  if (den == 0.0) throw Error(ErrorKind::ZeroReference, "reference volume is identically zero");
  return num / den;
}

template <class Map>
double psnr_with(const ComplexVolume& est, const ComplexVolume& ref, Map map) {
  check_dims(est, ref);
  double mse = 0.0;
  double peak = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    mse += std::norm(map(est[i]) - map(ref[i]));
    peak = std::max(peak, std::norm(map(ref[i])));
  }
  mse /= static_cast<double>(ref.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak / mse);
}

const auto identity = [](const cplx& v) { return v; };
const auto modulus = [](const cplx& v) { return cplx(std::abs(v), 0.0); };

}  // namespace

double nmse(const ComplexVolume& estimate, const ComplexVolume& reference) {
  return nmse_with(estimate, reference, identity);
}

double nmse(const VolumeSeries& estimate, const VolumeSeries& reference) {
  if (estimate.frames() != reference.frames()) {
    throw Error(ErrorKind::ShapeMismatch, "series differ in frame count");
  }
  double num = 0.0;
  double den = 0.0;
  for (std::size_t t = 0; t < reference.frames(); ++t) {
    check_dims(estimate[t], reference[t]);
    for (std::size_t i = 0; i < reference[t].size(); ++i) {
      num += std::norm(estimate[t][i] - reference[t][i]);
      den += std::norm(reference[t][i]);
    }
  }
  if (den == 0.0) throw Error(ErrorKind::ZeroReference, "reference series is identically zero");
  return num / den;
}

double nmse_magnitude(const ComplexVolume& estimate, const ComplexVolume& reference) {
  return nmse_with(estimate, reference, modulus);
}

double psnr(const ComplexVolume& estimate, const ComplexVolume& reference) {
  return psnr_with(estimate, reference, identity);
}

double psnr_magnitude(const ComplexVolume& estimate, const ComplexVolume& reference) {
  return psnr_with(estimate, reference, modulus);
}

}  // namespace uwr
