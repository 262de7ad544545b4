#pragma once

#include <array>
#include <functional>
#include <vector>

#include "uwr/prox.hpp"
#include "uwr/sense.hpp"
#include "uwr/wavelet.hpp"

namespace uwr {

// Spatial GGL parameters per subband (CoeffLayout order) plus the global
// temporal pair.
struct RegularizationParams {
  std::vector<GGLParams> spatial;
  TemporalParams temporal;

  // All-zero penalties for a layout.
  static RegularizationParams none(const CoeffLayout& layout);
};

struct IterationRecord {
  int iteration = 0;
  double criterion = 0.0;
  double relative_change = 0.0;
};

struct SolverConfig {
  double gamma = 200.0;
  std::array<double, 4> weights{0.25, 0.25, 0.25, 0.25};
  double lambda = 1.0;
  double epsilon = 1e-4;
  int max_iters = 500;
  // Checks zeta == sum_i w_i zeta_i after every iteration (test aid).
  bool verify_consensus = false;
  std::function<void(const IterationRecord&)> on_iteration;

  void validate() const;
};

struct CriterionParts {
  double data = 0.0;
  double spatial = 0.0;
  double temporal = 0.0;

  double total() const noexcept { return data + spatial + temporal; }
};

// J_ST = sum_t J_WLS(T* zeta^t) + g(zeta) + h(zeta), with whitened data and
// the encoding system cached across evaluations.
class CriterionEvaluator {
 public:
  CriterionEvaluator(const SenseSystem& system, const CoilDataset& data,
                     const RegularizationParams& params, WaveletSpec spec);

  CriterionParts evaluate(const CoeffSeries& zeta) const;
  // Same criterion when the images T* zeta^t are already available.
  CriterionParts evaluate(const CoeffSeries& zeta, const VolumeSeries& images) const;

  // sum_t ||d^t||^2_{Psi^-1}, the data term at zeta = 0.
  double data_energy() const noexcept { return data_energy_; }

 private:
  const SenseSystem* system_;
  RegularizationParams params_;
  WaveletSpec spec_;
  std::vector<std::vector<cplx>> whitened_;
  double data_energy_ = 0.0;
};

CriterionParts eval_criterion(const CoeffSeries& zeta, const CoilDataset& d,
                              const EncodingOperator& enc, const NoiseCovariance& psi,
                              const RegularizationParams& params, const WaveletSpec& spec);

struct SolveResult {
  VolumeSeries images;
  CoeffSeries coefficients;
  std::vector<IterationRecord> history;
  double initial_criterion = 0.0;
  double final_criterion = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Parallel proximal algorithm over four terms: data fidelity, spatial GGL,
// and the even/odd halves of the temporal penalty. All four auxiliary
// sequences start at T(init). Stops when
// |J(n) - J(n-1)| <= epsilon J(n-1) (+ a round-off floor of 1e-14 times the
// data energy) or after max_iters. Throws Diverged on a non-finite criterion.
SolveResult solve_4d(const CoilDataset& d, const EncodingOperator& enc, const NoiseCovariance& psi,
                     const RegularizationParams& params, const SolverConfig& config,
                     const VolumeSeries& init, const WaveletSpec& spec);

// Single-frame variant: solve_4d with N_r = 1 and kappa = 0.
SolveResult solve_3d(const CoilDataset& d, const EncodingOperator& enc, const NoiseCovariance& psi,
                     const std::vector<GGLParams>& spatial, const SolverConfig& config,
                     const ComplexVolume& init, const WaveletSpec& spec);

// Runs solve_3d independently on every frame of a series.
VolumeSeries solve_3d_series(const CoilDataset& d, const EncodingOperator& enc,
                             const NoiseCovariance& psi, const std::vector<GGLParams>& spatial,
                             const SolverConfig& config, const VolumeSeries& init,
                             const WaveletSpec& spec, std::vector<SolveResult>* runs = nullptr);

}  // namespace uwr
