#include "uwr/ppxa.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "uwr/error.hpp"
#include "uwr/parallel.hpp"

namespace uwr {
namespace {

void check_series(const CoeffSeries& zeta, const CoeffLayout& layout, std::size_t frames) {
  if (zeta.size() != frames) {
    throw Error(ErrorKind::ShapeMismatch, "coefficient sequence has " + std::to_string(zeta.size()) +
                                              " frames, data has " + std::to_string(frames));
  }
  for (const auto& z : zeta) {
    if (!(z.layout() == layout)) throw Error(ErrorKind::ShapeMismatch, "coefficient layout mismatch");
  }
}

double spatial_penalty(const CoeffField& zeta, const std::vector<GGLParams>& params) {
  double acc = 0.0;
  for (std::size_t b = 0; b < params.size(); ++b) {
    if (params[b].inert()) continue;
    for (const auto& v : zeta.subband(b)) acc += params[b].value(v);
  }
  return acc;
}

double temporal_penalty(const ComplexVolume& later, const ComplexVolume& earlier,
                        const TemporalParams& tp) {
  double acc = 0.0;
  if (tp.p == 2.0) {
    for (std::size_t i = 0; i < later.size(); ++i) acc += std::norm(later[i] - earlier[i]);
  } else if (tp.p == 1.0) {
    for (std::size_t i = 0; i < later.size(); ++i) acc += std::abs(later[i] - earlier[i]);
  } else {
    for (std::size_t i = 0; i < later.size(); ++i) acc += std::pow(std::abs(later[i] - earlier[i]), tp.p);
  }
  return tp.kappa * acc;
}

}  // namespace

RegularizationParams RegularizationParams::none(const CoeffLayout& layout) {
  return {std::vector<GGLParams>(layout.subband_count()), TemporalParams{0.0, 2.0}};
}

void SolverConfig::validate() const {
  if (!(gamma > 0.0)) throw Error(ErrorKind::InvalidArgument, "gamma must be positive");
  double sum = 0.0;
  for (double w : weights) {
    if (!(w > 0.0 && w < 1.0)) throw Error(ErrorKind::InvalidArgument, "weights must lie in (0,1)");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw Error(ErrorKind::InvalidArgument, "weights must sum to 1");
  if (!(lambda > 0.0 && lambda <= 2.0)) {
    throw Error(ErrorKind::InvalidArgument, "relaxation lambda must lie in (0,2]");
  }
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "epsilon must lie in (0,1)");
  }
  if (max_iters < 1) throw Error(ErrorKind::InvalidArgument, "max_iters must be >= 1");
}

CriterionEvaluator::CriterionEvaluator(const SenseSystem& system, const CoilDataset& data,
                                       const RegularizationParams& params, WaveletSpec spec)
    : system_(&system), params_(params), spec_(std::move(spec)) {
  params_.temporal.validate();
  whitened_.reserve(data.frames());
  for (std::size_t t = 0; t < data.frames(); ++t) {
    whitened_.push_back(system.whiten(data, t));
    for (const auto& v : whitened_.back()) data_energy_ += std::norm(v);
  }
}

CriterionParts CriterionEvaluator::evaluate(const CoeffSeries& zeta) const {
  if (zeta.size() != whitened_.size()) {
    throw Error(ErrorKind::ShapeMismatch, "coefficient sequence length differs from data frames");
  }
  std::vector<ComplexVolume> frames(zeta.size());
  parallel_for(zeta.size(), 1, [&](std::size_t t0, std::size_t t1) {
    for (std::size_t t = t0; t < t1; ++t) frames[t] = inverse(zeta[t], spec_);
  });
  return evaluate(zeta, VolumeSeries(std::move(frames)));
}

CriterionParts CriterionEvaluator::evaluate(const CoeffSeries& zeta, const VolumeSeries& images) const {
  const std::size_t nr = whitened_.size();
  if (zeta.size() != nr || images.frames() != nr) {
    throw Error(ErrorKind::ShapeMismatch, "coefficient sequence length differs from data frames");
  }
  if (params_.spatial.size() != zeta.front().layout().subband_count()) {
    throw Error(ErrorKind::ShapeMismatch, "spatial parameters do not cover every subband");
  }
  std::vector<double> data(nr), spatial(nr), temporal(nr, 0.0);
  const bool temporal_on = params_.temporal.kappa > 0.0 && nr > 1;
  parallel_for(nr, 1, [&](std::size_t t0, std::size_t t1) {
    for (std::size_t t = t0; t < t1; ++t) {
      data[t] = system_->residual(images[t], whitened_[t]);
      spatial[t] = spatial_penalty(zeta[t], params_.spatial);
      if (temporal_on && t > 0) temporal[t] = temporal_penalty(images[t], images[t - 1], params_.temporal);
    }
  });
  CriterionParts parts;
  for (std::size_t t = 0; t < nr; ++t) {
    parts.data += data[t];
    parts.spatial += spatial[t];
    parts.temporal += temporal[t];
  }
  return parts;
}

CriterionParts eval_criterion(const CoeffSeries& zeta, const CoilDataset& d,
                              const EncodingOperator& enc, const NoiseCovariance& psi,
                              const RegularizationParams& params, const WaveletSpec& spec) {
  if (zeta.empty()) throw Error(ErrorKind::ShapeMismatch, "empty coefficient sequence");
  check_series(zeta, zeta.front().layout(), d.frames());
  const SenseSystem system(enc, psi);
  const CriterionEvaluator eval(system, d, params, spec);
  return eval.evaluate(zeta);
}

SolveResult solve_4d(const CoilDataset& d, const EncodingOperator& enc, const NoiseCovariance& psi,
                     const RegularizationParams& params, const SolverConfig& config,
                     const VolumeSeries& init, const WaveletSpec& spec) {
  config.validate();
  params.temporal.validate();
  const std::size_t nr = d.frames();
  if (init.frames() != nr || init.dims() != enc.geometry().full_dims()) {
    throw Error(ErrorKind::ShapeMismatch, "initial series does not match the dataset");
  }
  const CoeffLayout layout(init.dims(), spec.levels);
  if (params.spatial.size() != layout.subband_count()) {
    throw Error(ErrorKind::ShapeMismatch, "spatial parameters do not cover every subband");
  }

  const auto& w = config.weights;
  const double lambda = config.lambda;
  const SenseSystem system(enc, psi);
  const DataFidelityProx data_prox(system, d, config.gamma / w[0], spec);
  const CriterionEvaluator criterion(system, d, params, spec);
  const double spatial_weight = config.gamma / w[1];
  const bool temporal_on = params.temporal.kappa > 0.0 && nr > 1;

  CoeffSeries consensus = forward(init, spec);
  std::array<CoeffSeries, 4> aux{consensus, consensus, consensus, consensus};
  std::array<CoeffSeries, 4> prox{consensus, consensus, consensus, consensus};

  SolveResult result;
  double previous = criterion.evaluate(consensus).total();
  result.initial_criterion = previous;
  if (!std::isfinite(previous)) throw Error(ErrorKind::Diverged, "initial criterion is not finite");
  const double floor = 1e-14 * criterion.data_energy();

  // Pair lists in 0-based frame indices: first term pairs (1,0),(3,2),...;
  // second term pairs (2,1),(4,3),... Unpaired frames pass through.
  std::vector<std::size_t> first_pairs, second_pairs;
  for (std::size_t t = 1; t < nr; t += 2) first_pairs.push_back(t);
  for (std::size_t t = 2; t < nr; t += 2) second_pairs.push_back(t);

  for (int n = 1; n <= config.max_iters; ++n) {
    parallel_for(nr, 1, [&](std::size_t t0, std::size_t t1) {
      for (std::size_t t = t0; t < t1; ++t) {
        prox[0][t] = data_prox.apply(aux[0][t], t);
        prox[1][t] = aux[1][t];
        prox_ggl(prox[1][t], params.spatial, spatial_weight);
        prox[2][t] = aux[2][t];
        prox[3][t] = aux[3][t];
      }
    });
    if (temporal_on) {
      for (int term = 2; term <= 3; ++term) {
        const auto& pairs = term == 2 ? first_pairs : second_pairs;
        const double weight = config.gamma / w[static_cast<std::size_t>(term)];
        parallel_for(pairs.size(), 1, [&](std::size_t k0, std::size_t k1) {
          for (std::size_t k = k0; k < k1; ++k) {
            const std::size_t t = pairs[k];
            auto [later, earlier] = prox_temporal_pair(aux[term][t], aux[term][t - 1],
                                                       params.temporal, weight, spec);
            prox[term][t] = std::move(later);
            prox[term][t - 1] = std::move(earlier);
          }
        });
      }
    }

    parallel_for(nr, 1, [&](std::size_t t0, std::size_t t1) {
      for (std::size_t t = t0; t < t1; ++t) {
        const std::size_t len = consensus[t].size();
        std::vector<cplx> avg(len, 0.0);
        for (std::size_t i = 0; i < 4; ++i) {
          auto pv = prox[i][t].values();
          for (std::size_t k = 0; k < len; ++k) avg[k] += w[i] * pv[k];
        }
        auto zv = consensus[t].values();
        for (std::size_t i = 0; i < 4; ++i) {
          auto yv = aux[i][t].values();
          auto pv = prox[i][t].values();
          for (std::size_t k = 0; k < len; ++k) yv[k] += lambda * (2.0 * avg[k] - zv[k] - pv[k]);
        }
        for (std::size_t k = 0; k < len; ++k) zv[k] += lambda * (avg[k] - zv[k]);
      }
    });

    if (config.verify_consensus) {
      for (std::size_t t = 0; t < nr; ++t) {
        const double scale = std::max(1.0, std::sqrt(consensus[t].squared_norm()));
        double err = 0.0;
        for (std::size_t k = 0; k < consensus[t].size(); ++k) {
          cplx s = 0.0;
          for (std::size_t i = 0; i < 4; ++i) s += w[i] * aux[i][t][k];
          err = std::max(err, std::abs(s - consensus[t][k]));
        }
        if (err > 1e-9 * scale) {
          throw std::logic_error("PPXA consensus invariant violated at iteration " +
                                 std::to_string(n) + " (error " + std::to_string(err) + ")");
        }
      }
    }

    const double current = criterion.evaluate(consensus).total();
    if (!std::isfinite(current)) {
      throw Error(ErrorKind::Diverged, "criterion became non-finite at iteration " + std::to_string(n));
    }
    const double change = std::abs(current - previous);
    const IterationRecord record{n, current, previous > 0.0 ? change / previous : change};
    result.history.push_back(record);
    if (config.on_iteration) config.on_iteration(record);
    result.iterations = n;
    const bool stop = change <= config.epsilon * previous + floor;
    previous = current;
    if (stop) {
      result.converged = true;
      break;
    }
  }

  result.final_criterion = previous;
  result.images = inverse(consensus, spec);
  result.coefficients = std::move(consensus);
  return result;
}

SolveResult solve_3d(const CoilDataset& d, const EncodingOperator& enc, const NoiseCovariance& psi,
                     const std::vector<GGLParams>& spatial, const SolverConfig& config,
                     const ComplexVolume& init, const WaveletSpec& spec) {
  if (d.frames() != 1) throw Error(ErrorKind::ShapeMismatch, "solve_3d expects one frame");
  const RegularizationParams params{spatial, TemporalParams{0.0, 2.0}};
  return solve_4d(d, enc, psi, params, config, VolumeSeries({init}), spec);
}

VolumeSeries solve_3d_series(const CoilDataset& d, const EncodingOperator& enc,
                             const NoiseCovariance& psi, const std::vector<GGLParams>& spatial,
                             const SolverConfig& config, const VolumeSeries& init,
                             const WaveletSpec& spec, std::vector<SolveResult>* runs) {
  if (init.frames() != d.frames()) throw Error(ErrorKind::ShapeMismatch, "init/data frame count");
  std::vector<ComplexVolume> frames;
  frames.reserve(d.frames());
  for (std::size_t t = 0; t < d.frames(); ++t) {
    SolveResult r = solve_3d(d.frame(t), enc, psi, spatial, config, init[t], spec);
    frames.push_back(r.images[0]);
    if (runs) runs->push_back(std::move(r));
  }
  return VolumeSeries(std::move(frames));
}

}  // namespace uwr
