#include "uwr/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "uwr/error.hpp"
#include "uwr/hyperparams.hpp"
#include "uwr/metrics.hpp"
#include "uwr/parallel.hpp"
#include "uwr/ppxa.hpp"
#include "uwr/pvol.hpp"
#include "uwr/sense.hpp"
#include "uwr/simulator.hpp"
#include "uwr/wavelet.hpp"

namespace uwr::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Thrown for flag combinations CLI11 cannot express; maps to exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SliceRequest {
  std::size_t z = 0;
  std::size_t t = 0;
};

std::optional<SliceRequest> parse_slice(const std::vector<std::string>& tokens) {
  if (tokens.empty()) return std::nullopt;
  SliceRequest req;
  std::vector<std::string> parts;
  for (const auto& tok : tokens) {
    std::stringstream ss(tok);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (!item.empty()) parts.push_back(item);
    }
  }
  for (const auto& p : parts) {
    const auto eq = p.find('=');
    if (eq == std::string::npos) throw UsageError("--dump-slice expects z=K t=T, got '" + p + "'");
    const std::string key = p.substr(0, eq);
    std::size_t value = 0;
    try {
      value = std::stoul(p.substr(eq + 1));
    } catch (const std::exception&) {
      throw UsageError("--dump-slice: bad number in '" + p + "'");
    }
    if (key == "z") {
      req.z = value;
    } else if (key == "t") {
      req.t = value;
    } else {
      throw UsageError("--dump-slice: unknown key '" + key + "'");
    }
  }
  return req;
}

// 8-bit binary PGM of |.| on one z slice, scaled to the slice maximum.
void dump_slice(const fs::path& path, const VolumeSeries& series, const SliceRequest& req) {
  if (req.t >= series.frames() || req.z >= series.dims().z) {
    throw UsageError("--dump-slice outside the volume");
  }
  const auto& v = series[req.t];
  const Dims d = v.dims();
  double peak = 0.0;
  for (std::size_t y = 0; y < d.y; ++y)
    for (std::size_t x = 0; x < d.x; ++x) peak = std::max(peak, std::abs(v(x, y, req.z)));
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorKind::Io, "cannot open " + path.string());
  f << "P5\n" << d.x << ' ' << d.y << "\n255\n";
  for (std::size_t y = 0; y < d.y; ++y)
    for (std::size_t x = 0; x < d.x; ++x) {
      const double s = peak > 0.0 ? std::abs(v(x, y, req.z)) / peak : 0.0;
      f.put(static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * s))));
    }
}

fs::path slice_name(const fs::path& dir, const std::string& stem, const SliceRequest& r) {
  return dir / (stem + "_z" + std::to_string(r.z) + "_t" + std::to_string(r.t) + ".pgm");
}

std::string fnv1a_hex(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

PvolType parse_dtype(const std::string& s) {
  if (s == "c64" || s == "complex64") return PvolType::Complex64;
  if (s == "c128" || s == "complex128") return PvolType::Complex128;
  throw UsageError("unknown dtype '" + s + "' (use c64 or c128)");
}

void write_with_sidecar(const fs::path& path, const Pvol& p, json sidecar) {
  write_pvol(path, p);
  sidecar["file"] = path.filename().string();
  sidecar["shape"] = {{"X", p.x}, {"Y", p.y}, {"Z", p.z}, {"T", p.t}, {"L", p.l}};
  sidecar["dtype"] = p.type == PvolType::Complex64 ? "complex64" : "complex128";
  write_json(sidecar_path(path), sidecar);
}

json log_json(const std::vector<IterationRecord>& history) {
  json out = json::array();
  for (const auto& r : history) {
    out.push_back({{"n", r.iteration}, {"J", r.criterion}, {"relative_change", r.relative_change}});
  }
  return out;
}

json number_or_inf(double v) {
  if (std::isinf(v)) return "inf";
  return v;
}

std::string format_number(double v) {
  if (std::isinf(v)) return "inf";
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

// ---------------------------------------------------------------- simulate

constexpr double kPhantomPeak = 1000.0;

struct SimulateArgs {
  std::vector<std::size_t> dims{32, 32, 16};
  std::size_t coils = 8;
  std::size_t accel = 2;
  std::size_t frames = 1;
  double noise_scale = 20.0;
  double noise_corr = 0.2;
  double drift = 0.01;
  double activation = 0.03;  // fraction of the phantom peak
  std::size_t block = 4;
  double phase = 0.4;
  std::size_t noise_samples = 4096;
  std::uint64_t seed = 1;
  std::string dtype = "c128";
  std::string out;
  std::vector<std::string> slice;
};

void add_simulate(CLI::App& app, SimulateArgs& a) {
  auto* cmd = app.add_subcommand("simulate", "Generate a synthetic phantom acquisition");
  cmd->add_option("--dims", a.dims, "Full FOV X,Y,Z")->delimiter(',')->expected(3)->capture_default_str();
  cmd->add_option("--coils", a.coils, "Number of receiver coils L")->capture_default_str();
  cmd->add_option("--accel", a.accel, "Reduction factor R (must divide Y)")->capture_default_str();
  cmd->add_option("--frames", a.frames, "Number of frames N_r")->capture_default_str();
  cmd->add_option("--noise-scale", a.noise_scale, "Per-coil noise std (phantom peak is 1000); 0 disables noise")->capture_default_str();
  cmd->add_option("--noise-corr", a.noise_corr, "Neighbouring-coil noise correlation")->capture_default_str();
  cmd->add_option("--drift", a.drift, "Linear signal drift over the run")->capture_default_str();
  cmd->add_option("--activation", a.activation, "Block activation amplitude (fraction of peak)")->capture_default_str();
  cmd->add_option("--block", a.block, "Activation block length in frames")->capture_default_str();
  cmd->add_option("--phase", a.phase, "Smooth phantom phase amplitude (rad)")->capture_default_str();
  cmd->add_option("--noise-samples", a.noise_samples, "Noise-only samples per coil")->capture_default_str();
  cmd->add_option("--seed", a.seed, "Random seed")->capture_default_str();
  cmd->add_option("--dtype", a.dtype, "PVOL sample type c64|c128")->capture_default_str();
  cmd->add_option("--out", a.out, "Output directory")->required();
  cmd->add_option("--dump-slice", a.slice, "Write a PGM of |truth|: z=K t=T")->expected(1, 2);
}

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
  if (a.dims.size() != 3 || std::find(a.dims.begin(), a.dims.end(), 0u) != a.dims.end()) {
    throw UsageError("--dims needs three positive values X,Y,Z");
  }
  if (a.coils == 0 || a.accel == 0 || a.frames == 0) throw UsageError("--coils, --accel and --frames must be positive");
  if (a.noise_scale < 0.0) throw UsageError("--noise-scale must be non-negative");
  const PvolType dtype = parse_dtype(a.dtype);
  const auto slice = parse_slice(a.slice);
  const Dims dims{a.dims[0], a.dims[1], a.dims[2]};
  const SenseGeometry geometry(dims, a.accel);  // rejects R not dividing Y

  AcquisitionSpec acq;
  acq.coils = a.coils;
  acq.reduction = a.accel;
  acq.frames = a.frames;
  acq.seed = a.seed;
  acq.noise_enabled = a.noise_scale > 0.0;
  acq.noise_cov = correlated_noise_cov(a.coils, acq.noise_enabled ? a.noise_scale : 1.0, a.noise_corr);
  acq.temporal.drift_linear = a.drift;
  acq.temporal.activation_amplitude = a.activation * kPhantomPeak;
  acq.temporal.block_length = a.block;

  PhantomSpec phantom_spec = brain_phantom(dims, a.seed, kPhantomPeak);
  phantom_spec.smooth_phase = a.phase;
  const ComplexVolume phantom = make_phantom(phantom_spec);
  const auto coil_maps = make_coils(dims, a.coils, a.seed, a.accel);
  const VolumeSeries truth = make_series(phantom, acq);
  const CoilDataset data = acquire(truth, SensitivitySet(coil_maps), acq);

  const auto coil_images = reference_scan(coil_maps);
  const SensitivitySet sens = estimate_sensitivities(coil_images);

  json cov_doc;
  if (acq.noise_enabled) {
    const auto samples = noise_scan(acq, a.noise_samples);
    cov_doc = {{"psi", to_json(estimate_noise_cov(samples).matrix())},
               {"source", "noise-only scan"},
               {"samples_per_coil", a.noise_samples}};
  } else {
    cov_doc = {{"psi", to_json(CMatrix::identity(a.coils))}, {"source", "identity (noise disabled)"}};
  }

  const fs::path dir(a.out);
  fs::create_directories(dir);
  const json provenance{
      {"dims", {dims.x, dims.y, dims.z}},
      {"reduction", a.accel},
      {"coils", a.coils},
      {"frames", a.frames},
      {"seed", a.seed},
      {"noise_scale", a.noise_scale},
      {"noise_correlation", a.noise_corr},
      {"noise_cov_true", to_json(acq.noise_cov)},
      {"temporal", {{"drift_linear", a.drift}, {"activation", a.activation}, {"block_length", a.block}}},
      {"phase_amplitude", a.phase},
  };
  auto sidecar = [&](const char* kind) {
    json j = provenance;
    j["kind"] = kind;
    return j;
  };
  write_with_sidecar(dir / "truth.pvol", to_pvol(truth, dtype), sidecar("ground_truth"));
  write_with_sidecar(dir / "coil_images.pvol", to_pvol(coil_images, dtype), sidecar("coil_images"));
  write_with_sidecar(dir / "sens.pvol", to_pvol(sens.maps(), dtype), sidecar("sensitivities"));
  write_with_sidecar(dir / "data.pvol", to_pvol(data, dtype), sidecar("acquisition"));
  write_json(dir / "cov.json", cov_doc);
  if (slice) dump_slice(slice_name(dir, "truth", *slice), truth, *slice);

  out << "wrote truth.pvol coil_images.pvol sens.pvol data.pvol cov.json to " << dir.string() << '\n';
  return kOk;
}

// ------------------------------------------------------------ shared input

struct Inputs {
  SensitivitySet sens;
  CoilDataset data;
  CMatrix psi;
};

Inputs load_inputs(const std::string& data_path, const std::string& sens_path, const std::string& cov_path) {
  if (sens_path.empty()) throw UsageError("sensitivities required (--sens)");
  if (data_path.empty()) throw UsageError("acquired data required (--data)");
  if (cov_path.empty()) throw UsageError("noise covariance required (--cov)");
  Inputs in;
  in.sens = SensitivitySet(coil_volumes_from_pvol(read_pvol(sens_path)));
  in.data = dataset_from_pvol(read_pvol(data_path), in.sens.dims());
  if (in.data.coils() != in.sens.coils()) {
    throw Error(ErrorKind::GeometryMismatch, "data and sensitivities disagree on the coil count");
  }
  const json cov = read_json(cov_path);
  if (!cov.contains("psi")) throw Error(ErrorKind::MalformedField, cov_path + " lacks \"psi\"");
  in.psi = cmatrix_from_json(cov.at("psi"));
  return in;
}

// -------------------------------------------------------------- reconstruct

struct ReconstructArgs {
  std::string method;
  std::string data, sens, cov, params, truth;
  double gamma = 200.0;
  double epsilon = 1e-4;
  int max_iters = 500;
  std::string wavelet = "symmlet8";
  int levels = 3;
  std::string dtype = "c128";
  std::string out;
  std::vector<std::string> slice;
};

void add_reconstruct(CLI::App& app, ReconstructArgs& a) {
  auto* cmd = app.add_subcommand("reconstruct", "Unfold acquired data");
  cmd->add_option("--method", a.method, "sense | uwr3d | uwr4d")
      ->required()
      ->check(CLI::IsMember({"sense", "uwr3d", "uwr4d"}));
  cmd->add_option("--data", a.data, "Acquired reduced-FOV data (PVOL)");
  cmd->add_option("--sens", a.sens, "Coil sensitivities (PVOL)");
  cmd->add_option("--cov", a.cov, "Noise covariance JSON");
  cmd->add_option("--params", a.params, "Hyperparameter JSON; estimated when absent");
  cmd->add_option("--truth", a.truth, "Ground truth PVOL, to report NMSE in the manifest");
  cmd->add_option("--gamma", a.gamma, "PPXA step size")->capture_default_str();
  cmd->add_option("--epsilon", a.epsilon, "Relative criterion change to stop")->capture_default_str();
  cmd->add_option("--max-iters", a.max_iters, "Iteration cap")->capture_default_str();
  cmd->add_option("--wavelet", a.wavelet, "haar | symmlet8")->capture_default_str();
  cmd->add_option("--levels", a.levels, "Decomposition depth")->capture_default_str();
  cmd->add_option("--dtype", a.dtype, "Output PVOL sample type c64|c128")->capture_default_str();
  cmd->add_option("--out", a.out, "Output directory")->required();
  cmd->add_option("--dump-slice", a.slice, "Write a PGM of |recon|: z=K t=T")->expected(1, 2);
}

int cmd_reconstruct(const ReconstructArgs& a, std::ostream& out) {
  const auto start = std::chrono::steady_clock::now();
  const auto slice = parse_slice(a.slice);
  const PvolType dtype = parse_dtype(a.dtype);
  const Inputs in = load_inputs(a.data, a.sens, a.cov);
  const EncodingOperator enc(in.sens, in.data.geometry());
  const NoiseCovariance psi(in.psi);
  const fs::path dir(a.out);
  fs::create_directories(dir);

  SolverConfig cfg;
  cfg.gamma = a.gamma;
  cfg.epsilon = a.epsilon;
  cfg.max_iters = a.max_iters;
  cfg.validate();

  json manifest{{"command", "reconstruct"}, {"method", a.method}};
  json config{{"method", a.method}};
  json runs = json::array();
  const VolumeSeries reference = sense_wls(in.data, enc, psi);
  VolumeSeries result;

  if (a.method == "sense") {
    result = reference;
  } else {
    WaveletSpec spec = WaveletSpec::from_name(a.wavelet, a.levels);
    json params_doc;
    if (!a.params.empty()) {
      params_doc = read_json(a.params);
      if (params_doc.contains("wavelet")) {
        spec = WaveletSpec::from_name(params_doc["wavelet"].at("family").get<std::string>(),
                                      params_doc["wavelet"].at("levels").get<int>());
      }
    } else {
      params_doc = to_json(estimate_all(reference, spec));
      write_json(dir / "params.json", params_doc);
    }
    const CoeffLayout layout(reference.dims(), spec.levels);
    RegularizationParams reg = regularization_from_json(params_doc, layout);
    config["gamma"] = cfg.gamma;
    config["weights"] = cfg.weights;
    config["lambda"] = cfg.lambda;
    config["epsilon"] = cfg.epsilon;
    config["max_iters"] = cfg.max_iters;
    config["wavelet"] = {{"family", spec.name()}, {"levels", spec.levels}};
    config["temporal"] = {{"kappa", a.method == "uwr4d" ? reg.temporal.kappa : 0.0}, {"p", reg.temporal.p}};
    config["params_source"] = a.params.empty() ? "estimated" : a.params;
    bool converged = true;
    if (a.method == "uwr3d") {
      std::vector<SolveResult> solves;
      result = solve_3d_series(in.data, enc, psi, reg.spatial, cfg, reference, spec, &solves);
      for (std::size_t t = 0; t < solves.size(); ++t) {
        runs.push_back({{"frame", t}, {"converged", solves[t].converged}, {"log", log_json(solves[t].history)}});
        converged = converged && solves[t].converged;
      }
    } else {
      const SolveResult r = solve_4d(in.data, enc, psi, reg, cfg, reference, spec);
      runs.push_back({{"frame", nullptr}, {"converged", r.converged}, {"log", log_json(r.history)}});
      converged = r.converged;
      result = r.images;
    }
    manifest["converged"] = converged;
  }

  const fs::path recon_path = dir / "recon.pvol";
  write_with_sidecar(recon_path, to_pvol(result, dtype),
                     {{"kind", "reconstruction"}, {"method", a.method}, {"reduction", in.data.geometry().reduction()}});
  if (slice) dump_slice(slice_name(dir, "recon", *slice), result, *slice);

  manifest["config"] = config;
  manifest["config_hash"] = fnv1a_hex(config.dump());
  manifest["inputs"] = {{"data", a.data}, {"sens", a.sens}, {"cov", a.cov}, {"params", a.params}, {"truth", a.truth}};
  manifest["outputs"] = {{"reconstruction", recon_path.string()}};
  manifest["runs"] = runs;
  if (!a.truth.empty()) {
    const VolumeSeries truth = series_from_pvol(read_pvol(a.truth));
    if (truth.dims() != result.dims() || truth.frames() != result.frames()) {
      throw Error(ErrorKind::ShapeMismatch, "truth does not match the reconstruction");
    }
    manifest["nmse"] = nmse(result, truth);
  }
  manifest["wall_time_s"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_json(dir / "manifest.json", manifest);
  out << "method " << a.method << ": wrote " << recon_path.string();
  if (manifest.contains("nmse")) out << " (NMSE " << format_number(manifest["nmse"].get<double>()) << ")";
  out << '\n';
  return kOk;
}

// ----------------------------------------------------------------- estimate

struct EstimateArgs {
  std::string data, sens, cov, out;
  std::string wavelet = "symmlet8";
  int levels = 3;
  double mask_threshold = 0.1;
};

void add_estimate(CLI::App& app, EstimateArgs& a) {
  auto* cmd = app.add_subcommand("estimate", "Fit regularization hyperparameters");
  cmd->add_option("--data", a.data, "Acquired reduced-FOV data (PVOL)");
  cmd->add_option("--sens", a.sens, "Coil sensitivities (PVOL)");
  cmd->add_option("--cov", a.cov, "Noise covariance JSON");
  cmd->add_option("--out", a.out, "Output JSON file")->required();
  cmd->add_option("--wavelet", a.wavelet, "haar | symmlet8")->capture_default_str();
  cmd->add_option("--levels", a.levels, "Decomposition depth")->capture_default_str();
  cmd->add_option("--mask-threshold", a.mask_threshold, "Brain mask threshold")->capture_default_str();
}

int cmd_estimate(const EstimateArgs& a, std::ostream& out) {
  const Inputs in = load_inputs(a.data, a.sens, a.cov);
  const EncodingOperator enc(in.sens, in.data.geometry());
  const NoiseCovariance psi(in.psi);
  const VolumeSeries reference = sense_wls(in.data, enc, psi);
  EstimateConfig cfg;
  cfg.mask_threshold = a.mask_threshold;
  const HyperParams hp = estimate_all(reference, WaveletSpec::from_name(a.wavelet, a.levels), cfg);
  json doc = to_json(hp);
  doc["provenance"] = {{"reference", "sense_wls"},
                       {"data", a.data},
                       {"sens", a.sens},
                       {"cov", a.cov},
                       {"frames", reference.frames()},
                       {"mask_fraction", hp.mask_fraction}};
  const fs::path path(a.out);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  write_json(path, doc);
  out << "wrote " << path.string() << " (mask fraction " << format_number(hp.mask_fraction) << ")\n";
  return kOk;
}

// ------------------------------------------------------------------ metrics

struct MetricsArgs {
  std::string estimate, truth;
  bool magnitude = false;
  bool as_json = false;
};

void add_metrics(CLI::App& app, MetricsArgs& a) {
  auto* cmd = app.add_subcommand("metrics", "Compare a reconstruction with ground truth");
  cmd->add_option("--estimate", a.estimate, "Estimated series (PVOL)")->required();
  cmd->add_option("--truth", a.truth, "Reference series (PVOL)")->required();
  cmd->add_flag("--magnitude", a.magnitude, "Compare voxel magnitudes only");
  cmd->add_flag("--json", a.as_json, "Print machine-readable JSON");
}

ComplexVolume magnitude_of(const ComplexVolume& v) {
  ComplexVolume m(v.dims());
  for (std::size_t i = 0; i < v.size(); ++i) m[i] = std::abs(v[i]);
  return m;
}

int cmd_metrics(const MetricsArgs& a, std::ostream& out) {
  VolumeSeries est = series_from_pvol(read_pvol(a.estimate));
  VolumeSeries ref = series_from_pvol(read_pvol(a.truth));
  if (est.dims() != ref.dims() || est.frames() != ref.frames()) {
    throw Error(ErrorKind::ShapeMismatch, "estimate and truth differ in shape");
  }
  if (a.magnitude) {
    std::vector<ComplexVolume> e, r;
    for (std::size_t t = 0; t < est.frames(); ++t) {
      e.push_back(magnitude_of(est[t]));
      r.push_back(magnitude_of(ref[t]));
    }
    est = VolumeSeries(std::move(e));
    ref = VolumeSeries(std::move(r));
  }
  // Pooled PSNR over the whole series.
  double peak = 0.0, err = 0.0;
  std::size_t count = 0;
  json frames = json::array();
  for (std::size_t t = 0; t < est.frames(); ++t) {
    for (std::size_t i = 0; i < est[t].size(); ++i) {
      peak = std::max(peak, std::abs(ref[t][i]));
      err += std::norm(est[t][i] - ref[t][i]);
      ++count;
    }
    frames.push_back({{"frame", t}, {"nmse", nmse(est[t], ref[t])}, {"psnr", number_or_inf(psnr(est[t], ref[t]))}});
  }
  const double total_nmse = nmse(est, ref);
  const double mse = err / static_cast<double>(count);
  const double total_psnr =
      mse == 0.0 ? std::numeric_limits<double>::infinity() : 10.0 * std::log10(peak * peak / mse);

  if (a.as_json) {
    const json doc{{"nmse", total_nmse},
                   {"psnr", number_or_inf(total_psnr)},
                   {"magnitude", a.magnitude},
                   {"frames", frames}};
    out << doc.dump(2) << '\n';
    return kOk;
  }
  out << "NMSE " << format_number(total_nmse) << '\n';
  out << "PSNR " << format_number(total_psnr) << '\n';
  out << "frame  nmse  psnr\n";
  for (const auto& f : frames) {
    const double p = f["psnr"].is_string() ? std::numeric_limits<double>::infinity() : f["psnr"].get<double>();
    out << f["frame"].get<std::size_t>() << "  " << format_number(f["nmse"].get<double>()) << "  "
        << format_number(p) << '\n';
  }
  return kOk;
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Diverged:
      return kSolver;
    case ErrorKind::InvalidArgument:
      return kUsage;
    default:
      return kData;
  }
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"uwrsense: wavelet-regularized SENSE reconstruction toolkit", "uwrsense"};
  app.require_subcommand(1);
  unsigned threads = 1;
  app.add_option("--threads", threads, "Worker threads (0 = all cores)")->capture_default_str();

  SimulateArgs sim;
  ReconstructArgs rec;
  EstimateArgs est;
  MetricsArgs met;
  add_simulate(app, sim);
  add_reconstruct(app, rec);
  add_estimate(app, est);
  add_metrics(app, met);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    set_num_threads(threads);
    if (app.got_subcommand("simulate")) return cmd_simulate(sim, out);
    if (app.got_subcommand("reconstruct")) return cmd_reconstruct(rec, out);
    if (app.got_subcommand("estimate")) return cmd_estimate(est, out);
    if (app.got_subcommand("metrics")) return cmd_metrics(met, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::logic_error& e) {
    err << "internal error: " << e.what() << '\n';
    return kSolver;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kData;
  }
  return kUsage;
}

}  // namespace uwr::cli
