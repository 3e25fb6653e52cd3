#include "csamr/harness.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "csamr/io.hpp"
#include "csamr/npt.hpp"
#include "csamr/rng.hpp"
#include "csamr/siggen.hpp"

namespace csamr::harness {

using nlohmann::json;

namespace {

// Seed-path tags; trial streams are derived as
// mix(base, {tag, class, snr_key, trial}) so they are independent of the
// scheduling order.
constexpr std::uint64_t kTagModel = 100;
constexpr std::uint64_t kTagEval = 1;
constexpr std::uint64_t kTagTrain = 2;
constexpr std::uint64_t kTagNoise = 7;

std::uint64_t snr_key(double snr_db) {
  return static_cast<std::uint64_t>(
      static_cast<std::int64_t>(std::llround(snr_db * 1000.0)));
}

std::size_t class_index(const std::vector<Modulation>& classes,
                        Modulation m) {
  for (std::size_t i = 0; i < classes.size(); ++i) {
    if (classes[i] == m) return i;
  }
  throw std::invalid_argument("class not in experiment: " + to_string(m));
}

SpectrumEstimate zero_spectrum(std::size_t length, int order, double fs_hz) {
  SpectrumEstimate s;
  s.coeffs.assign(length, cplx{});
  s.order = order;
  s.fs_hz = fs_hz;
  s.report.method = "skipped";
  return s;
}

}  // namespace

std::string to_string(SamplingMode m) {
  return m == SamplingMode::Nyquist ? "nyquist" : "sub-nyquist";
}

SamplingMode sampling_mode_from_string(const std::string& name) {
  if (name == "nyquist") return SamplingMode::Nyquist;
  if (name == "sub-nyquist") return SamplingMode::SubNyquist;
  throw std::invalid_argument("unknown sampling mode: " + name);
}

SignalParams ExperimentConfig::signal_params(double snr_db,
                                             std::uint64_t seed) const {
  SignalParams p;
  p.fc_hz = fc_hz;
  p.rs_hz = rs_hz;
  p.fs_hz = fs_hz;
  p.alpha = alpha;
  p.n_symbols = n_symbols;
  p.amplitude = 1.0;
  p.snr_db = snr_db;
  p.seed = seed;
  return p;
}

ExperimentConfig ExperimentConfig::desk_profile() {
  ExperimentConfig c;
  c.n_symbols = 256;  // L = 2048 at 8 samples/symbol
  return c;
}

ExperimentConfig ExperimentConfig::paper_profile() {
  ExperimentConfig c;
  c.n_symbols = 1024;  // L = 8192
  return c;
}

std::string ExperimentConfig::to_json_string() const {
  json j;
  j["classes"] = json::array();
  for (Modulation m : classes) j["classes"].push_back(csamr::to_string(m));
  j["snr_grid_db"] = snr_grid_db;
  j["beta"] = beta;
  j["n_symbols"] = n_symbols;
  j["fc_hz"] = fc_hz;
  j["rs_hz"] = rs_hz;
  j["fs_hz"] = fs_hz;
  j["alpha"] = alpha;
  j["trials_per_point"] = trials_per_point;
  j["feature_m"] = feature_m;
  j["sensing_kind"] = sensing::to_string(sensing_kind);
  j["mode"] = to_string(mode);
  j["paired_modes"] = paired_modes;
  j["train_snr_db"] = train_snr_db;
  j["train_trials"] = train_trials;
  j["smoothing_l"] = smoothing_l;
  j["smooth_features"] = smooth_features;
  j["svm_c"] = svm_c;
  j["sigma_scale"] = sigma_scale;
  j["eta"] = eta;
  j["solver"] = {
      {"mode", solver.mode == recon::ConstraintMode::Equality ? "equality"
                                                              : "residual"},
      {"epsilon", solver.epsilon},
      {"max_iter", solver.max_iter},
      {"tol", solver.tol},
      {"rho", solver.rho},
      {"adaptive_rho", solver.adaptive_rho},
      {"over_relax", solver.over_relax},
      {"smoothing_l", solver.smoothing_l},
      {"renormalize_boundary", solver.renormalize_boundary}};
  j["base_seed"] = base_seed;
  j["strict_failures"] = strict_failures;
  j["hierarchical"] = hierarchical;
  return j.dump(2);
}

ExperimentConfig ExperimentConfig::from_json_string(const std::string& text) {
  const json j = json::parse(text);
  ExperimentConfig c;
  if (j.contains("classes")) {
    c.classes.clear();
    for (const auto& name : j.at("classes")) {
      c.classes.push_back(modulation_from_string(name.get<std::string>()));
    }
  }
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
  };
  get("snr_grid_db", c.snr_grid_db);
  get("beta", c.beta);
  get("n_symbols", c.n_symbols);
  get("fc_hz", c.fc_hz);
  get("rs_hz", c.rs_hz);
  get("fs_hz", c.fs_hz);
  get("alpha", c.alpha);
  get("trials_per_point", c.trials_per_point);
  get("feature_m", c.feature_m);
  if (j.contains("sensing_kind")) {
    c.sensing_kind = sensing::kind_from_string(j.at("sensing_kind"));
  }
  if (j.contains("mode")) c.mode = sampling_mode_from_string(j.at("mode"));
  get("paired_modes", c.paired_modes);
  get("train_snr_db", c.train_snr_db);
  get("train_trials", c.train_trials);
  get("smoothing_l", c.smoothing_l);
  get("smooth_features", c.smooth_features);
  get("svm_c", c.svm_c);
  get("sigma_scale", c.sigma_scale);
  get("eta", c.eta);
  if (j.contains("solver")) {
    const json& s = j.at("solver");
    if (s.contains("mode")) {
      c.solver.mode = s.at("mode").get<std::string>() == "residual"
                          ? recon::ConstraintMode::Residual
                          : recon::ConstraintMode::Equality;
    }
    if (s.contains("epsilon")) c.solver.epsilon = s.at("epsilon");
    if (s.contains("max_iter")) c.solver.max_iter = s.at("max_iter");
    if (s.contains("tol")) c.solver.tol = s.at("tol");
    if (s.contains("rho")) c.solver.rho = s.at("rho");
    if (s.contains("adaptive_rho")) c.solver.adaptive_rho = s.at("adaptive_rho");
    if (s.contains("over_relax")) c.solver.over_relax = s.at("over_relax");
    if (s.contains("smoothing_l")) c.solver.smoothing_l = s.at("smoothing_l");
    if (s.contains("renormalize_boundary")) {
      c.solver.renormalize_boundary = s.at("renormalize_boundary");
    }
  }
  get("base_seed", c.base_seed);
  get("strict_failures", c.strict_failures);
  get("hierarchical", c.hierarchical);
  return c;
}

const svm::SvmModel& Pipeline::svm_for(SamplingMode mode) const {
  const auto& m =
      mode == SamplingMode::Nyquist ? svm_nyquist : svm_subnyquist;
  if (!m) throw std::logic_error("pipeline has no model for this mode");
  return *m;
}

std::map<int, SpectrumEstimate> order_spectra(
    const ExperimentConfig& config, const sensing::MeasurementModel& model,
    const BasebandRecord& record, SamplingMode mode,
    const std::set<int>& orders, bool* solver_ok) {
  std::map<int, SpectrumEstimate> out;
  bool ok = true;
  for (int order : {2, 4, 8}) {
    if (!orders.count(order)) {
      out.emplace(order, zero_spectrum(record.samples.size(), order,
                                       record.params.fs_hz));
      continue;
    }
    SpectrumEstimate est;
    if (mode == SamplingMode::Nyquist) {
      est = npt::nyquist_spectrum(record, order);
    } else {
      est = recon::reconstruct_order(record, order, model, config.solver);
      ok = ok && est.report.converged;
    }
    if (config.smooth_features && config.smoothing_l > 0) {
      const recon::SmoothingOperator b = recon::build_smoothing(
          est.coeffs.size(), config.smoothing_l,
          config.solver.renormalize_boundary);
      est = recon::smoothed_view(est, b);
    }
    out.emplace(order, std::move(est));
  }
  if (solver_ok) *solver_ok = ok;
  return out;
}

TrialResult run_trial(const Pipeline& pipeline, SamplingMode mode,
                      Modulation cls, double snr_db, int trial_index) {
  const ExperimentConfig& cfg = pipeline.config;
  const std::uint64_t seed =
      Rng::mix(cfg.base_seed, {kTagEval, class_index(cfg.classes, cls),
                               snr_key(snr_db),
                               static_cast<std::uint64_t>(trial_index)});
  TrialResult result;
  result.truth = cls;
  result.predicted = cls;
  try {
    BasebandRecord rec = siggen::synthesize(cls, cfg.signal_params(snr_db, seed));
    rec = siggen::add_awgn(rec, snr_db, Rng::mix(seed, {kTagNoise}));

    const std::set<int> orders = cfg.hierarchical
                                     ? svm::hierarchical_orders(cfg.classes)
                                     : std::set<int>{2, 4, 8};
    bool ok = true;
    const auto spectra =
        order_spectra(cfg, pipeline.model, rec, mode, orders, &ok);
    result.solver_ok = ok;

    const features::FeatureVector fv =
        features::extract_features(spectra, cfg.feature_m);
    result.predicted = svm::predict(pipeline.svm_for(mode), fv).cls;

    // Parameter estimation reads the true class's line pattern (the
    // estimation experiment is run per known class, like the accuracy one).
    const int est_order = estimate::preferred_order(cls);
    if (orders.count(est_order)) {
      const SpectrumEstimate& spec = spectra.at(est_order);
      const npt::PeakSet peaks = npt::detect_peaks(spec, cfg.eta);
      estimate::ParamEstimate pe;
      try {
        pe = estimate::estimate_params(peaks, cls, est_order, spec.bin_hz());
      } catch (const estimate::InsufficientPeaksError& e) {
        pe = e.partial_estimate;
      }
      if (pe.fc_hz) result.fc_err_hz = std::abs(*pe.fc_hz - cfg.fc_hz);
      if (pe.rs_hz) result.rs_err_hz = std::abs(*pe.rs_hz - cfg.rs_hz);
    }
  } catch (const std::exception&) {
    result.solver_ok = false;
  }
  return result;
}

std::vector<features::FeatureVector> build_dataset(
    const ExperimentConfig& config, const sensing::MeasurementModel& model,
    SamplingMode mode, const std::vector<double>& snrs, int trials_per_point,
    std::uint64_t purpose_tag) {
  const std::size_t total =
      config.classes.size() * snrs.size() * trials_per_point;
  std::vector<features::FeatureVector> rows(total);
  const std::set<int> orders = config.hierarchical
                                   ? svm::hierarchical_orders(config.classes)
                                   : std::set<int>{2, 4, 8};
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t idx = 0; idx < static_cast<std::ptrdiff_t>(total);
       ++idx) {
    const std::size_t per_class = snrs.size() * trials_per_point;
    const std::size_t ci = idx / per_class;
    const std::size_t si = (idx % per_class) / trials_per_point;
    const int trial = static_cast<int>(idx % trials_per_point);
    const Modulation cls = config.classes[ci];
    const double snr = snrs[si];
    const std::uint64_t seed =
        Rng::mix(config.base_seed, {purpose_tag, ci, snr_key(snr),
                                    static_cast<std::uint64_t>(trial)});
    BasebandRecord rec =
        siggen::synthesize(cls, config.signal_params(snr, seed));
    rec = siggen::add_awgn(rec, snr, Rng::mix(seed, {kTagNoise}));
    const auto spectra =
        order_spectra(config, model, rec, mode, orders, nullptr);
    features::FeatureVector fv =
        features::extract_features(spectra, config.feature_m);
    fv.label = cls;
    fv.snr_db = snr;
    rows[idx] = std::move(fv);
  }
  return rows;
}

namespace {

svm::SvmModel train_mode_model(const ExperimentConfig& config,
                               const std::vector<features::FeatureVector>& fv) {
  svm::KernelSpec kernel;
  kernel.kind = svm::KernelKind::Rbf;
  kernel.sigma = std::max(
      1e-12, config.sigma_scale * svm::median_pairwise_distance(fv));
  svm::TrainOptions opt;
  opt.c = config.svm_c;
  return svm::train(fv, kernel, opt);
}

}  // namespace

Pipeline prepare(const ExperimentConfig& config) {
  Pipeline p;
  p.config = config;
  const std::size_t L =
      static_cast<std::size_t>(config.signal_params(0.0, 0).length());
  p.model = sensing::MeasurementModel::make(
      config.sensing_kind, L, config.beta,
      Rng::mix(config.base_seed, {kTagModel}));

  const bool want_sub =
      config.paired_modes || config.mode == SamplingMode::SubNyquist;
  const bool want_nyq =
      config.paired_modes || config.mode == SamplingMode::Nyquist;
  if (want_sub) {
    p.train_subnyquist =
        build_dataset(config, p.model, SamplingMode::SubNyquist,
                      config.train_snr_db, config.train_trials, kTagTrain);
    p.svm_subnyquist = train_mode_model(config, p.train_subnyquist);
  }
  if (want_nyq) {
    p.train_nyquist =
        build_dataset(config, p.model, SamplingMode::Nyquist,
                      config.train_snr_db, config.train_trials, kTagTrain);
    p.svm_nyquist = train_mode_model(config, p.train_nyquist);
  }
  return p;
}

SweepResult run_sweep(const Pipeline& pipeline) {
  const ExperimentConfig& cfg = pipeline.config;
  std::vector<SamplingMode> modes;
  if (cfg.paired_modes) {
    modes = {SamplingMode::Nyquist, SamplingMode::SubNyquist};
  } else {
    modes = {cfg.mode};
  }

  const std::size_t per_mode =
      cfg.classes.size() * cfg.snr_grid_db.size() * cfg.trials_per_point;
  const std::size_t total = modes.size() * per_mode;
  std::vector<TrialResult> trials(total);

#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t idx = 0; idx < static_cast<std::ptrdiff_t>(total);
       ++idx) {
    const std::size_t mi = idx / per_mode;
    const std::size_t rem = idx % per_mode;
    const std::size_t per_class =
        cfg.snr_grid_db.size() * cfg.trials_per_point;
    const std::size_t ci = rem / per_class;
    const std::size_t si = (rem % per_class) / cfg.trials_per_point;
    const int trial = static_cast<int>(rem % cfg.trials_per_point);
    trials[idx] = run_trial(pipeline, modes[mi], cfg.classes[ci],
                            cfg.snr_grid_db[si], trial);
  }

  SweepResult result;
  for (std::size_t mi = 0; mi < modes.size(); ++mi) {
    for (std::size_t ci = 0; ci < cfg.classes.size(); ++ci) {
      for (std::size_t si = 0; si < cfg.snr_grid_db.size(); ++si) {
        CellStat cell;
        cell.cls = cfg.classes[ci];
        cell.snr_db = cfg.snr_grid_db[si];
        cell.mode = modes[mi];
        for (int t = 0; t < cfg.trials_per_point; ++t) {
          const std::size_t idx =
              mi * per_mode +
              ci * cfg.snr_grid_db.size() * cfg.trials_per_point +
              si * cfg.trials_per_point + t;
          const TrialResult& r = trials[idx];
          if (!r.solver_ok && !cfg.strict_failures) {
            ++cell.failed;
            continue;  // excluded from the rate in diagnostics mode
          }
          ++cell.n;
          if (!r.solver_ok) {
            ++cell.failed;  // strict: counted, never correct
          } else if (r.predicted == r.truth) {
            ++cell.correct;
          }
          if (r.fc_err_hz) {
            cell.fc_abs_err_sum += *r.fc_err_hz;
            ++cell.fc_count;
          }
          if (r.rs_err_hz) {
            cell.rs_abs_err_sum += *r.rs_err_hz;
            ++cell.rs_count;
          }
        }
        result.cells.push_back(cell);
      }
    }
  }
  return result;
}

std::string SweepResult::results_csv() const {
  std::ostringstream ss;
  ss << "class,snr_db,mode,r_alpha,n,fc_mae,rs_mae\n";
  for (const CellStat& c : cells) {
    ss << csamr::to_string(c.cls) << ',' << io::format_double(c.snr_db) << ','
       << to_string(c.mode) << ',' << io::format_double(c.r_alpha()) << ','
       << c.n << ',' << io::format_double(c.fc_mae()) << ','
       << io::format_double(c.rs_mae()) << '\n';
  }
  return ss.str();
}

const CellStat* SweepResult::find(Modulation cls, double snr_db,
                                  SamplingMode mode) const {
  for (const CellStat& c : cells) {
    if (c.cls == cls && c.mode == mode &&
        std::abs(c.snr_db - snr_db) < 1e-9) {
      return &c;
    }
  }
  return nullptr;
}

std::optional<double> SweepResult::crossing_snr(Modulation cls,
                                                SamplingMode mode,
                                                double level) const {
  std::vector<const CellStat*> row;
  for (const CellStat& c : cells) {
    if (c.cls == cls && c.mode == mode) row.push_back(&c);
  }
  std::sort(row.begin(), row.end(), [](const CellStat* a, const CellStat* b) {
    return a->snr_db < b->snr_db;
  });
  for (const CellStat* c : row) {
    if (c->r_alpha() >= level) return c->snr_db;
  }
  return std::nullopt;
}

void write_sweep_outputs(const std::filesystem::path& out_dir,
                         const Pipeline& pipeline, const SweepResult& result) {
  std::filesystem::create_directories(out_dir);
  io::write_text(out_dir / "results.csv", result.results_csv());
  const auto& train = pipeline.train_subnyquist.empty()
                          ? pipeline.train_nyquist
                          : pipeline.train_subnyquist;
  io::write_features_csv(out_dir / "dataset.csv", train);
  if (pipeline.svm_subnyquist) {
    io::write_text(out_dir / "model.json",
                   pipeline.svm_subnyquist->to_json_string());
  } else if (pipeline.svm_nyquist) {
    io::write_text(out_dir / "model.json",
                   pipeline.svm_nyquist->to_json_string());
  }
  if (pipeline.config.paired_modes && pipeline.svm_nyquist) {
    io::write_text(out_dir / "model_nyquist.json",
                   pipeline.svm_nyquist->to_json_string());
  }
  json manifest;
  manifest["config"] = json::parse(pipeline.config.to_json_string());
  manifest["sensing_model"] =
      json::parse(pipeline.model.to_json_string());
  manifest["base_seed"] = pipeline.config.base_seed;
  io::write_text(out_dir / "run_manifest.json", manifest.dump(2));
}

ClassifyOutcome classify_record(const Pipeline& pipeline,
                                const BasebandRecord& record,
                                SamplingMode mode) {
  const ExperimentConfig& cfg = pipeline.config;
  const std::set<int> orders = cfg.hierarchical
                                   ? svm::hierarchical_orders(cfg.classes)
                                   : std::set<int>{2, 4, 8};
  ClassifyOutcome out;
  bool ok = true;
  const auto spectra =
      order_spectra(cfg, pipeline.model, record, mode, orders, &ok);
  out.solver_ok = ok;
  const features::FeatureVector fv =
      features::extract_features(spectra, cfg.feature_m);
  out.prediction = svm::predict(pipeline.svm_for(mode), fv);

  const int est_order = estimate::preferred_order(out.prediction.cls);
  if (orders.count(est_order)) {
    const SpectrumEstimate& spec = spectra.at(est_order);
    const npt::PeakSet peaks = npt::detect_peaks(spec, cfg.eta);
    try {
      out.estimate = estimate::estimate_params(peaks, out.prediction.cls,
                                               est_order, spec.bin_hz());
    } catch (const estimate::InsufficientPeaksError& e) {
      out.estimate = e.partial_estimate;
    } catch (const std::exception&) {
      out.estimate = std::nullopt;
    }
  }
  return out;
}

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 2) {
    throw std::invalid_argument("spearman needs two equal-length series");
  }
  auto ranks = [](const std::vector<double>& v) {
    const std::size_t n = v.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return v[x] < v[y]; });
    std::vector<double> r(n);
    std::size_t i = 0;
    while (i < n) {
      std::size_t j = i;
      while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
      const double avg = 0.5 * (i + j) + 1.0;  // average rank for ties
      for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
      i = j + 1;
    }
    return r;
  };
  const std::vector<double> ra = ranks(a), rb = ranks(b);
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    ma += ra[i];
    mb += rb[i];
  }
  ma /= ra.size();
  mb /= rb.size();
  double num = 0, da = 0, db = 0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    num += (ra[i] - ma) * (rb[i] - mb);
    da += (ra[i] - ma) * (ra[i] - ma);
    db += (rb[i] - mb) * (rb[i] - mb);
  }
  if (da == 0 || db == 0) return 0.0;
  return num / std::sqrt(da * db);
}

std::vector<double> rolloff_energy_ratios(const std::vector<double>& alphas,
                                          int n_symbols, double fc_hz,
                                          double rs_hz, double fs_hz,
                                          std::uint64_t seed) {
  std::vector<double> out;
  out.reserve(alphas.size());
  for (double a : alphas) {
    SignalParams p;
    p.fc_hz = fc_hz;
    p.rs_hz = rs_hz;
    p.fs_hz = fs_hz;
    p.alpha = a;
    p.n_symbols = n_symbols;
    p.seed = seed;
    const BasebandRecord rec = siggen::synthesize(Modulation::Bpsk, p);
    const SpectrumEstimate spec = npt::nyquist_spectrum(rec, 2);
    out.push_back(
        features::energy_ratio(spec, 2.0 * fc_hz + rs_hz, 3).r_p);
  }
  return out;
}

}  // namespace csamr::harness
