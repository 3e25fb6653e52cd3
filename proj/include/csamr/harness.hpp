#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "csamr/estimate.hpp"
#include "csamr/features.hpp"
#include "csamr/recon.hpp"
#include "csamr/sensing.hpp"
#include "csamr/svm.hpp"
#include "csamr/types.hpp"

namespace csamr::harness {

enum class SamplingMode { Nyquist, SubNyquist };

std::string to_string(SamplingMode m);
SamplingMode sampling_mode_from_string(const std::string& name);

struct ExperimentConfig {
  std::vector<Modulation> classes{kAllModulations.begin(),
                                  kAllModulations.end()};
  std::vector<double> snr_grid_db{0, 5, 10, 15, 20};
  double beta = 0.3;
  int n_symbols = 256;
  double fc_hz = 500.0;
  double rs_hz = 800.0;
  double fs_hz = 6400.0;
  double alpha = 0.5;
  int trials_per_point = 50;
  int feature_m = 20;
  sensing::Kind sensing_kind = sensing::Kind::RowSelection;
  SamplingMode mode = SamplingMode::SubNyquist;
  bool paired_modes = false;  // run both modes for the gap comparison
  std::vector<double> train_snr_db{5, 10, 15, 20};
  int train_trials = 100;
  int smoothing_l = 5;
  bool smooth_features = true;
  double svm_c = 10.0;
  double sigma_scale = 1.0;  // sigma = scale * median pairwise distance
  double eta = 0.1;
  recon::SolverConfig solver{.mode = recon::ConstraintMode::Equality,
                             .max_iter = 400,
                             .tol = 1e-4};
  std::uint64_t base_seed = 1;
  /// Strict accounting counts failed reconstructions as misclassifications;
  /// otherwise they are excluded from the rate and only tallied.
  bool strict_failures = true;
  /// Compute-saving mode: only the orders needed for the candidate set are
  /// reconstructed, the rest enter the features as zero blocks.
  bool hierarchical = false;

  SignalParams signal_params(double snr_db, std::uint64_t seed) const;

  /// 256 symbols, L = 2048: a 5-class sweep runs in minutes.
  static ExperimentConfig desk_profile();
  /// 1024 symbols, L = 8192: the full-scale configuration.
  static ExperimentConfig paper_profile();

  std::string to_json_string() const;
  static ExperimentConfig from_json_string(const std::string& text);
};

struct TrialResult {
  Modulation truth;
  Modulation predicted;
  bool solver_ok = true;
  std::optional<double> fc_err_hz;  // |fc_hat - fc|, when estimable
  std::optional<double> rs_err_hz;
};

struct CellStat {
  Modulation cls;
  double snr_db = 0.0;
  SamplingMode mode = SamplingMode::SubNyquist;
  int n = 0;
  int correct = 0;
  int failed = 0;  // solver failures
  double fc_abs_err_sum = 0.0;
  int fc_count = 0;
  double rs_abs_err_sum = 0.0;
  int rs_count = 0;

  double r_alpha() const { return n ? double(correct) / n : 0.0; }
  double fc_mae() const { return fc_count ? fc_abs_err_sum / fc_count : -1.0; }
  double rs_mae() const { return rs_count ? rs_abs_err_sum / rs_count : -1.0; }
};

struct SweepResult {
  std::vector<CellStat> cells;  // mode-major, then class, then snr
  std::string results_csv() const;
  const CellStat* find(Modulation cls, double snr_db, SamplingMode mode) const;
  /// Smallest grid SNR whose rate reaches the level, scanning ascending.
  std::optional<double> crossing_snr(Modulation cls, SamplingMode mode,
                                     double level) const;
};

/// Shared per-sweep state: the sensing model, the per-mode SVM models and
/// the training features they were fit on.
struct Pipeline {
  ExperimentConfig config;
  sensing::MeasurementModel model;
  std::optional<svm::SvmModel> svm_subnyquist;
  std::optional<svm::SvmModel> svm_nyquist;
  std::vector<features::FeatureVector> train_subnyquist;
  std::vector<features::FeatureVector> train_nyquist;

  const svm::SvmModel& svm_for(SamplingMode mode) const;
};

/// Builds the sensing model and trains the per-mode classifiers on features
/// generated at the config's training SNRs. Deterministic.
Pipeline prepare(const ExperimentConfig& config);

/// Feature map for one record: reconstructed spectra (sub-Nyquist) or
/// full-rate FFT spectra (Nyquist), optionally smoothed; orders outside
/// `orders` are zero blocks.
std::map<int, SpectrumEstimate> order_spectra(
    const ExperimentConfig& config, const sensing::MeasurementModel& model,
    const BasebandRecord& record, SamplingMode mode,
    const std::set<int>& orders, bool* solver_ok = nullptr);

/// synth -> AWGN -> NPT -> measure/FFT -> reconstruct -> features ->
/// predict -> estimate. Deterministic per (base seed, class, snr, trial).
TrialResult run_trial(const Pipeline& pipeline, SamplingMode mode,
                      Modulation cls, double snr_db, int trial_index);

/// Labeled features over (class, snr, trial) for training or datasets;
/// purpose_tag separates the seed stream from evaluation trials.
std::vector<features::FeatureVector> build_dataset(
    const ExperimentConfig& config, const sensing::MeasurementModel& model,
    SamplingMode mode, const std::vector<double>& snrs, int trials_per_point,
    std::uint64_t purpose_tag);

/// Full grid run; trials are independent OpenMP work units with
/// schedule-invariant seeding, aggregation is single-threaded.
SweepResult run_sweep(const Pipeline& pipeline);

/// results.csv, dataset.csv, model.json (+ model_nyquist.json when paired)
/// and run_manifest.json under out_dir.
void write_sweep_outputs(const std::filesystem::path& out_dir,
                         const Pipeline& pipeline, const SweepResult& result);

/// Classifies one record with a prepared pipeline (CLI support).
struct ClassifyOutcome {
  svm::Prediction prediction;
  std::optional<estimate::ParamEstimate> estimate;
  bool solver_ok = true;
};
ClassifyOutcome classify_record(const Pipeline& pipeline,
                                const BasebandRecord& record,
                                SamplingMode mode);

/// Spearman rank correlation with average ranks for ties.
double spearman(const std::vector<double>& a, const std::vector<double>& b);

/// r_p of the line at 2*fc + rs for an order-2 BPSK oracle spectrum, per
/// roll-off value (full-rate study).
std::vector<double> rolloff_energy_ratios(const std::vector<double>& alphas,
                                          int n_symbols, double fc_hz,
                                          double rs_hz, double fs_hz,
                                          std::uint64_t seed);

}  // namespace csamr::harness
