#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "csamr/features.hpp"
#include "csamr/types.hpp"

namespace csamr::svm {

enum class KernelKind { Linear, Polynomial, Rbf };

std::string to_string(KernelKind k);
KernelKind kernel_from_string(const std::string& name);

struct KernelSpec {
  KernelKind kind = KernelKind::Rbf;
  double gamma = 1.0;  // polynomial scale
  double r = 0.0;      // polynomial offset
  int degree = 2;      // polynomial degree, >= 1
  double sigma = 1.0;  // RBF width, > 0: exp(-||x-y||^2 / (2 sigma^2))
};

/// Kernel value for equal-length vectors; throws on length mismatch.
double kernel_eval(const KernelSpec& spec, std::span<const double> x,
                   std::span<const double> y);

/// One soft-margin binary machine of the one-against-one ensemble.
/// decision(x) > 0 votes for pos.
struct BinarySvm {
  Modulation pos = Modulation::Bpsk;
  Modulation neg = Modulation::Bpsk;
  std::vector<std::vector<double>> sv_x;
  std::vector<double> sv_coef;  // alpha_i * y_i
  double bias = 0.0;

  double decision(const KernelSpec& kernel, std::span<const double> x) const;
};

struct SvmModel {
  KernelSpec kernel;
  std::vector<Modulation> classes;
  std::vector<BinarySvm> machines;  // all (i, j) pairs with i < j
  int feature_m = 0;
  int feature_dim = 0;
  double c = 10.0;

  std::string to_json_string() const;
  static SvmModel from_json_string(const std::string& text);
};

struct TrainOptions {
  double c = 10.0;
  double kkt_tol = 1e-3;
  long max_iter = 2'000'000;
};

struct PairDiagnostics {
  Modulation pos, neg;
  int iterations = 0;
  double kkt_gap = 0.0;  // maximal-violating-pair gap at exit
  bool degenerate = false;
  std::vector<double> alpha;            // dual variables, dataset order
  std::vector<std::size_t> row_indices; // rows of the pair in the dataset
};

/// Trains the C(C-1)/2 pairwise machines by sequential minimal optimization
/// (maximal-violating-pair working set) to the KKT tolerance; deterministic
/// given dataset order. Requires >= 2 classes and >= 10 examples per class.
/// A degenerate pair (identical features across both classes) is flagged in
/// the diagnostics, the model is still returned.
SvmModel train(const std::vector<features::FeatureVector>& dataset,
               const KernelSpec& kernel, const TrainOptions& options = {},
               std::vector<PairDiagnostics>* diagnostics = nullptr);

struct Prediction {
  Modulation cls = Modulation::Bpsk;
  std::map<Modulation, int> votes;          // sums to C(C-1)/2
  std::map<Modulation, double> margin_sum;  // tie break
};

/// Majority vote over pairwise machines; ties broken by summed pairwise
/// decision margins. Throws when the feature configuration does not match
/// the model.
Prediction predict(const SvmModel& model, const features::FeatureVector& x);

/// Maximum KKT violation of one trained machine on its training points.
double kkt_violation(const BinarySvm& machine, const KernelSpec& kernel,
                     const std::vector<std::vector<double>>& x,
                     const std::vector<int>& y,
                     const std::vector<double>& alpha, double c);

/// Median pairwise feature distance (RBF sigma heuristic); subsampled
/// deterministically when the dataset is large.
double median_pairwise_distance(
    const std::vector<features::FeatureVector>& dataset,
    std::size_t max_points = 512);

/// Nonlinearity orders needed to separate the candidate classes:
///   {2}      — a lone candidate set such as BPSK-vs-rest
///   {2,4}    — two or more of QPSK/OQPSK/MSK in play
///   {2,4,8}  — whenever 8PSK is a candidate
std::set<int> hierarchical_orders(const std::vector<Modulation>& candidates);

struct GridSearchResult {
  double c = 0.0;
  double sigma = 0.0;
  double cv_accuracy = 0.0;
};

/// Small C/sigma grid search by k-fold cross validation with an RBF kernel;
/// sigma candidates are multiples of the median heuristic.
GridSearchResult grid_search_rbf(
    const std::vector<features::FeatureVector>& dataset,
    const std::vector<double>& c_grid = {1.0, 10.0, 100.0},
    const std::vector<double>& sigma_scales = {0.5, 1.0, 2.0}, int folds = 5);

/// k-fold cross-validated accuracy of a kernel/C choice on the dataset.
double cross_validate(const std::vector<features::FeatureVector>& dataset,
                      const KernelSpec& kernel, double c, int folds);

}  // namespace csamr::svm
