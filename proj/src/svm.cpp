#include "csamr/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace csamr::svm {

using nlohmann::json;

std::string to_string(KernelKind k) {
  switch (k) {
    case KernelKind::Linear: return "linear";
    case KernelKind::Polynomial: return "polynomial";
    case KernelKind::Rbf: return "rbf";
  }
  throw std::logic_error("bad kernel enum");
}

KernelKind kernel_from_string(const std::string& name) {
  if (name == "linear") return KernelKind::Linear;
  if (name == "polynomial") return KernelKind::Polynomial;
  if (name == "rbf") return KernelKind::Rbf;
  throw std::invalid_argument("unknown kernel: " + name);
}

double kernel_eval(const KernelSpec& spec, std::span<const double> x,
                   std::span<const double> y) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("kernel feature length mismatch");
  }
  switch (spec.kind) {
    case KernelKind::Linear: {
      double s = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
      return s;
    }
    case KernelKind::Polynomial: {
      if (spec.degree < 1) {
        throw std::invalid_argument("polynomial degree must be >= 1");
      }
      double s = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
      return std::pow(spec.gamma * s + spec.r, spec.degree);
    }
    case KernelKind::Rbf: {
      if (!(spec.sigma > 0.0)) {
        throw std::invalid_argument("rbf sigma must be > 0");
      }
      double d2 = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - y[i];
        d2 += d * d;
      }
      return std::exp(-d2 / (2.0 * spec.sigma * spec.sigma));
    }
  }
  throw std::logic_error("bad kernel enum");
}

double BinarySvm::decision(const KernelSpec& kernel,
                           std::span<const double> x) const {
  double s = bias;
  for (std::size_t i = 0; i < sv_x.size(); ++i) {
    s += sv_coef[i] * kernel_eval(kernel, sv_x[i], x);
  }
  return s;
}

namespace {

struct SmoResult {
  std::vector<double> alpha;
  double bias = 0.0;
  int iterations = 0;
  double gap = 0.0;
};

// Sequential minimal optimization with maximal-violating-pair selection on
// the dual of the soft-margin machine. Deterministic for a fixed data order.
SmoResult smo_train(const std::vector<std::vector<double>>& x,
                    const std::vector<int>& y, const KernelSpec& kernel,
                    double c, double tol, long max_iter) {
  const std::size_t n = x.size();
  std::vector<double> k(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const double v = kernel_eval(kernel, x[i], x[j]);
      k[i * n + j] = v;
      k[j * n + i] = v;
    }
  }
  auto q = [&](std::size_t i, std::size_t j) {
    return y[i] * y[j] * k[i * n + j];
  };

  SmoResult res;
  res.alpha.assign(n, 0.0);
  std::vector<double>& a = res.alpha;
  std::vector<double> grad(n, -1.0);
  constexpr double kTau = 1e-12;

  long it = 0;
  double gap = std::numeric_limits<double>::infinity();
  while (it < max_iter) {
    ++it;
    // Working set: the maximal violating pair.
    double up_best = -std::numeric_limits<double>::infinity();
    double low_best = std::numeric_limits<double>::infinity();
    std::ptrdiff_t i = -1, j = -1;
    for (std::size_t t = 0; t < n; ++t) {
      const double v = -y[t] * grad[t];
      const bool in_up = (y[t] > 0 && a[t] < c) || (y[t] < 0 && a[t] > 0);
      const bool in_low = (y[t] > 0 && a[t] > 0) || (y[t] < 0 && a[t] < c);
      if (in_up && v > up_best) {
        up_best = v;
        i = static_cast<std::ptrdiff_t>(t);
      }
      if (in_low && v < low_best) {
        low_best = v;
        j = static_cast<std::ptrdiff_t>(t);
      }
    }
    gap = up_best - low_best;
    if (i < 0 || j < 0 || gap < tol) break;

    const std::size_t ii = static_cast<std::size_t>(i);
    const std::size_t jj = static_cast<std::size_t>(j);
    const double old_ai = a[ii], old_aj = a[jj];
    if (y[ii] != y[jj]) {
      double quad = q(ii, ii) + q(jj, jj) + 2.0 * q(ii, jj);
      if (quad <= 0.0) quad = kTau;
      const double delta = (-grad[ii] - grad[jj]) / quad;
      const double diff = a[ii] - a[jj];
      a[ii] += delta;
      a[jj] += delta;
      if (diff > 0 && a[jj] < 0) {
        a[jj] = 0;
        a[ii] = diff;
      } else if (diff <= 0 && a[ii] < 0) {
        a[ii] = 0;
        a[jj] = -diff;
      }
      if (diff > 0 && a[ii] > c) {
        a[ii] = c;
        a[jj] = c - diff;
      } else if (diff <= 0 && a[jj] > c) {
        a[jj] = c;
        a[ii] = c + diff;
      }
    } else {
      double quad = q(ii, ii) + q(jj, jj) - 2.0 * q(ii, jj);
      if (quad <= 0.0) quad = kTau;
      const double delta = (grad[ii] - grad[jj]) / quad;
      const double sum = a[ii] + a[jj];
      a[ii] -= delta;
      a[jj] += delta;
      if (sum > c && a[ii] > c) {
        a[ii] = c;
        a[jj] = sum - c;
      } else if (sum <= c && a[jj] < 0) {
        a[jj] = 0;
        a[ii] = sum;
      }
      if (sum > c && a[jj] > c) {
        a[jj] = c;
        a[ii] = sum - c;
      } else if (sum <= c && a[ii] < 0) {
        a[ii] = 0;
        a[jj] = sum;
      }
    }
    const double dai = a[ii] - old_ai;
    const double daj = a[jj] - old_aj;
    for (std::size_t t = 0; t < n; ++t) {
      grad[t] += q(t, ii) * dai + q(t, jj) * daj;
    }
  }
  res.iterations = static_cast<int>(it);
  res.gap = gap;

  // Bias from the free support vectors (midpoint of the violating-pair
  // bounds when none are free).
  double b_sum = 0.0;
  int b_count = 0;
  for (std::size_t t = 0; t < n; ++t) {
    if (a[t] > 1e-9 && a[t] < c - 1e-9) {
      b_sum += -y[t] * grad[t];
      ++b_count;
    }
  }
  if (b_count > 0) {
    res.bias = b_sum / b_count;
  } else {
    double up_best = -std::numeric_limits<double>::infinity();
    double low_best = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < n; ++t) {
      const double v = -y[t] * grad[t];
      if ((y[t] > 0 && a[t] < c) || (y[t] < 0 && a[t] > 0)) {
        up_best = std::max(up_best, v);
      }
      if ((y[t] > 0 && a[t] > 0) || (y[t] < 0 && a[t] < c)) {
        low_best = std::min(low_best, v);
      }
    }
    res.bias = 0.5 * (up_best + low_best);
  }
  return res;
}

std::vector<Modulation> present_classes(
    const std::vector<features::FeatureVector>& dataset) {
  std::vector<Modulation> classes;
  for (Modulation m : kAllModulations) {
    for (const auto& row : dataset) {
      if (row.label && *row.label == m) {
        classes.push_back(m);
        break;
      }
    }
  }
  return classes;
}

}  // namespace

SvmModel train(const std::vector<features::FeatureVector>& dataset,
               const KernelSpec& kernel, const TrainOptions& options,
               std::vector<PairDiagnostics>* diagnostics) {
  if (dataset.empty()) throw std::invalid_argument("empty training set");
  for (const auto& row : dataset) {
    if (!row.label) throw std::invalid_argument("unlabeled training row");
    if (row.values.size() != dataset.front().values.size()) {
      throw std::invalid_argument("inconsistent feature lengths");
    }
  }
  const std::vector<Modulation> classes = present_classes(dataset);
  if (classes.size() < 2) {
    throw std::invalid_argument("need at least two classes");
  }
  for (Modulation m : classes) {
    int count = 0;
    for (const auto& row : dataset) count += (*row.label == m);
    if (count < 10) {
      throw std::invalid_argument("need >= 10 examples per class (" +
                                  to_string(m) + ")");
    }
  }

  SvmModel model;
  model.kernel = kernel;
  model.classes = classes;
  model.feature_m = dataset.front().m;
  model.feature_dim = static_cast<int>(dataset.front().values.size());
  model.c = options.c;

  for (std::size_t ci = 0; ci < classes.size(); ++ci) {
    for (std::size_t cj = ci + 1; cj < classes.size(); ++cj) {
      std::vector<std::vector<double>> x;
      std::vector<int> y;
      std::vector<std::size_t> rows;
      for (std::size_t t = 0; t < dataset.size(); ++t) {
        if (*dataset[t].label == classes[ci]) {
          x.push_back(dataset[t].values);
          y.push_back(+1);
          rows.push_back(t);
        } else if (*dataset[t].label == classes[cj]) {
          x.push_back(dataset[t].values);
          y.push_back(-1);
          rows.push_back(t);
        }
      }
      bool degenerate = true;
      for (std::size_t t = 1; t < x.size() && degenerate; ++t) {
        if (x[t] != x[0]) degenerate = false;
      }

      PairDiagnostics diag;
      diag.pos = classes[ci];
      diag.neg = classes[cj];
      diag.degenerate = degenerate;
      diag.row_indices = rows;

      BinarySvm machine;
      machine.pos = classes[ci];
      machine.neg = classes[cj];
      if (degenerate) {
        diag.alpha.assign(x.size(), 0.0);
      } else {
        const SmoResult res = smo_train(x, y, kernel, options.c,
                                        options.kkt_tol, options.max_iter);
        machine.bias = res.bias;
        for (std::size_t t = 0; t < x.size(); ++t) {
          if (res.alpha[t] > 1e-12) {
            machine.sv_x.push_back(x[t]);
            machine.sv_coef.push_back(res.alpha[t] * y[t]);
          }
        }
        diag.iterations = res.iterations;
        diag.kkt_gap = res.gap;
        diag.alpha = res.alpha;
      }
      model.machines.push_back(std::move(machine));
      if (diagnostics) diagnostics->push_back(std::move(diag));
    }
  }
  return model;
}

Prediction predict(const SvmModel& model, const features::FeatureVector& x) {
  if (static_cast<int>(x.values.size()) != model.feature_dim ||
      x.m != model.feature_m) {
    throw std::invalid_argument("feature configuration does not match model");
  }
  Prediction pred;
  for (Modulation m : model.classes) {
    pred.votes[m] = 0;
    pred.margin_sum[m] = 0.0;
  }
  for (const BinarySvm& machine : model.machines) {
    const double d = machine.decision(model.kernel, x.values);
    if (d > 0) {
      pred.votes[machine.pos] += 1;
    } else {
      pred.votes[machine.neg] += 1;
    }
    pred.margin_sum[machine.pos] += d;
    pred.margin_sum[machine.neg] -= d;
  }
  Modulation best = model.classes.front();
  for (Modulation m : model.classes) {
    if (pred.votes[m] > pred.votes[best] ||
        (pred.votes[m] == pred.votes[best] &&
         pred.margin_sum[m] > pred.margin_sum[best])) {
      best = m;
    }
  }
  pred.cls = best;
  return pred;
}

double kkt_violation(const BinarySvm& machine, const KernelSpec& kernel,
                     const std::vector<std::vector<double>>& x,
                     const std::vector<int>& y,
                     const std::vector<double>& alpha, double c) {
  if (x.size() != y.size() || x.size() != alpha.size()) {
    throw std::invalid_argument("kkt_violation size mismatch");
  }
  double worst = 0.0;
  for (std::size_t t = 0; t < x.size(); ++t) {
    const double margin = y[t] * machine.decision(kernel, x[t]);
    double viol = 0.0;
    if (alpha[t] <= 1e-9) {
      viol = std::max(0.0, 1.0 - margin);
    } else if (alpha[t] >= c - 1e-9) {
      viol = std::max(0.0, margin - 1.0);
    } else {
      viol = std::abs(margin - 1.0);
    }
    worst = std::max(worst, viol);
  }
  return worst;
}

double median_pairwise_distance(
    const std::vector<features::FeatureVector>& dataset,
    std::size_t max_points) {
  if (dataset.size() < 2) {
    throw std::invalid_argument("need >= 2 rows for the median heuristic");
  }
  const std::size_t stride =
      std::max<std::size_t>(1, dataset.size() / max_points);
  std::vector<const std::vector<double>*> pts;
  for (std::size_t i = 0; i < dataset.size(); i += stride) {
    pts.push_back(&dataset[i].values);
  }
  std::vector<double> d;
  d.reserve(pts.size() * (pts.size() - 1) / 2);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      double s = 0.0;
      for (std::size_t t = 0; t < pts[i]->size(); ++t) {
        const double diff = (*pts[i])[t] - (*pts[j])[t];
        s += diff * diff;
      }
      d.push_back(std::sqrt(s));
    }
  }
  std::nth_element(d.begin(), d.begin() + d.size() / 2, d.end());
  return d[d.size() / 2];
}

std::set<int> hierarchical_orders(const std::vector<Modulation>& candidates) {
  bool has_8psk = false;
  int offset_family = 0;
  for (Modulation m : candidates) {
    if (m == Modulation::Psk8) has_8psk = true;
    if (m == Modulation::Qpsk || m == Modulation::Oqpsk ||
        m == Modulation::Msk) {
      ++offset_family;
    }
  }
  if (has_8psk) return {2, 4, 8};
  if (offset_family >= 2) return {2, 4};
  return {2};
}

double cross_validate(const std::vector<features::FeatureVector>& dataset,
                      const KernelSpec& kernel, double c, int folds) {
  if (folds < 2) throw std::invalid_argument("folds must be >= 2");
  // Stratified deterministic fold assignment: round-robin within a class.
  std::vector<int> fold_of(dataset.size(), 0);
  for (Modulation m : kAllModulations) {
    int k = 0;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
      if (dataset[i].label && *dataset[i].label == m) {
        fold_of[i] = k;
        k = (k + 1) % folds;
      }
    }
  }
  int correct = 0, total = 0;
  for (int f = 0; f < folds; ++f) {
    std::vector<features::FeatureVector> train_rows, test_rows;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
      (fold_of[i] == f ? test_rows : train_rows).push_back(dataset[i]);
    }
    TrainOptions opt;
    opt.c = c;
    const SvmModel model = train(train_rows, kernel, opt);
    for (const auto& row : test_rows) {
      const Prediction p = predict(model, row);
      correct += (row.label && p.cls == *row.label);
      ++total;
    }
  }
  return total ? static_cast<double>(correct) / total : 0.0;
}

GridSearchResult grid_search_rbf(
    const std::vector<features::FeatureVector>& dataset,
    const std::vector<double>& c_grid, const std::vector<double>& sigma_scales,
    int folds) {
  const double base = median_pairwise_distance(dataset);
  GridSearchResult best;
  best.cv_accuracy = -1.0;
  for (double c : c_grid) {
    for (double s : sigma_scales) {
      KernelSpec spec;
      spec.kind = KernelKind::Rbf;
      spec.sigma = std::max(1e-12, s * base);
      const double acc = cross_validate(dataset, spec, c, folds);
      if (acc > best.cv_accuracy) {
        best = GridSearchResult{c, spec.sigma, acc};
      }
    }
  }
  return best;
}

std::string SvmModel::to_json_string() const {
  json j;
  j["kernel"] = {{"kind", to_string(kernel.kind)},
                 {"gamma", kernel.gamma},
                 {"r", kernel.r},
                 {"degree", kernel.degree},
                 {"sigma", kernel.sigma}};
  j["classes"] = json::array();
  for (Modulation m : classes) j["classes"].push_back(to_string(m));
  j["feature_m"] = feature_m;
  j["feature_dim"] = feature_dim;
  j["c"] = c;
  j["machines"] = json::array();
  for (const BinarySvm& m : machines) {
    json jm;
    jm["pos"] = to_string(m.pos);
    jm["neg"] = to_string(m.neg);
    jm["bias"] = m.bias;
    jm["sv_coef"] = m.sv_coef;
    jm["sv_x"] = m.sv_x;
    j["machines"].push_back(std::move(jm));
  }
  return j.dump(2);
}

SvmModel SvmModel::from_json_string(const std::string& text) {
  const json j = json::parse(text);
  SvmModel model;
  const json& jk = j.at("kernel");
  model.kernel.kind = kernel_from_string(jk.at("kind").get<std::string>());
  model.kernel.gamma = jk.at("gamma").get<double>();
  model.kernel.r = jk.at("r").get<double>();
  model.kernel.degree = jk.at("degree").get<int>();
  model.kernel.sigma = jk.at("sigma").get<double>();
  for (const auto& name : j.at("classes")) {
    model.classes.push_back(modulation_from_string(name.get<std::string>()));
  }
  model.feature_m = j.at("feature_m").get<int>();
  model.feature_dim = j.at("feature_dim").get<int>();
  model.c = j.at("c").get<double>();
  for (const auto& jm : j.at("machines")) {
    BinarySvm m;
    m.pos = modulation_from_string(jm.at("pos").get<std::string>());
    m.neg = modulation_from_string(jm.at("neg").get<std::string>());
    m.bias = jm.at("bias").get<double>();
    m.sv_coef = jm.at("sv_coef").get<std::vector<double>>();
    m.sv_x = jm.at("sv_x").get<std::vector<std::vector<double>>>();
    model.machines.push_back(std::move(m));
  }
  return model;
}

}  // namespace csamr::svm
