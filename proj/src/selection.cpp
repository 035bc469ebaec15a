#include "ndpoly/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ndpoly/errors.hpp"

namespace ndpoly {

std::string to_string(SelectionMethod method) {
  switch (method) {
    case SelectionMethod::SelectKBest: return "select_k_best";
    case SelectionMethod::Rfe: return "rfe";
    case SelectionMethod::L1Svm: return "l1_svm";
  }
  throw ValidationError("to_string: unknown SelectionMethod");
}

SelectionMethod selection_method_from_string(const std::string& name) {
  if (name == "select_k_best") return SelectionMethod::SelectKBest;
  if (name == "rfe") return SelectionMethod::Rfe;
  if (name == "l1_svm") return SelectionMethod::L1Svm;
  throw ValidationError("unknown selection method '" + name + "'");
}

double anova_f(const Eigen::Ref<const Vector>& column,
               const Eigen::Ref<const Labels>& labels) {
  if (column.size() != labels.size()) {
    throw DimensionError("anova_f: column and label lengths differ");
  }
  const Index n = column.size();
  Index n_pos = 0;
  Index n_neg = 0;
  double sum_pos = 0.0;
  double sum_neg = 0.0;
  for (Index i = 0; i < n; ++i) {
    if (labels[i] == 1) {
      sum_pos += column[i];
      ++n_pos;
    } else if (labels[i] == -1) {
      sum_neg += column[i];
      ++n_neg;
    } else {
      throw ValidationError("anova_f: labels must be +1/-1");
    }
  }
  if (n_pos < 2 || n_neg < 2) {
    throw ValidationError("anova_f: each class needs at least 2 samples");
  }
  const double mean_pos = sum_pos / static_cast<double>(n_pos);
  const double mean_neg = sum_neg / static_cast<double>(n_neg);
  const double mean = (sum_pos + sum_neg) / static_cast<double>(n);
  const double between =
      static_cast<double>(n_pos) * (mean_pos - mean) * (mean_pos - mean) +
      static_cast<double>(n_neg) * (mean_neg - mean) * (mean_neg - mean);
  double within = 0.0;
  for (Index i = 0; i < n; ++i) {
    const double center = labels[i] == 1 ? mean_pos : mean_neg;
    within += (column[i] - center) * (column[i] - center);
  }
  if (between == 0.0) return 0.0;
  if (within == 0.0) return std::numeric_limits<double>::infinity();
  return between / (within / static_cast<double>(n - 2));
}

Vector anova_f_all(const Eigen::Ref<const Matrix>& features,
                   const Eigen::Ref<const Labels>& labels) {
  if (!features.allFinite()) {
    throw ValidationError("anova_f_all: non-finite feature values");
  }
  Vector scores(features.cols());
  for (Index j = 0; j < features.cols(); ++j) {
    scores[j] = anova_f(features.col(j), labels);
  }
  return scores;
}

SelectionResult select_k_best(const Eigen::Ref<const Matrix>& features,
                              const Eigen::Ref<const Labels>& labels, Index k) {
  const Index d = features.cols();
  if (k < 1 || k > d) {
    throw ValidationError("select_k_best: k must lie in [1, " + std::to_string(d) + "]");
  }
  const Vector f = anova_f_all(features, labels);
  std::vector<Index> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return f[a] > f[b]; });
  order.resize(static_cast<std::size_t>(k));

  SelectionResult result;
  result.method = SelectionMethod::SelectKBest;
  result.indices = std::move(order);
  result.scores.reserve(static_cast<std::size_t>(k));
  for (const Index idx : result.indices) result.scores.push_back(f[idx]);
  return result;
}

SelectionResult rfe(const Eigen::Ref<const Matrix>& features,
                    const Eigen::Ref<const Labels>& labels, Index k, Index step,
                    const SvmOptions& svm, std::vector<Index>* size_trace) {
  const Index d = features.cols();
  if (k < 1 || k > d) {
    throw ValidationError("rfe: k must lie in [1, " + std::to_string(d) + "]");
  }
  if (step < 1) {
    throw ValidationError("rfe: step must be >= 1");
  }

  std::vector<Index> survivors(static_cast<std::size_t>(d));
  std::iota(survivors.begin(), survivors.end(), Index{0});
  SvmOptions options = svm;
  options.regularization = Regularization::L2;

  std::vector<Index> trained_set;
  Vector trained_weights;
  int iteration = 0;
  while (static_cast<Index>(survivors.size()) > k) {
    if (size_trace) size_trace->push_back(static_cast<Index>(survivors.size()));
    ++iteration;

    Matrix sub(features.rows(), static_cast<Index>(survivors.size()));
    for (std::size_t j = 0; j < survivors.size(); ++j) {
      sub.col(static_cast<Index>(j)) = features.col(survivors[j]);
    }
    LinearModel model;
    try {
      const Standardization standardization = fit_standardization(sub);
      model = train_linear_svm(standardization.apply(sub), labels, options);
    } catch (const ConvergenceError& e) {
      throw ConvergenceError("rfe iteration " + std::to_string(iteration) + " (" +
                             std::to_string(survivors.size()) + " features): " + e.what());
    } catch (const ValidationError& e) {
      throw ValidationError("rfe iteration " + std::to_string(iteration) + " (" +
                            std::to_string(survivors.size()) + " features): " + e.what());
    }
    trained_set = survivors;
    trained_weights = model.weights;

    const Index drop = std::min<Index>(step, static_cast<Index>(survivors.size()) - k);
    std::vector<std::size_t> positions(survivors.size());
    std::iota(positions.begin(), positions.end(), std::size_t{0});
    std::sort(positions.begin(), positions.end(), [&](std::size_t a, std::size_t b) {
      const double wa = std::abs(model.weights[static_cast<Index>(a)]);
      const double wb = std::abs(model.weights[static_cast<Index>(b)]);
      if (wa != wb) return wa < wb;
      return a > b;  // equal importance: the larger index goes first
    });
    positions.resize(static_cast<std::size_t>(drop));
    std::sort(positions.begin(), positions.end(), std::greater<>());
    for (const std::size_t p : positions) {
      survivors.erase(survivors.begin() + static_cast<std::ptrdiff_t>(p));
    }
  }
  if (size_trace) size_trace->push_back(static_cast<Index>(survivors.size()));

  SelectionResult result;
  result.method = SelectionMethod::Rfe;
  result.indices = survivors;
  if (!trained_set.empty()) {
    result.scores.reserve(survivors.size());
    for (const Index idx : survivors) {
      const auto it = std::find(trained_set.begin(), trained_set.end(), idx);
      result.scores.push_back(
          std::abs(trained_weights[static_cast<Index>(it - trained_set.begin())]));
    }
  }
  return result;
}

namespace {

SelectionResult selection_from_weights(const LinearModel& model, double zero_tol) {
  SelectionResult result;
  result.method = SelectionMethod::L1Svm;
  for (Index j = 0; j < model.weights.size(); ++j) {
    if (std::abs(model.weights[j]) > zero_tol) {
      result.indices.push_back(j);
      result.scores.push_back(std::abs(model.weights[j]));
    }
  }
  return result;
}

}  // namespace

SelectionResult l1_select(const Eigen::Ref<const Matrix>& features,
                          const Eigen::Ref<const Labels>& labels, double c,
                          double zero_tol, const SvmOptions& svm) {
  if (!(c > 0.0)) {
    throw ValidationError("l1_select: c must be > 0");
  }
  if (zero_tol < 0.0) {
    throw ValidationError("l1_select: zero_tol must be >= 0");
  }
  SvmOptions options = svm;
  options.c = c;
  options.regularization = Regularization::L1;
  const Standardization standardization = fit_standardization(features);
  const LinearModel model = train_linear_svm(standardization.apply(features), labels, options);
  if (!model.converged) {
    throw ConvergenceError("l1_select: epoch cap reached, final objective " +
                           std::to_string(model.objective));
  }
  return selection_from_weights(model, zero_tol);
}

SelectionResult l1_select_k(const Eigen::Ref<const Matrix>& features,
                            const Eigen::Ref<const Labels>& labels, Index k,
                            double zero_tol, const SvmOptions& svm) {
  const Index d = features.cols();
  if (k < 1 || k > d) {
    throw ValidationError("l1_select_k: k must lie in [1, " + std::to_string(d) + "]");
  }
  const Standardization standardization = fit_standardization(features);
  const Matrix z = standardization.apply(features);

  auto solve = [&](double c) {
    SvmOptions options = svm;
    options.c = c;
    options.regularization = Regularization::L1;
    return train_linear_svm(z, labels, options);
  };
  auto count = [&](const LinearModel& m) {
    Index nonzero = 0;
    for (Index j = 0; j < m.weights.size(); ++j) {
      if (std::abs(m.weights[j]) > zero_tol) ++nonzero;
    }
    return nonzero;
  };

  // The support is not monotone in c: one separating column can reabsorb the
  // others as the penalty weakens, so bisecting the interval endpoints alone
  // can skip attainable supports. Scan a half-decade grid from the strongest
  // penalty upward, return on an exact hit, and refine the first crossing
  // beyond k by bisection. Only converged solves count as candidates.
  LinearModel best;
  Index best_count = -1;
  bool saw_unconverged = false;
  double failed_objective = 0.0;

  double below_c = 1e-4;  // strongest penalty whose converged support stayed < k
  constexpr int kScanPoints = 17;
  for (int i = 0; i < kScanPoints; ++i) {
    const double c = 1e-4 * std::pow(10.0, 0.5 * i);
    LinearModel m = solve(c);
    const Index n_c = count(m);
    if (!m.converged) {
      saw_unconverged = true;
      failed_objective = m.objective;
    }
    if (i == 0 && n_c > k) {
      // Even the strongest penalty keeps too many: keep the k largest |w|.
      std::vector<Index> order(static_cast<std::size_t>(d));
      std::iota(order.begin(), order.end(), Index{0});
      std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
        return std::abs(m.weights[a]) > std::abs(m.weights[b]);
      });
      order.resize(static_cast<std::size_t>(k));
      std::sort(order.begin(), order.end());
      SelectionResult result;
      result.method = SelectionMethod::L1Svm;
      result.indices = std::move(order);
      for (const Index idx : result.indices) {
        result.scores.push_back(std::abs(m.weights[idx]));
      }
      return result;
    }
    if (!m.converged) continue;
    if (n_c == k) return selection_from_weights(m, zero_tol);
    if (n_c < k) {
      below_c = c;
      if (n_c > best_count) {
        best = std::move(m);
        best_count = n_c;
      }
      continue;
    }
    // First crossing: somewhere in (below_c, c) the support passes through k.
    double lo = below_c;
    double hi = c;
    for (int it = 0; it < 30; ++it) {
      const double mid = std::sqrt(lo * hi);
      LinearModel mm = solve(mid);
      if (!mm.converged) {
        saw_unconverged = true;
        failed_objective = mm.objective;
        hi = mid;  // retreat toward the stronger penalty, which converges fast
        continue;
      }
      const Index n_mid = count(mm);
      if (n_mid == k) return selection_from_weights(mm, zero_tol);
      if (n_mid > k) {
        hi = mid;
      } else {
        lo = mid;
        if (n_mid > best_count) {
          best = std::move(mm);
          best_count = n_mid;
        }
      }
    }
    break;  // past the first crossing larger supports only repeat
  }

  // An empty result is honest only when every solve converged (the path is
  // genuinely empty up to the weakest penalty). If solves failed on the way,
  // the caller's epoch budget is what stopped us from doing better.
  if (best_count < 0 || (best_count == 0 && saw_unconverged)) {
    throw ConvergenceError("l1_select_k: epoch cap reached, final objective " +
                           std::to_string(failed_objective));
  }
  return selection_from_weights(best, zero_tol);
}

}  // namespace ndpoly
