#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ndpoly/errors.hpp"
#include "ndpoly/types.hpp"

namespace ndpoly {

// Positive class on the rows-first axis: tp = positive predicted positive.
struct ConfusionMatrix {
  long tp = 0;
  long fn = 0;
  long fp = 0;
  long tn = 0;

  long total() const { return tp + fn + fp + tn; }
};

ConfusionMatrix confusion(std::span<const std::string> predictions,
                          std::span<const std::string> truth, const std::string& positive_label,
                          const std::string& negative_label);

// +1 / -1 encoded overload.
ConfusionMatrix confusion(const Eigen::Ref<const Labels>& predictions,
                          const Eigen::Ref<const Labels>& truth);

// Ratios with zero denominators are reported absent, never 0 or NaN.
struct Metrics {
  std::optional<double> accuracy;
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> specificity;
  std::optional<double> f1;
};

Metrics derived_metrics(const ConfusionMatrix& cm);

/// First differences Acc(k+1) - Acc(k); length one less than the input.
std::vector<double> marginal_series(std::span<const double> accuracies);

struct EvaluationReport {
  ConfusionMatrix cm;
  Metrics metrics;
  std::string positive_label;
  std::string negative_label;
};

/// Plain-text confusion matrix plus derived metrics.
std::string format_evaluation(const EvaluationReport& report);

/// Machine-readable counterpart of format_evaluation; absent ratios are null.
std::string evaluation_to_json(const EvaluationReport& report);

}  // namespace ndpoly
