#include "ndpoly/metrics.hpp"

#include <cstdio>

#include <json.hpp>

namespace ndpoly {

ConfusionMatrix confusion(std::span<const std::string> predictions,
                          std::span<const std::string> truth, const std::string& positive_label,
                          const std::string& negative_label) {
  if (predictions.size() != truth.size()) {
    throw DimensionError("confusion: prediction and truth lengths differ");
  }
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    auto classify = [&](const std::string& label, const char* which) {
      if (label == positive_label) return true;
      if (label == negative_label) return false;
      throw ValidationError(std::string("confusion: unknown ") + which + " label '" + label +
                            "' at row " + std::to_string(i));
    };
    const bool actual_pos = classify(truth[i], "truth");
    const bool predicted_pos = classify(predictions[i], "predicted");
    if (actual_pos) {
      (predicted_pos ? cm.tp : cm.fn)++;
    } else {
      (predicted_pos ? cm.fp : cm.tn)++;
    }
  }
  return cm;
}

ConfusionMatrix confusion(const Eigen::Ref<const Labels>& predictions,
                          const Eigen::Ref<const Labels>& truth) {
  if (predictions.size() != truth.size()) {
    throw DimensionError("confusion: prediction and truth lengths differ");
  }
  ConfusionMatrix cm;
  for (Index i = 0; i < truth.size(); ++i) {
    auto classify = [&](int label) {
      if (label == 1) return true;
      if (label == -1) return false;
      throw ValidationError("confusion: labels must be +1/-1, got " + std::to_string(label));
    };
    if (classify(truth[i])) {
      (classify(predictions[i]) ? cm.tp : cm.fn)++;
    } else {
      (classify(predictions[i]) ? cm.fp : cm.tn)++;
    }
  }
  return cm;
}

Metrics derived_metrics(const ConfusionMatrix& cm) {
  if (cm.total() == 0) {
    throw ValidationError("derived_metrics: empty confusion matrix");
  }
  Metrics m;
  auto ratio = [](long num, long den) -> std::optional<double> {
    if (den == 0) return std::nullopt;
    return static_cast<double>(num) / static_cast<double>(den);
  };
  m.accuracy = ratio(cm.tp + cm.tn, cm.total());
  m.precision = ratio(cm.tp, cm.tp + cm.fp);
  m.recall = ratio(cm.tp, cm.tp + cm.fn);
  m.specificity = ratio(cm.tn, cm.tn + cm.fp);
  if (m.precision && m.recall && (*m.precision + *m.recall) > 0.0) {
    m.f1 = 2.0 * *m.precision * *m.recall / (*m.precision + *m.recall);
  }
  return m;
}

std::vector<double> marginal_series(std::span<const double> accuracies) {
  if (accuracies.size() < 2) {
    throw ValidationError("marginal_series: need at least 2 accuracies");
  }
  std::vector<double> diffs(accuracies.size() - 1);
  for (std::size_t k = 0; k + 1 < accuracies.size(); ++k) {
    diffs[k] = accuracies[k + 1] - accuracies[k];
  }
  return diffs;
}

std::string format_evaluation(const EvaluationReport& report) {
  const auto& cm = report.cm;
  char buf[256];
  std::string out;
  out += "confusion matrix (rows = actual, cols = predicted)\n";
  std::snprintf(buf, sizeof(buf), "%-12s %10s %10s\n", "", report.positive_label.c_str(),
                report.negative_label.c_str());
  out += buf;
  std::snprintf(buf, sizeof(buf), "%-12s %10ld %10ld\n", report.positive_label.c_str(), cm.tp,
                cm.fn);
  out += buf;
  std::snprintf(buf, sizeof(buf), "%-12s %10ld %10ld\n", report.negative_label.c_str(), cm.fp,
                cm.tn);
  out += buf;
  auto line = [&](const char* name, const std::optional<double>& value) {
    if (value) {
      std::snprintf(buf, sizeof(buf), "%-12s %.4f\n", name, *value);
    } else {
      std::snprintf(buf, sizeof(buf), "%-12s n/a\n", name);
    }
    out += buf;
  };
  const auto& m = report.metrics;
  line("accuracy", m.accuracy);
  line("precision", m.precision);
  line("recall", m.recall);
  line("specificity", m.specificity);
  line("f1", m.f1);
  return out;
}

std::string evaluation_to_json(const EvaluationReport& report) {
  auto opt = [](const std::optional<double>& value) {
    return value ? nlohmann::json(*value) : nlohmann::json(nullptr);
  };
  nlohmann::json document;
  document["positive_label"] = report.positive_label;
  document["negative_label"] = report.negative_label;
  document["confusion"] = {{"tp", report.cm.tp},
                           {"fn", report.cm.fn},
                           {"fp", report.cm.fp},
                           {"tn", report.cm.tn}};
  document["metrics"] = {{"accuracy", opt(report.metrics.accuracy)},
                         {"precision", opt(report.metrics.precision)},
                         {"recall", opt(report.metrics.recall)},
                         {"specificity", opt(report.metrics.specificity)},
                         {"f1", opt(report.metrics.f1)}};
  return document.dump(2) + "\n";
}

}  // namespace ndpoly
