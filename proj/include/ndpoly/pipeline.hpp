#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ndpoly/data.hpp"
#include "ndpoly/metrics.hpp"
#include "ndpoly/model.hpp"
#include "ndpoly/selection.hpp"
#include "ndpoly/svm.hpp"
#include "ndpoly/types.hpp"

namespace ndpoly {

enum class SplitStrategy { RandomStratified, YearHeldOut, SpatialBlock, SpatioTemporal };

std::string to_string(SplitStrategy strategy);
SplitStrategy split_strategy_from_string(const std::string& name);

struct SplitSpec {
  SplitStrategy strategy = SplitStrategy::RandomStratified;
  double test_fraction = 0.30;  // RandomStratified only
  int grid_rows = 3;            // SpatialBlock only; SpatioTemporal always uses 2x2
  int grid_cols = 3;
  std::uint64_t seed = 42;
};

struct Fold {
  std::string name;
  std::vector<Index> train;
  std::vector<Index> test;
};

struct SplitResult {
  std::vector<Fold> folds;
  std::vector<std::string> warnings;
};

/// Builds cross-validation folds for the requested strategy. RandomStratified
/// yields one fold with per-class proportional allocation; YearHeldOut one
/// fold per distinct year; SpatialBlock one fold per non-empty grid cell over
/// the full-dataset bounding box; SpatioTemporal one fold per non-empty
/// (year x 2x2-quadrant) cell. Folds whose training side lacks a class are
/// dropped with a warning.
SplitResult split(const SampleTable& table, const SplitSpec& spec,
                  const std::string& positive_label, const std::string& negative_label);

struct SweepOptions {
  Index k_max = 10;
  double epsilon = 0.005;  // diminishing-returns threshold on test accuracy
  std::vector<SelectionMethod> methods = {SelectionMethod::SelectKBest,
                                          SelectionMethod::Rfe};
  SvmOptions svm;      // classifier settings; regularization is forced to L2
  Index rfe_step = 64;  // elimination stride over wide feature spaces
};

struct SweepRecord {
  Index k = 0;
  SelectionMethod winner = SelectionMethod::SelectKBest;
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
  double gap = 0.0;  // train - test
  std::vector<Index> selected;            // winner's feature indices
  std::vector<double> method_accuracies;  // test accuracy per report.methods entry
};

struct SweepReport {
  std::vector<SelectionMethod> methods;
  std::vector<SweepRecord> records;  // k = 1 .. effective k_max
  double epsilon_threshold = 0.005;
  std::vector<double> marginal_improvements;
  Index k_star = 0;
  bool k_star_fallback = false;  // no step fell below epsilon; k_star = k_max
};

struct SweetSpot {
  Index k = 0;
  bool fallback = false;
};

/// Diminishing-returns rule: smallest k with Acc(k+1) - Acc(k) < epsilon,
/// else the last k with the fallback flag set. accuracies[i] is Acc(i+1).
SweetSpot find_sweet_spot(const std::vector<double>& accuracies, double epsilon);

/// For each k and method: select k features on the training side, train the
/// L2 SVM on standardized selected columns, absorb, and score test accuracy.
/// Ties go to the earlier method in options.methods. k_max is clamped to the
/// feature count.
SweepReport sweep(const Eigen::Ref<const Matrix>& train_features,
                  const Eigen::Ref<const Labels>& train_labels,
                  const Eigen::Ref<const Matrix>& test_features,
                  const Eigen::Ref<const Labels>& test_labels,
                  const SweepOptions& options);

std::string format_sweep_table(const SweepReport& report);

/// One-document run description. The master seed overrides split.seed and
/// sweep.svm.seed so a single value reproduces the whole run.
struct DiscoveryConfig {
  std::string data_path;  // consumed by the CLI; discover() takes the table directly
  SampleSchema schema;
  int degree = 2;
  double nd_epsilon = kDefaultEpsilon;
  SplitSpec split;
  SweepOptions sweep;
  Index fold_index = 0;           // which fold the single-fold discovery run uses
  double validation_fraction = 0.0;  // >0 carves a selection holdout from the test side
  std::uint64_t seed = 42;
};

DiscoveryConfig discovery_config_from_json(const std::string& text);
std::string discovery_config_to_json(const DiscoveryConfig& config);

/// Standalone parser for the config's "schema" block (a JSON object), for
/// tools that ingest samples without a full discovery config.
SampleSchema sample_schema_from_json(const std::string& text);

struct DiscoveryResult {
  TrainedModel model;
  SweepReport report;
  std::string fold_name;
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
  std::optional<double> validation_accuracy;  // set when validation_fraction > 0
  EvaluationReport evaluation;  // final model on the held-out rows
  std::vector<std::string> warnings;
};

/// End-to-end discovery on one fold: expand, sweep both methods per k, pick
/// the sweet spot, and package the winning absorbed model with its hypercube
/// bound and provenance. Deterministic per config + seed. When
/// validation_fraction is zero the sweep scores the test side directly
/// (the verbatim procedure); otherwise selection is scored on the carved
/// validation part and test_accuracy comes from the untouched remainder.
DiscoveryResult discover(const SampleTable& table, const DiscoveryConfig& config);

std::string discovery_result_to_json(const DiscoveryResult& result);

struct FoldOutcome {
  std::string fold_name;
  Index k_star = 0;
  std::vector<std::string> descriptors;
  double test_accuracy = 0.0;
};

struct CrossValidationReport {
  std::vector<FoldOutcome> folds;
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;
  double min_accuracy = 0.0;
  std::vector<std::string> warnings;
};

/// Repeats the full discovery independently on every fold of the configured
/// split and aggregates test accuracy (mean, population std, min).
CrossValidationReport cross_validate(const SampleTable& table, const DiscoveryConfig& config);

std::string cross_validation_to_json(const CrossValidationReport& report);
std::string format_cross_validation(const CrossValidationReport& report);

}  // namespace ndpoly
