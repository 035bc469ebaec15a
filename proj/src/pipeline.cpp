#include "ndpoly/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <random>
#include <sstream>

#include <json.hpp>

#include "ndpoly/errors.hpp"
#include "ndpoly/metrics.hpp"

namespace ndpoly {

std::string to_string(SplitStrategy strategy) {
  switch (strategy) {
    case SplitStrategy::RandomStratified: return "random";
    case SplitStrategy::YearHeldOut: return "year";
    case SplitStrategy::SpatialBlock: return "spatial";
    case SplitStrategy::SpatioTemporal: return "spatiotemporal";
  }
  throw ValidationError("to_string: unknown SplitStrategy");
}

SplitStrategy split_strategy_from_string(const std::string& name) {
  if (name == "random") return SplitStrategy::RandomStratified;
  if (name == "year") return SplitStrategy::YearHeldOut;
  if (name == "spatial") return SplitStrategy::SpatialBlock;
  if (name == "spatiotemporal") return SplitStrategy::SpatioTemporal;
  throw ValidationError("unknown split strategy '" + name +
                        "' (expected random, year, spatial, or spatiotemporal)");
}

namespace {

// Fisher-Yates with a modulo draw, so fold assignment does not depend on the
// standard library's distribution implementation.
void shuffle_indices(std::vector<Index>& values, std::mt19937_64& rng) {
  for (std::size_t i = values.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(values[i - 1], values[j]);
  }
}

std::vector<int> distinct_years(const SampleTable& table) {
  std::vector<int> years = table.years;
  std::sort(years.begin(), years.end());
  years.erase(std::unique(years.begin(), years.end()), years.end());
  return years;
}

Fold fold_from_test_mask(const std::string& name, const std::vector<char>& in_test) {
  Fold fold;
  fold.name = name;
  for (std::size_t i = 0; i < in_test.size(); ++i) {
    (in_test[i] ? fold.test : fold.train).push_back(static_cast<Index>(i));
  }
  return fold;
}

Fold fold_from_test_rows(const std::string& name, const std::vector<Index>& rows, Index n) {
  std::vector<char> in_test(static_cast<std::size_t>(n), 0);
  for (const Index i : rows) in_test[static_cast<std::size_t>(i)] = 1;
  return fold_from_test_mask(name, in_test);
}

}  // namespace

SplitResult split(const SampleTable& table, const SplitSpec& spec,
                  const std::string& positive_label, const std::string& negative_label) {
  const Labels labels = table.numeric_labels(positive_label, negative_label);
  const Index n = table.size();
  std::vector<Fold> candidates;

  switch (spec.strategy) {
    case SplitStrategy::RandomStratified: {
      if (!(spec.test_fraction > 0.0 && spec.test_fraction < 1.0)) {
        throw ValidationError("split: test_fraction must lie in (0, 1)");
      }
      std::vector<std::pair<std::string, int>> classes{{positive_label, 1},
                                                       {negative_label, -1}};
      std::sort(classes.begin(), classes.end());
      std::mt19937_64 rng(spec.seed);
      std::vector<char> in_test(static_cast<std::size_t>(n), 0);
      for (const auto& [name, sign] : classes) {
        std::vector<Index> members;
        for (Index i = 0; i < n; ++i) {
          if (labels[i] == sign) members.push_back(i);
        }
        if (members.size() < 2) {
          throw ValidationError("split: class '" + name + "' needs at least 2 samples");
        }
        shuffle_indices(members, rng);
        const auto want = static_cast<Index>(
            std::llround(spec.test_fraction * static_cast<double>(members.size())));
        const Index take =
            std::clamp<Index>(want, 1, static_cast<Index>(members.size()) - 1);
        for (Index t = 0; t < take; ++t) {
          in_test[static_cast<std::size_t>(members[static_cast<std::size_t>(t)])] = 1;
        }
      }
      candidates.push_back(fold_from_test_mask("random", in_test));
      break;
    }

    case SplitStrategy::YearHeldOut: {
      if (!table.has_years()) {
        throw SchemaError("split: year column required for the year strategy");
      }
      for (const int year : distinct_years(table)) {
        std::vector<Index> rows;
        for (Index i = 0; i < n; ++i) {
          if (table.years[static_cast<std::size_t>(i)] == year) rows.push_back(i);
        }
        candidates.push_back(fold_from_test_rows("year=" + std::to_string(year), rows, n));
      }
      break;
    }

    case SplitStrategy::SpatialBlock: {
      if (!table.has_coords()) {
        throw SchemaError("split: coordinates required for the spatial strategy");
      }
      if (spec.grid_rows < 1 || spec.grid_cols < 1) {
        throw ValidationError("split: grid dimensions must be >= 1");
      }
      const auto [xmin_it, xmax_it] = std::minmax_element(table.x.begin(), table.x.end());
      const auto [ymin_it, ymax_it] = std::minmax_element(table.y.begin(), table.y.end());
      const double xmin = *xmin_it;
      const double ymin = *ymin_it;
      const double xw = (*xmax_it - xmin) / spec.grid_cols;
      const double yw = (*ymax_it - ymin) / spec.grid_rows;
      auto cell_of = [&](Index i) {
        const double px = table.x[static_cast<std::size_t>(i)];
        const double py = table.y[static_cast<std::size_t>(i)];
        const int col = xw > 0.0 ? std::min(spec.grid_cols - 1,
                                            static_cast<int>((px - xmin) / xw))
                                 : 0;
        const int row = yw > 0.0 ? std::min(spec.grid_rows - 1,
                                            static_cast<int>((py - ymin) / yw))
                                 : 0;
        return row * spec.grid_cols + col;
      };
      for (int cell = 0; cell < spec.grid_rows * spec.grid_cols; ++cell) {
        std::vector<Index> rows;
        for (Index i = 0; i < n; ++i) {
          if (cell_of(i) == cell) rows.push_back(i);
        }
        if (rows.empty()) continue;
        const std::string name = "block=" + std::to_string(cell / spec.grid_cols) + "," +
                                 std::to_string(cell % spec.grid_cols);
        candidates.push_back(fold_from_test_rows(name, rows, n));
      }
      break;
    }

    case SplitStrategy::SpatioTemporal: {
      if (!table.has_coords()) {
        throw SchemaError("split: coordinates required for the spatio-temporal strategy");
      }
      if (!table.has_years()) {
        throw SchemaError("split: year column required for the spatio-temporal strategy");
      }
      const auto [xmin_it, xmax_it] = std::minmax_element(table.x.begin(), table.x.end());
      const auto [ymin_it, ymax_it] = std::minmax_element(table.y.begin(), table.y.end());
      const double mx = (*xmin_it + *xmax_it) / 2.0;
      const double my = (*ymin_it + *ymax_it) / 2.0;
      auto quadrant_of = [&](Index i) {
        const int qx = table.x[static_cast<std::size_t>(i)] >= mx ? 1 : 0;
        const int qy = table.y[static_cast<std::size_t>(i)] >= my ? 1 : 0;
        return qy * 2 + qx;
      };
      for (const int year : distinct_years(table)) {
        for (int q = 0; q < 4; ++q) {
          std::vector<Index> rows;
          for (Index i = 0; i < n; ++i) {
            if (table.years[static_cast<std::size_t>(i)] == year && quadrant_of(i) == q) {
              rows.push_back(i);
            }
          }
          if (rows.empty()) continue;
          const std::string name =
              "year=" + std::to_string(year) + ",quadrant=" + std::to_string(q);
          candidates.push_back(fold_from_test_rows(name, rows, n));
        }
      }
      break;
    }
  }

  SplitResult result;
  for (Fold& fold : candidates) {
    bool has_positive = false;
    bool has_negative = false;
    for (const Index i : fold.train) {
      (labels[i] == 1 ? has_positive : has_negative) = true;
    }
    if (!has_positive || !has_negative) {
      result.warnings.push_back("dropped fold '" + fold.name +
                                "': training side lacks class '" +
                                (!has_positive ? positive_label : negative_label) + "'");
      continue;
    }
    result.folds.push_back(std::move(fold));
  }
  return result;
}

SweetSpot find_sweet_spot(const std::vector<double>& accuracies, double epsilon) {
  if (accuracies.empty()) {
    throw ValidationError("find_sweet_spot: empty accuracy sequence");
  }
  for (std::size_t i = 0; i + 1 < accuracies.size(); ++i) {
    if (accuracies[i + 1] - accuracies[i] < epsilon) {
      return SweetSpot{static_cast<Index>(i + 1), false};
    }
  }
  return SweetSpot{static_cast<Index>(accuracies.size()), true};
}

namespace {

Matrix subset_columns(const Eigen::Ref<const Matrix>& features,
                      const std::vector<Index>& indices) {
  Matrix out(features.rows(), static_cast<Index>(indices.size()));
  for (std::size_t j = 0; j < indices.size(); ++j) {
    out.col(static_cast<Index>(j)) = features.col(indices[j]);
  }
  return out;
}

// Per-row sequential accumulation in the same operation order as
// TrainedModel::decision_value, so reported accuracies match later
// re-evaluation of the saved model exactly.
double sign_accuracy(double bias, const Vector& weights,
                     const Eigen::Ref<const Matrix>& features,
                     const Eigen::Ref<const Labels>& labels) {
  Index correct = 0;
  for (Index i = 0; i < features.rows(); ++i) {
    double acc = bias;
    for (Index j = 0; j < weights.size(); ++j) acc += weights[j] * features(i, j);
    if ((acc > 0.0 ? 1 : -1) == labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(labels.size());
}

SelectionResult run_selection(SelectionMethod method,
                              const Eigen::Ref<const Matrix>& features,
                              const Eigen::Ref<const Labels>& labels, Index k,
                              const SweepOptions& options, const SvmOptions& svm) {
  switch (method) {
    case SelectionMethod::SelectKBest: return select_k_best(features, labels, k);
    case SelectionMethod::Rfe: return rfe(features, labels, k, options.rfe_step, svm);
    case SelectionMethod::L1Svm: return l1_select_k(features, labels, k, 1e-6, svm);
  }
  throw ValidationError("sweep: unknown selection method");
}

}  // namespace

SweepReport sweep(const Eigen::Ref<const Matrix>& train_features,
                  const Eigen::Ref<const Labels>& train_labels,
                  const Eigen::Ref<const Matrix>& test_features,
                  const Eigen::Ref<const Labels>& test_labels,
                  const SweepOptions& options) {
  if (options.k_max < 1) throw ValidationError("sweep: k_max must be >= 1");
  if (options.methods.empty()) throw ValidationError("sweep: no selection methods given");
  if (train_features.cols() != test_features.cols()) {
    throw DimensionError("sweep: train and test feature counts differ");
  }
  if (train_features.rows() != train_labels.size() ||
      test_features.rows() != test_labels.size()) {
    throw DimensionError("sweep: feature row and label counts differ");
  }

  const Index k_cap = std::min<Index>(options.k_max, train_features.cols());
  SvmOptions svm = options.svm;
  svm.regularization = Regularization::L2;

  SweepReport report;
  report.methods = options.methods;
  report.epsilon_threshold = options.epsilon;

  for (Index k = 1; k <= k_cap; ++k) {
    SweepRecord record;
    record.k = k;
    AbsorbedModel best_model;
    Matrix best_train;
    double best_accuracy = -1.0;
    for (const SelectionMethod method : options.methods) {
      const SelectionResult selection =
          run_selection(method, train_features, train_labels, k, options, svm);
      Matrix train_sub = subset_columns(train_features, selection.indices);
      const Standardization standardization = fit_standardization(train_sub);
      const LinearModel linear =
          train_linear_svm(standardization.apply(train_sub), train_labels, svm);
      const AbsorbedModel absorbed = absorb_standardization(linear, standardization);
      const Matrix test_sub = subset_columns(test_features, selection.indices);
      const double accuracy =
          sign_accuracy(absorbed.bias, absorbed.weights, test_sub, test_labels);
      record.method_accuracies.push_back(accuracy);
      if (accuracy > best_accuracy) {
        best_accuracy = accuracy;
        record.winner = method;
        record.selected = selection.indices;
        best_model = absorbed;
        best_train = std::move(train_sub);
      }
    }
    record.test_accuracy = best_accuracy;
    record.train_accuracy =
        sign_accuracy(best_model.bias, best_model.weights, best_train, train_labels);
    record.gap = record.train_accuracy - record.test_accuracy;
    report.records.push_back(std::move(record));
  }

  std::vector<double> accuracies;
  accuracies.reserve(report.records.size());
  for (const SweepRecord& record : report.records) accuracies.push_back(record.test_accuracy);
  if (accuracies.size() >= 2) {
    report.marginal_improvements = marginal_series(accuracies);
  }
  const SweetSpot spot = find_sweet_spot(accuracies, options.epsilon);
  report.k_star = spot.k;
  report.k_star_fallback = spot.fallback;
  return report;
}

std::string format_sweep_table(const SweepReport& report) {
  std::ostringstream out;
  out << std::setw(4) << "k";
  for (const SelectionMethod method : report.methods) {
    out << " | " << std::setw(13) << to_string(method);
  }
  out << " | " << std::setw(8) << "best"
      << " | " << std::setw(13) << std::left << "winner" << std::right << " | "
      << std::setw(7) << "gap" << "\n";
  out << std::fixed << std::setprecision(4);
  for (const SweepRecord& record : report.records) {
    out << std::setw(4) << record.k;
    for (const double accuracy : record.method_accuracies) {
      out << " | " << std::setw(13) << accuracy;
    }
    out << " | " << std::setw(8) << record.test_accuracy << " | " << std::setw(13)
        << std::left << to_string(record.winner) << std::right << " | " << std::setw(7)
        << record.gap << "\n";
  }
  out << "k* = " << report.k_star << " (epsilon = " << report.epsilon_threshold << ")";
  if (report.k_star_fallback) {
    out << " [fallback: no marginal step fell below the threshold]";
  }
  out << "\n";
  return out.str();
}

namespace {

void validate_config(const DiscoveryConfig& config) {
  if (config.degree < 1 || config.degree > 2) {
    throw ValidationError("config: degree must be 1 or 2");
  }
  if (!(config.nd_epsilon > 0.0)) {
    throw ValidationError("config: nd_epsilon must be > 0");
  }
  if (config.fold_index < 0) {
    throw ValidationError("config: fold_index must be >= 0");
  }
  if (config.validation_fraction < 0.0 || config.validation_fraction >= 1.0) {
    throw ValidationError("config: validation_fraction must lie in [0, 1)");
  }
  if (config.sweep.k_max < 1) {
    throw ValidationError("config: k_max must be >= 1");
  }
  if (config.sweep.methods.empty()) {
    throw ValidationError("config: at least one selection method required");
  }
  if (config.sweep.rfe_step < 1) {
    throw ValidationError("config: rfe_step must be >= 1");
  }
  if (!(config.sweep.svm.c > 0.0)) {
    throw ValidationError("config: svm c must be > 0");
  }
}

template <typename Fn>
auto run_stage(const std::string& name, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const ConvergenceError& e) {
    throw ConvergenceError(name + ": " + e.what());
  } catch (const SchemaError& e) {
    throw SchemaError(name + ": " + e.what());
  } catch (const DimensionError& e) {
    throw DimensionError(name + ": " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(name + ": " + e.what());
  }
}

}  // namespace

DiscoveryResult discover(const SampleTable& table, const DiscoveryConfig& config) {
  validate_config(config);
  DiscoveryConfig cfg = config;
  cfg.split.seed = config.seed;
  cfg.sweep.svm.seed = config.seed;

  const std::string& positive = cfg.schema.positive_label;
  const std::string& negative = cfg.schema.negative_label;
  if (positive.empty() || negative.empty()) {
    throw ValidationError("config: positive and negative labels required");
  }
  const Labels all_labels =
      run_stage("labels", [&] { return table.numeric_labels(positive, negative); });
  if (all_labels.maxCoeff() != 1 || all_labels.minCoeff() != -1) {
    throw ValidationError("discover: training data contains a single class");
  }

  const SplitResult split_result =
      run_stage("split", [&] { return split(table, cfg.split, positive, negative); });
  if (split_result.folds.empty()) {
    throw ValidationError("discover: no usable folds (all were dropped)");
  }
  if (cfg.fold_index >= static_cast<Index>(split_result.folds.size())) {
    throw ValidationError("discover: fold_index " + std::to_string(cfg.fold_index) +
                          " out of range (" + std::to_string(split_result.folds.size()) +
                          " folds)");
  }
  const Fold& fold = split_result.folds[static_cast<std::size_t>(cfg.fold_index)];

  const FeatureSpace space = enumerate_features(table.band_count(), cfg.degree);
  auto gather_bands = [&](const std::vector<Index>& rows) {
    Matrix bands(static_cast<Index>(rows.size()), table.band_count());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      bands.row(static_cast<Index>(i)) = table.bands.row(rows[i]);
    }
    return bands;
  };
  auto gather_labels = [&](const std::vector<Index>& rows) {
    Labels labels(static_cast<Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      labels[static_cast<Index>(i)] = all_labels[rows[i]];
    }
    return labels;
  };

  const Matrix train_x = run_stage("expansion", [&] {
    return evaluate_feature_matrix(gather_bands(fold.train), space, cfg.nd_epsilon);
  });
  const Labels train_y = gather_labels(fold.train);
  const Matrix test_x = run_stage("expansion", [&] {
    return evaluate_feature_matrix(gather_bands(fold.test), space, cfg.nd_epsilon);
  });
  const Labels test_y = gather_labels(fold.test);

  // Selection holdout: by default the sweep scores the test side itself; a
  // positive validation_fraction carves the scoring set out of the test side
  // and leaves the remainder untouched for the final accuracy.
  std::vector<Index> eval_rows;
  std::vector<Index> final_rows;
  if (cfg.validation_fraction > 0.0) {
    std::vector<std::pair<std::string, int>> classes{{positive, 1}, {negative, -1}};
    std::sort(classes.begin(), classes.end());
    std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
    std::vector<char> in_validation(static_cast<std::size_t>(test_y.size()), 0);
    for (const auto& [name, sign] : classes) {
      std::vector<Index> members;
      for (Index i = 0; i < test_y.size(); ++i) {
        if (test_y[i] == sign) members.push_back(i);
      }
      if (members.size() < 2) {
        throw ValidationError("discover: validation_fraction needs at least 2 test samples "
                              "of class '" + name + "'");
      }
      shuffle_indices(members, rng);
      const auto want = static_cast<Index>(
          std::llround(cfg.validation_fraction * static_cast<double>(members.size())));
      const Index take =
          std::clamp<Index>(want, 1, static_cast<Index>(members.size()) - 1);
      for (Index t = 0; t < take; ++t) {
        in_validation[static_cast<std::size_t>(members[static_cast<std::size_t>(t)])] = 1;
      }
    }
    for (Index i = 0; i < test_y.size(); ++i) {
      (in_validation[static_cast<std::size_t>(i)] ? eval_rows : final_rows).push_back(i);
    }
  } else {
    eval_rows.resize(static_cast<std::size_t>(test_y.size()));
    std::iota(eval_rows.begin(), eval_rows.end(), Index{0});
    final_rows = eval_rows;
  }
  auto gather_rows = [](const Matrix& m, const std::vector<Index>& rows) {
    Matrix out(static_cast<Index>(rows.size()), m.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      out.row(static_cast<Index>(i)) = m.row(rows[i]);
    }
    return out;
  };
  auto gather_label_rows = [](const Labels& l, const std::vector<Index>& rows) {
    Labels out(static_cast<Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) out[static_cast<Index>(i)] = l[rows[i]];
    return out;
  };
  const Matrix eval_x = gather_rows(test_x, eval_rows);
  const Labels eval_y = gather_label_rows(test_y, eval_rows);
  const Matrix final_x = gather_rows(test_x, final_rows);
  const Labels final_y = gather_label_rows(test_y, final_rows);

  const SweepReport report = run_stage(
      "sweep", [&] { return sweep(train_x, train_y, eval_x, eval_y, cfg.sweep); });
  const SweepRecord& star =
      report.records[static_cast<std::size_t>(report.k_star - 1)];

  const Matrix train_sub = subset_columns(train_x, star.selected);
  Standardization standardization;
  LinearModel linear;
  run_stage("final training", [&] {
    standardization = fit_standardization(train_sub);
    SvmOptions svm = cfg.sweep.svm;
    svm.regularization = Regularization::L2;
    linear = train_linear_svm(standardization.apply(train_sub), train_y, svm);
    return 0;
  });
  const AbsorbedModel absorbed = absorb_standardization(linear, standardization);

  TrainedModel model;
  model.band_count = table.band_count();
  model.degree = cfg.degree;
  model.epsilon = cfg.nd_epsilon;
  for (const Index idx : star.selected) model.descriptors.push_back(space.descriptor(idx));
  model.bias = absorbed.bias;
  model.weights = absorbed.weights;
  model.positive_label = positive;
  model.negative_label = negative;
  model.bound = run_stage("bound", [&] {
    return compute_hypercube_bound(model.bias, model.weights, model.descriptors);
  });
  model.provenance.selection_method = to_string(star.winner);
  model.provenance.k = report.k_star;
  model.provenance.seed = cfg.seed;
  model.provenance.data_fingerprint = table_fingerprint(table);
  model.validate();

  DiscoveryResult result;
  result.model = model;
  result.report = report;
  result.fold_name = fold.name;
  result.train_accuracy = star.train_accuracy;

  const Matrix final_sub = subset_columns(final_x, star.selected);
  Labels predictions(final_y.size());
  for (Index i = 0; i < final_sub.rows(); ++i) {
    double value = absorbed.bias;
    for (Index j = 0; j < absorbed.weights.size(); ++j) {
      value += absorbed.weights[j] * final_sub(i, j);
    }
    predictions[i] = value > 0.0 ? 1 : -1;
  }
  result.evaluation.cm = confusion(predictions, final_y);
  result.evaluation.metrics = derived_metrics(result.evaluation.cm);
  result.evaluation.positive_label = positive;
  result.evaluation.negative_label = negative;
  result.test_accuracy = result.evaluation.metrics.accuracy.value_or(0.0);
  if (cfg.validation_fraction > 0.0) {
    result.validation_accuracy = star.test_accuracy;
  }
  result.warnings = split_result.warnings;
  return result;
}

CrossValidationReport cross_validate(const SampleTable& table,
                                     const DiscoveryConfig& config) {
  validate_config(config);
  SplitSpec seeded = config.split;
  seeded.seed = config.seed;
  const SplitResult split_result =
      split(table, seeded, config.schema.positive_label, config.schema.negative_label);
  if (split_result.folds.empty()) {
    throw ValidationError("cross_validate: no usable folds (all were dropped)");
  }

  CrossValidationReport report;
  report.warnings = split_result.warnings;
  std::vector<double> accuracies;
  for (std::size_t f = 0; f < split_result.folds.size(); ++f) {
    DiscoveryConfig per_fold = config;
    per_fold.fold_index = static_cast<Index>(f);
    const DiscoveryResult run = discover(table, per_fold);
    FoldOutcome outcome;
    outcome.fold_name = run.fold_name;
    outcome.k_star = run.report.k_star;
    for (const FeatureDescriptor& d : run.model.descriptors) {
      outcome.descriptors.push_back(descriptor_name(d));
    }
    outcome.test_accuracy = run.test_accuracy;
    accuracies.push_back(run.test_accuracy);
    report.folds.push_back(std::move(outcome));
  }

  const double count = static_cast<double>(accuracies.size());
  double mean = 0.0;
  for (const double a : accuracies) mean += a;
  mean /= count;
  double variance = 0.0;
  for (const double a : accuracies) variance += (a - mean) * (a - mean);
  variance /= count;
  report.mean_accuracy = mean;
  report.std_accuracy = std::sqrt(variance);
  report.min_accuracy = *std::min_element(accuracies.begin(), accuracies.end());
  return report;
}

namespace {

nlohmann::json sweep_report_to_json(const SweepReport& report) {
  nlohmann::json records = nlohmann::json::array();
  for (const SweepRecord& record : report.records) {
    nlohmann::json method_accuracies;
    for (std::size_t m = 0; m < report.methods.size(); ++m) {
      method_accuracies[to_string(report.methods[m])] = record.method_accuracies[m];
    }
    records.push_back({{"k", record.k},
                       {"winner", to_string(record.winner)},
                       {"train_accuracy", record.train_accuracy},
                       {"test_accuracy", record.test_accuracy},
                       {"gap", record.gap},
                       {"selected", record.selected},
                       {"method_accuracies", std::move(method_accuracies)}});
  }
  nlohmann::json out;
  out["records"] = std::move(records);
  out["epsilon_threshold"] = report.epsilon_threshold;
  out["marginal_improvements"] = report.marginal_improvements;
  out["k_star"] = report.k_star;
  out["k_star_fallback"] = report.k_star_fallback;
  return out;
}

}  // namespace

std::string discovery_result_to_json(const DiscoveryResult& result) {
  nlohmann::json document = sweep_report_to_json(result.report);
  document["fold"] = result.fold_name;
  document["train_accuracy"] = result.train_accuracy;
  document["test_accuracy"] = result.test_accuracy;
  if (result.validation_accuracy) {
    document["validation_accuracy"] = *result.validation_accuracy;
  } else {
    document["validation_accuracy"] = nullptr;
  }
  nlohmann::json descriptors = nlohmann::json::array();
  for (const FeatureDescriptor& d : result.model.descriptors) {
    descriptors.push_back(descriptor_name(d));
  }
  document["selected_descriptors"] = std::move(descriptors);
  document["warnings"] = result.warnings;
  return document.dump(2) + "\n";
}

std::string cross_validation_to_json(const CrossValidationReport& report) {
  nlohmann::json folds = nlohmann::json::array();
  for (const FoldOutcome& outcome : report.folds) {
    folds.push_back({{"fold", outcome.fold_name},
                     {"k_star", outcome.k_star},
                     {"descriptors", outcome.descriptors},
                     {"test_accuracy", outcome.test_accuracy}});
  }
  nlohmann::json document;
  document["folds"] = std::move(folds);
  document["mean_accuracy"] = report.mean_accuracy;
  document["std_accuracy"] = report.std_accuracy;
  document["min_accuracy"] = report.min_accuracy;
  document["warnings"] = report.warnings;
  return document.dump(2) + "\n";
}

std::string format_cross_validation(const CrossValidationReport& report) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(4);
  for (const FoldOutcome& outcome : report.folds) {
    out << std::setw(24) << std::left << outcome.fold_name << std::right << "  k*=" <<
        outcome.k_star << "  acc=" << outcome.test_accuracy << "  ";
    for (std::size_t i = 0; i < outcome.descriptors.size(); ++i) {
      if (i) out << " + ";
      out << outcome.descriptors[i];
    }
    out << "\n";
  }
  out << "mean " << report.mean_accuracy << " (std " << report.std_accuracy << ", min "
      << report.min_accuracy << ") over " << report.folds.size() << " folds\n";
  return out.str();
}

namespace {

NegativePolicy negative_policy_from_string(const std::string& name) {
  if (name == "reject") return NegativePolicy::Reject;
  if (name == "clamp") return NegativePolicy::Clamp;
  throw SchemaError("unknown negative_policy '" + name + "' (expected reject or clamp)");
}

SampleSchema schema_from_json_object(const nlohmann::json& schema) {
  SampleSchema out;
  out.band_columns = schema.value("bands", std::vector<std::string>{});
  out.label_column = schema.value("label_column", std::string{"label"});
  out.year_column = schema.value("year_column", std::string{});
  out.x_column = schema.value("x_column", std::string{});
  out.y_column = schema.value("y_column", std::string{});
  out.positive_label = schema.value("positive_label", std::string{});
  out.negative_label = schema.value("negative_label", std::string{});
  out.negative_policy =
      negative_policy_from_string(schema.value("negative_policy", std::string{"reject"}));
  out.scale_factor = schema.value("scale_factor", 1.0);
  out.max_reflectance = schema.value("max_reflectance", 1.5);
  return out;
}

}  // namespace

SampleSchema sample_schema_from_json(const std::string& text) {
  nlohmann::json document;
  try {
    document = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("schema is not valid JSON: ") + e.what());
  }
  try {
    if (!document.is_object()) {
      throw SchemaError("schema must be a JSON object");
    }
    return schema_from_json_object(document);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("malformed schema: ") + e.what());
  }
}

std::string discovery_config_to_json(const DiscoveryConfig& config) {
  nlohmann::json document;
  document["data"] = config.data_path;
  document["schema"] = {
      {"bands", config.schema.band_columns},
      {"label_column", config.schema.label_column},
      {"year_column", config.schema.year_column},
      {"x_column", config.schema.x_column},
      {"y_column", config.schema.y_column},
      {"positive_label", config.schema.positive_label},
      {"negative_label", config.schema.negative_label},
      {"negative_policy",
       config.schema.negative_policy == NegativePolicy::Clamp ? "clamp" : "reject"},
      {"scale_factor", config.schema.scale_factor},
      {"max_reflectance", config.schema.max_reflectance}};
  document["degree"] = config.degree;
  document["nd_epsilon"] = config.nd_epsilon;
  document["split"] = {{"strategy", to_string(config.split.strategy)},
                       {"test_fraction", config.split.test_fraction},
                       {"grid_rows", config.split.grid_rows},
                       {"grid_cols", config.split.grid_cols}};
  nlohmann::json methods = nlohmann::json::array();
  for (const SelectionMethod method : config.sweep.methods) {
    methods.push_back(to_string(method));
  }
  document["sweep"] = {{"k_max", config.sweep.k_max},
                       {"epsilon", config.sweep.epsilon},
                       {"methods", std::move(methods)},
                       {"svm_c", config.sweep.svm.c},
                       {"svm_tol", config.sweep.svm.tol},
                       {"svm_max_epochs", config.sweep.svm.max_epochs},
                       {"rfe_step", config.sweep.rfe_step}};
  document["fold_index"] = config.fold_index;
  document["validation_fraction"] = config.validation_fraction;
  document["seed"] = config.seed;
  return document.dump(2) + "\n";
}

DiscoveryConfig discovery_config_from_json(const std::string& text) {
  nlohmann::json document;
  try {
    document = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("configuration is not valid JSON: ") + e.what());
  }
  try {
    if (!document.is_object()) {
      throw SchemaError("configuration must be a JSON object");
    }
    DiscoveryConfig config;
    config.data_path = document.value("data", std::string{});
    if (document.contains("schema")) {
      config.schema = schema_from_json_object(document.at("schema"));
    }
    config.degree = document.value("degree", 2);
    config.nd_epsilon = document.value("nd_epsilon", kDefaultEpsilon);
    if (document.contains("split")) {
      const nlohmann::json& split_doc = document.at("split");
      config.split.strategy =
          split_strategy_from_string(split_doc.value("strategy", std::string{"random"}));
      config.split.test_fraction = split_doc.value("test_fraction", 0.30);
      config.split.grid_rows = split_doc.value("grid_rows", 3);
      config.split.grid_cols = split_doc.value("grid_cols", 3);
    }
    if (document.contains("sweep")) {
      const nlohmann::json& sweep_doc = document.at("sweep");
      config.sweep.k_max = sweep_doc.value("k_max", Index{10});
      config.sweep.epsilon = sweep_doc.value("epsilon", 0.005);
      if (sweep_doc.contains("methods")) {
        config.sweep.methods.clear();
        for (const auto& name : sweep_doc.at("methods")) {
          config.sweep.methods.push_back(
              selection_method_from_string(name.get<std::string>()));
        }
      }
      config.sweep.svm.c = sweep_doc.value("svm_c", 1.0);
      config.sweep.svm.tol = sweep_doc.value("svm_tol", 1e-4);
      config.sweep.svm.max_epochs = sweep_doc.value("svm_max_epochs", 5000);
      config.sweep.rfe_step = sweep_doc.value("rfe_step", Index{64});
    }
    config.fold_index = document.value("fold_index", Index{0});
    config.validation_fraction = document.value("validation_fraction", 0.0);
    config.seed = document.value("seed", std::uint64_t{42});
    validate_config(config);
    return config;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("malformed configuration: ") + e.what());
  }
}

}  // namespace ndpoly
