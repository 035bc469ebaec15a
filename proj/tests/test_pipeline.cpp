#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "ndpoly/data.hpp"
#include "ndpoly/errors.hpp"
#include "ndpoly/pipeline.hpp"
#include "ndpoly/spectral.hpp"

using namespace ndpoly;

namespace {

// Every row appears exactly once across train and test, both sides ascending.
void check_partition(const Fold& fold, Index n) {
  std::vector<Index> all = fold.train;
  all.insert(all.end(), fold.test.begin(), fold.test.end());
  CHECK(static_cast<Index>(all.size()) == n);
  std::sort(all.begin(), all.end());
  for (Index i = 0; i < n; ++i) REQUIRE(all[static_cast<std::size_t>(i)] == i);
  CHECK(std::is_sorted(fold.train.begin(), fold.train.end()));
  CHECK(std::is_sorted(fold.test.begin(), fold.test.end()));
  CHECK_FALSE(fold.train.empty());
  CHECK_FALSE(fold.test.empty());
}

SampleTable small_scene(Index samples, int bands, std::uint64_t seed,
                        double noise = 0.03) {
  SyntheticOptions options;
  options.samples = samples;
  options.band_count = bands;
  options.noise = noise;
  options.separation = 0.6;
  options.seed = seed;
  return generate_synthetic(options);
}

DiscoveryConfig small_config(std::uint64_t seed) {
  DiscoveryConfig config;
  config.schema.positive_label = "weed";
  config.schema.negative_label = "crop";
  config.sweep.k_max = 2;
  config.seed = seed;
  return config;
}

}  // namespace

TEST_CASE("split strategy names round trip") {
  for (const SplitStrategy strategy :
       {SplitStrategy::RandomStratified, SplitStrategy::YearHeldOut,
        SplitStrategy::SpatialBlock, SplitStrategy::SpatioTemporal}) {
    CHECK(split_strategy_from_string(to_string(strategy)) == strategy);
  }
  CHECK(to_string(SplitStrategy::RandomStratified) == "random");
  CHECK(to_string(SplitStrategy::YearHeldOut) == "year");
  CHECK(to_string(SplitStrategy::SpatialBlock) == "spatial");
  CHECK(to_string(SplitStrategy::SpatioTemporal) == "spatiotemporal");
  CHECK_THROWS_AS(split_strategy_from_string("kfold"), ValidationError);
}

TEST_CASE("find_sweet_spot applies the diminishing returns rule") {
  CHECK_THROWS_AS(find_sweet_spot({}, 0.005), ValidationError);

  SweetSpot spot = find_sweet_spot({0.9}, 0.005);
  CHECK(spot.k == 1);
  CHECK(spot.fallback);

  // First step below the threshold wins even if later steps are large again.
  spot = find_sweet_spot({0.50, 0.60, 0.605, 0.70}, 0.01);
  CHECK(spot.k == 2);
  CHECK_FALSE(spot.fallback);

  // Monotone strong growth never dips below the threshold.
  spot = find_sweet_spot({0.5, 0.6, 0.7, 0.8}, 0.005);
  CHECK(spot.k == 4);
  CHECK(spot.fallback);

  // Published single-index ladder: the very first marginal step is tiny.
  const std::vector<double> ladder{0.9626, 0.9655, 0.9641, 0.9655, 0.9698,
                                   0.9698, 0.9756, 0.9770, 0.9770, 0.9770};
  spot = find_sweet_spot(ladder, 0.005);
  CHECK(spot.k == 1);
  CHECK_FALSE(spot.fallback);
}

TEST_CASE("random stratified split holds out the configured fraction per class") {
  const SampleTable table = small_scene(200, 8, 5);
  SplitSpec spec;
  spec.test_fraction = 0.30;
  spec.seed = 17;

  const SplitResult result = split(table, spec, "weed", "crop");
  CHECK(result.warnings.empty());
  REQUIRE(result.folds.size() == 1);
  const Fold& fold = result.folds.front();
  CHECK(fold.name == "random");
  check_partition(fold, table.size());

  Index test_weed = 0;
  Index test_crop = 0;
  for (const Index i : fold.test) {
    (table.labels[static_cast<std::size_t>(i)] == "weed" ? test_weed : test_crop)++;
  }
  // 100 rows per class, llround(0.3 * 100) = 30 held out from each.
  CHECK(test_weed == 30);
  CHECK(test_crop == 30);

  const SplitResult again = split(table, spec, "weed", "crop");
  CHECK(again.folds.front().test == fold.test);

  spec.seed = 18;
  const SplitResult other = split(table, spec, "weed", "crop");
  CHECK(other.folds.front().test != fold.test);
}

TEST_CASE("random stratified split validates its inputs") {
  const SampleTable table = small_scene(40, 8, 5);
  SplitSpec spec;

  spec.test_fraction = 0.0;
  CHECK_THROWS_WITH_AS(split(table, spec, "weed", "crop"),
                       doctest::Contains("test_fraction"), ValidationError);
  spec.test_fraction = 1.0;
  CHECK_THROWS_AS(split(table, spec, "weed", "crop"), ValidationError);

  SampleTable lopsided = table;
  for (std::size_t i = 0; i < lopsided.labels.size(); ++i) {
    if (i != 0) lopsided.labels[i] = "weed";
  }
  spec.test_fraction = 0.3;
  CHECK_THROWS_WITH_AS(split(lopsided, spec, "weed", "crop"),
                       doctest::Contains("needs at least 2 samples"), ValidationError);
}

TEST_CASE("year strategy yields one fold per distinct year") {
  const SampleTable table = small_scene(120, 8, 5);
  SplitSpec spec;
  spec.strategy = SplitStrategy::YearHeldOut;

  const SplitResult result = split(table, spec, "weed", "crop");
  REQUIRE(result.folds.size() == 3);
  CHECK(result.folds[0].name == "year=2022");
  CHECK(result.folds[1].name == "year=2023");
  CHECK(result.folds[2].name == "year=2024");
  for (const Fold& fold : result.folds) {
    check_partition(fold, table.size());
    CHECK(static_cast<Index>(fold.test.size()) == 40);
    const int held = table.years[static_cast<std::size_t>(fold.test.front())];
    for (const Index i : fold.test) {
      CHECK(table.years[static_cast<std::size_t>(i)] == held);
    }
    for (const Index i : fold.train) {
      CHECK(table.years[static_cast<std::size_t>(i)] != held);
    }
  }

  SampleTable unyeared = table;
  unyeared.years.clear();
  CHECK_THROWS_WITH_AS(split(unyeared, spec, "weed", "crop"),
                       doctest::Contains("year column required"), SchemaError);
}

TEST_CASE("folds whose training side lacks a class are dropped with a warning") {
  // Year 1 has both classes, year 2 only the positive one. Holding out year 1
  // leaves a single-class training side, so that fold must go.
  SampleTable table;
  table.band_names = {"B1", "B2"};
  table.bands = Matrix::Random(6, 2).cwiseAbs();
  table.labels = {"weed", "crop", "weed", "weed", "weed", "crop"};
  table.years = {1, 1, 2, 2, 1, 1};

  SplitSpec spec;
  spec.strategy = SplitStrategy::YearHeldOut;
  const SplitResult result = split(table, spec, "weed", "crop");

  REQUIRE(result.folds.size() == 1);
  CHECK(result.folds.front().name == "year=2");
  REQUIRE(result.warnings.size() == 1);
  CHECK(result.warnings.front() ==
        "dropped fold 'year=1': training side lacks class 'crop'");
}

TEST_CASE("spatial strategy makes one fold per occupied grid cell") {
  // Three occupied cells of a 2x2 grid; the north-east quadrant stays empty.
  SampleTable table;
  table.band_names = {"B1"};
  table.bands = Matrix::Constant(12, 1, 0.2);
  for (int i = 0; i < 12; ++i) {
    table.labels.push_back(i % 2 == 0 ? "weed" : "crop");
  }
  const double xs[] = {0.1, 0.15, 0.12, 0.17, 0.9, 0.85, 0.88, 0.83, 0.1, 0.14, 0.11, 0.16};
  const double ys[] = {0.1, 0.12, 0.15, 0.11, 0.1, 0.14, 0.12, 0.16, 0.9, 0.85, 0.88, 0.83};
  table.x.assign(xs, xs + 12);
  table.y.assign(ys, ys + 12);

  SplitSpec spec;
  spec.strategy = SplitStrategy::SpatialBlock;
  spec.grid_rows = 2;
  spec.grid_cols = 2;
  const SplitResult result = split(table, spec, "weed", "crop");

  REQUIRE(result.folds.size() == 3);
  CHECK(result.folds[0].name == "block=0,0");
  CHECK(result.folds[1].name == "block=0,1");
  CHECK(result.folds[2].name == "block=1,0");
  for (const Fold& fold : result.folds) {
    check_partition(fold, table.size());
    CHECK(fold.test.size() == 4);
  }

  SampleTable no_coords = table;
  no_coords.x.clear();
  no_coords.y.clear();
  CHECK_THROWS_WITH_AS(split(no_coords, spec, "weed", "crop"),
                       doctest::Contains("coordinates required"), SchemaError);

  spec.grid_rows = 0;
  CHECK_THROWS_AS(split(table, spec, "weed", "crop"), ValidationError);
}

TEST_CASE("spatio-temporal strategy crosses years with quadrants") {
  const SampleTable table = small_scene(240, 8, 5);
  SplitSpec spec;
  spec.strategy = SplitStrategy::SpatioTemporal;

  const SplitResult result = split(table, spec, "weed", "crop");
  REQUIRE(result.folds.size() == 12);
  std::set<std::string> names;
  Index covered = 0;
  for (const Fold& fold : result.folds) {
    check_partition(fold, table.size());
    names.insert(fold.name);
    covered += static_cast<Index>(fold.test.size());
    CHECK(fold.name.rfind("year=20", 0) == 0);
    CHECK(fold.name.find(",quadrant=") != std::string::npos);
  }
  CHECK(names.size() == 12);
  // Test sides cover the whole table: every row is held out exactly once.
  CHECK(covered == table.size());

  SampleTable no_years = table;
  no_years.years.clear();
  CHECK_THROWS_AS(split(no_years, spec, "weed", "crop"), SchemaError);
  SampleTable no_coords = table;
  no_coords.x.clear();
  no_coords.y.clear();
  CHECK_THROWS_AS(split(no_coords, spec, "weed", "crop"), SchemaError);
}

TEST_CASE("sweep ties go to the earlier method and k is capped at the width") {
  // Column 0 mirrors the label exactly; column 1 is unrelated jitter. Every
  // method finds the same answer, so each k is a tie.
  const Index n = 12;
  Matrix train(n, 2);
  Labels train_y(n);
  Matrix test(6, 2);
  Labels test_y(6);
  const double noise[] = {0.3, -0.2, 0.5, 0.1, -0.4, 0.2, -0.1, 0.4, -0.3, 0.0, 0.25, -0.15};
  for (Index i = 0; i < n; ++i) {
    train_y[i] = i % 2 == 0 ? 1 : -1;
    train(i, 0) = static_cast<double>(train_y[i]);
    train(i, 1) = noise[i];
  }
  for (Index i = 0; i < 6; ++i) {
    test_y[i] = i % 2 == 0 ? 1 : -1;
    test(i, 0) = static_cast<double>(test_y[i]);
    test(i, 1) = noise[i + 3];
  }

  SweepOptions options;
  options.k_max = 5;
  const SweepReport report = sweep(train, train_y, test, test_y, options);

  REQUIRE(report.records.size() == 2);  // capped at the two available columns
  for (const SweepRecord& record : report.records) {
    REQUIRE(record.method_accuracies.size() == 2);
    CHECK(record.method_accuracies[0] == 1.0);
    CHECK(record.method_accuracies[1] == 1.0);
    CHECK(record.winner == SelectionMethod::SelectKBest);
    CHECK(record.test_accuracy == 1.0);
    CHECK(record.train_accuracy == 1.0);
    CHECK(record.gap == 0.0);
  }
  CHECK(report.records[0].selected == std::vector<Index>{0});
  CHECK(report.k_star == 1);
  CHECK_FALSE(report.k_star_fallback);
  REQUIRE(report.marginal_improvements.size() == 1);
  CHECK(report.marginal_improvements[0] == 0.0);

  // Same data, reversed preference order: the tie now goes the other way.
  options.methods = {SelectionMethod::Rfe, SelectionMethod::SelectKBest};
  const SweepReport reversed = sweep(train, train_y, test, test_y, options);
  CHECK(reversed.records[0].winner == SelectionMethod::Rfe);

  // The sparse selector participates through the same interface.
  options.methods = {SelectionMethod::L1Svm};
  const SweepReport sparse = sweep(train, train_y, test, test_y, options);
  CHECK(sparse.records[0].selected == std::vector<Index>{0});
  CHECK(sparse.records[0].test_accuracy == 1.0);

  const std::string text = format_sweep_table(report);
  CHECK(text.find("select_k_best") != std::string::npos);
  CHECK(text.find("winner") != std::string::npos);
  CHECK(text.find("k* = 1 (epsilon = 0.0050)") != std::string::npos);
}

TEST_CASE("sweep validates its inputs") {
  Matrix train = Matrix::Random(8, 3);
  Labels labels(8);
  for (Index i = 0; i < 8; ++i) labels[i] = i % 2 == 0 ? 1 : -1;

  SweepOptions options;
  options.k_max = 0;
  CHECK_THROWS_AS(sweep(train, labels, train, labels, options), ValidationError);

  options = SweepOptions{};
  options.methods.clear();
  CHECK_THROWS_AS(sweep(train, labels, train, labels, options), ValidationError);

  options = SweepOptions{};
  Matrix narrow = Matrix::Random(8, 2);
  CHECK_THROWS_AS(sweep(train, labels, narrow, labels, options), DimensionError);

  Labels short_labels(4);
  for (Index i = 0; i < 4; ++i) short_labels[i] = i % 2 == 0 ? 1 : -1;
  CHECK_THROWS_AS(sweep(train, short_labels, train, labels, options), DimensionError);
}

TEST_CASE("discover recovers the planted product end to end") {
  const SampleTable table = small_scene(300, 8, 11);
  const DiscoveryConfig config = small_config(11);

  const DiscoveryResult result = discover(table, config);

  CHECK(result.fold_name == "random");
  CHECK(result.warnings.empty());
  CHECK_NOTHROW(result.model.validate());
  CHECK(result.model.band_count == 8);
  CHECK(static_cast<Index>(result.model.descriptors.size()) == result.report.k_star);
  CHECK(result.test_accuracy >= 0.90);
  CHECK_FALSE(result.validation_accuracy.has_value());

  // The planted product is among the kept descriptors.
  bool found = false;
  for (const FeatureDescriptor& d : result.model.descriptors) {
    if (descriptor_name(d) == "ND(4,5)*ND(7,8)") found = true;
  }
  CHECK(found);

  // Final evaluation covers exactly the held-out rows: 45 per class.
  const ConfusionMatrix& cm = result.evaluation.cm;
  CHECK(cm.tp + cm.fn + cm.fp + cm.tn == 90);
  CHECK(result.test_accuracy == *result.evaluation.metrics.accuracy);

  CHECK(result.model.provenance.k == result.report.k_star);
  CHECK(result.model.provenance.seed == 11);
  CHECK(result.model.provenance.data_fingerprint == table_fingerprint(table));
  CHECK((result.model.provenance.selection_method == "select_k_best" ||
         result.model.provenance.selection_method == "rfe"));
}

TEST_CASE("discover is deterministic for a fixed config") {
  const SampleTable table = small_scene(200, 8, 13);
  const DiscoveryConfig config = small_config(13);

  const DiscoveryResult first = discover(table, config);
  const DiscoveryResult second = discover(table, config);
  CHECK(model_to_json(first.model) == model_to_json(second.model));
  CHECK(discovery_result_to_json(first) == discovery_result_to_json(second));

  DiscoveryConfig reseeded = config;
  reseeded.seed = 14;
  const DiscoveryResult third = discover(table, reseeded);
  CHECK(third.model.provenance.seed == 14);
}

TEST_CASE("validation fraction carves a selection holdout from the test side") {
  const SampleTable table = small_scene(300, 8, 11);
  DiscoveryConfig config = small_config(11);
  config.validation_fraction = 0.5;

  const DiscoveryResult result = discover(table, config);
  REQUIRE(result.validation_accuracy.has_value());

  // Test side is 45 + 45; half of each class goes to validation, the final
  // evaluation runs on the 44 untouched rows.
  const ConfusionMatrix& cm = result.evaluation.cm;
  CHECK(cm.tp + cm.fn + cm.fp + cm.tn == 44);
  CHECK(*result.validation_accuracy >= 0.5);

  const std::string json = discovery_result_to_json(result);
  CHECK(json.find("\"validation_accuracy\": null") == std::string::npos);
}

TEST_CASE("discover rejects unusable inputs with stage context") {
  const SampleTable table = small_scene(60, 8, 3);

  DiscoveryConfig config = small_config(3);
  config.fold_index = 5;
  CHECK_THROWS_WITH_AS(discover(table, config),
                       doctest::Contains("fold_index 5 out of range"), ValidationError);

  config = small_config(3);
  config.split.strategy = SplitStrategy::YearHeldOut;
  SampleTable unyeared = table;
  unyeared.years.clear();
  CHECK_THROWS_WITH_AS(discover(unyeared, config),
                       doctest::Contains("year column required"), SchemaError);

  SampleTable single = table;
  for (std::string& label : single.labels) label = "weed";
  config = small_config(3);
  CHECK_THROWS_WITH_AS(discover(single, config), doctest::Contains("single class"),
                       ValidationError);

  config = small_config(3);
  config.schema.positive_label.clear();
  CHECK_THROWS_AS(discover(table, config), ValidationError);
}

TEST_CASE("cross validation aggregates per fold discovery") {
  const SampleTable table = small_scene(180, 8, 19);
  DiscoveryConfig config = small_config(19);
  config.split.strategy = SplitStrategy::YearHeldOut;

  const CrossValidationReport report = cross_validate(table, config);
  REQUIRE(report.folds.size() == 3);
  CHECK(report.folds[0].fold_name == "year=2022");
  CHECK(report.folds[2].fold_name == "year=2024");

  double mean = 0.0;
  double low = 1.0;
  for (const FoldOutcome& outcome : report.folds) {
    CHECK(outcome.k_star >= 1);
    CHECK_FALSE(outcome.descriptors.empty());
    mean += outcome.test_accuracy;
    low = std::min(low, outcome.test_accuracy);
  }
  mean /= static_cast<double>(report.folds.size());
  double variance = 0.0;
  for (const FoldOutcome& outcome : report.folds) {
    variance += (outcome.test_accuracy - mean) * (outcome.test_accuracy - mean);
  }
  variance /= static_cast<double>(report.folds.size());

  CHECK(report.mean_accuracy == doctest::Approx(mean).epsilon(1e-12));
  CHECK(report.std_accuracy == doctest::Approx(std::sqrt(variance)).epsilon(1e-12));
  CHECK(report.min_accuracy == doctest::Approx(low).epsilon(1e-12));

  const std::string json = cross_validation_to_json(report);
  CHECK(json.find("\"mean_accuracy\"") != std::string::npos);
  const std::string text = format_cross_validation(report);
  CHECK(text.find("over 3 folds") != std::string::npos);
}

TEST_CASE("discovery config json round trips every field") {
  DiscoveryConfig config;
  config.data_path = "plots.csv";
  config.schema.band_columns = {"B1", "B2", "B3"};
  config.schema.label_column = "class";
  config.schema.year_column = "season";
  config.schema.x_column = "east";
  config.schema.y_column = "north";
  config.schema.positive_label = "weed";
  config.schema.negative_label = "crop";
  config.schema.negative_policy = NegativePolicy::Clamp;
  config.schema.scale_factor = 10000.0;
  config.schema.max_reflectance = 1.2;
  config.degree = 1;
  config.nd_epsilon = 1e-8;
  config.split.strategy = SplitStrategy::SpatialBlock;
  config.split.test_fraction = 0.25;
  config.split.grid_rows = 4;
  config.split.grid_cols = 2;
  config.sweep.k_max = 6;
  config.sweep.epsilon = 0.01;
  config.sweep.methods = {SelectionMethod::Rfe, SelectionMethod::L1Svm};
  config.sweep.svm.c = 2.5;
  config.sweep.svm.tol = 1e-5;
  config.sweep.svm.max_epochs = 800;
  config.sweep.rfe_step = 16;
  config.fold_index = 1;
  config.validation_fraction = 0.2;
  config.seed = 99;

  const DiscoveryConfig back = discovery_config_from_json(discovery_config_to_json(config));
  CHECK(back.data_path == config.data_path);
  CHECK(back.schema.band_columns == config.schema.band_columns);
  CHECK(back.schema.label_column == "class");
  CHECK(back.schema.year_column == "season");
  CHECK(back.schema.x_column == "east");
  CHECK(back.schema.y_column == "north");
  CHECK(back.schema.positive_label == "weed");
  CHECK(back.schema.negative_policy == NegativePolicy::Clamp);
  CHECK(back.schema.scale_factor == 10000.0);
  CHECK(back.schema.max_reflectance == 1.2);
  CHECK(back.degree == 1);
  CHECK(back.nd_epsilon == 1e-8);
  CHECK(back.split.strategy == SplitStrategy::SpatialBlock);
  CHECK(back.split.test_fraction == 0.25);
  CHECK(back.split.grid_rows == 4);
  CHECK(back.split.grid_cols == 2);
  CHECK(back.sweep.k_max == 6);
  CHECK(back.sweep.epsilon == 0.01);
  REQUIRE(back.sweep.methods.size() == 2);
  CHECK(back.sweep.methods[0] == SelectionMethod::Rfe);
  CHECK(back.sweep.methods[1] == SelectionMethod::L1Svm);
  CHECK(back.sweep.svm.c == 2.5);
  CHECK(back.sweep.svm.tol == 1e-5);
  CHECK(back.sweep.svm.max_epochs == 800);
  CHECK(back.sweep.rfe_step == 16);
  CHECK(back.fold_index == 1);
  CHECK(back.validation_fraction == 0.2);
  CHECK(back.seed == 99);
}

TEST_CASE("config parsing applies documented defaults and rejects bad values") {
  const DiscoveryConfig config = discovery_config_from_json("{}");
  CHECK(config.degree == 2);
  CHECK(config.nd_epsilon == kDefaultEpsilon);
  CHECK(config.split.strategy == SplitStrategy::RandomStratified);
  CHECK(config.split.test_fraction == 0.30);
  CHECK(config.sweep.k_max == 10);
  CHECK(config.sweep.epsilon == 0.005);
  REQUIRE(config.sweep.methods.size() == 2);
  CHECK(config.sweep.methods[0] == SelectionMethod::SelectKBest);
  CHECK(config.sweep.methods[1] == SelectionMethod::Rfe);
  CHECK(config.sweep.svm.c == 1.0);
  CHECK(config.sweep.rfe_step == 64);
  CHECK(config.validation_fraction == 0.0);
  CHECK(config.seed == 42);

  CHECK_THROWS_AS(discovery_config_from_json("not json"), SchemaError);
  CHECK_THROWS_AS(discovery_config_from_json("[1,2]"), SchemaError);
  CHECK_THROWS_AS(discovery_config_from_json(R"({"degree": 3})"), ValidationError);
  CHECK_THROWS_AS(discovery_config_from_json(R"({"sweep": {"k_max": 0}})"), ValidationError);
  CHECK_THROWS_AS(discovery_config_from_json(R"({"validation_fraction": 1.0})"),
                  ValidationError);
  CHECK_THROWS_AS(discovery_config_from_json(R"({"nd_epsilon": 0.0})"), ValidationError);
  CHECK_THROWS_AS(discovery_config_from_json(R"({"sweep": {"methods": []}})"),
                  ValidationError);
  CHECK_THROWS_AS(discovery_config_from_json(R"({"split": {"strategy": "kfold"}})"),
                  ValidationError);
}

TEST_CASE("schema block parses standalone") {
  const SampleSchema schema = sample_schema_from_json(
      R"({"bands": ["B1", "B2"], "positive_label": "weed", "negative_label": "crop",
          "negative_policy": "clamp", "scale_factor": 100.0})");
  CHECK(schema.band_columns == std::vector<std::string>{"B1", "B2"});
  CHECK(schema.label_column == "label");  // default
  CHECK(schema.negative_policy == NegativePolicy::Clamp);
  CHECK(schema.scale_factor == 100.0);
  CHECK(schema.max_reflectance == 1.5);

  CHECK_THROWS_AS(sample_schema_from_json("nope"), SchemaError);
  CHECK_THROWS_AS(sample_schema_from_json("[]"), SchemaError);
  CHECK_THROWS_WITH_AS(sample_schema_from_json(R"({"negative_policy": "ignore"})"),
                       doctest::Contains("unknown negative_policy"), SchemaError);
}
