#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "ndpoly/svm.hpp"
#include "support/svm_instances.hpp"

#include "fixtures/svm_oracle_values.inc"

using namespace ndpoly;
using testsupport::oracle_instances;
using testsupport::unit_draw;

TEST_CASE("fit_standardization uses population moments") {
  Matrix x(4, 2);
  x << 1.0, 10.0, 2.0, 10.0, 3.0, 10.0, 4.0, 10.0;
  const Standardization std = fit_standardization(x);
  CHECK(std.means[0] == doctest::Approx(2.5));
  // population std of {1,2,3,4}: sqrt(1.25)
  CHECK(std.stds[0] == doctest::Approx(std::sqrt(1.25)));
  // constant column passes through with unit scale
  CHECK(std.means[1] == doctest::Approx(10.0));
  CHECK(std.stds[1] == 1.0);

  const Matrix z = std.apply(x);
  CHECK(z.col(0).mean() == doctest::Approx(0.0));
  CHECK(z.col(0).array().square().mean() == doctest::Approx(1.0));
  CHECK(z(0, 1) == 0.0);

  Matrix one_row(1, 2);
  one_row.setZero();
  CHECK_THROWS_AS(fit_standardization(one_row), ValidationError);

  Matrix wrong(4, 3);
  wrong.setZero();
  CHECK_THROWS_AS(std.apply(wrong), DimensionError);
}

TEST_CASE("train_linear_svm validates inputs") {
  Matrix x(4, 1);
  x << 1.0, 2.0, -1.0, -2.0;
  Labels y(4);
  y << 1, 1, -1, -1;

  Labels bad_values(4);
  bad_values << 1, 0, -1, -1;
  CHECK_THROWS_AS(train_linear_svm(x, bad_values), ValidationError);

  Labels one_class(4);
  one_class << 1, 1, 1, 1;
  CHECK_THROWS_AS(train_linear_svm(x, one_class), ValidationError);

  Labels short_labels(3);
  short_labels << 1, 1, -1;
  CHECK_THROWS_AS(train_linear_svm(x, short_labels), DimensionError);

  SvmOptions bad_c;
  bad_c.c = 0.0;
  CHECK_THROWS_AS(train_linear_svm(x, y, bad_c), ValidationError);

  Matrix non_finite = x;
  non_finite(0, 0) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(train_linear_svm(non_finite, y), ValidationError);
}

TEST_CASE("two-point analytic solution") {
  Matrix x(2, 1);
  x << 1.0, -1.0;
  Labels y(2);
  y << 1, -1;
  SvmOptions options;
  options.c = 1.0;
  options.tol = 1e-8;
  const LinearModel model = train_linear_svm(x, y, options);
  CHECK(model.converged);
  CHECK(model.weights[0] == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(model.bias == doctest::Approx(0.0).epsilon(1e-3));
}

TEST_CASE("L2 objective matches the offline convex reference") {
  const auto instances = oracle_instances();
  REQUIRE(instances.size() == 25);
  // spot-check a spread here; the acceptance gate runs all 25
  for (const std::size_t t : {0, 7, 16, 24}) {
    SvmOptions options;
    options.c = instances[t].c;
    options.tol = 1e-6;
    options.max_epochs = 100000;
    const LinearModel model =
        train_linear_svm(instances[t].features, instances[t].labels, options);
    const double oracle = kSvmOracleObjectives[t];
    CHECK(std::abs(model.objective - oracle) <= 1e-4 * (1.0 + std::abs(oracle)));
  }
}

TEST_CASE("L2 dual objective is non-increasing and KKT holds at convergence") {
  const auto instances = oracle_instances();
  SvmOptions options;
  options.c = instances[2].c;
  const LinearModel model =
      train_linear_svm(instances[2].features, instances[2].labels, options);
  REQUIRE(model.converged);
  REQUIRE(model.epoch_objectives.size() >= 2);
  for (std::size_t e = 1; e < model.epoch_objectives.size(); ++e) {
    CHECK(model.epoch_objectives[e] <= model.epoch_objectives[e - 1] + 1e-12);
  }
  CHECK(model.max_projected_gradient <= options.tol);
  CHECK(model.epochs >= 1);
}

TEST_CASE("training is deterministic per seed") {
  const auto instances = oracle_instances();
  SvmOptions options;
  options.c = 1.0;
  options.seed = 77;
  const LinearModel a = train_linear_svm(instances[3].features, instances[3].labels, options);
  const LinearModel b = train_linear_svm(instances[3].features, instances[3].labels, options);
  CHECK(a.bias == b.bias);
  CHECK((a.weights - b.weights).cwiseAbs().maxCoeff() == 0.0);
  CHECK(a.epoch_objectives == b.epoch_objectives);
}

TEST_CASE("L1 training produces sparse weights on redundant features") {
  // one informative column, three exact copies of noise
  std::mt19937_64 rng(5);
  const Index n = 120;
  Matrix x(n, 4);
  Labels y(n);
  for (Index i = 0; i < n; ++i) {
    const int label = (i % 2 == 0) ? 1 : -1;
    y[i] = label;
    x(i, 0) = label * (0.8 + 0.4 * unit_draw(rng));
    x(i, 1) = 2.0 * unit_draw(rng) - 1.0;
    x(i, 2) = 2.0 * unit_draw(rng) - 1.0;
    x(i, 3) = 2.0 * unit_draw(rng) - 1.0;
  }
  SvmOptions options;
  options.regularization = Regularization::L1;
  options.c = 0.5;
  const LinearModel model = train_linear_svm(x, y, options);
  CHECK(model.regularization == Regularization::L1);
  CHECK(std::abs(model.weights[0]) > 1e-3);
  for (Index j = 1; j < 4; ++j) {
    CHECK(std::abs(model.weights[j]) < 0.05);
  }
  // stronger penalty shrinks the L1 norm
  SvmOptions weaker = options;
  weaker.c = 0.05;
  const LinearModel sparser = train_linear_svm(x, y, weaker);
  CHECK(sparser.weights.lpNorm<1>() <= model.weights.lpNorm<1>() + 1e-9);
}

TEST_CASE("L1 epoch objectives are primal and non-increasing") {
  const auto instances = oracle_instances();
  SvmOptions options;
  options.regularization = Regularization::L1;
  options.c = 1.0;
  const LinearModel model =
      train_linear_svm(instances[0].features, instances[0].labels, options);
  REQUIRE(!model.epoch_objectives.empty());
  for (std::size_t e = 1; e < model.epoch_objectives.size(); ++e) {
    CHECK(model.epoch_objectives[e] <= model.epoch_objectives[e - 1] + 1e-9);
  }
  CHECK(model.objective == doctest::Approx(model.epoch_objectives.back()));
}

TEST_CASE("decision function evaluates bias plus dot product") {
  LinearModel model;
  model.bias = 0.5;
  model.weights = Vector(2);
  model.weights << 1.0, -2.0;
  Vector x(2);
  x << 3.0, 1.0;
  CHECK(model.decision(x) == doctest::Approx(0.5 + 3.0 - 2.0));
}

TEST_CASE("absorb_standardization reproduces standardized decisions in raw space") {
  const auto instances = oracle_instances();
  const Matrix& x = instances[9].features;
  const Labels& y = instances[9].labels;

  const Standardization std = fit_standardization(x);
  const Matrix z = std.apply(x);
  SvmOptions options;
  options.c = instances[9].c;
  const LinearModel model = train_linear_svm(z, y, options);
  const AbsorbedModel absorbed = absorb_standardization(model, std);

  std::mt19937_64 rng(31);
  for (int t = 0; t < 1000; ++t) {
    Vector raw(x.cols());
    for (Index j = 0; j < x.cols(); ++j) raw[j] = 4.0 * unit_draw(rng) - 2.0;
    const Vector standardized = ((raw - std.means).array() / std.stds.array()).matrix();
    const double f_std = model.decision(standardized);
    const double f_raw = absorbed.decision(raw);
    CHECK(std::abs(f_std - f_raw) <= 1e-9 * (1.0 + std::abs(f_std)));
  }
}

TEST_CASE("absorb_standardization validates lengths") {
  LinearModel model;
  model.weights = Vector::Ones(3);
  Standardization std;
  std.means = Vector::Zero(2);
  std.stds = Vector::Ones(2);
  CHECK_THROWS_AS(absorb_standardization(model, std), DimensionError);
}
