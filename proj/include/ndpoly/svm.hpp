#pragma once

#include <cstdint>
#include <vector>

#include "ndpoly/spectral.hpp"
#include "ndpoly/types.hpp"

namespace ndpoly {

/// Per-feature training-set mean and standard deviation (population
/// convention, divide by N). A std below 1e-12 is replaced by 1 so constant
/// columns pass through unscaled.
struct Standardization {
  Vector means;
  Vector stds;

  Matrix apply(const Eigen::Ref<const Matrix>& features) const;
};

Standardization fit_standardization(const Eigen::Ref<const Matrix>& features);

enum class Regularization { L2, L1 };

struct SvmOptions {
  double c = 1.0;
  Regularization regularization = Regularization::L2;
  std::uint64_t seed = 42;
  double tol = 1e-4;
  int max_epochs = 5000;
  double hinge_smoothing = 1e-4;  // L1 path only
};

/// Linear classifier in standardized-feature space.
///
/// For L2 the reported `objective` is the primal value
///   0.5 * (|w|^2 + bias^2) + c * sum_i max(0, 1 - y_i f(x_i)),
/// the quantity the dual coordinate descent solver optimizes (the bias rides
/// along as an implicit all-ones feature and is regularized with the
/// weights). `epoch_objectives` holds the solver's descent objective per
/// epoch: the dual objective for L2; for L1 the primal at the operating
/// smoothing width, traced over the final annealing stage.
struct LinearModel {
  double bias = 0.0;
  Vector weights;
  Regularization regularization = Regularization::L2;
  double c = 1.0;
  bool converged = false;
  double objective = 0.0;
  int epochs = 0;
  double max_projected_gradient = 0.0;  // KKT residual at exit (L2)
  std::vector<double> epoch_objectives;

  double decision(const Eigen::Ref<const Vector>& x) const { return bias + weights.dot(x); }
};

/// Trains a linear hinge-loss classifier on standardized features.
///
/// L2: dual coordinate descent with shrinking; stops when the projected
/// gradient over a full pass is within `tol`. L1: coordinate descent with
/// Newton steps and soft thresholding on the smoothed-hinge objective
///   |w|_1 + c * sum_i loss_gamma(y_i f(x_i)),  gamma = hinge_smoothing,
/// bias unpenalized; gamma is annealed down a geometric ladder to its
/// configured value with warm starts. The final stage stops when the
/// optimality violation drops below tol * (initial violation), or when ten
/// consecutive epochs improve the objective by less than
/// tol * max(1, |objective|), whichever happens first; the latter catches
/// the near-piecewise-linear regime where coordinate transfers between
/// correlated columns slow to one smoothing width per epoch without ever
/// changing the support. Deterministic for a fixed seed.
LinearModel train_linear_svm(const Eigen::Ref<const Matrix>& features,
                             const Eigen::Ref<const Labels>& labels,
                             const SvmOptions& options = {});

/// Raw-space coefficients with the standardization folded in:
/// w~_j = w_j / sigma_j, w~_0 = w_0 - sum_j w_j mu_j / sigma_j.
struct AbsorbedModel {
  double bias = 0.0;
  Vector weights;
  std::vector<FeatureDescriptor> descriptors;  // may be empty when unknown

  double decision(const Eigen::Ref<const Vector>& raw_features) const {
    return bias + weights.dot(raw_features);
  }
};

AbsorbedModel absorb_standardization(const LinearModel& model, const Standardization& std,
                                     std::vector<FeatureDescriptor> descriptors = {});

}  // namespace ndpoly
