#include "ndpoly/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

namespace ndpoly {

Matrix Standardization::apply(const Eigen::Ref<const Matrix>& features) const {
  if (features.cols() != means.size()) {
    throw DimensionError("Standardization::apply: expected " + std::to_string(means.size()) +
                         " columns, got " + std::to_string(features.cols()));
  }
  return (features.rowwise() - means.transpose()).array().rowwise() /
         stds.transpose().array();
}

Standardization fit_standardization(const Eigen::Ref<const Matrix>& features) {
  if (features.rows() < 2) {
    throw ValidationError("fit_standardization: need at least 2 rows");
  }
  Standardization std;
  std.means = features.colwise().mean();
  Vector variance =
      (features.rowwise() - std.means.transpose()).array().square().colwise().mean();
  std.stds = variance.array().sqrt();
  for (Index j = 0; j < std.stds.size(); ++j) {
    if (std.stds[j] < 1e-12) {
      std.stds[j] = 1.0;  // constant column passes through unscaled
    }
  }
  return std;
}

namespace {

void validate_training_input(const Eigen::Ref<const Matrix>& features,
                             const Eigen::Ref<const Labels>& labels) {
  if (features.rows() != labels.size()) {
    throw DimensionError("train_linear_svm: feature rows and label count differ");
  }
  if (!features.allFinite()) {
    throw ValidationError("train_linear_svm: non-finite feature values");
  }
  int positives = 0;
  int negatives = 0;
  for (Index i = 0; i < labels.size(); ++i) {
    if (labels[i] == 1) {
      ++positives;
    } else if (labels[i] == -1) {
      ++negatives;
    } else {
      throw ValidationError("train_linear_svm: labels must be +1/-1, got " +
                            std::to_string(labels[i]));
    }
  }
  if (positives == 0 || negatives == 0) {
    throw ValidationError("train_linear_svm: both classes must be present");
  }
}

// Dual coordinate descent for the hinge-loss linear SVM
//
//   min_alpha  0.5 * alpha^T Q alpha - e^T alpha,  0 <= alpha_i <= C,
//
// with Q_ij = y_i y_j x_i^T x_j over bias-augmented rows (a constant 1 is
// appended to every sample, so the bias is trained and regularized with the
// weights). Shrinking and the projected-gradient stopping rule follow the
// standard formulation for this solver.
LinearModel train_l2(const Eigen::Ref<const Matrix>& features,
                     const Eigen::Ref<const Labels>& labels, const SvmOptions& options) {
  const Index n = features.rows();
  const Index k = features.cols();
  const double upper = options.c;

  // Column-per-sample layout keeps the inner dot products contiguous.
  Matrix samples = features.transpose();

  Vector w = Vector::Zero(k);
  double w0 = 0.0;
  Vector alpha = Vector::Zero(n);
  Vector qd(n);
  for (Index i = 0; i < n; ++i) {
    qd[i] = samples.col(i).squaredNorm() + 1.0;
  }

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::mt19937_64 rng(options.seed);

  const double inf = std::numeric_limits<double>::infinity();
  double pg_max_old = inf;
  double pg_min_old = -inf;
  Index active = n;

  // Largest projected-gradient magnitude over every sample at the current
  // iterate. The per-epoch extrema are computed before the in-epoch updates,
  // so this is the authoritative check.
  auto kkt_residual = [&]() {
    double residual = 0.0;
    for (Index i = 0; i < n; ++i) {
      const double g = labels[i] * (w.dot(samples.col(i)) + w0) - 1.0;
      double pg = g;
      if (alpha[i] == 0.0) {
        pg = std::min(g, 0.0);
      } else if (alpha[i] == upper) {
        pg = std::max(g, 0.0);
      }
      residual = std::max(residual, std::abs(pg));
    }
    return residual;
  };

  LinearModel model;
  model.regularization = Regularization::L2;
  model.c = options.c;
  model.epoch_objectives.reserve(64);

  int epoch = 0;
  for (; epoch < options.max_epochs; ++epoch) {
    double pg_max = -inf;
    double pg_min = inf;

    for (Index s = 0; s + 1 < active; ++s) {
      const Index r = s + static_cast<Index>(rng() % static_cast<std::uint64_t>(active - s));
      std::swap(order[static_cast<std::size_t>(s)], order[static_cast<std::size_t>(r)]);
    }

    for (Index s = 0; s < active; ++s) {
      const Index i = order[static_cast<std::size_t>(s)];
      const double yi = labels[i];
      const double g = yi * (w.dot(samples.col(i)) + w0) - 1.0;

      double pg = g;
      if (alpha[i] == 0.0) {
        if (g > pg_max_old) {
          --active;
          std::swap(order[static_cast<std::size_t>(s)], order[static_cast<std::size_t>(active)]);
          --s;
          continue;
        }
        pg = std::min(g, 0.0);
      } else if (alpha[i] == upper) {
        if (g < pg_min_old) {
          --active;
          std::swap(order[static_cast<std::size_t>(s)], order[static_cast<std::size_t>(active)]);
          --s;
          continue;
        }
        pg = std::max(g, 0.0);
      }

      pg_max = std::max(pg_max, pg);
      pg_min = std::min(pg_min, pg);

      if (std::abs(pg) > 1e-12) {
        const double alpha_old = alpha[i];
        alpha[i] = std::clamp(alpha_old - g / qd[i], 0.0, upper);
        const double delta = (alpha[i] - alpha_old) * yi;
        w += delta * samples.col(i);
        w0 += delta;
      }
    }

    // Dual objective; each coordinate update minimizes it exactly, so the
    // recorded sequence is non-increasing.
    model.epoch_objectives.push_back(0.5 * (w.squaredNorm() + w0 * w0) - alpha.sum());

    if (pg_max - pg_min <= options.tol && std::abs(pg_max) <= options.tol &&
        std::abs(pg_min) <= options.tol) {
      if (active == n && kkt_residual() <= options.tol) {
        model.converged = true;
        ++epoch;
        break;
      }
      active = n;  // final pass over the shrunk coordinates
      pg_max_old = inf;
      pg_min_old = -inf;
      continue;
    }
    pg_max_old = pg_max <= 0.0 ? inf : pg_max;
    pg_min_old = pg_min >= 0.0 ? -inf : pg_min;
  }

  model.max_projected_gradient = kkt_residual();
  double hinge_sum = 0.0;
  for (Index i = 0; i < n; ++i) {
    const double g = labels[i] * (w.dot(samples.col(i)) + w0) - 1.0;
    hinge_sum += std::max(0.0, -g);
  }
  model.objective = 0.5 * (w.squaredNorm() + w0 * w0) + options.c * hinge_sum;
  model.bias = w0;
  model.weights = std::move(w);
  model.epochs = std::min(epoch, options.max_epochs);
  return model;
}

// Smoothed (huberized) hinge on the margin m = y * f(x); gamma is the width
// of the quadratic zone near the kink.
struct SmoothedHinge {
  double gamma;

  double value(double m) const {
    if (m >= 1.0) return 0.0;
    if (m <= 1.0 - gamma) return 1.0 - m - 0.5 * gamma;
    const double z = 1.0 - m;
    return z * z / (2.0 * gamma);
  }
  double derivative(double m) const {
    if (m >= 1.0) return 0.0;
    if (m <= 1.0 - gamma) return -1.0;
    return -(1.0 - m) / gamma;
  }
  double curvature(double m) const { return (m < 1.0 && m > 1.0 - gamma) ? 1.0 / gamma : 0.0; }
};

// Coordinate descent with Newton steps and soft thresholding for
//
//   min_{w, w0}  |w|_1 + C * sum_i loss_gamma(y_i (w^T x_i + w0)),
//
// bias unpenalized. Each step minimizes the local quadratic model of the
// smoothed loss plus the exact L1 term, then backtracks until the true
// objective decreases sufficiently.
//
// The documented gamma is tiny, which leaves the loss flat almost everywhere
// and makes cold-started coordinate steps crawl along near-linear valleys. We
// therefore anneal gamma down a geometric ladder, warm-starting each stage
// from the previous one; only the final stage (at options.hinge_smoothing)
// records epoch objectives and decides convergence.
LinearModel train_l1(const Eigen::Ref<const Matrix>& features,
                     const Eigen::Ref<const Labels>& labels, const SvmOptions& options) {
  const Index n = features.rows();
  const Index k = features.cols();
  const double c = options.c;

  Vector w = Vector::Zero(k);
  double w0 = 0.0;
  Vector margins = Vector::Zero(n);  // y_i * f(x_i), starts at 0
  const Vector y = labels.cast<Scalar>();

  std::vector<Index> order(static_cast<std::size_t>(k) + 1);
  std::iota(order.begin(), order.end(), Index{0});  // index k is the bias
  std::mt19937_64 rng(options.seed);

  LinearModel model;
  model.regularization = Regularization::L1;
  model.c = options.c;

  constexpr double kSigma = 0.01;
  constexpr int kMaxLineSearch = 30;
  double violation_init = -1.0;  // measured during the first epoch of the run
  Vector trial = margins;
  int used = 0;

  // One annealing stage: CD epochs at a fixed smoothing width. Returns true
  // when the stage drove the KKT violation below target_fraction of the
  // run-initial violation before exhausting its epoch cap.
  auto run_stage = [&](double gamma, int cap, double target_fraction, bool record) {
    const SmoothedHinge loss{gamma};
    auto loss_sum = [&](const Vector& m) {
      double total = 0.0;
      for (Index i = 0; i < n; ++i) total += loss.value(m[i]);
      return total;
    };
    for (int e = 0; e < cap; ++e) {
      ++used;
      for (std::size_t s = 0; s + 1 < order.size(); ++s) {
        const std::size_t r = s + rng() % (order.size() - s);
        std::swap(order[s], order[r]);
      }

      double violation_max = 0.0;
      for (const Index j : order) {
        const bool is_bias = (j == k);

        double g = 0.0;
        double h = 0.0;
        for (Index i = 0; i < n; ++i) {
          const double xij = is_bias ? 1.0 : features(i, j);
          const double yx = y[i] * xij;
          g += loss.derivative(margins[i]) * yx;
          h += loss.curvature(margins[i]) * yx * yx;
        }
        g *= c;
        h = std::max(c * h, 1e-10);

        double d;
        if (is_bias) {
          violation_max = std::max(violation_max, std::abs(g));
          d = -g / h;
        } else {
          const double gp = g + 1.0;
          const double gn = g - 1.0;
          double violation = 0.0;
          if (w[j] == 0.0) {
            if (gp < 0.0) violation = -gp;
            else if (gn > 0.0) violation = gn;
          } else {
            violation = w[j] > 0.0 ? std::abs(gp) : std::abs(gn);
          }
          violation_max = std::max(violation_max, violation);

          if (gp <= h * w[j]) {
            d = -gp / h;
          } else if (gn >= h * w[j]) {
            d = -gn / h;
          } else {
            d = -w[j];
          }
        }
        // The smoothed hinge is flat outside a gamma-wide zone, so h can hit
        // its floor and blow the Newton step past anything the line search
        // can rescue in 30 halvings. Clamp the direction first.
        d = std::clamp(d, -10.0, 10.0);
        if (std::abs(d) < 1e-12) continue;

        const double penalty_old = is_bias ? 0.0 : std::abs(w[j]);
        const double loss_old = loss_sum(margins);
        const double decrease_bound =
            g * d + (is_bias ? 0.0 : std::abs(w[j] + d) - penalty_old);

        double lambda = 1.0;
        for (int t = 0; t < kMaxLineSearch; ++t, lambda *= 0.5) {
          const double step = lambda * d;
          if (is_bias) {
            trial = margins + step * y;
          } else {
            trial = margins + (step * y.array() * features.col(j).array()).matrix();
          }
          const double penalty_new = is_bias ? 0.0 : std::abs(w[j] + step);
          const double delta =
              c * (loss_sum(trial) - loss_old) + penalty_new - penalty_old;
          if (delta <= kSigma * lambda * decrease_bound) {
            margins = trial;
            if (is_bias) {
              w0 += step;
            } else {
              w[j] += step;
            }
            break;
          }
        }
      }

      if (record) {
        model.epoch_objectives.push_back(w.lpNorm<1>() + c * loss_sum(margins));
      }
      if (violation_init < 0.0) violation_init = std::max(violation_max, 1e-12);
      if (violation_max <= target_fraction * violation_init) return true;
      if (record) {
        // Near the optimum the objective is piecewise linear up to gamma-wide
        // seams, and coordinate transfers between correlated columns crawl at
        // one seam width per epoch. When a whole window of epochs moves the
        // objective by less than the tolerance resolution, further epochs
        // cannot change which coefficients are nonzero; stop there.
        const std::size_t m = model.epoch_objectives.size();
        constexpr std::size_t kStallWindow = 10;
        if (m > kStallWindow) {
          const double drop = model.epoch_objectives[m - 1 - kStallWindow] -
                              model.epoch_objectives[m - 1];
          if (drop <= options.tol * std::max(1.0, std::abs(model.epoch_objectives[m - 1]))) {
            return true;
          }
        }
      }
    }
    return false;
  };

  std::vector<double> ladder;
  for (double g = 0.2; g > options.hinge_smoothing; g /= 4.0) ladder.push_back(g);
  ladder.push_back(options.hinge_smoothing);

  for (std::size_t s = 0; s < ladder.size(); ++s) {
    const int remaining = options.max_epochs - used;
    if (remaining <= 0) break;
    if (s + 1 == ladder.size()) {
      model.converged = run_stage(ladder[s], remaining, options.tol, true);
    } else {
      // Warm-start stages are cheap approximate solves; always leave at
      // least one epoch for the final stage.
      const int cap = std::min(remaining - 1, 40);
      if (cap > 0) run_stage(ladder[s], cap, 0.01, false);
    }
  }

  model.bias = w0;
  model.weights = std::move(w);
  model.epochs = used;
  const SmoothedHinge final_loss{options.hinge_smoothing};
  double final_loss_sum = 0.0;
  for (Index i = 0; i < n; ++i) final_loss_sum += final_loss.value(margins[i]);
  model.objective = model.weights.lpNorm<1>() + c * final_loss_sum;
  return model;
}

}  // namespace

LinearModel train_linear_svm(const Eigen::Ref<const Matrix>& features,
                             const Eigen::Ref<const Labels>& labels,
                             const SvmOptions& options) {
  validate_training_input(features, labels);
  if (!(options.c > 0.0)) {
    throw ValidationError("train_linear_svm: c must be > 0");
  }
  if (!(options.tol > 0.0) || options.max_epochs < 1) {
    throw ValidationError("train_linear_svm: invalid tolerance or epoch cap");
  }
  if (options.regularization == Regularization::L1 && !(options.hinge_smoothing > 0.0)) {
    throw ValidationError("train_linear_svm: hinge_smoothing must be > 0");
  }
  return options.regularization == Regularization::L2 ? train_l2(features, labels, options)
                                                      : train_l1(features, labels, options);
}

AbsorbedModel absorb_standardization(const LinearModel& model, const Standardization& std,
                                     std::vector<FeatureDescriptor> descriptors) {
  if (model.weights.size() != std.means.size() || model.weights.size() != std.stds.size()) {
    throw DimensionError("absorb_standardization: weight and standardization lengths differ");
  }
  if (!descriptors.empty() &&
      static_cast<Index>(descriptors.size()) != model.weights.size()) {
    throw DimensionError("absorb_standardization: descriptor count and weight count differ");
  }
  AbsorbedModel absorbed;
  absorbed.weights = model.weights.array() / std.stds.array();
  absorbed.bias = model.bias - (model.weights.array() * std.means.array() / std.stds.array()).sum();
  absorbed.descriptors = std::move(descriptors);
  return absorbed;
}

}  // namespace ndpoly
