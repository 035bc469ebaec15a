#pragma once

#include <atomic>
#include <cstdint>
#include <string>
#include <vector>

#include "ndpoly/spectral.hpp"
#include "ndpoly/types.hpp"

namespace ndpoly {

/// Largest |f| over the closed hypercube [-1,1]^V of the distinct normalized
/// differences appearing in a model. method is "exact_vertex" when the model
/// is multilinear in those variables (no squared terms) and small enough for
/// full vertex enumeration, else "heuristic_ascent" (a certified lower bound).
struct HypercubeBound {
  double value = 0.0;
  std::string method = "exact_vertex";
};

struct ModelProvenance {
  std::string selection_method;
  Index k = 0;
  std::uint64_t seed = 0;
  std::string data_fingerprint;
};

/// The deployable artifact: selected descriptors with raw-space coefficients.
/// Immutable after construction apart from the clamp-warning counter, which
/// confidence() bumps when a heuristic bound is exceeded.
class TrainedModel {
 public:
  int band_count = 0;
  int degree = 2;
  double epsilon = kDefaultEpsilon;
  std::vector<FeatureDescriptor> descriptors;
  double bias = 0.0;
  Vector weights;
  std::string positive_label = "positive";
  std::string negative_label = "negative";
  HypercubeBound bound;
  ModelProvenance provenance;

  TrainedModel() = default;
  TrainedModel(const TrainedModel& other);
  TrainedModel& operator=(const TrainedModel& other);

  /// Checks structural invariants (dimensions, representable descriptors,
  /// distinct labels, positive bound). Throws ValidationError.
  void validate() const;

  /// w~_0 + sum_j w~_j phi_j(bands), features computed with the model epsilon.
  double decision_value(const Eigen::Ref<const Vector>& bands) const;
  Vector decision_values(const Eigen::Ref<const Matrix>& bands) const;

  /// positive_label iff the decision value is > 0 (exactly 0 -> negative).
  std::string predict(const Eigen::Ref<const Vector>& bands) const;
  std::vector<std::string> predict_batch(const Eigen::Ref<const Matrix>& bands) const;

  /// decision_value / M, clamped into [-1, 1]. Each clamp increments the
  /// warning counter (only a heuristic bound can be exceeded).
  double confidence(const Eigen::Ref<const Vector>& bands) const;
  std::uint64_t clamp_warnings() const { return clamp_warnings_.load(); }

  /// Dense coefficient vector of length D_d + 1: intercept at position 0,
  /// weights scattered to 1 + canonical flat index, zeros elsewhere.
  Vector class_embedding() const;

 private:
  mutable std::atomic<std::uint64_t> clamp_warnings_{0};
};

/// Maximizes |bias + sum_j w_j phi_j| over the closed cube of the distinct
/// ND variables in `descriptors`. Exact vertex enumeration when multilinear
/// with at most 20 variables; otherwise coordinate ascent with per-variable
/// interior critical points from every vertex (<= 12 variables) or from 64
/// seeded random starts.
HypercubeBound compute_hypercube_bound(double bias, const Eigen::Ref<const Vector>& weights,
                                       const std::vector<FeatureDescriptor>& descriptors,
                                       std::uint64_t seed = 20240);
HypercubeBound compute_hypercube_bound(const TrainedModel& model, std::uint64_t seed = 20240);

/// Versioned JSON document with named descriptors and an FNV-1a checksum
/// over the canonical payload. Round-trips decision values bit-identically.
std::string model_to_json(const TrainedModel& model);
TrainedModel model_from_json(const std::string& text);

void save_model(const TrainedModel& model, const std::string& path);
TrainedModel load_model(const std::string& path);

/// Writes via a temp file and atomic rename so failures never leave partial
/// output at `path`.
void write_file_atomic(const std::string& path, const std::string& contents);
std::string read_file(const std::string& path);

}  // namespace ndpoly
