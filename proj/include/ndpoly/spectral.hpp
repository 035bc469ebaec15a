#pragma once

#include <compare>
#include <span>
#include <string>
#include <vector>

#include "ndpoly/errors.hpp"
#include "ndpoly/types.hpp"

namespace ndpoly {

inline constexpr Scalar kDefaultEpsilon = 1e-10;

namespace detail {

// Unchecked normalized difference kernel. Callers validate inputs.
template <typename T>
inline T nd(T b_i, T b_j, T eps) {
  return (b_i - b_j) / (b_i + b_j + eps);
}

}  // namespace detail

/// Normalized difference of two nonnegative reflectances:
/// (b_i - b_j) / (b_i + b_j + eps). Strictly inside (-1, 1) for b_i, b_j >= 0
/// and eps > 0. Antisymmetric in its band arguments.
Scalar compute_nd(Scalar b_i, Scalar b_j, Scalar eps = kDefaultEpsilon);

/// One base normalized difference ND_{ij}, identified by its 0-based band
/// indices with the canonical orientation i < j.
struct NdPair {
  int i = 0;
  int j = 1;

  friend auto operator<=>(const NdPair&, const NdPair&) = default;
};

/// Validating constructor for NdPair (requires 0 <= i < j).
NdPair make_nd_pair(int i, int j);

/// Number of distinct normalized differences for n bands: C(n, 2).
Index nd_pair_count(int band_count);

/// Rank of a pair in the lexicographic enumeration (0,1), (0,2), ..., (n-2,n-1).
Index nd_pair_rank(NdPair pair, int band_count);

/// Inverse of nd_pair_rank.
NdPair nd_pair_from_rank(Index rank, int band_count);

enum class FeatureKind { Linear, Squared, Product };

/// Symbolic identity of one polynomial feature in the normalized-difference
/// basis: a base difference, its square, or a product of two distinct
/// differences with first < second.
struct FeatureDescriptor {
  FeatureKind kind = FeatureKind::Linear;
  NdPair first;
  NdPair second;  // equals `first` except for Product

  static FeatureDescriptor linear(NdPair p);
  static FeatureDescriptor squared(NdPair p);
  static FeatureDescriptor product(NdPair p, NdPair q);

  friend auto operator<=>(const FeatureDescriptor&, const FeatureDescriptor&) = default;
};

/// Human-readable name with 1-based band numbers: "ND(4,5)", "ND(4,5)^2",
/// "ND(4,5)*ND(7,8)". The inverse of parse_descriptor.
std::string descriptor_name(const FeatureDescriptor& d);
FeatureDescriptor parse_descriptor(const std::string& name);

/// The ordered polynomial feature space over n bands for degree 1 or 2.
///
/// Canonical flat ordering: the Linear block (pairs in lexicographic order),
/// then the Squared block (same order), then the Product block (pairs of
/// pairs in lexicographic order). The descriptor <-> flat index mapping is a
/// bijection; it is frozen into the model document format.
class FeatureSpace {
 public:
  FeatureSpace() = default;

  int band_count() const { return n_; }
  int degree() const { return degree_; }
  Index nd_count() const { return nd_pair_count(n_); }

  Index size() const { return static_cast<Index>(descriptors_.size()); }
  const std::vector<FeatureDescriptor>& descriptors() const { return descriptors_; }
  const FeatureDescriptor& descriptor(Index flat) const;

  Index linear_count() const { return nd_count(); }
  Index squared_count() const { return degree_ >= 2 ? nd_count() : 0; }
  Index product_count() const;

  /// O(1) arithmetic index of a descriptor under the canonical ordering.
  /// Throws ValidationError if the descriptor is not representable in this
  /// space (band out of range, degree-2 term in a degree-1 space).
  Index flat_index(const FeatureDescriptor& d) const;

 private:
  friend FeatureSpace enumerate_features(int band_count, int degree);

  int n_ = 0;
  int degree_ = 0;
  std::vector<FeatureDescriptor> descriptors_;
};

/// Enumerates the complete degree-1 or degree-2 feature space in canonical
/// order. Degree 2 over n bands has 2*C(n,2) + C(C(n,2),2) descriptors.
FeatureSpace enumerate_features(int band_count, int degree);

/// Dimension of the degree-d polynomial embedding over m base normalized
/// differences: C(m+d, d) - 1.
Index embedding_dimension(Index base_nd_count, int degree);

enum class NegativePolicy { Reject, Clamp };

/// Applies the negative-reflectance policy in place. Reject throws a
/// ValidationError naming the offending band (1-based); Clamp zeroes negative
/// entries and returns how many were clamped. Non-finite values throw under
/// either policy.
Index validate_bands(Eigen::Ref<Vector> bands, NegativePolicy policy);

/// Evaluates every descriptor of `space` on one band vector. Component k holds
/// the value of descriptor k.
Vector evaluate_features(const Eigen::Ref<const Vector>& bands, const FeatureSpace& space,
                         Scalar eps = kDefaultEpsilon);

/// Batch evaluation over N band rows, producing the N x D feature matrix in
/// input row order. Memory: N * D scalars (e.g. 2000 x 1080 doubles ~ 17 MB).
Matrix evaluate_feature_matrix(const Eigen::Ref<const Matrix>& bands, const FeatureSpace& space,
                               Scalar eps = kDefaultEpsilon);

/// All C(n,2) normalized differences of one band vector, canonical pair order.
Vector compute_nd_vector(const Eigen::Ref<const Vector>& bands, Scalar eps = kDefaultEpsilon);

/// Evaluates an explicit descriptor subset (sparse models) on one band vector.
Vector evaluate_descriptors(const Eigen::Ref<const Vector>& bands,
                            std::span<const FeatureDescriptor> descriptors,
                            Scalar eps = kDefaultEpsilon);

/// Row-wise descriptor-subset evaluation: N x |descriptors|.
Matrix evaluate_descriptor_matrix(const Eigen::Ref<const Matrix>& bands,
                                  std::span<const FeatureDescriptor> descriptors,
                                  Scalar eps = kDefaultEpsilon);

}  // namespace ndpoly
