#include "ndpoly/spectral.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <string>

namespace ndpoly {

namespace {

void check_nonnegative(Scalar value, const char* which) {
  if (!(value >= 0.0)) {
    throw ValidationError(std::string("compute_nd: reflectance for ") + which +
                          " band must be >= 0, got " + std::to_string(value));
  }
}

}  // namespace

Scalar compute_nd(Scalar b_i, Scalar b_j, Scalar eps) {
  check_nonnegative(b_i, "first");
  check_nonnegative(b_j, "second");
  if (!(eps > 0.0)) {
    throw ValidationError("compute_nd: epsilon must be > 0");
  }
  return detail::nd(b_i, b_j, eps);
}

NdPair make_nd_pair(int i, int j) {
  if (i < 0 || j < 0 || i >= j) {
    throw ValidationError("NdPair requires 0 <= i < j, got (" + std::to_string(i) + "," +
                          std::to_string(j) + ")");
  }
  return NdPair{i, j};
}

Index nd_pair_count(int band_count) {
  return static_cast<Index>(band_count) * (band_count - 1) / 2;
}

Index nd_pair_rank(NdPair pair, int band_count) {
  const Index i = pair.i;
  const Index j = pair.j;
  const Index n = band_count;
  return i * n - i * (i + 1) / 2 + (j - i - 1);
}

NdPair nd_pair_from_rank(Index rank, int band_count) {
  const Index n = band_count;
  Index i = 0;
  Index row = n - 1;  // pairs with first index i
  Index r = rank;
  while (r >= row) {
    r -= row;
    ++i;
    --row;
  }
  return NdPair{static_cast<int>(i), static_cast<int>(i + 1 + r)};
}

FeatureDescriptor FeatureDescriptor::linear(NdPair p) {
  return FeatureDescriptor{FeatureKind::Linear, p, p};
}

FeatureDescriptor FeatureDescriptor::squared(NdPair p) {
  return FeatureDescriptor{FeatureKind::Squared, p, p};
}

FeatureDescriptor FeatureDescriptor::product(NdPair p, NdPair q) {
  if (!(p < q)) {
    throw ValidationError("product descriptor requires first pair < second pair");
  }
  return FeatureDescriptor{FeatureKind::Product, p, q};
}

std::string descriptor_name(const FeatureDescriptor& d) {
  auto nd_name = [](NdPair p) {
    return "ND(" + std::to_string(p.i + 1) + "," + std::to_string(p.j + 1) + ")";
  };
  switch (d.kind) {
    case FeatureKind::Linear:
      return nd_name(d.first);
    case FeatureKind::Squared:
      return nd_name(d.first) + "^2";
    case FeatureKind::Product:
      return nd_name(d.first) + "*" + nd_name(d.second);
  }
  throw ValidationError("descriptor_name: unknown feature kind");
}

namespace {

// Parses "ND(<int>,<int>)" starting at pos; advances pos past it.
NdPair parse_nd_name(const std::string& s, std::size_t& pos) {
  auto fail = [&] { throw ValidationError("parse_descriptor: malformed name '" + s + "'"); };
  if (s.compare(pos, 3, "ND(") != 0) fail();
  pos += 3;
  auto parse_int = [&](char terminator) {
    int value = 0;
    const char* begin = s.data() + pos;
    const char* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr == end || *ptr != terminator) fail();
    pos = static_cast<std::size_t>(ptr - s.data()) + 1;
    return value;
  };
  const int i = parse_int(',');
  const int j = parse_int(')');
  if (i < 1 || j < 1) fail();
  return make_nd_pair(i - 1, j - 1);
}

}  // namespace

FeatureDescriptor parse_descriptor(const std::string& name) {
  std::size_t pos = 0;
  const NdPair first = parse_nd_name(name, pos);
  if (pos == name.size()) {
    return FeatureDescriptor::linear(first);
  }
  if (name.compare(pos, 2, "^2") == 0 && pos + 2 == name.size()) {
    return FeatureDescriptor::squared(first);
  }
  if (name[pos] == '*') {
    ++pos;
    const NdPair second = parse_nd_name(name, pos);
    if (pos == name.size()) {
      return FeatureDescriptor::product(first, second);
    }
  }
  throw ValidationError("parse_descriptor: malformed name '" + name + "'");
}

const FeatureDescriptor& FeatureSpace::descriptor(Index flat) const {
  if (flat < 0 || flat >= size()) {
    throw ValidationError("FeatureSpace: flat index " + std::to_string(flat) + " out of range");
  }
  return descriptors_[static_cast<std::size_t>(flat)];
}

Index FeatureSpace::product_count() const {
  if (degree_ < 2) return 0;
  const Index m = nd_count();
  return m * (m - 1) / 2;
}

Index FeatureSpace::flat_index(const FeatureDescriptor& d) const {
  const Index m = nd_count();
  auto check_pair = [&](NdPair p) {
    if (p.i < 0 || p.i >= p.j || p.j >= n_) {
      throw ValidationError("descriptor " + descriptor_name(d) + " not representable over " +
                            std::to_string(n_) + " bands");
    }
  };
  check_pair(d.first);
  if (d.kind != FeatureKind::Linear && degree_ < 2) {
    throw ValidationError("descriptor " + descriptor_name(d) +
                          " requires degree 2, space has degree 1");
  }
  switch (d.kind) {
    case FeatureKind::Linear:
      return nd_pair_rank(d.first, n_);
    case FeatureKind::Squared:
      return m + nd_pair_rank(d.first, n_);
    case FeatureKind::Product: {
      check_pair(d.second);
      if (!(d.first < d.second)) {
        throw ValidationError("descriptor " + descriptor_name(d) +
                              " violates product pair ordering");
      }
      const Index p = nd_pair_rank(d.first, n_);
      const Index q = nd_pair_rank(d.second, n_);
      return 2 * m + p * m - p * (p + 1) / 2 + (q - p - 1);
    }
  }
  throw ValidationError("flat_index: unknown feature kind");
}

FeatureSpace enumerate_features(int band_count, int degree) {
  if (band_count < 2) {
    throw ValidationError("enumerate_features: band count must be >= 2, got " +
                          std::to_string(band_count));
  }
  if (degree != 1 && degree != 2) {
    throw ValidationError("enumerate_features: degree must be 1 or 2, got " +
                          std::to_string(degree));
  }

  FeatureSpace space;
  space.n_ = band_count;
  space.degree_ = degree;

  const Index m = nd_pair_count(band_count);
  const Index total = degree == 1 ? m : 2 * m + m * (m - 1) / 2;
  space.descriptors_.reserve(static_cast<std::size_t>(total));

  for (int i = 0; i < band_count; ++i) {
    for (int j = i + 1; j < band_count; ++j) {
      space.descriptors_.push_back(FeatureDescriptor::linear(NdPair{i, j}));
    }
  }
  if (degree == 2) {
    for (Index r = 0; r < m; ++r) {
      space.descriptors_.push_back(
          FeatureDescriptor::squared(nd_pair_from_rank(r, band_count)));
    }
    for (Index p = 0; p < m; ++p) {
      const NdPair first = nd_pair_from_rank(p, band_count);
      for (Index q = p + 1; q < m; ++q) {
        space.descriptors_.push_back(
            FeatureDescriptor::product(first, nd_pair_from_rank(q, band_count)));
      }
    }
  }
  return space;
}

Index embedding_dimension(Index base_nd_count, int degree) {
  if (base_nd_count < 1 || degree < 1) {
    throw ValidationError("embedding_dimension: requires m >= 1 and d >= 1");
  }
  // C(m+d, d) - 1 with min(d, m) multiplications; overflow-checked.
  const Index m = base_nd_count;
  const Index d = degree;
  const Index top = m + d;
  const Index k = std::min<Index>(d, m);
  Index result = 1;
  for (Index t = 1; t <= k; ++t) {
    const Index numerator = top - k + t;
    if (result > (std::numeric_limits<Index>::max() / numerator)) {
      throw ValidationError("embedding_dimension: result overflows");
    }
    result = result * numerator / t;
  }
  return result - 1;
}

Index validate_bands(Eigen::Ref<Vector> bands, NegativePolicy policy) {
  Index clamped = 0;
  for (Index b = 0; b < bands.size(); ++b) {
    if (!std::isfinite(bands[b])) {
      // Non-finite values are data corruption under either policy; clamping
      // them to zero would hide the problem.
      throw ValidationError("non-finite reflectance in band " + std::to_string(b + 1));
    }
    if (bands[b] < 0.0) {
      if (policy == NegativePolicy::Reject) {
        throw ValidationError("negative reflectance in band " + std::to_string(b + 1) + ": " +
                              std::to_string(bands[b]));
      }
      bands[b] = 0.0;
      ++clamped;
    }
  }
  return clamped;
}

namespace {

void check_band_count(Index got, int expected, const char* where) {
  if (got != expected) {
    throw DimensionError(std::string(where) + ": expected " + std::to_string(expected) +
                         " bands, got " + std::to_string(got));
  }
}

}  // namespace

Vector compute_nd_vector(const Eigen::Ref<const Vector>& bands, Scalar eps) {
  const int n = static_cast<int>(bands.size());
  Vector nd(nd_pair_count(n));
  Index r = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      nd[r++] = detail::nd(bands[i], bands[j], eps);
    }
  }
  return nd;
}

Vector evaluate_features(const Eigen::Ref<const Vector>& bands, const FeatureSpace& space,
                         Scalar eps) {
  check_band_count(bands.size(), space.band_count(), "evaluate_features");
  const Vector nd = compute_nd_vector(bands, eps);
  const Index m = space.nd_count();
  Vector features(space.size());
  features.head(m) = nd;
  if (space.degree() == 2) {
    features.segment(m, m) = nd.array().square();
    Index out = 2 * m;
    for (Index p = 0; p < m; ++p) {
      for (Index q = p + 1; q < m; ++q) {
        features[out++] = nd[p] * nd[q];
      }
    }
  }
  return features;
}

Matrix evaluate_feature_matrix(const Eigen::Ref<const Matrix>& bands, const FeatureSpace& space,
                               Scalar eps) {
  check_band_count(bands.cols(), space.band_count(), "evaluate_feature_matrix");
  const int n = space.band_count();
  const Index m = space.nd_count();
  const Index rows = bands.rows();

  Matrix nd(rows, m);
  Index r = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      nd.col(r++) = (bands.col(i) - bands.col(j)).array() /
                    ((bands.col(i) + bands.col(j)).array() + eps);
    }
  }

  Matrix features(rows, space.size());
  features.leftCols(m) = nd;
  if (space.degree() == 2) {
    features.middleCols(m, m) = nd.array().square();
    Index out = 2 * m;
    for (Index p = 0; p < m; ++p) {
      for (Index q = p + 1; q < m; ++q) {
        features.col(out++) = nd.col(p).cwiseProduct(nd.col(q));
      }
    }
  }
  return features;
}

namespace {

Scalar descriptor_value(const Vector& bands, const FeatureDescriptor& d, Scalar eps) {
  const Scalar a = detail::nd(bands[d.first.i], bands[d.first.j], eps);
  switch (d.kind) {
    case FeatureKind::Linear:
      return a;
    case FeatureKind::Squared:
      return a * a;
    case FeatureKind::Product:
      return a * detail::nd(bands[d.second.i], bands[d.second.j], eps);
  }
  return 0.0;
}

int required_band_count(std::span<const FeatureDescriptor> descriptors) {
  int n = 0;
  for (const auto& d : descriptors) {
    n = std::max({n, d.first.j + 1, d.second.j + 1});
  }
  return n;
}

}  // namespace

Vector evaluate_descriptors(const Eigen::Ref<const Vector>& bands,
                            std::span<const FeatureDescriptor> descriptors, Scalar eps) {
  const int needed = required_band_count(descriptors);
  if (bands.size() < needed) {
    throw DimensionError("evaluate_descriptors: descriptors reference band " +
                         std::to_string(needed) + " but only " + std::to_string(bands.size()) +
                         " bands given");
  }
  const Vector b = bands;
  Vector values(static_cast<Index>(descriptors.size()));
  for (std::size_t k = 0; k < descriptors.size(); ++k) {
    values[static_cast<Index>(k)] = descriptor_value(b, descriptors[k], eps);
  }
  return values;
}

Matrix evaluate_descriptor_matrix(const Eigen::Ref<const Matrix>& bands,
                                  std::span<const FeatureDescriptor> descriptors, Scalar eps) {
  const int needed = required_band_count(descriptors);
  if (bands.cols() < needed) {
    throw DimensionError("evaluate_descriptor_matrix: descriptors reference band " +
                         std::to_string(needed) + " but only " + std::to_string(bands.cols()) +
                         " bands given");
  }
  Matrix values(bands.rows(), static_cast<Index>(descriptors.size()));
  for (std::size_t k = 0; k < descriptors.size(); ++k) {
    const auto& d = descriptors[k];
    auto nd_col = [&](NdPair p) {
      return ((bands.col(p.i) - bands.col(p.j)).array() /
              ((bands.col(p.i) + bands.col(p.j)).array() + eps))
          .matrix();
    };
    const Index col = static_cast<Index>(k);
    switch (d.kind) {
      case FeatureKind::Linear:
        values.col(col) = nd_col(d.first);
        break;
      case FeatureKind::Squared:
        values.col(col) = nd_col(d.first).array().square();
        break;
      case FeatureKind::Product:
        values.col(col) = nd_col(d.first).cwiseProduct(nd_col(d.second));
        break;
    }
  }
  return values;
}

}  // namespace ndpoly
