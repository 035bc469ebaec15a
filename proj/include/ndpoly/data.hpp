#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ndpoly/spectral.hpp"
#include "ndpoly/types.hpp"

namespace ndpoly {

/// One observation per row: band reflectances plus class label and optional
/// acquisition year and planar coordinates (present for all rows or none).
struct SampleTable {
  std::vector<std::string> band_names;
  Matrix bands;
  std::vector<std::string> labels;
  std::vector<int> years;
  std::vector<double> x;
  std::vector<double> y;

  Index size() const { return bands.rows(); }
  int band_count() const { return static_cast<int>(bands.cols()); }
  bool has_years() const { return !years.empty(); }
  bool has_coords() const { return !x.empty(); }

  /// +1 for positive-label rows, -1 for negative; any other label throws.
  Labels numeric_labels(const std::string& positive, const std::string& negative) const;
};

/// Column layout and validation policy for read_samples. Band columns are
/// matched by exact header name. Empty label/year/x/y names mean the column
/// is not expected; nonempty names must exist in the header. Raw cell values
/// are divided by scale_factor before validation (e.g. 10000 for scaled
/// integer reflectance products).
struct SampleSchema {
  std::vector<std::string> band_columns;
  std::string label_column;
  std::string year_column;
  std::string x_column;
  std::string y_column;
  std::string positive_label;
  std::string negative_label;
  NegativePolicy negative_policy = NegativePolicy::Reject;
  double scale_factor = 1.0;
  double max_reflectance = 1.5;
};

struct ParseReport {
  std::size_t rows_read = 0;
  std::size_t rows_kept = 0;
  std::size_t values_clamped = 0;
  std::vector<std::string> rejections;

  std::string summary() const;
  std::string to_json() const;
};

/// Reads a comma-separated UTF-8 file with a header row. Malformed rows are
/// rejected with a per-row reason (bad cell, unknown label, negative value
/// under the reject policy, out-of-range reflectance); structural problems
/// (missing file, missing column, duplicate header) throw. Throws when no
/// row survives. Row order is preserved.
SampleTable read_samples(const std::string& path, const SampleSchema& schema,
                         ParseReport* report = nullptr);

/// Header row of a delimited file, for schema auto-configuration.
std::vector<std::string> read_header(const std::string& path);

/// Writes the table back as CSV; numbers carry 17 significant digits so a
/// read_samples round trip reproduces every value exactly.
void write_samples(const std::string& path, const SampleTable& table,
                   const std::string& label_column = "label");

/// FNV-1a hash of the canonical serialization, for provenance records.
std::string table_fingerprint(const SampleTable& table);

/// Parameters of the planted-product synthetic scene. The two classes differ
/// only in the relative sign of ND(4,5) and ND(7,8) (1-based bands), so every
/// single normalized difference and every squared term is class-symmetric and
/// only their product separates. separation is the expected gap between the
/// class-conditional means of that product.
struct SyntheticOptions {
  Index samples = 2000;
  int band_count = 10;
  double separation = 0.5;
  double noise = 0.05;
  std::uint64_t seed = 7;
  std::string positive_label = "weed";
  std::string negative_label = "crop";
};

SampleTable generate_synthetic(const SyntheticOptions& options);

/// The descriptor the synthetic generator plants: ND(4,5)*ND(7,8).
FeatureDescriptor planted_descriptor();

}  // namespace ndpoly
