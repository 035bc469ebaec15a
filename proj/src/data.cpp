#include "ndpoly/data.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "ndpoly/errors.hpp"
#include "ndpoly/hash.hpp"
#include "ndpoly/model.hpp"

namespace ndpoly {

Labels SampleTable::numeric_labels(const std::string& positive,
                                   const std::string& negative) const {
  if (static_cast<Index>(labels.size()) != bands.rows()) {
    throw ValidationError("numeric_labels: table has no label per row");
  }
  Labels out(bands.rows());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == positive) {
      out[static_cast<Index>(i)] = 1;
    } else if (labels[i] == negative) {
      out[static_cast<Index>(i)] = -1;
    } else {
      throw ValidationError("row " + std::to_string(i + 1) + " has label '" + labels[i] +
                            "', expected '" + positive + "' or '" + negative + "'");
    }
  }
  return out;
}

std::string ParseReport::summary() const {
  std::ostringstream out;
  out << "read " << rows_read << " data rows: kept " << rows_kept << ", rejected "
      << rejections.size() << ", clamped " << values_clamped << " negative values";
  for (const std::string& reason : rejections) {
    out << "\n  " << reason;
  }
  return out.str();
}

std::string ParseReport::to_json() const {
  nlohmann::json document;
  document["rows_read"] = rows_read;
  document["rows_kept"] = rows_kept;
  document["values_clamped"] = values_clamped;
  document["rejections"] = rejections;
  return document.dump(2) + "\n";
}

namespace {

std::string trim(const std::string& s) {
  std::size_t begin = 0;
  std::size_t end = s.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
  return s.substr(begin, end - begin);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string current;
  for (const char c : line) {
    if (c == ',') {
      cells.push_back(trim(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  cells.push_back(trim(current));
  return cells;
}

bool parse_double(const std::string& cell, double& out) {
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  const auto result = std::from_chars(begin, end, out);
  return result.ec == std::errc{} && result.ptr == end && !cell.empty();
}

bool parse_int(const std::string& cell, int& out) {
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  const auto result = std::from_chars(begin, end, out);
  return result.ec == std::errc{} && result.ptr == end && !cell.empty();
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ValidationError("cannot open '" + path + "' for reading");
  }
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

void validate_schema(const SampleSchema& schema) {
  if (schema.band_columns.empty()) {
    throw SchemaError("schema: at least one band column required");
  }
  std::vector<std::string> sorted = schema.band_columns;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw SchemaError("schema: duplicate band column name");
  }
  if (!schema.label_column.empty()) {
    if (schema.positive_label.empty() || schema.negative_label.empty()) {
      throw SchemaError("schema: positive and negative label names required");
    }
    if (schema.positive_label == schema.negative_label) {
      throw SchemaError("schema: class labels must be distinct");
    }
  }
  if (schema.x_column.empty() != schema.y_column.empty()) {
    throw SchemaError("schema: x and y columns must be given together");
  }
  if (!(schema.scale_factor > 0.0)) {
    throw SchemaError("schema: scale_factor must be > 0");
  }
  if (!(schema.max_reflectance > 0.0)) {
    throw SchemaError("schema: max_reflectance must be > 0");
  }
}

std::string format_cell(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return std::string(buffer);
}

// Shared by write_samples and table_fingerprint so the fingerprint is stable
// across in-memory and on-disk representations of the same table.
std::string render_table(const SampleTable& table, const std::string& label_column) {
  std::ostringstream out;
  for (std::size_t j = 0; j < table.band_names.size(); ++j) {
    if (j) out << ',';
    out << table.band_names[j];
  }
  const bool with_labels = !table.labels.empty();
  if (with_labels) out << ',' << label_column;
  if (table.has_years()) out << ",year";
  if (table.has_coords()) out << ",x,y";
  out << '\n';
  for (Index i = 0; i < table.bands.rows(); ++i) {
    for (Index j = 0; j < table.bands.cols(); ++j) {
      if (j) out << ',';
      out << format_cell(table.bands(i, j));
    }
    if (with_labels) out << ',' << table.labels[static_cast<std::size_t>(i)];
    if (table.has_years()) out << ',' << table.years[static_cast<std::size_t>(i)];
    if (table.has_coords()) {
      out << ',' << format_cell(table.x[static_cast<std::size_t>(i)]) << ','
          << format_cell(table.y[static_cast<std::size_t>(i)]);
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace

std::vector<std::string> read_header(const std::string& path) {
  const std::vector<std::string> lines = read_lines(path);
  if (lines.empty()) {
    throw ValidationError("'" + path + "' is empty (header row required)");
  }
  return split_csv_line(lines.front());
}

SampleTable read_samples(const std::string& path, const SampleSchema& schema,
                         ParseReport* report) {
  validate_schema(schema);
  const std::vector<std::string> lines = read_lines(path);
  if (lines.empty()) {
    throw ValidationError("'" + path + "' is empty (header row required)");
  }

  const std::vector<std::string> header = split_csv_line(lines.front());
  std::unordered_map<std::string, std::size_t> column_of;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (!column_of.emplace(header[j], j).second) {
      throw SchemaError("duplicate column '" + header[j] + "' in '" + path + "'");
    }
  }
  auto require_column = [&](const std::string& name) {
    const auto it = column_of.find(name);
    if (it == column_of.end()) {
      throw SchemaError("missing column '" + name + "' in '" + path + "'");
    }
    return it->second;
  };

  std::vector<std::size_t> band_cols;
  band_cols.reserve(schema.band_columns.size());
  for (const std::string& name : schema.band_columns) band_cols.push_back(require_column(name));
  const bool with_labels = !schema.label_column.empty();
  const std::size_t label_col = with_labels ? require_column(schema.label_column) : 0;
  const bool with_years = !schema.year_column.empty();
  const std::size_t year_col = with_years ? require_column(schema.year_column) : 0;
  const bool with_coords = !schema.x_column.empty();
  const std::size_t x_col = with_coords ? require_column(schema.x_column) : 0;
  const std::size_t y_col = with_coords ? require_column(schema.y_column) : 0;

  ParseReport local;
  ParseReport& out_report = report ? *report : local;
  out_report = ParseReport{};

  const int n = static_cast<int>(band_cols.size());
  std::vector<Vector> rows;
  std::vector<std::string> labels;
  std::vector<int> years;
  std::vector<double> xs;
  std::vector<double> ys;

  for (std::size_t line_no = 1; line_no < lines.size(); ++line_no) {
    const std::string& line = lines[line_no];
    if (trim(line).empty()) continue;
    ++out_report.rows_read;
    const std::string where = "line " + std::to_string(line_no + 1);
    const std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      out_report.rejections.push_back(where + ": expected " + std::to_string(header.size()) +
                                      " columns, got " + std::to_string(cells.size()));
      continue;
    }

    Vector band_row(n);
    std::size_t clamped_here = 0;
    bool ok = true;
    for (int j = 0; j < n && ok; ++j) {
      const std::string& cell = cells[band_cols[static_cast<std::size_t>(j)]];
      double value = 0.0;
      if (!parse_double(cell, value) || !std::isfinite(value)) {
        out_report.rejections.push_back(where + ": non-numeric value '" + cell +
                                        "' in column '" +
                                        schema.band_columns[static_cast<std::size_t>(j)] + "'");
        ok = false;
        break;
      }
      value /= schema.scale_factor;
      if (value < 0.0) {
        if (schema.negative_policy == NegativePolicy::Reject) {
          out_report.rejections.push_back(
              where + ": negative reflectance " + cell + " in column '" +
              schema.band_columns[static_cast<std::size_t>(j)] + "'");
          ok = false;
          break;
        }
        value = 0.0;
        ++clamped_here;
      }
      if (value > schema.max_reflectance) {
        out_report.rejections.push_back(
            where + ": value " + cell + " in column '" +
            schema.band_columns[static_cast<std::size_t>(j)] + "' exceeds " +
            format_cell(schema.max_reflectance) + " (set a scale factor for scaled products)");
        ok = false;
        break;
      }
      band_row[j] = value;
    }
    if (!ok) continue;

    std::string label;
    if (with_labels) {
      label = cells[label_col];
      if (label != schema.positive_label && label != schema.negative_label) {
        out_report.rejections.push_back(where + ": unknown label '" + label + "'");
        continue;
      }
    }
    int year = 0;
    if (with_years && !parse_int(cells[year_col], year)) {
      out_report.rejections.push_back(where + ": non-integer year '" + cells[year_col] + "'");
      continue;
    }
    double px = 0.0;
    double py = 0.0;
    if (with_coords) {
      if (!parse_double(cells[x_col], px) || !std::isfinite(px) ||
          !parse_double(cells[y_col], py) || !std::isfinite(py)) {
        out_report.rejections.push_back(where + ": non-numeric coordinates");
        continue;
      }
    }

    out_report.values_clamped += clamped_here;
    rows.push_back(std::move(band_row));
    if (with_labels) labels.push_back(label);
    if (with_years) years.push_back(year);
    if (with_coords) {
      xs.push_back(px);
      ys.push_back(py);
    }
    ++out_report.rows_kept;
  }

  if (rows.empty()) {
    throw ValidationError("no usable rows in '" + path + "' (" +
                          std::to_string(out_report.rejections.size()) + " rejected)");
  }

  SampleTable table;
  table.band_names = schema.band_columns;
  table.bands.resize(static_cast<Index>(rows.size()), n);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    table.bands.row(static_cast<Index>(i)) = rows[i].transpose();
  }
  table.labels = std::move(labels);
  table.years = std::move(years);
  table.x = std::move(xs);
  table.y = std::move(ys);
  return table;
}

void write_samples(const std::string& path, const SampleTable& table,
                   const std::string& label_column) {
  write_file_atomic(path, render_table(table, label_column));
}

std::string table_fingerprint(const SampleTable& table) {
  return fnv1a64_hex(render_table(table, "label"));
}

FeatureDescriptor planted_descriptor() {
  return FeatureDescriptor::product(make_nd_pair(3, 4), make_nd_pair(6, 7));
}

SampleTable generate_synthetic(const SyntheticOptions& options) {
  if (options.samples < 4) {
    throw ValidationError("generate_synthetic: need at least 4 samples");
  }
  if (options.band_count < 8) {
    throw ValidationError("generate_synthetic: need at least 8 bands for the planted pairs");
  }
  if (!(options.separation > 0.0) || options.separation > 1.2) {
    throw ValidationError("generate_synthetic: separation must lie in (0, 1.2]");
  }
  if (options.noise < 0.0) {
    throw ValidationError("generate_synthetic: noise must be >= 0");
  }

  std::mt19937_64 rng(options.seed);
  auto unit = [&] { return static_cast<double>(rng() >> 11) * 0x1p-53; };
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(); };
  auto gaussian = [&] {
    double u1 = unit();
    while (u1 <= 0.0) u1 = unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * unit());
  };

  const Index count = options.samples;
  const int n = options.band_count;
  // Slightly above sqrt(separation/2) so the empirical product-mean gap stays
  // >= separation despite magnitude jitter and noise.
  const double magnitude = std::sqrt(0.55 * options.separation);

  SampleTable table;
  table.band_names.reserve(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) table.band_names.push_back("B" + std::to_string(j + 1));
  table.bands.resize(count, n);
  table.labels.reserve(static_cast<std::size_t>(count));
  table.years.reserve(static_cast<std::size_t>(count));
  table.x.reserve(static_cast<std::size_t>(count));
  table.y.reserve(static_cast<std::size_t>(count));

  for (Index i = 0; i < count; ++i) {
    const bool positive = i % 2 == 0;
    const double u = rng() & 1ULL ? 1.0 : -1.0;
    const double v = positive ? u : -u;
    const double t45 = u * uniform(0.8, 1.2) * magnitude;
    const double t78 = v * uniform(0.8, 1.2) * magnitude;
    const double s45 = uniform(0.25, 0.40);
    const double s78 = uniform(0.25, 0.40);

    for (int j = 0; j < n; ++j) {
      double value;
      switch (j) {
        case 3: value = s45 * (1.0 + t45) / 2.0; break;
        case 4: value = s45 * (1.0 - t45) / 2.0; break;
        case 6: value = s78 * (1.0 + t78) / 2.0; break;
        case 7: value = s78 * (1.0 - t78) / 2.0; break;
        default: value = 0.08 + 0.015 * (j % 12); break;
      }
      value += options.noise * gaussian();
      table.bands(i, j) = std::max(value, 0.0);
    }
    table.labels.push_back(positive ? options.positive_label : options.negative_label);
    table.years.push_back(2022 + static_cast<int>(i % 3));
    table.x.push_back(unit());
    table.y.push_back(unit());
  }
  return table;
}

}  // namespace ndpoly
