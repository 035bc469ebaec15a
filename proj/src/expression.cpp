#include "ndpoly/expression.hpp"

#include <charconv>
#include <cmath>

#include "ndpoly/errors.hpp"

namespace ndpoly {

std::string to_string(ExpressionDialect dialect) {
  return dialect == ExpressionDialect::EarthEngine ? "earth-engine" : "generic-infix";
}

ExpressionDialect dialect_from_string(const std::string& name) {
  if (name == "generic-infix") return ExpressionDialect::GenericInfix;
  if (name == "earth-engine") return ExpressionDialect::EarthEngine;
  throw ValidationError("unknown expression dialect '" + name +
                        "' (expected generic-infix or earth-engine)");
}

namespace {

// Shortest representation that parses back to the identical double.
std::string format_number(double value) {
  char buffer[32];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

std::string band_ref(const std::string& name, ExpressionDialect dialect) {
  if (dialect == ExpressionDialect::EarthEngine) return "b('" + name + "')";
  return name;
}

std::string nd_expr(NdPair pair, ExpressionDialect dialect,
                    const std::vector<std::string>& names, const std::string& eps) {
  const std::string bi = band_ref(names[static_cast<std::size_t>(pair.i)], dialect);
  const std::string bj = band_ref(names[static_cast<std::size_t>(pair.j)], dialect);
  return "((" + bi + "-" + bj + ")/(" + bi + "+" + bj + "+" + eps + "))";
}

std::string term_expr(const FeatureDescriptor& d, ExpressionDialect dialect,
                      const std::vector<std::string>& names, const std::string& eps) {
  const std::string base = nd_expr(d.first, dialect, names, eps);
  switch (d.kind) {
    case FeatureKind::Linear: return base;
    case FeatureKind::Squared: return "(" + base + "*" + base + ")";
    case FeatureKind::Product:
      return "(" + base + "*" + nd_expr(d.second, dialect, names, eps) + ")";
  }
  throw ValidationError("term_expr: unknown feature kind");
}

}  // namespace

std::string export_expression(const TrainedModel& model, ExpressionDialect dialect,
                              const std::vector<std::string>& band_names) {
  std::vector<std::string> names = band_names;
  if (names.empty()) {
    names.reserve(static_cast<std::size_t>(model.band_count));
    for (int i = 0; i < model.band_count; ++i) {
      names.push_back("B" + std::to_string(i + 1));
    }
  }
  if (static_cast<int>(names.size()) != model.band_count) {
    throw DimensionError("export_expression: model has " + std::to_string(model.band_count) +
                         " bands but " + std::to_string(names.size()) + " names were given");
  }
  if (static_cast<Index>(model.descriptors.size()) != model.weights.size()) {
    throw DimensionError("export_expression: descriptor and weight counts differ");
  }

  const std::string eps = format_number(model.epsilon);
  std::string out = format_number(model.bias);
  for (std::size_t j = 0; j < model.descriptors.size(); ++j) {
    const double w = model.weights[static_cast<Index>(j)];
    out += w < 0.0 ? " - " : " + ";
    out += format_number(std::abs(w));
    out += "*";
    out += term_expr(model.descriptors[j], dialect, names, eps);
  }
  return out;
}

}  // namespace ndpoly
