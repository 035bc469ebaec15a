#pragma once

#include <string>
#include <vector>

#include "ndpoly/model.hpp"

namespace ndpoly {

enum class ExpressionDialect { GenericInfix, EarthEngine };

std::string to_string(ExpressionDialect dialect);
ExpressionDialect dialect_from_string(const std::string& name);

/// Renders the decision function as a single arithmetic expression over named
/// band variables (default names B1..Bn). The emitted operator order mirrors
/// decision_value exactly, so any evaluator with IEEE doubles and
/// left-associative + - * / reproduces it to well under 1e-12.
/// EarthEngine references bands as b('B4'); GenericInfix as bare names.
std::string export_expression(const TrainedModel& model,
                              ExpressionDialect dialect = ExpressionDialect::GenericInfix,
                              const std::vector<std::string>& band_names = {});

}  // namespace ndpoly
