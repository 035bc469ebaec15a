#pragma once

#include <Eigen/Core>

#include <cstdint>

namespace ndpoly {

using Scalar = double;
using Index = Eigen::Index;

using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
using IntVector = Eigen::Matrix<int, Eigen::Dynamic, 1>;

// Binary class labels are encoded +1 / -1 throughout.
using Labels = IntVector;

}  // namespace ndpoly
