#pragma once

#include <Eigen/Dense>

namespace chaosgan {

/// Row-major dense matrix; batches are stored one sample per row.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

}  // namespace chaosgan
