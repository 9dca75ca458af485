#pragma once

#include <vector>

#include <Eigen/Dense>

namespace fpt {

/// Minimum-cost perfect assignment on a square cost matrix (Hungarian method,
/// O(n^3)). Returns assignment[row] = column.
std::vector<int> optimal_assignment(const Eigen::MatrixXd& cost);

double assignment_cost(const Eigen::MatrixXd& cost, const std::vector<int>& assignment);

}  // namespace fpt
