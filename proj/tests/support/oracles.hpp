#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "floquet_pt/coefficients.hpp"
#include "floquet_pt/types.hpp"

namespace fpt::test {

OperatorSpec free_spec(int n, int m = 1);

/// P_2 = 2a cos(2 pi x), scalar.
OperatorSpec cosine_spec(int n, double a);

/// P_2 = C, nothing else.
OperatorSpec constant_spec(int n, const RealMatrix& C, double epsilon = 1.0);

/// n = 3, m = 2, C = diag(0, 2), P_2 = C + 0.5 * 2cos(2 pi x) [[0,1],[1,0]].
OperatorSpec two_level_cubic();

/// Harmonics |l| <= 2 for P_2..P_n, entries uniform in [-2, 2].
OperatorSpec random_pt_spec(std::mt19937_64& rng, int n, int m);

/// Fundamental matrix at x = 1 by classical fixed-step RK4 on the first-order
/// system, with the coefficients summed straight from the stored harmonics.
ComplexMatrix rk4_monodromy(const OperatorSpec& spec, Complex lambda, int steps);

/// Minimum-cost assignment by enumerating every permutation.
std::vector<int> brute_force_assignment(const Eigen::MatrixXd& cost);

struct Condition27Oracle {
  bool holds = false;
  std::optional<std::array<int, 3>> first_assignment;  // lexicographic, for the first triple
};

/// Exhaustive search on a list of simple real eigenvalues (every one odd):
/// holds when some triple has no common pairwise sum.
Condition27Oracle condition27_oracle(const std::vector<double>& values);

std::filesystem::path config_path(const std::string& name);

/// Fresh empty directory under the system temp dir.
std::filesystem::path scratch_dir(const std::string& tag);

std::string slurp(const std::filesystem::path& path);

}  // namespace fpt::test
