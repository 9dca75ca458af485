#pragma once

#include <map>
#include <optional>
#include <vector>

#include "floquet_pt/types.hpp"

namespace fpt {

/// Trigonometric-polynomial matrix coefficient P_v(x) = sum_l H_l e^{2 pi i l x}.
///
/// Harmonics are stored as real m x m matrices. For a 1-periodic function this
/// is exactly the PT condition p(-x) = conj(p(x)), so every stored series is
/// PT-symmetric by construction.
struct FourierMatrixSeries {
  int order = 2;
  std::map<int, RealMatrix> harmonics;

  [[nodiscard]] int max_frequency() const noexcept;
};

/// Raw harmonic as read from a config document; entries may be complex so that
/// the builder can reject non-PT input with a precise diagnostic.
struct RawHarmonic {
  int l = 0;
  std::vector<std::vector<Complex>> matrix;
};

struct RawSeries {
  int order = 2;
  std::vector<RawHarmonic> harmonics;
};

struct SpecLimits {
  int max_frequency = 32;
  double realness_tol = 0.0;  // |Im| above this is rejected
};

/// Validated operator data: order n, dimension m, coefficients P_2..P_n and the
/// homotopy weight epsilon. Immutable after construction.
class OperatorSpec {
 public:
  [[nodiscard]] int n() const noexcept { return n_; }
  [[nodiscard]] int m() const noexcept { return m_; }
  [[nodiscard]] double epsilon() const noexcept { return epsilon_; }
  [[nodiscard]] const std::vector<FourierMatrixSeries>& coefficients() const noexcept {
    return coefficients_;
  }
  /// Series of order v, or nullptr when P_v is identically zero.
  [[nodiscard]] const FourierMatrixSeries* series(int v) const noexcept;
  /// Largest |l| over all stored harmonics (0 for constant or absent coefficients).
  [[nodiscard]] int max_frequency() const noexcept;

  /// Same coefficients with another homotopy weight.
  [[nodiscard]] OperatorSpec with_epsilon(double epsilon) const;

 private:
  friend OperatorSpec build_spec(int, int, const std::vector<RawSeries>&, double,
                                 const SpecLimits&);
  OperatorSpec() = default;

  int n_ = 3;
  int m_ = 1;
  double epsilon_ = 1.0;
  std::vector<FourierMatrixSeries> coefficients_;  // sorted by order
};

OperatorSpec build_spec(int n, int m, const std::vector<RawSeries>& raw, double epsilon,
                        const SpecLimits& limits = {});

/// Convenience for programmatic construction from real harmonic tables.
OperatorSpec build_spec(int n, int m, const std::vector<FourierMatrixSeries>& series,
                        double epsilon, const SpecLimits& limits = {});

/// C = mean of P_2 over one period.
RealMatrix mean_matrix(const OperatorSpec& spec);

/// Harmonic of P_v at frequency l (the raw coefficient, no epsilon weighting).
RealMatrix fourier_coefficient(const OperatorSpec& spec, int v, int l);

/// Harmonic of the epsilon-weighted coefficient of T_t(eps, C):
/// C delta_{l0} + eps (P_2hat(l) - C delta_{l0}) for v = 2, eps * P_vhat(l) otherwise.
RealMatrix effective_harmonic(const OperatorSpec& spec, int v, int l);

/// max |p_{2,i,j,l}| over l = +-2k, +-(2k+1).
double compute_qk(const OperatorSpec& spec, int k);

/// Pointwise value of the epsilon-weighted coefficient of order v at x.
ComplexMatrix evaluate_coefficient(const OperatorSpec& spec, int v, double x);

/// Same as evaluate_coefficient(spec, v, x) for every v = 2..n at once; entry
/// v-2 is the coefficient of order v. Used by the shooting integrator.
std::vector<ComplexMatrix> evaluate_all_coefficients(const OperatorSpec& spec, double x);

}  // namespace fpt
