#pragma once

#include <optional>
#include <vector>

#include "floquet_pt/coefficients.hpp"
#include "floquet_pt/types.hpp"

namespace fpt {

struct MonodromyConfig {
  double ode_tol = 1e-10;         // local tolerance of the embedded RK pair
  double lambda_cap = 1e6;        // stiffness guard on |lambda|
  double unimod_tol = 1e-6;       // unit-circle tolerance of the membership test
  double condition_cap = 1e6;     // cap on the condition scaling of unimod_tol
  double segment_growth = 2.0;    // target log-growth of one shooting segment
  long max_steps = 2'000'000;     // accepted steps per propagation
};

/// Values Y_j^{(nu-1)}(1, lambda) of the fundamental solutions and derived data.
struct MonodromyRecord {
  Complex lambda;
  ComplexMatrix M;                   // nm x nm, block (nu, j) = Y_j^{(nu-1)}(1, lambda)
  std::vector<Complex> multipliers;  // eigenvalues of M
  Complex det_M;
  int segments = 1;
  double scale = 1.0;  // derivative scaling used internally: row block nu carries s^nu
};

MonodromyRecord fundamental_matrix(const OperatorSpec& spec, Complex lambda, const MonodromyConfig& config = {});

/// Delta(lambda, t) = det(M(lambda) - e^{it} I), evaluated through the
/// block-cyclic shooting system so that the growth of M never enters one matrix.
Complex char_det(const OperatorSpec& spec, Complex lambda, double t, const MonodromyConfig& config = {});

std::vector<Complex> multipliers(const OperatorSpec& spec, Complex lambda, const MonodromyConfig& config = {});

struct Membership {
  bool member = false;
  double best_defect = 0.0;         // min ||rho| - 1|
  std::optional<double> witness_t;  // arg rho of the best multiplier, in [0, 2 pi)
  double condition = 1.0;           // eigenvalue condition number of that multiplier
};

Membership spectrum_membership(const OperatorSpec& spec, double lambda, const MonodromyConfig& config = {});

/// Bloch eigenvalue of T_t near seed: secant iteration on Delta(., t).
Complex refine_bloch_root(const OperatorSpec& spec, Complex seed, double t, const MonodromyConfig& config = {});

}  // namespace fpt
