#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "floquet_pt/linalg.hpp"
#include "floquet_pt/types.hpp"

namespace fpt {

class OperatorSpec;

/// Band mu_{k,j}(t): Fourier index k and eigenvalue index j of C.
struct BandIndex {
  int k = 0;
  int j = 0;
};

enum class WindowKind { CollisionK, CollisionMinusKMinus1, Gap };

std::string to_string(WindowKind kind);

/// Open interval (center - half_width, center + half_width).
struct Window {
  double center = 0.0;
  double half_width = 0.0;
  WindowKind kind = WindowKind::Gap;
  int i = 0;  // eigenvalue indices the window belongs to
  int j = 0;
  int l = 0;  // harmonic index: k for collision windows, l for gap windows

  [[nodiscard]] double lo() const noexcept { return center - half_width; }
  [[nodiscard]] double hi() const noexcept { return center + half_width; }
  [[nodiscard]] bool contains(double x) const noexcept { return lo() < x && x < hi(); }
  [[nodiscard]] bool contains(const Interval& iv) const noexcept { return lo() < iv.lo && iv.hi < hi(); }
};

/// Calibration constants the asymptotic statements leave unspecified.
struct Calibration {
  double c = 1.0;         // radius constant of the localization disks
  int n_config = 8;       // threshold N for |k|
  double c_delta = 1.0;   // constant in delta_k
  double slope_slack = 0.25;
};

Complex mu_kj(int n, Complex mu_j, int k, double t);
Complex mu_kj_derivative(int n, Complex mu_j, int k, double t);

struct Collision {
  int l = 0;
  int i = 0;
  double distance = 0.0;
};

struct ExceptionalResult {
  bool exceptional = false;
  std::vector<Collision> witnesses;
};

/// Is mu_{k,j}(t) within tol of some other band mu_{l,i}(t), |l| <= |k| + n?
ExceptionalResult is_exceptional(const SpectralStructure& structure, int n, int k, int j, double t, double tol);

/// Localization radius epsilon_k.
double epsilon_k(int n, int r, double c, int k, double q_k);

/// epsilon_k with q_k taken from the spec and r, c from the structure/calibration.
double epsilon_k(const OperatorSpec& spec, const SpectralStructure& structure, int k, const Calibration& calib);

/// delta_k = c_delta (eps_k + eps_{-k} + eps_{-k-1}) |k|^{1-n}.
double delta_k(const OperatorSpec& spec, const SpectralStructure& structure, int k, const Calibration& calib);

/// Collision windows around t = (mu_i - mu_j)/(4 n k pi) and
/// t = pi + (mu_i - mu_j)/(2 pi n (2k + n - 1)) for real pairs. With j given,
/// only pairs (i, j) are produced; otherwise every ordered real pair.
std::vector<Window> collision_windows(const SpectralStructure& structure, int n, int k, double delta,
                                      std::optional<int> j = std::nullopt);

double lemma1_hk(int n, int k, double eps_k);

inline constexpr double kAdmissibleLo = -1.0;
inline constexpr double kAdmissibleHi = kTwoPi - 1.0;

struct AdmissibleSet {
  std::vector<Interval> intervals;  // closed, sorted, pairwise disjoint
  std::vector<Interval> removed;    // merged open windows, reduced into the domain
  bool windows_disjoint = true;
  [[nodiscard]] double measure() const noexcept;
};

/// [-1, 2pi-1) minus the collision windows of half-width delta_plus_h.
AdmissibleSet admissible_t_intervals(const SpectralStructure& structure, int n, int k, int j,
                                     double delta_plus_h, const Calibration& calib = {});

/// S(l,i,j) windows: center (pi l)^n + (mu_i + mu_j)/2 (pi l)^{n-2}, i <= j real.
std::vector<Window> gap_windows(const SpectralStructure& structure, int n, int l, double gamma);

struct Condition27Result {
  bool holds = false;
  std::array<int, 3> triple{};      // j1, j2, j3 for which the condition holds
  std::array<int, 3> assignment{};  // equalizing i1, i2, i3 for the last triple tested when it fails
  std::string diagnostic;
};

/// Exhaustive check over all real odd-multiplicity triples and all s^3 assignments.
Condition27Result check_condition_27(const SpectralStructure& structure, double tol = 1e-9);

struct ParityResult {
  int m_parity = 0;
  int count_real_odd = 0;
  bool consistent = false;
};

ParityResult remark1_parity(const SpectralStructure& structure);

}  // namespace fpt
