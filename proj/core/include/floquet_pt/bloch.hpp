#pragma once

#include <optional>
#include <vector>

#include "floquet_pt/coefficients.hpp"
#include "floquet_pt/errors.hpp"
#include "floquet_pt/linalg.hpp"
#include "floquet_pt/types.hpp"
#include "floquet_pt/unperturbed.hpp"

namespace fpt {

/// Truncation and tolerances of the Fourier-Galerkin engine. Basis functions
/// are e^{i(2 pi k + t)x} e_a for |k| <= K and a = 0..m-1.
struct GalerkinConfig {
  int K = 24;
  double eig_tol = 1e-8;      // relative movement allowed by the convergence certificate
  double cluster_tol = 1e-6;  // relative clustering radius
  int certify_extra = 8;      // certificate compares K with K + certify_extra; 0 disables it
  bool refine = true;         // polish in-window eigenvalues by inverse iteration
};

/// Closed disk in the complex plane.
struct SpectralDisk {
  Complex center{0.0, 0.0};
  double radius = 0.0;
  [[nodiscard]] bool contains(Complex z) const noexcept { return std::abs(z - center) <= radius; }
};

struct BlochCluster {
  Complex value;
  int multiplicity = 1;
};

/// Eigenvalues of T_t(eps, C) inside a window at fixed t.
struct BlochSet {
  double t = 0.0;
  int K = 0;
  std::vector<Complex> values;  // every eigenvalue, repeated by multiplicity
  std::vector<BlochCluster> clusters;
  std::optional<SpectralDisk> window;

  [[nodiscard]] int total_multiplicity() const noexcept { return static_cast<int>(values.size()); }
};

/// Raised when the K versus K + certify_extra certificate fails; keeps both results.
class NotConvergedError : public Error {
 public:
  NotConvergedError(const std::string& message, BlochSet coarse, BlochSet fine)
      : Error(ErrorCode::NotConverged, message), coarse_(std::move(coarse)), fine_(std::move(fine)) {}
  [[nodiscard]] const BlochSet& coarse() const noexcept { return coarse_; }
  [[nodiscard]] const BlochSet& fine() const noexcept { return fine_; }

 private:
  BlochSet coarse_;
  BlochSet fine_;
};

class IsolationLostError : public Error {
 public:
  IsolationLostError(const std::string& message, double t, int found)
      : Error(ErrorCode::IsolationLost, message), t_(t), found_(found) {}
  [[nodiscard]] double t() const noexcept { return t_; }
  [[nodiscard]] int found() const noexcept { return found_; }

 private:
  double t_;
  int found_;
};

/// Minimal K accepted for a spec: max coefficient frequency + 4.
int minimal_truncation(const OperatorSpec& spec);

ComplexMatrix assemble_galerkin(const OperatorSpec& spec, double t, const GalerkinConfig& config);

/// Real form of the same matrix (it is real for real t).
RealMatrix assemble_galerkin_real(const OperatorSpec& spec, double t, int K);

/// Eigenvalues with |lambda| at most this are certified at truncation K.
double certified_radius(int n, int K, double t);

/// Every eigenvalue of the truncated matrix, unrefined, sorted by (Re, Im).
std::vector<Complex> galerkin_spectrum(const OperatorSpec& spec, double t, int K);

std::vector<BlochCluster> cluster_eigenvalues(const std::vector<Complex>& values, double rel_tol);

/// In-window eigenvalues. Without a window the whole certified disk is used.
BlochSet bloch_eigenvalues(const OperatorSpec& spec, double t, const GalerkinConfig& config,
                           const std::optional<SpectralDisk>& window = std::nullopt);

struct BranchCurve {
  BandIndex band;
  std::vector<double> t_grid;
  std::vector<std::vector<Complex>> branches;  // branches[l][q] = lambda_l(t_q)
  double disk_radius = 0.0;
};

inline constexpr int kDefaultTraceSteps = 129;

/// Track the m_j eigenvalues inside U_{eps_k}(mu_{k,j}(t)) over [t0 - h, t0 + h].
BranchCurve trace_branches(const OperatorSpec& spec, const SpectralStructure& structure, BandIndex band, double t0,
                           double h, int steps, const GalerkinConfig& config, const Calibration& calib = {});

struct BranchCrossing {
  int branch = 0;
  double t = 0.0;
  Complex value;
};

/// Points where Re lambda_l(t) = lambda, located by bisection in t.
std::vector<BranchCrossing> branch_crossings(const OperatorSpec& spec, const SpectralStructure& structure,
                                             const BranchCurve& curve, double lambda, const GalerkinConfig& config,
                                             const Calibration& calib = {});

struct SymmetryResult {
  bool symmetric = false;
  double max_defect = 0.0;
};

SymmetryResult conjugate_symmetry_check(const BlochSet& set, double tol);

}  // namespace fpt
