#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "floquet_pt/bloch.hpp"
#include "floquet_pt/coefficients.hpp"
#include "floquet_pt/linalg.hpp"
#include "floquet_pt/monodromy.hpp"
#include "floquet_pt/types.hpp"
#include "floquet_pt/unperturbed.hpp"

namespace fpt {

enum class Engine { Galerkin, Monodromy };

std::string to_string(Engine engine);
std::optional<Engine> parse_engine(std::string_view name);

/// Everything the scans and verification suites need to know.
struct AnalysisConfig {
  Engine engine = Engine::Galerkin;
  GalerkinConfig galerkin;
  MonodromyConfig monodromy;
  Calibration calib;
  int t_grid = 64;            // base t samples per period for the Galerkin scan
  double real_tol = 1e-7;     // |Im z| <= real_tol * max(1, |z|) counts as real
  double cover_tol = 1e-11;   // relative padding of computed band segments
  double gamma_frac = 2.0;    // admissible half-width of S(l,i,j) in units of (pi l)^{n-2}
  int min_slope_points = 5;   // OLS fits need at least this many abscissae
  int jobs = 1;
  std::size_t sample_cap = 200000;         // grid samples retained for CSV output
  std::size_t max_grid_points = 5000000;   // pointwise (monodromy) scans refuse larger grids
};

/// Run body(i) for i in [0, count) on up to jobs threads. The first exception
/// thrown by any worker is rethrown on the caller's thread.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& body);

struct DetectedGap {
  Interval interval;
  std::optional<Window> nearest_window;
  double normalized_offset = 0.0;  // |gap center - window center| / l^{n-2}
};

struct GridSample {
  double lambda = 0.0;
  bool member = false;
  double defect = 0.0;
  std::optional<double> witness_t;
};

struct GapReport {
  Interval scan_range;
  double grid_step = 0.0;
  Engine engine = Engine::Galerkin;
  std::vector<DetectedGap> gaps;  // disjoint, sorted
  double coverage_fraction = 0.0;
  std::size_t grid_points = 0;
  std::size_t non_members = 0;
  std::optional<double> lowest_non_member;
  std::optional<double> highest_non_member;
  double worst_defect = 0.0;
  std::vector<GridSample> samples;
  bool samples_truncated = false;
  int truncation = 0;  // K used by the Galerkin scan
};

/// Grid lambda_lo + i step, i = 0..N, with N the largest index not past lambda_hi.
std::size_t grid_size(double lambda_lo, double lambda_hi, double step);

GapReport scan_real_axis(const OperatorSpec& spec, double lambda_lo, double lambda_hi, double step,
                         const AnalysisConfig& config = {});

/// Nearest S(l,i,j) centre to x over l >= 1 and real pairs, half-width gamma_frac (pi l)^{n-2}.
std::optional<Window> nearest_gap_window(const SpectralStructure& structure, int n, double x, double gamma_frac);

struct GapContainment {
  bool all_contained = true;
  double H = 0.0;
  std::map<int, double> fitted_gamma;  // l -> smallest half-width holding every gap assigned to l
  std::vector<bool> contained;         // per report gap; gaps below H count as contained
  bool offsets_decay = false;
  double decay_slope = 0.0;
  int decay_points = 0;
};

GapContainment verify_gap_containment(const GapReport& report, const SpectralStructure& structure, int n,
                                      const AnalysisConfig& config = {}, std::optional<double> H = std::nullopt);

struct CoverageResult {
  bool covered = false;
  double worst_defect = 0.0;
  double H_effective = 0.0;  // +inf when the top of the range is not covered
  std::vector<GapReport> reports;
};

CoverageResult verify_real_coverage(const OperatorSpec& spec, double H_candidate, double lambda_hi, double step,
                                    const AnalysisConfig& config = {});

struct LocalizationResult {
  std::vector<int> k_list;
  std::vector<double> distances;
  double fitted_slope = 0.0;
  double slope_bound = 0.0;
  bool theorem2_consistent = false;
};

LocalizationResult localization_decay(const OperatorSpec& spec, int band_j, const std::vector<int>& k_list,
                                      double t_sample, const AnalysisConfig& config = {});

struct DeltaPolynomial {
  Complex coeff_const;
  Complex coeff_leading;
  double defect = 0.0;
  std::string diagnostic;
};

DeltaPolynomial delta_polynomial_structure(const OperatorSpec& spec, double lambda,
                                           const MonodromyConfig& config = {});

/// Ordinary least squares slope of log y against log x.
double log_log_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace fpt
