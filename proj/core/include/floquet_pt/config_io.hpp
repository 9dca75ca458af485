#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "floquet_pt/analysis.hpp"
#include "floquet_pt/coefficients.hpp"

namespace fpt {

/// A parsed configuration document: the operator plus every tunable.
struct RunConfig {
  OperatorSpec spec;
  AnalysisConfig analysis;
  SpecLimits limits;
  double structure_tol = kDefaultStructureTol;
};

/// Parse a JSON document of the form
///   { "n": 4, "m": 1, "epsilon": 1,
///     "coefficients": [ { "order": 2, "harmonics": [ { "l": 1, "matrix": [[0.5]] } ] } ],
///     "tolerances": { "K": 24, "ode_tol": 1e-10, ... },
///     "calibration": { "c": 1, "N_config": 8, "c_delta": 1, "slope_slack": 0.25 } }
/// Matrix entries are numbers or [re, im] pairs. Structural problems raise
/// ConfigError; spec validation errors pass through unchanged.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// Inverse of parse_config (real harmonics, every tolerance written out).
std::string config_to_json(const RunConfig& config);

/// %.17g; non-finite values become "inf", "-inf" and "nan".
std::string format_real(double x);

/// RFC 4180 field quoting.
std::string csv_field(const std::string& field);
std::string csv_row(const std::vector<std::string>& fields);

std::string gap_report_json(const GapReport& report);

/// Columns lambda, member, defect, witness_t, one row per retained grid sample.
std::string gap_report_csv(const GapReport& report);

}  // namespace fpt
