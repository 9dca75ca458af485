#include "doctest.h"
#include "oracles.hpp"

#include "floquet_pt/config_io.hpp"
#include "floquet_pt/errors.hpp"

using namespace fpt;

namespace {

ErrorCode parse_code(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected a parse failure");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("full document parses") {
  const auto cfg = parse_config(R"({
    "n": 4, "m": 2, "epsilon": 0.5,
    "coefficients": [
      {"order": 2, "harmonics": [{"l": 0, "matrix": [[1, 0.5], [0, 3]]}, {"l": -1, "matrix": [[[0.2, 0], 0], [0, 1]]}]},
      {"order": 4, "harmonics": [{"l": 2, "matrix": [[1, 0], [0, 1]]}]}
    ],
    "tolerances": {"K": 30, "ode_tol": 1e-11, "unimod_tol": 1e-7, "engine": "monodromy", "t_grid": 32},
    "calibration": {"c": 2, "N_config": 10, "c_delta": 0.5, "slope_slack": 0.3}
  })");
  CHECK(cfg.spec.n() == 4);
  CHECK(cfg.spec.m() == 2);
  CHECK(cfg.spec.epsilon() == 0.5);
  CHECK(fourier_coefficient(cfg.spec, 2, -1)(0, 0) == doctest::Approx(0.2));
  CHECK(fourier_coefficient(cfg.spec, 4, 2)(1, 1) == 1.0);
  CHECK(cfg.analysis.galerkin.K == 30);
  CHECK(cfg.analysis.monodromy.ode_tol == 1e-11);
  CHECK(cfg.analysis.monodromy.unimod_tol == 1e-7);
  CHECK(cfg.analysis.engine == Engine::Monodromy);
  CHECK(cfg.analysis.t_grid == 32);
  CHECK(cfg.analysis.calib.c == 2.0);
  CHECK(cfg.analysis.calib.n_config == 10);

  const auto again = parse_config(config_to_json(cfg));
  CHECK(config_to_json(again) == config_to_json(cfg));
}

TEST_CASE("config errors") {
  CHECK(parse_code("{") == ErrorCode::ConfigError);
  CHECK(parse_code("[]") == ErrorCode::ConfigError);
  CHECK(parse_code(R"({"m": 1})") == ErrorCode::ConfigError);
  CHECK(parse_code(R"({"n": 4})") == ErrorCode::ConfigError);
  CHECK(parse_code(R"({"n": "four", "m": 1})") == ErrorCode::ConfigError);
  CHECK(parse_code(R"({"n": 4, "m": 1, "coefficients": [{"order": 2, "harmonics": [{"l": 1, "matrix": [["x"]]}]}]})") ==
        ErrorCode::ConfigError);
  CHECK(parse_code(R"({"n": 4, "m": 1, "tolerances": {"engine": "magic"}})") == ErrorCode::ConfigError);
  CHECK(parse_code(R"({"n": 4, "m": 1, "tolerances": {"ode_tol": -1}})") == ErrorCode::ConfigError);
  CHECK(parse_code(R"({"n": 4, "m": 1, "coefficients": [{"order": 2, "harmonics": [{"l": 1, "matrix": [[[0, 1]]]}]}]})") ==
        ErrorCode::NotPTSymmetric);
  CHECK(parse_code(R"({"n": 2, "m": 1})") == ErrorCode::OrderTooLow);
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), Error);
}

TEST_CASE("every shipped config loads") {
  for (const char* name : {"free_quartic.json", "jordan_pair.json", "jordan_cubic_m3.json", "cubic_two_level.json",
                           "mathieu_quartic.json", "mathieu_quartic_half.json", "pt_quartic_complex.json"})
    CHECK_NOTHROW(load_config(test::config_path(name)));
}

TEST_CASE("number and CSV formatting") {
  CHECK(format_real(0.1) == "0.10000000000000001");
  CHECK(format_real(-2.0) == "-2");
  CHECK(format_real(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_real(-std::numeric_limits<double>::infinity()) == "-inf");
  CHECK(format_real(std::numeric_limits<double>::quiet_NaN()) == "nan");
  CHECK(csv_field("plain") == "plain");
  CHECK(csv_field("a,b") == "\"a,b\"");
  CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_row({"a", "b,c", ""}) == "a,\"b,c\",\n");
}

TEST_CASE("gap report serialisation") {
  GapReport r;
  r.scan_range = {-10.0, -1.0};
  r.grid_step = 0.5;
  r.gaps.push_back({{-10.0, -1.0}, std::nullopt, 0.0});
  r.samples.push_back({-10.0, false, 0.25, std::nullopt});
  r.samples.push_back({-9.5, true, 1e-12, 1.5});
  const std::string json = gap_report_json(r);
  CHECK(json.find("\"gaps\"") != std::string::npos);
  CHECK(json.find("\"nearest_window\": null") != std::string::npos);
  CHECK(gap_report_csv(r) == "lambda,member,defect,witness_t\n-10,0,0.25,\n-9.5,1,9.9999999999999998e-13,1.5\n");
}
