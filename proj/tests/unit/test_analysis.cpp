#include "doctest.h"
#include "oracles.hpp"

#include <atomic>

#include "floquet_pt/analysis.hpp"
#include "floquet_pt/config_io.hpp"
#include "floquet_pt/errors.hpp"

using namespace fpt;

namespace {

AnalysisConfig with_engine(Engine e) {
  AnalysisConfig cfg;
  cfg.engine = e;
  return cfg;
}

double gap_measure(const GapReport& r) {
  double total = 0.0;
  for (const auto& g : r.gaps) total += g.interval.length();
  return total;
}

void check_report_invariants(const GapReport& r) {
  CHECK(r.coverage_fraction >= 0.0);
  CHECK(r.coverage_fraction <= 1.0);
  for (std::size_t i = 0; i < r.gaps.size(); ++i) {
    CHECK(r.gaps[i].interval.lo < r.gaps[i].interval.hi);
    if (i) CHECK(r.gaps[i - 1].interval.hi < r.gaps[i].interval.lo);
  }
}

}  // namespace

TEST_CASE("grid size and slope fit") {
  CHECK(grid_size(0.0, 1.0, 0.25) == 5);
  CHECK(grid_size(0.0, 1.0, 0.3) == 4);
  CHECK_THROWS_AS(grid_size(1.0, 0.0, 0.1), Error);
  CHECK_THROWS_AS(grid_size(0.0, 1.0, 0.0), Error);
  std::vector<double> x{2, 3, 5, 8, 13}, y;
  for (double v : x) y.push_back(3.0 * std::pow(v, -1.5));
  CHECK(log_log_slope(x, y) == doctest::Approx(-1.5));
  CHECK_THROWS_AS(log_log_slope({1.0}, {1.0}), Error);
}

TEST_CASE("parallel_for visits each index once and rethrows") {
  std::vector<std::atomic<int>> hits(1000);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i]++; });
  for (auto& h : hits) CHECK(h.load() == 1);
  CHECK_THROWS_AS(parallel_for(50, 3, [](std::size_t i) { if (i == 17) throw std::runtime_error("boom"); }),
                  std::runtime_error);
}

TEST_CASE("free quartic scans, both engines") {
  const auto spec = test::free_spec(4);
  for (Engine e : {Engine::Galerkin, Engine::Monodromy}) {
    const auto inside = scan_real_axis(spec, 0.0, 500.0, 0.5, with_engine(e));
    CHECK(inside.gaps.empty());
    CHECK(inside.coverage_fraction == 1.0);
    const auto below = scan_real_axis(spec, -100.0, -1.0, 0.5, with_engine(e));
    REQUIRE(below.gaps.size() == 1);
    CHECK(below.gaps[0].interval.lo == -100.0);
    CHECK(below.gaps[0].interval.hi == -1.0);
    CHECK(below.coverage_fraction == 0.0);
    check_report_invariants(inside);
  }
}

TEST_CASE("engines agree on gap endpoints") {
  const double step = 0.5;
  std::vector<std::pair<OperatorSpec, Interval>> cases{{test::cosine_spec(4, 1.0), {50.0, 2000.0}},
                                                       {test::cosine_spec(4, 0.5), {-20.0, 2000.0}}};
  cases.emplace_back(load_config(test::config_path("pt_quartic_complex.json")).spec, Interval{0.0, 500.0});
  for (const auto& [spec, range] : cases) {
    const auto g = scan_real_axis(spec, range.lo, range.hi, step, with_engine(Engine::Galerkin));
    const auto m = scan_real_axis(spec, range.lo, range.hi, step, with_engine(Engine::Monodromy));
    check_report_invariants(g);
    REQUIRE(g.gaps.size() == m.gaps.size());
    for (std::size_t i = 0; i < g.gaps.size(); ++i) {
      CHECK(std::abs(g.gaps[i].interval.lo - m.gaps[i].interval.lo) <= 2.0 * step);
      CHECK(std::abs(g.gaps[i].interval.hi - m.gaps[i].interval.hi) <= 2.0 * step);
    }
  }
}

TEST_CASE("halving the step keeps every wide gap") {
  const auto spec = test::cosine_spec(4, 1.0);
  for (double step : {0.5, 0.01}) {
    const auto coarse = scan_real_axis(spec, 0.0, 1e5, step);
    const auto fine = scan_real_axis(spec, 0.0, 1e5, step / 2);
    for (const auto& g : coarse.gaps) {
      if (g.interval.length() <= 4.0 * step) continue;
      bool kept = false;
      for (const auto& f : fine.gaps)
        kept = kept || (f.interval.lo < g.interval.hi && g.interval.lo < f.interval.hi);
      CHECK(kept);
    }
  }
}

TEST_CASE("gap containment") {
  const auto st = structure_from_real_eigenvalues({0.0});
  GapReport empty;
  CHECK(verify_gap_containment(empty, st, 4).all_contained);

  GapReport one;
  const double c = std::pow(3 * kPi, 4);
  one.gaps.push_back({{c - 1.0, c + 2.0}, std::nullopt, 0.0});
  const auto res = verify_gap_containment(one, st, 4);
  CHECK(res.all_contained);
  REQUIRE(res.fitted_gamma.count(3));
  CHECK(res.fitted_gamma.at(3) == doctest::Approx(2.0));

  GapReport stray;
  stray.gaps.push_back({{c + 5e3, c + 5e3 + 1.0}, std::nullopt, 0.0});
  CHECK_FALSE(verify_gap_containment(stray, st, 4).all_contained);
  CHECK(verify_gap_containment(stray, st, 4, {}, c + 6e3).all_contained);
}

TEST_CASE("Mathieu quartic gaps sit in the S windows") {
  const auto spec = test::cosine_spec(4, 0.5);
  const auto r = scan_real_axis(spec, 50.0, std::pow(12 * kPi, 4), 1e-6);
  REQUIRE(r.gaps.size() >= 2);
  for (const auto& g : r.gaps) {
    REQUIRE(g.nearest_window);
    CHECK(g.nearest_window->contains(g.interval));
  }
  CHECK(verify_gap_containment(r, spectral_structure(mean_matrix(spec)), 4).all_contained);
}

TEST_CASE("measure of gaps over measure of spectrum on [0, rho]") {
  for (double a : {0.5, 1.0}) {
    const auto spec = test::cosine_spec(4, a);
    const double rho = std::pow(12 * kPi, 4);
    auto ratio = [&](double top) {
      const auto r = scan_real_axis(spec, 0.0, top, 1e-4);
      const double gaps = gap_measure(r);
      return gaps / (top - gaps);
    };
    const double r1 = ratio(rho), r2 = ratio(2 * rho);
    CHECK(r1 <= 0.05);
    CHECK(r2 < r1);
  }
}

TEST_CASE("coverage") {
  const auto bands = test::constant_spec(3, RealMatrix::Constant(1, 1, 1.0), 0.0);
  const auto free_cov = verify_real_coverage(bands, 5.0, 2000.0, 0.5);
  CHECK(free_cov.covered);
  CHECK(free_cov.reports.size() == 2);

  const auto cubic = verify_real_coverage(test::two_level_cubic(), 1.0, 3000.0, 0.5);
  CHECK(cubic.covered);
  CHECK(cubic.H_effective <= 1.0);

  const auto quartic = verify_real_coverage(test::cosine_spec(4, 1.0), 1.0, 2000.0, 0.5);
  CHECK_FALSE(quartic.covered);
  CHECK(quartic.H_effective > 90.0);
}

TEST_CASE("localization") {
  RealMatrix c(2, 2);
  c << 0, 0, 0, 2;
  std::vector<int> ks;
  for (int k = 8; k <= 20; k += 3) ks.push_back(k);
  const auto flat = localization_decay(test::constant_spec(3, c, 0.0), 1, ks, 1.0);
  for (double d : flat.distances) CHECK(d < 1e-6);
  CHECK(flat.theorem2_consistent);

  const auto odd = localization_decay(test::two_level_cubic(), 0, ks, 1.0);
  CHECK(odd.slope_bound == doctest::Approx(0.25));
  CHECK(odd.theorem2_consistent);

  const auto even = localization_decay(test::cosine_spec(4, 1.0), 0, ks, 1.0);
  CHECK(even.slope_bound == doctest::Approx(1.25));
  CHECK(even.theorem2_consistent);

  AnalysisConfig crowded;
  crowded.calib.c = 1e7;
  CHECK_THROWS_AS(localization_decay(test::cosine_spec(4, 1.0), 0, ks, 1.0, crowded), IsolationLostError);
}

TEST_CASE("characteristic polynomial end coefficients") {
  const auto free4 = delta_polynomial_structure(test::free_spec(4), 50.0);
  CHECK(std::abs(free4.coeff_const - 1.0) < 1e-6);
  CHECK(std::abs(free4.coeff_leading - 1.0) < 1e-6);
  CHECK(free4.defect < 1e-6);
  RealMatrix c(2, 2);
  c << 5, 1, 0, 5;
  const auto frozen = delta_polynomial_structure(test::constant_spec(3, c, 0.0), 40.0);
  CHECK(frozen.defect < 1e-6);
  const auto odd = delta_polynomial_structure(test::free_spec(3), 50.0);
  CHECK(std::abs(odd.coeff_leading + 1.0) < 1e-6);
  CHECK_FALSE(odd.diagnostic.empty());
}
