// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

#include "oracles.hpp"

#include "floquet_pt/analysis.hpp"
#include "floquet_pt/bloch.hpp"
#include "floquet_pt/errors.hpp"
#include "floquet_pt/linalg.hpp"
#include "floquet_pt/monodromy.hpp"
#include "floquet_pt/unperturbed.hpp"

using namespace fpt;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (pass) detail << "failed: ";
      else detail << "; ";
      detail << what;
      pass = false;
    }
  }
};

using Clock = std::chrono::steady_clock;

int failures = 0;

void criterion(int id, const char* title, double budget_s, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto start = Clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.require(false, std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  if (budget_s > 0.0) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "runtime %.1f s over the %.0f s budget", secs, budget_s);
    o.require(secs < budget_s, buf);
  }
  if (!o.pass) ++failures;
  std::printf("%s criterion %d: %s (%.1f s)%s%s\n", o.pass ? "PASS" : "FAIL", id, title, secs,
              o.detail.str().empty() ? "" : " :: ", o.detail.str().c_str());
  std::fflush(stdout);
}

double rel_err(Complex got, Complex want) { return std::abs(got - want) / std::max(1.0, std::abs(want)); }

std::vector<OperatorSpec> random_suite() {
  std::mt19937_64 rng(20240601);
  std::vector<OperatorSpec> out;
  for (int q = 0; q < 20; ++q) out.push_back(test::random_pt_spec(rng, 3 + q % 2, 1 + (q / 2) % 2));
  return out;
}

}  // namespace

int main() {
  const auto suite = random_suite();

  criterion(1, "free operator exactness", 30.0, [](Outcome& o) {
    const auto spec = test::free_spec(4);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> ut(0.0, kTwoPi);
    GalerkinConfig gal;
    MonodromyConfig mono;
    mono.lambda_cap = 1e8;
    double worst_g = 0.0, worst_m = 0.0;
    for (int q = 0; q < 16; ++q) {
      const double t = ut(rng);
      const auto set = bloch_eigenvalues(spec, t, gal, SpectralDisk{{0.0, 0.0}, std::pow(kTwoPi * 11 + t, 4)});
      for (int k = -10; k <= 10; ++k) {
        const double exact = std::pow(kTwoPi * k + t, 4);
        double best = std::numeric_limits<double>::infinity();
        for (auto z : set.values) best = std::min(best, rel_err(z, exact));
        worst_g = std::max(worst_g, best);
        worst_m = std::max(worst_m, rel_err(refine_bloch_root(spec, exact * (1.0 + 1e-4), t, mono), exact));
      }
    }
    o.detail << "galerkin rel " << worst_g << ", monodromy rel " << worst_m;
    o.require(worst_g <= 1e-8, "galerkin eigenvalue error");
    o.require(worst_m <= 1e-8, "monodromy eigenvalue error");
    for (Engine e : {Engine::Galerkin, Engine::Monodromy}) {
      AnalysisConfig cfg;
      cfg.engine = e;
      const auto inside = scan_real_axis(spec, 0.0, 500.0, 0.5, cfg);
      const auto below = scan_real_axis(spec, -100.0, -1.0, 0.5, cfg);
      o.require(inside.gaps.empty(), to_string(e) + " found gaps in [0, 500]");
      o.require(below.gaps.size() == 1 && below.gaps[0].interval.lo == -100.0 && below.gaps[0].interval.hi == -1.0,
                to_string(e) + " did not report [-100, -1] as one gap");
    }
  });

  criterion(2, "constant-coefficient exactness (Jordan data)", 30.0, [](Outcome& o) {
    RealMatrix c(3, 3);
    c << 5, 1, 0, 0, 5, 0, 0, 0, 1;
    const auto spec = test::constant_spec(3, c, 0.0);
    const auto st = spectral_structure(mean_matrix(spec));
    o.require(st.r == 2, "r != 2");
    GalerkinConfig gal;
    double worst = 0.0;
    int clusters = 0;
    for (double t : {-0.7, 0.3, 1.9, 3.6, 5.1}) {
      const auto set = bloch_eigenvalues(spec, t, gal, SpectralDisk{{0.0, 0.0}, 1e5});
      std::vector<std::pair<Complex, int>> want;
      for (int k = -30; k <= 30; ++k)
        for (const auto& e : st.entries) {
          const Complex v = mu_kj(3, e.mu, k, t);
          if (std::abs(v) < 1e5) want.push_back({v, e.algebraic});
        }
      o.require(set.clusters.size() == want.size(), "cluster count differs from the band count");
      for (const auto& [v, mult] : want) {
        const BlochCluster* best = nullptr;
        for (const auto& cl : set.clusters)
          if (!best || std::abs(cl.value - v) < std::abs(best->value - v)) best = &cl;
        if (!best) continue;
        worst = std::max(worst, rel_err(best->value, v));
        if (best->multiplicity != mult) o.require(false, "multiplicity mismatch");
        ++clusters;
      }
    }
    o.detail << clusters << " bands, worst rel " << worst << ", r = " << st.r;
    o.require(worst <= 1e-8, "eigenvalue error");
  });

  criterion(3, "conjugate symmetry of Bloch sets (20 random PT specs)", 0.0, [&](Outcome& o) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> ut(-1.0, kTwoPi - 1.0);
    double worst = 0.0, worst_c = 0.0;
    int sets = 0;
    for (const auto& spec : suite)
      for (int q = 0; q < 3; ++q) {
        const double t = ut(rng);
        const auto set = bloch_eigenvalues(spec, t, {}, SpectralDisk{{0.0, 0.0}, 5e3});
        const auto res = conjugate_symmetry_check(set, 1e-6);
        worst = std::max(worst, res.max_defect);
        o.require(res.symmetric, "asymmetric set");
        // same truncation in complex arithmetic, where pairing is not structural
        GalerkinConfig gal;
        BlochSet general;
        for (auto z : eig_complex(assemble_galerkin(spec, t, gal)).values)
          if (std::abs(z) < 5e3) general.values.push_back(z);
        general.clusters = cluster_eigenvalues(general.values, gal.cluster_tol);
        const auto res_c = conjugate_symmetry_check(general, 1e-6);
        worst_c = std::max(worst_c, res_c.max_defect);
        o.require(res_c.symmetric, "asymmetric set (complex arithmetic)");
        ++sets;
      }
    o.detail << sets << " sets, worst defect " << worst << " (complex arithmetic " << worst_c << ")";
  });

  criterion(4, "Liouville identity and characteristic polynomial ends", 0.0, [&](Outcome& o) {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> ul(-200.0, 200.0);
    double worst_det = 0.0, worst_poly = 0.0;
    for (const auto& spec : suite) {
      for (int q = 0; q < 50; ++q) worst_det = std::max(worst_det, std::abs(fundamental_matrix(spec, ul(rng)).det_M - 1.0));
      const double lead = (spec.n() * spec.m()) % 2 == 0 ? 1.0 : -1.0;
      for (int q = 0; q < 10; ++q) {
        const auto d = delta_polynomial_structure(spec, ul(rng));
        worst_poly = std::max({worst_poly, std::abs(d.coeff_const - 1.0), std::abs(d.coeff_leading - lead)});
      }
    }
    o.detail << "max |det M - 1| " << worst_det << ", max end-coefficient deviation " << worst_poly;
    o.require(worst_det <= 1e-8, "Liouville");
    o.require(worst_poly <= 1e-6, "polynomial structure");
  });

  criterion(5, "Galerkin (K = 48) against monodromy-refined eigenvalues", 300.0, [&](Outcome& o) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> ut(-1.0, kTwoPi - 1.0);
    GalerkinConfig gal;
    gal.K = 48;
    gal.refine = true;
    MonodromyConfig mono;
    mono.ode_tol = 1e-12;
    double worst = 0.0;
    int count = 0;
    for (std::size_t s = 0; s < 10; ++s) {
      const double t = ut(rng);
      const auto set = bloch_eigenvalues(suite[s], t, gal, SpectralDisk{{0.0, 0.0}, 5e4});
      for (const auto& cl : set.clusters) {
        if (cl.multiplicity != 1) continue;
        worst = std::max(worst, std::abs(refine_bloch_root(suite[s], cl.value, t, mono) - cl.value));
        ++count;
      }
    }
    o.detail << count << " eigenvalues, worst abs diff " << worst;
    o.require(count > 0, "nothing compared");
    o.require(worst <= 1e-6, "disagreement");
  });

  criterion(6, "localization decay", 0.0, [](Outcome& o) {
    std::vector<int> ks;
    for (int k = 8; k <= 32; ++k) ks.push_back(k);
    AnalysisConfig cfg;
    cfg.galerkin.K = 48;
    const auto odd_spec = test::two_level_cubic();
    for (int j = 0; j < 2; ++j) {
      const auto r = localization_decay(odd_spec, j, ks, 1.0, cfg);
      o.detail << "odd j=" << j << " slope " << r.fitted_slope << "; ";
      o.require(r.fitted_slope <= 0.25, "odd slope above 0.25");
    }
    const auto even = localization_decay(test::cosine_spec(4, 1.0), 0, ks, 1.0, cfg);
    o.detail << "even slope " << even.fitted_slope;
    o.require(even.fitted_slope <= 1.25, "even slope above 1.25");
  });

  criterion(7, "real-axis coverage of the two-level cubic", 0.0, [](Outcome& o) {
    const auto spec = test::two_level_cubic();
    AnalysisConfig cfg;
    cfg.engine = Engine::Monodromy;
    cfg.monodromy.unimod_tol = 1e-6;
    const auto first = verify_real_coverage(spec, 0.5, 3000.0, 0.5, cfg);
    o.require(std::isfinite(first.H_effective), "top of the range is not covered");
    if (!std::isfinite(first.H_effective)) return;
    const auto second = verify_real_coverage(spec, first.H_effective, 3000.0, 0.5, cfg);
    o.detail << "H_effective " << first.H_effective << ", worst defect " << second.worst_defect;
    o.require(second.covered, "not covered on +-[H_effective, 3000]");
  });

  criterion(8, "gap containment for the quartic cosine potential", 600.0, [](Outcome& o) {
    for (double a : {0.5, 1.0}) {
      const auto spec = test::cosine_spec(4, a);
      AnalysisConfig cfg;
      cfg.min_slope_points = 2;
      const auto r = scan_real_axis(spec, 50.0, std::pow(12 * kPi, 4), 1e-6, cfg);
      const auto c = verify_gap_containment(r, spectral_structure(mean_matrix(spec)), 4, cfg);
      o.detail << "a=" << a << ": " << r.gaps.size() << " gaps, slope " << c.decay_slope << " over " << c.decay_points
               << " l values; ";
      for (const auto& g : r.gaps) {
        const bool ok = g.nearest_window && g.nearest_window->contains(g.interval) &&
                        std::abs(g.nearest_window->center - std::pow(kPi * g.nearest_window->l, 4)) < 1e-9 * g.nearest_window->center;
        o.require(ok, "gap outside its window");
      }
      o.require(!r.gaps.empty(), "no gaps found");
      o.require(c.all_contained, "containment");
      o.require(c.offsets_decay && c.decay_slope < 0.0, "offsets do not decrease");
    }
  });

  criterion(9, "condition (27) checker", 0.0, [](Outcome& o) {
    const std::vector<double> good{0.0, 1.0, 5.0}, bad{0.0, 1.0, 2.0};
    const auto g = check_condition_27(structure_from_real_eigenvalues(good));
    const auto b = check_condition_27(structure_from_real_eigenvalues(bad));
    const auto og = test::condition27_oracle(good), ob = test::condition27_oracle(bad);
    o.require(g.holds && og.holds, "{0,1,5} should hold");
    o.require(!b.holds && !ob.holds, "{0,1,2} should fail");
    o.require(b.assignment == std::array<int, 3>{2, 1, 0}, "equalizing assignment is not (2,1,0)");
    o.require(ob.first_assignment && *ob.first_assignment == b.assignment, "oracle assignment differs");
    o.detail << "{0,1,2} equalized by (" << b.assignment[0] << "," << b.assignment[1] << "," << b.assignment[2] << ")";
  });

  criterion(10, "branch crossing near mu_{k,j}(t0), k = 10", 0.0, [](Outcome& o) {
    const auto spec = test::two_level_cubic();
    const auto st = spectral_structure(mean_matrix(spec));
    Calibration calib;
    GalerkinConfig gal;
    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> ut(-1.0, kTwoPi - 1.0);
    const int k = 10;
    const double h = lemma1_hk(3, k, epsilon_k(spec, st, k, calib));
    int traced = 0;
    double worst_im = 0.0;
    for (int j : st.real_odd)
      for (int q = 0; q < 5; ++q) {
        const double t0 = ut(rng);
        const auto curve = trace_branches(spec, st, {k, j}, t0, h, kDefaultTraceSteps, gal, calib);
        const double lambda = mu_kj(3, st.entries[j].mu, k, t0).real();
        const auto hits = branch_crossings(spec, st, curve, lambda, gal, calib);
        bool real_hit = false;
        for (const auto& c : hits) {
          worst_im = std::max(worst_im, std::abs(c.value.imag()));
          real_hit = real_hit || std::abs(c.value.imag()) <= 1e-6;
        }
        o.require(real_hit, "no real crossing at t0 = " + std::to_string(t0));
        ++traced;
      }
    o.detail << traced << " traces, max |Im| at crossing " << worst_im;
  });

  std::printf("%s: %d criterion(s) failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
