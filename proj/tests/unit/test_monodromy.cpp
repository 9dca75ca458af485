#include "doctest.h"
#include "oracles.hpp"

#include <algorithm>

#include "floquet_pt/errors.hpp"
#include "floquet_pt/linalg.hpp"
#include "floquet_pt/monodromy.hpp"

using namespace fpt;

namespace {

// e^{i kappa} over the n roots of kappa^n = lambda
std::vector<Complex> free_multipliers(int n, Complex lambda) {
  std::vector<Complex> out;
  const Complex root = std::pow(lambda, 1.0 / n);
  for (int q = 0; q < n; ++q) out.push_back(std::exp(Complex(0.0, 1.0) * root * std::polar(1.0, kTwoPi * q / n)));
  return out;
}

double match_distance(std::vector<Complex> a, std::vector<Complex> b) {
  double worst = 0.0;
  for (auto z : a) {
    auto it = std::min_element(b.begin(), b.end(), [&](Complex x, Complex y) { return std::abs(x - z) < std::abs(y - z); });
    worst = std::max(worst, std::abs(*it - z) / std::max(1.0, std::abs(z)));
    b.erase(it);
  }
  return worst;
}

}  // namespace

TEST_CASE("free multipliers are e^{i kappa}") {
  for (int n : {3, 4, 5})
    for (Complex lambda : {Complex(50.0, 0.0), Complex(-20.0, 0.0), Complex(3.0, 4.0)})
      CHECK(match_distance(multipliers(test::free_spec(n), lambda), free_multipliers(n, lambda)) < 1e-8);
}

TEST_CASE("fundamental matrix matches an independent RK4 integration") {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 3; ++trial) {
    const auto spec = test::random_pt_spec(rng, 3 + trial % 2, 1 + trial % 2);
    const Complex lambda(12.0, 1.5);
    MonodromyConfig cfg;
    cfg.ode_tol = 1e-12;
    const auto rec = fundamental_matrix(spec, lambda, cfg);
    const ComplexMatrix oracle = test::rk4_monodromy(spec, lambda, 4000);
    CHECK((rec.M - oracle).norm() <= 1e-7 * oracle.norm());
    const Complex det_direct = (oracle - std::polar(1.0, 0.9) * ComplexMatrix::Identity(oracle.rows(), oracle.rows())).determinant();
    const Complex det_cyclic = char_det(spec, lambda, 0.9, cfg);
    CHECK(std::abs(det_cyclic - det_direct) <= 1e-6 * std::max(1.0, std::abs(det_direct)));
  }
}

TEST_CASE("Liouville: det M = 1 without a y^(n-1) term") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> ul(-60.0, 200.0);
  for (int trial = 0; trial < 4; ++trial) {
    const auto spec = test::random_pt_spec(rng, 3 + trial % 2, 1 + trial / 2);
    const auto rec = fundamental_matrix(spec, ul(rng));
    CHECK(std::abs(rec.det_M - 1.0) < 1e-8);
  }
}

TEST_CASE("membership on the free quartic") {
  const auto spec = test::free_spec(4);
  const auto inside = spectrum_membership(spec, 100.0);
  CHECK(inside.member);
  REQUIRE(inside.witness_t);
  // kappa = 100^{1/4} mod 2 pi
  const double kappa = std::pow(100.0, 0.25);
  const double t = std::fmod(kappa, kTwoPi);
  CHECK(std::min(std::abs(*inside.witness_t - t), std::abs(*inside.witness_t - (kTwoPi - t))) < 1e-6);
  CHECK_FALSE(spectrum_membership(spec, -10.0).member);
}

TEST_CASE("Bloch roots refined from a nearby seed") {
  const auto spec = test::free_spec(4);
  const double t = 0.5, exact = std::pow(kTwoPi + t, 4);
  const Complex root = refine_bloch_root(spec, exact + 2.0, t);
  CHECK(std::abs(root - exact) < 1e-8 * exact);
  CHECK(std::abs(char_det(spec, root, t)) < 1e-6);
}

TEST_CASE("stiffness cap") {
  MonodromyConfig cfg;
  cfg.lambda_cap = 1e3;
  try {
    fundamental_matrix(test::free_spec(3), 5e3, cfg);
    FAIL("expected LambdaTooLarge");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::LambdaTooLarge);
  }
}
