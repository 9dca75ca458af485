#include "doctest.h"
#include "oracles.hpp"

#include "floquet_pt/coefficients.hpp"
#include "floquet_pt/errors.hpp"

using namespace fpt;

namespace {

RawSeries raw(int order, int l, std::vector<std::vector<Complex>> matrix) {
  RawSeries s;
  s.order = order;
  s.harmonics.push_back({l, std::move(matrix)});
  return s;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an fpt::Error");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("build_spec rejects malformed input") {
  const std::vector<RawSeries> none;
  CHECK(code_of([&] { build_spec(2, 1, none, 1.0); }) == ErrorCode::OrderTooLow);
  CHECK(code_of([&] { build_spec(4, 0, none, 1.0); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([&] { build_spec(4, 1, none, 1.5); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([&] { build_spec(4, 1, {raw(5, 0, {{1.0}})}, 1.0); }) == ErrorCode::OrderOutOfRange);
  CHECK(code_of([&] { build_spec(4, 1, {raw(1, 0, {{1.0}})}, 1.0); }) == ErrorCode::OrderOutOfRange);
  CHECK(code_of([&] { build_spec(4, 1, {raw(2, 40, {{1.0}})}, 1.0); }) == ErrorCode::FrequencyTooLarge);
  CHECK(code_of([&] { build_spec(4, 2, {raw(2, 0, {{1.0}})}, 1.0); }) == ErrorCode::DimensionMismatch);
  CHECK(code_of([&] { build_spec(4, 1, {raw(2, 1, {{Complex(0.0, 0.3)}})}, 1.0); }) == ErrorCode::NotPTSymmetric);
  CHECK(code_of([&] {
          build_spec(4, 1, {raw(2, 0, {{std::numeric_limits<double>::quiet_NaN()}})}, 1.0);
        }) == ErrorCode::InvalidArgument);
  RawSeries dup = raw(2, 1, {{1.0}});
  dup.harmonics.push_back({1, {{2.0}}});
  CHECK(code_of([&] { build_spec(4, 1, {dup}, 1.0); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([&] { build_spec(4, 1, {raw(2, 0, {{1.0}}), raw(2, 1, {{1.0}})}, 1.0); }) ==
        ErrorCode::InvalidArgument);
}

TEST_CASE("imaginary parts within realness_tol are accepted") {
  SpecLimits limits;
  limits.realness_tol = 1e-12;
  const auto spec = build_spec(3, 1, {raw(2, 1, {{Complex(0.5, 1e-14)}})}, 1.0, limits);
  CHECK(fourier_coefficient(spec, 2, 1)(0, 0) == doctest::Approx(0.5));
}

TEST_CASE("cosine potential evaluates pointwise") {
  const auto spec = test::cosine_spec(4, 0.75);
  for (double x : {0.0, 0.1, 0.37, 0.5, 0.92}) {
    const Complex p = evaluate_coefficient(spec, 2, x)(0, 0);
    CHECK(p.real() == doctest::Approx(1.5 * std::cos(kTwoPi * x)).epsilon(1e-14));
    CHECK(std::abs(p.imag()) < 1e-14);
  }
  CHECK(spec.max_frequency() == 1);
  CHECK(mean_matrix(spec)(0, 0) == 0.0);
}

TEST_CASE("every real-harmonic spec is PT-symmetric") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ux(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 3 + trial % 2, m = 1 + trial % 3;
    const auto spec = test::random_pt_spec(rng, n, m);
    for (int q = 0; q < 5; ++q) {
      const double x = ux(rng);
      for (int v = 2; v <= n; ++v) {
        const ComplexMatrix a = evaluate_coefficient(spec, v, -x);
        const ComplexMatrix b = evaluate_coefficient(spec, v, x).conjugate();
        CHECK((a - b).norm() <= 1e-12 * (1.0 + a.norm()));
      }
    }
  }
}

TEST_CASE("evaluate_all_coefficients agrees with single evaluation") {
  std::mt19937_64 rng(5);
  const auto spec = test::random_pt_spec(rng, 4, 2);
  const auto all = evaluate_all_coefficients(spec, 0.3);
  REQUIRE(all.size() == 3);
  for (int v = 2; v <= 4; ++v) CHECK((all[v - 2] - evaluate_coefficient(spec, v, 0.3)).norm() < 1e-13);
}

TEST_CASE("epsilon homotopy weights the non-mean part") {
  FourierMatrixSeries p2, p3;
  p2.order = 2;
  p2.harmonics[0] = RealMatrix::Constant(1, 1, 3.0);
  p2.harmonics[2] = RealMatrix::Constant(1, 1, 1.0);
  p3.order = 3;
  p3.harmonics[-1] = RealMatrix::Constant(1, 1, 4.0);
  const auto spec = build_spec(4, 1, std::vector<FourierMatrixSeries>{p2, p3}, 0.25);
  CHECK(effective_harmonic(spec, 2, 0)(0, 0) == doctest::Approx(3.0));
  CHECK(effective_harmonic(spec, 2, 2)(0, 0) == doctest::Approx(0.25));
  CHECK(effective_harmonic(spec, 3, -1)(0, 0) == doctest::Approx(1.0));
  CHECK(effective_harmonic(spec, 4, 0)(0, 0) == 0.0);
  CHECK(fourier_coefficient(spec, 3, -1)(0, 0) == 4.0);
  const auto full = spec.with_epsilon(1.0);
  CHECK(full.epsilon() == 1.0);
  CHECK(effective_harmonic(full, 2, 2)(0, 0) == doctest::Approx(1.0));
  CHECK(spec.series(4) == nullptr);
  CHECK(spec.max_frequency() == 2);
}

TEST_CASE("q_k takes the largest P_2 harmonic at +-2k and +-(2k+1)") {
  FourierMatrixSeries p2;
  p2.order = 2;
  p2.harmonics[1] = RealMatrix::Constant(1, 1, 0.1);
  p2.harmonics[-3] = RealMatrix::Constant(1, 1, -0.7);
  p2.harmonics[4] = RealMatrix::Constant(1, 1, 0.2);
  const auto spec = build_spec(4, 1, std::vector<FourierMatrixSeries>{p2}, 1.0);
  CHECK(compute_qk(spec, 1) == doctest::Approx(0.7));
  CHECK(compute_qk(spec, 2) == doctest::Approx(0.2));
  CHECK(compute_qk(spec, 3) == 0.0);
}
