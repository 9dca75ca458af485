#include "floquet_pt/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <set>
#include <string>

#include "floquet_pt/errors.hpp"

namespace fpt {

int FourierMatrixSeries::max_frequency() const noexcept {
  int result = 0;
  for (const auto& [l, _] : harmonics) result = std::max(result, std::abs(l));
  return result;
}

const FourierMatrixSeries* OperatorSpec::series(int v) const noexcept {
  for (const auto& s : coefficients_)
    if (s.order == v) return &s;
  return nullptr;
}

int OperatorSpec::max_frequency() const noexcept {
  int result = 0;
  for (const auto& s : coefficients_) result = std::max(result, s.max_frequency());
  return result;
}

OperatorSpec OperatorSpec::with_epsilon(double epsilon) const {
  if (!(epsilon >= 0.0 && epsilon <= 1.0))
    throw Error(ErrorCode::InvalidArgument, "epsilon must lie in [0,1], got " + std::to_string(epsilon));
  OperatorSpec copy = *this;
  copy.epsilon_ = epsilon;
  return copy;
}

OperatorSpec build_spec(int n, int m, const std::vector<RawSeries>& raw, double epsilon,
                        const SpecLimits& limits) {
  if (n <= 2) throw Error(ErrorCode::OrderTooLow, "operator order must exceed 2, got " + std::to_string(n));
  if (m < 1) throw Error(ErrorCode::InvalidArgument, "matrix dimension must be >= 1");
  if (!(epsilon >= 0.0 && epsilon <= 1.0))
    throw Error(ErrorCode::InvalidArgument, "epsilon must lie in [0,1], got " + std::to_string(epsilon));

  OperatorSpec spec;
  spec.n_ = n;
  spec.m_ = m;
  spec.epsilon_ = epsilon;

  std::set<int> seen_orders;
  for (const auto& rs : raw) {
    if (rs.order < 2 || rs.order > n)
      throw Error(ErrorCode::OrderOutOfRange,
                  "coefficient order " + std::to_string(rs.order) + " outside 2.." + std::to_string(n));
    if (!seen_orders.insert(rs.order).second)
      throw Error(ErrorCode::InvalidArgument, "duplicate coefficient order " + std::to_string(rs.order));

    FourierMatrixSeries series;
    series.order = rs.order;
    for (const auto& h : rs.harmonics) {
      if (std::abs(h.l) > limits.max_frequency)
        throw Error(ErrorCode::FrequencyTooLarge, "harmonic " + std::to_string(h.l) + " exceeds L_max = " +
                                                      std::to_string(limits.max_frequency));
      if (static_cast<int>(h.matrix.size()) != m)
        throw Error(ErrorCode::DimensionMismatch, "harmonic " + std::to_string(h.l) + " of P_" +
                                                      std::to_string(rs.order) + " has " +
                                                      std::to_string(h.matrix.size()) + " rows, expected " +
                                                      std::to_string(m));
      RealMatrix mat(m, m);
      for (int i = 0; i < m; ++i) {
        if (static_cast<int>(h.matrix[i].size()) != m)
          throw Error(ErrorCode::DimensionMismatch, "harmonic " + std::to_string(h.l) + " of P_" +
                                                        std::to_string(rs.order) + " row " + std::to_string(i) +
                                                        " has wrong length");
        for (int j = 0; j < m; ++j) {
          const Complex z = h.matrix[i][j];
          if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            throw Error(ErrorCode::InvalidArgument, "non-finite harmonic entry");
          if (std::abs(z.imag()) > limits.realness_tol)
            throw Error(ErrorCode::NotPTSymmetric, "harmonic " + std::to_string(h.l) + " of P_" +
                                                       std::to_string(rs.order) +
                                                       " has a non-real entry; PT symmetry requires real harmonics");
          mat(i, j) = z.real();
        }
      }
      if (!series.harmonics.emplace(h.l, std::move(mat)).second)
        throw Error(ErrorCode::InvalidArgument, "duplicate harmonic " + std::to_string(h.l) + " in P_" +
                                                    std::to_string(rs.order));
    }
    spec.coefficients_.push_back(std::move(series));
  }
  std::sort(spec.coefficients_.begin(), spec.coefficients_.end(),
            [](const auto& a, const auto& b) { return a.order < b.order; });
  return spec;
}

OperatorSpec build_spec(int n, int m, const std::vector<FourierMatrixSeries>& series, double epsilon,
                        const SpecLimits& limits) {
  std::vector<RawSeries> raw;
  raw.reserve(series.size());
  for (const auto& s : series) {
    RawSeries rs;
    rs.order = s.order;
    for (const auto& [l, mat] : s.harmonics) {
      RawHarmonic h;
      h.l = l;
      h.matrix.assign(mat.rows(), std::vector<Complex>(mat.cols()));
      for (Eigen::Index i = 0; i < mat.rows(); ++i)
        for (Eigen::Index j = 0; j < mat.cols(); ++j) h.matrix[i][j] = mat(i, j);
      rs.harmonics.push_back(std::move(h));
    }
    raw.push_back(std::move(rs));
  }
  return build_spec(n, m, raw, epsilon, limits);
}

namespace {

void check_order(const OperatorSpec& spec, int v) {
  if (v < 2 || v > spec.n())
    throw Error(ErrorCode::OrderOutOfRange,
                "order " + std::to_string(v) + " outside 2.." + std::to_string(spec.n()));
}

}  // namespace

RealMatrix fourier_coefficient(const OperatorSpec& spec, int v, int l) {
  check_order(spec, v);
  if (const auto* s = spec.series(v)) {
    if (auto it = s->harmonics.find(l); it != s->harmonics.end()) return it->second;
  }
  return RealMatrix::Zero(spec.m(), spec.m());
}

RealMatrix mean_matrix(const OperatorSpec& spec) { return fourier_coefficient(spec, 2, 0); }

RealMatrix effective_harmonic(const OperatorSpec& spec, int v, int l) {
  check_order(spec, v);
  if (v == 2 && l == 0) return mean_matrix(spec);
  return spec.epsilon() * fourier_coefficient(spec, v, l);
}

double compute_qk(const OperatorSpec& spec, int k) {
  double q = 0.0;
  for (int l : {2 * k, -2 * k, 2 * k + 1, -(2 * k + 1)}) {
    const RealMatrix h = fourier_coefficient(spec, 2, l);
    if (h.size() > 0) q = std::max(q, h.cwiseAbs().maxCoeff());
  }
  return q;
}

namespace {

ComplexMatrix evaluate_series(const OperatorSpec& spec, const FourierMatrixSeries* series, int v, double x) {
  const int m = spec.m();
  ComplexMatrix out = ComplexMatrix::Zero(m, m);
  const double eps = spec.epsilon();
  if (series != nullptr) {
    for (const auto& [l, mat] : series->harmonics) {
      const double weight = (v == 2 && l == 0) ? 1.0 : eps;
      const Complex phase = std::polar(weight, kTwoPi * static_cast<double>(l) * x);
      out += phase * mat.cast<Complex>();
    }
  }
  return out;
}

}  // namespace

ComplexMatrix evaluate_coefficient(const OperatorSpec& spec, int v, double x) {
  check_order(spec, v);
  return evaluate_series(spec, spec.series(v), v, x);
}

std::vector<ComplexMatrix> evaluate_all_coefficients(const OperatorSpec& spec, double x) {
  std::vector<ComplexMatrix> out;
  out.reserve(spec.n() - 1);
  for (int v = 2; v <= spec.n(); ++v) out.push_back(evaluate_series(spec, spec.series(v), v, x));
  return out;
}

}  // namespace fpt
