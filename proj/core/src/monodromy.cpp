#include "floquet_pt/monodromy.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include <boost/numeric/odeint.hpp>

#include "floquet_pt/errors.hpp"
#include "floquet_pt/linalg.hpp"

namespace fpt {

namespace {

namespace odeint = boost::numeric::odeint;
using State = std::vector<Complex>;

struct HarmonicTerm {
  int v;
  int l;
  ComplexMatrix h;  // epsilon-weighted
};

// First-order form of (-i)^n Y^(n) + sum_v (-i)^{n-v} H_v Y^(n-v) = lambda Y in the
// scaled variables Z_nu = Y^(nu) / s^nu.
class ShootingSystem {
 public:
  ShootingSystem(const OperatorSpec& spec, Complex lambda, double scale)
      : n_(spec.n()), m_(spec.m()), d_(spec.n() * spec.m()), scale_(scale) {
    const Complex i_unit{0.0, 1.0};
    const Complex top = std::pow(i_unit, n_) / std::pow(scale, n_ - 1);
    lambda_coef_ = top * lambda;
    order_coef_.assign(n_ + 1, Complex{0.0, 0.0});
    for (int v = 2; v <= n_; ++v) order_coef_[v] = top * std::pow(-i_unit, n_ - v) * std::pow(scale, n_ - v);
    for (const auto& s : spec.coefficients())
      for (const auto& [l, mat] : s.harmonics) {
        const double w = (s.order == 2 && l == 0) ? 1.0 : spec.epsilon();
        if (w == 0.0) continue;
        terms_.push_back({s.order, l, (w * mat).cast<Complex>()});
      }
    coef_.assign(n_ + 1, ComplexMatrix::Zero(m_, m_));
  }

  void operator()(const State& z, State& dz, double x) {
    for (int v = 2; v <= n_; ++v) coef_[v].setZero();
    for (const auto& term : terms_) coef_[term.v] += std::polar(1.0, kTwoPi * term.l * x) * term.h;

    Eigen::Map<const ComplexMatrix> Z(z.data(), d_, d_);
    Eigen::Map<ComplexMatrix> dZ(dz.data(), d_, d_);
    if (n_ > 1) dZ.topRows(d_ - m_) = scale_ * Z.bottomRows(d_ - m_);
    auto last = dZ.bottomRows(m_);
    last = lambda_coef_ * Z.topRows(m_);
    for (int v = 2; v <= n_; ++v) {
      if (coef_[v].isZero(0.0)) continue;
      last.noalias() -= order_coef_[v] * (coef_[v] * Z.middleRows((n_ - v) * m_, m_));
    }
  }

  [[nodiscard]] int dimension() const noexcept { return d_; }

 private:
  int n_;
  int m_;
  int d_;
  double scale_;
  Complex lambda_coef_;
  std::vector<Complex> order_coef_;
  std::vector<HarmonicTerm> terms_;
  std::vector<ComplexMatrix> coef_;
};

struct Propagation {
  double scale = 1.0;
  std::vector<ComplexMatrix> segments;  // scaled propagators over consecutive pieces of [0, 1]
};

double growth_rate(const OperatorSpec& spec, double scale) {
  double rate = scale;
  for (const auto& s : spec.coefficients()) {
    double norm = 0.0;
    for (const auto& [_, mat] : s.harmonics) norm += mat.cwiseAbs().maxCoeff() * spec.m();
    if (norm > 0.0) rate = std::max(rate, std::pow(norm, 1.0 / s.order));
  }
  return rate + 1.0;
}

Propagation propagate(const OperatorSpec& spec, Complex lambda, const MonodromyConfig& config) {
  if (!(std::abs(lambda) <= config.lambda_cap))
    throw Error(ErrorCode::LambdaTooLarge, "|lambda| = " + std::to_string(std::abs(lambda)) + " exceeds the cap " +
                                               std::to_string(config.lambda_cap));
  Propagation out;
  out.scale = std::max(1.0, std::pow(std::abs(lambda), 1.0 / spec.n()));
  ShootingSystem system(spec, lambda, out.scale);
  const int d = system.dimension();
  const double rate = growth_rate(spec, out.scale);
  const int pieces = std::max(1, static_cast<int>(std::ceil(rate / config.segment_growth)));

  auto stepper = odeint::make_controlled(config.ode_tol, config.ode_tol, odeint::runge_kutta_fehlberg78<State>());
  long accepted = 0;
  double dt = 0.05 / rate;
  for (int piece = 0; piece < pieces; ++piece) {
    const double a = static_cast<double>(piece) / pieces;
    const double b = static_cast<double>(piece + 1) / pieces;
    State z(static_cast<std::size_t>(d) * d, Complex{0.0, 0.0});
    for (int i = 0; i < d; ++i) z[static_cast<std::size_t>(i) * d + i] = 1.0;
    double x = a;
    int rejected_in_row = 0;
    while (b - x > 1e-15) {
      double step = std::min(dt, b - x);
      const bool clamped = step < dt;
      if (step < 1e-14 && !clamped)
        throw Error(ErrorCode::StepSizeUnderflow, "step size underflow at x = " + std::to_string(x));
      const auto result = stepper.try_step(std::ref(system), z, x, step);
      if (result == odeint::success) {
        rejected_in_row = 0;
        if (!clamped) dt = step;
        if (++accepted > config.max_steps)
          throw Error(ErrorCode::ToleranceNotMet, "step budget exhausted before reaching x = 1");
      } else {
        dt = step;
        if (++rejected_in_row > 200)
          throw Error(ErrorCode::StepSizeUnderflow, "repeated step rejection at x = " + std::to_string(x));
      }
    }
    out.segments.push_back(Eigen::Map<const ComplexMatrix>(z.data(), d, d));
  }
  return out;
}

ComplexMatrix product(const Propagation& p) {
  ComplexMatrix total = p.segments.front();
  for (std::size_t i = 1; i < p.segments.size(); ++i) total = p.segments[i] * total;
  return total;
}

}  // namespace

MonodromyRecord fundamental_matrix(const OperatorSpec& spec, Complex lambda, const MonodromyConfig& config) {
  const Propagation p = propagate(spec, lambda, config);
  const ComplexMatrix scaled = product(p);
  MonodromyRecord record;
  record.lambda = lambda;
  record.segments = static_cast<int>(p.segments.size());
  record.scale = p.scale;
  record.det_M = {1.0, 0.0};
  for (const auto& seg : p.segments) record.det_M *= det_complex(seg);
  record.multipliers = eig_complex(scaled).values;

  const int n = spec.n();
  const int m = spec.m();
  record.M = scaled;
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) record.M.block(r * m, c * m, m, m) *= std::pow(p.scale, r - c);
  return record;
}

Complex char_det(const OperatorSpec& spec, Complex lambda, double t, const MonodromyConfig& config) {
  const Propagation p = propagate(spec, lambda, config);
  const int pieces = static_cast<int>(p.segments.size());
  const int d = static_cast<int>(p.segments.front().rows());
  const Complex z = std::polar(1.0, t);
  ComplexMatrix b = ComplexMatrix::Zero(pieces * d, pieces * d);
  for (int r = 0; r < pieces; ++r) {
    b.block(r * d, r * d, d, d) = p.segments[r];
    if (r + 1 < pieces) b.block(r * d, (r + 1) * d, d, d) = -ComplexMatrix::Identity(d, d);
  }
  b.block((pieces - 1) * d, 0, d, d) -= z * ComplexMatrix::Identity(d, d);
  return det_complex(b);
}

std::vector<Complex> multipliers(const OperatorSpec& spec, Complex lambda, const MonodromyConfig& config) {
  return fundamental_matrix(spec, lambda, config).multipliers;
}

Membership spectrum_membership(const OperatorSpec& spec, double lambda, const MonodromyConfig& config) {
  const Propagation p = propagate(spec, lambda, config);
  const ComplexMatrix scaled = product(p);
  const auto eig = eig_complex(scaled, std::numeric_limits<double>::infinity(), true);
  const auto kappa = eigenvalue_condition_numbers(scaled, eig);

  Membership out;
  double best_score = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < eig.values.size(); ++i) {
    const double defect = std::abs(std::abs(eig.values[i]) - 1.0);
    const double cond = std::clamp(std::isfinite(kappa[i]) ? kappa[i] : config.condition_cap, 1.0,
                                   config.condition_cap);
    const double score = defect / cond;
    if (score < best_score) {
      best_score = score;
      out.best_defect = defect;
      out.condition = cond;
      double arg = std::arg(eig.values[i]);
      if (arg < 0.0) arg += kTwoPi;
      out.witness_t = arg;
    }
  }
  out.member = out.best_defect <= config.unimod_tol * out.condition;
  if (!out.member) out.witness_t.reset();
  return out;
}

Complex refine_bloch_root(const OperatorSpec& spec, Complex seed, double t, const MonodromyConfig& config) {
  Complex x0 = seed;
  Complex x1 = seed + 1e-7 * (1.0 + std::abs(seed));
  Complex f0 = char_det(spec, x0, t, config);
  Complex f1 = char_det(spec, x1, t, config);
  Complex best = std::abs(f0) <= std::abs(f1) ? x0 : x1;
  double best_f = std::min(std::abs(f0), std::abs(f1));
  for (int it = 0; it < 40; ++it) {
    if (f1 == f0) break;
    const Complex step = f1 * (x1 - x0) / (f1 - f0);
    x0 = x1;
    f0 = f1;
    x1 = x1 - step;
    f1 = char_det(spec, x1, t, config);
    if (std::abs(f1) < best_f) {
      best_f = std::abs(f1);
      best = x1;
    }
    if (std::abs(step) <= 1e-14 * (1.0 + std::abs(x1)) || f1 == Complex{0.0, 0.0}) break;
  }
  return best;
}

}  // namespace fpt
