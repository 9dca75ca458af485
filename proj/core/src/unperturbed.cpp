#include "floquet_pt/unperturbed.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include "floquet_pt/coefficients.hpp"
#include "floquet_pt/errors.hpp"

namespace fpt {

std::string to_string(WindowKind kind) {
  switch (kind) {
    case WindowKind::CollisionK: return "collision-k";
    case WindowKind::CollisionMinusKMinus1: return "collision-(-k-1)";
    case WindowKind::Gap: return "gap-S";
  }
  return "unknown";
}

Complex mu_kj(int n, Complex mu_j, int k, double t) {
  const double x = kTwoPi * k + t;
  return std::pow(x, n) + mu_j * std::pow(x, n - 2);
}

Complex mu_kj_derivative(int n, Complex mu_j, int k, double t) {
  const double x = kTwoPi * k + t;
  const double tail = n >= 3 ? static_cast<double>(n - 2) * std::pow(x, n - 3) : 0.0;
  return static_cast<double>(n) * std::pow(x, n - 1) + mu_j * tail;
}

ExceptionalResult is_exceptional(const SpectralStructure& structure, int n, int k, int j, double t, double tol) {
  if (n <= 2) throw Error(ErrorCode::OrderTooLow, "order must exceed 2");
  if (j < 0 || j >= static_cast<int>(structure.entries.size()))
    throw Error(ErrorCode::InvalidArgument, "eigenvalue index out of range");
  ExceptionalResult out;
  const Complex base = mu_kj(n, structure.entries[j].mu, k, t);
  const int reach = std::abs(k) + n;
  for (int l = -reach; l <= reach; ++l) {
    for (int i = 0; i < static_cast<int>(structure.entries.size()); ++i) {
      if (l == k && i == j) continue;
      const double d = std::abs(base - mu_kj(n, structure.entries[i].mu, l, t));
      if (d <= tol) out.witnesses.push_back({l, i, d});
    }
  }
  out.exceptional = !out.witnesses.empty();
  return out;
}

double epsilon_k(int n, int r, double c, int k, double q_k) {
  if (k == 0) throw Error(ErrorCode::ZeroIndex, "epsilon_k is undefined for k = 0");
  if (r < 1 || !(c > 0.0)) throw Error(ErrorCode::InvalidArgument, "epsilon_k needs r >= 1 and c > 0");
  const double ak = std::abs(static_cast<double>(k));
  const double inv_r = 1.0 / static_cast<double>(r);
  if (n % 2 == 1) return c * std::pow(std::pow(ak, n - 3), inv_r);
  return c * std::pow((1.0 / ak + q_k) * std::pow(ak, n - 2), inv_r);
}

double epsilon_k(const OperatorSpec& spec, const SpectralStructure& structure, int k, const Calibration& calib) {
  return epsilon_k(spec.n(), std::max(structure.r, 1), calib.c, k, compute_qk(spec, k));
}

double delta_k(const OperatorSpec& spec, const SpectralStructure& structure, int k, const Calibration& calib) {
  if (k < 1) throw Error(ErrorCode::IndexTooSmall, "delta_k requires k >= 1");
  const double sum = epsilon_k(spec, structure, k, calib) + epsilon_k(spec, structure, -k, calib) +
                     epsilon_k(spec, structure, -k - 1, calib);
  return calib.c_delta * sum * std::pow(static_cast<double>(k), 1 - spec.n());
}

std::vector<Window> collision_windows(const SpectralStructure& structure, int n, int k, double delta,
                                      std::optional<int> j) {
  if (k < 1) throw Error(ErrorCode::IndexTooSmall, "collision windows require k >= 1");
  if (!(delta > 0.0)) throw Error(ErrorCode::InvalidArgument, "window half-width must be positive");
  if (j && (*j < 0 || *j >= structure.s))
    throw Error(ErrorCode::InvalidArgument, "collision windows need a real eigenvalue index j");
  std::vector<Window> out;
  const int j_lo = j ? *j : 0;
  const int j_hi = j ? *j + 1 : structure.s;
  for (int jj = j_lo; jj < j_hi; ++jj) {
    for (int i = 0; i < structure.s; ++i) {
      const double diff = structure.real_value(i) - structure.real_value(jj);
      out.push_back({diff / (4.0 * n * k * kPi), delta, WindowKind::CollisionK, i, jj, k});
      out.push_back({kPi + diff / (kTwoPi * n * (2.0 * k + n - 1)), delta, WindowKind::CollisionMinusKMinus1, i, jj,
                     k});
    }
  }
  return out;
}

double lemma1_hk(int n, int k, double eps_k) {
  if (k < 2) throw Error(ErrorCode::IndexTooSmall, "h_k requires k >= 2");
  return 2.0 * eps_k * std::pow(kTwoPi * (k - 1), 1 - n);
}

double AdmissibleSet::measure() const noexcept {
  double total = 0.0;
  for (const auto& iv : intervals) total += iv.length();
  return total;
}

AdmissibleSet admissible_t_intervals(const SpectralStructure& structure, int n, int k, int j, double delta_plus_h,
                                     const Calibration& calib) {
  if (k < calib.n_config)
    throw Error(ErrorCode::IndexTooSmall,
                "admissible intervals require k >= N = " + std::to_string(calib.n_config));
  AdmissibleSet out;
  if (structure.s == 0) {
    out.intervals.push_back({kAdmissibleLo, kAdmissibleHi});
    return out;
  }
  const auto windows = collision_windows(structure, n, k, delta_plus_h, j);

  // reduce every window into [lo, hi) modulo 2 pi, splitting at the seam
  std::vector<Interval> pieces;
  for (const auto& w : windows) {
    if (2.0 * w.half_width >= kTwoPi) {
      pieces.push_back({kAdmissibleLo, kAdmissibleHi});
      continue;
    }
    double lo = w.lo();
    lo = kAdmissibleLo + std::fmod(std::fmod(lo - kAdmissibleLo, kTwoPi) + kTwoPi, kTwoPi);
    const double hi = lo + 2.0 * w.half_width;
    if (hi <= kAdmissibleHi) {
      pieces.push_back({lo, hi});
    } else {
      pieces.push_back({lo, kAdmissibleHi});
      pieces.push_back({kAdmissibleLo, hi - kTwoPi});
    }
  }
  std::sort(pieces.begin(), pieces.end(), [](const auto& a, const auto& b) { return a.lo < b.lo; });
  for (const auto& p : pieces) {
    if (!out.removed.empty() && p.lo < out.removed.back().hi) {
      out.windows_disjoint = false;
      out.removed.back().hi = std::max(out.removed.back().hi, p.hi);
    } else {
      out.removed.push_back(p);
    }
  }
  double cursor = kAdmissibleLo;
  for (const auto& r : out.removed) {
    if (r.lo > cursor) out.intervals.push_back({cursor, r.lo});
    cursor = std::max(cursor, r.hi);
  }
  if (cursor < kAdmissibleHi) out.intervals.push_back({cursor, kAdmissibleHi});
  if (out.intervals.empty())
    throw Error(ErrorCode::WindowsOverlapWholeLine,
                "collision windows cover the whole t-range at k = " + std::to_string(k));
  return out;
}

std::vector<Window> gap_windows(const SpectralStructure& structure, int n, int l, double gamma) {
  if (l < 1) throw Error(ErrorCode::IndexTooSmall, "gap windows require l >= 1");
  if (!(gamma > 0.0)) throw Error(ErrorCode::InvalidArgument, "gap window half-width must be positive");
  std::vector<Window> out;
  const double pl = kPi * l;
  for (int j = 0; j < structure.s; ++j)
    for (int i = 0; i <= j; ++i) {
      const double center =
          std::pow(pl, n) + 0.5 * (structure.real_value(i) + structure.real_value(j)) * std::pow(pl, n - 2);
      out.push_back({center, gamma, WindowKind::Gap, i, j, l});
    }
  return out;
}

Condition27Result check_condition_27(const SpectralStructure& structure, double tol) {
  Condition27Result out;
  const auto& cand = structure.real_odd;
  if (cand.size() < 3) {
    out.diagnostic = "fewer than three real eigenvalues of odd multiplicity (found " + std::to_string(cand.size()) +
                     ")";
    return out;
  }
  const int s = structure.s;
  bool recorded = false;
  for (std::size_t a = 0; a < cand.size(); ++a)
    for (std::size_t b = a + 1; b < cand.size(); ++b)
      for (std::size_t c = b + 1; c < cand.size(); ++c) {
        const std::array<int, 3> triple{cand[a], cand[b], cand[c]};
        bool equalized = false;
        for (int i1 = 0; i1 < s && !equalized; ++i1)
          for (int i2 = 0; i2 < s && !equalized; ++i2)
            for (int i3 = 0; i3 < s && !equalized; ++i3) {
              const double x1 = structure.real_value(triple[0]) + structure.real_value(i1);
              const double x2 = structure.real_value(triple[1]) + structure.real_value(i2);
              const double x3 = structure.real_value(triple[2]) + structure.real_value(i3);
              const double diam = std::max({x1, x2, x3}) - std::min({x1, x2, x3});
              const double scale = 1.0 + std::max({std::abs(x1), std::abs(x2), std::abs(x3)});
              if (diam <= tol * scale) {
                equalized = true;
                if (!recorded) {
                  out.triple = triple;
                  out.assignment = {i1, i2, i3};
                  recorded = true;
                }
              }
            }
        if (!equalized) {
          out.holds = true;
          out.triple = triple;
          out.diagnostic = "no assignment equalizes the three sums";
          return out;
        }
      }
  out.diagnostic = "every candidate triple admits an equalizing assignment";
  return out;
}

ParityResult remark1_parity(const SpectralStructure& structure) {
  ParityResult out;
  out.m_parity = structure.m % 2;
  out.count_real_odd = static_cast<int>(structure.real_odd.size());
  out.consistent = out.m_parity == 1 ? (out.count_real_odd >= 1 && out.count_real_odd % 2 == 1)
                                     : (out.count_real_odd % 2 == 0);
  return out;
}

}  // namespace fpt
