#include "floquet_pt/bloch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <string>

#include "floquet_pt/assignment.hpp"

namespace fpt {

namespace {

bool less_re_im(Complex a, Complex b) { return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag(); }

double rel_radius(double tol, Complex z) { return tol * (1.0 + std::abs(z)); }

}  // namespace

int minimal_truncation(const OperatorSpec& spec) { return spec.max_frequency() + 4; }

RealMatrix assemble_galerkin_real(const OperatorSpec& spec, double t, int K) {
  if (K < minimal_truncation(spec))
    throw Error(ErrorCode::TruncationTooSmall, "K = " + std::to_string(K) + " is below max frequency + 4 = " +
                                                   std::to_string(minimal_truncation(spec)));
  const int n = spec.n();
  const int m = spec.m();
  const int size = m * (2 * K + 1);
  RealMatrix a = RealMatrix::Zero(size, size);

  // (order, frequency difference, effective harmonic)
  struct Term {
    int v;
    int d;
    RealMatrix h;
  };
  std::vector<Term> terms;
  terms.push_back({2, 0, mean_matrix(spec)});
  for (const auto& s : spec.coefficients())
    for (const auto& [l, mat] : s.harmonics) {
      if (s.order == 2 && l == 0) continue;
      terms.push_back({s.order, l, spec.epsilon() * mat});
    }

  for (int k = -K; k <= K; ++k) {
    const int row = (k + K) * m;
    const double xk = kTwoPi * k + t;
    a.block(row, row, m, m).diagonal().array() += std::pow(xk, n);
    for (const auto& term : terms) {
      const int l = k - term.d;
      if (l < -K || l > K) continue;
      const int col = (l + K) * m;
      const double xl = kTwoPi * l + t;
      a.block(row, col, m, m) += std::pow(xl, n - term.v) * term.h;
    }
  }
  return a;
}

ComplexMatrix assemble_galerkin(const OperatorSpec& spec, double t, const GalerkinConfig& config) {
  return assemble_galerkin_real(spec, t, config.K).cast<Complex>();
}

double certified_radius(int n, int K, double t) {
  const double edge = std::min(std::abs(kTwoPi * (K - 1) + t), std::abs(-kTwoPi * (K - 1) + t));
  return 0.5 * std::pow(edge, n);
}

std::vector<Complex> galerkin_spectrum(const OperatorSpec& spec, double t, int K) {
  auto values = eig_real(assemble_galerkin_real(spec, t, K)).values;
  std::sort(values.begin(), values.end(), less_re_im);
  return values;
}

std::vector<BlochCluster> cluster_eigenvalues(const std::vector<Complex>& values, double rel_tol) {
  std::vector<Complex> sorted = values;
  std::sort(sorted.begin(), sorted.end(), less_re_im);
  // single linkage in sorted-by-real-part order with a full scan of open clusters
  std::vector<std::vector<Complex>> groups;
  for (Complex z : sorted) {
    long target = -1;
    for (long g = static_cast<long>(groups.size()) - 1; g >= 0; --g) {
      bool near = false;
      for (Complex w : groups[g])
        if (std::abs(z - w) <= rel_tol * (1.0 + std::max(std::abs(z), std::abs(w)))) {
          near = true;
          break;
        }
      if (near) {
        target = g;
        break;
      }
    }
    if (target < 0) {
      groups.push_back({z});
    } else {
      groups[target].push_back(z);
    }
  }
  std::vector<BlochCluster> out;
  for (const auto& g : groups) {
    Complex sum{0.0, 0.0};
    for (Complex z : g) sum += z;
    out.push_back({sum / static_cast<double>(g.size()), static_cast<int>(g.size())});
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return less_re_im(a.value, b.value); });
  return out;
}

namespace {

// Two-sided inverse iteration started at a QR eigenvalue: the quotient
// y^T A x / y^T x is second-order accurate in the vector errors. Returns the
// seed when the iteration drifts away from it.
template <typename Scalar>
Complex polish(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& a, Complex seed) {
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  Scalar shift;
  if constexpr (std::is_same_v<Scalar, double>) {
    shift = seed.real();
  } else {
    shift = seed;
  }
  shift += Scalar(1e-13 * (1.0 + std::abs(seed)));
  Mat shifted = a;
  shifted.diagonal().array() -= shift;
  const Eigen::PartialPivLU<Mat> lu(shifted);
  Vec x = Vec::Ones(a.rows());
  Vec y = Vec::Ones(a.rows());
  for (int it = 0; it < 2; ++it) {
    x = lu.solve(x);
    y = lu.transpose().solve(y);
    x /= x.norm();
    y /= y.norm();
  }
  if (!x.allFinite() || !y.allFinite()) return seed;
  const Scalar denom = (y.transpose() * x).value();
  if (std::abs(denom) < 1e-12) return seed;
  const Complex refined((y.transpose() * (a * x)).value() / denom);
  if (std::abs(refined - seed) > 1e-6 * (1.0 + std::abs(seed))) return seed;
  return refined;
}

std::vector<Complex> refine_values(const RealMatrix& a, const std::vector<Complex>& all,
                                   const std::vector<Complex>& selected, double cluster_tol) {
  std::vector<Complex> out;
  out.reserve(selected.size());
  std::optional<ComplexMatrix> ac;
  for (Complex z : selected) {
    if (z.imag() < 0.0) continue;  // mirrored from its partner below
    double nearest = std::numeric_limits<double>::infinity();
    for (Complex w : all)
      if (w != z) nearest = std::min(nearest, std::abs(w - z));
    Complex refined = z;
    if (nearest > 100.0 * rel_radius(cluster_tol, z)) {
      if (z.imag() == 0.0) {
        refined = polish<double>(a, z);
        refined = {refined.real(), 0.0};
      } else {
        if (!ac) ac = a.cast<Complex>();
        refined = polish<Complex>(*ac, z);
      }
    }
    out.push_back(refined);
    if (z.imag() > 0.0) {
      // keep exact conjugate pairs; the partner must be in the selection too
      bool partner = false;
      for (Complex w : selected)
        if (w == std::conj(z)) partner = true;
      if (partner) out.push_back(std::conj(refined));
    }
  }
  // lone lower-half values whose partner fell outside the selection
  for (Complex z : selected) {
    if (z.imag() >= 0.0) continue;
    bool partner = false;
    for (Complex w : selected)
      if (w == std::conj(z)) partner = true;
    if (!partner) out.push_back(z);
  }
  std::sort(out.begin(), out.end(), less_re_im);
  return out;
}

BlochSet compute_set(const OperatorSpec& spec, double t, int K, const GalerkinConfig& config,
                     const SpectralDisk& window) {
  const RealMatrix a = assemble_galerkin_real(spec, t, K);
  const auto all = eig_real(a).values;
  std::vector<Complex> selected;
  for (Complex z : all)
    if (window.contains(z)) selected.push_back(z);
  BlochSet set;
  set.t = t;
  set.K = K;
  set.window = window;
  set.values = config.refine ? refine_values(a, all, selected, config.cluster_tol) : selected;
  std::sort(set.values.begin(), set.values.end(), less_re_im);
  set.clusters = cluster_eigenvalues(set.values, config.cluster_tol);
  return set;
}

}  // namespace

BlochSet bloch_eigenvalues(const OperatorSpec& spec, double t, const GalerkinConfig& config,
                           const std::optional<SpectralDisk>& window) {
  const int K = config.K;
  if (K < minimal_truncation(spec))
    throw Error(ErrorCode::TruncationTooSmall, "K = " + std::to_string(K) + " is below max frequency + 4 = " +
                                                   std::to_string(minimal_truncation(spec)));
  const double cert = certified_radius(spec.n(), K, t);
  const SpectralDisk disk = window.value_or(SpectralDisk{{0.0, 0.0}, cert});
  if (!(disk.radius > 0.0) || std::abs(disk.center) + disk.radius > cert)
    throw Error(ErrorCode::TruncationTooSmall,
                "window exceeds the certified radius " + std::to_string(cert) + " at K = " + std::to_string(K));

  BlochSet coarse = compute_set(spec, t, K, config, disk);
  if (config.certify_extra <= 0) return coarse;

  const BlochSet fine = compute_set(spec, t, K + config.certify_extra, config, disk);
  auto near_boundary = [&](Complex z) {
    return std::abs(std::abs(z - disk.center) - disk.radius) <= rel_radius(config.eig_tol, z) + 1e-12;
  };
  auto covered = [&](const BlochSet& from, const BlochSet& into) {
    for (const auto& c : from.clusters) {
      if (near_boundary(c.value)) continue;
      bool found = false;
      for (const auto& d : into.clusters)
        if (d.multiplicity == c.multiplicity && std::abs(d.value - c.value) <= rel_radius(config.eig_tol, c.value)) {
          found = true;
          break;
        }
      if (!found) return false;
    }
    return true;
  };
  if (!covered(coarse, fine) || !covered(fine, coarse))
    throw NotConvergedError("in-window eigenvalues moved by more than eig_tol between K = " + std::to_string(K) +
                                " and K = " + std::to_string(K + config.certify_extra),
                            coarse, fine);
  return coarse;
}

BranchCurve trace_branches(const OperatorSpec& spec, const SpectralStructure& structure, BandIndex band, double t0,
                           double h, int steps, const GalerkinConfig& config, const Calibration& calib) {
  if (band.j < 0 || band.j >= static_cast<int>(structure.entries.size()))
    throw Error(ErrorCode::InvalidArgument, "band index j out of range");
  if (steps < 2 || !(h > 0.0)) throw Error(ErrorCode::InvalidArgument, "trace needs steps >= 2 and h > 0");
  const int mj = structure.entries[band.j].algebraic;
  const Complex mu = structure.entries[band.j].mu;
  const double radius = epsilon_k(spec, structure, band.k, calib);
  const int n = spec.n();

  std::map<double, std::vector<Complex>> samples;
  auto sample = [&](double t) {
    const SpectralDisk disk{mu_kj(n, mu, band.k, t), radius};
    auto set = bloch_eigenvalues(spec, t, config, disk);
    if (set.total_multiplicity() != mj)
      throw IsolationLostError("disk around mu_{" + std::to_string(band.k) + "," + std::to_string(band.j) +
                                   "} holds " + std::to_string(set.total_multiplicity()) + " eigenvalues at t = " +
                                   std::to_string(t) + ", expected " + std::to_string(mj),
                               t, set.total_multiplicity());
    samples[t] = std::move(set.values);
  };
  for (int q = 0; q < steps; ++q) sample(t0 - h + 2.0 * h * q / (steps - 1));

  auto match = [&](const std::vector<Complex>& from, const std::vector<Complex>& to, bool check) {
    Eigen::MatrixXd cost(mj, mj);
    for (int a = 0; a < mj; ++a)
      for (int b = 0; b < mj; ++b) cost(a, b) = std::abs(from[a] - to[b]);
    auto perm = optimal_assignment(cost);
    if (check) {
      const double best = assignment_cost(cost, perm);
      for (int a = 0; a < mj; ++a)
        for (int b = a + 1; b < mj; ++b) {
          auto swapped = perm;
          std::swap(swapped[a], swapped[b]);
          const double tol = rel_radius(config.cluster_tol, to[perm[a]]);
          if (assignment_cost(cost, swapped) - best < tol && std::abs(to[perm[a]] - to[perm[b]]) > tol &&
              std::abs(from[a] - from[b]) > tol)
            throw Error(ErrorCode::MatchingAmbiguous, "two branch assignments are within cluster_tol");
        }
    }
    return perm;
  };

  // refine where consecutive matched distance exceeds 10x the median
  for (int pass = 0; pass < 3; ++pass) {
    std::vector<double> ts;
    std::vector<double> dist;
    for (const auto& [t, _] : samples) ts.push_back(t);
    for (std::size_t q = 0; q + 1 < ts.size(); ++q) {
      const auto& from = samples[ts[q]];
      const auto& to = samples[ts[q + 1]];
      const auto perm = match(from, to, false);
      double worst = 0.0;
      for (int a = 0; a < mj; ++a) worst = std::max(worst, std::abs(from[a] - to[perm[a]]));
      dist.push_back(worst);
    }
    std::vector<double> sorted = dist;
    std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
    const double median = sorted[sorted.size() / 2];
    bool refined = false;
    for (std::size_t q = 0; q < dist.size(); ++q)
      if (median > 0.0 && dist[q] > 10.0 * median) {
        sample(0.5 * (ts[q] + ts[q + 1]));
        refined = true;
      }
    if (!refined) break;
  }

  BranchCurve curve;
  curve.band = band;
  curve.disk_radius = radius;
  curve.branches.assign(mj, {});
  std::vector<Complex> current;
  for (const auto& [t, values] : samples) {
    curve.t_grid.push_back(t);
    if (current.empty()) {
      current = values;
    } else {
      const auto perm = match(current, values, true);
      std::vector<Complex> next(mj);
      for (int a = 0; a < mj; ++a) next[a] = values[perm[a]];
      current = std::move(next);
    }
    for (int a = 0; a < mj; ++a) curve.branches[a].push_back(current[a]);
  }
  return curve;
}

std::vector<BranchCrossing> branch_crossings(const OperatorSpec& spec, const SpectralStructure& structure,
                                             const BranchCurve& curve, double lambda, const GalerkinConfig& config,
                                             const Calibration& calib) {
  const Complex mu = structure.entries.at(curve.band.j).mu;
  const int n = spec.n();
  const double radius = curve.disk_radius > 0.0 ? curve.disk_radius : epsilon_k(spec, structure, curve.band.k, calib);
  auto values_at = [&](double t) {
    return bloch_eigenvalues(spec, t, config, SpectralDisk{mu_kj(n, mu, curve.band.k, t), radius}).values;
  };
  auto nearest = [](const std::vector<Complex>& values, Complex target) {
    Complex best = values.front();
    for (Complex z : values)
      if (std::abs(z - target) < std::abs(best - target)) best = z;
    return best;
  };

  std::vector<BranchCrossing> out;
  for (std::size_t l = 0; l < curve.branches.size(); ++l) {
    const auto& br = curve.branches[l];
    for (std::size_t q = 0; q + 1 < br.size(); ++q) {
      const double fa = br[q].real() - lambda;
      const double fb = br[q + 1].real() - lambda;
      if (fa * fb > 0.0) continue;
      double ta = curve.t_grid[q];
      double tb = curve.t_grid[q + 1];
      Complex va = br[q];
      Complex vb = br[q + 1];
      double sa = fa;
      for (int it = 0; it < 100 && tb - ta > 1e-15 * (1.0 + std::abs(ta)); ++it) {
        const double tm = 0.5 * (ta + tb);
        auto values = values_at(tm);
        if (values.empty()) break;
        const Complex vm = nearest(values, 0.5 * (va + vb));
        const double sm = vm.real() - lambda;
        if (sm == 0.0) {
          ta = tb = tm;
          va = vb = vm;
          break;
        }
        if ((sa < 0.0) == (sm < 0.0)) {
          ta = tm;
          va = vm;
          sa = sm;
        } else {
          tb = tm;
          vb = vm;
        }
      }
      const bool left = std::abs(va.real() - lambda) <= std::abs(vb.real() - lambda);
      out.push_back({static_cast<int>(l), left ? ta : tb, left ? va : vb});
      if (fb == 0.0) ++q;  // crossing exactly on a grid point: do not report twice
    }
  }
  return out;
}

SymmetryResult conjugate_symmetry_check(const BlochSet& set, double tol) {
  SymmetryResult out;
  out.symmetric = true;
  for (const auto& c : set.clusters) {
    const Complex target = std::conj(c.value);
    double best = std::numeric_limits<double>::infinity();
    int mult = 0;
    for (const auto& d : set.clusters) {
      const double dist = std::abs(d.value - target);
      if (dist < best) {
        best = dist;
        mult = d.multiplicity;
      }
    }
    out.max_defect = std::max(out.max_defect, best);
    if (best > tol || mult != c.multiplicity) out.symmetric = false;
  }
  return out;
}

}  // namespace fpt
