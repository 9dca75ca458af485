#include "floquet_pt/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "floquet_pt/errors.hpp"

namespace fpt {

namespace {

void check_square(Eigen::Index rows, Eigen::Index cols, int cap) {
  if (rows != cols) throw Error(ErrorCode::InvalidArgument, "matrix is not square");
  if (rows > cap)
    throw Error(ErrorCode::InvalidArgument,
                "matrix dimension " + std::to_string(rows) + " exceeds cap " + std::to_string(cap));
}

double backward_error(const ComplexMatrix& a, const std::vector<Complex>& values, const ComplexMatrix& vecs) {
  const double norm_a = std::max(a.norm(), std::numeric_limits<double>::min());
  double worst = 0.0;
  for (Eigen::Index i = 0; i < vecs.cols(); ++i) {
    const ComplexVector v = vecs.col(i);
    const double nv = v.norm();
    if (nv == 0.0) continue;
    worst = std::max(worst, (a * v - values[i] * v).norm() / (norm_a * nv));
  }
  return worst;
}

}  // namespace

EigenDecomposition eig_complex(const ComplexMatrix& a, double tol, bool want_vectors, int dimension_cap) {
  check_square(a.rows(), a.cols(), dimension_cap);
  EigenDecomposition out;
  if (a.rows() == 0) return out;
  Eigen::ComplexEigenSolver<ComplexMatrix> solver(a, want_vectors);
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::NoConvergence, "complex QR iteration did not converge");
  const auto& ev = solver.eigenvalues();
  out.values.assign(ev.data(), ev.data() + ev.size());
  if (want_vectors) {
    out.vectors = solver.eigenvectors();
    out.max_backward_error = backward_error(a, out.values, *out.vectors);
    if (out.max_backward_error > tol)
      throw Error(ErrorCode::NoConvergence,
                  "eigenpair backward error " + std::to_string(out.max_backward_error) + " exceeds tolerance");
  }
  return out;
}

EigenDecomposition eig_real(const RealMatrix& a, double tol, bool want_vectors, int dimension_cap) {
  check_square(a.rows(), a.cols(), dimension_cap);
  EigenDecomposition out;
  if (a.rows() == 0) return out;
  Eigen::EigenSolver<RealMatrix> solver(a, want_vectors);
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::NoConvergence, "real QR iteration did not converge");
  const auto& ev = solver.eigenvalues();
  out.values.assign(ev.data(), ev.data() + ev.size());
  if (want_vectors) {
    ComplexMatrix vecs = solver.eigenvectors();
    out.max_backward_error = backward_error(a.cast<Complex>(), out.values, vecs);
    out.vectors = std::move(vecs);
    if (out.max_backward_error > tol)
      throw Error(ErrorCode::NoConvergence,
                  "eigenpair backward error " + std::to_string(out.max_backward_error) + " exceeds tolerance");
  }
  return out;
}

Complex det_complex(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) throw Error(ErrorCode::InvalidArgument, "matrix is not square");
  if (a.rows() == 0) return {1.0, 0.0};
  return Eigen::PartialPivLU<ComplexMatrix>(a).determinant();
}

int numerical_rank(const ComplexMatrix& a, double tol) {
  if (a.size() == 0) return 0;
  Eigen::JacobiSVD<ComplexMatrix> svd(a);
  const auto& sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv(0) : 0.0;
  if (smax == 0.0) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > tol * smax) ++rank;
  return rank;
}

std::vector<double> eigenvalue_condition_numbers(const ComplexMatrix& a, const EigenDecomposition& eig) {
  ComplexMatrix v;
  if (eig.vectors) {
    v = *eig.vectors;
  } else {
    v = eig_complex(a, std::numeric_limits<double>::infinity(), true).vectors.value();
  }
  std::vector<double> kappa(v.cols(), std::numeric_limits<double>::infinity());
  Eigen::FullPivLU<ComplexMatrix> lu(v);
  if (!lu.isInvertible()) return kappa;
  const ComplexMatrix w = lu.inverse();
  for (Eigen::Index i = 0; i < v.cols(); ++i) kappa[i] = w.row(i).norm() * v.col(i).norm();
  return kappa;
}

namespace {

double cluster_radius(double tol, Complex mu) { return tol * (1.0 + std::abs(mu)); }

// Single-linkage clustering of eigenvalues at relative radius tol.
std::vector<std::vector<Complex>> cluster_values(std::vector<Complex> values, double tol) {
  const std::size_t count = values.size();
  std::vector<std::size_t> parent(count);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (std::size_t i = 0; i < count; ++i)
    for (std::size_t j = i + 1; j < count; ++j) {
      const double radius = tol * (1.0 + std::max(std::abs(values[i]), std::abs(values[j])));
      if (std::abs(values[i] - values[j]) <= radius) parent[find(i)] = find(j);
    }
  std::vector<std::vector<Complex>> clusters;
  std::vector<long> slot(count, -1);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t root = find(i);
    if (slot[root] < 0) {
      slot[root] = static_cast<long>(clusters.size());
      clusters.emplace_back();
    }
    clusters[slot[root]].push_back(values[i]);
  }
  return clusters;
}

EigenvalueEntry analyze_eigenvalue(const RealMatrix& c, Complex mu, int algebraic, double tol) {
  const int m = static_cast<int>(c.rows());
  const ComplexMatrix shifted = c.cast<Complex>() - mu * ComplexMatrix::Identity(m, m);

  // nullity[q] = dim ker (C - mu)^q, clamped into a consistent sequence
  std::vector<int> nullity(algebraic + 1, 0);
  ComplexMatrix power = ComplexMatrix::Identity(m, m);
  for (int q = 1; q <= algebraic; ++q) {
    power = power * shifted;
    const int d = m - numerical_rank(power, tol);
    nullity[q] = std::clamp(d, nullity[q - 1], algebraic);
  }
  nullity[algebraic] = algebraic;

  // blocks_at_least[q] = number of Jordan blocks of size >= q
  std::vector<int> at_least(algebraic + 2, 0);
  for (int q = 1; q <= algebraic; ++q) at_least[q] = nullity[q] - nullity[q - 1];
  for (int q = 2; q <= algebraic; ++q)
    if (at_least[q] > at_least[q - 1])
      throw Error(ErrorCode::ClusterAmbiguity, "inconsistent rank sequence near eigenvalue; adjust tol");

  EigenvalueEntry entry;
  entry.mu = mu;
  entry.algebraic = algebraic;
  entry.geometric = nullity[1];
  for (int q = algebraic; q >= 1; --q) {
    const int exact = at_least[q] - at_least[q + 1];
    for (int i = 0; i < exact; ++i) entry.partial_multiplicities.push_back(q);
  }
  const int total = std::accumulate(entry.partial_multiplicities.begin(), entry.partial_multiplicities.end(), 0);
  if (total != algebraic || entry.geometric < 1)
    throw Error(ErrorCode::ClusterAmbiguity, "partial multiplicities do not sum to the algebraic multiplicity");
  return entry;
}

}  // namespace

SpectralStructure spectral_structure(const RealMatrix& c, double tol) {
  if (c.rows() != c.cols() || c.rows() == 0)
    throw Error(ErrorCode::InvalidArgument, "structure requires a non-empty square matrix");
  const auto eig = eig_real(c);
  auto clusters = cluster_values(eig.values, tol);

  struct Cluster {
    Complex mean;
    int size;
  };
  std::vector<Cluster> means;
  for (const auto& cl : clusters) {
    Complex sum{0.0, 0.0};
    for (auto z : cl) sum += z;
    means.push_back({sum / static_cast<double>(cl.size()), static_cast<int>(cl.size())});
  }
  for (std::size_t a = 0; a < means.size(); ++a)
    for (std::size_t b = a + 1; b < means.size(); ++b) {
      const double radius = cluster_radius(tol, std::abs(means[a].mean) > std::abs(means[b].mean) ? means[a].mean
                                                                                                   : means[b].mean);
      if (std::abs(means[a].mean - means[b].mean) < 10.0 * radius)
        throw Error(ErrorCode::ClusterAmbiguity, "two eigenvalue clusters lie within 10*tol; adjust tol");
    }

  SpectralStructure out;
  out.m = static_cast<int>(c.rows());
  std::vector<EigenvalueEntry> reals;
  std::vector<EigenvalueEntry> upper;  // Im > 0 representatives
  std::vector<int> lower_sizes;
  for (const auto& cl : means) {
    Complex mu = cl.mean;
    if (std::abs(mu.imag()) <= cluster_radius(tol, mu)) {
      auto entry = analyze_eigenvalue(c, {mu.real(), 0.0}, cl.size, tol);
      entry.is_real = true;
      reals.push_back(std::move(entry));
    } else if (mu.imag() > 0.0) {
      upper.push_back(analyze_eigenvalue(c, mu, cl.size, tol));
    } else {
      lower_sizes.push_back(cl.size);
    }
  }
  if (upper.size() != lower_sizes.size())
    throw Error(ErrorCode::ClusterAmbiguity, "complex eigenvalues are not paired with their conjugates");

  std::sort(reals.begin(), reals.end(), [](const auto& a, const auto& b) { return a.mu.real() < b.mu.real(); });
  std::sort(upper.begin(), upper.end(), [](const auto& a, const auto& b) {
    return a.mu.real() != b.mu.real() ? a.mu.real() < b.mu.real() : a.mu.imag() < b.mu.imag();
  });

  out.s = static_cast<int>(reals.size());
  for (auto& e : reals) out.entries.push_back(std::move(e));
  for (auto& e : upper) {
    EigenvalueEntry conj = e;
    conj.mu = std::conj(e.mu);
    out.entries.push_back(std::move(e));
    out.entries.push_back(std::move(conj));
  }
  int total = 0;
  for (std::size_t j = 0; j < out.entries.size(); ++j) {
    const auto& e = out.entries[j];
    total += e.algebraic;
    for (int r : e.partial_multiplicities) out.r = std::max(out.r, r);
    if (e.is_real && e.algebraic % 2 == 1) out.real_odd.push_back(static_cast<int>(j));
  }
  if (total != out.m) throw Error(ErrorCode::ClusterAmbiguity, "multiplicities do not sum to the dimension");
  return out;
}

SpectralStructure structure_from_real_eigenvalues(const std::vector<double>& values) {
  RealMatrix c = RealMatrix::Zero(static_cast<Eigen::Index>(values.size()), static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) c(i, i) = values[i];
  return spectral_structure(c);
}

}  // namespace fpt
