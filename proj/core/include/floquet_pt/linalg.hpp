#pragma once

#include <optional>
#include <vector>

#include "floquet_pt/types.hpp"

namespace fpt {

struct EigenDecomposition {
  std::vector<Complex> values;          // repeated by algebraic multiplicity
  std::optional<ComplexMatrix> vectors;  // columns, present when requested
  double max_backward_error = 0.0;       // max ||Av - lambda v|| / (||A|| ||v||), 0 without vectors
};

inline constexpr int kDefaultEigenDimensionCap = 4096;

/// Eigenvalues (and optionally eigenvectors) of a dense complex matrix via
/// Hessenberg reduction and shifted QR. Throws NoConvergence when the QR
/// iteration stalls or the returned pairs miss the backward-error tolerance.
EigenDecomposition eig_complex(const ComplexMatrix& a, double tol = 1e-8, bool want_vectors = false,
                               int dimension_cap = kDefaultEigenDimensionCap);

/// Real-matrix fast path: identical contract, conjugate pairs are exact.
EigenDecomposition eig_real(const RealMatrix& a, double tol = 1e-8, bool want_vectors = false,
                            int dimension_cap = kDefaultEigenDimensionCap);

Complex det_complex(const ComplexMatrix& a);

/// Numerical rank with threshold tol * sigma_max.
int numerical_rank(const ComplexMatrix& a, double tol);

/// Condition number 1/|y^H x| for each eigenvalue (unit left/right vectors).
std::vector<double> eigenvalue_condition_numbers(const ComplexMatrix& a, const EigenDecomposition& eig);

struct EigenvalueEntry {
  Complex mu;
  int algebraic = 0;                        // m_j
  int geometric = 0;                        // l_j
  std::vector<int> partial_multiplicities;  // r_{j,1} >= r_{j,2} >= ... , sums to m_j
  bool is_real = false;
};

/// Jordan-type structure of a real matrix: distinct eigenvalues with algebraic,
/// geometric and partial multiplicities. Real eigenvalues come first in
/// ascending order (indices 0..s-1); complex ones follow in conjugate pairs.
struct SpectralStructure {
  std::vector<EigenvalueEntry> entries;
  int s = 0;                  // number of distinct real eigenvalues
  int r = 0;                  // max partial multiplicity
  std::vector<int> real_odd;  // indices j of real eigenvalues with odd m_j
  int m = 0;

  /// Entries 0..s-1 are the real eigenvalues.
  [[nodiscard]] double real_value(int j) const { return entries.at(j).mu.real(); }
};

inline constexpr double kDefaultStructureTol = 1e-8;

SpectralStructure spectral_structure(const RealMatrix& c, double tol = kDefaultStructureTol);

/// Structure of a matrix with prescribed real simple eigenvalues (diagonal C).
SpectralStructure structure_from_real_eigenvalues(const std::vector<double>& values);

}  // namespace fpt
