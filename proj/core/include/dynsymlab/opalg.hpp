#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace dynsymlab {

using Complex = std::complex<double>;
using DenseMatrix = Eigen::MatrixXcd;
using SparseMatrix = Eigen::SparseMatrix<Complex>;

inline constexpr double kStructuralZero = 1e-14;

enum class Boundary { Open, Periodic };

/// Lattice geometry: N sites, each carrying a local Hilbert space of
/// dimension d. The full Hilbert space has dimension d^N, capped at 2^14
/// so every operation stays desk-scale.
struct LatticeSpec {
  int n_sites = 0;
  int local_dim = 0;
  Boundary boundary = Boundary::Open;

  long long dim() const;
  void validate() const;

  friend bool operator==(const LatticeSpec& a, const LatticeSpec& b) {
    return a.n_sites == b.n_sites && a.local_dim == b.local_dim &&
           a.boundary == b.boundary;
  }
};

long long max_hilbert_dim();

/// Dense d x d operator acting on a single site.
struct SiteOperator {
  DenseMatrix entries;
  std::string label;

  int dim() const { return static_cast<int>(entries.rows()); }
};

/// Sparse operator on the full d^N-dimensional lattice Hilbert space.
struct LatticeOperator {
  LatticeSpec spec;
  SparseMatrix mat;
};

/// A = sum_j A_j^(j), one single-site operator per site (site-dependent
/// coefficients allowed; zero matrices mean the site does not contribute).
struct ExtensiveOperator {
  LatticeSpec spec;
  std::vector<SiteOperator> per_site;
};

// Single-site bases.
std::vector<SiteOperator> pauli_basis();
std::vector<SiteOperator> gell_mann_basis(int d);

SiteOperator site_identity(int d);

// Embedding and compilation.
LatticeOperator embed(const SiteOperator& b, int site, const LatticeSpec& spec);
LatticeOperator embed_product(
    const std::vector<std::pair<int, SiteOperator>>& factors,
    const LatticeSpec& spec);
LatticeOperator compile(const ExtensiveOperator& a);

LatticeOperator lattice_identity(const LatticeSpec& spec);
LatticeOperator lattice_zero(const LatticeSpec& spec);

// Sparse arithmetic.
LatticeOperator add(const LatticeOperator& x, const LatticeOperator& y);
LatticeOperator scale(Complex alpha, const LatticeOperator& x);
LatticeOperator multiply(const LatticeOperator& x, const LatticeOperator& y);
LatticeOperator commutator(const LatticeOperator& x, const LatticeOperator& y);
LatticeOperator anticommutator(const LatticeOperator& x,
                               const LatticeOperator& y);
LatticeOperator dagger(const LatticeOperator& x);

// Hilbert-Schmidt geometry: hs_inner(X, Y) = tr(X^dag Y), evaluated
// entrywise so neither factor is densified.
Complex hs_inner(const LatticeOperator& x, const LatticeOperator& y);
double hs_norm(const LatticeOperator& x);
bool is_hermitian(const LatticeOperator& x, double tol = 1e-12);

// Extensive-operator algebra (compile is linear in these).
ExtensiveOperator ext_add(const ExtensiveOperator& a,
                          const ExtensiveOperator& b);
ExtensiveOperator ext_scale(Complex alpha, const ExtensiveOperator& a);
ExtensiveOperator ext_dagger(const ExtensiveOperator& a);
ExtensiveOperator uniform_extensive(const SiteOperator& b,
                                    const LatticeSpec& spec);

/// Drop entries with magnitude below kStructuralZero.
void prune(SparseMatrix& m, double tol = kStructuralZero);

struct DimensionMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct DimensionCapExceeded : std::domain_error {
  using std::domain_error::domain_error;
};

}  // namespace dynsymlab
