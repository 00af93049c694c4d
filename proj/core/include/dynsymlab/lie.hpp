#pragma once

#include <stdexcept>
#include <vector>

#include "dynsymlab/opalg.hpp"

namespace dynsymlab {

/// Basis of a finite-dimensional semisimple Lie algebra given by Hermitian
/// traceless matrices in the defining representation, normalized to
/// tr(g_a g_b) = 2 delta_ab.
struct AlgebraBasis {
  std::vector<SiteOperator> generators;

  int dim() const { return static_cast<int>(generators.size()); }
  int matrix_dim() const {
    return generators.empty() ? 0 : generators.front().dim();
  }
};

/// [g_a, g_b] = sum_c 2i f_abc g_c, f real and antisymmetric in (a, b).
struct StructureConstants {
  int dim = 0;
  std::vector<double> f;
  double closure_residual = 0.0;

  double at(int a, int b, int c) const {
    return f[static_cast<size_t>((a * dim + b) * dim + c)];
  }
  double& at(int a, int b, int c) {
    return f[static_cast<size_t>((a * dim + b) * dim + c)];
  }
};

struct CartanSubalgebra {
  std::vector<SiteOperator> elements;

  int rank() const { return static_cast<int>(elements.size()); }
};

/// One +/- pair of root vectors with the root values beta(h_i) read off as
/// adjoint eigenvalues, [h_i, plus_vector] = root_values[i] * plus_vector.
struct RootDatum {
  SiteOperator plus_vector;
  SiteOperator minus_vector;
  std::vector<double> root_values;
};

struct CartanWeylBasis {
  CartanSubalgebra cartan;
  std::vector<RootDatum> roots;

  int element_count() const {
    return cartan.rank() + 2 * static_cast<int>(roots.size());
  }
};

/// One block of a partition of the algebra into c/r mutually commuting
/// sets. Elements are given both as matrices and as real coefficient
/// vectors over the input generators; when the block consists of raw
/// generators the coefficient vectors are unit vectors.
struct CommutingSet {
  std::vector<SiteOperator> elements;
  std::vector<Eigen::VectorXd> coefficients;
};

struct AlgebraNotClosed : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NotInSpan : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NotAbelian : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NotMaximal : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DegeneracyResolutionFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct PartitionNotFound : std::runtime_error {
  using std::runtime_error::runtime_error;
};

StructureConstants structure_constants(const AlgebraBasis& basis,
                                       double closure_tol = 1e-10);

/// Rank = nullity of ad(x) for a generic element x of the algebra.
int algebra_rank(const AlgebraBasis& basis);

/// Coefficients of x over the basis generators; throws NotInSpan when the
/// projection misses x beyond tol.
Eigen::VectorXcd span_coefficients(const SiteOperator& x,
                                   const AlgebraBasis& basis,
                                   double tol = 1e-10);

/// Killing form (x, y) = tr(ad x . ad y), evaluated in the adjoint
/// representation built from the structure constants.
double killing_form(const SiteOperator& x, const SiteOperator& y,
                    const AlgebraBasis& basis);

CartanSubalgebra verify_cartan(const std::vector<SiteOperator>& candidate,
                               const AlgebraBasis& basis);

std::vector<RootDatum> root_decomposition(const CartanSubalgebra& cartan,
                                          const AlgebraBasis& basis);

CartanWeylBasis cartan_weyl(const CartanSubalgebra& cartan,
                            const AlgebraBasis& basis);

std::vector<CommutingSet> commuting_partition(const AlgebraBasis& basis);

}  // namespace dynsymlab
