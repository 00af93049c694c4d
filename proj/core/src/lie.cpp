#include "dynsymlab/lie.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace dynsymlab {

namespace {

const Complex kI{0.0, 1.0};

void require_normalized(const AlgebraBasis& basis) {
  const int c = basis.dim();
  if (c == 0) throw std::invalid_argument("empty algebra basis");
  const int d = basis.matrix_dim();
  for (int a = 0; a < c; ++a) {
    const auto& ga = basis.generators[static_cast<size_t>(a)].entries;
    if (ga.rows() != d || ga.cols() != d) {
      throw DimensionMismatch("algebra generators have mixed dimensions");
    }
    if ((ga - ga.adjoint()).norm() > 1e-12 * std::max(1.0, ga.norm())) {
      throw std::invalid_argument("algebra generators must be Hermitian");
    }
    for (int b = a; b < c; ++b) {
      const auto& gb = basis.generators[static_cast<size_t>(b)].entries;
      const Complex ip = (ga.adjoint() * gb).trace();
      const double want = (a == b) ? 2.0 : 0.0;
      if (std::abs(ip - want) > 1e-10) {
        throw std::invalid_argument(
            "algebra basis must satisfy tr(g_a g_b) = 2 delta_ab");
      }
    }
  }
}

/// Matrix of ad(x) on generator coefficients, (ad x)_{cb} = sum_a x_a 2i f_abc.
Eigen::MatrixXcd ad_matrix(const Eigen::VectorXcd& coeffs,
                           const StructureConstants& sc) {
  const int c = sc.dim;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(c, c);
  for (int a = 0; a < c; ++a) {
    if (std::abs(coeffs(a)) < kStructuralZero) continue;
    for (int b = 0; b < c; ++b) {
      for (int e = 0; e < c; ++e) {
        const double f = sc.at(a, b, e);
        if (f != 0.0) m(e, b) += coeffs(a) * 2.0 * kI * f;
      }
    }
  }
  return m;
}

SiteOperator from_coefficients(const Eigen::VectorXcd& coeffs,
                               const AlgebraBasis& basis,
                               const std::string& label) {
  const int d = basis.matrix_dim();
  DenseMatrix m = DenseMatrix::Zero(d, d);
  for (int a = 0; a < basis.dim(); ++a) {
    m += coeffs(a) * basis.generators[static_cast<size_t>(a)].entries;
  }
  return {std::move(m), label};
}

/// Orthonormal basis of the orthogonal complement of the span of the given
/// coefficient vectors.
Eigen::MatrixXcd orthogonal_complement(const Eigen::MatrixXcd& span_cols,
                                       int full_dim) {
  Eigen::MatrixXcd proj =
      Eigen::MatrixXcd::Identity(full_dim, full_dim);
  if (span_cols.cols() > 0) {
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(span_cols);
    Eigen::MatrixXcd q = qr.householderQ() *
                         Eigen::MatrixXcd::Identity(full_dim, span_cols.cols());
    proj -= q * q.adjoint();
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(proj, Eigen::ComputeThinU);
  const int keep = full_dim - static_cast<int>(span_cols.cols());
  return svd.matrixU().leftCols(keep);
}

struct JointEigenvector {
  Eigen::VectorXcd coeffs;           // over the generator basis
  std::vector<double> eigenvalues;   // one per Cartan element
};

/// Simultaneous diagonalization of commuting Hermitian maps: diagonalize the
/// first, then refine each degenerate cluster with the next.
void refine_clusters(const std::vector<Eigen::MatrixXcd>& ad_cartan,
                     size_t which, const Eigen::MatrixXcd& subspace,
                     std::vector<double> prefix,
                     std::vector<JointEigenvector>& out, double cluster_tol) {
  if (which == ad_cartan.size()) {
    for (int j = 0; j < subspace.cols(); ++j) {
      out.push_back({subspace.col(j), prefix});
    }
    return;
  }
  const Eigen::MatrixXcd restricted =
      subspace.adjoint() * ad_cartan[which] * subspace;
  if ((restricted - restricted.adjoint()).norm() >
      1e-8 * std::max(1.0, restricted.norm())) {
    throw DegeneracyResolutionFailure(
        "restricted adjoint map is not Hermitian; Cartan elements may not "
        "commute within tolerance");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(restricted);
  if (es.info() != Eigen::Success) {
    throw DegeneracyResolutionFailure("eigensolver failed on restricted map");
  }
  const auto& vals = es.eigenvalues();
  const auto& vecs = es.eigenvectors();
  int start = 0;
  while (start < vals.size()) {
    int stop = start + 1;
    while (stop < vals.size() && vals(stop) - vals(stop - 1) < cluster_tol) {
      ++stop;
    }
    Eigen::MatrixXcd cluster = subspace * vecs.middleCols(start, stop - start);
    auto next_prefix = prefix;
    next_prefix.push_back(vals(start));
    refine_clusters(ad_cartan, which + 1, cluster, std::move(next_prefix), out,
                    cluster_tol);
    start = stop;
  }
}

/// Phase convention: largest-magnitude coefficient made real and positive
/// (first index wins ties); vector normalized to unit Euclidean norm.
void fix_phase(Eigen::VectorXcd& v) {
  int best = 0;
  double best_mag = 0.0;
  for (int i = 0; i < v.size(); ++i) {
    const double m = std::abs(v(i));
    if (m > best_mag + 1e-12) {
      best_mag = m;
      best = i;
    }
  }
  if (best_mag > 0.0) v *= std::conj(v(best)) / std::abs(v(best));
  v.normalize();
}

bool matrices_commute(const DenseMatrix& a, const DenseMatrix& b, double tol) {
  return (a * b - b * a).norm() <= tol * std::max(1.0, a.norm() * b.norm());
}

/// Orthogonal decomposition of su(d) into d+1 disjoint Cartan subalgebras
/// built from clock and shift matrices (valid for prime d; d = 2, 3 here).
std::vector<CommutingSet> clock_shift_partition(const AlgebraBasis& basis) {
  const int d = basis.matrix_dim();
  DenseMatrix clock = DenseMatrix::Zero(d, d);
  DenseMatrix shift = DenseMatrix::Zero(d, d);
  for (int j = 0; j < d; ++j) {
    clock(j, j) = std::polar(1.0, 2.0 * M_PI * j / d);
    shift((j + 1) % d, j) = 1.0;
  }
  // Seeds Z, X, XZ, XZ^2, ..., XZ^{d-1}: one per line of commuting unitaries.
  std::vector<DenseMatrix> line_seeds;
  line_seeds.push_back(clock);
  DenseMatrix xzk = shift;
  line_seeds.push_back(xzk);
  for (int k = 1; k < d; ++k) {
    xzk = xzk * clock;
    line_seeds.push_back(xzk);
  }

  std::vector<CommutingSet> sets;
  for (const auto& seed : line_seeds) {
    // Hermitian span of {seed^m, m = 1..d-1}, Gram-Schmidt under tr(x y)/2.
    std::vector<DenseMatrix> herm;
    DenseMatrix power = DenseMatrix::Identity(d, d);
    for (int m = 1; m < d; ++m) {
      power = power * seed;
      herm.push_back(power + power.adjoint());
      herm.push_back(kI * (power - power.adjoint()));
    }
    CommutingSet set;
    std::vector<DenseMatrix> kept;
    for (auto& h : herm) {
      DenseMatrix v = h;
      for (const auto& k : kept) {
        v -= (Complex{0.5, 0.0} * (k.adjoint() * v).trace()) * k;
      }
      const double nrm = v.norm();
      if (nrm < 1e-8) continue;
      v *= std::sqrt(2.0) / nrm;  // tr(v^2) = 2
      kept.push_back(v);
      SiteOperator op{v, "partition_elem"};
      Eigen::VectorXcd coeffs = span_coefficients(op, basis);
      Eigen::VectorXd real_coeffs = coeffs.real();
      set.elements.push_back(std::move(op));
      set.coefficients.push_back(std::move(real_coeffs));
    }
    if (!set.elements.empty()) sets.push_back(std::move(set));
  }
  return sets;
}

}  // namespace

StructureConstants structure_constants(const AlgebraBasis& basis,
                                       double closure_tol) {
  require_normalized(basis);
  const int c = basis.dim();
  StructureConstants sc;
  sc.dim = c;
  sc.f.assign(static_cast<size_t>(c) * c * c, 0.0);
  double worst = 0.0;
  for (int a = 0; a < c; ++a) {
    for (int b = 0; b < c; ++b) {
      const DenseMatrix comm =
          basis.generators[static_cast<size_t>(a)].entries *
              basis.generators[static_cast<size_t>(b)].entries -
          basis.generators[static_cast<size_t>(b)].entries *
              basis.generators[static_cast<size_t>(a)].entries;
      DenseMatrix reconstructed =
          DenseMatrix::Zero(basis.matrix_dim(), basis.matrix_dim());
      for (int e = 0; e < c; ++e) {
        const Complex proj =
            (basis.generators[static_cast<size_t>(e)].entries.adjoint() * comm)
                .trace() /
            (4.0 * kI);
        if (std::abs(proj.imag()) > closure_tol) {
          throw AlgebraNotClosed("structure constants are not real");
        }
        sc.at(a, b, e) = proj.real();
        reconstructed += 2.0 * kI * proj.real() *
                         basis.generators[static_cast<size_t>(e)].entries;
      }
      worst = std::max(worst, (comm - reconstructed).norm());
    }
  }
  sc.closure_residual = worst;
  if (worst > closure_tol) {
    throw AlgebraNotClosed("basis is not closed under commutation, residual " +
                           std::to_string(worst));
  }
  return sc;
}

int algebra_rank(const AlgebraBasis& basis) {
  const auto sc = structure_constants(basis);
  const int c = basis.dim();
  // Generic element with deterministic, incommensurate coefficients.
  Eigen::VectorXcd x(c);
  for (int a = 0; a < c; ++a) {
    x(a) = std::cos(1.0 + std::sqrt(2.0) * (a + 1)) +
           0.37 * std::sin(std::sqrt(5.0) * (a + 1));
  }
  const Eigen::MatrixXcd ad = ad_matrix(x, sc);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(ad);
  const auto& sv = svd.singularValues();
  int nullity = 0;
  const double tol = 1e-9 * std::max(1.0, sv.size() ? sv(0) : 0.0);
  for (int i = 0; i < sv.size(); ++i) {
    if (sv(i) <= tol) ++nullity;
  }
  return nullity;
}

Eigen::VectorXcd span_coefficients(const SiteOperator& x,
                                   const AlgebraBasis& basis, double tol) {
  require_normalized(basis);
  const int c = basis.dim();
  Eigen::VectorXcd coeffs(c);
  DenseMatrix recon = DenseMatrix::Zero(basis.matrix_dim(), basis.matrix_dim());
  for (int a = 0; a < c; ++a) {
    const auto& g = basis.generators[static_cast<size_t>(a)].entries;
    coeffs(a) = (g.adjoint() * x.entries).trace() / 2.0;
    recon += coeffs(a) * g;
  }
  if ((recon - x.entries).norm() > tol * std::max(1.0, x.entries.norm())) {
    throw NotInSpan("operator does not lie in the span of the algebra basis");
  }
  return coeffs;
}

double killing_form(const SiteOperator& x, const SiteOperator& y,
                    const AlgebraBasis& basis) {
  const auto sc = structure_constants(basis);
  const Eigen::VectorXcd xc = span_coefficients(x, basis);
  const Eigen::VectorXcd yc = span_coefficients(y, basis);
  const Eigen::MatrixXcd adx = ad_matrix(xc, sc);
  const Eigen::MatrixXcd ady = ad_matrix(yc, sc);
  const Complex k = (adx * ady).trace();
  if (std::abs(k.imag()) > 1e-9 * std::max(1.0, std::abs(k))) {
    throw NotInSpan("Killing form came out complex; inputs not in real span");
  }
  return k.real();
}

CartanSubalgebra verify_cartan(const std::vector<SiteOperator>& candidate,
                               const AlgebraBasis& basis) {
  if (candidate.empty()) throw std::invalid_argument("empty Cartan candidate");
  const auto sc = structure_constants(basis);
  const int c = basis.dim();
  for (size_t i = 0; i < candidate.size(); ++i) {
    for (size_t j = i + 1; j < candidate.size(); ++j) {
      if (!matrices_commute(candidate[i].entries, candidate[j].entries,
                            1e-12)) {
        throw NotAbelian("candidate elements " + std::to_string(i) + " and " +
                         std::to_string(j) + " do not commute");
      }
    }
  }
  // Maximality: the centralizer of the candidate set inside the algebra must
  // be exactly the candidate span.
  Eigen::MatrixXcd cand_coeffs(c, static_cast<Eigen::Index>(candidate.size()));
  Eigen::MatrixXcd stacked(
      static_cast<Eigen::Index>(candidate.size()) * c, c);
  for (size_t i = 0; i < candidate.size(); ++i) {
    const Eigen::VectorXcd coeffs = span_coefficients(candidate[i], basis);
    cand_coeffs.col(static_cast<Eigen::Index>(i)) = coeffs;
    stacked.middleRows(static_cast<Eigen::Index>(i) * c, c) =
        ad_matrix(coeffs, sc);
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> cand_svd(cand_coeffs);
  const double cand_tol =
      1e-10 * std::max(1.0, cand_svd.singularValues()(0));
  int cand_rank = 0;
  for (int i = 0; i < cand_svd.singularValues().size(); ++i) {
    if (cand_svd.singularValues()(i) > cand_tol) ++cand_rank;
  }
  if (cand_rank != static_cast<int>(candidate.size())) {
    throw std::invalid_argument("Cartan candidate is linearly dependent");
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(stacked);
  const auto& sv = svd.singularValues();
  const double tol = 1e-9 * std::max(1.0, sv(0));
  int nullity = 0;
  for (int i = 0; i < sv.size(); ++i) {
    if (sv(i) <= tol) ++nullity;
  }
  if (nullity != static_cast<int>(candidate.size())) {
    throw NotMaximal("centralizer has dimension " + std::to_string(nullity) +
                     ", candidate span has dimension " +
                     std::to_string(candidate.size()));
  }
  return CartanSubalgebra{candidate};
}

std::vector<RootDatum> root_decomposition(const CartanSubalgebra& cartan,
                                          const AlgebraBasis& basis) {
  const auto sc = structure_constants(basis);
  const int c = basis.dim();
  const int r = cartan.rank();
  Eigen::MatrixXcd cartan_coeffs(c, r);
  std::vector<Eigen::MatrixXcd> ad_cartan;
  for (int i = 0; i < r; ++i) {
    const Eigen::VectorXcd coeffs =
        span_coefficients(cartan.elements[static_cast<size_t>(i)], basis);
    cartan_coeffs.col(i) = coeffs;
    ad_cartan.push_back(ad_matrix(coeffs, sc));
  }
  const Eigen::MatrixXcd complement = orthogonal_complement(cartan_coeffs, c);

  std::vector<JointEigenvector> joint;
  refine_clusters(ad_cartan, 0, complement, {}, joint, 1e-8);
  if (static_cast<int>(joint.size()) != c - r) {
    throw DegeneracyResolutionFailure(
        "joint diagonalization produced " + std::to_string(joint.size()) +
        " vectors, expected " + std::to_string(c - r));
  }

  // Keep the representative whose last nonzero root component is positive;
  // its partner is recovered as the dagger.
  std::vector<RootDatum> roots;
  for (auto& jv : joint) {
    double last_nonzero = 0.0;
    bool all_zero = true;
    for (auto it = jv.eigenvalues.rbegin(); it != jv.eigenvalues.rend(); ++it) {
      if (std::abs(*it) > 1e-8) {
        last_nonzero = *it;
        all_zero = false;
        break;
      }
    }
    if (all_zero) {
      throw DegeneracyResolutionFailure(
          "zero root found outside the Cartan span; subalgebra not maximal?");
    }
    if (last_nonzero < 0.0) continue;
    fix_phase(jv.coeffs);
    RootDatum rd;
    rd.plus_vector = from_coefficients(jv.coeffs, basis, "root_plus");
    rd.minus_vector = {rd.plus_vector.entries.adjoint(), "root_minus"};
    rd.root_values = jv.eigenvalues;
    // Residual check against every Cartan element.
    for (int i = 0; i < r; ++i) {
      const auto& h = cartan.elements[static_cast<size_t>(i)].entries;
      const DenseMatrix resid = h * rd.plus_vector.entries -
                                rd.plus_vector.entries * h -
                                rd.root_values[static_cast<size_t>(i)] *
                                    rd.plus_vector.entries;
      if (resid.norm() > 1e-10 * std::max(1.0, rd.plus_vector.entries.norm() *
                                                   (1.0 + h.norm()))) {
        throw DegeneracyResolutionFailure(
            "root vector fails its eigen-relation, residual " +
            std::to_string(resid.norm()));
      }
    }
    roots.push_back(std::move(rd));
  }
  if (static_cast<int>(roots.size()) * 2 != c - r) {
    throw DegeneracyResolutionFailure("roots did not pair up into +/- pairs");
  }
  return roots;
}

CartanWeylBasis cartan_weyl(const CartanSubalgebra& cartan,
                            const AlgebraBasis& basis) {
  CartanWeylBasis cw{cartan, root_decomposition(cartan, basis)};
  const int c = basis.dim();
  if (cw.element_count() != c) {
    throw DegeneracyResolutionFailure("Cartan-Weyl element count mismatch");
  }
  // Span completeness over the generator coefficients.
  Eigen::MatrixXcd all(c, c);
  int col = 0;
  for (const auto& h : cartan.elements) {
    all.col(col++) = span_coefficients(h, basis);
  }
  for (const auto& rd : cw.roots) {
    all.col(col++) = span_coefficients(rd.plus_vector, basis);
    all.col(col++) = span_coefficients(rd.minus_vector, basis);
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(all);
  const auto& sv = svd.singularValues();
  if (sv(sv.size() - 1) <= 1e-9 * std::max(1.0, sv(0))) {
    throw DegeneracyResolutionFailure("Cartan-Weyl basis does not span");
  }
  return cw;
}

std::vector<CommutingSet> commuting_partition(const AlgebraBasis& basis) {
  const auto sc = structure_constants(basis);
  const int c = basis.dim();
  const int r = algebra_rank(basis);
  if (c % r != 0) {
    throw PartitionNotFound("algebra dimension not divisible by rank");
  }
  const int n_sets = c / r;

  // Greedy pass over raw generators in index order.
  std::vector<bool> used(static_cast<size_t>(c), false);
  std::vector<std::vector<int>> index_sets;
  auto commutes_with_set = [&](int candidate,
                               const std::vector<int>& set) {
    for (int member : set) {
      for (int e = 0; e < c; ++e) {
        if (std::abs(sc.at(member, candidate, e)) > 1e-12) return false;
      }
    }
    return true;
  };
  bool greedy_ok = true;
  for (int a = 0; a < c && greedy_ok; ++a) {
    if (used[static_cast<size_t>(a)]) continue;
    std::vector<int> set{a};
    used[static_cast<size_t>(a)] = true;
    for (int b = a + 1; b < c && static_cast<int>(set.size()) < r; ++b) {
      if (used[static_cast<size_t>(b)]) continue;
      if (commutes_with_set(b, set)) {
        set.push_back(b);
        used[static_cast<size_t>(b)] = true;
      }
    }
    if (static_cast<int>(set.size()) != r) {
      greedy_ok = false;
      break;
    }
    index_sets.push_back(std::move(set));
  }
  if (greedy_ok && static_cast<int>(index_sets.size()) == n_sets) {
    std::vector<CommutingSet> out;
    for (const auto& set : index_sets) {
      CommutingSet cs;
      for (int idx : set) {
        cs.elements.push_back(basis.generators[static_cast<size_t>(idx)]);
        Eigen::VectorXd e = Eigen::VectorXd::Zero(c);
        e(idx) = 1.0;
        cs.coefficients.push_back(std::move(e));
      }
      out.push_back(std::move(cs));
    }
    return out;
  }

  // Raw generators do not partition (e.g. the Gell-Mann basis of su(3));
  // fall back to the clock-shift orthogonal decomposition of full su(d).
  const int d = basis.matrix_dim();
  if (c == d * d - 1 && r == d - 1) {
    auto sets = clock_shift_partition(basis);
    if (static_cast<int>(sets.size()) != n_sets) {
      throw PartitionNotFound("clock-shift decomposition produced " +
                              std::to_string(sets.size()) + " sets, expected " +
                              std::to_string(n_sets));
    }
    for (const auto& set : sets) {
      for (size_t i = 0; i < set.elements.size(); ++i) {
        for (size_t j = i + 1; j < set.elements.size(); ++j) {
          if (!matrices_commute(set.elements[i].entries,
                                set.elements[j].entries, 1e-10)) {
            throw PartitionNotFound("clock-shift set fails to commute");
          }
        }
      }
    }
    return sets;
  }
  throw PartitionNotFound(
      "no commuting partition found for this algebra basis");
}

}  // namespace dynsymlab
