#include "dynsymlab/opalg.hpp"

#include <cmath>
#include <cstdlib>

namespace dynsymlab {

namespace {

const Complex kI{0.0, 1.0};

long long ipow(long long base, int exp) {
  long long r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

void require_same_spec(const LatticeOperator& x, const LatticeOperator& y) {
  if (!(x.spec == y.spec) || x.mat.rows() != y.mat.rows()) {
    throw DimensionMismatch("lattice operators live on different spaces");
  }
}

SparseMatrix sparse_kron(const SparseMatrix& a, const SparseMatrix& b) {
  SparseMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  std::vector<Eigen::Triplet<Complex>> trips;
  trips.reserve(static_cast<size_t>(a.nonZeros()) * b.nonZeros());
  for (int ka = 0; ka < a.outerSize(); ++ka) {
    for (SparseMatrix::InnerIterator ita(a, ka); ita; ++ita) {
      for (int kb = 0; kb < b.outerSize(); ++kb) {
        for (SparseMatrix::InnerIterator itb(b, kb); itb; ++itb) {
          trips.emplace_back(ita.row() * b.rows() + itb.row(),
                             ita.col() * b.cols() + itb.col(),
                             ita.value() * itb.value());
        }
      }
    }
  }
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

SparseMatrix sparse_identity(long long n) {
  SparseMatrix id(n, n);
  id.setIdentity();
  return id;
}

}  // namespace

long long max_hilbert_dim() {
  static const long long cap = [] {
    if (const char* env = std::getenv("DYNSYM_MAX_DIM")) {
      const long long v = std::atoll(env);
      if (v > 0) return v;
    }
    return 1LL << 14;
  }();
  return cap;
}

long long LatticeSpec::dim() const { return ipow(local_dim, n_sites); }

void LatticeSpec::validate() const {
  if (n_sites < 2) throw std::invalid_argument("lattice needs at least 2 sites");
  if (local_dim < 2) throw std::invalid_argument("local dimension must be >= 2");
  // Overflow-safe cap check: multiply up and bail as soon as we pass the cap.
  long long d = 1;
  for (int i = 0; i < n_sites; ++i) {
    d *= local_dim;
    if (d > max_hilbert_dim()) {
      throw DimensionCapExceeded("total Hilbert dimension d^N exceeds cap");
    }
  }
}

std::vector<SiteOperator> pauli_basis() {
  SiteOperator sx{DenseMatrix(2, 2), "sigma_x"};
  sx.entries << 0, 1, 1, 0;
  SiteOperator sy{DenseMatrix(2, 2), "sigma_y"};
  sy.entries << 0, -kI, kI, 0;
  SiteOperator sz{DenseMatrix(2, 2), "sigma_z"};
  sz.entries << 1, 0, 0, -1;
  return {sx, sy, sz};
}

// Generalized Gell-Mann matrices, normalized to tr(t_a t_b) = 2 delta_ab.
// Ordering reproduces the standard tau_1..tau_8 for d=3 and the Pauli
// matrices for d=2: for k = 2..d, emit the symmetric and antisymmetric
// off-diagonal pair for every j < k, then the k-1'th diagonal generator.
std::vector<SiteOperator> gell_mann_basis(int d) {
  if (d < 2) throw std::invalid_argument("gell_mann_basis requires d >= 2");
  if (d == 2) {
    auto p = pauli_basis();
    return p;
  }
  std::vector<SiteOperator> out;
  out.reserve(static_cast<size_t>(d) * d - 1);
  int index = 1;
  for (int k = 1; k < d; ++k) {
    for (int j = 0; j < k; ++j) {
      SiteOperator sym{DenseMatrix::Zero(d, d), "gm" + std::to_string(index++)};
      sym.entries(j, k) = 1.0;
      sym.entries(k, j) = 1.0;
      out.push_back(std::move(sym));
      SiteOperator anti{DenseMatrix::Zero(d, d),
                        "gm" + std::to_string(index++)};
      anti.entries(j, k) = -kI;
      anti.entries(k, j) = kI;
      out.push_back(std::move(anti));
    }
    SiteOperator diag{DenseMatrix::Zero(d, d), "gm" + std::to_string(index++)};
    const double c = std::sqrt(2.0 / (static_cast<double>(k) * (k + 1)));
    for (int m = 0; m <= k - 1; ++m) diag.entries(m, m) = c;
    diag.entries(k, k) = -c * k;
    out.push_back(std::move(diag));
  }
  if (d == 3) {
    static const char* names[] = {"tau_1", "tau_2", "tau_3", "tau_4",
                                  "tau_5", "tau_6", "tau_7", "tau_8"};
    for (int i = 0; i < 8; ++i) out[static_cast<size_t>(i)].label = names[i];
  }
  return out;
}

SiteOperator site_identity(int d) {
  return {DenseMatrix::Identity(d, d), "id"};
}

LatticeOperator embed(const SiteOperator& b, int site,
                      const LatticeSpec& spec) {
  return embed_product({{site, b}}, spec);
}

LatticeOperator embed_product(
    const std::vector<std::pair<int, SiteOperator>>& factors,
    const LatticeSpec& spec) {
  spec.validate();
  std::vector<const DenseMatrix*> at_site(static_cast<size_t>(spec.n_sites),
                                          nullptr);
  for (const auto& [site, op] : factors) {
    if (site < 1 || site > spec.n_sites) {
      throw std::out_of_range("site index out of range");
    }
    if (op.dim() != spec.local_dim) {
      throw DimensionMismatch("site operator dimension does not match lattice");
    }
    if (at_site[static_cast<size_t>(site - 1)] != nullptr) {
      throw std::invalid_argument("duplicate site in embed_product");
    }
    at_site[static_cast<size_t>(site - 1)] = &op.entries;
  }
  SparseMatrix acc = sparse_identity(1);
  const SparseMatrix local_id = sparse_identity(spec.local_dim);
  for (int j = 0; j < spec.n_sites; ++j) {
    if (at_site[static_cast<size_t>(j)] != nullptr) {
      SparseMatrix local =
          at_site[static_cast<size_t>(j)]->sparseView(1.0, kStructuralZero);
      acc = sparse_kron(acc, local);
    } else {
      acc = sparse_kron(acc, local_id);
    }
  }
  prune(acc);
  return {spec, std::move(acc)};
}

LatticeOperator compile(const ExtensiveOperator& a) {
  a.spec.validate();
  if (static_cast<int>(a.per_site.size()) != a.spec.n_sites) {
    throw DimensionMismatch("per_site length does not match n_sites");
  }
  LatticeOperator out = lattice_zero(a.spec);
  for (int j = 0; j < a.spec.n_sites; ++j) {
    const auto& op = a.per_site[static_cast<size_t>(j)];
    if (op.entries.size() == 0 || op.entries.norm() < kStructuralZero) continue;
    out.mat += embed(op, j + 1, a.spec).mat;
  }
  prune(out.mat);
  return out;
}

LatticeOperator lattice_identity(const LatticeSpec& spec) {
  spec.validate();
  return {spec, sparse_identity(spec.dim())};
}

LatticeOperator lattice_zero(const LatticeSpec& spec) {
  spec.validate();
  return {spec, SparseMatrix(spec.dim(), spec.dim())};
}

LatticeOperator add(const LatticeOperator& x, const LatticeOperator& y) {
  require_same_spec(x, y);
  LatticeOperator out{x.spec, x.mat + y.mat};
  prune(out.mat);
  return out;
}

LatticeOperator scale(Complex alpha, const LatticeOperator& x) {
  return {x.spec, alpha * x.mat};
}

LatticeOperator multiply(const LatticeOperator& x, const LatticeOperator& y) {
  require_same_spec(x, y);
  LatticeOperator out{x.spec, SparseMatrix(x.mat * y.mat)};
  prune(out.mat);
  return out;
}

LatticeOperator commutator(const LatticeOperator& x, const LatticeOperator& y) {
  require_same_spec(x, y);
  LatticeOperator out{x.spec, SparseMatrix(x.mat * y.mat - y.mat * x.mat)};
  prune(out.mat);
  return out;
}

LatticeOperator anticommutator(const LatticeOperator& x,
                               const LatticeOperator& y) {
  require_same_spec(x, y);
  LatticeOperator out{x.spec, SparseMatrix(x.mat * y.mat + y.mat * x.mat)};
  prune(out.mat);
  return out;
}

LatticeOperator dagger(const LatticeOperator& x) {
  return {x.spec, SparseMatrix(x.mat.adjoint())};
}

Complex hs_inner(const LatticeOperator& x, const LatticeOperator& y) {
  require_same_spec(x, y);
  // tr(X^dag Y) = sum_ij conj(X_ij) Y_ij
  return x.mat.conjugate().cwiseProduct(y.mat).sum();
}

double hs_norm(const LatticeOperator& x) {
  double s = 0.0;
  for (int k = 0; k < x.mat.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(x.mat, k); it; ++it) {
      s += std::norm(it.value());
    }
  }
  return std::sqrt(s);
}

bool is_hermitian(const LatticeOperator& x, double tol) {
  if (tol <= 0) throw std::invalid_argument("tolerance must be positive");
  const double nx = hs_norm(x);
  if (nx == 0.0) return true;
  const SparseMatrix adj = x.mat.adjoint();
  LatticeOperator diff{x.spec, SparseMatrix(x.mat - adj)};
  return hs_norm(diff) <= tol * nx;
}

ExtensiveOperator ext_add(const ExtensiveOperator& a,
                          const ExtensiveOperator& b) {
  if (!(a.spec == b.spec)) {
    throw DimensionMismatch("extensive operators on different lattices");
  }
  ExtensiveOperator out{a.spec, {}};
  out.per_site.reserve(a.per_site.size());
  for (size_t j = 0; j < a.per_site.size(); ++j) {
    SiteOperator s{a.per_site[j].entries + b.per_site[j].entries,
                   a.per_site[j].label};
    out.per_site.push_back(std::move(s));
  }
  return out;
}

ExtensiveOperator ext_scale(Complex alpha, const ExtensiveOperator& a) {
  ExtensiveOperator out{a.spec, {}};
  out.per_site.reserve(a.per_site.size());
  for (const auto& s : a.per_site) {
    out.per_site.push_back({alpha * s.entries, s.label});
  }
  return out;
}

ExtensiveOperator ext_dagger(const ExtensiveOperator& a) {
  ExtensiveOperator out{a.spec, {}};
  out.per_site.reserve(a.per_site.size());
  for (const auto& s : a.per_site) {
    out.per_site.push_back({s.entries.adjoint(), s.label});
  }
  return out;
}

ExtensiveOperator uniform_extensive(const SiteOperator& b,
                                    const LatticeSpec& spec) {
  spec.validate();
  if (b.dim() != spec.local_dim) {
    throw DimensionMismatch("site operator dimension does not match lattice");
  }
  return {spec, std::vector<SiteOperator>(static_cast<size_t>(spec.n_sites), b)};
}

void prune(SparseMatrix& m, double tol) {
  m.prune([tol](int, int, const Complex& v) { return std::abs(v) >= tol; });
  m.makeCompressed();
}

}  // namespace dynsymlab
