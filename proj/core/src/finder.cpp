#include "dynsymlab/finder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dynsymlab {

namespace {

const Complex kI{0.0, 1.0};

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

/// Reassemble a candidate-space coefficient vector into an extensive
/// operator with explicit per-site matrices.
ExtensiveOperator candidate_to_extensive(const Eigen::VectorXcd& coeffs,
                                         const CandidateSpace& space) {
  const int d = space.spec.local_dim;
  ExtensiveOperator out{space.spec,
                        std::vector<SiteOperator>(
                            static_cast<size_t>(space.spec.n_sites),
                            SiteOperator{DenseMatrix::Zero(d, d), ""})};
  for (int u = 0; u < space.dimension(); ++u) {
    if (std::abs(coeffs(u)) < kStructuralZero) continue;
    const auto& b = space.basis[static_cast<size_t>(u)];
    for (int j = 0; j < space.spec.n_sites; ++j) {
      out.per_site[static_cast<size_t>(j)].entries +=
          coeffs(u) * b.per_site[static_cast<size_t>(j)].entries;
    }
  }
  return out;
}

LatticeOperator compile_candidate(const Eigen::VectorXcd& coeffs,
                                  const CandidateSpace& space) {
  LatticeOperator out = lattice_zero(space.spec);
  for (int u = 0; u < space.dimension(); ++u) {
    if (std::abs(coeffs(u)) < kStructuralZero) continue;
    out.mat += coeffs(u) * space.compiled[static_cast<size_t>(u)].mat;
  }
  prune(out.mat);
  return out;
}

double rms_scale(const LatticeOperator& h) {
  return hs_norm(h) / std::sqrt(static_cast<double>(h.spec.dim()));
}

bool is_uniform_pattern(const Eigen::VectorXcd& coeffs, int n_sites,
                        int n_generators, double tol) {
  for (int b = 0; b < n_generators; ++b) {
    const Complex first = coeffs(b);
    for (int j = 1; j < n_sites; ++j) {
      if (std::abs(coeffs(j * n_generators + b) - first) > tol) return false;
    }
  }
  return true;
}

}  // namespace

CandidateSpace build_candidate_space(const LatticeSpec& spec,
                                     bool uniform_only) {
  spec.validate();
  const auto generators = gell_mann_basis(spec.local_dim);
  CandidateSpace space;
  space.spec = spec;
  space.uniform_only = uniform_only;
  const double site_norm =
      std::sqrt(2.0 * std::pow(static_cast<double>(spec.local_dim),
                               spec.n_sites - 1));
  if (uniform_only) {
    const double norm = site_norm * std::sqrt(static_cast<double>(spec.n_sites));
    for (const auto& g : generators) {
      SiteOperator scaled{g.entries / norm, g.label};
      space.basis.push_back(uniform_extensive(scaled, spec));
      space.labels.push_back("uniform:" + g.label);
    }
  } else {
    for (int j = 1; j <= spec.n_sites; ++j) {
      for (const auto& g : generators) {
        ExtensiveOperator b{spec,
                            std::vector<SiteOperator>(
                                static_cast<size_t>(spec.n_sites),
                                SiteOperator{DenseMatrix::Zero(spec.local_dim,
                                                               spec.local_dim),
                                             ""})};
        b.per_site[static_cast<size_t>(j - 1)] =
            SiteOperator{g.entries / site_norm, g.label};
        space.basis.push_back(std::move(b));
        space.labels.push_back("site" + std::to_string(j) + ":" + g.label);
      }
    }
  }
  for (const auto& b : space.basis) space.compiled.push_back(compile(b));
  return space;
}

ProjectedAdjoint projected_adjoint(const LatticeOperator& hamiltonian,
                                   const CandidateSpace& space) {
  if (!(hamiltonian.spec == space.spec)) {
    throw DimensionMismatch("hamiltonian and candidate space disagree");
  }
  const int n = space.dimension();
  Eigen::MatrixXcd t(n, n);
  for (int v = 0; v < n; ++v) {
    const LatticeOperator bracket =
        commutator(hamiltonian, space.compiled[static_cast<size_t>(v)]);
    for (int u = 0; u < n; ++u) {
      t(u, v) = hs_inner(space.compiled[static_cast<size_t>(u)], bracket);
    }
  }
  if (is_hermitian(hamiltonian) &&
      (t - t.adjoint()).norm() > 1e-10 * std::max(1.0, t.norm())) {
    throw std::runtime_error(
        "projected adjoint lost Hermiticity for a Hermitian Hamiltonian");
  }
  return {std::move(t)};
}

SymmetryReport find_eigenoperators(const LatticeOperator& hamiltonian,
                                   const CandidateSpace& space,
                                   const FinderOptions& options) {
  if (options.tol_residual <= 0 || options.tol_group <= 0) {
    throw std::invalid_argument("tolerances must be positive");
  }
  SymmetryReport report;
  report.spec = space.spec;
  report.options = options;
  report.h_scale = rms_scale(hamiltonian);
  const double scale = std::max(1.0, report.h_scale);
  const double tol_zero = options.tol_group * scale;
  const double tol_keep = options.tol_residual * scale;

  const ProjectedAdjoint proj = projected_adjoint(hamiltonian, space);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(proj.matrix);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("eigensolver failed on the projected adjoint");
  }
  const auto& vals = es.eigenvalues();
  const auto& vecs = es.eigenvectors();
  const int n = space.dimension();

  struct Retained {
    Eigen::VectorXcd coeffs;
    double lambda;
    double residual;
  };
  std::vector<Retained> kept;

  int start = 0;
  while (start < n) {
    int stop = start + 1;
    while (stop < n && vals(stop) - vals(stop - 1) < tol_zero) ++stop;
    const int m = stop - start;
    const double lambda = vals.segment(start, m).mean();

    // Within a degenerate projected eigenspace the solver basis is
    // arbitrary; the exact eigenoperators form the null space of the Gram
    // matrix of full-space residuals.
    std::vector<LatticeOperator> residuals;
    residuals.reserve(static_cast<size_t>(m));
    for (int i = 0; i < m; ++i) {
      const LatticeOperator a =
          compile_candidate(vecs.col(start + i), space);
      LatticeOperator r = commutator(hamiltonian, a);
      r.mat -= lambda * a.mat;
      prune(r.mat);
      residuals.push_back(std::move(r));
    }
    Eigen::MatrixXcd gram(m, m);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        gram(i, j) = hs_inner(residuals[static_cast<size_t>(i)],
                              residuals[static_cast<size_t>(j)]);
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ges(gram);
    // Gram eigenvalues near zero carry floating noise of order
    // eps * ||gram||; the exact residual recomputed below is authoritative.
    const double gram_floor = std::sqrt(
        64.0 * std::numeric_limits<double>::epsilon() *
        std::max(1.0, gram.norm()));
    for (int i = 0; i < m; ++i) {
      const double r2 = std::max(0.0, ges.eigenvalues()(i));
      if (std::sqrt(r2) > std::max(tol_keep, gram_floor)) continue;
      Eigen::VectorXcd combo =
          vecs.middleCols(start, m) * ges.eigenvectors().col(i);
      fix_phase(combo);
      // Re-verify in the full space with the final vector.
      const LatticeOperator a = compile_candidate(combo, space);
      LatticeOperator r = commutator(hamiltonian, a);
      r.mat -= lambda * a.mat;
      const double resid = hs_norm(r);
      if (resid > tol_keep) continue;
      kept.push_back({std::move(combo), lambda, resid});
    }
    start = stop;
  }

  // Split into charges (lambda ~ 0) and symmetry entries, then pair the
  // latter by complex conjugation of the coefficient vector (the dagger of
  // an eigenoperator at +lambda is one at -lambda).
  std::vector<Retained> zero_entries;
  std::vector<Retained> plus_entries;
  std::vector<Retained> minus_entries;
  for (auto& k : kept) {
    if (std::abs(k.lambda) <= tol_zero) {
      k.lambda = 0.0;
      zero_entries.push_back(std::move(k));
    } else if (k.lambda > 0.0) {
      plus_entries.push_back(std::move(k));
    } else {
      minus_entries.push_back(std::move(k));
    }
  }
  if (plus_entries.size() != minus_entries.size()) {
    report.warnings.push_back(
        "unpaired nonzero-lambda entries: " +
        std::to_string(plus_entries.size()) + " at +lambda vs " +
        std::to_string(minus_entries.size()) + " at -lambda");
  }

  for (size_t i = 0; i < plus_entries.size(); ++i) {
    const auto& p = plus_entries[i];
    DynamicalSymmetry sym;
    sym.coeffs = p.coeffs;
    sym.lambda = p.lambda;
    sym.residual = p.residual;
    sym.op = candidate_to_extensive(p.coeffs, space);
    report.symmetries.push_back(std::move(sym));

    DynamicalSymmetry partner;
    partner.coeffs = p.coeffs.conjugate();
    partner.lambda = -p.lambda;
    // The dagger satisfies the mirrored relation to the same accuracy;
    // verify rather than assume.
    const LatticeOperator a = compile_candidate(partner.coeffs, space);
    LatticeOperator r = commutator(hamiltonian, a);
    r.mat -= partner.lambda * a.mat;
    partner.residual = hs_norm(r);
    partner.op = candidate_to_extensive(partner.coeffs, space);
    report.symmetries.push_back(std::move(partner));

    const int plus_idx = static_cast<int>(report.symmetries.size()) - 2;
    report.symmetries[static_cast<size_t>(plus_idx)].partner = plus_idx + 1;
    report.symmetries[static_cast<size_t>(plus_idx + 1)].partner = plus_idx;
    if (report.symmetries.back().residual > tol_keep) {
      report.warnings.push_back("pairing violated: dagger of a +lambda "
                                "eigenoperator failed its residual check");
    }
  }

  // Hermitianize and orthonormalize the zero-lambda kernel.
  std::vector<Eigen::VectorXcd> charge_vecs;
  auto add_orthogonal = [&](Eigen::VectorXcd v) {
    for (const auto& c : charge_vecs) v -= c.dot(v) * c;
    if (v.norm() < 1e-8) return;
    fix_phase(v);
    charge_vecs.push_back(std::move(v));
  };
  for (const auto& z : zero_entries) {
    // Hermitian and anti-Hermitian parts act on coefficients as +/- conj.
    add_orthogonal((z.coeffs + z.coeffs.conjugate()) / 2.0);
    add_orthogonal((z.coeffs - z.coeffs.conjugate()) / (2.0 * kI));
  }
  const int n_gen = space.uniform_only
                        ? space.dimension()
                        : space.dimension() / space.spec.n_sites;
  for (auto& v : charge_vecs) {
    ChargeBasis& cb = report.charges;
    const LatticeOperator q = compile_candidate(v, space);
    const double comm_resid = hs_norm(commutator(hamiltonian, q));
    if (comm_resid > tol_keep) continue;  // Hermitianization cross-check
    cb.charges.push_back(candidate_to_extensive(v, space));
    cb.uniform.push_back(space.uniform_only ||
                         is_uniform_pattern(v, space.spec.n_sites, n_gen,
                                            1e-8));
    cb.coeffs.push_back(std::move(v));
  }
  const int nq = static_cast<int>(report.charges.charges.size());
  report.charges.gram.resize(nq, nq);
  for (int i = 0; i < nq; ++i) {
    for (int j = 0; j < nq; ++j) {
      report.charges.gram(i, j) =
          report.charges.coeffs[static_cast<size_t>(i)].dot(
              report.charges.coeffs[static_cast<size_t>(j)]);
    }
  }
  return report;
}

ChargeBasis extract_charges(const SymmetryReport& report) {
  return report.charges;
}

ExtensiveOperator theorem1_charge(const DynamicalSymmetry& plus,
                                  const DynamicalSymmetry& minus,
                                  const LatticeOperator& hamiltonian,
                                  const CandidateSpace& space, double tol) {
  const double scale = std::max(1.0, rms_scale(hamiltonian));
  if (std::abs(plus.lambda + minus.lambda) > tol * scale) {
    throw TheoremViolation("pair lambdas are not opposite");
  }
  if ((plus.coeffs.conjugate() - minus.coeffs).norm() > 1e-6 &&
      (plus.coeffs.conjugate() + minus.coeffs).norm() > 1e-6) {
    // Allow an overall phase between the two members.
    Eigen::VectorXcd d = plus.coeffs.conjugate();
    const Complex overlap = minus.coeffs.dot(d);
    if (std::abs(std::abs(overlap) - 1.0) > 1e-8) {
      throw TheoremViolation("minus member is not the dagger of the plus one");
    }
  }
  const LatticeOperator a_plus = compile_candidate(plus.coeffs, space);
  const LatticeOperator a_minus = compile_candidate(minus.coeffs, space);
  const LatticeOperator q = commutator(a_plus, a_minus);
  const double qn = hs_norm(q);
  if (qn < 1e-12) {
    throw TheoremViolation("charge [A+, A-] vanished");
  }
  const double conserve = hs_norm(commutator(hamiltonian, q)) / qn;
  if (conserve > tol * scale) {
    throw TheoremViolation("theorem-1 charge not conserved, residual " +
                           std::to_string(conserve));
  }
  if (!is_hermitian(q, 1e-10)) {
    throw TheoremViolation("theorem-1 charge not Hermitian");
  }
  // Site-locality: Q must be fully captured by the extensive site-local
  // candidate space.
  Eigen::VectorXcd q_coeffs(space.dimension());
  LatticeOperator recon = lattice_zero(space.spec);
  for (int u = 0; u < space.dimension(); ++u) {
    q_coeffs(u) = hs_inner(space.compiled[static_cast<size_t>(u)], q);
    recon.mat += q_coeffs(u) * space.compiled[static_cast<size_t>(u)].mat;
  }
  LatticeOperator diff{q.spec, SparseMatrix(q.mat - recon.mat)};
  if (hs_norm(diff) > tol * qn) {
    throw TheoremViolation("theorem-1 charge is not site-local extensive");
  }
  return candidate_to_extensive(q_coeffs, space);
}

LatticeOperator theorem2_build(const LatticeOperator& h_symmetric,
                               const std::vector<ExtensiveOperator>& charges,
                               const std::vector<double>& coefficients,
                               double tol) {
  if (charges.size() != coefficients.size()) {
    throw std::invalid_argument("one coefficient per charge required");
  }
  const double scale = std::max(1.0, rms_scale(h_symmetric));
  std::vector<LatticeOperator> compiled;
  for (const auto& q : charges) compiled.push_back(compile(q));
  for (size_t i = 0; i < compiled.size(); ++i) {
    const double resid = hs_norm(commutator(h_symmetric, compiled[i]));
    if (resid > tol * scale * std::max(1.0, hs_norm(compiled[i]))) {
      throw TheoremViolation("charge " + std::to_string(i) +
                             " does not commute with the symmetric part, "
                             "residual " + std::to_string(resid));
    }
    for (size_t j = i + 1; j < compiled.size(); ++j) {
      const double cross = hs_norm(commutator(compiled[i], compiled[j]));
      if (cross > tol * std::max(1.0, hs_norm(compiled[i]) *
                                          hs_norm(compiled[j]))) {
        throw TheoremViolation("charges " + std::to_string(i) + " and " +
                               std::to_string(j) + " do not commute");
      }
    }
  }
  LatticeOperator h = h_symmetric;
  for (size_t i = 0; i < compiled.size(); ++i) {
    h.mat += coefficients[i] * compiled[i].mat;
  }
  prune(h.mat);
  return h;
}

std::vector<RootCheck> theorem2_verify(
    const LatticeOperator& hamiltonian, const CartanWeylBasis& cartan_weyl,
    const std::vector<double>& coefficients, double tol) {
  if (coefficients.size() != static_cast<size_t>(cartan_weyl.cartan.rank())) {
    throw std::invalid_argument("one coefficient per Cartan charge required");
  }
  std::vector<RootCheck> checks;
  for (const auto& root : cartan_weyl.roots) {
    const ExtensiveOperator lifted =
        uniform_extensive(root.plus_vector, hamiltonian.spec);
    const LatticeOperator a = compile(lifted);
    const double an2 = std::real(hs_inner(a, a));
    const LatticeOperator bracket = commutator(hamiltonian, a);
    RootCheck check;
    check.root_values = root.root_values;
    check.measured_lambda = std::real(hs_inner(a, bracket)) / an2;
    for (size_t i = 0; i < coefficients.size(); ++i) {
      check.predicted_lambda += coefficients[i] * root.root_values[i];
    }
    LatticeOperator r = bracket;
    r.mat -= check.measured_lambda * a.mat;
    check.residual = hs_norm(r) / std::sqrt(an2);
    if (std::abs(check.measured_lambda - check.predicted_lambda) > tol ||
        check.residual > tol * std::max(1.0, rms_scale(hamiltonian))) {
      throw TheoremViolation(
          "root-vector eigenvalue mismatch: predicted " +
          std::to_string(check.predicted_lambda) + ", measured " +
          std::to_string(check.measured_lambda) + ", residual " +
          std::to_string(check.residual));
    }
    checks.push_back(std::move(check));
  }
  return checks;
}

std::vector<OverlapEntry> overlap_observables(
    const SymmetryReport& report,
    const std::vector<LatticeOperator>& observables, double tol) {
  std::vector<OverlapEntry> out;
  for (size_t oi = 0; oi < observables.size(); ++oi) {
    const LatticeOperator obs_dag = dagger(observables[oi]);
    for (size_t si = 0; si < report.symmetries.size(); ++si) {
      const LatticeOperator a = compile(report.symmetries[si].op);
      OverlapEntry entry;
      entry.observable_index = static_cast<int>(oi);
      entry.symmetry_index = static_cast<int>(si);
      entry.overlap = hs_inner(obs_dag, a);  // plain tr[O A]
      entry.nonstationary_flag = std::abs(entry.overlap) > tol;
      out.push_back(entry);
    }
  }
  return out;
}

}  // namespace dynsymlab
