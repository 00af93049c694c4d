#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dynsymlab/lie.hpp"
#include "dynsymlab/opalg.hpp"

namespace dynsymlab {

/// Hilbert-Schmidt-orthonormal basis of the extensive site-local operator
/// space: every traceless single-site generator placed on every site
/// (site-major, generator-minor), or the d^2-1 uniform sums when
/// uniform_only is set.
struct CandidateSpace {
  LatticeSpec spec;
  bool uniform_only = false;
  std::vector<ExtensiveOperator> basis;
  std::vector<LatticeOperator> compiled;
  std::vector<std::string> labels;

  int dimension() const { return static_cast<int>(basis.size()); }
};

/// T_uv = <B_u, [H, B_v]>_HS, the adjoint map of H projected onto the
/// candidate space. Hermitian whenever H is.
struct ProjectedAdjoint {
  Eigen::MatrixXcd matrix;
};

struct DynamicalSymmetry {
  ExtensiveOperator op;       // unit HS norm, deterministic phase
  Eigen::VectorXcd coeffs;    // over the candidate basis
  double lambda = 0.0;
  double residual = 0.0;      // full-space relative residual
  int partner = -1;           // index of the -lambda entry, -1 if unpaired
};

struct ChargeBasis {
  std::vector<ExtensiveOperator> charges;
  std::vector<Eigen::VectorXcd> coeffs;
  Eigen::MatrixXcd gram;
  std::vector<bool> uniform;  // true when the charge is site-uniform
};

struct FinderOptions {
  double tol_residual = 1e-8;
  double tol_group = 1e-8;
  bool uniform_only = false;
};

struct SymmetryReport {
  std::string model;
  LatticeSpec spec;
  FinderOptions options;
  double h_scale = 0.0;                       // RMS eigenvalue scale of H
  std::vector<DynamicalSymmetry> symmetries;  // lambda != 0 entries, paired
  ChargeBasis charges;                        // lambda == 0 entries
  std::vector<std::string> warnings;

  int pair_count() const {
    int n = 0;
    for (const auto& s : symmetries) {
      if (s.lambda > 0.0) ++n;
    }
    return n;
  }
};

struct TheoremViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RootCheck {
  std::vector<double> root_values;
  double predicted_lambda = 0.0;
  double measured_lambda = 0.0;
  double residual = 0.0;
};

struct OverlapEntry {
  int observable_index = -1;
  int symmetry_index = -1;
  Complex overlap;
  bool nonstationary_flag = false;
};

CandidateSpace build_candidate_space(const LatticeSpec& spec,
                                     bool uniform_only = false);

ProjectedAdjoint projected_adjoint(const LatticeOperator& hamiltonian,
                                   const CandidateSpace& space);

SymmetryReport find_eigenoperators(const LatticeOperator& hamiltonian,
                                   const CandidateSpace& space,
                                   const FinderOptions& options = {});

ChargeBasis extract_charges(const SymmetryReport& report);

/// Theorem-1 construction: Q = [A_+, A_-], verified to commute with H, be
/// Hermitian, and stay site-local extensive. Returns the unnormalized
/// commutator re-expressed over the candidate space.
ExtensiveOperator theorem1_charge(const DynamicalSymmetry& plus,
                                  const DynamicalSymmetry& minus,
                                  const LatticeOperator& hamiltonian,
                                  const CandidateSpace& space,
                                  double tol = 1e-8);

/// H = H_g + sum_a c_a Q_a; preconditions ([H_g, Q_a] = 0, Q_a mutually
/// commuting) are checked.
LatticeOperator theorem2_build(const LatticeOperator& h_symmetric,
                               const std::vector<ExtensiveOperator>& charges,
                               const std::vector<double>& coefficients,
                               double tol = 1e-10);

/// For every root vector of the Cartan-Weyl basis (lifted to a uniform
/// extensive operator), the measured commutator eigenvalue must match
/// sum_a c_a beta(a).
std::vector<RootCheck> theorem2_verify(
    const LatticeOperator& hamiltonian, const CartanWeylBasis& cartan_weyl,
    const std::vector<double>& coefficients, double tol = 1e-9);

std::vector<OverlapEntry> overlap_observables(
    const SymmetryReport& report,
    const std::vector<LatticeOperator>& observables, double tol = 1e-10);

}  // namespace dynsymlab
