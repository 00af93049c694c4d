#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dynsymlab/opalg.hpp"

namespace dynsymlab {

enum class ModelVariant {
  FieldChain,
  HeisenbergNnn,
  ThreeBodySu2,
  Su3Chain,
  Hubbard,
};

struct ModelConfig {
  ModelVariant variant = ModelVariant::FieldChain;
  int n_sites = 0;
  std::map<std::string, double> couplings;
  Boundary boundary = Boundary::Open;
};

/// Jordan-Wigner encoding of 2L fermionic modes into L four-dimensional
/// sites, mode order (1up, 1down, 2up, 2down, ...). Anticommutation
/// relations hold exactly.
struct FermionMap {
  LatticeSpec spec;  // n_sites = L, local_dim = 4
  std::vector<std::pair<int, int>> mode_order;  // (site, spin), spin 0=up 1=down
  std::vector<LatticeOperator> annihilate;      // c_k, one per mode
  std::vector<LatticeOperator> create;          // c_k^dag

  int mode_count() const { return static_cast<int>(mode_order.size()); }
};

// H = B sum_j sigma_z^(j)
LatticeOperator build_field_chain(int n_sites, double field);

// H = (B/2) sum_j sigma_z^(j)
//   + (J/2) sum_NN (sx sx + sy sy + sz sz) + (J2/2) sum_NNN (same),
// J2 defaults to J.
LatticeOperator build_heisenberg_nnn(int n_sites, double coupling, double field,
                                     Boundary boundary = Boundary::Open,
                                     std::optional<double> nnn_coupling = {});

// SU(2)-symmetric three-body chain: J3 * sum_j (cyclic - anticyclic triple
// products of sx, sy, sz on sites j, j+1, j+2) + (B/2) sum_j sigma_z^(j).
LatticeOperator build_three_body_su2(int n_sites, double coupling,
                                     double field);

// H = (J/2) sum_a [sum_NN + sum_NNN] tau_a tau_a
//   + (B1/2) sum_j tau_3^(j) + (B2/2) sum_j tau_8^(j)
LatticeOperator build_su3_chain(int n_sites, double coupling, double field_3,
                                double field_8,
                                Boundary boundary = Boundary::Open);

FermionMap jordan_wigner(int n_fermion_sites);

// 1D open-chain Hubbard model:
// H = -t sum_{j<L, sigma} (c+_sigma,j c_sigma,j+1 + h.c.)
//   + sum_j [ U n_up n_dn - mu (n_up + n_dn) + (B/2)(n_up - n_dn) ]
LatticeOperator build_hubbard(int n_fermion_sites, double hopping,
                              double interaction, double chemical_potential,
                              double field);

LatticeOperator build_model(const ModelConfig& config);
LatticeSpec model_spec(const ModelConfig& config);

// Single-site 4x4 blocks of the Hubbard chain in the Jordan-Wigner qubit
// encoding (mode order up, down within the site). s_plus is c+_up c_dn;
// eta_plus is c+_up c+_dn without the staggering sign.
struct HubbardSiteOps {
  SiteOperator n_up;
  SiteOperator n_dn;
  SiteOperator s_z;       // n_up - n_dn
  SiteOperator eta_z;     // n_up + n_dn - 1
  SiteOperator s_plus;
  SiteOperator eta_plus;
};
HubbardSiteOps hubbard_site_ops();

// Named extensive operators used across models and tests.
ExtensiveOperator total_spin(int n_sites, int axis);  // axis 0,1,2 = x,y,z
ExtensiveOperator hubbard_s_z_total(int n_fermion_sites);
ExtensiveOperator hubbard_eta_z_total(int n_fermion_sites);
ExtensiveOperator hubbard_s_plus_total(int n_fermion_sites);
ExtensiveOperator hubbard_eta_plus_total(int n_fermion_sites);

}  // namespace dynsymlab
