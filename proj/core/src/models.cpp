#include "dynsymlab/models.hpp"

#include <cmath>

namespace dynsymlab {

namespace {

const Complex kI{0.0, 1.0};

double require_coupling(const ModelConfig& config, const std::string& key) {
  auto it = config.couplings.find(key);
  if (it == config.couplings.end()) {
    throw std::invalid_argument("model config missing coupling '" + key + "'");
  }
  if (!std::isfinite(it->second)) {
    throw std::invalid_argument("coupling '" + key + "' is not finite");
  }
  return it->second;
}

std::vector<std::pair<int, int>> neighbour_pairs(int n_sites, int range,
                                                 Boundary boundary) {
  std::vector<std::pair<int, int>> pairs;
  for (int j = 1; j + range <= n_sites; ++j) pairs.emplace_back(j, j + range);
  if (boundary == Boundary::Periodic) {
    for (int j = n_sites - range + 1; j <= n_sites; ++j) {
      pairs.emplace_back(j, (j + range - 1) % n_sites + 1);
    }
  }
  return pairs;
}

/// (J/2) * sum over NN and NNN pairs of sum_a basis[a] basis[a], for any
/// single-site generator set (Pauli or Gell-Mann).
LatticeOperator isotropic_exchange(const LatticeSpec& spec,
                                   const std::vector<SiteOperator>& site_basis,
                                   double coupling, double nnn_coupling) {
  LatticeOperator h = lattice_zero(spec);
  for (int range : {1, 2}) {
    const double strength = (range == 1) ? coupling : nnn_coupling;
    if (strength == 0.0) continue;
    for (const auto& [j, k] : neighbour_pairs(spec.n_sites, range,
                                              spec.boundary)) {
      for (const auto& g : site_basis) {
        h.mat += (strength / 2.0) *
                 embed_product({{j, g}, {k, g}}, spec).mat;
      }
    }
  }
  prune(h.mat);
  return h;
}

// Two-dimensional qubit blocks for the Jordan-Wigner encoding.
DenseMatrix qubit_lowering() {
  DenseMatrix m = DenseMatrix::Zero(2, 2);
  m(0, 1) = 1.0;  // |0><1|, annihilates the occupied state
  return m;
}

DenseMatrix qubit_parity() {
  DenseMatrix z = DenseMatrix::Zero(2, 2);
  z(0, 0) = 1.0;
  z(1, 1) = -1.0;
  return z;
}

DenseMatrix kron2(const DenseMatrix& a, const DenseMatrix& b) {
  DenseMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

}  // namespace

LatticeOperator build_field_chain(int n_sites, double field) {
  const LatticeSpec spec{n_sites, 2, Boundary::Open};
  spec.validate();
  const auto paulis = pauli_basis();
  return compile(ext_scale(field, uniform_extensive(paulis[2], spec)));
}

LatticeOperator build_heisenberg_nnn(int n_sites, double coupling, double field,
                                     Boundary boundary,
                                     std::optional<double> nnn_coupling) {
  if (n_sites < 4) {
    throw std::invalid_argument(
        "heisenberg_nnn needs at least 4 sites for next-nearest neighbours");
  }
  const LatticeSpec spec{n_sites, 2, boundary};
  spec.validate();
  const auto paulis = pauli_basis();
  LatticeOperator h = isotropic_exchange(spec, paulis, coupling,
                                         nnn_coupling.value_or(coupling));
  h.mat += (field / 2.0) * compile(uniform_extensive(paulis[2], spec)).mat;
  prune(h.mat);
  return h;
}

LatticeOperator build_three_body_su2(int n_sites, double coupling,
                                     double field) {
  if (n_sites < 3) {
    throw std::invalid_argument("three-body chain needs at least 3 sites");
  }
  const LatticeSpec spec{n_sites, 2, Boundary::Open};
  spec.validate();
  const auto p = pauli_basis();
  LatticeOperator h = lattice_zero(spec);
  // Cyclic minus anticyclic triple products: the scalar chirality
  // epsilon_abc s_a s_b s_c on each consecutive triple.
  const int cyc[3][3] = {{0, 1, 2}, {1, 2, 0}, {2, 0, 1}};
  const int anti[3][3] = {{2, 1, 0}, {0, 2, 1}, {1, 0, 2}};
  for (int j = 1; j + 2 <= n_sites; ++j) {
    for (const auto& idx : cyc) {
      h.mat += coupling *
               embed_product({{j, p[idx[0]]}, {j + 1, p[idx[1]]},
                              {j + 2, p[idx[2]]}},
                             spec)
                   .mat;
    }
    for (const auto& idx : anti) {
      h.mat -= coupling *
               embed_product({{j, p[idx[0]]}, {j + 1, p[idx[1]]},
                              {j + 2, p[idx[2]]}},
                             spec)
                   .mat;
    }
  }
  h.mat += (field / 2.0) * compile(uniform_extensive(p[2], spec)).mat;
  prune(h.mat);
  return h;
}

LatticeOperator build_su3_chain(int n_sites, double coupling, double field_3,
                                double field_8, Boundary boundary) {
  if (n_sites < 4) {
    throw std::invalid_argument(
        "su3 chain needs at least 4 sites for next-nearest neighbours");
  }
  const LatticeSpec spec{n_sites, 3, boundary};
  spec.validate();
  const auto taus = gell_mann_basis(3);
  LatticeOperator h = isotropic_exchange(spec, taus, coupling, coupling);
  h.mat += (field_3 / 2.0) * compile(uniform_extensive(taus[2], spec)).mat;
  h.mat += (field_8 / 2.0) * compile(uniform_extensive(taus[7], spec)).mat;
  prune(h.mat);
  return h;
}

FermionMap jordan_wigner(int n_fermion_sites) {
  if (n_fermion_sites < 2) {
    throw std::invalid_argument("jordan_wigner needs at least 2 sites");
  }
  const LatticeSpec spec{n_fermion_sites, 4, Boundary::Open};
  spec.validate();
  const DenseMatrix low = qubit_lowering();
  const DenseMatrix z = qubit_parity();
  const DenseMatrix id2 = DenseMatrix::Identity(2, 2);
  const SiteOperator site_parity{kron2(z, z), "parity"};
  const SiteOperator low_up{kron2(low, id2), "c_up"};
  const SiteOperator low_dn{kron2(z, low), "c_dn"};

  FermionMap map;
  map.spec = spec;
  for (int j = 1; j <= n_fermion_sites; ++j) {
    for (int spin = 0; spin < 2; ++spin) {
      std::vector<std::pair<int, SiteOperator>> factors;
      for (int m = 1; m < j; ++m) factors.emplace_back(m, site_parity);
      factors.emplace_back(j, spin == 0 ? low_up : low_dn);
      LatticeOperator c = embed_product(factors, spec);
      map.mode_order.emplace_back(j, spin);
      map.create.push_back(dagger(c));
      map.annihilate.push_back(std::move(c));
    }
  }
  return map;
}

LatticeOperator build_hubbard(int n_fermion_sites, double hopping,
                              double interaction, double chemical_potential,
                              double field) {
  const FermionMap fm = jordan_wigner(n_fermion_sites);
  const LatticeSpec& spec = fm.spec;
  LatticeOperator h = lattice_zero(spec);

  auto mode = [&](int site, int spin) { return 2 * (site - 1) + spin; };

  // Hopping over the L-1 open-chain bonds.
  for (int j = 1; j < n_fermion_sites; ++j) {
    for (int spin = 0; spin < 2; ++spin) {
      const SparseMatrix hop =
          fm.create[static_cast<size_t>(mode(j, spin))].mat *
          fm.annihilate[static_cast<size_t>(mode(j + 1, spin))].mat;
      h.mat += -hopping * (hop + SparseMatrix(hop.adjoint()));
    }
  }
  // On-site terms over all L sites.
  const auto site_ops = hubbard_site_ops();
  for (int j = 1; j <= n_fermion_sites; ++j) {
    const SparseMatrix n_up = embed(site_ops.n_up, j, spec).mat;
    const SparseMatrix n_dn = embed(site_ops.n_dn, j, spec).mat;
    h.mat += interaction * SparseMatrix(n_up * n_dn);
    h.mat += -chemical_potential * (n_up + n_dn);
    h.mat += (field / 2.0) * (n_up - n_dn);
  }
  prune(h.mat);
  return h;
}

HubbardSiteOps hubbard_site_ops() {
  const DenseMatrix low = qubit_lowering();
  const DenseMatrix raise = low.adjoint();
  const DenseMatrix id2 = DenseMatrix::Identity(2, 2);
  const DenseMatrix n = raise * low;

  HubbardSiteOps ops;
  ops.n_up = {kron2(n, id2), "n_up"};
  ops.n_dn = {kron2(id2, n), "n_dn"};
  ops.s_z = {ops.n_up.entries - ops.n_dn.entries, "s_z"};
  ops.eta_z = {ops.n_up.entries + ops.n_dn.entries -
                   DenseMatrix::Identity(4, 4),
               "eta_z"};
  // On-site bilinears: the Jordan-Wigner strings cancel within the site.
  ops.s_plus = {kron2(raise, low), "s_plus"};
  ops.eta_plus = {kron2(raise, raise), "eta_plus"};
  return ops;
}

ExtensiveOperator total_spin(int n_sites, int axis) {
  const LatticeSpec spec{n_sites, 2, Boundary::Open};
  return uniform_extensive(pauli_basis()[static_cast<size_t>(axis)], spec);
}

ExtensiveOperator hubbard_s_z_total(int n_fermion_sites) {
  const LatticeSpec spec{n_fermion_sites, 4, Boundary::Open};
  return uniform_extensive(hubbard_site_ops().s_z, spec);
}

ExtensiveOperator hubbard_eta_z_total(int n_fermion_sites) {
  const LatticeSpec spec{n_fermion_sites, 4, Boundary::Open};
  return uniform_extensive(hubbard_site_ops().eta_z, spec);
}

ExtensiveOperator hubbard_s_plus_total(int n_fermion_sites) {
  const LatticeSpec spec{n_fermion_sites, 4, Boundary::Open};
  return uniform_extensive(hubbard_site_ops().s_plus, spec);
}

ExtensiveOperator hubbard_eta_plus_total(int n_fermion_sites) {
  const LatticeSpec spec{n_fermion_sites, 4, Boundary::Open};
  ExtensiveOperator out = uniform_extensive(hubbard_site_ops().eta_plus, spec);
  for (int j = 1; j <= n_fermion_sites; ++j) {
    if (j % 2 == 1) {
      out.per_site[static_cast<size_t>(j - 1)].entries *= -1.0;
    }
  }
  return out;
}

LatticeSpec model_spec(const ModelConfig& config) {
  int d = 2;
  if (config.variant == ModelVariant::Su3Chain) d = 3;
  if (config.variant == ModelVariant::Hubbard) d = 4;
  Boundary b = config.boundary;
  if (config.variant == ModelVariant::Hubbard ||
      config.variant == ModelVariant::FieldChain ||
      config.variant == ModelVariant::ThreeBodySu2) {
    b = Boundary::Open;
  }
  return LatticeSpec{config.n_sites, d, b};
}

LatticeOperator build_model(const ModelConfig& config) {
  switch (config.variant) {
    case ModelVariant::FieldChain:
      return build_field_chain(config.n_sites, require_coupling(config, "B"));
    case ModelVariant::HeisenbergNnn: {
      std::optional<double> j2;
      if (config.couplings.count("J2")) j2 = config.couplings.at("J2");
      return build_heisenberg_nnn(config.n_sites,
                                  require_coupling(config, "J"),
                                  require_coupling(config, "B"),
                                  config.boundary, j2);
    }
    case ModelVariant::ThreeBodySu2:
      return build_three_body_su2(config.n_sites,
                                  require_coupling(config, "J"),
                                  require_coupling(config, "B"));
    case ModelVariant::Su3Chain:
      return build_su3_chain(config.n_sites, require_coupling(config, "J"),
                             require_coupling(config, "B1"),
                             require_coupling(config, "B2"), config.boundary);
    case ModelVariant::Hubbard:
      return build_hubbard(config.n_sites, require_coupling(config, "t"),
                           require_coupling(config, "U"),
                           require_coupling(config, "mu"),
                           require_coupling(config, "B"));
  }
  throw std::invalid_argument("unknown model variant");
}

}  // namespace dynsymlab
