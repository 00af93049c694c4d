#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "dynsymlab/evolve.hpp"
#include "dynsymlab/models.hpp"

using namespace dynsymlab;

namespace {

const Complex kI{0.0, 1.0};

std::vector<Eigen::VectorXcd> all_plus_x(int n) {
  Eigen::VectorXcd v(2);
  v << 1.0, 1.0;
  v /= std::sqrt(2.0);
  return std::vector<Eigen::VectorXcd>(static_cast<size_t>(n), v);
}

std::vector<Eigen::VectorXcd> all_up(int n) {
  Eigen::VectorXcd v(2);
  v << 1.0, 0.0;
  return std::vector<Eigen::VectorXcd>(static_cast<size_t>(n), v);
}

}  // namespace

TEST_CASE("diagonalize the two-site field chain") {
  const auto spectrum = diagonalize(build_field_chain(2, 1.0));
  REQUIRE(spectrum.energies.size() == 4);
  CHECK(spectrum.energies(0) == doctest::Approx(-2.0));
  CHECK(spectrum.energies(1) == doctest::Approx(0.0));
  CHECK(spectrum.energies(2) == doctest::Approx(0.0));
  CHECK(spectrum.energies(3) == doctest::Approx(2.0));
  // Orthonormality of the eigenbasis.
  const DenseMatrix gram =
      spectrum.eigenvectors.adjoint() * spectrum.eigenvectors;
  CHECK((gram - DenseMatrix::Identity(4, 4)).norm() < 1e-10);
}

TEST_CASE("diagonalize enforces the dense cap and hermiticity") {
  CHECK_THROWS_AS(diagonalize(build_field_chain(13, 1.0)),
                  DimensionCapExceeded);
  const LatticeSpec spec{2, 2, Boundary::Open};
  const LatticeOperator skew =
      scale(kI, embed(pauli_basis()[2], 1, spec));
  CHECK_THROWS_AS(diagonalize(skew), std::invalid_argument);
}

TEST_CASE("eigenpair residuals hold across the model matrix") {
  const std::vector<LatticeOperator> models = {
      build_field_chain(4, 0.9),
      build_heisenberg_nnn(4, 1.0, 0.5),
      build_three_body_su2(4, 1.0, 0.5),
      build_su3_chain(4, 1.0, 1.0, 0.7),
      build_hubbard(3, 1.0, 2.0, 0.5, 0.7),
  };
  for (const auto& h : models) {
    const auto spectrum = diagonalize(h);
    const DenseMatrix dense(h.mat);
    const DenseMatrix resid = dense * spectrum.eigenvectors -
                              spectrum.eigenvectors *
                                  spectrum.energies.asDiagonal();
    CHECK(resid.norm() < 1e-9 * std::max(1.0, dense.norm()));
  }
}

TEST_CASE("product states carry unit norm and the advertised energy") {
  const LatticeOperator h = build_field_chain(4, 1.0);
  const auto spectrum = diagonalize(h);

  const PreparedState plus_x =
      prepare_product_state(h.spec, all_plus_x(4), spectrum, "plus-x");
  CHECK(plus_x.amplitudes.norm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(plus_x.energy == doctest::Approx(0.0).epsilon(1e-12));

  // All-up is an eigenstate: amplitudes concentrate on a single index.
  const PreparedState up =
      prepare_product_state(h.spec, all_up(4), spectrum, "up");
  CHECK(up.amplitudes.cwiseAbs().maxCoeff() ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(up.energy == doctest::Approx(4.0).epsilon(1e-12));

  auto bad = all_up(4);
  bad[0] *= 2.0;
  CHECK_THROWS_AS(prepare_product_state(h.spec, bad, spectrum, "bad"),
                  std::invalid_argument);
}

TEST_CASE("sigma_x under the field chain follows cos(2Bt)") {
  const double b = 1.0;
  const LatticeOperator h = build_field_chain(2, b);
  const auto spectrum = diagonalize(h);
  const PreparedState state =
      prepare_product_state(h.spec, all_plus_x(2), spectrum, "plus-x");
  const LatticeOperator obs = embed(pauli_basis()[0], 1, h.spec);
  const TimeGrid grid{0.0, 0.05, 200};
  const TimeSeries series = expectation_series(obs, state, spectrum, grid);
  for (int k = 0; k < grid.n_steps; ++k) {
    CHECK(series.values[static_cast<size_t>(k)] ==
          doctest::Approx(std::cos(2.0 * b * grid.time_at(k))).epsilon(1e-10));
  }
}

TEST_CASE("energy is conserved along every series") {
  const LatticeOperator h = build_heisenberg_nnn(4, 1.0, 0.6);
  const auto spectrum = diagonalize(h);
  const PreparedState state =
      prepare_product_state(h.spec, all_plus_x(4), spectrum, "plus-x");
  const TimeGrid grid{0.0, 0.1, 64};
  const TimeSeries series = expectation_series(h, state, spectrum, grid);
  for (double v : series.values) {
    CHECK(v == doctest::Approx(state.energy).epsilon(1e-10));
  }
}

TEST_CASE("eigenstates produce constant series for every observable") {
  const LatticeOperator h = build_field_chain(3, 1.0);
  const auto spectrum = diagonalize(h);
  const PreparedState up =
      prepare_product_state(h.spec, all_up(3), spectrum, "up");
  const LatticeOperator obs = embed(pauli_basis()[0], 2, h.spec);
  const TimeGrid grid{0.0, 0.07, 128};
  const TimeSeries series = expectation_series(obs, up, spectrum, grid);
  for (double v : series.values) {
    CHECK(std::abs(v - series.values[0]) < 1e-12);
  }
}

TEST_CASE("non-hermitian observables are rejected") {
  const LatticeOperator h = build_field_chain(2, 1.0);
  const auto spectrum = diagonalize(h);
  const PreparedState state =
      prepare_product_state(h.spec, all_plus_x(2), spectrum, "plus-x");
  const LatticeOperator skew = scale(kI, embed(pauli_basis()[2], 1, h.spec));
  CHECK_THROWS_AS(
      expectation_series(skew, state, spectrum, {0.0, 0.1, 16}),
      std::invalid_argument);
}

TEST_CASE("thermal match at infinite temperature is exact") {
  const LatticeOperator h = build_heisenberg_nnn(4, 1.0, 0.5);
  const auto spectrum = diagonalize(h);
  const LatticeOperator obs = embed(pauli_basis()[2], 1, h.spec);
  const double e_mid = spectrum.energies.mean();
  const ThermalMatch match = thermal_match(spectrum, e_mid, {obs});
  CHECK(match.beta == doctest::Approx(0.0));
  const double infinite_t =
      DenseMatrix(obs.mat).trace().real() / static_cast<double>(h.spec.dim());
  CHECK(match.thermal_values[0] == doctest::Approx(infinite_t).epsilon(1e-12));
}

TEST_CASE("matched inverse temperature decreases with the target energy") {
  const LatticeOperator h = build_heisenberg_nnn(4, 1.0, 0.5);
  const auto spectrum = diagonalize(h);
  const double span = spectrum.spectral_span();
  const double e0 = spectrum.energies(0);
  double previous = std::numeric_limits<double>::infinity();
  for (double frac : {0.2, 0.4, 0.6, 0.8}) {
    const ThermalMatch match = thermal_match(spectrum, e0 + frac * span, {});
    CHECK(match.beta < previous);
    previous = match.beta;
  }
  CHECK_THROWS_AS(thermal_match(spectrum, e0 - 1.0, {}), UnmatchableEnergy);
  CHECK_THROWS_AS(thermal_match(spectrum, e0 + 2.0 * span, {}),
                  UnmatchableEnergy);
}

TEST_CASE("nonstationarity metrics on the oscillating field chain") {
  const double b = 1.0;
  const LatticeOperator h = build_field_chain(6, b);
  const auto spectrum = diagonalize(h);
  const PreparedState state =
      prepare_product_state(h.spec, all_plus_x(6), spectrum, "plus-x");
  const LatticeOperator obs = embed(pauli_basis()[0], 1, h.spec);
  const TimeGrid grid{0.0, 100.0 / 2048, 2048};
  const TimeSeries series = expectation_series(obs, state, spectrum, grid);
  const NonstationarityMetrics metrics =
      nonstationarity(series, state, spectrum, obs, {0.5, 1.0});

  CHECK(metrics.late_window_variance > 0.1);
  REQUIRE(!metrics.fourier_peaks.empty());
  const double bin = 2.0 * M_PI / (grid.dt * grid.n_steps);
  CHECK(std::abs(metrics.fourier_peaks[0].frequency - 2.0 * b) <= bin);
  CHECK(metrics.diag_ensemble == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("eigenstates have zero variance and no peaks") {
  const LatticeOperator h = build_field_chain(4, 1.0);
  const auto spectrum = diagonalize(h);
  const PreparedState up =
      prepare_product_state(h.spec, all_up(4), spectrum, "up");
  const LatticeOperator obs = embed(pauli_basis()[0], 1, h.spec);
  const TimeGrid grid{0.0, 0.05, 512};
  const TimeSeries series = expectation_series(obs, up, spectrum, grid);
  const NonstationarityMetrics metrics =
      nonstationarity(series, up, spectrum, obs, {0.5, 1.0});
  CHECK(metrics.late_window_variance < 1e-20);
  CHECK(metrics.fourier_peaks.empty());
  // The all-up state sits at the spectral edge; a thermal match either
  // fails outright or lands on the edge state, where the gap vanishes.
  if (metrics.thermal_gap_valid) {
    CHECK(metrics.thermal_gap < 1e-6);
  }
}

TEST_CASE("the long-time mean approaches the dephased ensemble") {
  const LatticeOperator h = build_heisenberg_nnn(5, 1.0, 0.8);
  const auto spectrum = diagonalize(h);
  const PreparedState state = prepare_product_state(
      h.spec, default_initial_state(h.spec, "tilted"), spectrum, "tilted");
  const LatticeOperator obs = embed(pauli_basis()[2], 1, h.spec);
  const double t_total = 400.0;
  const TimeGrid grid{0.0, t_total / 4096, 4096};
  const TimeSeries series = expectation_series(obs, state, spectrum, grid);
  const NonstationarityMetrics metrics =
      nonstationarity(series, state, spectrum, obs, {0.0, 1.0});

  // Independent oracle: keep every term whose Bohr frequency vanishes
  // (including exact degeneracies); bound the rest by 4 / (gap * T) per
  // oscillating term.
  const DenseMatrix o_eig = spectrum.eigenvectors.adjoint() *
                            DenseMatrix(obs.mat) * spectrum.eigenvectors;
  const Eigen::Index dim = spectrum.energies.size();
  double dephased = 0.0;
  double bound = 1e-10;
  for (Eigen::Index a = 0; a < dim; ++a) {
    for (Eigen::Index b = 0; b < dim; ++b) {
      const double gap = std::abs(spectrum.energies(a) - spectrum.energies(b));
      const double weight = std::abs(state.amplitudes(a)) *
                            std::abs(state.amplitudes(b)) *
                            std::abs(o_eig(a, b));
      if (gap < 1e-8) {
        dephased += (std::conj(state.amplitudes(a)) * state.amplitudes(b) *
                     o_eig(a, b))
                        .real();
      } else {
        bound += 4.0 * weight / (gap * t_total);
      }
    }
  }
  CHECK(std::abs(metrics.time_mean - dephased) < bound);
}

TEST_CASE("degenerate analysis windows are rejected") {
  const LatticeOperator h = build_field_chain(2, 1.0);
  const auto spectrum = diagonalize(h);
  const PreparedState state =
      prepare_product_state(h.spec, all_plus_x(2), spectrum, "plus-x");
  const LatticeOperator obs = embed(pauli_basis()[0], 1, h.spec);
  const TimeGrid grid{0.0, 0.05, 64};
  const TimeSeries series = expectation_series(obs, state, spectrum, grid);
  CHECK_THROWS_AS(nonstationarity(series, state, spectrum, obs, {0.9, 1.0}),
                  std::invalid_argument);
}

TEST_CASE("default initial states are normalized for every local dimension") {
  for (int d : {2, 3, 4}) {
    const LatticeSpec spec{3, d, Boundary::Open};
    for (const char* name : {"default", "tilted", "aligned"}) {
      for (const auto& v : default_initial_state(spec, name)) {
        CHECK(v.norm() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(v.size() == d);
      }
    }
  }
}
