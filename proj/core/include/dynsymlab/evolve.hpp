#pragma once

#include <map>
#include <string>
#include <vector>

#include "dynsymlab/opalg.hpp"

namespace dynsymlab {

struct SpectralDecomposition {
  LatticeSpec spec;
  Eigen::VectorXd energies;     // ascending
  Eigen::MatrixXcd eigenvectors;

  double spectral_span() const {
    return energies(energies.size() - 1) - energies(0);
  }
};

struct PreparedState {
  Eigen::VectorXcd amplitudes;  // in the energy eigenbasis
  double energy = 0.0;
  std::string description;
};

struct TimeGrid {
  double t0 = 0.0;
  double dt = 0.0;
  int n_steps = 0;

  double time_at(int k) const { return t0 + dt * k; }
};

struct TimeSeries {
  TimeGrid grid;
  std::vector<double> values;
  std::string observable;
};

struct ThermalMatch {
  double beta = 0.0;
  double energy_target = 0.0;
  double partition_function = 0.0;
  std::vector<double> thermal_values;
  int iterations = 0;
  bool converged = false;
};

struct FourierPeak {
  double frequency = 0.0;
  double amplitude = 0.0;
};

struct NonstationarityMetrics {
  double diag_ensemble = 0.0;
  double late_window_variance = 0.0;
  double time_mean = 0.0;
  std::vector<FourierPeak> fourier_peaks;
  double thermal_gap = 0.0;
  bool thermal_gap_valid = false;
};

struct UnmatchableEnergy : std::runtime_error {
  using std::runtime_error::runtime_error;
};

SpectralDecomposition diagonalize(const LatticeOperator& hamiltonian);

PreparedState prepare_product_state(
    const LatticeSpec& spec, const std::vector<Eigen::VectorXcd>& per_site,
    const SpectralDecomposition& spectrum, const std::string& description = "");

TimeSeries expectation_series(const LatticeOperator& observable,
                              const PreparedState& state,
                              const SpectralDecomposition& spectrum,
                              const TimeGrid& grid);

ThermalMatch thermal_match(const SpectralDecomposition& spectrum,
                           double energy_target,
                           const std::vector<LatticeOperator>& observables);

/// Window bounds are fractions of the series duration, e.g. {0.5, 1.0} for
/// the late half.
NonstationarityMetrics nonstationarity(const TimeSeries& series,
                                       const PreparedState& state,
                                       const SpectralDecomposition& spectrum,
                                       const LatticeOperator& observable,
                                       std::pair<double, double> window);

// Default product states per local dimension: all |+x> for qubits, the
// symmetric superposition for d = 3, a half-filled spin-mixed state for
// the d = 4 Hubbard encoding. "tilted" gives a site-dependent qubit state
// with no special symmetry.
std::vector<Eigen::VectorXcd> default_initial_state(const LatticeSpec& spec,
                                                    const std::string& name);

}  // namespace dynsymlab
