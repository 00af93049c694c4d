#include "dynsymlab/evolve.hpp"

#include <algorithm>
#include <cmath>

namespace dynsymlab {

namespace {

const Complex kI{0.0, 1.0};

constexpr long long kDenseCap = 1LL << 12;

}  // namespace

SpectralDecomposition diagonalize(const LatticeOperator& hamiltonian) {
  const long long dim = hamiltonian.spec.dim();
  if (dim > kDenseCap) {
    throw DimensionCapExceeded(
        "dense diagonalization capped at 2^12; reduce the lattice size");
  }
  if (!is_hermitian(hamiltonian)) {
    throw std::invalid_argument("cannot diagonalize a non-Hermitian operator");
  }
  DenseMatrix dense = DenseMatrix(hamiltonian.mat);
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(dense);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("dense eigensolver failed");
  }
  SpectralDecomposition out{hamiltonian.spec, es.eigenvalues(),
                            es.eigenvectors()};
  // Residual guard on every eigenpair.
  const double hnorm = dense.norm();
  const DenseMatrix resid =
      dense * out.eigenvectors - out.eigenvectors * out.energies.asDiagonal();
  if (resid.colwise().norm().maxCoeff() > 1e-9 * std::max(1.0, hnorm)) {
    throw std::runtime_error("eigenpair residual above tolerance");
  }
  return out;
}

PreparedState prepare_product_state(const LatticeSpec& spec,
                                    const std::vector<Eigen::VectorXcd>& per_site,
                                    const SpectralDecomposition& spectrum,
                                    const std::string& description) {
  spec.validate();
  if (!(spec == spectrum.spec)) {
    throw DimensionMismatch("state and spectrum live on different lattices");
  }
  if (static_cast<int>(per_site.size()) != spec.n_sites) {
    throw std::invalid_argument("one local state per site required");
  }
  Eigen::VectorXcd psi = Eigen::VectorXcd::Ones(1);
  for (const auto& local : per_site) {
    if (local.size() != spec.local_dim) {
      throw DimensionMismatch("local state dimension mismatch");
    }
    if (std::abs(local.norm() - 1.0) > 1e-10) {
      throw std::invalid_argument("local states must be normalized");
    }
    Eigen::VectorXcd next(psi.size() * spec.local_dim);
    for (Eigen::Index i = 0; i < psi.size(); ++i) {
      next.segment(i * spec.local_dim, spec.local_dim) = psi(i) * local;
    }
    psi = std::move(next);
  }
  PreparedState state;
  state.amplitudes = spectrum.eigenvectors.adjoint() * psi;
  state.energy = (state.amplitudes.cwiseAbs2().array() *
                  spectrum.energies.array())
                     .sum();
  state.description = description;
  return state;
}

TimeSeries expectation_series(const LatticeOperator& observable,
                              const PreparedState& state,
                              const SpectralDecomposition& spectrum,
                              const TimeGrid& grid) {
  if (grid.n_steps <= 0 || grid.dt <= 0.0) {
    throw std::invalid_argument("invalid time grid");
  }
  if (!is_hermitian(observable)) {
    throw std::invalid_argument(
        "expectation series requires a Hermitian observable");
  }
  const DenseMatrix o_eig = spectrum.eigenvectors.adjoint() *
                            DenseMatrix(observable.mat) *
                            spectrum.eigenvectors;
  TimeSeries out;
  out.grid = grid;
  out.values.reserve(static_cast<size_t>(grid.n_steps));
  const Eigen::Index dim = state.amplitudes.size();
  Eigen::VectorXcd phased(dim);
  for (int k = 0; k < grid.n_steps; ++k) {
    const double t = grid.time_at(k);
    for (Eigen::Index j = 0; j < dim; ++j) {
      phased(j) = std::exp(-kI * spectrum.energies(j) * t) *
                  state.amplitudes(j);
    }
    const Complex v = phased.adjoint() * (o_eig * phased);
    if (std::abs(v.imag()) > 1e-10 * std::max(1.0, std::abs(v))) {
      throw std::runtime_error("expectation value developed an imaginary part");
    }
    out.values.push_back(v.real());
  }
  return out;
}

ThermalMatch thermal_match(const SpectralDecomposition& spectrum,
                           double energy_target,
                           const std::vector<LatticeOperator>& observables) {
  const auto& e = spectrum.energies;
  const Eigen::Index dim = e.size();
  const double e_min = e(0);
  const double e_max = e(dim - 1);
  if (!(energy_target > e_min && energy_target < e_max)) {
    throw UnmatchableEnergy(
        "target energy lies outside the open spectral interval");
  }
  const double span = spectrum.spectral_span();

  // Gibbs mean energy at inverse temperature beta; shift by e_min for
  // numerical stability.
  auto mean_energy = [&](double beta) {
    double z = 0.0;
    double num = 0.0;
    const double shift = (beta >= 0.0) ? e_min : e_max;
    for (Eigen::Index k = 0; k < dim; ++k) {
      const double w = std::exp(-beta * (e(k) - shift));
      z += w;
      num += w * e(k);
    }
    return num / z;
  };

  ThermalMatch match;
  match.energy_target = energy_target;
  const double mid = e.mean();
  if (std::abs(energy_target - mid) <= 1e-10 * std::max(1.0, span)) {
    match.beta = 0.0;
    match.converged = true;
  } else {
    double lo = -1e3 / std::max(span, 1e-12);
    double hi = -lo;
    // mean_energy is strictly decreasing in beta.
    if (mean_energy(lo) < energy_target || mean_energy(hi) > energy_target) {
      throw UnmatchableEnergy("target energy outside the reachable bracket [" +
                              std::to_string(mean_energy(hi)) + ", " +
                              std::to_string(mean_energy(lo)) + "]");
    }
    double beta = 0.0;
    for (int it = 0; it < 200; ++it) {
      beta = 0.5 * (lo + hi);
      const double em = mean_energy(beta);
      ++match.iterations;
      if (std::abs(em - energy_target) <= 1e-8 * std::max(1.0, span)) {
        match.converged = true;
        break;
      }
      if (em > energy_target) {
        lo = beta;
      } else {
        hi = beta;
      }
    }
    if (!match.converged) {
      throw std::runtime_error(
          "thermal bisection failed to converge; bracket [" +
          std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
    match.beta = beta;
  }

  // Thermal expectations tr[rho O] via the eigenbasis.
  const double shift = (match.beta >= 0.0) ? e_min : e_max;
  Eigen::VectorXd weights(dim);
  for (Eigen::Index k = 0; k < dim; ++k) {
    weights(k) = std::exp(-match.beta * (e(k) - shift));
  }
  const double z = weights.sum();
  match.partition_function = z;
  for (const auto& obs : observables) {
    const DenseMatrix o_eig = spectrum.eigenvectors.adjoint() *
                              DenseMatrix(obs.mat) * spectrum.eigenvectors;
    double v = 0.0;
    for (Eigen::Index k = 0; k < dim; ++k) {
      v += weights(k) * o_eig(k, k).real();
    }
    match.thermal_values.push_back(v / z);
  }
  return match;
}

NonstationarityMetrics nonstationarity(const TimeSeries& series,
                                       const PreparedState& state,
                                       const SpectralDecomposition& spectrum,
                                       const LatticeOperator& observable,
                                       std::pair<double, double> window) {
  const int n = static_cast<int>(series.values.size());
  const int w_begin = static_cast<int>(std::floor(window.first * n));
  const int w_end = static_cast<int>(std::ceil(window.second * n));
  if (w_begin < 0 || w_end > n || w_end - w_begin < 16) {
    throw std::invalid_argument(
        "late-time window must contain at least 16 samples");
  }

  NonstationarityMetrics metrics;
  const DenseMatrix o_eig = spectrum.eigenvectors.adjoint() *
                            DenseMatrix(observable.mat) *
                            spectrum.eigenvectors;
  for (Eigen::Index k = 0; k < state.amplitudes.size(); ++k) {
    metrics.diag_ensemble +=
        std::norm(state.amplitudes(k)) * o_eig(k, k).real();
  }

  double mean = 0.0;
  for (int k = w_begin; k < w_end; ++k) mean += series.values[static_cast<size_t>(k)];
  mean /= (w_end - w_begin);
  metrics.time_mean = mean;
  double var = 0.0;
  for (int k = w_begin; k < w_end; ++k) {
    const double d = series.values[static_cast<size_t>(k)] - mean;
    var += d * d;
  }
  metrics.late_window_variance = var / (w_end - w_begin);

  // Discrete Fourier magnitudes of the mean-subtracted full series; peaks
  // are local maxima at least 5x the median magnitude.
  double full_mean = 0.0;
  for (double v : series.values) full_mean += v;
  full_mean /= n;
  const int n_freq = n / 2 + 1;
  std::vector<double> mags(static_cast<size_t>(n_freq), 0.0);
  for (int f = 0; f < n_freq; ++f) {
    Complex acc{0.0, 0.0};
    for (int k = 0; k < n; ++k) {
      acc += (series.values[static_cast<size_t>(k)] - full_mean) *
             std::exp(-kI * (2.0 * M_PI * f * k / static_cast<double>(n)));
    }
    mags[static_cast<size_t>(f)] = std::abs(acc) / n;
  }
  std::vector<double> sorted = mags;
  std::nth_element(sorted.begin(), sorted.begin() + n_freq / 2, sorted.end());
  const double median = sorted[static_cast<size_t>(n_freq / 2)];
  const double floor_mag = std::max(5.0 * median, 1e-12);
  const double omega_unit = 2.0 * M_PI / (series.grid.dt * n);
  for (int f = 1; f + 1 < n_freq; ++f) {
    const double m = mags[static_cast<size_t>(f)];
    if (m > floor_mag && m >= mags[static_cast<size_t>(f - 1)] &&
        m >= mags[static_cast<size_t>(f + 1)]) {
      metrics.fourier_peaks.push_back({omega_unit * f, m});
    }
  }
  std::sort(metrics.fourier_peaks.begin(), metrics.fourier_peaks.end(),
            [](const FourierPeak& a, const FourierPeak& b) {
              return a.amplitude > b.amplitude;
            });

  try {
    const ThermalMatch match =
        thermal_match(spectrum, state.energy, {observable});
    metrics.thermal_gap = std::abs(metrics.time_mean - match.thermal_values[0]);
    metrics.thermal_gap_valid = true;
  } catch (const UnmatchableEnergy&) {
    metrics.thermal_gap_valid = false;
  }
  return metrics;
}

std::vector<Eigen::VectorXcd> default_initial_state(const LatticeSpec& spec,
                                                    const std::string& name) {
  std::vector<Eigen::VectorXcd> states;
  const int d = spec.local_dim;
  for (int j = 0; j < spec.n_sites; ++j) {
    Eigen::VectorXcd v(d);
    if (name == "aligned") {
      v = Eigen::VectorXcd::Zero(d);
      v(0) = 1.0;
    } else if (name == "tilted" && d == 2) {
      // Near the +x axis with a site-dependent twist: keeps the transverse
      // polarization (hence any oscillation amplitude) large while breaking
      // every product-state symmetry.
      const double theta = M_PI / 2.0 + 0.05 * j;
      const double phi = 0.035 * j;
      v(0) = std::cos(theta / 2.0);
      v(1) = std::exp(kI * phi) * std::sin(theta / 2.0);
    } else if (d == 2) {
      v << 1.0, 1.0;  // |+x>
      v /= std::sqrt(2.0);
    } else if (d == 3) {
      v << 1.0, 1.0, 1.0;
      v /= std::sqrt(3.0);
    } else if (d == 4) {
      // Half filling, spin mixed: (|up> + |down>)/sqrt(2) in the
      // (empty, down, up, doublon) site basis of the qubit encoding.
      v << 0.0, 1.0, 1.0, 0.0;
      v /= std::sqrt(2.0);
    } else {
      v = Eigen::VectorXcd::Ones(d) / std::sqrt(static_cast<double>(d));
    }
    states.push_back(std::move(v));
  }
  return states;
}

}  // namespace dynsymlab
