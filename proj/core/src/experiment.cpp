#include "dynsymlab/experiment.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace dynsymlab {

namespace {

using nlohmann::json;

void require_keys(const json& obj, const std::string& where,
                  const std::vector<std::string>& allowed) {
  if (!obj.is_object()) {
    throw ConfigError(where + " must be a JSON object");
  }
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError("unknown key '" + key + "' in " + where);
    }
  }
}

ModelVariant parse_variant(const std::string& name) {
  if (name == "field_chain") return ModelVariant::FieldChain;
  if (name == "heisenberg_nnn") return ModelVariant::HeisenbergNnn;
  if (name == "three_body_su2") return ModelVariant::ThreeBodySu2;
  if (name == "su3_chain") return ModelVariant::Su3Chain;
  if (name == "hubbard") return ModelVariant::Hubbard;
  throw ConfigError("unknown model variant '" + name + "'");
}

std::string variant_name(ModelVariant v) {
  switch (v) {
    case ModelVariant::FieldChain: return "field_chain";
    case ModelVariant::HeisenbergNnn: return "heisenberg_nnn";
    case ModelVariant::ThreeBodySu2: return "three_body_su2";
    case ModelVariant::Su3Chain: return "su3_chain";
    case ModelVariant::Hubbard: return "hubbard";
  }
  return "?";
}

ModelConfig parse_model(const json& obj) {
  require_keys(obj, "model", {"variant", "n_sites", "couplings", "boundary"});
  ModelConfig model;
  if (!obj.contains("variant") || !obj.contains("n_sites")) {
    throw ConfigError("model requires 'variant' and 'n_sites'");
  }
  model.variant = parse_variant(obj.at("variant").get<std::string>());
  model.n_sites = obj.at("n_sites").get<int>();
  if (obj.contains("couplings")) {
    for (const auto& [key, value] : obj.at("couplings").items()) {
      if (!value.is_number()) {
        throw ConfigError("coupling '" + key + "' must be a number");
      }
      model.couplings[key] = value.get<double>();
    }
  }
  if (obj.contains("boundary")) {
    const std::string b = obj.at("boundary").get<std::string>();
    if (b == "open") {
      model.boundary = Boundary::Open;
    } else if (b == "periodic") {
      model.boundary = Boundary::Periodic;
    } else {
      throw ConfigError("boundary must be 'open' or 'periodic'");
    }
  }
  return model;
}

std::filesystem::path resolve_out_dir(const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  return out_dir;
}

void write_json(const json& doc, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << doc.dump(2) << "\n";
}

json site_coefficients(const ExtensiveOperator& op) {
  const auto generators = gell_mann_basis(op.spec.local_dim);
  json coeffs = json::array();
  for (int j = 0; j < op.spec.n_sites; ++j) {
    const auto& site = op.per_site[static_cast<size_t>(j)].entries;
    if (site.size() == 0) continue;
    for (const auto& g : generators) {
      const Complex c = (g.entries.adjoint() * site).trace() / 2.0;
      if (std::abs(c) < 1e-12) continue;
      coeffs.push_back(json::array({j + 1, g.label, c.real(), c.imag()}));
    }
  }
  return coeffs;
}

std::pair<SymmetryReport, CandidateSpace> find_for(
    const ExperimentConfig& config) {
  const LatticeOperator h = build_model(config.model);
  CandidateSpace space =
      build_candidate_space(h.spec, config.finder.uniform_only);
  SymmetryReport report = find_eigenoperators(h, space, config.finder);
  report.model = variant_name(config.model.variant);
  return {std::move(report), std::move(space)};
}

}  // namespace

ExperimentConfig parse_config(const json& doc) {
  require_keys(doc, "config", {"model", "finder", "dynamics", "outputs"});
  if (!doc.contains("model")) throw ConfigError("config requires 'model'");
  ExperimentConfig config;
  config.model = parse_model(doc.at("model"));
  if (doc.contains("finder")) {
    const auto& f = doc.at("finder");
    require_keys(f, "finder", {"tol_residual", "tol_group", "uniform_only"});
    if (f.contains("tol_residual")) {
      config.finder.tol_residual = f.at("tol_residual").get<double>();
    }
    if (f.contains("tol_group")) {
      config.finder.tol_group = f.at("tol_group").get<double>();
    }
    if (f.contains("uniform_only")) {
      config.finder.uniform_only = f.at("uniform_only").get<bool>();
    }
    if (config.finder.tol_residual <= 0 || config.finder.tol_group <= 0) {
      throw ConfigError("finder tolerances must be positive");
    }
  }
  if (doc.contains("dynamics")) {
    const auto& d = doc.at("dynamics");
    require_keys(d, "dynamics",
                 {"initial_state", "grid", "window", "observables"});
    if (d.contains("initial_state")) {
      config.dynamics.initial_state = d.at("initial_state").get<std::string>();
    }
    if (d.contains("grid")) {
      const auto& g = d.at("grid");
      require_keys(g, "dynamics.grid", {"t0", "dt", "n_steps"});
      if (g.contains("t0")) config.dynamics.grid.t0 = g.at("t0").get<double>();
      if (g.contains("dt")) config.dynamics.grid.dt = g.at("dt").get<double>();
      if (g.contains("n_steps")) {
        config.dynamics.grid.n_steps = g.at("n_steps").get<int>();
      }
      if (config.dynamics.grid.dt <= 0 || config.dynamics.grid.n_steps <= 0) {
        throw ConfigError("grid requires dt > 0 and n_steps > 0");
      }
    }
    if (d.contains("window")) {
      const auto& w = d.at("window");
      if (!w.is_array() || w.size() != 2) {
        throw ConfigError("window must be [begin_fraction, end_fraction]");
      }
      config.dynamics.window = {w.at(0).get<double>(), w.at(1).get<double>()};
    }
    if (d.contains("observables")) {
      for (const auto& o : d.at("observables")) {
        config.dynamics.observables.push_back(o.get<std::string>());
      }
    }
  }
  if (doc.contains("outputs")) {
    const auto& o = doc.at("outputs");
    require_keys(o, "outputs", {"directory", "formats"});
    if (o.contains("directory")) {
      config.outputs.directory = o.at("directory").get<std::string>();
    }
    if (o.contains("formats")) {
      config.outputs.formats.clear();
      for (const auto& f : o.at("formats")) {
        config.outputs.formats.push_back(f.get<std::string>());
      }
    }
  }
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(doc);
}

json config_to_json(const ExperimentConfig& config) {
  json doc;
  doc["model"]["variant"] = variant_name(config.model.variant);
  doc["model"]["n_sites"] = config.model.n_sites;
  doc["model"]["couplings"] = config.model.couplings;
  doc["model"]["boundary"] =
      config.model.boundary == Boundary::Open ? "open" : "periodic";
  doc["finder"]["tol_residual"] = config.finder.tol_residual;
  doc["finder"]["tol_group"] = config.finder.tol_group;
  doc["finder"]["uniform_only"] = config.finder.uniform_only;
  doc["dynamics"]["initial_state"] = config.dynamics.initial_state;
  doc["dynamics"]["grid"]["t0"] = config.dynamics.grid.t0;
  doc["dynamics"]["grid"]["dt"] = config.dynamics.grid.dt;
  doc["dynamics"]["grid"]["n_steps"] = config.dynamics.grid.n_steps;
  doc["dynamics"]["window"] =
      json::array({config.dynamics.window.first, config.dynamics.window.second});
  doc["dynamics"]["observables"] = config.dynamics.observables;
  doc["outputs"]["directory"] = config.outputs.directory;
  doc["outputs"]["formats"] = config.outputs.formats;
  return doc;
}

LatticeOperator parse_observable(const std::string& name,
                                 const LatticeSpec& spec) {
  const auto at = name.find('@');
  if (at == std::string::npos) {
    throw ConfigError("observable '" + name + "' must have the form label@site");
  }
  const std::string label = name.substr(0, at);
  int site = 0;
  try {
    site = std::stoi(name.substr(at + 1));
  } catch (const std::exception&) {
    throw ConfigError("bad site index in observable '" + name + "'");
  }
  if (site < 1 || site > spec.n_sites) {
    throw ConfigError("observable site out of range in '" + name + "'");
  }
  for (const auto& g : gell_mann_basis(spec.local_dim)) {
    if (g.label == label) return embed(g, site, spec);
  }
  if (spec.local_dim == 4) {
    const auto ops = hubbard_site_ops();
    for (const SiteOperator* op :
         {&ops.n_up, &ops.n_dn, &ops.s_z, &ops.eta_z}) {
      if (op->label == label) return embed(*op, site, spec);
    }
  }
  throw ConfigError("unknown observable label '" + label + "'");
}

json symmetry_report_to_json(const SymmetryReport& report,
                             const CandidateSpace& space) {
  json doc;
  doc["schema_version"] = 1;
  doc["model"] = report.model;
  doc["h_scale"] = report.h_scale;
  doc["tolerances"]["tol_residual"] = report.options.tol_residual;
  doc["tolerances"]["tol_group"] = report.options.tol_group;
  doc["uniform_only"] = space.uniform_only;
  doc["symmetries"] = json::array();
  for (size_t i = 0; i < report.symmetries.size(); ++i) {
    const auto& s = report.symmetries[i];
    json entry;
    entry["lambda"] = s.lambda;
    entry["residual"] = s.residual;
    entry["pair_id"] = static_cast<int>(i / 2);
    entry["site_coefficients"] = site_coefficients(s.op);
    doc["symmetries"].push_back(std::move(entry));
  }
  doc["pair_count"] = report.pair_count();
  doc["charges"] = json::array();
  for (size_t i = 0; i < report.charges.charges.size(); ++i) {
    json entry;
    entry["uniform"] = static_cast<bool>(report.charges.uniform[i]);
    entry["site_coefficients"] = site_coefficients(report.charges.charges[i]);
    doc["charges"].push_back(std::move(entry));
  }
  doc["warnings"] = report.warnings;
  return doc;
}

json run_find(const ExperimentConfig& config,
              const std::filesystem::path& out_dir) {
  const auto dir = resolve_out_dir(out_dir);
  auto [report, space] = find_for(config);
  json doc = symmetry_report_to_json(report, space);
  doc["config"] = config_to_json(config);
  write_json(doc, dir / "symmetries.json");
  return doc;
}

std::string format_csv_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

json run_evolve(const ExperimentConfig& config,
                const std::filesystem::path& out_dir) {
  const auto dir = resolve_out_dir(out_dir);
  const LatticeOperator h = build_model(config.model);
  const SpectralDecomposition spectrum = diagonalize(h);
  const PreparedState state = prepare_product_state(
      h.spec, default_initial_state(h.spec, config.dynamics.initial_state),
      spectrum, config.dynamics.initial_state);

  json metrics;
  metrics["schema_version"] = 1;
  metrics["config"] = config_to_json(config);
  metrics["state_energy"] = state.energy;
  metrics["observables"] = json::array();
  for (const auto& name : config.dynamics.observables) {
    const LatticeOperator obs = parse_observable(name, h.spec);
    TimeSeries series =
        expectation_series(obs, state, spectrum, config.dynamics.grid);
    series.observable = name;

    std::string filename = name;
    for (auto& ch : filename) {
      if (ch == '@') ch = '_';
    }
    std::ofstream csv(dir / (filename + ".csv"));
    csv << "t,value\n";
    for (size_t k = 0; k < series.values.size(); ++k) {
      csv << format_csv_value(series.grid.time_at(static_cast<int>(k))) << ","
          << format_csv_value(series.values[k]) << "\n";
    }

    json m;
    m["observable"] = name;
    try {
      const NonstationarityMetrics metric = nonstationarity(
          series, state, spectrum, obs, config.dynamics.window);
      m["diag_ensemble"] = metric.diag_ensemble;
      m["late_window_variance"] = metric.late_window_variance;
      m["time_mean"] = metric.time_mean;
      if (metric.thermal_gap_valid) {
        m["thermal_gap"] = metric.thermal_gap;
      } else {
        m["thermal_gap"] = nullptr;
        m["warning"] = "thermal energy unmatchable for this state";
      }
      m["fourier_peaks"] = json::array();
      for (const auto& p : metric.fourier_peaks) {
        m["fourier_peaks"].push_back(
            {{"frequency", p.frequency}, {"amplitude", p.amplitude}});
      }
    } catch (const UnmatchableEnergy&) {
      m["thermal_gap"] = nullptr;
      m["warning"] = "thermal energy unmatchable for this state";
    }
    metrics["observables"].push_back(std::move(m));
  }
  write_json(metrics, dir / "metrics.json");
  return metrics;
}

json run_theorem1(const ExperimentConfig& config,
                  const std::filesystem::path& out_dir) {
  const auto dir = resolve_out_dir(out_dir);
  const LatticeOperator h = build_model(config.model);
  auto [report, space] = find_for(config);
  json doc;
  doc["schema_version"] = 1;
  doc["config"] = config_to_json(config);
  doc["pairs"] = json::array();
  for (size_t i = 0; i < report.symmetries.size(); ++i) {
    const auto& plus = report.symmetries[i];
    if (plus.lambda <= 0.0 || plus.partner < 0) continue;
    const auto& minus = report.symmetries[static_cast<size_t>(plus.partner)];
    const ExtensiveOperator q = theorem1_charge(plus, minus, h, space);
    json entry;
    entry["lambda"] = plus.lambda;
    entry["charge_site_coefficients"] = site_coefficients(q);
    const LatticeOperator qc = compile(q);
    entry["charge_norm"] = hs_norm(qc);
    entry["conservation_residual"] =
        hs_norm(commutator(h, qc)) / std::max(hs_norm(qc), 1e-300);
    doc["pairs"].push_back(std::move(entry));
  }
  write_json(doc, dir / "theorem1.json");
  return doc;
}

json run_theorem2(const ExperimentConfig& config,
                  const std::filesystem::path& out_dir) {
  const auto dir = resolve_out_dir(out_dir);
  ModelConfig symmetric = config.model;
  std::vector<ExtensiveOperator> charges;
  std::vector<double> coefficients;
  AlgebraBasis algebra;
  std::vector<SiteOperator> cartan_elems;
  const LatticeSpec spec = model_spec(config.model);

  switch (config.model.variant) {
    case ModelVariant::FieldChain:
    case ModelVariant::HeisenbergNnn:
    case ModelVariant::ThreeBodySu2: {
      const double field = config.model.couplings.count("B")
                               ? config.model.couplings.at("B")
                               : 0.0;
      symmetric.couplings["B"] = 0.0;
      const auto paulis = pauli_basis();
      algebra.generators = paulis;
      cartan_elems = {paulis[2]};
      charges = {uniform_extensive(paulis[2], spec)};
      coefficients = {field / 2.0};
      break;
    }
    case ModelVariant::Su3Chain: {
      const double b1 = config.model.couplings.count("B1")
                            ? config.model.couplings.at("B1")
                            : 0.0;
      const double b2 = config.model.couplings.count("B2")
                            ? config.model.couplings.at("B2")
                            : 0.0;
      symmetric.couplings["B1"] = 0.0;
      symmetric.couplings["B2"] = 0.0;
      const auto taus = gell_mann_basis(3);
      algebra.generators = taus;
      cartan_elems = {taus[2], taus[7]};
      charges = {uniform_extensive(taus[2], spec),
                 uniform_extensive(taus[7], spec)};
      coefficients = {b1 / 2.0, b2 / 2.0};
      break;
    }
    case ModelVariant::Hubbard:
      throw ConfigError(
          "theorem2 supports the spin and su3 chains; the Hubbard charges "
          "live in two separate algebras");
  }

  const LatticeOperator h_g = build_model(symmetric);
  const LatticeOperator h_rebuilt = theorem2_build(h_g, charges, coefficients);
  const LatticeOperator h_direct = build_model(config.model);
  LatticeOperator diff{h_direct.spec,
                       SparseMatrix(h_rebuilt.mat - h_direct.mat)};
  const double equality_residual = hs_norm(diff);

  const CartanWeylBasis cw =
      cartan_weyl(verify_cartan(cartan_elems, algebra), algebra);
  const auto checks = theorem2_verify(h_rebuilt, cw, coefficients);

  json doc;
  doc["schema_version"] = 1;
  doc["config"] = config_to_json(config);
  doc["equality_residual"] = equality_residual;
  doc["roots"] = json::array();
  for (const auto& c : checks) {
    json entry;
    entry["root_values"] = c.root_values;
    entry["predicted_lambda"] = c.predicted_lambda;
    entry["measured_lambda"] = c.measured_lambda;
    entry["residual"] = c.residual;
    doc["roots"].push_back(std::move(entry));
  }
  write_json(doc, dir / "theorem2.json");
  return doc;
}

json run_demo(const ExperimentConfig& first, const ExperimentConfig& second,
              const std::filesystem::path& out_dir) {
  const auto dir = resolve_out_dir(out_dir);
  // Only the symmetry-breaking couplings (and output plumbing) may differ.
  ExperimentConfig a = first;
  ExperimentConfig b = second;
  a.model.couplings.clear();
  b.model.couplings.clear();
  a.outputs = OutputConfig{};
  b.outputs = OutputConfig{};
  if (config_to_json(a) != config_to_json(b)) {
    throw ConfigError("demo configs differ beyond model couplings");
  }

  json doc;
  doc["schema_version"] = 1;
  doc["first"]["config"] = config_to_json(first);
  doc["second"]["config"] = config_to_json(second);

  const std::array<std::pair<const char*, const ExperimentConfig*>, 2> runs = {
      {{"first", &first}, {"second", &second}}};
  for (const auto& [key, cfg] : runs) {
    auto [report, space] = find_for(*cfg);
    doc[key]["pair_count"] = report.pair_count();
    doc[key]["charge_count"] =
        static_cast<int>(report.charges.charges.size());

    const LatticeOperator h = build_model(cfg->model);
    const SpectralDecomposition spectrum = diagonalize(h);
    const PreparedState state = prepare_product_state(
        h.spec, default_initial_state(h.spec, cfg->dynamics.initial_state),
        spectrum, cfg->dynamics.initial_state);
    doc[key]["observables"] = json::array();
    for (const auto& name : cfg->dynamics.observables) {
      const LatticeOperator obs = parse_observable(name, h.spec);
      const TimeSeries series =
          expectation_series(obs, state, spectrum, cfg->dynamics.grid);
      const NonstationarityMetrics metric =
          nonstationarity(series, state, spectrum, obs, cfg->dynamics.window);
      doc[key]["observables"].push_back(
          {{"observable", name},
           {"late_window_variance", metric.late_window_variance}});
    }
  }

  doc["variance_ratios"] = json::array();
  for (size_t i = 0; i < doc["first"]["observables"].size(); ++i) {
    const double va =
        doc["first"]["observables"][i]["late_window_variance"].get<double>();
    const double vb =
        doc["second"]["observables"][i]["late_window_variance"].get<double>();
    doc["variance_ratios"].push_back(
        {{"observable", doc["first"]["observables"][i]["observable"]},
         {"first_over_second", vb == 0.0 ? std::numeric_limits<double>::infinity()
                                         : va / vb}});
  }
  write_json(doc, dir / "demo.json");
  return doc;
}

}  // namespace dynsymlab
