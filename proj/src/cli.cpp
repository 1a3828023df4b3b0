#include "relwave/cli.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "relwave/config.hpp"
#include "relwave/dispersion.hpp"
#include "relwave/field_io.hpp"
#include "relwave/fock.hpp"
#include "relwave/observables.hpp"
#include "relwave/propagators.hpp"
#include "relwave/wavefield.hpp"

namespace relwave {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, v);
  return buf;
}

// Artifacts are staged in memory and only written once the command has
// finished, so a failing run leaves nothing behind.
class Artifacts {
 public:
  void add(std::string name, std::string content) { files_.emplace_back(std::move(name), std::move(content)); }

  std::vector<std::string> commit(const fs::path& dir) const {
    if (!files_.empty()) fs::create_directories(dir);
    std::vector<std::string> paths;
    for (const auto& [name, content] : files_) {
      write_file_atomic(dir / name, content);
      paths.push_back((dir / name).string());
    }
    return paths;
  }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& f : files_) out.push_back(f.first);
    return out;
  }

 private:
  std::vector<std::pair<std::string, std::string>> files_;
};

struct Invocation {
  std::string command;
  ScenarioConfig cfg;
  json options = json::object();
  Artifacts artifacts;

  std::string config_hash() const {
    const json doc = {{"command", command}, {"config", to_json(cfg)}, {"options", options}};
    return hex64(fnv1a64(doc.dump()));
  }

  bool csv() const { return cfg.output.wants("csv"); }

  // The JSON sidecar: manifest plus command-specific results.
  void add_sidecar(const std::string& name, const json& results) {
    json doc = {{"manifest",
                 {{"tool", "relwave"},
                  {"version", kVersion},
                  {"command", command},
                  {"config_hash", config_hash()},
                  {"config", to_json(cfg)},
                  {"options", options},
                  {"artifacts", artifacts.names()}}},
                {"results", results}};
    artifacts.add(name, doc.dump(2) + "\n");
  }
};

void require(bool ok, const std::string& path, const std::string& message) {
  if (!ok) throw ConfigError(path, message);
}

ComplexField<double> read_input(const std::string& path, const std::string& flag) {
  if (!fs::exists(path)) throw ConfigError(flag, "cannot open '" + path + "'");
  try {
    return read_field_csv(path);
  } catch (const ConfigError&) {
    throw;
  } catch (const DomainError& e) {
    throw ConfigError(flag, e.what());
  }
}

struct InputFlags {
  std::string input;
  std::string input_dot;
  std::string branch;
};

void add_input_flags(CLI::App* app, InputFlags& f, bool with_branch) {
  app->add_option("--input", f.input, "Field CSV for psi at t = 0 (default: the configured state)");
  app->add_option("--input-dot", f.input_dot, "Field CSV for d(psi)/dt at t = 0");
  if (with_branch) app->add_option("--branch", f.branch, "Branch used to synthesise d(psi)/dt: plus or minus");
}

// psi_dot comes from --input-dot, else from --branch (or the configured
// branch), else zero when `zero_dot` is set.
InitialData<double> load_initial(Invocation& inv, const InputFlags& f, bool zero_dot) {
  const auto p = inv.cfg.params();
  std::optional<Branch> branch;
  if (!f.branch.empty()) branch = parse_branch(f.branch, "--branch");
  require(f.input_dot.empty() || !f.input.empty(), "--input-dot", "requires --input");
  require(f.input_dot.empty() || !branch, "--branch", "cannot be combined with --input-dot");
  if (!f.input.empty()) inv.options["input"] = f.input;
  if (!f.input_dot.empty()) inv.options["input_dot"] = f.input_dot;
  if (branch) inv.options["branch"] = to_string(*branch);

  if (f.input.empty()) {
    auto data = inv.cfg.initial_data();
    if (branch) return branch_state(data.psi0, *branch, p);
    return data;
  }
  const auto psi = read_input(f.input, "--input");
  if (!f.input_dot.empty()) {
    const auto dot = read_input(f.input_dot, "--input-dot");
    require(psi.grid() == dot.grid(), "--input-dot", "grid differs from --input");
    return InitialData<double>(psi, dot);
  }
  if (zero_dot && !branch) return InitialData<double>(psi, ComplexField<double>(psi.grid(), Representation::physical));
  return branch_state(psi, branch.value_or(inv.cfg.state.branch), p);
}

std::vector<std::string> axis_names(int dim, const char* prefix) {
  static const char* names[] = {"x", "y", "z"};
  std::vector<std::string> out;
  for (int a = 0; a < dim; ++a) out.push_back(std::string(prefix) + names[a]);
  return out;
}

// ---------------------------------------------------------------------------

struct DispersionFlags {
  double kmax = 0;
  int steps = 0;
};

json cmd_dispersion(Invocation& inv, const DispersionFlags& f) {
  require(std::isfinite(f.kmax) && f.kmax >= 0, "--kmax", "must be finite and non-negative");
  require(f.steps >= 1, "--steps", "must be >= 1");
  inv.options = {{"kmax", f.kmax}, {"steps", f.steps}};
  const auto rows = dispersion_table(f.kmax, f.steps, inv.cfg.params());
  std::string csv = "k,omega_plus,omega_minus,v_group\n";
  for (const auto& r : rows) {
    csv += format_double(r.k) + "," + format_double(r.omega_plus) + "," + format_double(r.omega_minus) + "," +
           format_double(r.v_group) + "\n";
  }
  if (inv.csv()) inv.artifacts.add("dispersion.csv", csv);
  const json results = {{"rows", rows.size()},
                        {"omega_minus_at_zero", rows.front().omega_minus},
                        {"omega_plus_at_kmax", rows.back().omega_plus}};
  inv.add_sidecar("dispersion.json", results);
  return results;
}

struct EvolveFlags {
  InputFlags input;
  std::optional<double> t;
  std::string method;
  std::optional<int> snapshots;
};

json cmd_evolve(Invocation& inv, const EvolveFlags& f) {
  const double t = f.t.value_or(inv.cfg.run.t_final);
  const int snapshots = f.snapshots.value_or(inv.cfg.run.snapshots);
  const std::string method_text = f.method.empty() ? inv.cfg.run.method : f.method;
  require(std::isfinite(t), "--t", "must be finite");
  require(snapshots >= 1, "--snapshots", "must be >= 1");
  const MethodSpec method = parse_method(method_text, f.method.empty() ? "run.method" : "--method");
  inv.options["t"] = t;
  inv.options["snapshots"] = snapshots;
  inv.options["method"] = method_text;

  const auto p = inv.cfg.params();
  const auto data = load_initial(inv, f.input, false);
  const auto amps = split(data, p);

  json times = json::array();
  json norms = json::array();
  for (int i = 1; i <= snapshots; ++i) {
    const double ti = t * static_cast<double>(i) / static_cast<double>(snapshots);
    ComplexField<double> psi = data.psi0;
    switch (method.kind) {
      case MethodSpec::Kind::exact: psi = field_at(evolve_exact(amps, ti), 0.0); break;
      case MethodSpec::Kind::truncated: psi = evolve_truncated(data.psi0, ti, method.order, p); break;
      case MethodSpec::Kind::schrodinger: psi = schrodinger_reference(data.psi0, ti, p); break;
    }
    psi = to_physical(psi);
    times.push_back(ti);
    norms.push_back(norm_squared(psi));
    char name[64];
    std::snprintf(name, sizeof name, "evolve_%04d.csv", i);
    if (inv.csv()) inv.artifacts.add(name, format_field_csv(psi));
  }
  const json results = {{"method", method_text},
                        {"times", times},
                        {"norms", norms},
                        {"initial_norm", norm_squared(data.psi0)}};
  inv.add_sidecar("evolve.json", results);
  return {{"method", method_text}, {"snapshots", snapshots}, {"final_norm", norms.back()}};
}

json cmd_split(Invocation& inv, const InputFlags& f) {
  const auto p = inv.cfg.params();
  const auto data = load_initial(inv, f, true);
  const auto amps = split(data, p);
  const auto a = to_a_amplitudes(amps);
  const auto& g = amps.grid();
  std::string csv;
  for (const auto& n : axis_names(g.dim(), "k")) csv += n + ",";
  csv += "re_aplus,im_aplus,re_aminus,im_aminus\n";
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    const auto k = g.wavenumber(i);
    for (int d = 0; d < g.dim(); ++d) csv += format_double(k[d]) + ",";
    csv += format_double(a.plus[i].real()) + "," + format_double(a.plus[i].imag()) + "," +
           format_double(a.minus[i].real()) + "," + format_double(a.minus[i].imag()) + "\n";
  }
  if (inv.csv()) inv.artifacts.add("split.csv", csv);
  const json results = {{"norm_plus", branch_norm(amps, Branch::plus)},
                        {"norm_minus", branch_norm(amps, Branch::minus)},
                        {"energy", energy_from_modes(amps)}};
  inv.add_sidecar("split.json", results);
  return results;
}

struct ConserveFlags {
  InputFlags input;
  std::optional<double> t;
  std::optional<int> steps;
  std::optional<int> order;
};

json cmd_conserve(Invocation& inv, const ConserveFlags& f) {
  const double t = f.t.value_or(inv.cfg.run.t_final);
  const int steps = f.steps.value_or(inv.cfg.run.steps);
  const int order = f.order.value_or(inv.cfg.run.order);
  require(std::isfinite(t), "--t", "must be finite");
  require(steps >= 1, "--steps", "must be >= 1");
  require(order >= 1 && order <= SeriesCoefficients::kMaxOrder, "--order", "must lie in [1, 64]");
  inv.options["t"] = t;
  inv.options["steps"] = steps;
  inv.options["order"] = order;

  const auto data = load_initial(inv, f.input, false);
  const auto amps = split(data, inv.cfg.params());
  const auto report = conservation_report(amps, t, steps, order);
  const int dim = amps.grid().dim();

  std::string csv = "t,total_norm,total_energy,";
  for (const auto& n : axis_names(dim, "total_momentum_")) csv += n + ",";
  csv += "max_continuity_residual,max_energy_residual,max_momentum_residual\n";
  for (const auto& r : report.rows) {
    csv += format_double(r.t) + "," + format_double(r.total_norm) + "," + format_double(r.total_energy) + ",";
    for (int a = 0; a < dim; ++a) csv += format_double(r.total_momentum[a]) + ",";
    csv += format_double(r.max_continuity_residual) + "," + format_double(r.max_energy_residual) + "," +
           format_double(r.max_momentum_residual) + "\n";
  }
  if (inv.csv()) inv.artifacts.add("conserve.csv", csv);
  const json results = {{"norm_drift", number(report.norm_drift())},
                        {"energy_drift", number(report.energy_drift())},
                        {"momentum_drift", number(report.momentum_drift())},
                        {"max_continuity_residual", number(report.max_continuity_residual())},
                        {"max_energy_residual", number(report.max_energy_residual())},
                        {"max_momentum_residual", number(report.max_momentum_residual())},
                        {"series_residuals", report.series_residuals},
                        {"order", order}};
  inv.add_sidecar("conserve.json", results);
  return results;
}

struct QuantizeFlags {
  std::string modes;
  int nmax = 0;
  std::optional<double> box;
};

std::vector<double> parse_modes(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(cell, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    require(used != 0 && used == cell.size() && std::isfinite(v), "--modes", "'" + cell + "' is not a number");
    out.push_back(v);
  }
  require(!out.empty(), "--modes", "needs at least one wavenumber");
  return out;
}

json cmd_quantize(Invocation& inv, const QuantizeFlags& f) {
  const auto modes = parse_modes(f.modes);
  require(f.nmax >= 1, "--nmax", "must be >= 1");
  const double box = f.box.value_or(2 * std::numbers::pi);
  require(std::isfinite(box) && box > 0, "--box", "must be positive");
  inv.options = {{"modes", modes}, {"nmax", f.nmax}, {"box", box}};
  const auto p = inv.cfg.params();

  std::optional<FockSpace> space;
  try {
    space.emplace(make_fock(modes, f.nmax, box));
  } catch (const ResourceError&) {
    throw;
  } catch (const DomainError& e) {
    throw ConfigError("--modes", e.what());
  }

  const auto comm = commutator_check(*space);
  const auto gens = build_generators(*space, p);
  const auto eig = one_particle_check(*space, p);
  const auto expansion = hamiltonian_from_density(*space, p);

  json eig_rows = json::array();
  for (const auto& r : eig.rows) {
    eig_rows.push_back({{"k", r.k},
                        {"species", to_string(r.species)},
                        {"energy", r.energy},
                        {"momentum", r.momentum},
                        {"energy_residual", r.energy_residual},
                        {"momentum_residual", r.momentum_residual},
                        {"number_plus", r.number_plus},
                        {"number_minus", r.number_minus}});
  }

  json delta = {{"complete_lattice", is_complete_lattice(*space)}};
  if (is_complete_lattice(*space)) {
    const double dx = box / static_cast<double>(space->mode_count());
    const std::vector<double> dts{0, 0, 0.1, 0.25, 0.5, 1.0, 2.0};
    const std::vector<double> dxs{0, dx, 0, dx, 0, dx, 0.5 * dx};
    json rows = json::array();
    double worst = 0;
    for (const auto& r : field_commutator_delta(*space, p, dts, dxs)) {
      rows.push_back({{"dt", r.dt},
                      {"dx", r.dx},
                      {"re_delta", r.delta.real()},
                      {"im_delta", r.delta.imag()},
                      {"re_commutator", r.commutator.real()},
                      {"im_commutator", r.commutator.imag()},
                      {"deviation", r.deviation}});
      worst = std::max(worst, r.deviation);
    }
    delta["rows"] = rows;
    delta["max_deviation"] = worst;
  }

  const double hs_vacuum = gens.hamiltonian_symmetrized.coeff(0, 0).real();
  const json results = {
      {"dim", space->dim()},
      {"commutators",
       {{"same_mode_deviation", comm.same_mode_deviation},
        {"cross_mode_deviation", comm.cross_mode_deviation},
        {"annihilator_pair_deviation", comm.annihilator_pair_deviation},
        {"redefinition_deviation", comm.redefinition_deviation},
        {"truncation_edge_value", comm.truncation_edge_value}}},
      {"vacuum_energy", hs_vacuum},
      {"zero_point_energy", gens.zero_point_energy},
      {"eigenchecks", eig_rows},
      {"max_eigen_residual", eig.max_residual()},
      {"density_expansion",
       {{"max_cross_coefficient", expansion.max_cross_coefficient},
        {"cross_pairs", expansion.cross_pairs},
        {"constant", expansion.constant}}},
      {"delta_function", delta}};
  inv.add_sidecar("quantize.json", results);
  return {{"dim", space->dim()},
          {"max_commutator_deviation", comm.max_deviation()},
          {"vacuum_energy", hs_vacuum},
          {"max_eigen_residual", eig.max_residual()},
          {"max_delta_deviation", delta.contains("max_deviation") ? delta["max_deviation"] : json(nullptr)}};
}

void emit_error(std::ostream& out, std::ostream& err, int code, const std::string& message,
                const std::string& path = "") {
  json line = {{"status", "error"}, {"exit_code", code}, {"message", message}};
  if (!path.empty()) line["path"] = path;
  out << line.dump() << "\n";
  err << "relwave: " << message << "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"relwave: numerical lab for a first-order relativistic wave equation"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", kVersion);
  std::string config_path;
  std::string output_dir;
  app.add_option("--config", config_path, "Scenario configuration (JSON)");
  app.add_option("--output-dir", output_dir, "Directory for artifacts (overrides output.directory)");

  DispersionFlags dispersion;
  auto* c_disp = app.add_subcommand("dispersion", "Tabulate omega_plus, omega_minus and group velocity");
  c_disp->add_option("--kmax", dispersion.kmax, "Largest wavenumber")->required();
  c_disp->add_option("--steps", dispersion.steps, "Number of rows")->required();

  EvolveFlags evolve;
  auto* c_evolve = app.add_subcommand("evolve", "Propagate a field and write snapshots");
  add_input_flags(c_evolve, evolve.input, true);
  c_evolve->add_option("--t", evolve.t, "Final time");
  c_evolve->add_option("--method", evolve.method, "exact | truncated:N | schrodinger");
  c_evolve->add_option("--snapshots", evolve.snapshots, "Number of snapshots (evenly spaced, ending at t)");

  InputFlags split_flags;
  auto* c_split = app.add_subcommand("split", "Decompose initial data into branch amplitudes");
  add_input_flags(c_split, split_flags, true);

  ConserveFlags conserve;
  auto* c_conserve = app.add_subcommand("conserve", "Track conserved totals and continuity residuals");
  add_input_flags(c_conserve, conserve.input, true);
  c_conserve->add_option("--t", conserve.t, "Final time");
  c_conserve->add_option("--steps", conserve.steps, "Number of exact steps");
  c_conserve->add_option("--order", conserve.order, "Series order N for the residuals");

  QuantizeFlags quantize;
  auto* c_quant = app.add_subcommand("quantize", "Check the finite-mode Fock algebra");
  c_quant->add_option("--modes", quantize.modes, "Comma-separated lattice wavenumbers")->required();
  c_quant->add_option("--nmax", quantize.nmax, "Occupation cutoff per mode and species")->required();
  c_quant->add_option("--box", quantize.box, "Box length (default 2 pi)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    emit_error(out, err, kExitValidation, e.what());
    return kExitValidation;
  }

  Invocation inv;
  try {
    if (!config_path.empty()) inv.cfg = load_config(config_path);
    if (!output_dir.empty()) inv.cfg.output.directory = output_dir;
    inv.cfg.params();

    json summary;
    if (c_disp->parsed()) {
      inv.command = "dispersion";
      summary = cmd_dispersion(inv, dispersion);
    } else if (c_evolve->parsed()) {
      inv.command = "evolve";
      summary = cmd_evolve(inv, evolve);
    } else if (c_split->parsed()) {
      inv.command = "split";
      summary = cmd_split(inv, split_flags);
    } else if (c_conserve->parsed()) {
      inv.command = "conserve";
      summary = cmd_conserve(inv, conserve);
    } else {
      inv.command = "quantize";
      summary = cmd_quantize(inv, quantize);
    }
    const auto paths = inv.artifacts.commit(inv.cfg.output.directory);
    json line = {{"status", "ok"}, {"command", inv.command}, {"config_hash", inv.config_hash()}};
    line["artifacts"] = paths;
    line["summary"] = summary;
    out << line.dump() << "\n";
    return kExitOk;
  } catch (const ConfigError& e) {
    emit_error(out, err, kExitValidation, e.what(), e.path());
    return kExitValidation;
  } catch (const DomainError& e) {
    emit_error(out, err, kExitValidation, e.what());
    return kExitValidation;
  } catch (const std::exception& e) {
    emit_error(out, err, kExitRuntime, e.what());
    return kExitRuntime;
  }
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace relwave
