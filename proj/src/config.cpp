#include "relwave/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

namespace relwave {

using nlohmann::json;

namespace {

std::string join(const std::string& base, const std::string& key) { return base.empty() ? key : base + "." + key; }

void reject_unknown(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(path.empty() ? "<root>" : path, "must be an object");
  const std::set<std::string> names(allowed.begin(), allowed.end());
  for (const auto& [key, value] : obj.items()) {
    if (!names.count(key)) throw ConfigError(join(path, key), "unknown key");
  }
}

double get_number(const json& obj, const std::string& path, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(join(path, key), "must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ConfigError(join(path, key), "must be finite");
  return d;
}

double get_positive(const json& obj, const std::string& path, const char* key, double fallback) {
  const double d = get_number(obj, path, key, fallback);
  if (!(d > 0)) throw ConfigError(join(path, key), "must be positive");
  return d;
}

long get_integer(const json& obj, const std::string& path, const char* key, long fallback, long lo, long hi) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number_integer()) throw ConfigError(join(path, key), "must be an integer");
  const long i = v.get<long>();
  if (i < lo || i > hi) {
    throw ConfigError(join(path, key), "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  return i;
}

std::string get_string(const json& obj, const std::string& path, const char* key, const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_string()) throw ConfigError(join(path, key), "must be a string");
  return v.get<std::string>();
}

std::vector<double> get_vector(const json& obj, const std::string& path, const char* key,
                               const std::vector<double>& fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (v.is_number()) return {get_number(obj, path, key, 0)};
  if (!v.is_array() || v.empty() || v.size() > 3) throw ConfigError(join(path, key), "must be a number or 1-3 numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string p = join(path, key) + "[" + std::to_string(i) + "]";
    if (!v[i].is_number() || !std::isfinite(v[i].get<double>())) throw ConfigError(p, "must be a finite number");
    out.push_back(v[i].get<double>());
  }
  return out;
}

KVector<double> as_kvector(const std::vector<double>& v, int dim, const std::string& path) {
  if (static_cast<int>(v.size()) > dim) throw ConfigError(path, "has more components than grid.dim");
  KVector<double> out = KVector<double>::Zero();
  for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[i];
  return out;
}

const char* kind_name(StateKind k) {
  switch (k) {
    case StateKind::plane_wave: return "plane_wave";
    case StateKind::gaussian: return "gaussian";
    case StateKind::random: return "random";
  }
  return "";
}

}  // namespace

bool OutputConfig::wants(const std::string& f) const {
  return std::find(formats.begin(), formats.end(), f) != formats.end();
}

Branch parse_branch(const std::string& text, const std::string& path) {
  if (text == "plus") return Branch::plus;
  if (text == "minus") return Branch::minus;
  throw ConfigError(path, "branch must be 'plus' or 'minus', got '" + text + "'");
}

MethodSpec parse_method(const std::string& text, const std::string& path) {
  if (text == "exact") return {MethodSpec::Kind::exact, 0};
  if (text == "schrodinger") return {MethodSpec::Kind::schrodinger, 0};
  const std::string prefix = "truncated:";
  if (text.rfind(prefix, 0) == 0) {
    const std::string digits = text.substr(prefix.size());
    const bool numeric = !digits.empty() && digits.size() <= 3 &&
                         std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; });
    const int n = numeric ? std::stoi(digits) : 0;
    if (n < 1 || n > SeriesCoefficients::kMaxOrder) {
      throw ConfigError(path, "truncated order must be an integer in [1, 64], got '" + digits + "'");
    }
    return {MethodSpec::Kind::truncated, n};
  }
  throw ConfigError(path, "method must be exact, schrodinger or truncated:N, got '" + text + "'");
}

ScenarioConfig parse_config(const json& doc) {
  ScenarioConfig cfg;
  reject_unknown(doc, "", {"units", "grid", "state", "run", "output"});

  if (doc.contains("units")) {
    const auto& u = doc.at("units");
    reject_unknown(u, "units", {"mass", "speed_of_light", "hbar"});
    cfg.units.mass = get_positive(u, "units", "mass", cfg.units.mass);
    cfg.units.speed_of_light = get_positive(u, "units", "speed_of_light", cfg.units.speed_of_light);
    cfg.units.hbar = get_positive(u, "units", "hbar", cfg.units.hbar);
  }

  if (doc.contains("grid")) {
    const auto& g = doc.at("grid");
    reject_unknown(g, "grid", {"dim", "n", "box_length"});
    cfg.grid.dim = static_cast<int>(get_integer(g, "grid", "dim", cfg.grid.dim, 1, 3));
    cfg.grid.n = get_integer(g, "grid", "n", cfg.grid.n, 2, 1L << 20);
    if (cfg.grid.n % 2 != 0) throw ConfigError("grid.n", "must be even");
    cfg.grid.box_length = get_positive(g, "grid", "box_length", cfg.grid.box_length);
  }

  if (doc.contains("state")) {
    const auto& s = doc.at("state");
    reject_unknown(s, "state", {"kind", "x0", "k0", "sigma", "branch", "band_limit", "seed", "k"});
    const std::string kind = get_string(s, "state", "kind", kind_name(cfg.state.kind));
    if (kind == "plane_wave") {
      cfg.state.kind = StateKind::plane_wave;
    } else if (kind == "gaussian") {
      cfg.state.kind = StateKind::gaussian;
    } else if (kind == "random") {
      cfg.state.kind = StateKind::random;
    } else {
      throw ConfigError("state.kind", "must be plane_wave, gaussian or random, got '" + kind + "'");
    }
    cfg.state.x0 = get_vector(s, "state", "x0", cfg.state.x0);
    cfg.state.k0 = get_vector(s, "state", "k0", cfg.state.k0);
    cfg.state.k = get_vector(s, "state", "k", cfg.state.k);
    cfg.state.sigma = get_positive(s, "state", "sigma", cfg.state.sigma);
    cfg.state.branch = parse_branch(get_string(s, "state", "branch", to_string(cfg.state.branch)), "state.branch");
    if (s.contains("band_limit") && !s.at("band_limit").is_null()) {
      cfg.state.band_limit = get_positive(s, "state", "band_limit", 0);
    }
    if (s.contains("seed")) {
      const auto& v = s.at("seed");
      if (!v.is_number_unsigned()) throw ConfigError("state.seed", "must be a non-negative integer");
      cfg.state.seed = v.get<std::uint64_t>();
    }
  }

  if (doc.contains("run")) {
    const auto& r = doc.at("run");
    reject_unknown(r, "run", {"method", "t_final", "snapshots", "order", "steps"});
    cfg.run.method = get_string(r, "run", "method", cfg.run.method);
    parse_method(cfg.run.method, "run.method");
    cfg.run.t_final = get_number(r, "run", "t_final", cfg.run.t_final);
    cfg.run.snapshots = static_cast<int>(get_integer(r, "run", "snapshots", cfg.run.snapshots, 1, 100000));
    cfg.run.order = static_cast<int>(get_integer(r, "run", "order", cfg.run.order, 1, SeriesCoefficients::kMaxOrder));
    cfg.run.steps = static_cast<int>(get_integer(r, "run", "steps", cfg.run.steps, 1, 10000000));
  }

  if (doc.contains("output")) {
    const auto& o = doc.at("output");
    reject_unknown(o, "output", {"directory", "formats"});
    cfg.output.directory = get_string(o, "output", "directory", cfg.output.directory);
    if (o.contains("formats")) {
      const auto& f = o.at("formats");
      if (!f.is_array()) throw ConfigError("output.formats", "must be an array of strings");
      cfg.output.formats.clear();
      for (std::size_t i = 0; i < f.size(); ++i) {
        const std::string p = "output.formats[" + std::to_string(i) + "]";
        if (!f[i].is_string()) throw ConfigError(p, "must be a string");
        const auto name = f[i].get<std::string>();
        if (name != "csv" && name != "json") throw ConfigError(p, "must be 'csv' or 'json'");
        cfg.output.formats.push_back(name);
      }
    }
  }

  const auto check_dim = [&](const std::vector<double>& v, const char* path) {
    if (static_cast<int>(v.size()) > cfg.grid.dim) throw ConfigError(path, "has more components than grid.dim");
  };
  check_dim(cfg.state.x0, "state.x0");
  check_dim(cfg.state.k0, "state.k0");
  check_dim(cfg.state.k, "state.k");
  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot open '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("--config", std::string("invalid JSON: ") + e.what());
  }
  return parse_config(doc);
}

json to_json(const ScenarioConfig& cfg) {
  json state = {{"kind", kind_name(cfg.state.kind)},
                {"x0", cfg.state.x0},
                {"k0", cfg.state.k0},
                {"sigma", cfg.state.sigma},
                {"branch", to_string(cfg.state.branch)},
                {"seed", cfg.state.seed},
                {"k", cfg.state.k}};
  state["band_limit"] = std::isfinite(cfg.state.band_limit) ? json(cfg.state.band_limit) : json(nullptr);
  return {{"units", {{"mass", cfg.units.mass}, {"speed_of_light", cfg.units.speed_of_light}, {"hbar", cfg.units.hbar}}},
          {"grid", {{"dim", cfg.grid.dim}, {"n", cfg.grid.n}, {"box_length", cfg.grid.box_length}}},
          {"state", state},
          {"run",
           {{"method", cfg.run.method},
            {"t_final", cfg.run.t_final},
            {"snapshots", cfg.run.snapshots},
            {"order", cfg.run.order},
            {"steps", cfg.run.steps}}},
          {"output", {{"directory", cfg.output.directory}, {"formats", cfg.output.formats}}}};
}

PhysicalParams<double> ScenarioConfig::params() const {
  return make_params(units.mass, units.speed_of_light, units.hbar);
}

SpectralGrid<double> ScenarioConfig::make_grid() const { return {grid.dim, grid.n, grid.box_length}; }

InitialData<double> ScenarioConfig::initial_data() const {
  const auto g = make_grid();
  const auto p = params();
  switch (state.kind) {
    case StateKind::plane_wave:
      return plane_wave(as_kvector(state.k, grid.dim, "state.k"), state.branch, g, p);
    case StateKind::gaussian:
      return gaussian_packet(as_kvector(state.x0, grid.dim, "state.x0"), as_kvector(state.k0, grid.dim, "state.k0"),
                             state.sigma, state.branch, g, p, state.band_limit);
    case StateKind::random: {
      const double band = std::isfinite(state.band_limit) ? state.band_limit : std::numeric_limits<double>::infinity();
      return branch_state(random_field(state.seed, band, g), state.branch, p);
    }
  }
  throw ConfigError("state.kind", "unsupported");
}

}  // namespace relwave
