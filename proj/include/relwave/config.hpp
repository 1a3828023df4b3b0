#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "relwave/dispersion.hpp"
#include "relwave/errors.hpp"
#include "relwave/spectral_grid.hpp"
#include "relwave/units.hpp"
#include "relwave/wavefield.hpp"

namespace relwave {

/// Invalid scenario input. `path` locates the offending field, e.g. "grid.n".
class ConfigError : public DomainError {
 public:
  ConfigError(std::string path, const std::string& message)
      : DomainError(path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

struct UnitsConfig {
  double mass = 1;
  double speed_of_light = 1;
  double hbar = 1;
};

struct GridConfig {
  int dim = 1;
  long n = 256;
  double box_length = 200;
};

enum class StateKind { plane_wave, gaussian, random };

struct StateConfig {
  StateKind kind = StateKind::gaussian;
  std::vector<double> x0{0};
  std::vector<double> k0{0.3};
  double sigma = 8;
  Branch branch = Branch::plus;
  double band_limit = std::numeric_limits<double>::infinity();
  std::uint64_t seed = 20240101;
  std::vector<double> k{0};
};

struct RunConfig {
  std::string method = "exact";
  double t_final = 1;
  int snapshots = 1;
  int order = 3;
  int steps = 10;
};

struct OutputConfig {
  std::string directory = ".";
  std::vector<std::string> formats{"csv", "json"};
  bool wants(const std::string& f) const;
};

struct ScenarioConfig {
  UnitsConfig units;
  GridConfig grid;
  StateConfig state;
  RunConfig run;
  OutputConfig output;

  PhysicalParams<double> params() const;
  SpectralGrid<double> make_grid() const;
  InitialData<double> initial_data() const;
};

/// Validates and reads a scenario document. Absent keys keep their defaults;
/// unknown keys and wrongly typed or out-of-range values throw ConfigError.
ScenarioConfig parse_config(const nlohmann::json& doc);
ScenarioConfig load_config(const std::string& path);

nlohmann::json to_json(const ScenarioConfig& cfg);

/// Evolution method spec: "exact", "schrodinger" or "truncated:N".
struct MethodSpec {
  enum class Kind { exact, truncated, schrodinger } kind = Kind::exact;
  int order = 0;
};

MethodSpec parse_method(const std::string& text, const std::string& path);
Branch parse_branch(const std::string& text, const std::string& path);

}  // namespace relwave
