#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "shearlab/error.hpp"
#include "shearlab/initial_datum.hpp"
#include "shearlab/profiles.hpp"

namespace shearlab {

enum class Engine {
  Solve,
  SpectralScan,
  GevreyScan,
  McInverseMoment,
  McSkorokhod,
  FeynmanKacCheck,
  BoundCrosscheck,
  FullReport,
};

[[nodiscard]] std::string_view engine_name(Engine e);
[[nodiscard]] std::optional<Engine> parse_engine(std::string_view name);

/// One experiment, read from a flat `key = value` file.
///
///   # comment
///   engine = "spectral-scan"
///   profile = "sin"
///   nu_grid = [0.00390625, 0.0009765625]
///   profile_modes = [(1, 0.0, 1.0), (3, 0.0, -0.25)]
///   seed = 7
///
/// Strings are double-quoted, lists use brackets and tuples parentheses.
/// Grids that are not given stay empty; a grid given as [] is an error.
struct ExperimentConfig {
  std::string name;
  Engine engine = Engine::SpectralScan;

  std::string profile = "sin";       ///< preset name, or "custom" with profile_modes
  std::vector<TrigMode> profile_modes;

  std::vector<double> nu_grid;
  std::vector<int> k_grid;
  std::vector<double> t_grid;
  std::vector<double> y_grid;
  std::vector<std::pair<double, double>> xy_points;
  std::vector<FourierTerm> initial_datum;

  int n_y = 128;
  int n_steps = 4096;
  int n_samples = 0;
  int p = 1;
  double theta = 0.5;
  std::optional<std::uint64_t> seed;
  int workers = 1;
  std::string output_dir = "out";

  double nu_tilde = 1.0;
  std::optional<double> gevrey_time;  ///< default nu^{-1/2}
  std::optional<double> slope_nu;     ///< nu at which MC t-slopes are fitted
  std::optional<double> slope_t;      ///< t at which MC nu-slopes are fitted
  bool with_kernel = true;
  int bootstrap_resamples = 200;

  double nu_slope_tol = 0.1;
  double k_slope_tol = 0.1;
  double mc_slope_tol = 0.5;
  double mc_nu_slope_tol = 0.3;
  double r2_min = 0.95;
  double fk_sigma = 3.0;

  /// Resolves `profile` / `profile_modes` to a ShearProfile.
  [[nodiscard]] ShearProfile shear_profile() const;
  [[nodiscard]] InitialDatum datum() const;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

class ConfigError : public Error {
 public:
  enum class Kind { Syntax, UnknownKey, TypeMismatch, Invariant, Missing };

  ConfigError(Kind kind, int line, std::string key, const std::string& message);

  [[nodiscard]] Kind kind() const { return kind_; }
  [[nodiscard]] int line() const { return line_; }  ///< 0 when not tied to a line
  [[nodiscard]] const std::string& key() const { return key_; }

 private:
  Kind kind_;
  int line_;
  std::string key_;
};

[[nodiscard]] std::string_view kind_name(ConfigError::Kind kind);

/// Parses and validates; throws ConfigError at the first problem.
[[nodiscard]] ExperimentConfig parse_config(std::string_view text);
[[nodiscard]] ExperimentConfig load_config(const std::string& path);

/// Checks value ranges and the inputs the engine needs.
void validate(const ExperimentConfig& config);

/// Canonical text: fixed key order, every scalar written, empty grids
/// omitted, reals with 17 significant digits. parse_config(emit(c)) == c.
[[nodiscard]] std::string emit_config(const ExperimentConfig& config);

}  // namespace shearlab
