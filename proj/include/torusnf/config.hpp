#pragma once

#include <filesystem>

#include "torusnf/normal_form.hpp"

#include <nlohmann/json_fwd.hpp>

namespace torusnf {

/// Bad or malformed configuration input (exit code 1 at the CLI).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Structurally valid configuration that violates a constraint (exit code 2).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Psi0Spec {
  enum class Kind { plane_wave, random };
  Kind kind = Kind::plane_wave;
  VecI xi;
  std::uint64_t seed = 0;
  bool seed_given = false;
  double decay = 2.0;
};

struct ExperimentConfig {
  LatticeBasis basis;
  NFParams params;
  double lambda = 0.0;
  double buffer = 0.25;
  SymbolSpec symbol;

  bool has_normal_form = false;
  int nf_steps = 0;
  TimeGrid grid;
  int quad_nodes = 8;
  DerivScheme deriv = DerivScheme::automatic;

  bool has_evolution = false;
  double ev_s = 0.0, ev_t_end = 1.0, ev_h = 0.01;
  std::vector<double> ev_sigmas = {0.0, 2.0};
  Psi0Spec psi0;
  std::string ev_system = "full";  // full | normal_form | normal_form_plus_remainder
  int record_stride = 1;

  bool has_fit = false;
  double fit_sigma = 2.0;
  double fit_lo = 1.0, fit_hi = 0.0;  // hi defaults to the horizon

  std::vector<double> partition_sigmas = {0.0, 1.0, 2.0};
  std::string out_dir = "out";
  std::uint64_t seed = 1;

  double lambda_inner() const { return lambda * (1.0 - buffer); }
};

/// Strict parse: unknown keys are rejected, required keys produce
/// "missing key: <name>", numbers must be finite. Constraint violations
/// (validate_params, lambda_inner >= 4, psi0 shape) throw ValidationError.
ExperimentConfig parse_config(const std::filesystem::path& path);
ExperimentConfig parse_config_json(const nlohmann::json& doc);

}  // namespace torusnf
