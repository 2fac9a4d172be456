#pragma once

// JSON run configuration. Everything is validated by load_config before any
// command starts computing; the raw document is kept for the manifest echo.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "invaria/analysis.hpp"
#include "invaria/error.hpp"
#include "invaria/integrate.hpp"
#include "invaria/invariance.hpp"
#include "invaria/model.hpp"
#include "invaria/signals.hpp"

namespace invaria::cli {

/// Malformed or inconsistent configuration (exit code 1).
class ConfigError : public Error {
 public:
  using Error::Error;
};

enum class ModelKind { Original3, Simplified2, Substituted2, Extended2, Custom };

std::string_view to_string(ModelKind k);

struct PhaseVariant {
  std::string name;
  ExtendedParams params;
};

struct PhaseExperiment {
  analysis::PhaseGrid grid{{-2.0, 20.0, 21}, {0.0, 10.0, 21}};
  analysis::BasinOptions basin;
  bool svg = true;
  std::vector<Vec2> traces{{1.0, 1.0}, {5.0, 8.0}, {15.0, 1.0}, {20.0, 10.0}, {0.5, 0.5}};
  double trace_t_end = 40.0;
  std::vector<PhaseVariant> variants;  // empty: a single "baseline" from params
};

struct InvarianceTest {
  std::string param;
  double from = 0.0;
  double to = 0.0;
};

struct InvarianceExperiment {
  double transient = 50.0;
  invariance::Thresholds thresholds;
  std::vector<InvarianceTest> tests;
  std::vector<invariance::Equivariance> candidates;
  invariance::EquivarianceGrid grid = invariance::EquivarianceGrid::standard();
};

struct DcCheck {
  std::string param;
  double value = 0.0;
  double reference = 1.0;
};

struct Config {
  nlohmann::json raw;
  ModelKind model = ModelKind::Extended2;
  expr::Bindings params;
  std::optional<ExtendedParams> extended;  // set for extended2
  Drive drive;
  IntegratorOptions integrator;
  std::optional<State> initial_state;  // absent: E2 for extended2
  std::uint64_t seed = 0;
  std::string output_dir = "invaria-out";

  std::size_t custom_dim = 0;
  std::vector<std::string> custom_rhs;
  std::size_t output_index = 0;

  std::optional<PhaseExperiment> phase;
  std::optional<InvarianceExperiment> invariance;
  std::vector<DcCheck> dc_checks;

  SystemModel system() const;
  State start_state() const;
  const ExtendedParams& extended_params() const;  // ConfigError unless extended2
};

/// Validates `doc`. `seed` overrides the config's own seed (and is used to
/// build the noise streams of the drive).
Config parse_config(const nlohmann::json& doc, std::optional<std::uint64_t> seed = std::nullopt);

Config load_config(const std::filesystem::path& path,
                   std::optional<std::uint64_t> seed = std::nullopt);

/// The configuration `reproduce-paper` runs when no --config is given.
nlohmann::json paper_config_json();

}  // namespace invaria::cli
