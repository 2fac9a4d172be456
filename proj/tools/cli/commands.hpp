#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>

#include <nlohmann/json.hpp>

#include "config.hpp"
#include "output.hpp"

namespace invaria::cli {

enum ExitCode : int { kOk = 0, kConfigError = 1, kNumericError = 2 };

void cmd_equilibria(const Config& cfg, OutputDir& out, std::ostream& log);
void cmd_simulate(const Config& cfg, OutputDir& out, std::ostream& log);
void cmd_phase(const Config& cfg, OutputDir& out, std::ostream& log);
std::vector<invariance::InvarianceVerdict> cmd_invariance(const Config& cfg, OutputDir& out,
                                                          std::ostream& log);
void cmd_dc_check(const Config& cfg, OutputDir& out, std::ostream& log);
/// Everything above for the given config plus summary.json comparing
/// against the published values.
void cmd_reproduce_paper(const Config& cfg, OutputDir& out, std::ostream& log);

/// Values the reference parameterizations are compared against.
struct PaperValue {
  std::string name;
  double expected;
  double computed;
};
std::vector<PaperValue> paper_comparisons(const ExtendedParams& base);
inline constexpr double kPaperTolerance = 1e-3;

nlohmann::json to_json(const analysis::StabilityReport& rep);
nlohmann::json to_json(const invariance::InvarianceVerdict& v);

/// `--seed` if given, else INVARIA_SEED if set, else nothing.
std::optional<std::uint64_t> resolve_seed(std::optional<std::uint64_t> flag);

/// Entry point of the `invaria` binary; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace invaria::cli
