#include <ostream>

#include <CLI/CLI.hpp>

#include "commands.hpp"
#include "version.hpp"

namespace invaria::cli {

namespace {

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
};

using Command = void (*)(const Config&, OutputDir&, std::ostream&);

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Adaptive PI feedback model: equilibria, simulation and invariance checks",
               "invaria"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  Flags flags;
  const std::pair<const char*, const char*> subs[] = {
      {"equilibria", "Equilibria, eigenvalues and stability of the extended model"},
      {"simulate", "Integrate the configured model and write trajectory.csv"},
      {"phase", "Vector field, basin labels and SVG phase portraits"},
      {"invariance", "Equivariance conditions and paired-simulation residual tests"},
      {"dc-check", "Coordinate-substitution checks for dynamical compensation"},
      {"reproduce-paper", "Run every experiment and compare against the published values"},
  };
  for (const auto& [name, help] : subs) {
    CLI::App* sub = app.add_subcommand(name, help);
    auto* cfg = sub->add_option("--config", flags.config, "JSON configuration file");
    if (std::string_view(name) != "reproduce-paper") cfg->required();
    sub->add_option("--seed", flags.seed, "Noise seed (overrides INVARIA_SEED and the config)");
    sub->add_option("--out", flags.out, "Output directory (overrides output_dir)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  static const std::map<std::string, Command> table{
      {"equilibria", cmd_equilibria},
      {"simulate", cmd_simulate},
      {"phase", cmd_phase},
      {"invariance", [](const Config& c, OutputDir& o, std::ostream& l) { cmd_invariance(c, o, l); }},
      {"dc-check", cmd_dc_check},
      {"reproduce-paper", cmd_reproduce_paper},
  };

  Config cfg;
  try {
    const auto seed = resolve_seed(flags.seed);
    cfg = flags.config.empty() ? parse_config(paper_config_json(), seed)
                               : load_config(flags.config, seed);
    if (command != "simulate") (void)cfg.extended_params();
  } catch (const Error& e) {
    err << "invaria: " << e.what() << "\n";
    return kConfigError;
  }

  try {
    OutputDir dir(flags.out.empty() ? cfg.output_dir : flags.out);
    table.at(command)(cfg, dir, out);
    dir.write_manifest(command, cfg.raw);
  } catch (const NumericError& e) {
    err << "invaria: numeric failure: " << e.what() << "\n";
    return kNumericError;
  } catch (const EvalError& e) {
    err << "invaria: numeric failure: " << e.what() << "\n";
    return kNumericError;
  } catch (const Error& e) {
    err << "invaria: " << e.what() << "\n";
    return kConfigError;
  }
  return kOk;
}

}  // namespace invaria::cli
