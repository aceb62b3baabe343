#include <algorithm>
#include <iostream>

#include "commands.hpp"

using namespace cli;

namespace {

int report_library_error(const LibraryError& e, const Command& cmd, const json& config) {
  const bool usage = e.status == LC_ERR_INVALID_ARGUMENT || e.status == LC_ERR_INVALID_DIMENSION;
  if (usage) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  json diag = {{"error", e.what()},
               {"status", lc_status_string(e.status)},
               {"module", e.module},
               {"operation", e.operation},
               {"inputs_digest", hex(fnv1a(config.dump()))},
               {"config", config}};
  std::cerr << diag.dump(2) << "\n";
  try {
    write_atomic(cmd.options->out + ".error.json", diag.dump(2) + "\n");
  } catch (const std::exception&) {
  }
  return kNumeric;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random walks on the stochastic group: simulation, rate functions, Monte Carlo"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.set_version_flag("--version", lc_version());
  app.footer("Options may also come from --config FILE (key = value lines); flags override the file.");

  std::vector<Command> commands{add_simulate(app), add_legendre(app), add_rate(app),
                                add_mc_estimate(app), add_verify_bounds(app), add_selftest(app)};

  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    args = splice_config(args);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }

  for (const Command& cmd : commands) {
    if (!cmd.app->parsed()) continue;
    const json config = resolved_config(*cmd.app);
    try {
      Artifacts out = cmd.run();
      json doc = {{"command", cmd.app->get_name()},
                  {"config", config},
                  {"result", out.summary},
                  {"certificates_passed", !out.certificate_failed},
                  {"metadata", {{"timestamp", iso_timestamp()}, {"version", lc_version()}}}};
      const std::string prefix = cmd.options->out;
      write_atomic(prefix + ".json", doc.dump(2) + "\n");
      std::cout << "wrote " << prefix << ".json\n";
      for (const auto& [suffix, contents] : out.csv) {
        const std::string path = prefix + (suffix.empty() ? "" : "." + suffix) + ".csv";
        write_atomic(path, contents);
        std::cout << "wrote " << path << "\n";
      }
      if (out.certificate_failed) {
        std::cerr << "certificate failure (see " << prefix << ".json)\n";
        if (cmd.options->strict) return kCertificate;
      }
      return kOk;
    } catch (const UsageError& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kUsage;
    } catch (const LibraryError& e) {
      return report_library_error(e, cmd, config);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kNumeric;
    }
  }
  return kUsage;
}
