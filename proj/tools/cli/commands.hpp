#pragma once

#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "config.hpp"

namespace cli {

struct ModelOptions {
  double alpha = 1.0;
  double beta = 1.0;
  std::string atoms;  // JSON list of {"weight", "matrix"}; overrides alpha/beta
};

struct RunOptions {
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  bool strict = false;
  std::string out;
};

struct Artifacts {
  json summary = json::object();
  std::vector<std::pair<std::string, std::string>> csv;  // (suffix, contents)
  bool certificate_failed = false;
};

using Runner = std::function<Artifacts()>;

struct Command {
  CLI::App* app = nullptr;
  Runner run;
  std::string module;
  std::shared_ptr<RunOptions> options;
};

struct DistDeleter {
  void operator()(lc_distribution* d) const { lc_distribution_free(d); }
};
using Dist = std::unique_ptr<lc_distribution, DistDeleter>;

Dist make_model(const ModelOptions& m);
json model_json(const ModelOptions& m);

void add_model_options(CLI::App* app, ModelOptions& m);
void add_run_options(CLI::App* app, RunOptions& r, const std::string& default_out);

Command add_simulate(CLI::App& root);
Command add_legendre(CLI::App& root);
Command add_rate(CLI::App& root);
Command add_mc_estimate(CLI::App& root);
Command add_verify_bounds(CLI::App& root);
Command add_selftest(CLI::App& root);

}  // namespace cli
