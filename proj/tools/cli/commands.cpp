#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

namespace cli {

namespace {

constexpr double kRoundTripTol = 1e-10;
constexpr double kClosedFormTol = 1e-12;

double frobenius(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

std::string flag(bool b) { return b ? "1" : "0"; }

std::size_t model_dim(lc_distribution* d) {
  std::size_t n = 0;
  check(lc_distribution_dim(d, &n), "stochastic_group", "distribution_dim");
  return n;
}

template <class F>
void parallel_for(std::size_t count, std::size_t workers, F&& body) {
  workers = std::max<std::size_t>(1, std::min(workers, count));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < count; i += workers) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

void require_dim(const MatrixArg& m, std::size_t d, const char* field) {
  if (m.d != d) {
    throw UsageError(std::string(field) + ": expected a " + std::to_string(d) + "x" + std::to_string(d) +
                     " matrix, got " + std::to_string(m.d) + "x" + std::to_string(m.d));
  }
}

}  // namespace

Dist make_model(const ModelOptions& m) {
  lc_distribution* raw = nullptr;
  if (m.atoms.empty()) {
    check(lc_distribution_example(m.alpha, m.beta, &raw), "stochastic_group", "example_model");
    return Dist(raw);
  }
  std::string text = m.atoms;
  if (text.find_first_not_of(" \t\n") != std::string::npos && text[text.find_first_not_of(" \t\n")] != '[') {
    std::ifstream in(text);
    if (!in) throw UsageError("atoms: cannot open '" + text + "'");
    std::ostringstream os;
    os << in.rdbuf();
    text = os.str();
  }
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw UsageError(std::string("atoms: invalid JSON (") + e.what() + ")");
  }
  if (!j.is_array() || j.empty()) throw UsageError("atoms: expected a non-empty list of {weight, matrix}");
  std::vector<double> weights;
  std::vector<double> mats;
  std::size_t d = 0;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& a = j[i];
    if (!a.is_object() || !a.contains("weight") || !a.contains("matrix") || !a["weight"].is_number()) {
      throw UsageError("atoms[" + std::to_string(i) + "]: expected {\"weight\": number, \"matrix\": [[...]]}");
    }
    const MatrixArg m = load_matrix(a["matrix"].dump(), "atoms.matrix");
    if (i == 0) d = m.d;
    require_dim(m, d, "atoms.matrix");
    weights.push_back(a["weight"].get<double>());
    mats.insert(mats.end(), m.data.begin(), m.data.end());
  }
  check(lc_distribution_create(d, weights.size(), weights.data(), mats.data(), &raw), "stochastic_group",
        "distribution_create");
  return Dist(raw);
}

json model_json(const ModelOptions& m) {
  if (!m.atoms.empty()) return json{{"kind", "atoms"}, {"atoms", m.atoms}};
  return json{{"kind", "example"}, {"alpha", m.alpha}, {"beta", m.beta}};
}

void add_model_options(CLI::App* app, ModelOptions& m) {
  app->add_option("--alpha", m.alpha, "Rate of atom A in the 2x2 example model")->capture_default_str();
  app->add_option("--beta", m.beta, "Rate of atom B in the 2x2 example model")->capture_default_str();
  app->add_option("--atoms", m.atoms, "JSON list (inline or file) of {weight, matrix}; replaces the example model");
}

void add_run_options(CLI::App* app, RunOptions& r, const std::string& default_out) {
  r.workers = default_workers();
  r.out = default_out;
  app->add_option("--seed", r.seed, "Random seed")->capture_default_str();
  app->add_option("--workers", r.workers, "Worker threads (default from LIECRAMER_WORKERS)")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app->add_flag("--strict", r.strict, "Exit with status 2 when a certificate fails");
  app->add_option("--out", r.out, "Output prefix; writes PREFIX.json and PREFIX*.csv")->capture_default_str();
}

// ---------------------------------------------------------------------------

Command add_simulate(CLI::App& root) {
  struct State {
    ModelOptions model;
    std::size_t n = 1000;
    std::size_t m = 10;
    std::size_t seeds = 1;
    std::size_t stride = 0;
    std::size_t trajectory_stride = 0;
  };
  auto st = std::make_shared<State>();
  auto run = std::make_shared<RunOptions>();
  CLI::App* app = root.add_subcommand("simulate", "Simulate the rescaled walk and check the replacement bound");
  add_model_options(app, st->model);
  add_run_options(app, *run, "simulate");
  app->add_option("--n", st->n, "Number of steps")->capture_default_str()->check(CLI::PositiveNumber);
  app->add_option("--m", st->m, "Number of segments")->capture_default_str()->check(CLI::PositiveNumber);
  app->add_option("--seeds", st->seeds, "Independent walks, seeds seed..seed+seeds-1")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app->add_option("--checkpoint-stride", st->stride, "Walk storage stride (0 = automatic)")->capture_default_str();
  app->add_option("--trajectory-stride", st->trajectory_stride, "Row stride of the trajectory CSV (0 = n/1000)")
      ->capture_default_str();

  Runner runner = [st, run]() {
    Artifacts a;
    Dist dist = make_model(st->model);
    const std::size_t d = model_dim(dist.get());
    const std::size_t dd = d * d;
    CsvWriter cert({"seed", "m", "max_deviation", "bound", "kappa", "support_bound", "pass"});
    std::vector<std::string> header{"k", "atom"};
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) header.push_back("g" + std::to_string(i) + std::to_string(j));
    CsvWriter traj(header);

    std::vector<lc_replacement> certs(st->seeds);
    std::vector<double> first_endpoint(dd), first_logs(st->m * dd);
    std::vector<std::vector<double>> points;
    std::vector<size_t> atoms;
    const std::size_t tstride = st->trajectory_stride ? st->trajectory_stride : std::max<std::size_t>(1, st->n / 1000);
    parallel_for(st->seeds, run->workers, [&](std::size_t s) {
      lc_walk* w = nullptr;
      check(lc_walk_simulate(dist.get(), st->n, run->seed + s, st->stride, &w), "walk", "simulate_walk");
      std::unique_ptr<lc_walk, void (*)(lc_walk*)> guard(w, lc_walk_free);
      check(lc_walk_replacement(w, dist.get(), st->m, &certs[s]), "walk", "replacement_deviation");
      if (s == 0) {
        check(lc_walk_point(w, st->n, first_endpoint.data()), "walk", "point");
        check(lc_walk_segment_logs(w, st->m, first_logs.data()), "walk", "segment_decomposition");
        for (std::size_t k = 0; k <= st->n; k += tstride) {
          std::vector<double> p(dd);
          check(lc_walk_point(w, k, p.data()), "walk", "point");
          size_t atom = 0;
          if (k > 0) check(lc_walk_atom(w, k, &atom), "walk", "atom_index");
          points.push_back(std::move(p));
          atoms.push_back(k > 0 ? atom : 0);
        }
      }
    });

    json cert_list = json::array();
    std::size_t failures = 0;
    for (std::size_t s = 0; s < st->seeds; ++s) {
      const auto& c = certs[s];
      failures += c.pass ? 0 : 1;
      cert.row({std::to_string(run->seed + s), std::to_string(st->m), format_double(c.max_deviation),
                format_double(c.bound), format_double(c.kappa), format_double(c.support_bound), flag(c.pass)});
      cert_list.push_back({{"seed", run->seed + s},
                           {"max_deviation", number(c.max_deviation)},
                           {"bound", number(c.bound)},
                           {"pass", c.pass != 0}});
    }
    for (std::size_t i = 0; i < points.size(); ++i) {
      const std::size_t k = i * tstride;
      std::vector<std::string> row{std::to_string(k), k == 0 ? "" : std::to_string(atoms[i])};
      for (double v : points[i]) row.push_back(format_double(v));
      traj.row(row);
    }
    json logs = json::array();
    for (std::size_t l = 0; l < st->m; ++l) logs.push_back(matrix_json(first_logs.data() + l * dd, d));
    std::vector<double> mean(dd);
    check(lc_distribution_mean(dist.get(), mean.data()), "ldp", "mean");

    a.summary = {{"model", model_json(st->model)},
                 {"n", st->n},
                 {"m", st->m},
                 {"seeds", st->seeds},
                 {"endpoint", matrix_json(first_endpoint.data(), d)},
                 {"mean_increment", matrix_json(mean.data(), d)},
                 {"segment_logs", logs},
                 {"replacement", {{"certificates", cert_list}, {"failures", failures}}}};
    a.certificate_failed = failures > 0;
    a.csv.emplace_back("", cert.str());
    a.csv.emplace_back("trajectory", traj.str());
    return a;
  };
  return {app, runner, "walk", run};
}

// ---------------------------------------------------------------------------

Command add_legendre(CLI::App& root) {
  struct State {
    ModelOptions model;
    std::string x;
    std::size_t grid = 41;
    double s_min = -0.25;
    double s_max = 1.25;
  };
  auto st = std::make_shared<State>();
  auto run = std::make_shared<RunOptions>();
  CLI::App* app = root.add_subcommand("legendre", "Evaluate the Legendre transform of the log-MGF");
  add_model_options(app, st->model);
  add_run_options(app, *run, "legendre");
  app->add_option("--x", st->x, "Single algebra point (JSON matrix, inline or file)");
  app->add_option("--grid", st->grid, "Points on the line (1-s) X_0 + s X_1")->capture_default_str();
  app->add_option("--s-min", st->s_min, "Grid start")->capture_default_str();
  app->add_option("--s-max", st->s_max, "Grid end")->capture_default_str();

  Runner runner = [st, run]() {
    Artifacts a;
    Dist dist = make_model(st->model);
    const std::size_t d = model_dim(dist.get());
    const std::size_t dd = d * d;
    const bool example = st->model.atoms.empty();

    std::vector<double> ss;
    std::vector<std::vector<double>> xs;
    if (!st->x.empty()) {
      const MatrixArg m = load_matrix(st->x, "x");
      require_dim(m, d, "x");
      xs.push_back(m.data);
      ss.push_back(std::nan(""));
    } else {
      std::size_t atoms = 0;
      check(lc_distribution_size(dist.get(), &atoms), "ldp", "distribution_size");
      if (atoms < 2 && !example) throw UsageError("grid: the model needs at least two atoms (or pass --x)");
      if (st->grid == 0) throw UsageError("grid: must be positive");
      std::vector<double> x0(dd, 0.0), x1(dd, 0.0);
      if (example) {
        x0 = {-st->model.alpha, st->model.alpha, 0.0, 0.0};
        x1 = {0.0, 0.0, st->model.beta, -st->model.beta};
      } else {
        json j = json::parse(st->model.atoms.front() == '[' ? st->model.atoms : [&] {
          std::ifstream in(st->model.atoms);
          std::ostringstream os;
          os << in.rdbuf();
          return os.str();
        }());
        x0 = load_matrix(j[0]["matrix"].dump(), "atoms").data;
        x1 = load_matrix(j[1]["matrix"].dump(), "atoms").data;
      }
      for (std::size_t i = 0; i < st->grid; ++i) {
        const double s = st->grid == 1 ? st->s_min
                                       : st->s_min + (st->s_max - st->s_min) * static_cast<double>(i) /
                                                         static_cast<double>(st->grid - 1);
        std::vector<double> x(dd);
        for (std::size_t k = 0; k < dd; ++k) x[k] = (1.0 - s) * x0[k] + s * x1[k];
        xs.push_back(std::move(x));
        ss.push_back(s);
      }
    }

    std::vector<lc_legendre_result> res(xs.size());
    std::vector<std::vector<double>> lambdas(xs.size(), std::vector<double>(dd, 0.0));
    parallel_for(xs.size(), run->workers, [&](std::size_t i) {
      check(lc_legendre(dist.get(), xs[i].data(), &res[i], lambdas[i].data()), "ldp", "legendre");
    });

    std::vector<std::string> header{"index", "s"};
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) header.push_back("x" + std::to_string(i) + std::to_string(j));
    for (const char* h : {"value", "domain", "closed_form"}) header.push_back(h);
    CsvWriter csv(header);
    json points = json::array();
    for (std::size_t i = 0; i < xs.size(); ++i) {
      double cf = std::nan("");
      if (example) {
        check(lc_legendre_closed_form_s2(xs[i][1], xs[i][2], st->model.alpha, st->model.beta, &cf), "ldp",
              "legendre_closed_form_s2");
      }
      const char* dom = res[i].domain == LC_DOMAIN_INSIDE ? "inside"
                        : res[i].domain == LC_DOMAIN_BOUNDARY ? "boundary" : "outside";
      std::vector<std::string> row{std::to_string(i), std::isnan(ss[i]) ? "" : format_double(ss[i])};
      for (double v : xs[i]) row.push_back(format_double(v));
      row.push_back(format_double(res[i].value));
      row.push_back(dom);
      row.push_back(example ? format_double(cf) : "");
      csv.row(row);
      json p = {{"x", matrix_json(xs[i].data(), d)},
                {"value", number(res[i].value)},
                {"finite", res[i].finite != 0},
                {"domain", dom},
                {"gradient_norm", number(res[i].gradient_norm)},
                {"iterations", res[i].iterations}};
      if (!std::isnan(ss[i])) p["s"] = ss[i];
      if (res[i].has_maximizer) p["maximizer"] = matrix_json(lambdas[i].data(), d);
      if (example) p["closed_form"] = number(cf);
      points.push_back(p);
    }
    a.summary = {{"model", model_json(st->model)}, {"points", points}};
    a.csv.emplace_back("", csv.str());
    return a;
  };
  return {app, runner, "ldp", run};
}

// ---------------------------------------------------------------------------

Command add_rate(CLI::App& root) {
  struct State {
    ModelOptions model;
    std::string endpoint;
    std::string ms = "8,16,32";
    std::size_t subintervals = 32;
    std::size_t nodes = 8;
  };
  auto st = std::make_shared<State>();
  auto run = std::make_shared<RunOptions>();
  CLI::App* app = root.add_subcommand("rate", "Rate function at an endpoint: discretized, quadrature, closed form");
  add_model_options(app, st->model);
  add_run_options(app, *run, "rate");
  app->add_option("--endpoint", st->endpoint, "Endpoint group element (JSON matrix, inline or file)")->required();
  app->add_option("--m", st->ms, "Comma separated segment counts")->capture_default_str();
  app->add_option("--subintervals", st->subintervals, "Quadrature subintervals")->capture_default_str();
  app->add_option("--nodes", st->nodes, "Gauss nodes per subinterval")->capture_default_str();

  Runner runner = [st, run]() {
    Artifacts a;
    Dist dist = make_model(st->model);
    const std::size_t d = model_dim(dist.get());
    const std::size_t dd = d * d;
    const MatrixArg g = load_matrix(st->endpoint, "endpoint");
    require_dim(g, d, "endpoint");
    const std::vector<std::size_t> ms = parse_size_list(st->ms, "m");

    std::vector<lc_rate_result> results(ms.size());
    std::vector<std::vector<double>> minimizers(ms.size());
    parallel_for(ms.size(), run->workers, [&](std::size_t i) {
      minimizers[i].assign(ms[i] * dd, 0.0);
      check(lc_discretized_rate(dist.get(), g.data.data(), ms[i], &results[i], minimizers[i].data()), "rate",
            "discretized_rate");
    });

    CsvWriter csv({"m", "value", "constraint_residual", "finite"});
    json disc = json::array();
    bool any_infeasible = false;
    for (std::size_t i = 0; i < ms.size(); ++i) {
      const auto& r = results[i];
      any_infeasible = any_infeasible || !r.finite;
      csv.row({std::to_string(r.m), format_double(r.value), format_double(r.constraint_residual), flag(r.finite)});
      disc.push_back({{"m", r.m},
                      {"value", number(r.value)},
                      {"finite", r.finite != 0},
                      {"constraint_residual", number(r.constraint_residual)},
                      {"outer_iterations", r.outer_iterations},
                      {"inner_iterations", r.inner_iterations},
                      {"final_penalty", r.final_penalty}});
    }
    json minimizer = json::array();
    for (std::size_t l = 0; l < ms.back(); ++l) minimizer.push_back(matrix_json(minimizers.back().data() + l * dd, d));

    json summary = {{"model", model_json(st->model)},
                    {"endpoint", matrix_json(g.data.data(), d)},
                    {"discretized", disc},
                    {"minimizer", minimizer}};
    json findings = json::array();
    const bool s2 = st->model.atoms.empty() && st->model.alpha == st->model.beta;
    if (s2) {
      double cf = 0.0;
      check(lc_closed_form_rate_s2(g.data.data(), st->model.alpha, &cf), "rate", "closed_form_rate_s2");
      double quad = 0.0;
      const lc_status qs =
          lc_rate_optimal_path_s2(dist.get(), st->model.alpha, g.data.data(), st->subintervals, st->nodes, &quad);
      json qj = nullptr;
      if (qs == LC_OK) {
        qj = number(quad);
      } else if (qs == LC_ERR_INFEASIBLE) {
        qj = number(INFINITY);
        findings.push_back(std::string("optimal path unavailable: ") + lc_last_error());
      } else {
        check(qs, "rate", "rate_along_path");
      }
      summary["closed_form"] = number(cf);
      summary["quadrature"] = qj;
      summary["triple"] = {{"closed_form", number(cf)},
                           {"quadrature", qj},
                           {"discretized", number(results.back().value)},
                           {"m", ms.back()}};
      if (qs == LC_OK && std::isfinite(cf) && std::isfinite(quad) && std::abs(cf - quad) > 1e-6) {
        findings.push_back("closed-form expression differs from the optimal-path quadrature by " +
                           format_double(cf - quad));
      }
      if (qs == LC_OK && results.back().finite && results.back().value < quad - 1e-6) {
        findings.push_back("discretized minimum at m = " + std::to_string(ms.back()) +
                           " lies below the closed-form path quadrature by " +
                           format_double(quad - results.back().value) + "; that path is not the minimizer");
      }
      CsvWriter triple({"closed_form", "quadrature", "discretized", "m"});
      triple.row({format_double(cf), qs == LC_OK ? format_double(quad) : "inf", format_double(results.back().value),
                  std::to_string(ms.back())});
      a.csv.emplace_back("triple", triple.str());
    }
    summary["findings"] = findings;
    a.summary = summary;
    a.certificate_failed = any_infeasible;
    a.csv.emplace(a.csv.begin(), "", csv.str());
    return a;
  };
  return {app, runner, "rate", run};
}

// ---------------------------------------------------------------------------

Command add_mc_estimate(CLI::App& root) {
  struct State {
    ModelOptions model;
    std::string center;
    std::string center_log;
    double radius = 0.05;
    std::string ns = "20,40,80,160";
    std::size_t samples = 100000;
    std::string tilt = "none";
    std::string lambda;
  };
  auto st = std::make_shared<State>();
  auto run = std::make_shared<RunOptions>();
  CLI::App* app = root.add_subcommand("mc-estimate", "Monte Carlo rate curve for a ball event");
  add_model_options(app, st->model);
  add_run_options(app, *run, "mc-estimate");
  app->add_option("--center", st->center, "Ball center (JSON group matrix); default exp(mean)");
  app->add_option("--center-log", st->center_log, "Ball center given as exp of this algebra matrix");
  app->add_option("--radius", st->radius, "Ball radius in distance-proxy units")->capture_default_str();
  app->add_option("--ns", st->ns, "Comma separated increasing n values")->capture_default_str();
  app->add_option("--samples", st->samples, "Samples per n")->capture_default_str();
  app->add_option("--tilt", st->tilt, "Tilt policy")
      ->capture_default_str()
      ->check(CLI::IsMember({"none", "fixed", "auto"}));
  app->add_option("--lambda", st->lambda, "Tilt for --tilt fixed (JSON algebra matrix)");

  Runner runner = [st, run]() {
    Artifacts a;
    if (st->samples == 0) throw UsageError("samples: must be positive");
    Dist dist = make_model(st->model);
    const std::size_t d = model_dim(dist.get());
    const std::size_t dd = d * d;
    const std::vector<std::size_t> ns = parse_size_list(st->ns, "ns");
    for (std::size_t i = 1; i < ns.size(); ++i) {
      if (ns[i] <= ns[i - 1]) throw UsageError("ns: values must be increasing");
    }
    if (!st->center.empty() && !st->center_log.empty()) throw UsageError("center: give --center or --center-log, not both");
    std::vector<double> center(dd);
    if (!st->center.empty()) {
      const MatrixArg c = load_matrix(st->center, "center");
      require_dim(c, d, "center");
      center = c.data;
    } else {
      std::vector<double> x(dd);
      if (!st->center_log.empty()) {
        const MatrixArg c = load_matrix(st->center_log, "center-log");
        require_dim(c, d, "center-log");
        x = c.data;
      } else {
        check(lc_distribution_mean(dist.get(), x.data()), "ldp", "mean");
      }
      check(lc_exp(d, x.data(), center.data()), "lie_core", "exp_matrix");
    }

    std::vector<double> lambda(dd, 0.0);
    bool tilted = false;
    if (st->tilt == "fixed") {
      if (st->lambda.empty()) throw UsageError("lambda: required with --tilt fixed");
      const MatrixArg l = load_matrix(st->lambda, "lambda");
      require_dim(l, d, "lambda");
      lambda = l.data;
      tilted = true;
    } else if (st->tilt == "auto") {
      int available = 0;
      check(lc_auto_tilt(dist.get(), center.data(), st->radius, lambda.data(), &available), "mc", "auto_tilt");
      tilted = available != 0;
    }

    CsvWriter csv({"n", "samples", "hits", "p_hat", "lower", "upper", "rate", "rate_lower", "rate_upper", "ess",
                   "tilted", "degenerate"});
    json points = json::array();
    std::vector<double> rates, rlo, rhi;
    auto rate_of = [](double p, std::size_t n) {
      if (!(p > 0.0)) return static_cast<double>(INFINITY);
      return std::max(0.0, -std::log(std::min(p, 1.0)) / static_cast<double>(n));
    };
    for (std::size_t n : ns) {
      lc_estimate e{};
      if (tilted) {
        check(lc_tilted_estimate(dist.get(), n, center.data(), st->radius, st->samples, lambda.data(), run->seed,
                                 run->workers, &e),
              "mc", "tilted_estimator");
      } else {
        check(lc_estimate_probability(dist.get(), n, center.data(), st->radius, st->samples, run->seed,
                                      run->workers, &e),
              "mc", "estimate_probability");
      }
      const double r = rate_of(e.p_hat, n), lo = rate_of(e.upper, n), hi = rate_of(e.lower, n);
      rates.push_back(r);
      rlo.push_back(lo);
      rhi.push_back(hi);
      csv.row({std::to_string(n), std::to_string(e.samples), std::to_string(e.hits), format_double(e.p_hat),
               format_double(e.lower), format_double(e.upper), format_double(r), format_double(lo),
               format_double(hi), format_double(e.ess), flag(e.tilted), flag(e.degenerate)});
      points.push_back({{"n", n},
                        {"samples", e.samples},
                        {"hits", e.hits},
                        {"p_hat", number(e.p_hat)},
                        {"interval", {number(e.lower), number(e.upper)}},
                        {"rate", number(r)},
                        {"rate_interval", {number(lo), number(hi)}},
                        {"ess", number(e.ess)},
                        {"tilted", e.tilted != 0},
                        {"degenerate", e.degenerate != 0}});
    }
    bool monotone = true;
    for (std::size_t i = 1; i < rates.size(); ++i) {
      if (rates[i] > rates[i - 1] && rlo[i] > rhi[i - 1]) monotone = false;
    }
    a.summary = {{"model", model_json(st->model)},
                 {"center", matrix_json(center.data(), d)},
                 {"radius", st->radius},
                 {"tilt_policy", st->tilt},
                 {"tilt", tilted ? matrix_json(lambda.data(), d) : json(nullptr)},
                 {"points", points},
                 {"non_increasing_up_to_overlap", monotone},
                 {"disclaimer",
                  "finite-n estimates of -(1/n) log P(sigma_n in ball); the large deviation limit is not reached at "
                  "these n and polynomial prefactors bias the rate by O(log n / n)"}};
    a.csv.emplace_back("", csv.str());
    return a;
  };
  return {app, runner, "mc", run};
}

// ---------------------------------------------------------------------------

Command add_verify_bounds(CLI::App& root) {
  struct State {
    std::size_t dim = 2;
    double radius = 0.2;
    std::size_t pairs = 10000;
    std::size_t radius_samples = 2000;
  };
  auto st = std::make_shared<State>();
  auto run = std::make_shared<RunOptions>();
  CLI::App* app = root.add_subcommand("verify-bounds", "Check the BCH log-product bound on random pairs");
  add_run_options(app, *run, "verify-bounds");
  app->add_option("--dim", st->dim, "Matrix dimension d")->capture_default_str();
  app->add_option("--radius", st->radius, "Sampling radius for |X|, |Y|")->capture_default_str();
  app->add_option("--pairs", st->pairs, "Number of random pairs")->capture_default_str()->check(CLI::PositiveNumber);
  app->add_option("--radius-samples", st->radius_samples, "Samples for the contraction check")->capture_default_str();

  Runner runner = [st, run]() {
    Artifacts a;
    const std::size_t d = st->dim;
    const std::size_t dd = d * d;
    double contraction = 0.0;
    int radius_ok = 0;
    check(lc_validate_bch_radius(d, st->radius, st->radius_samples, run->seed, &contraction, &radius_ok), "bch",
          "validate_bch_radius");

    struct Row {
      double nx, ny, ad;
      lc_certificate c;
      lc_certificate lip;
    };
    std::vector<Row> rows(st->pairs);
    double lip_c = 0.0;
    check(lc_empirical_lipschitz(d, st->radius, st->pairs, run->seed, &lip_c), "bch", "empirical_lipschitz");
    parallel_for(st->pairs, run->workers, [&](std::size_t i) {
      std::vector<double> x(dd), y(dd);
      check(lc_random_algebra_element(d, st->radius, run->seed, 2 * i, x.data()), "lie_core", "random_algebra_element");
      check(lc_random_algebra_element(d, st->radius, run->seed, 2 * i + 1, y.data()), "lie_core",
            "random_algebra_element");
      Row& r = rows[i];
      r.nx = frobenius(x);
      r.ny = frobenius(y);
      check(lc_ad_norm(d, x.data(), &r.ad), "lie_core", "ad_operator");
      check(lc_verify_log_product(d, x.data(), y.data(), &r.c), "bch", "verify_log_product");
      check(lc_verify_lipschitz(d, x.data(), y.data(), lip_c, &r.lip), "bch", "verify_lipschitz");
    });

    CsvWriter csv({"pair", "seed", "norm_x", "norm_y", "ad_norm", "lhs", "rhs", "pass"});
    std::size_t failures = 0, lip_exceed = 0;
    double worst = 0.0, max_lip = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const Row& r = rows[i];
      failures += r.c.pass ? 0 : 1;
      lip_exceed += r.lip.pass ? 0 : 1;
      if (r.c.rhs > 0.0) worst = std::max(worst, r.c.lhs / r.c.rhs);
      if (r.lip.rhs > 0.0) max_lip = std::max(max_lip, r.lip.lhs / r.lip.rhs * lip_c);
      csv.row({std::to_string(i), std::to_string(run->seed), format_double(r.nx), format_double(r.ny),
               format_double(r.ad), format_double(r.c.lhs), format_double(r.c.rhs), flag(r.c.pass)});
    }
    a.summary = {{"dim", d},
                 {"radius", st->radius},
                 {"pairs", st->pairs},
                 {"log_product", {{"failures", failures}, {"max_lhs_over_rhs", number(worst)}}},
                 {"radius_validation",
                  {{"max_contraction", number(contraction)},
                   {"proof_condition_holds", radius_ok != 0},
                   {"series_converges", contraction < 1.0},
                   {"note", "proof condition is max contraction <= sqrt(2) - 1; the series only needs < 1"}}},
                 {"lipschitz",
                  {{"empirical_constant", number(lip_c)},
                   {"max_ratio_on_pairs", number(max_lip)},
                   {"pairs_above_empirical_constant", lip_exceed},
                   {"note", "empirical constant from an independent sample; informational, not a certificate"}}}};
    a.certificate_failed = failures > 0 || !(contraction < 1.0);
    a.csv.emplace_back("", csv.str());
    return a;
  };
  return {app, runner, "bch", run};
}

// ---------------------------------------------------------------------------

Command add_selftest(CLI::App& root) {
  struct State {
    std::size_t dim = 2;
    std::size_t samples = 1000;
    double radius = 0.5;
  };
  auto st = std::make_shared<State>();
  auto run = std::make_shared<RunOptions>();
  CLI::App* app = root.add_subcommand("exp-log-selftest", "Round-trip and closed-form checks of exp and log");
  add_run_options(app, *run, "exp-log-selftest");
  app->add_option("--dim", st->dim, "Matrix dimension d")->capture_default_str();
  app->add_option("--samples", st->samples, "Random round trips")->capture_default_str();
  app->add_option("--radius", st->radius, "Sampling radius")->capture_default_str();

  Runner runner = [st, run]() {
    Artifacts a;
    const std::size_t d = st->dim;
    const std::size_t dd = d * d;
    CsvWriter csv({"sample", "norm_x", "round_trip_error", "pass"});
    std::vector<double> errs(st->samples), norms(st->samples);
    parallel_for(st->samples, run->workers, [&](std::size_t i) {
      std::vector<double> x(dd), g(dd), back(dd);
      check(lc_random_algebra_element(d, st->radius, run->seed, i, x.data()), "lie_core", "random_algebra_element");
      check(lc_exp(d, x.data(), g.data()), "lie_core", "exp_matrix");
      check(lc_log(d, g.data(), back.data()), "lie_core", "log_matrix");
      for (std::size_t k = 0; k < dd; ++k) back[k] -= x[k];
      errs[i] = frobenius(back);
      norms[i] = frobenius(x);
    });
    std::size_t round_trip_failures = 0;
    double max_err = 0.0;
    for (std::size_t i = 0; i < st->samples; ++i) {
      const bool ok = errs[i] < kRoundTripTol;
      round_trip_failures += ok ? 0 : 1;
      max_err = std::max(max_err, errs[i]);
      csv.row({std::to_string(i), format_double(norms[i]), format_double(errs[i]), flag(ok)});
    }
    lc_injectivity_report inj{};
    check(lc_validate_injectivity(d, st->samples, run->seed, &inj), "lie_core", "validate_injectivity");

    json summary = {{"dim", d},
                    {"round_trip", {{"samples", st->samples}, {"failures", round_trip_failures}, {"max_error", max_err}}},
                    {"injectivity",
                     {{"samples", inj.samples},
                      {"failures", inj.failures},
                      {"max_log_norm", number(inj.max_log_norm)},
                      {"max_round_trip", number(inj.max_round_trip)}}}};
    bool closed_ok = true;
    if (d == 2) {
      double worst = 0.0;
      for (double alpha : {0.5, 1.0, 2.0}) {
        for (double t : {0.01, 0.1, 1.0}) {
          const double x[4] = {-t * alpha, t * alpha, 0.0, 0.0};
          double g[4];
          check(lc_exp(2, x, g), "lie_core", "exp_matrix");
          const double e = std::exp(-t * alpha);
          const double expect[4] = {e, 1.0 - e, 0.0, 1.0};
          for (int k = 0; k < 4; ++k) worst = std::max(worst, std::abs(g[k] - expect[k]));
          const double y[4] = {0.0, 0.0, t * alpha, -t * alpha};
          check(lc_exp(2, y, g), "lie_core", "exp_matrix");
          const double expect_b[4] = {1.0, 0.0, 1.0 - e, e};
          for (int k = 0; k < 4; ++k) worst = std::max(worst, std::abs(g[k] - expect_b[k]));
        }
      }
      closed_ok = worst <= kClosedFormTol;
      summary["closed_form_exponentials"] = {{"max_entry_error", worst}, {"pass", closed_ok}};
    }
    a.summary = summary;
    a.certificate_failed = round_trip_failures > 0 || inj.failures > 0 || !closed_ok;
    a.csv.emplace_back("", csv.str());
    return a;
  };
  return {app, runner, "lie_core", run};
}

}  // namespace cli
