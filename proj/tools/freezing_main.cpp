#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "freezing/chain_sim.hpp"
#include "freezing/config.hpp"
#include "freezing/csv.hpp"
#include "freezing/error.hpp"
#include "freezing/limits_analytics.hpp"
#include "freezing/markov_core.hpp"
#include "freezing/ou_sim.hpp"
#include "freezing/pdmp_sim.hpp"
#include "freezing/schedules.hpp"
#include "freezing/stats.hpp"
#include "freezing/verification.hpp"

namespace fs = std::filesystem;
using namespace freezing;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailedCheck = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

struct CommonArgs {
  std::string config;
  std::uint64_t seed = 0;
  bool seed_given = false;
  unsigned threads = 1;
  std::string out = ".";
  bool quick = false;
};

struct Run {
  std::string command;
  Json config;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  fs::path out;
  bool quick = false;
  std::vector<std::string> outputs;

  fs::path file(const std::string& name) {
    outputs.push_back(name);
    return out / name;
  }
};

Run prepare(const std::string& command, const CommonArgs& args) {
  Run run;
  run.command = command;
  run.config = args.config.empty() ? Json::object() : unwrap_manifest(load_json_file(args.config));
  if (!run.config.is_object()) throw Error(ErrorCode::ConfigError, "config must be a JSON object");
  run.seed = args.seed_given ? args.seed : get_or<std::uint64_t>(run.config, "seed", 0);
  run.config["seed"] = run.seed;
  run.threads = args.threads;
  run.quick = args.quick;
  run.out = args.out;
  fs::create_directories(run.out);
  return run;
}

void finish(Run& run) {
  const auto manifest = make_manifest(run.command, run.config, run.seed, run.threads, run.outputs);
  write_text_file(run.out / "manifest.json", manifest.dump(2) + "\n");
}

// Caps sizes under --quick and records the value actually used.
std::int64_t sized(Run& run, const char* key, std::int64_t fallback, std::int64_t quick_cap) {
  auto v = get_or<std::int64_t>(run.config, key, fallback);
  if (v <= 0) throw Error(ErrorCode::ConfigError, std::string(key) + " must be positive");
  if (run.quick) v = std::min(v, quick_cap);
  run.config[key] = v;
  return v;
}

std::vector<std::int64_t> resolve_checkpoints(Run& run, std::int64_t n) {
  const auto& c = run.config;
  if (!c.contains("checkpoints")) run.config["checkpoints"] = "log10";
  const auto& spec = run.config["checkpoints"];
  if (spec.is_string()) {
    const auto s = spec.get<std::string>();
    if (s == "log10") return log_checkpoints(1, n, 1);
    if (s == "final") return {n};
    throw Error(ErrorCode::ConfigError, "checkpoints must be \"log10\", \"final\" or a list");
  }
  if (!spec.is_array()) throw Error(ErrorCode::ConfigError, "checkpoints must be \"log10\", \"final\" or a list");
  std::vector<std::int64_t> out;
  for (const auto& v : spec) {
    const auto k = v.get<std::int64_t>();
    if (k < 1 || k > n) throw Error(ErrorCode::ConfigError, "checkpoint outside [1, N]");
    out.push_back(k);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// "uniform", "nu" or {"fixed": k} with 1-based k.
InitialLaw resolve_init(Run& run, const GeneratorMatrix& q) {
  if (!run.config.contains("init")) run.config["init"] = "uniform";
  const auto& spec = run.config["init"];
  if (spec.is_string()) {
    const auto s = spec.get<std::string>();
    if (s == "uniform") return InitialLaw::uniform(q.dim());
    if (s == "nu") return InitialLaw::from(stationary_distribution(q).nu);
  } else if (spec.is_object() && spec.contains("fixed")) {
    const int k = get_or<int>(spec, "fixed", 1);
    if (k < 1 || k > q.dim()) throw Error(ErrorCode::ConfigError, "init.fixed outside 1..D");
    return InitialLaw::fixed(q.dim(), k - 1);
  }
  throw Error(ErrorCode::ConfigError, "init must be \"uniform\", \"nu\" or {\"fixed\": k}");
}

int cmd_simulate_chain(Run& run) {
  const auto gen = parse_generator(require_key(run.config, "generator"));
  const auto schedule = parse_schedule(require_key(run.config, "schedule"));
  const auto n = sized(run, "N", 1000, 10'000);
  EnsembleConfig cfg;
  cfg.options.steps = n;
  cfg.options.init = resolve_init(run, gen.q);
  cfg.options.checkpoints = resolve_checkpoints(run, n);
  if (run.config.contains("offset")) cfg.options.offset = get_or<std::int64_t>(run.config, "offset", 0);
  cfg.replicates = static_cast<std::size_t>(sized(run, "M", 1, 10));
  cfg.master_seed = run.seed;
  cfg.threads = run.threads;
  const auto ens = run_ensemble(gen.q, schedule, cfg);
  run.config["offset"] = ens.runs.front().offset;

  const auto nu = stationary_distribution(gen.q).nu;
  const int d = gen.q.dim();
  std::ofstream out(run.file("chain.csv"), std::ios::binary);
  CsvWriter csv(out);
  auto header = std::vector<std::string>{"replicate", "n", "i"};
  for (const auto& names : {numbered("x", d), numbered("y", d)}) header.insert(header.end(), names.begin(), names.end());
  csv.header(header);
  for (std::size_t r = 0; r < ens.runs.size(); ++r) {
    const auto& chain = ens.runs[r];
    for (const auto& snap : chain.snapshots) {
      const ChainState state{snap.n, snap.i, snap.counts};
      csv.field(static_cast<std::uint64_t>(r)).field(snap.n).field(snap.i + 1);
      csv.fields(state.x()).fields(fluctuation(state, nu, schedule, chain.offset));
      csv.end_row();
    }
  }
  return kExitOk;
}

int cmd_simulate_ezz(Run& run) {
  const auto gen = parse_generator(require_key(run.config, "generator"));
  const double a = get_or<double>(run.config, "a", 1.0);
  const double horizon = get_or<double>(run.config, "T", 1.0);
  if (!(a > 0.0) || !(horizon >= 0.0)) throw Error(ErrorCode::ConfigError, "a must be positive and T nonnegative");
  run.config["a"] = a;
  run.config["T"] = horizon;
  const auto m = static_cast<std::size_t>(sized(run, "M", 1, 10));
  const int d = gen.q.dim();
  const Vector nu = stationary_distribution(gen.q).nu;

  // "nu": X_0 = nu, I_0 ~ nu. "fixed": X_0 = x0 (default nu), I_0 = i0 (1-based).
  // "stationary": (X_0, I_0) from the Dirichlet mixture (complete graph only).
  const auto init = get_or<std::string>(run.config, "init", "nu");
  run.config["init"] = init;
  EZZInitSampler sampler;
  if (init == "nu") {
    const auto law = InitialLaw::from(nu);
    sampler = [nu, law](Rng& rng) { return EZZState{nu, law.sample(rng), 0.0}; };
  } else if (init == "fixed") {
    const int i0 = get_or<int>(run.config, "i0", 1);
    if (i0 < 1 || i0 > d) throw Error(ErrorCode::ConfigError, "i0 outside 1..D");
    Vector x0 = nu;
    if (run.config.contains("x0")) {
      const auto v = run.config["x0"].get<std::vector<double>>();
      if (static_cast<int>(v.size()) != d) throw Error(ErrorCode::ConfigError, "x0 has the wrong length");
      x0 = Eigen::Map<const Vector>(v.data(), d);
    }
    run.config["i0"] = i0;
    run.config["x0"] = std::vector<double>(x0.data(), x0.data() + d);
    sampler = [x0, i0](Rng&) { return EZZState{x0, i0 - 1, 0.0}; };
  } else if (init == "stationary") {
    if (!gen.theta) throw Error(ErrorCode::ConfigError, "init \"stationary\" needs complete_graph_theta");
    const auto mix = dirichlet_mixture(*gen.theta, a);
    sampler = [mix](Rng& rng) { return mix.sample(rng); };
  } else {
    throw Error(ErrorCode::ConfigError, "init must be \"nu\", \"fixed\" or \"stationary\"");
  }

  std::vector<EZZPath> paths(m);
  parallel_for(m, run.threads, [&](std::size_t r) {
    auto rng = make_rng(run.seed, r);
    const auto start = sampler(rng);
    paths[r] = simulate_ezz(gen.q, a, start, horizon, rng);
  });

  std::ofstream out(run.file("ezz.csv"), std::ios::binary);
  CsvWriter csv(out);
  auto header = std::vector<std::string>{"replicate", "t_event", "i_after"};
  const auto xs = numbered("x", d);
  header.insert(header.end(), xs.begin(), xs.end());
  csv.header(header);
  for (std::size_t r = 0; r < m; ++r) {
    const auto& p = paths[r];
    csv.field(static_cast<std::uint64_t>(r)).field(0.0).field(p.initial.i + 1).fields(p.initial.x);
    csv.end_row();
    for (std::size_t k = 0; k < p.jumps(); ++k) {
      csv.field(static_cast<std::uint64_t>(r)).field(p.epochs[k]).field(p.states[k] + 1).fields(p.x_at_epoch[k]);
      csv.end_row();
    }
  }
  return kExitOk;
}

Matrix config_matrix(const Json& j, const char* what) {
  if (!j.is_array() || j.empty()) throw Error(ErrorCode::ConfigError, std::string(what) + " must be a square array");
  const auto d = static_cast<Eigen::Index>(j.size());
  Matrix m(d, d);
  for (Eigen::Index r = 0; r < d; ++r) {
    const auto row = j[static_cast<std::size_t>(r)].get<std::vector<double>>();
    if (static_cast<Eigen::Index>(row.size()) != d) throw Error(ErrorCode::ConfigError, std::string(what) + " must be square");
    for (Eigen::Index c = 0; c < d; ++c) m(r, c) = row[static_cast<std::size_t>(c)];
  }
  return m;
}

Matrix resolve_sigma(Run& run) {
  if (run.config.contains("sigma")) return config_matrix(run.config["sigma"], "sigma");
  const auto gen = parse_generator(require_key(run.config, "generator"));
  const double p = get_or<double>(run.config, "p", 0.0);
  const double ups = get_or<double>(run.config, "upsilon", 1.0);
  run.config["p"] = p;
  run.config["upsilon"] = ups;
  return sigma_matrix(gen.q, p, ups).sigma;
}

int cmd_simulate_ou(Run& run) {
  const Matrix sigma = resolve_sigma(run);
  const auto g = psd_sqrt(sigma);
  const auto d = sigma.rows();
  const auto m = static_cast<std::size_t>(sized(run, "M", 1, 10));
  const auto mode = get_or<std::string>(run.config, "mode", "stationary");
  run.config["mode"] = mode;

  { std::ofstream s(run.file("sigma.csv"), std::ios::binary); write_matrix(s, sigma); }
  std::ofstream out(run.file("ou.csv"), std::ios::binary);
  CsvWriter csv(out);
  const auto ys = numbered("y", static_cast<int>(d));
  if (mode == "stationary") {
    const Matrix draws = stationary_sample(g, m, run.seed);
    auto header = std::vector<std::string>{"replicate"};
    header.insert(header.end(), ys.begin(), ys.end());
    csv.header(header);
    for (Eigen::Index r = 0; r < draws.rows(); ++r) {
      csv.field(static_cast<std::int64_t>(r)).fields(draws.row(r).transpose());
      csv.end_row();
    }
    return kExitOk;
  }
  if (mode != "path") throw Error(ErrorCode::ConfigError, "mode must be \"stationary\" or \"path\"");
  const double dt = get_or<double>(run.config, "dt", 0.01);
  if (!(dt > 0.0)) throw Error(ErrorCode::ConfigError, "dt must be positive");
  run.config["dt"] = dt;
  const auto steps = static_cast<std::size_t>(sized(run, "steps", 100, 100));
  Vector y0 = Vector::Zero(d);
  if (run.config.contains("y0")) {
    const auto v = run.config["y0"].get<std::vector<double>>();
    if (static_cast<Eigen::Index>(v.size()) != d) throw Error(ErrorCode::ConfigError, "y0 has the wrong length");
    y0 = Eigen::Map<const Vector>(v.data(), d);
  }
  run.config["y0"] = std::vector<double>(y0.data(), y0.data() + d);

  std::vector<Matrix> paths(m);
  parallel_for(m, run.threads, [&](std::size_t r) {
    auto rng = make_rng(run.seed, r);
    paths[r] = ou_path(y0, dt, steps, g, rng);
  });
  auto header = std::vector<std::string>{"replicate", "step", "t"};
  header.insert(header.end(), ys.begin(), ys.end());
  csv.header(header);
  for (std::size_t r = 0; r < m; ++r) {
    for (Eigen::Index k = 0; k < paths[r].rows(); ++k) {
      csv.field(static_cast<std::uint64_t>(r)).field(static_cast<std::int64_t>(k)).field(static_cast<double>(k) * dt);
      csv.fields(paths[r].row(k).transpose());
      csv.end_row();
    }
  }
  return kExitOk;
}

Json to_json_matrix(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json to_json_vector(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

int cmd_limits(Run& run) {
  const auto gen = parse_generator(require_key(run.config, "generator"));
  const auto nu = stationary_distribution(gen.q);
  const auto h = poisson_solution(gen.q, nu);
  const double p = get_or<double>(run.config, "p", 0.0);
  const double ups = get_or<double>(run.config, "upsilon", 1.0);
  run.config["p"] = p;
  run.config["upsilon"] = ups;

  Json report;
  report["nu"] = to_json_vector(nu.nu);
  report["h"] = to_json_matrix(h.h);
  report["spectral_gap"] = spectral_gap(gen.q);
  report["kernel_spectral_gap"] = kernel_spectral_gap(gen.q);
  if (gen.q.irreducible()) {
    const auto sigma = sigma_matrix(gen.q, nu, h, p, ups).sigma;
    report["sigma"] = to_json_matrix(sigma);
    std::ofstream s(run.file("sigma.csv"), std::ios::binary);
    write_matrix(s, sigma);
  }

  if (gen.theta && run.config.contains("a")) {
    const double a = get_or<double>(run.config, "a", 1.0);
    const auto mix = dirichlet_mixture(*gen.theta, a);
    Json comps = Json::array();
    for (const auto& c : mix.components) comps.push_back(to_json_vector(c));
    report["mixture"] = {{"a", a},
                         {"weights", to_json_vector(mix.weights)},
                         {"dirichlet_parameters", comps},
                         {"marginal_parameters", to_json_vector(mix.marginal_parameters())},
                         {"marginal_mean", to_json_vector(mix.marginal_mean())},
                         {"marginal_covariance", to_json_matrix(mix.marginal_covariance())}};
    if (gen.theta->size() == 2) {
      const auto t = turnover_nonstandard((*gen.theta)[0], (*gen.theta)[1], a);
      report["turnover_nonstandard"] = {{"nu1", t.nu1}, {"w1", t.mixture->w1}, {"w2", t.mixture->w2}};
    }
    const int grid = get_or<int>(run.config, "density_grid", 40);
    if (grid < 2) throw Error(ErrorCode::ConfigError, "density_grid must be at least 2");
    run.config["density_grid"] = grid;
    const int d = mix.dim();
    auto header = numbered("x", d);
    for (const auto& n : numbered("phi", d)) header.push_back(n);
    header.push_back("marginal");
    std::ofstream s(run.file("density.csv"), std::ios::binary);
    write_matrix(s, density_table(mix, grid), header);
  }
  if (gen.theta && gen.theta->size() == 2) {
    const auto t = turnover_standard((*gen.theta)[0], (*gen.theta)[1], p, ups);
    report["turnover_standard"] = {{"nu1", t.nu1}, {"variance", *t.variance}, {"variance_pm1", *t.variance_pm1}};
  }
  write_text_file(run.file("limits.json"), report.dump(2) + "\n");
  return kExitOk;
}

int cmd_rate_fit(Run& run) {
  std::vector<double> x, d;
  if (run.config.contains("input")) {
    // Two numeric columns after a header line.
    const auto path = run.config["input"].get<std::string>();
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ConfigError, "cannot open " + path);
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::replace(line.begin(), line.end(), ',', ' ');
      std::istringstream row(line);
      double a = 0.0, b = 0.0;
      if (!(row >> a >> b)) throw Error(ErrorCode::ConfigError, "malformed row in " + path);
      x.push_back(a);
      d.push_back(b);
    }
  } else {
    x = require_key(run.config, "x").get<std::vector<double>>();
    d = require_key(run.config, "d").get<std::vector<double>>();
  }
  if (x.size() != d.size()) throw Error(ErrorCode::ConfigError, "x and d differ in length");
  const auto scale_name = get_or<std::string>(run.config, "scale", "loglog");
  run.config["scale"] = scale_name;
  RateScale scale;
  if (scale_name == "loglog") scale = RateScale::LogLog;
  else if (scale_name == "loglinear") scale = RateScale::LogLinear;
  else throw Error(ErrorCode::ConfigError, "scale must be \"loglog\" or \"loglinear\"");
  Json report = rate_fit(x, d, scale);
  write_text_file(run.file("rate_fit.json"), report.dump(2) + "\n");
  std::cout << "slope " << format_double(report["slope"].get<double>()) << "\n";
  return kExitOk;
}

int cmd_verify(Run& run, const std::string& suite) {
  VerifyOptions options;
  options.quick = run.quick;
  options.seed = run.seed;
  options.threads = run.threads;
  run.config["suite"] = suite;
  run.config["quick"] = run.quick;
  const auto results = run_suite(suite, options);
  bool ok = true;
  for (const auto& r : results) {
    std::cout << result_line(r) << "\n";
    ok = ok && r.pass;
  }
  write_text_file(run.file("verify_report.json"), to_report(results, options).dump(2) + "\n");
  return ok ? kExitOk : kExitFailedCheck;
}

void add_common(CLI::App* sub, CommonArgs& args) {
  sub->add_option("--config", args.config, "JSON config or a manifest.json from an earlier run");
  sub->add_option("--seed", args.seed, "master seed (overrides the config)")->each([&args](const std::string&) {
    args.seed_given = true;
  });
  sub->add_option("--threads", args.threads, "worker threads; outputs do not depend on it")->check(CLI::PositiveNumber);
  sub->add_option("--out", args.out, "output directory");
  sub->add_flag("--quick", args.quick, "reduced sizes");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulation and verification tools for freezing Markov chains"};
  app.require_subcommand(1);
  CommonArgs args;
  std::string suite = "all";

  struct Command {
    const char* name;
    const char* help;
  };
  const std::vector<Command> commands{
      {"simulate-chain", "simulate the freezing chain and write chain.csv"},
      {"simulate-ezz", "simulate exponential zig-zag paths and write ezz.csv"},
      {"simulate-ou", "sample the Ornstein-Uhlenbeck limit and write ou.csv"},
      {"limits", "compute nu, h, spectral gap, Sigma and mixture limits"},
      {"verify", "run named verification suites"},
      {"rate-fit", "fit a decay rate to (x, d) pairs"},
  };
  for (const auto& c : commands) {
    auto* sub = app.add_subcommand(c.name, c.help);
    add_common(sub, args);
    if (std::string_view(c.name) == "verify") sub->add_option("suite", suite, "suite name, criterion id or all");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    Run run = prepare(command, args);
    int code = kExitOk;
    if (command == "simulate-chain") code = cmd_simulate_chain(run);
    else if (command == "simulate-ezz") code = cmd_simulate_ezz(run);
    else if (command == "simulate-ou") code = cmd_simulate_ou(run);
    else if (command == "limits") code = cmd_limits(run);
    else if (command == "rate-fit") code = cmd_rate_fit(run);
    else code = cmd_verify(run, suite);
    finish(run);
    return code;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    const bool config = e.code() == ErrorCode::ConfigError || e.code() == ErrorCode::InvalidArgument;
    return config ? kExitConfig : kExitNumeric;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: ConfigError: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
}
