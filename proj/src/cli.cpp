#include "grk/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <iostream>
#include <numbers>
#include <optional>

#include <CLI11.hpp>

#include "grk/control.hpp"
#include "grk/extremal_optimizer.hpp"
#include "grk/full_space.hpp"
#include "grk/grk_parameters.hpp"
#include "grk/report.hpp"
#include "grk/sequence_search.hpp"

namespace grk {

namespace {

struct RunConfig {
  int n = 0;
  int m = 0;
  std::optional<double> K;
  double epsilon = 0.01;
  std::optional<int> max_len;
  int max_switches = 4;
  double horizon = 0.0;
  unsigned threads = 1;
  std::string output;
  std::string csv;
  int window = 2;
  std::uint64_t budget = SearchOptions{}.word_budget;
  std::int64_t k1_max = -1;
  std::int64_t k2_max = -1;
  std::uint64_t target = 0;
  std::string word;
  std::vector<double> p0;
  std::optional<double> b;
  double sample_dt = ExtremalOptions{}.sample_dt;
  double switch_tolerance = ExtremalOptions{}.switch_tolerance;
  double simplex_tolerance = OptimizerOptions{}.simplex_tolerance;
};

unsigned default_threads() {
  if (const char* env = std::getenv("GRKBENCH_THREADS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return 1;
}

int default_max_len(const DatabaseGeometry& g) {
  return static_cast<int>(std::ceil(std::numbers::pi / 4.0 * std::sqrt(static_cast<double>(g.N)))) +
         2;
}

double gamma_for(const RunConfig& c) { return gamma_from_block_count(*c.K); }

class Runner {
 public:
  Runner(const RunConfig& cfg, std::ostream& out) : cfg_(cfg), out_(out) {}

  void emit(const Json& j) {
    const std::string text = dump_json(j) + "\n";
    if (cfg_.output.empty()) {
      out_ << text;
    } else {
      write_atomic(cfg_.output, text);
    }
  }

  void grk_params() {
    if (cfg_.K && cfg_.n == 0) {
      const double K = *cfg_.K;
      emit({{"K", K},
            {"alpha", optimal_alpha(K)},
            {"eta", optimal_eta(K)},
            {"k1", nullptr},
            {"k2", nullptr},
            {"predicted_queries", nullptr}});
      return;
    }
    const DatabaseGeometry g = make_geometry(cfg_.n, cfg_.m);
    emit(to_json(iteration_counts(g, cfg_.window)));
  }

  void grk_run() {
    const DatabaseGeometry g = make_geometry(cfg_.n, cfg_.m);
    Json j = to_json(run_grk(g, cfg_.window));
    j["geometry"] = to_json(g);
    emit(j);
  }

  void brute() {
    const DatabaseGeometry g = make_geometry(cfg_.n, cfg_.m);
    SearchOptions opts;
    opts.threads = cfg_.threads;
    opts.word_budget = cfg_.budget;
    const int max_len = cfg_.max_len.value_or(default_max_len(g));
    const SearchReport report = exhaustive_search(g, max_len, cfg_.epsilon, opts);
    if (!cfg_.csv.empty()) {
      const std::int64_t range = std::max(0, max_len - 1);
      write_atomic(cfg_.csv, landscape_csv(glg_landscape(g, range, range)));
    }
    emit(to_json(report));
  }

  void glg() {
    const DatabaseGeometry g = make_geometry(cfg_.n, cfg_.m);
    const std::int64_t fallback = default_max_len(g);
    const std::int64_t k1 = cfg_.k1_max >= 0 ? cfg_.k1_max : fallback;
    const std::int64_t k2 = cfg_.k2_max >= 0 ? cfg_.k2_max : fallback;
    if (!cfg_.csv.empty()) write_atomic(cfg_.csv, landscape_csv(glg_landscape(g, k1, k2)));
    Json j = to_json(glg_scan(g, k1, k2, cfg_.epsilon));
    j["geometry"] = to_json(g);
    j["epsilon"] = cfg_.epsilon;
    emit(j);
  }

  void oracle() {
    const OperatorWord word = OperatorWord::parse(cfg_.word);
    Json j = to_json(compare_with_reduced(cfg_.n, cfg_.m, cfg_.target, word));
    j["word"] = word.to_string();
    j["target"] = cfg_.target;
    emit(j);
  }

  void control_verify() {
    const double gamma = gamma_for(cfg_);
    const GeneratorPair g = generators(gamma);
    const SwitchingBasis f = switching_basis(g);
    auto skew = [](const Eigen::Matrix3d& a) { return (a + a.transpose()).cwiseAbs().maxCoeff(); };

    Json maps = Json::array();
    const double samples[][2] = {{1.0, 1.0}, {1.0, 0.0}, {-1.0, 1.0}, {0.5, -2.0}};
    for (const auto& ab : samples) {
      const double a = ab[0];
      const double b = ab[1];
      const double tau_y = first_switch_Y(a, b);
      const PhiTriple px = phi_arc_X(a, b, gamma, first_switch_X(gamma));
      const PhiTriple py = phi_arc_Y(a, b, tau_y);
      maps.push_back({{"a", a},
                      {"b", b},
                      {"tau_x", first_switch_X(gamma)},
                      {"tau_y", tau_y},
                      {"x_image", to_json(px)},
                      {"y_image", to_json(py)}});
    }
    emit({{"K", *cfg_.K},
          {"gamma", gamma},
          {"s", g.s},
          {"c", g.c},
          {"X", to_json(g.X.matrix())},
          {"Y", to_json(g.Y.matrix())},
          {"bracket_XY", to_json(f.F2)},
          {"skew_defect",
           std::max({skew(g.X.matrix()), skew(g.Y.matrix()), skew(f.F1), skew(f.F2), skew(f.F3)})},
          {"lie_closure_residual", lie_closure_residual(gamma)},
          {"switching_map", maps},
          {"compression", to_json(compression_report(gamma, first_switch_Y(1.0, 1.0)))},
          {"endpoint", to_json(endpoint_checks(gamma, std::numbers::pi / (2.0 * g.s)))}});
  }

  void extremal() {
    const double gamma = gamma_for(cfg_);
    ExtremalOptions opts;
    opts.sample_dt = cfg_.sample_dt;
    opts.switch_tolerance = cfg_.switch_tolerance;
    const double horizon = cfg_.horizon > 0.0 ? cfg_.horizon : 6.0 * std::numbers::pi * std::sqrt(*cfg_.K);
    ExtremalTrajectory traj;
    Json j;
    if (cfg_.p0.empty()) {
      const ReducedState psi_T = ReducedState::from_components({1.0, 0.0, 0.0});
      traj = terminal_anchored_extremal(gamma, psi_T, horizon, opts);
      j["anchor"] = "terminal";
      j["anchor_note"] =
          "p(T) along the u-axis with H = 0 is a construction; the dynamics impose no costate "
          "boundary condition";
    } else {
      if (cfg_.p0.size() != 3) throw std::invalid_argument("--p0 takes three values");
      traj = simulate_extremal(gamma, continuum_initial_state(gamma),
                               {cfg_.p0[0], cfg_.p0[1], cfg_.p0[2]}, horizon, opts);
      j["anchor"] = "initial";
    }
    j["K"] = *cfg_.K;
    j["gamma"] = gamma;
    j["horizon"] = horizon;
    j["trajectory"] = to_json(traj);
    if (!cfg_.csv.empty()) write_atomic(cfg_.csv, trajectory_csv(traj));
    emit(j);
  }

  void extremal_opt() {
    const double gamma = gamma_for(cfg_);
    OptimizerOptions opts;
    opts.threads = cfg_.threads;
    opts.simplex_tolerance = cfg_.simplex_tolerance;
    const PatternComparison cmp = compare_patterns(gamma, cfg_.max_switches, opts);
    const ContinuumGrkSchedule grk = continuum_grk_schedule(*cfg_.K);
    Json j = to_json(cmp);
    j["K"] = *cfg_.K;
    j["grk_schedule"] = {{"t1", grk.t1}, {"t2", grk.t2}, {"total", grk.total()}};
    if (cfg_.b) {
      if (!(*cfg_.b > 1.0)) throw std::invalid_argument("--b must exceed 1");
      DatabaseGeometry g;
      g.b = static_cast<std::uint64_t>(*cfg_.b);
      g.theta2 = std::asin(1.0 / std::sqrt(*cfg_.b));
      Json q = Json::array();
      for (const PatternResult& r : cmp.results) {
        if (!r.feasible) continue;
        q.push_back({{"requested", pattern_to_string(r.requested)},
                     {"queries", queries_from_time(r.time, g)}});
      }
      j["queries"] = {{"b", *cfg_.b},
                      {"per_pattern", q},
                      {"grk_continuum", queries_from_time(grk.total(), g)},
                      {"final_global_step", 1}};
    }
    emit(j);
  }

 private:
  const RunConfig& cfg_;
  std::ostream& out_;
};

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  cfg.threads = default_threads();

  CLI::App app{"Partial-search workbench: GRK parameters, operator-word search, continuum control",
               "grkbench"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();

  auto add_geometry = [&](CLI::App* sub) {
    sub->add_option("--n", cfg.n, "address bits")->required()->check(CLI::Range(2, 62));
    sub->add_option("--m", cfg.m, "block address bits")->required()->check(CLI::Range(1, 61));
  };
  auto add_k = [&](CLI::App* sub) {
    sub->add_option("--k", cfg.K, "block count K")->required()->check(CLI::PositiveNumber);
  };
  auto add_output = [&](CLI::App* sub) {
    sub->add_option("--output", cfg.output, "write the JSON report here instead of stdout");
  };
  auto add_threads = [&](CLI::App* sub) {
    sub->add_option("--threads", cfg.threads, "worker threads (default GRKBENCH_THREADS or 1)")
        ->check(CLI::PositiveNumber);
  };

  auto* params = app.add_subcommand("grk-params", "closed-form GRK parameters");
  auto* pn = params->add_option("--n", cfg.n, "address bits")->check(CLI::Range(2, 62));
  auto* pm = params->add_option("--m", cfg.m, "block address bits")->check(CLI::Range(1, 61));
  auto* pk = params->add_option("--k", cfg.K, "block count K (parameters only)")
                 ->check(CLI::PositiveNumber);
  pn->needs(pm);
  pm->needs(pn);
  pk->excludes(pn)->excludes(pm);
  params->add_option("--window", cfg.window, "scan half-width around the rounded counts")
      ->check(CLI::NonNegativeNumber);
  add_output(params);

  auto* run = app.add_subcommand("grk-run", "run the GRK word in the reduced model");
  add_geometry(run);
  run->add_option("--window", cfg.window)->check(CLI::NonNegativeNumber);
  add_output(run);

  auto* brute = app.add_subcommand("brute", "exhaustive operator-word search");
  add_geometry(brute);
  brute->add_option("--max-len", cfg.max_len, "longest word (default ceil(pi/4 sqrt N) + 2)")
      ->check(CLI::NonNegativeNumber);
  brute->add_option("--epsilon", cfg.epsilon, "residual-probability threshold");
  brute->add_option("--budget", cfg.budget, "largest number of words to enumerate");
  brute->add_option("--csv", cfg.csv, "GLG residual landscape");
  add_threads(brute);
  add_output(brute);

  auto* glg = app.add_subcommand("glg-scan", "scan global^k1 local^k2 global");
  add_geometry(glg);
  glg->add_option("--k1-max", cfg.k1_max)->check(CLI::NonNegativeNumber);
  glg->add_option("--k2-max", cfg.k2_max)->check(CLI::NonNegativeNumber);
  glg->add_option("--epsilon", cfg.epsilon);
  glg->add_option("--csv", cfg.csv, "residual landscape");
  add_output(glg);

  auto* oracle = app.add_subcommand("oracle-compare", "full statevector vs reduced model");
  add_geometry(oracle);
  oracle->add_option("--target", cfg.target, "marked item");
  oracle->add_option("--word", cfg.word, "operator word over {G, L}")->required();
  add_output(oracle);

  auto* verify = app.add_subcommand("control-verify", "generator identities and arc checks");
  add_k(verify);
  add_output(verify);

  auto* ext = app.add_subcommand("extremal", "simulate one extremal");
  add_k(ext);
  ext->add_option("--horizon", cfg.horizon, "time horizon (default 6 pi / s)")
      ->check(CLI::NonNegativeNumber);
  ext->add_option("--p0", cfg.p0, "initial costate; without it the terminal anchor is used")
      ->expected(3);
  ext->add_option("--sample-dt", cfg.sample_dt)->check(CLI::PositiveNumber);
  ext->add_option("--switch-tol", cfg.switch_tolerance)->check(CLI::PositiveNumber);
  ext->add_option("--csv", cfg.csv, "trajectory samples");
  add_output(ext);

  auto* opt = app.add_subcommand("extremal-opt", "minimum-time arc patterns");
  add_k(opt);
  opt->add_option("--max-switches", cfg.max_switches)->check(CLI::Range(0, 6));
  opt->add_option("--b", cfg.b, "block size for query equivalents");
  opt->add_option("--simplex-tol", cfg.simplex_tolerance)->check(CLI::PositiveNumber);
  opt->add_flag("--json", "JSON output (the default)");
  add_threads(opt);
  add_output(opt);

  std::vector<std::string> argv_store{"grkbench"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    const auto subs = app.get_subcommands();
    err << (subs.empty() ? app.help() : subs.front()->help());
    return kExitUsage;
  }

  Runner runner(cfg, out);
  try {
    if (params->parsed()) {
      if (!cfg.K && cfg.n == 0) throw std::invalid_argument("grk-params needs --n/--m or --k");
      runner.grk_params();
    } else if (run->parsed()) {
      runner.grk_run();
    } else if (brute->parsed()) {
      runner.brute();
    } else if (glg->parsed()) {
      runner.glg();
    } else if (oracle->parsed()) {
      runner.oracle();
    } else if (verify->parsed()) {
      runner.control_verify();
    } else if (ext->parsed()) {
      runner.extremal();
    } else if (opt->parsed()) {
      runner.extremal_opt();
    }
  } catch (const BudgetExceeded& e) {
    err << dump_json({{"error", "budget"},
                      {"message", e.what()},
                      {"required_words", e.required()},
                      {"budget", e.budget()}})
        << "\n";
    return kExitBudget;
  } catch (const UnwritablePath& e) {
    err << "error: " << e.what() << "\n";
    return kExitUnwritable;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitOk;
}

int dispatch(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return dispatch(args, std::cout, std::cerr);
}

}  // namespace grk
