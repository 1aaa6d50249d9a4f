// Command-line surface for the gamma-subordinated counting model. Each
// subcommand evaluates one closed-form family (pmf, pgf, lst, survival,
// hazard, subdensity, cause), runs the samplers (simulate), or runs the
// internal cross-check suites (verify). Tables go to stdout or --out in CSV
// or JSON; everything else goes to stderr.
//
// Exit codes: 0 ok, 1 verification failure, 2 config or argument error,
// 3 series non-convergence.

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "mgcp/config.hpp"
#include "mgcp/montecarlo.hpp"
#include "mgcp/shock.hpp"
#include "mgcp/table.hpp"
#include "mgcp/timechanged.hpp"
#include "mgcp/verify.hpp"

namespace {

struct GlobalOpts {
  std::string config_path;
  std::string out_path;
  std::string format = "csv";
  std::uint64_t seed = 0;
  bool seed_given = false;
};

mgcp::RunConfig load_run_config(const GlobalOpts& g) {
  mgcp::RunConfig cfg = g.config_path.empty() ? mgcp::default_config()
                                              : mgcp::load_config(g.config_path);
  if (g.seed_given) cfg.mc.seed = g.seed;
  return cfg;
}

void emit(const mgcp::OutputTable& tbl, const GlobalOpts& g) {
  const std::string text =
      g.format == "json" ? mgcp::to_json(tbl) + "\n" : mgcp::to_csv(tbl);
  if (g.out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(g.out_path, std::ios::binary);
  if (!f) throw std::invalid_argument("cannot open output file: " + g.out_path);
  f << text;
  std::cerr << "wrote " << g.out_path << "\n";
}

// "start:stop:step" -> inclusive ascending grid.
std::vector<double> parse_grid(const std::string& spec) {
  double start = 0.0, stop = 0.0, step = 0.0;
  char tail = '\0';
  if (std::sscanf(spec.c_str(), "%lf:%lf:%lf%c", &start, &stop, &step, &tail) != 3)
    throw std::invalid_argument("grid: expected start:stop:step, got: " + spec);
  if (!(step > 0.0)) throw std::invalid_argument("grid: step must be > 0");
  if (!(stop >= start)) throw std::invalid_argument("grid: stop must be >= start");
  std::vector<double> out;
  const double fuzz = step * 1e-9;
  for (double t = start; t <= stop + fuzz; t += step)
    out.push_back(std::min(t, stop));
  return out;
}

int cmd_pmf(const GlobalOpts& g, double t, long long max_total) {
  const mgcp::RunConfig cfg = load_run_config(g);
  if (max_total < 0) throw std::invalid_argument("pmf: max-total must be >= 0");
  const int q = cfg.model.q();
  mgcp::OutputTable tbl;
  for (int i = 0; i < q; ++i) tbl.columns.push_back("n_" + std::to_string(i + 1));
  tbl.columns.push_back("probability");
  tbl.columns.push_back("tail_bound");
  double mass = 0.0, tails = 0.0;
  for (long long total = 0; total <= max_total; ++total) {
    mgcp::detail::for_each_state_with_total(
        q, total, [&](const std::vector<long long>& n) {
          const auto r = mgcp::tc_pmf(cfg.model, n, t, cfg.series);
          std::vector<mgcp::Cell> row;
          for (long long ni : n) row.emplace_back(ni);
          row.emplace_back(r.value);
          row.emplace_back(r.tail_bound);
          tbl.add_row(std::move(row));
          mass += r.value;
          tails += r.tail_bound;
        });
  }
  // Residual row: upper bound on the probability outside the enumerated box.
  std::vector<mgcp::Cell> last(static_cast<std::size_t>(q) + 1,
                               std::monostate{});
  last.push_back(std::max(0.0, 1.0 - mass + tails));
  tbl.add_row(std::move(last));
  emit(tbl, g);
  return 0;
}

int cmd_pgf(const GlobalOpts& g, double t, const std::vector<double>& u) {
  const mgcp::RunConfig cfg = load_run_config(g);
  mgcp::OutputTable tbl;
  tbl.columns.push_back("t");
  for (std::size_t i = 0; i < u.size(); ++i)
    tbl.columns.push_back("u_" + std::to_string(i + 1));
  tbl.columns.push_back("value");
  std::vector<mgcp::Cell> row{t};
  for (double ui : u) row.emplace_back(ui);
  row.emplace_back(mgcp::tc_pgf(cfg.model, u, t));
  tbl.add_row(std::move(row));
  emit(tbl, g);
  return 0;
}

int cmd_lst(const GlobalOpts& g, double t, const std::vector<double>& s) {
  const mgcp::RunConfig cfg = load_run_config(g);
  mgcp::OutputTable tbl;
  tbl.columns.push_back("t");
  for (std::size_t i = 0; i < s.size(); ++i)
    tbl.columns.push_back("s_" + std::to_string(i + 1));
  tbl.columns.push_back("value");
  std::vector<mgcp::Cell> row{t};
  for (double si : s) row.emplace_back(si);
  row.emplace_back(mgcp::sub_lst(cfg.model.sub, s, t));
  tbl.add_row(std::move(row));
  emit(tbl, g);
  return 0;
}

int cmd_survival(const GlobalOpts& g, const std::string& grid_spec,
                 const std::string& plot_script) {
  const mgcp::RunConfig cfg = load_run_config(g);
  const std::vector<double> grid = parse_grid(grid_spec);
  const mgcp::ShockModel sm{cfg.model, cfg.threshold};
  const auto curve = mgcp::survival_curve(sm, grid, cfg.series);
  mgcp::OutputTable tbl;
  tbl.columns = {"t", "survival"};
  for (const auto& [t, value] : curve) tbl.add_row({t, value});
  if (!plot_script.empty()) {
    if (g.out_path.empty() || g.format != "csv")
      throw std::invalid_argument(
          "plot-script: needs --out FILE with csv format");
    std::ofstream f(plot_script, std::ios::binary);
    if (!f)
      throw std::invalid_argument("cannot open plot script file: " + plot_script);
    f << "# gnuplot script; expects the csv written alongside it\n"
      << "set datafile separator \",\"\n"
      << "set key off\n"
      << "set xlabel \"t\"\n"
      << "set ylabel \"survival\"\n"
      << "set yrange [0:1]\n"
      << "plot \"" << g.out_path << "\" every ::1 using 1:2 with lines lw 2\n";
    std::cerr << "wrote " << plot_script << "\n";
  }
  emit(tbl, g);
  return 0;
}

int cmd_hazard(const GlobalOpts& g, const std::vector<long long>& state, int r,
               long long l, double t) {
  const mgcp::RunConfig cfg = load_run_config(g);
  const int q = cfg.model.q();
  if (r < 1 || r > q)
    throw std::invalid_argument("hazard: component r must be in 1.." +
                                std::to_string(q));
  const mgcp::ShockModel sm{cfg.model, cfg.threshold};
  const auto res = mgcp::hazard_rate(sm, state, r - 1, l, t, cfg.series);
  mgcp::OutputTable tbl;
  for (int i = 0; i < q; ++i) tbl.columns.push_back("n_" + std::to_string(i + 1));
  tbl.columns.push_back("r");
  tbl.columns.push_back("l");
  tbl.columns.push_back("t");
  tbl.columns.push_back("value");
  tbl.columns.push_back("tail_bound");
  std::vector<mgcp::Cell> row;
  for (long long ni : state) row.emplace_back(ni);
  row.emplace_back(static_cast<long long>(r));
  row.emplace_back(l);
  row.emplace_back(t);
  row.emplace_back(res.value);
  row.emplace_back(res.tail_bound);
  tbl.add_row(std::move(row));
  emit(tbl, g);
  return 0;
}

int cmd_subdensity(const GlobalOpts& g, int r, const std::vector<double>& ts) {
  const mgcp::RunConfig cfg = load_run_config(g);
  const int q = cfg.model.q();
  if (r < 1 || r > q)
    throw std::invalid_argument("subdensity: component r must be in 1.." +
                                std::to_string(q));
  const mgcp::ShockModel sm{cfg.model, cfg.threshold};
  mgcp::OutputTable tbl;
  tbl.columns = {"r", "t", "value", "tail_bound"};
  for (double t : ts) {
    const auto res = mgcp::failure_subdensity(sm, r - 1, t, cfg.series);
    tbl.add_row({static_cast<long long>(r), t, res.value, res.tail_bound});
  }
  emit(tbl, g);
  return 0;
}

int cmd_cause(const GlobalOpts& g, int r, double tol) {
  const mgcp::RunConfig cfg = load_run_config(g);
  const int q = cfg.model.q();
  if (r < 0 || r > q)
    throw std::invalid_argument("cause: component r must be in 1.." +
                                std::to_string(q) + " or 0 for all");
  const mgcp::ShockModel sm{cfg.model, cfg.threshold};
  mgcp::QuadratureControl qctl;
  qctl.abs_tol = tol;
  mgcp::SeriesControl sctl = cfg.series;
  sctl.abs_tol = std::max(sctl.abs_tol, 1e-13);
  mgcp::OutputTable tbl;
  tbl.columns = {"r", "probability", "error_estimate"};
  const int lo = r == 0 ? 1 : r, hi = r == 0 ? q : r;
  for (int i = lo; i <= hi; ++i) {
    const auto res = mgcp::cause_probability(sm, i - 1, qctl, sctl);
    tbl.add_row({static_cast<long long>(i), res.value, res.error_estimate});
  }
  emit(tbl, g);
  return 0;
}

int cmd_simulate(const GlobalOpts& g, const std::string& target, double t) {
  const mgcp::RunConfig cfg = load_run_config(g);
  const mgcp::TcModelParams& p = cfg.model;
  const int q = p.q();
  mgcp::OutputTable tbl;
  tbl.columns = {"quantity", "value", "std_err", "n", "analytic"};
  int stream = 0;
  auto next_cfg = [&] {
    mgcp::McConfig c = cfg.mc;
    c.seed = cfg.mc.seed + 7919ull * static_cast<unsigned long long>(++stream);
    return c;
  };
  auto add = [&](const std::string& name, const mgcp::McEstimate& e,
                 double analytic) {
    tbl.add_row({name, e.value, e.std_err, static_cast<long long>(e.n),
                 analytic});
  };
  if (target == "subordinator") {
    for (int i = 0; i < q; ++i) {
      const auto est = mgcp::estimate(
          [&](mgcp::Rng& rng) {
            return mgcp::sample_subordinator(p.sub, t, rng)[
                static_cast<std::size_t>(i)];
          },
          next_cfg());
      add("mean_" + std::to_string(i + 1), est, mgcp::sub_mean(p.sub, i, t));
    }
  } else if (target == "tc") {
    for (int i = 0; i < q; ++i) {
      const auto est = mgcp::estimate(
          [&](mgcp::Rng& rng) {
            return static_cast<double>(
                mgcp::sample_tc(p, t, rng)[static_cast<std::size_t>(i)]);
          },
          next_cfg());
      add("mean_" + std::to_string(i + 1), est, mgcp::tc_mean(p, i, t));
    }
  } else {
    const mgcp::ShockModel sm{p, cfg.threshold};
    sm.validate();
    const double analytic = mgcp::failure_survival(sm, t, cfg.series).value;
    // Average the threshold survival over sampled states; the thresholds
    // themselves are integrated out exactly.
    const auto est = mgcp::estimate(
        [&](mgcp::Rng& rng) {
          const auto m = mgcp::sample_tc(p, t, rng);
          double prod = 1.0;
          for (int i = 0; i < q; ++i)
            prod *= mgcp::threshold_survival(sm.threshold,
                                             m[static_cast<std::size_t>(i)]);
          return prod;
        },
        next_cfg());
    add("survival", est, analytic);
  }
  emit(tbl, g);
  return 0;
}

int cmd_verify(const GlobalOpts& g, const std::string& suite) {
  const mgcp::RunConfig cfg = load_run_config(g);
  const auto checks = mgcp::run_verification(cfg, suite);
  mgcp::OutputTable tbl;
  tbl.columns = {"suite", "check", "observed", "tolerance", "result", "note"};
  for (const auto& c : checks) {
    tbl.add_row({c.suite, c.name, c.observed, c.tolerance,
                 std::string(c.pass ? "pass" : "fail"), c.note});
    std::cerr << (c.pass ? "[pass] " : "[FAIL] ") << c.suite << ": " << c.name
              << " (observed " << c.observed << ", tolerance " << c.tolerance
              << ")\n";
  }
  emit(tbl, g);
  return mgcp::all_passed(checks) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "evaluators, samplers, and cross-checks for a multivariate counting "
      "process on a shared randomized gamma clock"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--config", g.config_path,
                 "JSON config file; omitted means the built-in two-component "
                 "default model");
  app.add_option("--out", g.out_path, "write the table here instead of stdout");
  app.add_option("--format", g.format, "table format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  auto* seed_opt =
      app.add_option("--seed", g.seed, "override the config sampling seed");

  std::function<int()> action;

  double pmf_t = 1.0;
  long long pmf_max_total = 12;
  auto* c_pmf = app.add_subcommand(
      "pmf", "joint state probabilities over the box of states with bounded "
             "total, plus a residual-mass row");
  c_pmf->fallthrough();
  c_pmf->add_option("--t", pmf_t, "evaluation time")->capture_default_str();
  c_pmf->add_option("--max-total", pmf_max_total,
                    "largest enumerated state total")
      ->capture_default_str();
  c_pmf->callback([&] { action = [&] { return cmd_pmf(g, pmf_t, pmf_max_total); }; });

  double pgf_t = 1.0;
  std::vector<double> pgf_u;
  auto* c_pgf = app.add_subcommand("pgf", "probability generating function");
  c_pgf->fallthrough();
  c_pgf->add_option("--t", pgf_t, "evaluation time")->capture_default_str();
  c_pgf->add_option("--u", pgf_u, "argument vector, e.g. 0.3,0.7")
      ->required()
      ->delimiter(',');
  c_pgf->callback([&] { action = [&] { return cmd_pgf(g, pgf_t, pgf_u); }; });

  double lst_t = 1.0;
  std::vector<double> lst_s;
  auto* c_lst =
      app.add_subcommand("lst", "joint clock Laplace-Stieltjes transform");
  c_lst->fallthrough();
  c_lst->add_option("--t", lst_t, "evaluation time")->capture_default_str();
  c_lst->add_option("--s", lst_s, "argument vector, e.g. 0.5,1.0")
      ->required()
      ->delimiter(',');
  c_lst->callback([&] { action = [&] { return cmd_lst(g, lst_t, lst_s); }; });

  std::string surv_grid = "0:5:0.1";
  std::string surv_plot;
  auto* c_surv =
      app.add_subcommand("survival", "system survival function on a time grid");
  c_surv->fallthrough();
  c_surv->add_option("--grid", surv_grid, "time grid start:stop:step")
      ->capture_default_str();
  c_surv->add_option("--plot-script", surv_plot,
                     "also write a gnuplot script for the csv output");
  c_surv->callback(
      [&] { action = [&] { return cmd_survival(g, surv_grid, surv_plot); }; });

  std::vector<long long> haz_state;
  int haz_r = 1;
  long long haz_l = 1;
  double haz_t = 1.0;
  auto* c_haz = app.add_subcommand(
      "hazard", "conditional rate of a size-l jump in component r");
  c_haz->fallthrough();
  c_haz->add_option("--state", haz_state, "current state, e.g. 1,2")
      ->required()
      ->delimiter(',');
  c_haz->add_option("--r", haz_r, "component, 1-based")->required();
  c_haz->add_option("--l", haz_l, "jump size")->required();
  c_haz->add_option("--t", haz_t, "evaluation time")->capture_default_str();
  c_haz->callback([&] {
    action = [&] { return cmd_hazard(g, haz_state, haz_r, haz_l, haz_t); };
  });

  int sub_r = 1;
  std::vector<double> sub_ts{1.0};
  auto* c_sub = app.add_subcommand(
      "subdensity", "failure sub-density credited to component r");
  c_sub->fallthrough();
  c_sub->add_option("--r", sub_r, "component, 1-based")->required();
  c_sub->add_option("--t", sub_ts, "evaluation times, e.g. 0.5,1,2")
      ->delimiter(',')
      ->capture_default_str();
  c_sub->callback([&] { action = [&] { return cmd_subdensity(g, sub_r, sub_ts); }; });

  int cause_r = 0;
  double cause_tol = 3e-8;
  auto* c_cause = app.add_subcommand(
      "cause", "probability that component r causes the failure");
  c_cause->fallthrough();
  c_cause->add_option("--r", cause_r, "component, 1-based; 0 means all")
      ->capture_default_str();
  c_cause->add_option("--tol", cause_tol,
                      "absolute integration tolerance")
      ->capture_default_str();
  c_cause->callback([&] { action = [&] { return cmd_cause(g, cause_r, cause_tol); }; });

  std::string sim_target;
  double sim_t = 1.0;
  auto* c_sim = app.add_subcommand("simulate", "Monte Carlo estimates");
  c_sim->fallthrough();
  c_sim->add_option("--target", sim_target, "what to sample")
      ->required()
      ->check(CLI::IsMember({"subordinator", "tc", "survival"}));
  c_sim->add_option("--t", sim_t, "evaluation time")->capture_default_str();
  c_sim->callback([&] { action = [&] { return cmd_simulate(g, sim_target, sim_t); }; });

  std::string verify_suite = "all";
  auto* c_verify =
      app.add_subcommand("verify", "run the internal cross-check suites");
  c_verify->fallthrough();
  c_verify->add_option("--suite", verify_suite, "which suite to run")
      ->check(CLI::IsMember({"all", "analytic", "mc", "pde", "shock"}))
      ->capture_default_str();
  c_verify->callback([&] { action = [&] { return cmd_verify(g, verify_suite); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  g.seed_given = seed_opt->count() > 0;

  try {
    return action();
  } catch (const mgcp::SeriesNonConvergence& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
