#include "postprice/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "postprice/bounds.hpp"
#include "postprice/config.hpp"
#include "postprice/offline.hpp"
#include "postprice/optimize.hpp"
#include "postprice/paper_suite.hpp"
#include "postprice/schedule.hpp"
#include "postprice/sim.hpp"

namespace postprice {

namespace {

struct Flags {
  std::string config;
  bool csv = false;
  bool dump = false;
  std::optional<double> lambda;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> horizon;
  std::optional<int> reps;
  std::size_t grid = 1024;
  std::string scheme = "flat";
  std::string price;
  std::string filter;
  double tolerance = 1e-9;
  std::string trace_in;
  std::string trace_out;
};

// Raised for bad flag combinations; reported like config errors.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string g(double x, int digits = 10) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

std::string csvnum(double x) { return g(x, 17); }

std::string list(std::span<const double> v, int digits = 10) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + g(v[i], digits);
  return s + "]";
}

std::string describe(const PriceSchedule& schedule) {
  return std::visit(
      [](const auto& s) -> std::string {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, FlatPrice>) {
          return "flat " + g(s.price);
        } else if constexpr (std::is_same_v<S, PerServerPerLengthPrices>) {
          std::string out = "per_server_per_length [";
          for (std::size_t j = 0; j < s.prices.size(); ++j) out += (j ? ", " : "") + list(s.prices[j]);
          return out + "]";
        } else {
          return shape_name(s) + " " + list(s.prices);
        }
      },
      schedule);
}

// Flattened price vector: one entry per length, then per server.
std::vector<double> flat_prices(const PriceSchedule& schedule) {
  return std::visit(
      [](const auto& s) -> std::vector<double> {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, FlatPrice>) {
          return {s.price};
        } else if constexpr (std::is_same_v<S, PerServerPerLengthPrices>) {
          std::vector<double> out;
          for (const auto& row : s.prices) out.insert(out.end(), row.begin(), row.end());
          return out;
        } else {
          return s.prices;
        }
      },
      schedule);
}

const char* model_name(const ModelConfig& model) {
  switch (model.index()) {
    case 0:
      return "job_mix";
    case 1:
      return "fleet";
    case 2:
      return "classes";
    default:
      return "fleet_classes";
  }
}

InstanceConfig load(const Flags& f) {
  InstanceConfig c = load_config(f.config);
  if (f.lambda) {
    if (!(*f.lambda >= 0.0 && *f.lambda <= 1.0)) throw UsageError("--lambda must lie in [0,1]");
    c.lambda = *f.lambda;
  }
  if (f.seed) c.sim.seed = *f.seed;
  if (f.horizon) {
    c.sim.horizon = *f.horizon;
    if (c.sim.warmup && *c.sim.warmup >= c.sim.horizon) c.sim.warmup.reset();
  }
  if (f.reps) c.sim.replications = *f.reps;
  try {
    c.sim.validate(c.max_length());
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return c;
}

std::optional<double> numeric_price(const std::string& text) {
  if (text.empty()) return std::nullopt;
  std::size_t used = 0;
  double p = 0.0;
  try {
    p = std::stod(text, &used);
  } catch (const std::exception&) {
    throw UsageError("--price expects a number or half-opt, got '" + text + "'");
  }
  if (used != text.size() || !(p >= 0.0) || !std::isfinite(p))
    throw UsageError("--price expects a nonnegative number or half-opt, got '" + text + "'");
  return p;
}

PriceSchedule schedule_for(const InstanceConfig& c, const Flags& f) {
  if (f.price != "half-opt")
    if (auto p = numeric_price(f.price)) return FlatPrice{*p};
  if (!c.schedule) throw ConfigError("schedule", 0, "this command needs a schedule section or --price");
  return *c.schedule;
}

SteadyStateMetrics closed_form(const InstanceConfig& c, const PriceSchedule& schedule) {
  return std::visit(
      [&](const auto& m) -> SteadyStateMetrics {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, JobMix> || std::is_same_v<M, Fleet>) {
          return evaluate(m, c.value_law(), schedule);
        } else if constexpr (std::is_same_v<M, CorrelatedClassList>) {
          if (const auto* flat = std::get_if<FlatPrice>(&schedule)) return correlated_flat_metrics(m, flat->price);
          return correlated_metrics(m, std::get<PerLengthPrices>(schedule).prices);
        } else {
          const double p = std::get<FlatPrice>(schedule).price;
          SteadyStateMetrics total;
          for (const auto& s : m) {
            const auto one = correlated_flat_metrics(s, p);
            total.welfare_per_step += one.welfare_per_step;
            total.revenue_per_step += one.revenue_per_step;
            total.occupancy += one.occupancy / static_cast<double>(m.size());
            total.accept_prob.insert(total.accept_prob.end(), one.accept_prob.begin(), one.accept_prob.end());
          }
          return total;
        }
      },
      c.model);
}

void check_schedule_fits(const InstanceConfig& c, const PriceSchedule& schedule) {
  if (std::holds_alternative<std::vector<CorrelatedClassList>>(c.model) &&
      !std::holds_alternative<FlatPrice>(schedule))
    throw UsageError("a fleet of correlated servers takes a flat price");
  if (const auto* m = std::get_if<CorrelatedClassList>(&c.model)) {
    const auto* per = std::get_if<PerLengthPrices>(&schedule);
    if (!std::holds_alternative<FlatPrice>(schedule) && !(per && per->prices.size() == m->size()))
      throw UsageError("correlated classes take a flat price or one price per class");
  }
}

// ---------------------------------------------------------------- evaluate

int cmd_evaluate(const Flags& f, std::ostream& out) {
  const auto c = load(f);
  const auto schedule = schedule_for(c, f);
  check_schedule_fits(c, schedule);
  const auto m = closed_form(c, schedule);
  const Objective objective(c.lambda);
  const double value = objective(m);
  const char* primary = c.lambda == 1.0 ? "welfare" : c.lambda == 0.0 ? "revenue" : "mixed";
  if (f.csv) {
    out << "objective,lambda,welfare,revenue,occupancy\n"
        << csvnum(value) << ',' << csvnum(c.lambda) << ',' << csvnum(m.welfare_per_step) << ','
        << csvnum(m.revenue_per_step) << ',' << csvnum(m.occupancy) << '\n';
    return exit_ok;
  }
  out << "model      " << model_name(c.model) << "\n"
      << "schedule   " << describe(schedule) << "\n"
      << "objective  " << g(value, 12) << "  (" << primary << ", lambda=" << g(c.lambda) << ")\n"
      << "welfare    " << g(m.welfare_per_step, 12) << "\n"
      << "revenue    " << g(m.revenue_per_step, 12) << "\n"
      << "occupancy  " << g(m.occupancy, 12) << "\n"
      << "accept     " << list(m.accept_prob, 6) << "\n";
  return exit_ok;
}

// ---------------------------------------------------------------- optimize

int cmd_optimize(const Flags& f, std::ostream& out) {
  const auto c = load(f);
  const Objective objective(c.lambda);
  SearchOptions options;
  options.grid_points = f.grid;
  options.seed = c.sim.seed;

  OptimizationResult result;
  std::optional<SinglePriceChoice> single;
  if (const auto* mix = std::get_if<JobMix>(&c.model)) {
    const auto dist = c.value_law();
    if (f.scheme == "flat") {
      result = optimize_flat(*mix, dist, objective, options);
    } else if (f.scheme == "multi") {
      result = optimize_multi(*mix, dist, objective, options);
      single = best_single_from_multi(*mix, dist, resolve_prices(result.schedule, *mix), objective);
    } else {
      throw UsageError("scheme " + f.scheme + " needs a fleet model; use flat or multi");
    }
  } else if (const auto* fleet = std::get_if<Fleet>(&c.model)) {
    const auto dist = c.value_law();
    FleetScheme scheme;
    if (f.scheme == "flat") scheme = FleetScheme::flat;
    else if (f.scheme == "per-server") scheme = FleetScheme::per_server;
    else if (f.scheme == "per-server-per-length") scheme = FleetScheme::per_server_per_length;
    else throw UsageError("scheme " + f.scheme + " does not apply to fleets; use flat, per-server or per-server-per-length");
    result = optimize_fleet(*fleet, dist, objective, scheme, options);
  } else {
    throw UsageError("optimize works on job_mix and fleet models; use offline for correlated classes");
  }

  const auto prices = flat_prices(result.schedule);
  if (f.csv) {
    out << "index,price,objective,lambda,global,single_ratio\n";
    for (std::size_t i = 0; i < prices.size(); ++i)
      out << i << ',' << csvnum(prices[i]) << ',' << csvnum(result.objective_value) << ',' << csvnum(c.lambda) << ','
          << (result.global ? 1 : 0) << ',' << csvnum(single ? single->ratio : 1.0) << '\n';
    return exit_ok;
  }
  out << "prices     " << list(prices, 12) << "\n"
      << "objective  " << g(result.objective_value, 12) << "  (lambda=" << g(c.lambda) << ")\n"
      << "method     " << method_name(result.method) << (result.global ? " (global)" : " (local optimum)") << "\n";
  if (single)
    out << "single     price " << g(single->price, 12) << " (length index " << single->index << "), value "
        << g(single->flat_value, 12) << ", ratio " << g(single->ratio, 12) << "\n";
  return exit_ok;
}

// ---------------------------------------------------------------- bounds

void bound_row(std::ostream& out, bool csv, const std::string& name, double value, const std::string& witness = "") {
  if (csv) out << name << ',' << csvnum(value) << '\n';
  else out << name << std::string(name.size() < 14 ? 14 - name.size() : 1, ' ') << g(value, 12)
           << (witness.empty() ? "" : "  at B = " + witness) << "\n";
}

int cmd_bounds(const Flags& f, std::ostream& out) {
  const auto c = load(f);
  if (f.csv) out << "bound,value\n";
  if (const auto* mix = std::get_if<JobMix>(&c.model)) {
    if (mix->size() == 2 && mix->lengths()[0] < mix->lengths()[1]) {
      bound_row(out, f.csv, "rho", rho(mix->lengths()[0], mix->lengths()[1], mix->probs()[0], mix->probs()[1]));
      bound_row(out, f.csv, "fixed-prob", fixed_prob_bound(mix->probs()[0]).value);
    }
    const auto h = h_corner_min(*mix);
    bound_row(out, f.csv, "h-corner-min", h.value, h.witness ? list(*h.witness, 3) : "");
    if (f.csv && h.witness)
      for (std::size_t i = 0; i < h.witness->size(); ++i)
        bound_row(out, true, "witness" + std::to_string(i), (*h.witness)[i]);
  } else if (const auto* fleet = std::get_if<Fleet>(&c.model)) {
    bound_row(out, f.csv, "harmonic", 1.0 / harmonic_number(fleet->size()));
    if (fleet->mode() == FleetMode::equal_r) {
      const auto b = fleet_bound(*fleet);
      bound_row(out, f.csv, "fleet", b.value);
      bound_row(out, f.csv, "composed", composed_bound(*fleet).value);
    } else {
      bound_row(out, f.csv, "one-length", one_length_fleet_bound(*fleet).value);
    }
  } else {
    bound_row(out, f.csv, "half-opt", 0.5);
  }
  return exit_ok;
}

// ---------------------------------------------------------------- simulate

void sim_table(std::ostream& out, const SimResult& r, const std::optional<SteadyStateMetrics>& exact) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-10s %-14s %-12s %-14s %-14s %-14s %s\n", "metric", "mean", "se", "ci_low",
                "ci_high", "closed_form", "z");
  out << buf;
  const auto row = [&](const char* name, const Estimate& e, std::optional<double> cf) {
    std::string z = "-";
    std::string cfs = "-";
    if (cf) {
      cfs = g(*cf, 10);
      z = e.se > 0 ? g((e.mean - *cf) / e.se, 3) : (e.mean == *cf ? "0" : "inf");
    }
    std::snprintf(buf, sizeof buf, "%-10s %-14.10g %-12.4g %-14.10g %-14.10g %-14s %s\n", name, e.mean, e.se,
                  e.ci_low, e.ci_high, cfs.c_str(), z.c_str());
    out << buf;
  };
  row("welfare", r.welfare, exact ? std::optional(exact->welfare_per_step) : std::nullopt);
  row("revenue", r.revenue, exact ? std::optional(exact->revenue_per_step) : std::nullopt);
  row("occupancy", r.occupancy, exact ? std::optional(exact->occupancy) : std::nullopt);
  out << "accept    ";
  for (std::size_t k = 0; k < r.accepted.size(); ++k) {
    const double rate = r.free_arrivals[k] ? static_cast<double>(r.accepted[k]) / r.free_arrivals[k] : 0.0;
    out << ' ' << g(rate, 6);
  }
  out << "\n";
  if (r.batch_means) out << "(single replication: batch-means standard errors)\n";
}

int cmd_simulate(const Flags& f, std::ostream& out) {
  const auto c = load(f);
  if (f.price == "half-opt") {
    if (const auto* classes = std::get_if<CorrelatedClassList>(&c.model)) {
      const auto lp = expected_lp(*classes);
      const double p = lp.opt / 2.0;
      const auto r = simulate(*classes, FlatPrice{p}, c.sim);
      const bool ok = r.welfare.mean >= 0.5 * lp.opt - 3.0 * r.welfare.se;
      if (f.csv) {
        write_csv(out, r);
        return ok ? exit_ok : exit_failure;
      }
      const double ratio = lp.opt > 0 ? r.welfare.mean / lp.opt : 1.0;
      out << "opt        " << g(lp.opt, 12) << "\n"
          << "price      " << g(p, 12) << "\n"
          << "welfare    " << g(r.welfare.mean, 12) << " +- " << g(1.96 * r.welfare.se, 4) << "\n"
          << "ratio      " << g(ratio, 6) << (ok ? "  >= 0.5 (within 3 se): yes" : "  >= 0.5 (within 3 se): NO")
          << "\n";
      return ok ? exit_ok : exit_failure;
    }
    if (const auto* servers = std::get_if<std::vector<CorrelatedClassList>>(&c.model)) {
      const auto choice = fleet_half_opt_prices(*servers, c.sim);
      const auto& best = choice.candidates[choice.chosen].sim;
      const double guarantee = choice.total_opt / (2.0 * harmonic_number(servers->size()));
      const bool ok = best.welfare.mean >= guarantee - 3.0 * best.welfare.se;
      if (f.csv) {
        write_csv(out, best);
        return ok ? exit_ok : exit_failure;
      }
      for (const auto& cand : choice.candidates)
        out << "server " << cand.server << "   opt " << g(cand.opt, 10) << "  price " << g(cand.price, 10)
            << "  fleet welfare " << g(cand.sim.welfare.mean, 10) << "\n";
      out << "chosen     price " << g(choice.price, 12) << " (server " << choice.chosen << ")\n"
          << "guarantee  " << g(guarantee, 12) << "  (sum Opt / 2H_n)\n"
          << "met        " << (ok ? "yes" : "NO") << "\n";
      return ok ? exit_ok : exit_failure;
    }
    throw UsageError("--price half-opt needs a classes or fleet_classes model");
  }

  const auto schedule = schedule_for(c, f);
  check_schedule_fits(c, schedule);
  const SimResult r = std::visit(
      [&](const auto& m) -> SimResult {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, JobMix> || std::is_same_v<M, Fleet>) {
          return simulate(m, c.value_law(), schedule, c.sim);
        } else if constexpr (std::is_same_v<M, CorrelatedClassList>) {
          return simulate(m, schedule, c.sim);
        } else {
          return simulate(std::span<const CorrelatedClassList>(m), std::get<FlatPrice>(schedule).price, c.sim);
        }
      },
      c.model);
  if (f.csv) {
    write_csv(out, r);
    return exit_ok;
  }
  out << "schedule   " << describe(schedule) << "\n"
      << "horizon " << c.sim.horizon << ", warmup " << c.sim.warmup_steps() << ", replications "
      << c.sim.replications << ", seed " << c.sim.seed << "\n";
  sim_table(out, r, closed_form(c, schedule));
  return exit_ok;
}

// ---------------------------------------------------------------- offline

int cmd_offline(const Flags& f, std::ostream& out) {
  const auto c = load(f);
  const auto* classes = std::get_if<CorrelatedClassList>(&c.model);
  if (!classes) throw UsageError("offline needs a classes model");
  const auto lp = expected_lp(*classes);

  std::vector<Arrival> trace;
  if (!f.trace_in.empty()) {
    std::ifstream in(f.trace_in);
    if (!in) throw UsageError("cannot open trace " + f.trace_in);
    trace = read_trace(in);
  } else {
    auto rng = seeded_streams(c.sim.seed, 1);
    trace = sample_trace(*classes, c.sim.horizon, rng.front());
  }
  if (!f.trace_out.empty()) {
    std::ofstream o(f.trace_out);
    if (!o) throw UsageError("cannot write trace " + f.trace_out);
    write_trace(o, trace);
  }
  const double dp = offline_dp_oracle(trace, c.sim.horizon);

  if (f.csv) {
    out << "quantity,value\n"
        << "opt," << csvnum(lp.opt) << "\nhalf_opt_price," << csvnum(lp.opt / 2.0) << "\ndp_per_step," << csvnum(dp)
        << '\n';
    for (std::size_t j = 0; j < lp.x.size(); ++j) out << 'x' << j << ',' << csvnum(lp.x[j]) << '\n';
    return exit_ok;
  }
  out << "opt        " << g(lp.opt, 12) << "  (expected LP)\n"
      << "x          " << list(lp.x, 8) << "\n"
      << "half-opt   " << g(lp.opt / 2.0, 12) << "\n"
      << "offline    " << g(dp, 12) << "  per step over " << c.sim.horizon << " steps ("
      << (lp.opt > 0 ? g(dp / lp.opt, 6) : std::string("-")) << " of opt)\n";
  return exit_ok;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Posted-price welfare and revenue for servers with multi-step jobs", "postprice"};
  app.require_subcommand(1);
  Flags f;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("config", f.config, "Instance config (YAML)")->required();
    sub->add_flag("--csv", f.csv, "Emit CSV instead of a table");
    sub->add_flag("--dump-config", f.dump, "Print the parsed config and exit");
    sub->add_option("--lambda", f.lambda, "Objective weight on welfare, in [0,1]");
    sub->add_option("--seed", f.seed, "Seed for all randomness");
    sub->add_option("--horizon", f.horizon, "Simulation horizon in steps")->check(CLI::PositiveNumber);
    sub->add_option("--reps", f.reps, "Simulation replications")->check(CLI::PositiveNumber);
  };

  auto* evaluate_cmd = app.add_subcommand("evaluate", "Closed-form welfare, revenue and occupancy");
  add_common(evaluate_cmd);
  evaluate_cmd->add_option("--price", f.price, "Flat price overriding the schedule");

  auto* optimize_cmd = app.add_subcommand("optimize", "Search for optimal prices");
  add_common(optimize_cmd);
  optimize_cmd->add_option("--scheme", f.scheme, "flat, multi, per-server or per-server-per-length")
      ->check(CLI::IsMember({"flat", "multi", "per-server", "per-server-per-length"}));
  optimize_cmd->add_option("--grid", f.grid, "Price grid size for continuous laws")->check(CLI::Range(2, 10'000'000));

  auto* bounds_cmd = app.add_subcommand("bounds", "Approximation ratio bounds");
  add_common(bounds_cmd);

  auto* simulate_cmd = app.add_subcommand("simulate", "Monte Carlo simulation against the closed form");
  add_common(simulate_cmd);
  simulate_cmd->add_option("--price", f.price, "Flat price, or half-opt for correlated models");

  auto* offline_cmd = app.add_subcommand("offline", "Expected LP bound and offline optimum on a sampled trace");
  add_common(offline_cmd);
  offline_cmd->add_option("--trace-in", f.trace_in, "Replay a trace file instead of sampling");
  offline_cmd->add_option("--trace-out", f.trace_out, "Write the trace used");

  auto* suite_cmd = app.add_subcommand("paper-suite", "Check every reference value");
  suite_cmd->add_option("--filter", f.filter, "Only checks in this group or with this name prefix");
  suite_cmd->add_option("--tolerance", f.tolerance, "Closed-form tolerance")->check(CLI::NonNegativeNumber);
  suite_cmd->add_option("--seed", f.seed, "Seed for the simulated checks");
  suite_cmd->add_flag("--csv", f.csv, "Emit CSV");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return exit_config;
  }

  try {
    if (suite_cmd->parsed()) {
      SuiteOptions options;
      options.filter = f.filter;
      options.tolerance = f.tolerance;
      if (f.seed) options.seed = *f.seed;
      const auto checks = run_paper_suite(options);
      if (checks.empty()) {
        err << "error: no checks match filter '" << f.filter << "'\n";
        return exit_failure;
      }
      print_suite(out, checks, f.csv);
      return std::all_of(checks.begin(), checks.end(), [](const SuiteCheck& c) { return c.pass; }) ? exit_ok
                                                                                                    : exit_failure;
    }
    if (f.dump) {
      out << dump_config(load(f));
      return exit_ok;
    }
    if (evaluate_cmd->parsed()) return cmd_evaluate(f, out);
    if (optimize_cmd->parsed()) return cmd_optimize(f, out);
    if (bounds_cmd->parsed()) return cmd_bounds(f, out);
    if (simulate_cmd->parsed()) return cmd_simulate(f, out);
    if (offline_cmd->parsed()) return cmd_offline(f, out);
  } catch (const ConfigError& e) {
    err << e.what() << "\n";
    return exit_config;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return exit_config;
  } catch (const CapacityError& e) {
    err << "error: " << e.what() << "\n";
    return exit_failure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_failure;
  }
  return exit_failure;
}

}  // namespace postprice
