#include "postprice/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <sstream>

namespace postprice {

namespace {

int line_of(const YAML::Node& n) {
  const auto mark = n.Mark();
  return mark.line >= 0 ? mark.line + 1 : 0;
}

[[noreturn]] void fail(const std::string& path, const YAML::Node& n, const std::string& message) {
  throw ConfigError(path, line_of(n), message);
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
std::string index(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

void expect_map(const YAML::Node& n, const std::string& path) {
  if (!n.IsMap()) fail(path, n, "expected a mapping");
}

void expect_keys(const YAML::Node& n, const std::string& path, std::initializer_list<const char*> allowed) {
  expect_map(n, path);
  for (const auto& kv : n) {
    const auto key = kv.first.as<std::string>();
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
      fail(join(path, key), kv.first, "unknown key");
  }
}

YAML::Node require(const YAML::Node& n, const std::string& path, const char* key) {
  const YAML::Node child = n[key];
  if (!child) fail(join(path, key), n, "missing required key");
  return child;
}

double real(const YAML::Node& n, const std::string& path) {
  if (!n.IsScalar()) fail(path, n, "expected a number");
  try {
    const double v = n.as<double>();
    if (!std::isfinite(v)) fail(path, n, "must be finite");
    return v;
  } catch (const YAML::BadConversion&) {
    fail(path, n, "expected a number, got '" + n.Scalar() + "'");
  }
}

long long integer(const YAML::Node& n, const std::string& path) {
  if (!n.IsScalar()) fail(path, n, "expected an integer");
  try {
    return n.as<long long>();
  } catch (const YAML::BadConversion&) {
    fail(path, n, "expected an integer, got '" + n.Scalar() + "'");
  }
}

std::vector<double> reals(const YAML::Node& n, const std::string& path) {
  if (!n.IsSequence()) fail(path, n, "expected a list of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < n.size(); ++i) out.push_back(real(n[i], index(path, i)));
  return out;
}

// Checks the pieces of a job mix one key at a time so errors name the field.
JobMix parse_mix(const YAML::Node& n, const std::string& path) {
  expect_keys(n, path, {"lengths", "probs"});
  const auto lengths_node = require(n, path, "lengths");
  const auto probs_node = require(n, path, "probs");
  const std::string lpath = join(path, "lengths");
  const std::string ppath = join(path, "probs");
  if (!lengths_node.IsSequence() || lengths_node.size() == 0) fail(lpath, lengths_node, "expected a nonempty list");
  std::vector<int> lengths;
  for (std::size_t i = 0; i < lengths_node.size(); ++i) {
    const auto v = integer(lengths_node[i], index(lpath, i));
    if (v < 1 || v > 1'000'000'000) fail(index(lpath, i), lengths_node[i], "length must be a positive integer");
    if (!lengths.empty() && v < lengths.back()) fail(index(lpath, i), lengths_node[i], "lengths must be ascending");
    lengths.push_back(static_cast<int>(v));
  }
  const auto probs = reals(probs_node, ppath);
  if (probs.size() != lengths.size())
    fail(ppath, probs_node,
         "expected " + std::to_string(lengths.size()) + " probabilities, got " + std::to_string(probs.size()));
  double total = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (!(probs[i] > 0.0 && probs[i] <= 1.0)) fail(index(ppath, i), probs_node[i], "probability must lie in (0,1]");
    total += probs[i];
  }
  if (total > 1.0 + 1e-12) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "probabilities sum to %.6g > 1", total);
    fail(ppath, probs_node, buf);
  }
  try {
    return JobMix(std::move(lengths), probs);
  } catch (const std::invalid_argument& e) {
    fail(path, n, e.what());
  }
}

Fleet parse_fleet(const YAML::Node& n, const std::string& path) {
  expect_keys(n, path, {"mode", "servers"});
  const auto mode_node = require(n, path, "mode");
  const auto mode_name = mode_node.as<std::string>();
  FleetMode mode;
  if (mode_name == "equal_r") mode = FleetMode::equal_r;
  else if (mode_name == "shared_length") mode = FleetMode::shared_length;
  else fail(join(path, "mode"), mode_node, "expected equal_r or shared_length");
  const auto servers_node = require(n, path, "servers");
  const std::string spath = join(path, "servers");
  if (!servers_node.IsSequence() || servers_node.size() == 0) fail(spath, servers_node, "expected a nonempty list");
  std::vector<JobMix> servers;
  for (std::size_t i = 0; i < servers_node.size(); ++i) servers.push_back(parse_mix(servers_node[i], index(spath, i)));
  try {
    return Fleet(std::move(servers), mode);
  } catch (const std::invalid_argument& e) {
    fail(spath, servers_node, e.what());
  }
}

DistributionSpec parse_distribution(const YAML::Node& n, const std::string& path) {
  expect_map(n, path);
  const auto kind_node = require(n, path, "kind");
  const auto kind = kind_node.as<std::string>();
  DistributionSpec spec;
  if (kind == "discrete") {
    expect_keys(n, path, {"kind", "atoms"});
    spec.kind = ValueDistribution::Kind::discrete;
    const auto atoms = require(n, path, "atoms");
    const std::string apath = join(path, "atoms");
    if (!atoms.IsSequence() || atoms.size() == 0) fail(apath, atoms, "expected a nonempty list");
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      const std::string at = index(apath, i);
      expect_keys(atoms[i], at, {"value", "weight"});
      spec.atoms.push_back({real(require(atoms[i], at, "value"), join(at, "value")),
                            real(require(atoms[i], at, "weight"), join(at, "weight"))});
    }
  } else if (kind == "uniform") {
    expect_keys(n, path, {"kind", "lo", "hi"});
    spec.kind = ValueDistribution::Kind::uniform;
    spec.lo = real(require(n, path, "lo"), join(path, "lo"));
    spec.hi = real(require(n, path, "hi"), join(path, "hi"));
  } else if (kind == "piecewise_linear") {
    expect_keys(n, path, {"kind", "breakpoints"});
    spec.kind = ValueDistribution::Kind::piecewise_linear;
    const auto pts = require(n, path, "breakpoints");
    const std::string bpath = join(path, "breakpoints");
    if (!pts.IsSequence()) fail(bpath, pts, "expected a list");
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const std::string at = index(bpath, i);
      expect_keys(pts[i], at, {"x", "density"});
      spec.breakpoints.push_back({real(require(pts[i], at, "x"), join(at, "x")),
                                  real(require(pts[i], at, "density"), join(at, "density"))});
    }
  } else {
    fail(join(path, "kind"), kind_node, "expected discrete, uniform or piecewise_linear");
  }
  try {
    (void)spec.build();
  } catch (const std::invalid_argument& e) {
    fail(path, n, e.what());
  }
  return spec;
}

CorrelatedClassList parse_classes(const YAML::Node& n, const std::string& path,
                                  const std::optional<DistributionSpec>& dist, std::size_t points) {
  if (!n.IsSequence() || n.size() == 0) fail(path, n, "expected a nonempty list of classes");
  std::vector<JobClass> classes;
  for (std::size_t i = 0; i < n.size(); ++i) {
    const std::string at = index(path, i);
    expect_keys(n[i], at, {"rate", "length", "value"});
    const double rate = real(require(n[i], at, "rate"), join(at, "rate"));
    const auto len = integer(require(n[i], at, "length"), join(at, "length"));
    if (len < 1 || len > 1'000'000'000) fail(join(at, "length"), n[i]["length"], "length must be a positive integer");
    if (n[i]["value"]) {
      classes.push_back({rate, static_cast<int>(len), real(n[i]["value"], join(at, "value"))});
    } else {
      if (!dist) fail(join(at, "value"), n[i], "no value given and no distribution section to discretize");
      if (!(rate > 0.0 && rate <= 1.0)) fail(join(at, "rate"), n[i]["rate"], "rate must lie in (0,1]");
      for (const auto& c : discretize_class(rate, static_cast<int>(len), dist->build(), points)) classes.push_back(c);
    }
  }
  try {
    return CorrelatedClassList(std::move(classes));
  } catch (const std::invalid_argument& e) {
    fail(path, n, e.what());
  }
}

PriceSchedule parse_schedule(const YAML::Node& n, const std::string& path) {
  expect_keys(n, path, {"flat", "per_length", "per_server", "per_server_per_length"});
  if (n.size() != 1) fail(path, n, "give exactly one of flat, per_length, per_server, per_server_per_length");
  const auto check = [&](const std::vector<double>& v, const std::string& p, const YAML::Node& node) {
    for (std::size_t i = 0; i < v.size(); ++i)
      if (v[i] < 0.0) fail(index(p, i), node[i], "prices must be nonnegative");
    return v;
  };
  if (n["flat"]) {
    const double p = real(n["flat"], join(path, "flat"));
    if (p < 0.0) fail(join(path, "flat"), n["flat"], "prices must be nonnegative");
    return FlatPrice{p};
  }
  if (n["per_length"])
    return PerLengthPrices{check(reals(n["per_length"], join(path, "per_length")), join(path, "per_length"),
                                 n["per_length"])};
  if (n["per_server"])
    return PerServerPrices{check(reals(n["per_server"], join(path, "per_server")), join(path, "per_server"),
                                 n["per_server"])};
  const auto rows = n["per_server_per_length"];
  const std::string rpath = join(path, "per_server_per_length");
  if (!rows.IsSequence()) fail(rpath, rows, "expected a list of price lists");
  PerServerPerLengthPrices out;
  for (std::size_t j = 0; j < rows.size(); ++j)
    out.prices.push_back(check(reals(rows[j], index(rpath, j)), index(rpath, j), rows[j]));
  return out;
}

SimConfig parse_sim(const YAML::Node& n, const std::string& path) {
  expect_keys(n, path, {"horizon", "replications", "seed", "warmup", "threads"});
  SimConfig sim;
  if (n["horizon"]) {
    sim.horizon = integer(n["horizon"], join(path, "horizon"));
    if (sim.horizon < 1) fail(join(path, "horizon"), n["horizon"], "must be positive");
  }
  if (n["replications"]) {
    const auto r = integer(n["replications"], join(path, "replications"));
    if (r < 1 || r > 1'000'000) fail(join(path, "replications"), n["replications"], "must be a positive integer");
    sim.replications = static_cast<int>(r);
  }
  if (n["seed"]) {
    try {
      sim.seed = n["seed"].as<std::uint64_t>();
    } catch (const YAML::BadConversion&) {
      fail(join(path, "seed"), n["seed"], "expected an unsigned 64-bit integer");
    }
  }
  if (n["warmup"]) {
    sim.warmup = integer(n["warmup"], join(path, "warmup"));
    if (*sim.warmup < 0 || *sim.warmup >= sim.horizon)
      fail(join(path, "warmup"), n["warmup"], "warmup must lie in [0, horizon)");
  }
  if (n["threads"]) {
    const auto t = integer(n["threads"], join(path, "threads"));
    if (t < 0 || t > 4096) fail(join(path, "threads"), n["threads"], "must lie in [0, 4096]");
    sim.threads = static_cast<unsigned>(t);
  }
  return sim;
}

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string num_list(std::span<const double> v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + num(v[i]);
  return s + "]";
}

void dump_mix(std::ostream& out, const JobMix& mix, const std::string& indent, bool list_item) {
  out << indent << (list_item ? "- " : "  ") << "lengths: [";
  for (std::size_t i = 0; i < mix.size(); ++i) out << (i ? ", " : "") << mix.lengths()[i];
  out << "]\n" << indent << "  probs: " << num_list(mix.probs()) << "\n";
}

void dump_classes(std::ostream& out, const CorrelatedClassList& classes, const std::string& indent) {
  for (const auto& c : classes.classes())
    out << indent << "- {rate: " << num(c.rate) << ", length: " << c.length << ", value: " << num(c.value) << "}\n";
}

}  // namespace

ConfigError::ConfigError(std::string key, int line, const std::string& message)
    : std::runtime_error("config error at '" + key + "'" + (line > 0 ? " (line " + std::to_string(line) + ")" : "") +
                         ": " + message),
      key_(std::move(key)),
      line_(line) {}

ValueDistribution DistributionSpec::build() const {
  switch (kind) {
    case ValueDistribution::Kind::discrete:
      return ValueDistribution::discrete(atoms);
    case ValueDistribution::Kind::uniform:
      return ValueDistribution::uniform(lo, hi);
    case ValueDistribution::Kind::piecewise_linear:
      return ValueDistribution::piecewise_linear(breakpoints);
  }
  throw std::logic_error("unknown distribution kind");
}

bool operator==(const DistributionSpec& a, const DistributionSpec& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case ValueDistribution::Kind::discrete:
      return std::equal(a.atoms.begin(), a.atoms.end(), b.atoms.begin(), b.atoms.end(),
                        [](const Atom& x, const Atom& y) { return x.value == y.value && x.weight == y.weight; });
    case ValueDistribution::Kind::uniform:
      return a.lo == b.lo && a.hi == b.hi;
    case ValueDistribution::Kind::piecewise_linear:
      return std::equal(a.breakpoints.begin(), a.breakpoints.end(), b.breakpoints.begin(), b.breakpoints.end(),
                        [](const Breakpoint& x, const Breakpoint& y) { return x.x == y.x && x.density == y.density; });
  }
  return false;
}

ValueDistribution InstanceConfig::value_law() const {
  if (!distribution) throw ConfigError("distribution", 0, "this model needs a distribution section");
  return distribution->build();
}

int InstanceConfig::max_length() const {
  return std::visit(
      [](const auto& m) {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, std::vector<CorrelatedClassList>>) {
          int best = 1;
          for (const auto& s : m) best = std::max(best, s.max_length());
          return best;
        } else {
          return m.max_length();
        }
      },
      model);
}

InstanceConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError("<document>", e.mark.line >= 0 ? e.mark.line + 1 : 0, e.msg);
  }
  if (!root || root.IsNull()) throw ConfigError("<document>", 0, "empty config");
  expect_keys(root, "", {"model", "distribution", "schedule", "objective", "sim"});

  std::optional<DistributionSpec> dist;
  if (root["distribution"]) dist = parse_distribution(root["distribution"], "distribution");

  const auto model = require(root, "", "model");
  expect_keys(model, "model", {"job_mix", "fleet", "classes", "fleet_classes", "points"});
  std::size_t points = 10'000;
  if (model["points"]) {
    const auto p = integer(model["points"], "model.points");
    if (p < 1 || p > 10'000'000) fail("model.points", model["points"], "must lie in [1, 1e7]");
    points = static_cast<std::size_t>(p);
  }
  const int kinds = (model["job_mix"] ? 1 : 0) + (model["fleet"] ? 1 : 0) + (model["classes"] ? 1 : 0) +
                    (model["fleet_classes"] ? 1 : 0);
  if (kinds != 1) fail("model", model, "give exactly one of job_mix, fleet, classes, fleet_classes");

  InstanceConfig config{JobMix({1}, {1.0}), dist, std::nullopt, 1.0, {}};
  if (model["job_mix"]) {
    config.model = parse_mix(model["job_mix"], "model.job_mix");
  } else if (model["fleet"]) {
    config.model = parse_fleet(model["fleet"], "model.fleet");
  } else if (model["classes"]) {
    config.model = parse_classes(model["classes"], "model.classes", dist, points);
  } else {
    const auto servers = model["fleet_classes"];
    if (!servers.IsSequence() || servers.size() == 0) fail("model.fleet_classes", servers, "expected a nonempty list");
    std::vector<CorrelatedClassList> lists;
    for (std::size_t j = 0; j < servers.size(); ++j)
      lists.push_back(parse_classes(servers[j], index("model.fleet_classes", j), dist, points));
    config.model = std::move(lists);
  }
  const bool independent = std::holds_alternative<JobMix>(config.model) || std::holds_alternative<Fleet>(config.model);
  if (independent && !dist) throw ConfigError("distribution", 0, "job_mix and fleet models need a distribution section");

  if (root["schedule"]) {
    config.schedule = parse_schedule(root["schedule"], "schedule");
    const auto sched = root["schedule"];
    try {
      std::visit(
          [&](const auto& m) {
            using M = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<M, JobMix> || std::is_same_v<M, Fleet>) {
              (void)resolve_prices(*config.schedule, m);
            } else if constexpr (std::is_same_v<M, CorrelatedClassList>) {
              const auto* per = std::get_if<PerLengthPrices>(&*config.schedule);
              if (!std::holds_alternative<FlatPrice>(*config.schedule) && !(per && per->prices.size() == m.size()))
                throw std::invalid_argument("correlated classes take a flat price or one price per class");
            } else {
              if (!std::holds_alternative<FlatPrice>(*config.schedule))
                throw std::invalid_argument("a fleet of correlated servers takes a flat price");
            }
          },
          config.model);
    } catch (const std::invalid_argument& e) {
      fail("schedule", sched, e.what());
    }
  }

  if (const auto obj = root["objective"]) {
    expect_keys(obj, "objective", {"lambda"});
    config.lambda = real(require(obj, "objective", "lambda"), "objective.lambda");
    if (config.lambda < 0.0 || config.lambda > 1.0) fail("objective.lambda", obj["lambda"], "must lie in [0,1]");
  }

  if (root["sim"]) config.sim = parse_sim(root["sim"], "sim");
  try {
    config.sim.validate(config.max_length());
  } catch (const std::invalid_argument& e) {
    throw ConfigError("sim", root["sim"] ? line_of(root["sim"]) : 0, e.what());
  }
  return config;
}

InstanceConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", 0, "cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string dump_config(const InstanceConfig& config) {
  std::ostringstream out;
  out << "model:\n";
  std::visit(
      [&](const auto& m) {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, JobMix>) {
          out << "  job_mix:\n";
          dump_mix(out, m, "  ", false);
        } else if constexpr (std::is_same_v<M, Fleet>) {
          out << "  fleet:\n    mode: " << (m.mode() == FleetMode::equal_r ? "equal_r" : "shared_length")
              << "\n    servers:\n";
          for (const auto& s : m.servers()) dump_mix(out, s, "      ", true);
        } else if constexpr (std::is_same_v<M, CorrelatedClassList>) {
          out << "  classes:\n";
          dump_classes(out, m, "    ");
        } else {
          out << "  fleet_classes:\n";
          for (const auto& s : m) {
            out << "    -\n";
            dump_classes(out, s, "      ");
          }
        }
      },
      config.model);

  if (const auto& d = config.distribution) {
    out << "distribution:\n";
    switch (d->kind) {
      case ValueDistribution::Kind::discrete:
        out << "  kind: discrete\n  atoms:\n";
        for (const auto& a : d->atoms) out << "    - {value: " << num(a.value) << ", weight: " << num(a.weight) << "}\n";
        break;
      case ValueDistribution::Kind::uniform:
        out << "  kind: uniform\n  lo: " << num(d->lo) << "\n  hi: " << num(d->hi) << "\n";
        break;
      case ValueDistribution::Kind::piecewise_linear:
        out << "  kind: piecewise_linear\n  breakpoints:\n";
        for (const auto& b : d->breakpoints) out << "    - {x: " << num(b.x) << ", density: " << num(b.density) << "}\n";
        break;
    }
  }

  if (const auto& s = config.schedule) {
    out << "schedule:\n";
    std::visit(
        [&](const auto& v) {
          using V = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<V, FlatPrice>) {
            out << "  flat: " << num(v.price) << "\n";
          } else if constexpr (std::is_same_v<V, PerLengthPrices>) {
            out << "  per_length: " << num_list(v.prices) << "\n";
          } else if constexpr (std::is_same_v<V, PerServerPrices>) {
            out << "  per_server: " << num_list(v.prices) << "\n";
          } else {
            out << "  per_server_per_length:\n";
            for (const auto& row : v.prices) out << "    - " << num_list(row) << "\n";
          }
        },
        *s);
  }

  out << "objective:\n  lambda: " << num(config.lambda) << "\n";
  out << "sim:\n  horizon: " << config.sim.horizon << "\n  replications: " << config.sim.replications
      << "\n  seed: " << config.sim.seed << "\n";
  if (config.sim.warmup) out << "  warmup: " << *config.sim.warmup << "\n";
  out << "  threads: " << config.sim.threads << "\n";
  return out.str();
}

}  // namespace postprice
