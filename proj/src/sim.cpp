#include "postprice/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>

namespace postprice {

namespace {

struct ClassSpec {
  double rate;
  int length;
  double price;
  double fixed_value;  // used when the server has no value law
};

struct ServerSpec {
  std::vector<ClassSpec> classes;
  std::vector<double> cumulative;  // running sum of rates
  std::size_t offset = 0;          // index of the first class in the global counters
};

struct Model {
  std::vector<ServerSpec> servers;
  const ValueDistribution* dist = nullptr;  // null: classes carry fixed values
  std::size_t class_count = 0;
  int max_length = 1;

  void add_server(std::vector<ClassSpec> classes) {
    ServerSpec s;
    s.offset = class_count;
    double run = 0.0;
    for (const auto& c : classes) {
      run += c.rate;
      s.cumulative.push_back(run);
      max_length = std::max(max_length, c.length);
    }
    class_count += classes.size();
    s.classes = std::move(classes);
    servers.push_back(std::move(s));
  }
};

struct Totals {
  double welfare = 0.0;
  double revenue = 0.0;
  double busy = 0.0;
};

struct ReplicationOutput {
  Totals totals;
  std::vector<Totals> blocks;
  std::vector<std::int64_t> free_arrivals;
  std::vector<std::int64_t> accepted;
};

class Window {
 public:
  Window(std::int64_t warmup, std::int64_t horizon, std::int64_t block_len, std::size_t blocks)
      : start_(warmup), end_(horizon), block_len_(block_len), blocks_(blocks) {}

  [[nodiscard]] bool contains(std::int64_t t) const noexcept { return t >= start_ && t < end_; }

  // Credits value and price for every step of [from, to) inside the window.
  void credit(std::int64_t from, std::int64_t to, double value, double price, ReplicationOutput& out) const {
    from = std::max(from, start_);
    to = std::min(to, end_);
    if (from >= to) return;
    const double steps = static_cast<double>(to - from);
    out.totals.welfare += value * steps;
    out.totals.revenue += price * steps;
    out.totals.busy += steps;
    if (blocks_ == 0) return;
    while (from < to) {
      const auto b = std::min<std::size_t>(static_cast<std::size_t>((from - start_) / block_len_), blocks_ - 1);
      const std::int64_t block_end = b + 1 == blocks_ ? end_ : start_ + static_cast<std::int64_t>(b + 1) * block_len_;
      const std::int64_t stop = std::min(to, block_end);
      const double seg = static_cast<double>(stop - from);
      out.blocks[b].welfare += value * seg;
      out.blocks[b].revenue += price * seg;
      out.blocks[b].busy += seg;
      from = stop;
    }
  }

  [[nodiscard]] std::int64_t length() const noexcept { return end_ - start_; }
  [[nodiscard]] std::int64_t block_length(std::size_t b) const noexcept {
    return b + 1 == blocks_ ? end_ - start_ - static_cast<std::int64_t>(b) * block_len_ : block_len_;
  }

 private:
  std::int64_t start_;
  std::int64_t end_;
  std::int64_t block_len_;
  std::size_t blocks_;
};

ReplicationOutput run_replication(const Model& model, const Window& window, std::int64_t horizon,
                                  std::size_t blocks, RandomStream& rng) {
  ReplicationOutput out;
  out.blocks.resize(blocks);
  out.free_arrivals.assign(model.class_count, 0);
  out.accepted.assign(model.class_count, 0);
  for (const auto& server : model.servers) {
    const std::size_t n = server.classes.size();
    std::int64_t t = 0;
    while (t < horizon) {
      const double u = rng.uniform();
      const auto k = static_cast<std::size_t>(
          std::upper_bound(server.cumulative.begin(), server.cumulative.end(), u) - server.cumulative.begin());
      if (k >= n) {
        ++t;
        continue;
      }
      const ClassSpec& c = server.classes[k];
      const double value = model.dist ? model.dist->quantile(rng.uniform()) : c.fixed_value;
      const bool counted = window.contains(t);
      if (counted) ++out.free_arrivals[server.offset + k];
      if (value >= c.price) {
        if (counted) ++out.accepted[server.offset + k];
        window.credit(t, t + c.length, value, c.price, out);
        t += c.length;
      } else {
        ++t;
      }
    }
  }
  return out;
}

Estimate summarize(std::span<const double> samples) {
  Estimate e;
  const double k = static_cast<double>(samples.size());
  for (double x : samples) e.mean += x;
  e.mean /= k;
  if (samples.size() > 1) {
    double ss = 0.0;
    for (double x : samples) ss += (x - e.mean) * (x - e.mean);
    e.se = std::sqrt(ss / (k - 1.0) / k);
  } else {
    e.se = std::numeric_limits<double>::infinity();
  }
  e.ci_low = e.mean - 1.96 * e.se;
  e.ci_high = e.mean + 1.96 * e.se;
  return e;
}

SimResult run(const Model& model, const SimConfig& config) {
  config.validate(model.max_length);
  const std::int64_t warmup = config.warmup_steps();
  const std::int64_t window_len = config.horizon - warmup;
  const auto reps = static_cast<std::size_t>(config.replications);

  // A single replication falls back to batch means over blocks long enough
  // to span many regenerations of the idle state.
  std::size_t blocks = 0;
  std::int64_t block_len = window_len;
  if (reps == 1) {
    const std::int64_t min_block = 100LL * model.max_length;
    blocks = static_cast<std::size_t>(std::min<std::int64_t>(30, window_len / min_block));
    if (blocks >= 2) block_len = window_len / static_cast<std::int64_t>(blocks);
    else blocks = 0;
  }
  const Window window(warmup, config.horizon, block_len, blocks);

  auto streams = seeded_streams(config.seed, reps);
  std::vector<ReplicationOutput> outputs(reps);
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t r = next++; r < reps; r = next++)
      outputs[r] = run_replication(model, window, config.horizon, blocks, streams[r]);
  };
  unsigned threads = config.threads ? config.threads : std::max(1U, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, reps));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
  }

  const double servers = static_cast<double>(model.servers.size());
  SimResult result;
  result.free_arrivals.assign(model.class_count, 0);
  result.accepted.assign(model.class_count, 0);
  std::vector<double> w, rv, occ;
  for (const auto& o : outputs) {
    const double len = static_cast<double>(window_len);
    result.replications.push_back({o.totals.welfare / len, o.totals.revenue / len, o.totals.busy / (len * servers)});
    for (std::size_t k = 0; k < model.class_count; ++k) {
      result.free_arrivals[k] += o.free_arrivals[k];
      result.accepted[k] += o.accepted[k];
    }
  }
  if (blocks >= 2) {
    result.batch_means = true;
    for (std::size_t b = 0; b < blocks; ++b) {
      const double len = static_cast<double>(window.block_length(b));
      const auto& t = outputs.front().blocks[b];
      w.push_back(t.welfare / len);
      rv.push_back(t.revenue / len);
      occ.push_back(t.busy / (len * servers));
    }
  } else {
    for (const auto& r : result.replications) {
      w.push_back(r.welfare);
      rv.push_back(r.revenue);
      occ.push_back(r.occupancy);
    }
  }
  result.welfare = summarize(w);
  result.revenue = summarize(rv);
  result.occupancy = summarize(occ);
  // Batch means estimate the same long-run mean; report the full-window value.
  if (result.batch_means) {
    const auto& r = result.replications.front();
    for (auto [est, mean] : {std::pair{&result.welfare, r.welfare}, std::pair{&result.revenue, r.revenue},
                             std::pair{&result.occupancy, r.occupancy}}) {
      est->mean = mean;
      est->ci_low = mean - 1.96 * est->se;
      est->ci_high = mean + 1.96 * est->se;
    }
  }
  return result;
}

std::vector<ClassSpec> mix_classes(const JobMix& mix, std::span<const double> prices) {
  std::vector<ClassSpec> out;
  for (std::size_t i = 0; i < mix.size(); ++i) out.push_back({mix.probs()[i], mix.lengths()[i], prices[i], 0.0});
  return out;
}

std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

}  // namespace

std::int64_t SimConfig::warmup_steps() const noexcept { return warmup ? *warmup : horizon / 100; }

void SimConfig::validate(int max_length) const {
  if (replications < 1) throw std::invalid_argument("simulation needs at least one replication");
  if (horizon < 10LL * max_length)
    throw std::invalid_argument("horizon " + std::to_string(horizon) + " is shorter than 10 x the longest job (" +
                                std::to_string(max_length) + ")");
  const auto w = warmup_steps();
  if (w < 0 || w >= horizon) throw std::invalid_argument("warmup must lie in [0, horizon)");
}

std::vector<RandomStream> seeded_streams(std::uint64_t seed, std::size_t k) {
  if (k == 0) throw std::invalid_argument("seeded_streams: need k >= 1");
  std::vector<RandomStream> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(static_cast<std::uint64_t>(i) >> 32),
                      0x9e3779b9U};
    out.emplace_back(seq);
  }
  return out;
}

SimResult simulate(const JobMix& mix, const ValueDistribution& dist, const PriceSchedule& schedule,
                   const SimConfig& config) {
  const auto prices = resolve_prices(schedule, mix);
  for (double p : prices)
    if (!(p >= 0.0)) throw std::invalid_argument("simulate: prices must be nonnegative");
  Model model;
  model.dist = &dist;
  model.add_server(mix_classes(mix, prices));
  return run(model, config);
}

SimResult simulate(const Fleet& fleet, const ValueDistribution& dist, const PriceSchedule& schedule,
                   const SimConfig& config) {
  const auto prices = resolve_prices(schedule, fleet);
  Model model;
  model.dist = &dist;
  for (std::size_t j = 0; j < fleet.size(); ++j) model.add_server(mix_classes(fleet.server(j), prices[j]));
  return run(model, config);
}

SimResult simulate(const CorrelatedClassList& classes, const PriceSchedule& schedule, const SimConfig& config) {
  std::vector<double> prices;
  if (const auto* flat = std::get_if<FlatPrice>(&schedule)) {
    prices.assign(classes.size(), flat->price);
  } else if (const auto* per = std::get_if<PerLengthPrices>(&schedule)) {
    if (per->prices.size() != classes.size())
      throw std::invalid_argument("simulate: expected one price per class");
    prices = per->prices;
  } else {
    throw std::invalid_argument("simulate: correlated classes take a flat or per-class schedule");
  }
  std::vector<ClassSpec> specs;
  for (std::size_t j = 0; j < classes.size(); ++j)
    specs.push_back({classes[j].rate, classes[j].length, prices[j], classes[j].value});
  Model model;
  model.add_server(std::move(specs));
  return run(model, config);
}

SimResult simulate(std::span<const CorrelatedClassList> servers, double price, const SimConfig& config) {
  if (servers.empty()) throw std::invalid_argument("simulate: need at least one server");
  Model model;
  for (const auto& classes : servers) {
    std::vector<ClassSpec> specs;
    for (const auto& c : classes.classes()) specs.push_back({c.rate, c.length, price, c.value});
    model.add_server(std::move(specs));
  }
  return run(model, config);
}

void write_csv(std::ostream& out, const SimResult& result) {
  out << "row,welfare,revenue,occupancy,welfare_se,revenue_se,occupancy_se\n";
  for (std::size_t r = 0; r < result.replications.size(); ++r) {
    const auto& rep = result.replications[r];
    out << "rep" << r << ',' << fmt_double(rep.welfare) << ',' << fmt_double(rep.revenue) << ','
        << fmt_double(rep.occupancy) << ",0,0,0\n";
  }
  out << "aggregate," << fmt_double(result.welfare.mean) << ',' << fmt_double(result.revenue.mean) << ','
      << fmt_double(result.occupancy.mean) << ',' << fmt_double(result.welfare.se) << ','
      << fmt_double(result.revenue.se) << ',' << fmt_double(result.occupancy.se) << '\n';
}

}  // namespace postprice
