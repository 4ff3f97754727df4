#include "postprice/schedule.hpp"

#include <stdexcept>

namespace postprice {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_count(std::size_t got, std::size_t want, const char* what) {
  if (got != want)
    throw std::invalid_argument(std::string(what) + ": expected " + std::to_string(want) + " entries, got " +
                                std::to_string(got));
}

}  // namespace

std::string shape_name(const PriceSchedule& schedule) {
  return std::visit(overloaded{
                        [](const FlatPrice&) { return std::string("flat"); },
                        [](const PerLengthPrices&) { return std::string("per-length"); },
                        [](const PerServerPrices&) { return std::string("per-server"); },
                        [](const PerServerPerLengthPrices&) { return std::string("per-server-per-length"); },
                    },
                    schedule);
}

std::vector<double> resolve_prices(const PriceSchedule& schedule, const JobMix& mix) {
  return std::visit(
      overloaded{
          [&](const FlatPrice& s) { return std::vector<double>(mix.size(), s.price); },
          [&](const PerLengthPrices& s) {
            check_count(s.prices.size(), mix.size(), "per-length schedule");
            return s.prices;
          },
          [&](const PerServerPrices& s) -> std::vector<double> {
            check_count(s.prices.size(), 1, "per-server schedule on a single server");
            return std::vector<double>(mix.size(), s.prices.front());
          },
          [&](const PerServerPerLengthPrices& s) -> std::vector<double> {
            check_count(s.prices.size(), 1, "per-server-per-length schedule on a single server");
            check_count(s.prices.front().size(), mix.size(), "per-length prices of server 0");
            return s.prices.front();
          },
      },
      schedule);
}

std::vector<std::vector<double>> resolve_prices(const PriceSchedule& schedule, const Fleet& fleet) {
  std::vector<std::vector<double>> out;
  out.reserve(fleet.size());
  std::visit(overloaded{
                 [&](const FlatPrice& s) {
                   for (const auto& m : fleet.servers()) out.emplace_back(m.size(), s.price);
                 },
                 [&](const PerLengthPrices& s) {
                   // Only meaningful when every server offers the same number of lengths.
                   for (const auto& m : fleet.servers()) {
                     check_count(s.prices.size(), m.size(), "per-length schedule on a fleet");
                     out.push_back(s.prices);
                   }
                 },
                 [&](const PerServerPrices& s) {
                   check_count(s.prices.size(), fleet.size(), "per-server schedule");
                   for (std::size_t j = 0; j < fleet.size(); ++j)
                     out.emplace_back(fleet.server(j).size(), s.prices[j]);
                 },
                 [&](const PerServerPerLengthPrices& s) {
                   check_count(s.prices.size(), fleet.size(), "per-server-per-length schedule");
                   for (std::size_t j = 0; j < fleet.size(); ++j) {
                     check_count(s.prices[j].size(), fleet.server(j).size(), "per-length prices of a server");
                     out.push_back(s.prices[j]);
                   }
                 },
             },
             schedule);
  return out;
}

SteadyStateMetrics evaluate(const JobMix& mix, const ValueDistribution& dist, const PriceSchedule& schedule) {
  if (const auto* flat = std::get_if<FlatPrice>(&schedule))
    return single_server_flat_metrics(mix, dist, flat->price);
  return single_server_metrics(mix, dist, resolve_prices(schedule, mix));
}

SteadyStateMetrics evaluate(const Fleet& fleet, const ValueDistribution& dist, const PriceSchedule& schedule) {
  if (const auto* flat = std::get_if<FlatPrice>(&schedule))
    return fleet_metrics(fleet, dist, std::vector<double>(fleet.size(), flat->price));
  if (const auto* per_server = std::get_if<PerServerPrices>(&schedule))
    return fleet_metrics(fleet, dist, per_server->prices);
  return fleet_metrics_per_length(fleet, dist, resolve_prices(schedule, fleet));
}

}  // namespace postprice
