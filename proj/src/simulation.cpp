#include "expcomp/simulation.hpp"

#include <atomic>
#include <cmath>
#include <optional>
#include <string>
#include <thread>

#include "expcomp/errors.hpp"

namespace expcomp {
namespace {

struct Moments {
  double mean = 0.0;
  double sd = 0.0;
};

// Two passes in index order so the digits do not depend on scheduling.
Moments moments(const std::vector<double>& x) {
  Moments out;
  if (x.empty()) return out;
  double sum = 0.0;
  for (double v : x) sum += v;
  out.mean = sum / static_cast<double>(x.size());
  if (x.size() > 1) {
    double ss = 0.0;
    for (double v : x) ss += (v - out.mean) * (v - out.mean);
    out.sd = std::sqrt(ss / static_cast<double>(x.size() - 1));
  }
  return out;
}

constexpr PublishedCell kPublished[] = {
    {0.8, 1.0, 50, 0.827615, 1.046424, 0.1189729, 0.3537826},
    {0.8, 1.0, 100, 0.811015, 1.017363, 0.08019997, 0.2345774},
    {0.8, 1.0, 200, 0.807355, 1.000019, 0.05537136, 0.1534154},
    {5.0, 1.0, 50, 5.158100, 1.046424, 0.7489789, 0.3469250},
    {5.0, 1.0, 100, 5.076575, 1.017905, 0.50643771, 0.2419570},
    {5.0, 1.0, 200, 5.042250, 1.006531, 0.35411868, 0.1578944},
    {0.8, 5.0, 50, 0.827620, 5.551189, 0.1172865, 2.0430630},
    {0.8, 5.0, 100, 0.814515, 5.233835, 0.07802185, 1.2687714},
    {0.8, 5.0, 200, 0.807080, 5.134532, 0.05448299, 0.8504233},
    {5.0, 5.0, 50, 5.139675, 5.502811, 0.7141230, 1.9971169},
    {5.0, 5.0, 100, 5.071900, 5.259176, 0.50519868, 1.2889135},
    {5.0, 5.0, 200, 5.046740, 5.124653, 0.35052404, 0.8586674},
};

}  // namespace

void Scenario::validate() const {
  if (replicates < 1) throw DomainError("scenario needs at least one replicate");
  if (n < 10) throw DomainError("scenario sample size must be at least 10");
  if (!(eta > 0.0) || !(theta > 0.0) || !std::isfinite(eta) || !std::isfinite(theta)) {
    throw DomainError("scenario parameters must be positive and finite");
  }
  if (!is_composite(model) || !has_free_exponent(model)) {
    throw DomainError("simulation supports the two-parameter composite models only");
  }
}

SimulationReport run_scenario(const Scenario& scenario, const SimulationOptions& options) {
  scenario.validate();
  options.grid.validate();
  const ExponentiatedComposite truth = build_composite(scenario.model, scenario.theta, scenario.eta);
  const std::size_t r = scenario.replicates;

  std::vector<std::optional<FitResult>> fits(r);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < r; i = next.fetch_add(1)) {
      const auto y = truth.sample(scenario.n, scenario.base_seed + i);
      try {
        fits[i] = fit(scenario.model, y, options.grid);
      } catch (const FitFailure&) {
        fits[i].reset();
      }
    }
  };

  unsigned threads = options.threads ? options.threads : std::thread::hardware_concurrency();
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(r)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  std::vector<double> etas;
  std::vector<double> thetas;
  SimulationReport report;
  report.scenario = scenario;
  for (const auto& f : fits) {
    if (!f) {
      ++report.failures;
      continue;
    }
    etas.push_back(f->eta);
    thetas.push_back(f->theta);
  }
  if (report.failures * 10 > r) {
    throw AggregateFailure(std::to_string(report.failures) + " of " + std::to_string(r) +
                           " replicates failed to fit");
  }
  const auto eta_m = moments(etas);
  const auto theta_m = moments(thetas);
  report.eta_mean = eta_m.mean;
  report.eta_sd = eta_m.sd;
  report.theta_mean = theta_m.mean;
  report.theta_sd = theta_m.sd;
  return report;
}

std::vector<Scenario> published_scenarios(std::uint64_t base_seed, std::size_t replicates) {
  std::vector<Scenario> out;
  for (double theta : {1.0, 5.0}) {
    for (double eta : {0.8, 5.0}) {
      for (std::size_t n : {50u, 100u, 200u}) {
        Scenario s;
        s.model = ModelId::ExpExpPareto;
        s.eta = eta;
        s.theta = theta;
        s.n = n;
        s.replicates = replicates;
        s.base_seed = base_seed;
        out.push_back(s);
      }
    }
  }
  return out;
}

std::vector<SimulationReport> reproduce_published_tables(std::uint64_t base_seed,
                                                     const SimulationOptions& options,
                                                     std::size_t replicates) {
  std::vector<SimulationReport> out;
  for (const auto& s : published_scenarios(base_seed, replicates)) out.push_back(run_scenario(s, options));
  return out;
}

std::span<const PublishedCell> published_recovery() { return kPublished; }

const PublishedCell* find_published(double eta, double theta, std::size_t n) {
  for (const auto& cell : kPublished) {
    if (cell.eta == eta && cell.theta == theta && cell.n == n) return &cell;
  }
  return nullptr;
}

}  // namespace expcomp
