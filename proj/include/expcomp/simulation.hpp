#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "expcomp/estimation.hpp"

namespace expcomp {

struct Scenario {
  ModelId model = ModelId::ExpExpPareto;
  double eta = 1.0;
  double theta = 1.0;
  std::size_t n = 200;
  std::size_t replicates = 2000;
  std::uint64_t base_seed = 1;

  /// DomainError unless replicates >= 1, n >= 10, θ, η > 0 and the model is a
  /// two-parameter composite.
  void validate() const;
};

struct SimulationReport {
  Scenario scenario;
  double eta_mean = 0.0;
  double theta_mean = 0.0;
  /// Sample standard deviations (n - 1 denominator); 0 with one success.
  double eta_sd = 0.0;
  double theta_sd = 0.0;
  std::size_t failures = 0;
};

struct SimulationOptions {
  EtaGrid grid;
  /// 0 picks std::thread::hardware_concurrency().
  unsigned threads = 0;
};

/// More than 10% of the replicates failed to fit.
class AggregateFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Replicate i draws n values with seed base_seed + i and fits them. Results
/// are identical for any thread count.
SimulationReport run_scenario(const Scenario& scenario, const SimulationOptions& options = {});

/// The twelve recovery scenarios: η ∈ {0.8, 5} × θ ∈ {1, 5} × n ∈ {50, 100, 200}.
std::vector<Scenario> published_scenarios(std::uint64_t base_seed, std::size_t replicates = 2000);

std::vector<SimulationReport> reproduce_published_tables(std::uint64_t base_seed,
                                                     const SimulationOptions& options = {},
                                                     std::size_t replicates = 2000);

/// Published recovery results for the exponentiated exp-Pareto model.
struct PublishedCell {
  double eta;
  double theta;
  std::size_t n;
  double eta_mean;
  double theta_mean;
  double eta_sd;
  double theta_sd;
};

std::span<const PublishedCell> published_recovery();
const PublishedCell* find_published(double eta, double theta, std::size_t n);

}  // namespace expcomp
