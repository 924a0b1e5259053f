#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "sbwave/biased_estimator.hpp"
#include "sbwave/weight.hpp"

namespace sbwave {

enum class ExampleId { ex1, ex2, ex3 };

std::string to_string(ExampleId id);
ExampleId parse_example_id(const std::string& text);

using Rng = std::mt19937_64;

/// Stream for replication r: a generator seeded with base + r, independent of
/// which worker runs it.
Rng replication_rng(std::uint64_t base_seed, std::uint64_t replication);

double beta_density(double x, double a, double b);
double beta_draw(double a, double b, Rng& rng);

struct AcceptRejectResult {
  std::vector<double> draws;
  double acceptance_rate = 0.0;
  double envelope = 0.0;
};

/// sup of `density` over 4096 equally spaced points of [0,1], times 1.01.
/// Throws std::overflow_error if the density is not finite on the grid.
double envelope_bound(const std::function<double(double)>& density);

/// n draws from a bounded density on [0,1] with a uniform proposal.
AcceptRejectResult accept_reject_sample(const std::function<double(double)>& density, std::size_t n,
                                        Rng& rng);

/// A simulation target: true density f, weight w, biased density g = w f / mu.
struct SimulationExample {
  using Density = std::function<double(double)>;

  ExampleId id = ExampleId::ex1;
  Density f;
  Density g;
  WeightFunction w = WeightFunction::constant(1.0);
  double mu = 1.0;
  /// Mass of f as written before renormalization (1 for ex1 and ex2).
  double raw_mass = 1.0;
  bool renormalized = false;
  /// Component weights of g for the beta-mixture example.
  std::vector<double> mixture_weights;
  bool exact_sampler = true;
  /// Envelope constant of the accept-reject sampler (0 for exact samplers).
  double envelope = 0.0;

  std::vector<double> sample(std::size_t n, Rng& rng) const;
};

/// ex1: f = Beta(2.5,2.5), w = y^-2 (1-y)^-2, g = Beta(0.5,0.5), mu = 128/3.
/// ex2: f = equal mixture of Beta(20,3), Beta(40,40), Beta(3,20), w = y,
///      mu = 1/2.
/// ex3: piecewise polynomial f, w = 0.1 + 2 y^2, g sampled by accept-reject.
///      The f as written has mass 0.875; with `renormalize` it is divided by
///      that mass.
SimulationExample make_example(ExampleId id, bool renormalize = true);

/// Mean of squared differences over the grid.
double ase(const std::function<double(double)>& estimate, const std::function<double(double)>& truth,
           std::span<const double> grid);

/// n_grid equally spaced points from lo to hi inclusive.
std::vector<double> ase_grid(double lo, double hi, std::size_t n_grid);

struct MonteCarloPlan {
  ExampleId example = ExampleId::ex1;
  std::vector<std::size_t> sample_sizes{250, 500, 750, 1000};
  std::vector<double> p_values{0.20, 0.45, 0.70, 0.95};
  std::vector<Method> methods{Method::m1, Method::m2, Method::m3, Method::m4};
  std::size_t replications = 100;
  std::uint64_t base_seed = 1;
  std::size_t n_grid = 250;
  /// 0 picks the hardware concurrency.
  unsigned workers = 0;
  int j0 = 0;
  EstimateOptions options{};
  bool renormalize = true;
  bool keep_raw = false;

  void validate() const;
};

struct AseCell {
  ExampleId example = ExampleId::ex1;
  Method method = Method::m1;
  std::size_t n = 0;
  double p = 0.0;
  int j1 = 0;
  double mean_ase = 0.0;
  double sd_ase = 0.0;
  std::size_t reps = 0;  // successful replications
  double grid_lo = 0.0;
  double grid_hi = 0.0;
  std::size_t negative_values = 0;  // evaluated f_hat < 0 across replications
  std::size_t failures = 0;
  std::string first_error;
  std::vector<double> raw;  // per-replication ASE (NaN for failures) when kept

  bool failed() const { return failures > 0; }
};

struct AseTable {
  std::vector<AseCell> cells;

  /// `example,method,n,p,mean_ase,sd_ase,reps`, 17 significant digits.
  std::string to_csv() const;
  std::string to_json(int indent = 2) const;
  /// `example,method,n,p,replication,ase` for audit; needs keep_raw.
  std::string raw_csv() const;
  std::size_t failed_cells() const;
  const AseCell* find(Method method, std::size_t n, double p) const;
};

/// Runs every (n, method, p) cell. Replication r draws its sample from
/// replication_rng(base_seed, r); samples are shared across methods and p at
/// a given n. The ASE grid for each n spans the largest sample minimum to the
/// smallest sample maximum over the replications.
AseTable run_monte_carlo(const MonteCarloPlan& plan);

enum class EfficiencyCase { a_eq_1, a_ne_1 };

std::string to_string(EfficiencyCase c);
EfficiencyCase parse_efficiency_case(const std::string& text);

/// a = 1:  n^(-2 min(k,m)/(2k+1) + 2m/(2m+1))
/// a != 1: (log n / n)^((2 min(k,m)-1)/(2k+1) - (2m-1)/(2m+1))
double efficiency(int k, int m, double n, EfficiencyCase c);

}  // namespace sbwave
