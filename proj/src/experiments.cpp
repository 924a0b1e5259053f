#include "sbwave/experiments.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

namespace sbwave {
namespace {

constexpr std::size_t kEnvelopeGrid = 4096;
constexpr double kEnvelopeSafety = 1.01;

std::string sig17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string shortest(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// The Example 3 density as written; its mass is 0.875.
double ex3_raw_f(double x) {
  if (x < 0.0 || x > 1.0) return 0.0;
  if (x < 0.25) return (64.0 * x + 1.0) / 9.0;
  if (x < 0.5) return (32.0 * (1.0 - 2.0 * x) + 1.0) / 9.0;
  if (x < 0.75) return (x * (32.0 * x - 31.0) + 12.0) / 9.0;
  return (x * (65.0 - 32.0 * x) - 24.0) / 9.0;
}

double ex3_w(double y) { return 0.1 + 2.0 * y * y; }

// Integral over [0,1] of a function that is polynomial of degree <= 5 on each
// quarter; 3-point Gauss-Legendre is exact there.
double quarterwise_integral(const std::function<double(double)>& fn) {
  static constexpr std::array<double, 3> nodes{-0.7745966692414833770, 0.0, 0.7745966692414833770};
  static constexpr std::array<double, 3> weights{5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  double total = 0.0;
  for (int piece = 0; piece < 4; ++piece) {
    const double lo = 0.25 * piece;
    const double half = 0.125;
    const double mid = lo + half;
    for (std::size_t i = 0; i < 3; ++i) total += weights[i] * half * fn(mid + half * nodes[i]);
  }
  return total;
}

double sample_sd(const std::vector<double>& v, double mean) {
  if (v.size() < 2) return 0.0;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

template <typename Task>
void parallel_for(std::size_t count, unsigned workers, Task task) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(count, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned t = 0; t < workers; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) task(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace

std::string to_string(ExampleId id) {
  switch (id) {
    case ExampleId::ex1: return "ex1";
    case ExampleId::ex2: return "ex2";
    case ExampleId::ex3: return "ex3";
  }
  return "unknown";
}

ExampleId parse_example_id(const std::string& text) {
  if (text == "ex1") return ExampleId::ex1;
  if (text == "ex2") return ExampleId::ex2;
  if (text == "ex3") return ExampleId::ex3;
  throw std::invalid_argument("unknown example '" + text + "' (expected ex1, ex2 or ex3)");
}

Rng replication_rng(std::uint64_t base_seed, std::uint64_t replication) {
  return Rng(base_seed + replication);
}

double beta_density(double x, double a, double b) {
  if (!(x > 0.0 && x < 1.0)) return 0.0;
  const double log_b = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
  return std::exp((a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) - log_b);
}

double beta_draw(double a, double b, Rng& rng) {
  std::gamma_distribution<double> ga(a, 1.0);
  std::gamma_distribution<double> gb(b, 1.0);
  const double x = ga(rng);
  const double y = gb(rng);
  return x / (x + y);
}

double envelope_bound(const std::function<double(double)>& density) {
  double sup = 0.0;
  for (std::size_t i = 0; i < kEnvelopeGrid; ++i) {
    const double x = static_cast<double>(i) / static_cast<double>(kEnvelopeGrid - 1);
    const double v = density(x);
    if (!std::isfinite(v)) throw std::overflow_error("accept-reject envelope: density is unbounded on the grid");
    sup = std::max(sup, v);
  }
  if (!(sup > 0.0)) throw std::invalid_argument("accept-reject envelope: density vanishes on the grid");
  return sup * kEnvelopeSafety;
}

AcceptRejectResult accept_reject_sample(const std::function<double(double)>& density, std::size_t n,
                                        Rng& rng) {
  AcceptRejectResult out;
  out.envelope = envelope_bound(density);
  out.draws.reserve(n);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::size_t proposals = 0;
  while (out.draws.size() < n) {
    const double x = unif(rng);
    const double u = unif(rng);
    ++proposals;
    if (u * out.envelope <= density(x)) out.draws.push_back(x);
  }
  out.acceptance_rate = proposals == 0 ? 1.0 : static_cast<double>(n) / static_cast<double>(proposals);
  return out;
}

std::vector<double> SimulationExample::sample(std::size_t n, Rng& rng) const {
  std::vector<double> out;
  out.reserve(n);
  switch (id) {
    case ExampleId::ex1:
      // w is infinite at 0 and 1, so draws that round onto them are redrawn.
      while (out.size() < n) {
        const double y = beta_draw(0.5, 0.5, rng);
        if (y > 0.0 && y < 1.0) out.push_back(y);
      }
      return out;
    case ExampleId::ex2: {
      static constexpr std::array<std::array<double, 2>, 3> params{{{21.0, 3.0}, {41.0, 40.0}, {4.0, 20.0}}};
      std::discrete_distribution<int> pick(mixture_weights.begin(), mixture_weights.end());
      while (out.size() < n) {
        const auto& ab = params[static_cast<std::size_t>(pick(rng))];
        out.push_back(beta_draw(ab[0], ab[1], rng));
      }
      return out;
    }
    case ExampleId::ex3:
      return accept_reject_sample(g, n, rng).draws;
  }
  return out;
}

SimulationExample make_example(ExampleId id, bool renormalize) {
  SimulationExample ex;
  ex.id = id;
  switch (id) {
    case ExampleId::ex1: {
      ex.f = [](double x) { return beta_density(x, 2.5, 2.5); };
      ex.g = [](double y) { return beta_density(y, 0.5, 0.5); };
      ex.w = WeightFunction([](double y) { return 1.0 / (y * y * (1.0 - y) * (1.0 - y)); },
                            "x^-2 * (1 - x)^-2");
      ex.mu = 128.0 / 3.0;
      return ex;
    }
    case ExampleId::ex2: {
      static constexpr std::array<std::array<double, 2>, 3> params{{{20.0, 3.0}, {40.0, 40.0}, {3.0, 20.0}}};
      // g picks up each component in proportion to its mean.
      double mu = 0.0;
      for (const auto& ab : params) mu += ab[0] / (ab[0] + ab[1]) / 3.0;
      for (const auto& ab : params) ex.mixture_weights.push_back(ab[0] / (ab[0] + ab[1]) / 3.0 / mu);
      ex.mu = mu;
      ex.f = [](double x) {
        double s = 0.0;
        for (const auto& ab : params) s += beta_density(x, ab[0], ab[1]) / 3.0;
        return s;
      };
      const auto weights = ex.mixture_weights;
      ex.g = [weights](double y) {
        double s = 0.0;
        for (std::size_t i = 0; i < 3; ++i) s += weights[i] * beta_density(y, params[i][0] + 1.0, params[i][1]);
        return s;
      };
      ex.w = WeightFunction([](double y) { return y; }, "x");
      return ex;
    }
    case ExampleId::ex3: {
      ex.raw_mass = quarterwise_integral(ex3_raw_f);
      ex.renormalized = renormalize;
      const double scale = renormalize ? 1.0 / ex.raw_mass : 1.0;
      ex.f = [scale](double x) { return scale * ex3_raw_f(x); };
      ex.mu = quarterwise_integral([scale](double x) { return ex3_w(x) * scale * ex3_raw_f(x); });
      const double mu = ex.mu;
      ex.g = [scale, mu](double y) { return ex3_w(y) * scale * ex3_raw_f(y) / mu; };
      ex.w = WeightFunction(ex3_w, "0.1 + 2*x^2");
      ex.exact_sampler = false;
      ex.envelope = envelope_bound(ex.g);
      return ex;
    }
  }
  throw std::invalid_argument("unknown example");
}

double ase(const std::function<double(double)>& estimate, const std::function<double(double)>& truth,
           std::span<const double> grid) {
  if (grid.empty()) throw std::invalid_argument("ASE grid is empty");
  double sum = 0.0;
  for (double x : grid) {
    const double e = estimate(x) - truth(x);
    sum += e * e;
  }
  return sum / static_cast<double>(grid.size());
}

std::vector<double> ase_grid(double lo, double hi, std::size_t n_grid) {
  if (n_grid == 0) throw std::invalid_argument("grid size must be positive");
  if (n_grid == 1) return {lo};
  std::vector<double> grid(n_grid);
  const double step = (hi - lo) / static_cast<double>(n_grid - 1);
  for (std::size_t i = 0; i < n_grid; ++i) grid[i] = lo + step * static_cast<double>(i);
  grid.back() = hi;
  return grid;
}

void MonteCarloPlan::validate() const {
  if (replications < 1) throw std::invalid_argument("replications must be at least 1");
  if (sample_sizes.empty()) throw std::invalid_argument("no sample sizes given");
  for (std::size_t n : sample_sizes)
    if (n < 10) throw std::invalid_argument("sample sizes must be at least 10");
  if (p_values.empty()) throw std::invalid_argument("no p values given");
  for (double p : p_values)
    if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("p values must lie in (0, 1]");
  if (methods.empty()) throw std::invalid_argument("no methods given");
  if (n_grid < 2) throw std::invalid_argument("grid size must be at least 2");
  if (j0 < 0) throw std::invalid_argument("J0 must be nonnegative");
}

std::string AseTable::to_csv() const {
  std::ostringstream out;
  out << "example,method,n,p,mean_ase,sd_ase,reps\n";
  for (const auto& c : cells) {
    out << to_string(c.example) << ',' << to_string(c.method) << ',' << c.n << ',' << shortest(c.p) << ','
        << sig17(c.mean_ase) << ',' << sig17(c.sd_ase) << ',' << c.reps << '\n';
  }
  return out.str();
}

std::string AseTable::to_json(int indent) const {
  nlohmann::json doc;
  doc["cells"] = nlohmann::json::array();
  for (const auto& c : cells) {
    nlohmann::json cell = {
        {"example", to_string(c.example)},
        {"method", to_string(c.method)},
        {"n", c.n},
        {"p", c.p},
        {"j1", c.j1},
        {"mean_ase", c.mean_ase},
        {"sd_ase", c.sd_ase},
        {"reps", c.reps},
        {"grid", {c.grid_lo, c.grid_hi}},
        {"negative_values", c.negative_values},
        {"failures", c.failures},
    };
    if (c.failed()) cell["error"] = c.first_error;
    if (!c.raw.empty()) cell["raw_ase"] = c.raw;
    doc["cells"].push_back(std::move(cell));
  }
  return doc.dump(indent);
}

std::string AseTable::raw_csv() const {
  std::ostringstream out;
  out << "example,method,n,p,replication,ase\n";
  for (const auto& c : cells) {
    for (std::size_t r = 0; r < c.raw.size(); ++r) {
      out << to_string(c.example) << ',' << to_string(c.method) << ',' << c.n << ',' << shortest(c.p) << ','
          << r << ',' << sig17(c.raw[r]) << '\n';
    }
  }
  return out.str();
}

std::size_t AseTable::failed_cells() const {
  return static_cast<std::size_t>(std::count_if(cells.begin(), cells.end(), [](const AseCell& c) { return c.failed(); }));
}

const AseCell* AseTable::find(Method method, std::size_t n, double p) const {
  for (const auto& c : cells)
    if (c.method == method && c.n == n && c.p == p) return &c;
  return nullptr;
}

AseTable run_monte_carlo(const MonteCarloPlan& plan) {
  plan.validate();
  const SimulationExample ex = make_example(plan.example, plan.renormalize);
  const std::size_t reps = plan.replications;
  AseTable table;

  for (std::size_t n : plan.sample_sizes) {
    std::vector<std::vector<double>> samples(reps);
    parallel_for(reps, plan.workers, [&](std::size_t r) {
      Rng rng = replication_rng(plan.base_seed, r);
      samples[r] = ex.sample(n, rng);
    });
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    for (const auto& s : samples) {
      const auto [mn, mx] = std::minmax_element(s.begin(), s.end());
      lo = std::max(lo, *mn);
      hi = std::min(hi, *mx);
    }
    const auto grid = ase_grid(lo, hi, plan.n_grid);
    std::vector<double> truth(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) truth[i] = ex.f(grid[i]);

    struct CellSpec {
      Method method;
      double p;
      int j1;
    };
    std::vector<CellSpec> specs;
    for (Method m : plan.methods)
      for (double p : plan.p_values) specs.push_back({m, p, std::max(plan.j0, resolve_finest_level(p, n))});

    const std::size_t n_cells = specs.size();
    std::vector<double> ases(n_cells * reps, std::numeric_limits<double>::quiet_NaN());
    std::vector<std::size_t> negatives(n_cells * reps, 0);
    std::vector<std::string> errors(n_cells * reps);

    parallel_for(reps, plan.workers, [&](std::size_t r) {
      for (std::size_t c = 0; c < n_cells; ++c) {
        const std::size_t slot = c * reps + r;
        try {
          const auto est = estimate_density(samples[r], ex.w, specs[c].method, plan.j0, specs[c].j1, plan.options);
          double sum = 0.0;
          std::size_t neg = 0;
          for (std::size_t i = 0; i < grid.size(); ++i) {
            const double v = est.density(grid[i]);
            if (v < 0.0) ++neg;
            const double e = v - truth[i];
            sum += e * e;
          }
          if (!std::isfinite(sum)) throw std::runtime_error("non-finite density estimate");
          ases[slot] = sum / static_cast<double>(grid.size());
          negatives[slot] = neg;
        } catch (const std::exception& e) {
          errors[slot] = e.what();
          if (errors[slot].empty()) errors[slot] = "estimation failed";
        }
      }
    });

    for (std::size_t c = 0; c < n_cells; ++c) {
      AseCell cell;
      cell.example = plan.example;
      cell.method = specs[c].method;
      cell.n = n;
      cell.p = specs[c].p;
      cell.j1 = specs[c].j1;
      cell.grid_lo = grid.front();
      cell.grid_hi = grid.back();
      std::vector<double> ok;
      for (std::size_t r = 0; r < reps; ++r) {
        const std::size_t slot = c * reps + r;
        cell.negative_values += negatives[slot];
        if (!errors[slot].empty()) {
          if (cell.failures++ == 0) cell.first_error = "replication " + std::to_string(r) + ": " + errors[slot];
        } else {
          ok.push_back(ases[slot]);
        }
        if (plan.keep_raw) cell.raw.push_back(ases[slot]);
      }
      cell.reps = ok.size();
      if (ok.empty()) {
        cell.mean_ase = cell.sd_ase = std::numeric_limits<double>::quiet_NaN();
      } else {
        double sum = 0.0;
        for (double v : ok) sum += v;
        cell.mean_ase = sum / static_cast<double>(ok.size());
        cell.sd_ase = sample_sd(ok, cell.mean_ase);
      }
      table.cells.push_back(std::move(cell));
    }
  }
  return table;
}

std::string to_string(EfficiencyCase c) { return c == EfficiencyCase::a_eq_1 ? "a_eq_1" : "a_ne_1"; }

EfficiencyCase parse_efficiency_case(const std::string& text) {
  if (text == "a_eq_1" || text == "a=1") return EfficiencyCase::a_eq_1;
  if (text == "a_ne_1" || text == "a!=1") return EfficiencyCase::a_ne_1;
  throw std::invalid_argument("unknown efficiency case '" + text + "' (expected a_eq_1 or a_ne_1)");
}

double efficiency(int k, int m, double n, EfficiencyCase c) {
  if (k < 1 || m < 1) throw std::invalid_argument("k and m must be at least 1");
  if (!(n >= 2.0)) throw std::invalid_argument("n must be at least 2");
  const double kk = k;
  const double mm = m;
  const double km = std::min(kk, mm);
  if (c == EfficiencyCase::a_eq_1)
    return std::pow(n, -2.0 * km / (2.0 * kk + 1.0) + 2.0 * mm / (2.0 * mm + 1.0));
  const double exponent = (2.0 * km - 1.0) / (2.0 * kk + 1.0) - (2.0 * mm - 1.0) / (2.0 * mm + 1.0);
  return std::pow(std::log(n) / n, exponent);
}

}  // namespace sbwave
