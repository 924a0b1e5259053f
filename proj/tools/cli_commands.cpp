#include "cli_commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "sbwave/biased_estimator.hpp"
#include "sbwave/estimate_io.hpp"
#include "sbwave/experiments.hpp"
#include "sbwave/wavelet_basis.hpp"
#include "sbwave/weight.hpp"

namespace sbwave::cli {
namespace {

// Problems with what the user supplied, reported with exit code 2.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string sig17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::optional<double> parse_double(const std::string& s) {
  if (s.empty()) return std::nullopt;
  std::size_t used = 0;
  try {
    const double v = std::stod(s, &used);
    if (used != s.size()) return std::nullopt;
    return v;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

void check_writable(const std::string& path) {
  if (path.empty()) return;
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty() && !std::filesystem::is_directory(parent))
    throw InputError("output directory does not exist: " + parent.string());
}

void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw InputError("cannot open output file " + path);
  file << text;
  if (!file) throw std::runtime_error("failed writing " + path);
}

template <typename T>
std::vector<T> split_list(const std::string& text, T (*convert)(const std::string&)) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    out.push_back(convert(item));
  }
  if (out.empty()) throw InputError("empty list '" + text + "'");
  return out;
}

double to_double(const std::string& s) {
  const auto v = parse_double(s);
  if (!v) throw InputError("not a number: '" + s + "'");
  return *v;
}

std::size_t to_size(const std::string& s) {
  const double v = to_double(s);
  if (!(v >= 1.0) || v != std::floor(v)) throw InputError("not a positive integer: '" + s + "'");
  return static_cast<std::size_t>(v);
}

Method to_method(const std::string& s) { return parse_method(s); }

struct EstimateArgs {
  std::string input;
  std::string output;
  std::string sidecar;
  std::string weight = "1";
  std::string method = "m2";
  std::optional<double> a;
  int j0 = 0;
  std::optional<int> j1;
  std::optional<double> p;
  std::string filter = "sym10";
  std::string threshold = "hard";
  std::string aux = "kde_sj";
  int aux_level = -1;
  std::size_t grid = 250;
  std::optional<double> epsilon;
  std::string format = "csv";
  bool clip = false;
};

struct SimulateArgs {
  std::string example = "ex1";
  std::string sizes = "250,500,750,1000";
  std::string p = "0.2,0.45,0.7,0.95";
  std::string methods = "m1,m2,m3,m4";
  std::size_t reps = 100;
  std::uint64_t seed = 1;
  std::size_t grid = 250;
  unsigned workers = 0;
  int j0 = 0;
  std::string filter = "sym10";
  std::string threshold = "hard";
  std::string aux = "kde_sj";
  int aux_level = -1;
  std::string format = "csv";
  std::string output;
  std::string raw;
  bool strict = false;
  bool raw_f = false;
};

struct EffArgs {
  double n = 1000;
  int k_min = 1;
  int k_max = 400;
  std::string m = "1,25,50,75";
  std::string which = "both";
  std::string output;
};

struct TableArgs {
  std::string filter = "sym10";
  int level = 10;
  int digits = 30;
  std::string output;
};

int cmd_estimate(const EstimateArgs& args, std::ostream& out) {
  // Everything the user supplied is checked before any computation.
  if (args.format != "csv" && args.format != "json") throw InputError("format must be csv or json");
  check_writable(args.output);
  check_writable(args.sidecar);
  std::vector<double> data;
  try {
    data = read_column(args.input);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  if (data.empty()) throw InputError("no observations in " + args.input);
  if (data.size() < 2) throw InputError("need at least two observations");
  if (args.grid < 2) throw InputError("grid must have at least 2 points");

  Method method;
  EstimateOptions options;
  WeightFunction w = WeightFunction::constant(1.0);
  int j1 = 0;
  double p_used = 0.0;
  try {
    method = parse_method(args.method);
    options.threshold = parse_threshold_mode(args.threshold);
    options.aux = parse_aux_kind(args.aux);
    options.aux_level = args.aux_level;
    options.filter = args.filter;
    (void)load_filter(args.filter);
    options.epsilon = args.epsilon;
    options.power = args.a;
    w = WeightFunction::from_expression(args.weight);
    (void)w.evaluate_positive(data);
    if (args.j1) {
      j1 = *args.j1;
    } else {
      p_used = args.p ? *args.p : default_level_fraction(method);
      j1 = resolve_finest_level(p_used, data.size());
    }
    method_config(method, args.j0, j1, options).validate();
  } catch (const std::exception& e) {
    throw InputError(e.what());
  }

  const auto est = estimate_density(data, w, method, args.j0, j1, options);
  const auto [lo_it, hi_it] = std::minmax_element(data.begin(), data.end());
  const auto grid = ase_grid(*lo_it, *hi_it, args.grid);
  std::vector<DensityValue> values;
  values.reserve(grid.size());
  std::size_t clamped = 0;
  for (double x : grid) {
    values.push_back(est.evaluate(x));
    if (values.back().clamped) ++clamped;
  }
  if (args.clip) {
    const auto f = est.density_grid(grid, true);
    for (std::size_t i = 0; i < f.size(); ++i) values[i].f_hat = f[i];
  }

  const auto& co = est.coefficients();
  const auto& tr = est.transform();
  const auto& dg = est.diagnostics();
  nlohmann::json diag = {
      {"n", dg.n},
      {"method", to_string(method)},
      {"a", est.config().power},
      {"j0", est.config().j0},
      {"j1", est.config().j1},
      {"weight", w.description()},
      {"mu_hat", est.mu_hat()},
      {"lambda", co.lambda},
      {"sigma_hat", co.sigma_hat},
      {"aux_clamped", dg.aux_clamped},
      {"aux_bandwidth", dg.aux_bandwidth},
      {"aux_fallback", dg.aux_fallback},
      {"retained_details", dg.retained_details},
      {"negative_clamped", clamped},
      {"transform", {{"q", tr.q}, {"s", tr.s}, {"epsilon", tr.epsilon}}},
  };
  if (!args.j1) diag["p"] = p_used;
  diag["estimate"] = nlohmann::json::parse(estimate_to_json(est));

  if (args.format == "json") {
    nlohmann::json doc = diag;
    std::vector<double> f, fa;
    for (const auto& v : values) {
      f.push_back(v.f_hat);
      fa.push_back(v.f_hat_a);
    }
    doc["grid"] = {{"x", grid}, {"f_hat", f}, {"f_hat_a", fa}};
    emit(args.output, doc.dump(2) + "\n", out);
    return kSuccess;
  }

  std::ostringstream csv;
  csv << "x,f_hat,f_hat_a\n";
  for (std::size_t i = 0; i < grid.size(); ++i)
    csv << sig17(grid[i]) << ',' << sig17(values[i].f_hat) << ',' << sig17(values[i].f_hat_a) << '\n';
  emit(args.output, csv.str(), out);
  std::string sidecar = args.sidecar;
  if (sidecar.empty() && !args.output.empty()) sidecar = args.output + ".json";
  if (!sidecar.empty()) emit(sidecar, diag.dump(2) + "\n", out);
  return kSuccess;
}

int cmd_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err) {
  if (args.format != "csv" && args.format != "json") throw InputError("format must be csv or json");
  check_writable(args.output);
  check_writable(args.raw);
  MonteCarloPlan plan;
  try {
    plan.example = parse_example_id(args.example);
    plan.sample_sizes = split_list<std::size_t>(args.sizes, to_size);
    plan.p_values = split_list<double>(args.p, to_double);
    plan.methods = split_list<Method>(args.methods, to_method);
    plan.replications = args.reps;
    plan.base_seed = args.seed;
    plan.n_grid = args.grid;
    plan.workers = args.workers;
    plan.j0 = args.j0;
    plan.options.filter = args.filter;
    (void)load_filter(args.filter);
    plan.options.threshold = parse_threshold_mode(args.threshold);
    plan.options.aux = parse_aux_kind(args.aux);
    plan.options.aux_level = args.aux_level;
    for (Method m : plan.methods)
      method_config(m, plan.j0, plan.j0, plan.options).validate();
    plan.renormalize = !args.raw_f;
    plan.keep_raw = !args.raw.empty();
    plan.validate();
  } catch (const InputError&) {
    throw;
  } catch (const std::exception& e) {
    throw InputError(e.what());
  }

  const auto table = run_monte_carlo(plan);
  emit(args.output, args.format == "csv" ? table.to_csv() : table.to_json() + "\n", out);
  if (!args.raw.empty()) emit(args.raw, table.raw_csv(), out);
  const std::size_t failed = table.failed_cells();
  if (failed > 0) {
    for (const auto& c : table.cells)
      if (c.failed())
        err << "cell " << to_string(c.method) << " n=" << c.n << " p=" << c.p << " failed " << c.failures
            << " replication(s): " << c.first_error << '\n';
    if (args.strict) return kComputeError;
  }
  return kSuccess;
}

int cmd_eff(const EffArgs& args, std::ostream& out) {
  if (args.k_min < 1 || args.k_max < args.k_min) throw InputError("k range must satisfy 1 <= k-min <= k-max");
  if (!(args.n >= 2.0)) throw InputError("n must be at least 2");
  std::vector<int> ms;
  for (std::size_t m : split_list<std::size_t>(args.m, to_size)) ms.push_back(static_cast<int>(m));
  std::vector<EfficiencyCase> cases;
  if (args.which == "both") {
    cases = {EfficiencyCase::a_eq_1, EfficiencyCase::a_ne_1};
  } else {
    try {
      cases = {parse_efficiency_case(args.which)};
    } catch (const std::exception& e) {
      throw InputError(e.what());
    }
  }
  check_writable(args.output);
  std::ostringstream csv;
  csv << "k,m,case,eff\n";
  for (auto c : cases)
    for (int m : ms)
      for (int k = args.k_min; k <= args.k_max; ++k)
        csv << k << ',' << m << ',' << to_string(c) << ',' << sig17(efficiency(k, m, args.n, c)) << '\n';
  emit(args.output, csv.str(), out);
  return kSuccess;
}

int cmd_wavelet_table(const TableArgs& args, std::ostream& out) {
  if (args.level < 0 || args.level > 20) throw InputError("level must lie in [0, 20]");
  if (args.digits < 1 || args.digits > 60) throw InputError("digits must lie in [1, 60]");
  check_writable(args.output);
  WaveletFilter filter;
  try {
    filter = load_filter(args.filter);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  const WaveletBasis basis(filter, EvalPrecision{args.digits});
  const long steps = static_cast<long>(basis.support_length()) << args.level;
  const double step = std::ldexp(1.0, -args.level);
  std::ostringstream csv;
  csv << "x,phi,psi\n";
  for (long i = 0; i <= steps; ++i) {
    const double x = static_cast<double>(i) * step;
    csv << sig17(x) << ',' << sig17(basis.phi(x)) << ',' << sig17(basis.psi(x)) << '\n';
  }
  emit(args.output, csv.str(), out);
  return kSuccess;
}

}  // namespace

std::vector<double> read_column(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read input file " + path);
  std::vector<double> values;
  std::string line;
  std::size_t line_no = 0;
  bool seen_content = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string cell = trim(line);
    if (cell.empty()) continue;
    const auto v = parse_double(cell);
    if (!v) {
      if (!seen_content) {
        seen_content = true;
        continue;  // header
      }
      throw std::invalid_argument("line " + std::to_string(line_no) + ": not a number: '" + cell + "'");
    }
    if (!std::isfinite(*v))
      throw std::invalid_argument("line " + std::to_string(line_no) + ": non-finite value");
    seen_content = true;
    values.push_back(*v);
  }
  return values;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Wavelet estimation of power densities from size-biased samples", "sbwave"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  EstimateArgs ea;
  auto* est = app.add_subcommand("estimate", "Estimate f from a single-column CSV sample");
  est->add_option("input", ea.input, "Input CSV")->required();
  est->add_option("-o,--output", ea.output, "Grid output (stdout when omitted)");
  est->add_option("--sidecar", ea.sidecar, "Diagnostics JSON (default <output>.json)");
  est->add_option("--weight", ea.weight, "Biasing function w, e.g. \"0.1 + 0.9*x\"")->capture_default_str();
  est->add_option("--method", ea.method, "m1|m2|m3|m4")->capture_default_str();
  est->add_option("--a", ea.a, "Power a (overrides the method's)");
  est->add_option("--j0", ea.j0, "Coarsest level")->capture_default_str();
  auto* j1_opt = est->add_option("--j1", ea.j1, "Finest level");
  auto* p_opt = est->add_option("--p", ea.p, "J1 = ceil(p log2 n)");
  j1_opt->excludes(p_opt);
  est->add_option("--filter", ea.filter, "Wavelet filter")->capture_default_str();
  est->add_option("--threshold", ea.threshold, "hard|soft|none")->capture_default_str();
  est->add_option("--aux", ea.aux, "kde_sj|wavelet|none")->capture_default_str();
  est->add_option("--aux-level", ea.aux_level, "Level of the wavelet auxiliary estimate (-1 = floor(log2(n)/3))")
      ->capture_default_str();
  est->add_option("--grid", ea.grid, "Evaluation grid size")->capture_default_str();
  est->add_option("--epsilon", ea.epsilon, "Interval margin (default 1.9^-J1)");
  est->add_option("--format", ea.format, "csv|json")->capture_default_str();
  est->add_flag("--clip", ea.clip, "Clip negatives and renormalize f_hat on the grid");

  SimulateArgs sa;
  auto* sim = app.add_subcommand("simulate", "Monte Carlo ASE table for a simulation example");
  sim->add_option("--example", sa.example, "ex1|ex2|ex3")->capture_default_str();
  sim->add_option("--n", sa.sizes, "Comma-separated sample sizes")->capture_default_str();
  sim->add_option("--p", sa.p, "Comma-separated level fractions")->capture_default_str();
  sim->add_option("--methods", sa.methods, "Comma-separated methods")->capture_default_str();
  sim->add_option("--reps", sa.reps, "Replications")->capture_default_str();
  sim->add_option("--seed", sa.seed, "Base seed")->capture_default_str();
  sim->add_option("--grid", sa.grid, "ASE grid size")->capture_default_str();
  sim->add_option("--workers", sa.workers, "Worker threads (0 = all cores)")->capture_default_str();
  sim->add_option("--j0", sa.j0, "Coarsest level")->capture_default_str();
  sim->add_option("--filter", sa.filter, "Wavelet filter")->capture_default_str();
  sim->add_option("--threshold", sa.threshold, "hard|soft|none")->capture_default_str();
  sim->add_option("--aux", sa.aux, "kde_sj|wavelet|none")->capture_default_str();
  sim->add_option("--aux-level", sa.aux_level, "Level of the wavelet auxiliary estimate (-1 = floor(log2(n)/3))")
      ->capture_default_str();
  sim->add_option("--format", sa.format, "csv|json")->capture_default_str();
  sim->add_option("-o,--output", sa.output, "Table output (stdout when omitted)");
  sim->add_option("--raw", sa.raw, "Per-replication ASE CSV");
  sim->add_flag("--strict", sa.strict, "Exit 3 if any cell has a failed replication");
  sim->add_flag("--unnormalized", sa.raw_f, "Use the ex3 density as written (mass 0.875)");

  EffArgs fa;
  auto* eff = app.add_subcommand("eff", "Asymptotic relative efficiency curves");
  eff->add_option("--n", fa.n, "Sample size")->capture_default_str();
  eff->add_option("--k-min", fa.k_min, "Smallest k")->capture_default_str();
  eff->add_option("--k-max", fa.k_max, "Largest k")->capture_default_str();
  eff->add_option("--m", fa.m, "Comma-separated regularities")->capture_default_str();
  eff->add_option("--case", fa.which, "a_eq_1|a_ne_1|both")->capture_default_str();
  eff->add_option("-o,--output", fa.output, "CSV output (stdout when omitted)");

  TableArgs ta;
  auto* tab = app.add_subcommand("wavelet-table", "phi and psi on a dyadic grid");
  tab->add_option("--filter", ta.filter, "Wavelet filter")->capture_default_str();
  tab->add_option("--level", ta.level, "Grid spacing 2^-level")->capture_default_str();
  tab->add_option("--digits", ta.digits, "Dyadic digits used in evaluation")->capture_default_str();
  tab->add_option("-o,--output", ta.output, "CSV output (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kSuccess : kInputError;
  }

  try {
    if (*est) return cmd_estimate(ea, out);
    if (*sim) return cmd_simulate(sa, out, err);
    if (*eff) return cmd_eff(fa, out);
    if (*tab) return cmd_wavelet_table(ta, out);
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kComputeError;
  }
  return kInputError;
}

}  // namespace sbwave::cli
