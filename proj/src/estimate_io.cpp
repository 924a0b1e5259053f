#include "sbwave/estimate_io.hpp"

#include <stdexcept>

#include <json.hpp>

namespace sbwave {

using nlohmann::json;

std::string estimate_to_json(const PowerDensityEstimate& estimate, int indent) {
  const auto& cfg = estimate.config();
  const auto& warp = estimate.warp();
  if (warp.kind() == WarpKind::parametric)
    throw std::invalid_argument("parametric warps cannot be serialized");
  const auto& co = estimate.coefficients();
  const auto& tr = estimate.transform();
  const auto& dg = estimate.diagnostics();

  json doc;
  doc["format"] = "sbwave-estimate";
  doc["version"] = kEstimateFormatVersion;
  doc["config"] = {
      {"power", cfg.power},
      {"j0", cfg.j0},
      {"j1", cfg.j1},
      {"warp", to_string(cfg.warp_kind)},
      {"threshold", to_string(cfg.threshold)},
      {"aux", to_string(cfg.aux)},
      {"filter", cfg.filter},
      {"n_dyadic_digits", cfg.precision.n_dyadic_digits},
      {"epsilon", cfg.resolved_epsilon()},
      {"density_floor", cfg.density_floor},
      {"mad_normalize", cfg.mad_normalize},
      {"aux_level", cfg.aux_level},
  };
  doc["transform"] = {{"q", tr.q}, {"s", tr.s}, {"epsilon", tr.epsilon}};
  doc["warp"] = {{"kind", to_string(warp.kind())}, {"knots", warp.knots()}};
  doc["mu_hat"] = estimate.mu_hat();
  doc["coefficients"] = {
      {"c", co.c}, {"d", co.d}, {"d_star", co.d_star}, {"sigma_hat", co.sigma_hat}, {"lambda", co.lambda},
  };
  doc["diagnostics"] = {
      {"n", dg.n},
      {"aux_clamped", dg.aux_clamped},
      {"aux_bandwidth", dg.aux_bandwidth},
      {"aux_fallback", dg.aux_fallback},
      {"retained_details", dg.retained_details},
  };
  return doc.dump(indent);
}

PowerDensityEstimate estimate_from_json(const std::string& text) {
  try {
    const json doc = json::parse(text);
    if (doc.at("format").get<std::string>() != "sbwave-estimate")
      throw std::invalid_argument("not an estimate document");
    const int version = doc.at("version").get<int>();
    if (version != kEstimateFormatVersion)
      throw std::invalid_argument("unsupported estimate format version " + std::to_string(version));

    const auto& c = doc.at("config");
    EstimatorConfig cfg;
    cfg.power = c.at("power").get<double>();
    cfg.j0 = c.at("j0").get<int>();
    cfg.j1 = c.at("j1").get<int>();
    cfg.warp_kind = parse_warp_kind(c.at("warp").get<std::string>());
    cfg.threshold = parse_threshold_mode(c.at("threshold").get<std::string>());
    cfg.aux = parse_aux_kind(c.at("aux").get<std::string>());
    cfg.filter = c.at("filter").get<std::string>();
    cfg.precision.n_dyadic_digits = c.at("n_dyadic_digits").get<int>();
    cfg.epsilon = c.at("epsilon").get<double>();
    cfg.density_floor = c.at("density_floor").get<double>();
    cfg.mad_normalize = c.at("mad_normalize").get<bool>();
    cfg.aux_level = c.at("aux_level").get<int>();

    const auto& t = doc.at("transform");
    DomainTransform tr{t.at("q").get<double>(), t.at("s").get<double>(), t.at("epsilon").get<double>()};

    const auto& w = doc.at("warp");
    const WarpKind kind = parse_warp_kind(w.at("kind").get<std::string>());
    WarpFunction warp = WarpFunction::identity();
    if (kind == WarpKind::empirical)
      warp = WarpFunction::from_knots(w.at("knots").get<std::vector<double>>());
    else if (kind != WarpKind::identity)
      throw std::invalid_argument("parametric warps cannot be deserialized");

    const auto& co = doc.at("coefficients");
    CoefficientSet coeffs;
    coeffs.c = co.at("c").get<std::vector<double>>();
    coeffs.d = co.at("d").get<DetailCoefficients>();
    coeffs.d_star = co.at("d_star").get<DetailCoefficients>();
    coeffs.sigma_hat = co.at("sigma_hat").get<double>();
    coeffs.lambda = co.at("lambda").get<double>();

    const auto& d = doc.at("diagnostics");
    EstimateDiagnostics diag;
    diag.n = d.at("n").get<std::size_t>();
    diag.aux_clamped = d.at("aux_clamped").get<std::size_t>();
    diag.aux_bandwidth = d.at("aux_bandwidth").get<double>();
    diag.aux_fallback = d.at("aux_fallback").get<bool>();
    diag.retained_details = d.at("retained_details").get<std::size_t>();

    return PowerDensityEstimate(cfg, tr, std::move(warp), std::move(coeffs), doc.at("mu_hat").get<double>(),
                                diag);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed estimate document: ") + e.what());
  }
}

}  // namespace sbwave
