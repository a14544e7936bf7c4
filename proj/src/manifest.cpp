#include "bofp/manifest.hpp"

#include <fstream>
#include <set>

#include "bofp/error.hpp"

namespace bofp {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

TwoFitOptions PipelineOptions::fit_options() const {
  TwoFitOptions o;
  o.likelihood = likelihood;
  o.dof = dof;
  o.M = M;
  o.burn_in = burn_in;
  o.seed = seed;
  o.prior_logvar_sd = prior_logvar_sd;
  o.kappa_cap = kappa_cap;
  return o;
}

ordered_json PipelineOptions::to_json() const {
  ordered_json j;
  j["basis"] = to_string(basis);
  j["likelihood"] = to_string(likelihood);
  j["dof"] = to_string(dof);
  j["kernel"] = to_string(kernel);
  j["area_weighting"] = area_weighting;
  j["M"] = M;
  j["burn_in"] = burn_in;
  j["seed"] = seed;
  j["credible_level"] = credible_level;
  j["kappa_cap"] = kappa_cap;
  j["prior_logvar_sd"] = prior_logvar_sd;
  j["window_years"] = window_years;
  j["annual_means"] = annual_means;
  return j;
}

namespace {

BasisKind parse_basis_kind(const std::string& s) {
  if (s == "laplace") return BasisKind::Laplacian;
  if (s == "eof") return BasisKind::PrincipalComponent;
  throw std::invalid_argument("unknown basis '" + s + "' (expected laplace or eof)");
}

template <typename T>
T get_as(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw DataError(std::string("manifest key '") + key + "': " + e.what());
  }
}

}  // namespace

PipelineOptions PipelineOptions::from_json(const json& j, PipelineOptions base) {
  if (!j.is_object()) throw DataError("manifest options must be an object");
  static const std::set<std::string> known = {
      "basis",  "likelihood",     "dof",       "kernel",          "area_weighting",
      "M",      "burn_in",        "seed",      "credible_level",  "kappa_cap",
      "prior_logvar_sd", "window_years", "annual_means"};
  for (const auto& [key, _] : j.items()) {
    if (!known.contains(key)) throw DataError("unknown manifest option '" + key + "'");
  }
  PipelineOptions o = base;
  try {
    if (j.contains("basis")) o.basis = parse_basis_kind(get_as<std::string>(j, "basis"));
    if (j.contains("likelihood")) {
      o.likelihood = parse_kappa_likelihood(get_as<std::string>(j, "likelihood"));
    }
    if (j.contains("dof")) o.dof = parse_chi_square_dof(get_as<std::string>(j, "dof"));
    if (j.contains("kernel")) o.kernel = parse_kernel_variant(get_as<std::string>(j, "kernel"));
  } catch (const std::invalid_argument& e) {
    throw DataError(e.what());
  }
  if (j.contains("area_weighting")) o.area_weighting = get_as<bool>(j, "area_weighting");
  if (j.contains("M")) o.M = get_as<long>(j, "M");
  if (j.contains("burn_in")) o.burn_in = get_as<long>(j, "burn_in");
  if (j.contains("seed")) o.seed = get_as<std::uint64_t>(j, "seed");
  if (j.contains("credible_level")) o.credible_level = get_as<double>(j, "credible_level");
  if (j.contains("kappa_cap")) o.kappa_cap = get_as<long>(j, "kappa_cap");
  if (j.contains("prior_logvar_sd")) o.prior_logvar_sd = get_as<double>(j, "prior_logvar_sd");
  if (j.contains("window_years")) o.window_years = get_as<int>(j, "window_years");
  if (j.contains("annual_means")) o.annual_means = get_as<bool>(j, "annual_means");

  if (o.M < 1 || o.burn_in < 0) throw DataError("M must be >= 1 and burn_in >= 0");
  if (!(o.credible_level > 0.0 && o.credible_level < 1.0)) {
    throw DataError("credible_level must lie in (0, 1)");
  }
  if (o.kappa_cap < 0) throw DataError("kappa_cap must be >= 0");
  if (!(o.prior_logvar_sd > 0.0)) throw DataError("prior_logvar_sd must be positive");
  if (o.window_years < 1) throw DataError("window_years must be >= 1");
  return o;
}

PipelineOptions PipelineOptions::from_json(const json& j) {
  return from_json(j, PipelineOptions{});
}

std::vector<DatasetEntry> Manifest::with_role(const std::string& role) const {
  std::vector<DatasetEntry> out;
  for (const DatasetEntry& d : datasets) {
    if (d.role == role) out.push_back(d);
  }
  return out;
}

ordered_json synthetic_spec_to_json(const SyntheticStudySpec& s) {
  ordered_json j;
  j["n_control_models"] = s.n_control_models;
  j["n_forced_models"] = s.n_forced_models;
  j["n_P"] = s.n_P;
  j["n_H"] = s.n_H;
  j["n_active"] = s.n_active;
  j["amplitude"] = s.amplitude;
  j["exponent"] = s.exponent;
  j["mismatch_log_sd"] = s.mismatch_log_sd;
  j["mismatch_rho"] = s.mismatch_rho;
  j["signal_scale"] = s.signal_scale;
  j["signal_decay"] = s.signal_decay;
  j["seed"] = s.seed;
  return j;
}

SyntheticStudySpec synthetic_spec_from_json(const json& j) {
  if (!j.is_object()) throw DataError("synthetic block must be an object");
  static const std::set<std::string> known = {
      "n_control_models", "n_forced_models", "n_P",          "n_H",
      "n_active",         "amplitude",       "exponent",     "mismatch_log_sd",
      "mismatch_rho",     "signal_scale",    "signal_decay", "seed"};
  for (const auto& [key, _] : j.items()) {
    if (!known.contains(key)) throw DataError("unknown synthetic option '" + key + "'");
  }
  SyntheticStudySpec s;
  if (j.contains("n_control_models")) s.n_control_models = get_as<std::size_t>(j, "n_control_models");
  if (j.contains("n_forced_models")) s.n_forced_models = get_as<std::size_t>(j, "n_forced_models");
  if (j.contains("n_P")) s.n_P = get_as<std::size_t>(j, "n_P");
  if (j.contains("n_H")) s.n_H = get_as<std::size_t>(j, "n_H");
  if (j.contains("n_active")) s.n_active = get_as<Eigen::Index>(j, "n_active");
  if (j.contains("amplitude")) s.amplitude = get_as<double>(j, "amplitude");
  if (j.contains("exponent")) s.exponent = get_as<double>(j, "exponent");
  if (j.contains("mismatch_log_sd")) s.mismatch_log_sd = get_as<double>(j, "mismatch_log_sd");
  if (j.contains("mismatch_rho")) s.mismatch_rho = get_as<double>(j, "mismatch_rho");
  if (j.contains("signal_scale")) s.signal_scale = get_as<double>(j, "signal_scale");
  if (j.contains("signal_decay")) s.signal_decay = get_as<double>(j, "signal_decay");
  if (j.contains("seed")) s.seed = get_as<std::uint64_t>(j, "seed");
  return s;
}

Manifest parse_manifest(const json& j, const fs::path& base_dir) {
  if (!j.is_object()) throw DataError("manifest must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (key != "grid" && key != "datasets" && key != "options" && key != "synthetic") {
      throw DataError("unknown manifest key '" + key + "'");
    }
  }
  Manifest m;
  m.base_dir = base_dir;
  if (!j.contains("grid")) throw DataError("manifest has no grid");
  m.n_lat = get_as<std::size_t>(j.at("grid"), "n_lat");
  m.n_lon = get_as<std::size_t>(j.at("grid"), "n_lon");
  if (m.n_lat < 2 || m.n_lon < 2) throw DataError("manifest grid needs n_lat, n_lon >= 2");

  if (j.contains("datasets")) {
    const json& ds = j.at("datasets");
    if (!ds.is_array()) throw DataError("manifest datasets must be an array");
    for (const json& d : ds) {
      DatasetEntry e;
      e.role = get_as<std::string>(d, "role");
      if (e.role != "control" && e.role != "historical" && e.role != "observation") {
        throw DataError("dataset role '" + e.role + "' is not control, historical or observation");
      }
      e.model_id = d.contains("model_id") ? get_as<std::string>(d, "model_id") : std::string();
      fs::path p = get_as<std::string>(d, "path");
      e.path = p.is_absolute() ? p : base_dir / p;
      if (!fs::exists(e.path)) throw DataError("dataset path does not exist: " + e.path.string());
      m.datasets.push_back(std::move(e));
    }
  }
  if (j.contains("options")) m.options = PipelineOptions::from_json(j.at("options"));
  if (j.contains("synthetic")) m.synthetic = synthetic_spec_from_json(j.at("synthetic"));
  if (m.synthetic) {
    m.synthetic->n_lat = m.n_lat;
    m.synthetic->n_lon = m.n_lon;
  }
  return m;
}

Manifest load_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open manifest: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw DataError("manifest " + path.string() + ": " + e.what());
  }
  return parse_manifest(j, fs::absolute(path).parent_path());
}

}  // namespace bofp
