// bofp: command-line front end for Bayesian optimal fingerprinting.
//
// Exit codes: 0 success, 1 usage, 2 data error, 3 numerical failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "bofp/error.hpp"
#include "bofp/gls.hpp"
#include "bofp/io.hpp"
#include "bofp/manifest.hpp"
#include "bofp/metrics.hpp"
#include "bofp/pipeline.hpp"
#include "bofp/trends.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using bofp::DatasetEntry;
using bofp::Manifest;
using bofp::PipelineOptions;
using bofp::GridPtr;
using bofp::build_grid;
using bofp::load_manifest;
using bofp::synthetic_spec_to_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumerical = 3;

struct Globals {
  std::optional<std::uint64_t> seed;
  std::string manifest;
  std::string out_dir = ".";
  int threads = 1;
  std::string basis;
  std::string klik;
  std::string cache_dir;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Context {
  std::string command;
  Manifest manifest;
  bool have_manifest = false;
  PipelineOptions options;
  GridPtr grid;
  fs::path out_dir;
  fs::path cache_dir;
  ordered_json extra = ordered_json::object();

  // Resolved configuration written at the top of every output file. Worker
  // count is left out because it never changes results.
  std::string provenance() const {
    ordered_json j;
    j["command"] = command;
    if (have_manifest) j["manifest"] = manifest_path;
    if (grid) j["grid"] = {{"n_lat", grid->n_lat()}, {"n_lon", grid->n_lon()}};
    j["options"] = options.to_json();
    if (have_manifest) {
      ordered_json ds = ordered_json::array();
      for (const DatasetEntry& d : manifest.datasets) {
        ds.push_back({{"role", d.role}, {"path", d.path.lexically_relative(manifest.base_dir).string()},
                      {"model_id", d.model_id}});
      }
      j["datasets"] = ds;
      if (manifest.synthetic) j["synthetic"] = synthetic_spec_to_json(*manifest.synthetic);
    }
    if (!extra.empty()) j["args"] = extra;
    return "config " + j.dump();
  }

  fs::path out(const std::string& name) const { return out_dir / name; }

  std::string manifest_path;
};

Context make_context(const std::string& command, const Globals& g, bool need_manifest) {
  Context c;
  c.command = command;
  if (!g.manifest.empty()) {
    c.manifest = load_manifest(g.manifest);
    c.manifest_path = g.manifest;
    c.have_manifest = true;
    c.options = c.manifest.options;
    c.grid = build_grid(c.manifest.n_lat, c.manifest.n_lon);
  } else if (need_manifest) {
    throw UsageError(command + " needs --manifest");
  }
  if (g.seed) c.options.seed = *g.seed;
  try {
    if (!g.basis.empty()) {
      c.options = PipelineOptions::from_json(nlohmann::json{{"basis", g.basis}}, c.options);
    }
    if (!g.klik.empty()) {
      c.options = PipelineOptions::from_json(nlohmann::json{{"likelihood", g.klik}}, c.options);
    }
  } catch (const bofp::DataError& e) {
    throw UsageError(e.what());
  }
  if (g.threads < 1) throw UsageError("--threads must be >= 1");
  c.out_dir = g.out_dir;
  fs::create_directories(c.out_dir);
  c.cache_dir = g.cache_dir.empty() ? c.out_dir / "cache" : fs::path(g.cache_dir);
  return c;
}

bofp::BasisPtr laplacian_if_needed(const Context& c) {
  if (c.options.basis != bofp::BasisKind::Laplacian) return nullptr;
  return bofp::obtain_laplacian_basis(c.grid, c.options.kernel, c.cache_dir);
}

void write_json(const fs::path& path, const ordered_json& j) {
  std::ofstream out(path);
  if (!out) throw bofp::DataError("cannot open for writing: " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw bofp::DataError("write failed: " + path.string());
}

std::string safe_name(std::string s) {
  for (char& ch : s) {
    if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '-' || ch == '_' || ch == '.')) ch = '_';
  }
  return s;
}

// ---- basis -------------------------------------------------------------------

struct BasisArgs {
  std::size_t n_lat = 0;
  std::size_t n_lon = 0;
  std::string kernel;
  int n_vectors = 9;
};

int cmd_basis(const Globals& g, const BasisArgs& a) {
  Context c = make_context("basis", g, false);
  if (a.n_lat || a.n_lon) {
    if (!a.n_lat || !a.n_lon) throw UsageError("--n-lat and --n-lon go together");
    c.grid = bofp::build_grid(a.n_lat, a.n_lon);
  }
  if (!c.grid) throw UsageError("basis needs --manifest or --n-lat/--n-lon");
  if (!a.kernel.empty()) {
    try {
      c.options.kernel = bofp::parse_kernel_variant(a.kernel);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  c.options.basis = bofp::BasisKind::Laplacian;
  c.extra = {{"n_vectors", a.n_vectors}};
  const auto basis = bofp::obtain_laplacian_basis(c.grid, c.options.kernel, c.cache_dir);

  bofp::VarianceSpectrum eig{bofp::BasisKind::Laplacian, basis->eigenvalues, 0};
  bofp::io::write_spectrum(c.out("basis_eigenvalues.csv"), "operator", eig, c.provenance());
  std::vector<bofp::io::LabeledField> leading;
  const int n = std::min<int>(a.n_vectors, static_cast<int>(basis->n_basis()));
  for (int j = 0; j < n; ++j) {
    leading.push_back({"basis", "l" + std::to_string(j + 1), bofp::FieldVector(c.grid, basis->vectors.col(j))});
  }
  bofp::io::write_field_file(c.out("basis_vectors.txt"), leading, c.provenance());
  std::cout << "basis " << c.grid->n_lat() << "x" << c.grid->n_lon() << " ("
            << bofp::to_string(c.options.kernel) << "): " << basis->n_basis() << " vectors, cache "
            << bofp::io::basis_cache_path(c.cache_dir, *c.grid, c.options.kernel).string() << "\n";
  return kExitOk;
}

// ---- trends ------------------------------------------------------------------

struct TrendArgs {
  std::vector<std::string> inputs;
  std::string output = "trends.txt";
  std::vector<double> period;
  std::optional<int> window;
  bool annual = false;
};

int cmd_trends(const Globals& g, TrendArgs a) {
  Context c = make_context("trends", g, true);
  if (a.window) c.options.window_years = *a.window;
  if (a.annual) c.options.annual_means = true;
  if (!a.period.empty() && a.period.size() != 2) throw UsageError("--period takes START END");
  std::vector<fs::path> inputs;
  for (const std::string& s : a.inputs) inputs.emplace_back(s);
  if (inputs.empty()) throw UsageError("trends needs at least one --input series file");
  c.extra = {{"inputs", a.inputs}, {"output", a.output}, {"period", a.period}};

  std::vector<bofp::io::LabeledField> out;
  for (const fs::path& p : inputs) {
    for (bofp::GriddedSeries s : bofp::io::read_series_file(p, c.grid)) {
      if (c.options.annual_means) s = bofp::annual_means(s);
      if (s.role == "control") {
        for (const bofp::GriddedSeries& seg : bofp::segment_control(s, c.options.window_years)) {
          out.push_back({s.role, s.model_id, bofp::trend_field(seg)});
        }
        continue;
      }
      if (!a.period.empty()) {
        std::size_t lo = 0, hi = s.n_time();
        while (lo < s.n_time() && s.times[lo] < a.period[0]) ++lo;
        while (hi > lo && s.times[hi - 1] >= a.period[1]) --hi;
        if (hi - lo < 3) throw bofp::DataError(p.string() + ": fewer than 3 time steps in --period");
        bofp::GriddedSeries w = s;
        w.times.assign(s.times.begin() + static_cast<std::ptrdiff_t>(lo),
                       s.times.begin() + static_cast<std::ptrdiff_t>(hi));
        w.values = s.values.middleRows(static_cast<Eigen::Index>(lo), static_cast<Eigen::Index>(hi - lo));
        s = std::move(w);
      }
      out.push_back({s.role, s.model_id, bofp::trend_field(s)});
    }
  }
  bofp::io::write_field_file(c.out(a.output), out, c.provenance());
  std::cout << "wrote " << out.size() << " trend fields to " << c.out(a.output).string() << "\n";
  return kExitOk;
}

// ---- spectrum ----------------------------------------------------------------

int cmd_spectrum(const Globals& g) {
  Context c = make_context("spectrum", g, true);
  const auto controls = bofp::load_controls(c.manifest, c.grid);
  if (controls.empty()) throw bofp::DataError("manifest lists no control datasets");
  const auto laplacian = laplacian_if_needed(c);
  const fs::path path = c.out("spectrum.csv");
  bool append = false;
  for (const bofp::ControlEnsemble& ctrl : controls) {
    const auto setup =
        bofp::covariance_setup(bofp::prepare_ensemble(ctrl, c.options), c.options.basis, laplacian);
    bofp::io::write_spectrum(path, ctrl.model_id, setup.spectrum, c.provenance(), append);
    append = true;
  }
  std::cout << "wrote spectra of " << controls.size() << " control models to " << path.string() << "\n";
  return kExitOk;
}

// ---- fit ---------------------------------------------------------------------

ordered_json fit_json(const std::string& model_id, const bofp::FitResult& r, double level) {
  ordered_json j;
  j["control"] = model_id;
  j["beta_post_mean"] = r.beta_post_mean;
  j["beta_post_sd"] = r.beta_post_sd;
  j["kappa_post"] = r.kappa_post;
  const double tail = 0.5 * (1.0 - level);
  const std::span<const double> b(r.samples.beta.data(), static_cast<std::size_t>(r.samples.beta.size()));
  j["credible_level"] = level;
  j["ci_low"] = bofp::quantile(b, tail);
  j["ci_high"] = bofp::quantile(b, 1.0 - tail);
  const double det = bofp::detection_statistic(r);
  j["detection_statistic"] = det;
  j["detected"] = bofp::detected(det);
  j["attribution_statistic"] = bofp::attribution_statistic(r);
  j["attributed"] = bofp::attributed(r);
  j["converged"] = r.converged;
  j["oscillation_broken"] = r.oscillation_broken;
  j["n_iterations"] = r.n_iterations;
  j["kappa_trace"] = r.kappa_trace;
  ordered_json probs = ordered_json::object();
  for (Eigen::Index k = r.kappa_posterior.kappa_min; k <= r.kappa_posterior.kappa_max(); ++k) {
    const double p = r.kappa_posterior.probability(k);
    if (p > 1e-12) probs[std::to_string(k)] = p;
  }
  j["kappa_posterior"] = probs;
  return j;
}

std::vector<bofp::FieldVector> fields_of(const Manifest& m, const std::string& role, const bofp::GridPtr& g) {
  std::vector<bofp::FieldVector> out;
  for (const DatasetEntry& d : m.with_role(role)) {
    for (auto& lf : bofp::io::read_field_file(d.path, g)) out.push_back(std::move(lf.field));
  }
  return out;
}

int cmd_fit(const Globals& g, const std::string& control_id) {
  Context c = make_context("fit", g, true);
  c.extra = {{"control", control_id}};
  const auto obs = fields_of(c.manifest, "observation", c.grid);
  if (obs.size() != 1) {
    throw bofp::DataError("fit needs exactly one observation field, manifest gives " + std::to_string(obs.size()));
  }
  const auto forced = fields_of(c.manifest, "historical", c.grid);
  if (forced.empty()) throw bofp::DataError("fit needs at least one historical field");
  auto controls = bofp::load_controls(c.manifest, c.grid);
  if (!control_id.empty()) {
    std::erase_if(controls, [&](const bofp::ControlEnsemble& e) { return e.model_id != control_id; });
  }
  if (controls.empty()) throw bofp::DataError("no matching control datasets");
  const auto laplacian = laplacian_if_needed(c);

  ordered_json doc;
  doc["provenance"] = c.provenance();
  doc["fits"] = ordered_json::array();
  for (const bofp::ControlEnsemble& ctrl : controls) {
    const bofp::FitResult r = bofp::fit_observation(obs.front(), forced, ctrl, c.options, laplacian);
    const ordered_json j = fit_json(ctrl.model_id, r, c.options.credible_level);
    doc["fits"].push_back(j);
    bofp::io::write_chain(c.out("chain_" + safe_name(ctrl.model_id) + ".csv"), r.samples, c.provenance());
    std::cout << ctrl.model_id << ": beta_post_mean=" << bofp::io::format_double(r.beta_post_mean)
              << " beta_post_sd=" << bofp::io::format_double(r.beta_post_sd) << " kappa_post=" << r.kappa_post
              << " detection=" << bofp::io::format_double(j["detection_statistic"].get<double>())
              << (j["detected"].get<bool>() ? " (detected)" : "")
              << " attribution=" << bofp::io::format_double(j["attribution_statistic"].get<double>())
              << (j["attributed"].get<bool>() ? " (attributed)" : "") << (r.converged ? "" : " [not converged]")
              << "\n";
  }
  write_json(c.out("fit.json"), doc);
  return kExitOk;
}

// ---- validate ----------------------------------------------------------------

int cmd_validate(const Globals& g) {
  Context c = make_context("validate", g, true);
  std::vector<bofp::ControlEnsemble> controls = bofp::load_controls(c.manifest, c.grid);
  std::vector<bofp::ForcedEnsemble> historicals = bofp::load_historicals(c.manifest, c.grid);
  bofp::BasisPtr laplacian;
  if (controls.empty() && historicals.empty() && c.manifest.synthetic) {
    // Generated in the Laplacian basis of the manifest grid.
    laplacian = bofp::obtain_laplacian_basis(c.grid, c.options.kernel, c.cache_dir);
    const auto study =
        bofp::generate_synthetic_study(*c.manifest.synthetic, laplacian, c.options.area_weighting);
    controls = study.controls;
    historicals = study.historicals;
  } else if (c.options.basis == bofp::BasisKind::Laplacian) {
    laplacian = bofp::obtain_laplacian_basis(c.grid, c.options.kernel, c.cache_dir);
  }
  if (controls.empty()) throw bofp::DataError("validate needs control datasets or a synthetic block");
  if (historicals.empty()) throw bofp::DataError("validate needs historical datasets or a synthetic block");

  const bofp::StudyConfig cfg =
      bofp::make_study_config(std::move(controls), std::move(historicals), c.options, laplacian, g.threads);
  const auto records = bofp::run_validation(cfg);
  const auto pairs = bofp::aggregate_pairs(records);
  const auto summaries = bofp::summarize_by_control(pairs);
  bofp::io::write_records(c.out("records.csv"), records, c.provenance());
  bofp::io::write_pair_aggregates(c.out("pairs.csv"), pairs, c.provenance());
  bofp::io::write_control_summaries(c.out("summary.csv"), summaries, c.provenance());

  std::size_t failed = 0;
  for (const auto& r : records) failed += r.ok() ? 0 : 1;
  std::cout << "validate: " << records.size() << " records";
  if (failed) std::cout << ", " << failed << " failed fits (see error column)";
  std::cout << "\n";
  for (const auto& p : pairs) {
    std::cout << "  c=" << p.c << " f=" << p.f << " n=" << p.n << " coverage=" << bofp::io::format_double(p.coverage)
              << " rmse=" << bofp::io::format_double(p.rmse) << " crps=" << bofp::io::format_double(p.mean_crps)
              << " median_kappa=" << bofp::io::format_double(p.median_kappa) << "\n";
  }
  return kExitOk;
}

// ---- gls ---------------------------------------------------------------------

int cmd_gls(const Globals& g, std::vector<long> kappas) {
  Context c = make_context("gls", g, true);
  c.extra = {{"kappa", kappas}};
  const auto obs = fields_of(c.manifest, "observation", c.grid);
  if (obs.size() != 1) throw bofp::DataError("gls needs exactly one observation field");
  const auto forced = fields_of(c.manifest, "historical", c.grid);
  if (forced.empty()) throw bofp::DataError("gls needs at least one historical field");
  const auto controls = bofp::load_controls(c.manifest, c.grid);
  if (controls.empty()) throw bofp::DataError("gls needs control datasets");
  const auto laplacian = laplacian_if_needed(c);

  Eigen::VectorXd mean = Eigen::VectorXd::Zero(obs.front().values.size());
  for (const auto& f : forced) mean += f.values;
  const bofp::FieldVector x = bofp::prepare_field(bofp::FieldVector(c.grid, mean / double(forced.size())), c.options);
  const bofp::FieldVector y = bofp::prepare_field(obs.front(), c.options);

  const fs::path path = c.out("gls.csv");
  std::ofstream out(path);
  if (!out) throw bofp::DataError("cannot open for writing: " + path.string());
  out << "# " << c.provenance() << "\n";
  out << "control,kappa,beta_hat,se,residual_statistic\n";
  for (const auto& ctrl : controls) {
    const auto setup = bofp::covariance_setup(bofp::prepare_ensemble(ctrl, c.options), c.options.basis, laplacian);
    bofp::ProjectedProblem p;
    p.y_star = setup.basis->vectors.transpose() * y.values;
    p.x_star = setup.basis->vectors.transpose() * x.values;
    p.lambda_hat = setup.spectrum.lambdas;
    const Eigen::Index kmax = p.admissible_kappa_max(c.options.kappa_cap);
    std::vector<long> ks = kappas;
    if (ks.empty()) {
      for (long k = 1; k <= kmax; ++k) ks.push_back(k);
    }
    for (long k : ks) {
      if (k < 1 || k > kmax) {
        throw UsageError("kappa " + std::to_string(k) + " outside 1.." + std::to_string(kmax) + " for " + ctrl.model_id);
      }
      bofp::ProjectedRegressionData d{p.x_star.head(k), p.y_star.head(k), p.lambda_hat.head(k)};
      const double b = bofp::gls_beta(d);
      out << ctrl.model_id << ',' << k << ',' << bofp::io::format_double(b) << ','
          << bofp::io::format_double(bofp::gls_stderr(d)) << ','
          << bofp::io::format_double(bofp::residual_statistic(d, b)) << '\n';
    }
  }
  if (!out) throw bofp::DataError("write failed: " + path.string());
  std::cout << "wrote closed-form estimates to " << path.string() << "\n";
  return kExitOk;
}

// ---- synth -------------------------------------------------------------------

int cmd_synth(const Globals& g, const std::string& name) {
  Context c = make_context("synth", g, true);
  if (!c.manifest.synthetic) throw bofp::DataError("manifest has no synthetic block");
  const auto laplacian = bofp::obtain_laplacian_basis(c.grid, c.options.kernel, c.cache_dir);
  // Files hold physical-space fields; the pipeline's area weighting undoes the scaling.
  const auto study = bofp::generate_synthetic_study(*c.manifest.synthetic, laplacian, c.options.area_weighting);
  std::vector<bofp::io::LabeledField> ctrl, hist, obs;
  for (const auto& e : study.controls)
    for (const auto& f : e.fields) ctrl.push_back({"control", e.model_id, f});
  for (std::size_t f = 0; f < study.historicals.size(); ++f) {
    const auto& h = study.historicals[f];
    for (std::size_t k = 0; k < h.members.size(); ++k) {
      // The last member of the first forced model stands in for observations.
      if (f == 0 && k + 1 == h.members.size()) obs.push_back({"observation", "obs", h.members[k]});
      else hist.push_back({"historical", h.model_id, h.members[k]});
    }
  }
  const std::string prov = c.provenance();
  bofp::io::write_field_file(c.out(name + "_control.txt"), ctrl, prov);
  bofp::io::write_field_file(c.out(name + "_historical.txt"), hist, prov);
  bofp::io::write_field_file(c.out(name + "_observation.txt"), obs, prov);
  std::cout << "wrote " << ctrl.size() << " control, " << hist.size() << " historical and " << obs.size()
            << " observation fields under " << c.out_dir.string() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian optimal fingerprinting with Laplacian and EOF covariance bases", "bofp"};
  app.require_subcommand(1);
  Globals g;
  std::uint64_t seed_value = 0;
  auto* seed_opt = app.add_option("--seed", seed_value, "Base random seed (overrides the manifest)");
  app.add_option("--manifest", g.manifest, "JSON manifest describing grid, datasets and options");
  app.add_option("--out-dir", g.out_dir, "Directory for output files")->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads for the validation sweep")->capture_default_str();
  app.add_option("--basis", g.basis, "Covariance basis")->check(CLI::IsMember({"laplace", "eof"}));
  app.add_option("--klik", g.klik, "Likelihood for the truncation number")->check(CLI::IsMember({"chi2", "normal"}));
  app.add_option("--cache-dir", g.cache_dir, "Basis cache directory (default <out-dir>/cache)");

  BasisArgs basis_args;
  auto* basis = app.add_subcommand("basis", "Compute or load the Laplacian basis for a grid")->fallthrough();
  basis->add_option("--n-lat", basis_args.n_lat, "Latitude count (default from manifest)");
  basis->add_option("--n-lon", basis_args.n_lon, "Longitude count (default from manifest)");
  basis->add_option("--kernel", basis_args.kernel, "Off-diagonal kernel")->check(CLI::IsMember({"half_angle", "as_printed"}));
  basis->add_option("--n-vectors", basis_args.n_vectors, "Leading vectors to write")->capture_default_str();

  TrendArgs trend_args;
  auto* trends = app.add_subcommand("trends", "Gridded series to trend fields (controls are segmented)")->fallthrough();
  trends->add_option("--input", trend_args.inputs, "Gridded series file")->required();
  trends->add_option("--output", trend_args.output, "Output field file name")->capture_default_str();
  trends->add_option("--period", trend_args.period, "START END: restrict non-control series to [START, END)")
      ->expected(2);
  trends->add_option("--window", trend_args.window, "Control segment length in years");
  trends->add_flag("--annual-means", trend_args.annual, "Average to annual means before fitting");

  auto* spectrum = app.add_subcommand("spectrum", "Empirical variances of each control model")->fallthrough();

  std::string control_id;
  auto* fit = app.add_subcommand("fit", "Two-fit estimate of beta for the observation")->fallthrough();
  fit->add_option("--control", control_id, "Only fit with this control model");

  auto* validate = app.add_subcommand("validate", "Leave-one-out known-truth study")->fallthrough();

  std::vector<long> kappas;
  auto* gls = app.add_subcommand("gls", "Closed-form GLS estimates at fixed truncations")->fallthrough();
  gls->add_option("--kappa", kappas, "Truncation numbers (default: every admissible value)");

  std::string synth_name = "synthetic";
  auto* synth = app.add_subcommand("synth", "Write a synthetic example data set from the manifest")->fallthrough();
  synth->add_option("--name", synth_name, "File name prefix")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }
  if (seed_opt->count() > 0) g.seed = seed_value;

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    if (basis->parsed()) return cmd_basis(g, basis_args);
    if (trends->parsed()) return cmd_trends(g, trend_args);
    if (spectrum->parsed()) return cmd_spectrum(g);
    if (fit->parsed()) return cmd_fit(g, control_id);
    if (validate->parsed()) return cmd_validate(g);
    if (gls->parsed()) return cmd_gls(g, kappas);
    if (synth->parsed()) return cmd_synth(g, synth_name);
  } catch (const UsageError& e) {
    std::cerr << "bofp " << command << ": " << e.what() << "\n";
    return kExitUsage;
  } catch (const bofp::DataError& e) {
    std::cerr << "bofp " << command << ": data error: " << e.what() << "\n";
    return kExitData;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "bofp " << command << ": data error: " << e.what() << "\n";
    return kExitData;
  } catch (const bofp::NumericalError& e) {
    std::cerr << "bofp " << command << ": numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "bofp " << command << ": invalid input: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::out_of_range& e) {
    std::cerr << "bofp " << command << ": invalid input: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "bofp " << command << ": numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitUsage;
}
