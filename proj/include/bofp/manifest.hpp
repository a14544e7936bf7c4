#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bofp/basis.hpp"
#include "bofp/bayes.hpp"
#include "bofp/laplacian_basis.hpp"
#include "bofp/synthetic.hpp"

namespace bofp {

struct PipelineOptions {
  BasisKind basis = BasisKind::Laplacian;
  KappaLikelihood likelihood = KappaLikelihood::ChiSquared;
  ChiSquareDof dof = ChiSquareDof::KappaMinusOne;
  KernelVariant kernel = KernelVariant::HalfAngle;
  bool area_weighting = true;
  long M = 2000;
  long burn_in = 1000;
  std::uint64_t seed = 0;
  double credible_level = 0.90;
  long kappa_cap = 400;
  double prior_logvar_sd = 1.0;
  int window_years = 25;
  bool annual_means = false;

  TwoFitOptions fit_options() const;
  nlohmann::ordered_json to_json() const;
  /// Overlays keys present in `j` onto `base`; unknown keys are rejected.
  static PipelineOptions from_json(const nlohmann::json& j, PipelineOptions base);
  static PipelineOptions from_json(const nlohmann::json& j);
};

struct DatasetEntry {
  std::string role;  // control | historical | observation
  std::filesystem::path path;
  std::string model_id;
};

struct Manifest {
  std::size_t n_lat = 0;
  std::size_t n_lon = 0;
  std::vector<DatasetEntry> datasets;
  PipelineOptions options;
  std::optional<SyntheticStudySpec> synthetic;
  std::filesystem::path base_dir;

  std::vector<DatasetEntry> with_role(const std::string& role) const;
};

/// Parses a JSON manifest. Relative dataset paths resolve against the
/// manifest's directory; every path must exist.
Manifest load_manifest(const std::filesystem::path& path);
Manifest parse_manifest(const nlohmann::json& j, const std::filesystem::path& base_dir);

nlohmann::ordered_json synthetic_spec_to_json(const SyntheticStudySpec& s);
SyntheticStudySpec synthetic_spec_from_json(const nlohmann::json& j);

}  // namespace bofp
