#include "bofp/pipeline.hpp"

#include <map>
#include <stdexcept>

#include "bofp/error.hpp"
#include "bofp/io.hpp"

namespace bofp {

BasisPtr obtain_laplacian_basis(const GridPtr& grid, KernelVariant variant,
                                const std::filesystem::path& cache_dir) {
  if (!cache_dir.empty()) {
    const auto path = io::basis_cache_path(cache_dir, *grid, variant);
    if (auto cached = io::load_basis_cache(path, grid, variant)) {
      return std::make_shared<const BasisSet>(std::move(*cached));
    }
    auto basis = std::make_shared<const BasisSet>(compute_laplacian_basis(grid, variant));
    io::save_basis_cache(path, *basis, variant);
    return basis;
  }
  return std::make_shared<const BasisSet>(compute_laplacian_basis(grid, variant));
}

FieldVector prepare_field(const FieldVector& f, const PipelineOptions& options) {
  if (!options.area_weighting) return f;
  return area_weight_field(*f.grid, f);
}

ControlEnsemble prepare_ensemble(const ControlEnsemble& ens, const PipelineOptions& options) {
  ControlEnsemble out{ens.model_id, {}};
  out.fields.reserve(ens.fields.size());
  for (const FieldVector& f : ens.fields) out.fields.push_back(prepare_field(f, options));
  return out;
}

CovarianceSetup covariance_setup(const ControlEnsemble& prepared_control, BasisKind kind,
                                 const BasisPtr& laplacian) {
  const double spread = anomaly_matrix(prepared_control).norm();
  if (!(spread > 1e-12 * prepared_control.matrix().norm())) {
    throw NumericalError("control ensemble '" + prepared_control.model_id + "' has no variability");
  }
  if (kind == BasisKind::Laplacian) {
    if (!laplacian) throw std::invalid_argument("Laplacian basis required");
    require_same_grid(*laplacian->grid, prepared_control.grid(), "covariance_setup");
    return {laplacian, empirical_basis_variances(prepared_control, *laplacian)};
  }
  PrincipalComponents pcs = principal_components(prepared_control);
  auto basis = std::make_shared<const BasisSet>(std::move(pcs.basis));
  return {basis, std::move(pcs.spectrum)};
}

FitResult fit_observation(const FieldVector& observation, std::span<const FieldVector> forced,
                          const ControlEnsemble& control, const PipelineOptions& options,
                          const BasisPtr& laplacian) {
  if (forced.empty()) throw std::invalid_argument("forced ensemble is empty");
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(observation.values.size());
  for (const FieldVector& f : forced) {
    require_same_grid(*observation.grid, *f.grid, "fit_observation");
    sum += f.values;
  }
  const FieldVector x_raw(observation.grid, sum / static_cast<double>(forced.size()));
  const FieldVector y = prepare_field(observation, options);
  const FieldVector x = prepare_field(x_raw, options);
  const CovarianceSetup setup =
      covariance_setup(prepare_ensemble(control, options), options.basis, laplacian);
  return two_fit(y, x, *setup.basis, setup.spectrum, options.fit_options());
}

namespace {

// Entries sharing a model_id are pooled; an empty id takes the file's own label.
template <typename Make>
auto load_grouped(const Manifest& m, const std::string& role, const GridPtr& grid, Make make) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<FieldVector>> groups;
  for (const DatasetEntry& d : m.with_role(role)) {
    for (io::LabeledField& lf : io::read_field_file(d.path, grid)) {
      const std::string id = d.model_id.empty() ? lf.model_id : d.model_id;
      if (!groups.contains(id)) order.push_back(id);
      groups[id].push_back(std::move(lf.field));
    }
  }
  using T = decltype(make(std::string(), std::vector<FieldVector>()));
  std::vector<T> out;
  for (const std::string& id : order) out.push_back(make(id, std::move(groups[id])));
  return out;
}

}  // namespace

std::vector<ControlEnsemble> load_controls(const Manifest& m, const GridPtr& grid) {
  return load_grouped(m, "control", grid, [](std::string id, std::vector<FieldVector> f) {
    return ControlEnsemble{std::move(id), std::move(f)};
  });
}

std::vector<ForcedEnsemble> load_historicals(const Manifest& m, const GridPtr& grid) {
  return load_grouped(m, "historical", grid, [](std::string id, std::vector<FieldVector> f) {
    return ForcedEnsemble{std::move(id), std::move(f)};
  });
}

StudyConfig make_study_config(std::vector<ControlEnsemble> controls,
                              std::vector<ForcedEnsemble> historicals,
                              const PipelineOptions& options, BasisPtr laplacian, int threads) {
  StudyConfig c;
  c.controls = std::move(controls);
  c.historicals = std::move(historicals);
  c.basis_kind = options.basis;
  c.fit = options.fit_options();
  c.base_seed = options.seed;
  c.credible_level = options.credible_level;
  c.area_weighting = options.area_weighting;
  c.kernel = options.kernel;
  c.laplacian = std::move(laplacian);
  c.threads = threads;
  return c;
}

}  // namespace bofp
