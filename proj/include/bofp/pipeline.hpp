#pragma once

#include <filesystem>
#include <vector>

#include "bofp/bayes.hpp"
#include "bofp/covariance.hpp"
#include "bofp/manifest.hpp"
#include "bofp/synthetic.hpp"
#include "bofp/validation.hpp"

namespace bofp {

/// Laplacian basis from `cache_dir` when a valid cache exists; otherwise
/// computed and, when `cache_dir` is non-empty, written there.
BasisPtr obtain_laplacian_basis(const GridPtr& grid, KernelVariant variant,
                                const std::filesystem::path& cache_dir = {});

/// Area-weights each field when enabled.
FieldVector prepare_field(const FieldVector& f, const PipelineOptions& options);
ControlEnsemble prepare_ensemble(const ControlEnsemble& ens, const PipelineOptions& options);

struct CovarianceSetup {
  BasisPtr basis;
  VarianceSpectrum spectrum;
};

/// Basis (shared Laplacian or control PCs) and empirical spectrum for an
/// already prepared control ensemble.
CovarianceSetup covariance_setup(const ControlEnsemble& prepared_control, BasisKind kind,
                                 const BasisPtr& laplacian);

/// Fits an observation against the forced ensemble mean with one control model.
FitResult fit_observation(const FieldVector& observation, std::span<const FieldVector> forced,
                          const ControlEnsemble& control, const PipelineOptions& options,
                          const BasisPtr& laplacian);

std::vector<ControlEnsemble> load_controls(const Manifest& m, const GridPtr& grid);
std::vector<ForcedEnsemble> load_historicals(const Manifest& m, const GridPtr& grid);

StudyConfig make_study_config(std::vector<ControlEnsemble> controls,
                              std::vector<ForcedEnsemble> historicals,
                              const PipelineOptions& options, BasisPtr laplacian, int threads);

}  // namespace bofp
