#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bofp/basis.hpp"
#include "bofp/bayes.hpp"
#include "bofp/covariance.hpp"
#include "bofp/field.hpp"
#include "bofp/laplacian_basis.hpp"
#include "bofp/trends.hpp"
#include "bofp/validation.hpp"

// Plain-text file formats.
//
// Gridded field file: one or more blocks of
//   #grid <n_lat> <n_lon>
//   #field <role> <model_id>
//   <n_grid lines, one value each, canonical cell order>
// Gridded series file: one or more blocks of
//   #grid <n_lat> <n_lon>
//   #field <role> <model_id>
//   #times <n_time>
//   <n_time rows: time value_1 ... value_n_grid>
// Lines starting with "# " are comments (provenance). Blank lines are ignored.

namespace bofp::io {

struct LabeledField {
  std::string role;
  std::string model_id;
  FieldVector field;
};

/// Shortest-safe text for a double: 17 significant digits.
std::string format_double(double v);

std::vector<LabeledField> read_field_file(const std::filesystem::path& path,
                                          const GridPtr& expected);
/// Exactly one field block.
FieldVector load_gridded_field(const std::filesystem::path& path, const GridPtr& expected);

void write_field_file(const std::filesystem::path& path, std::span<const LabeledField> fields,
                      const std::string& provenance = {});

std::vector<GriddedSeries> read_series_file(const std::filesystem::path& path,
                                            const GridPtr& expected);
void write_series_file(const std::filesystem::path& path, std::span<const GriddedSeries> series,
                       const std::string& provenance = {});

/// One row per retained draw: beta, lambda_1..lambda_kappa.
void write_chain(const std::filesystem::path& path, const PosteriorSamples& samples,
                 const std::string& provenance = {});

void write_records(const std::filesystem::path& path, std::span<const FitRecord> records,
                   const std::string& provenance = {});
std::vector<FitRecord> read_records(const std::filesystem::path& path);
void write_pair_aggregates(const std::filesystem::path& path,
                           std::span<const PairAggregate> pairs, const std::string& provenance = {});
void write_control_summaries(const std::filesystem::path& path,
                             std::span<const ControlSummary> summaries,
                             const std::string& provenance = {});

void write_spectrum(const std::filesystem::path& path, const std::string& model_id,
                    const VarianceSpectrum& spectrum, const std::string& provenance = {},
                    bool append = false);

/// Binary basis cache: header (grid, kernel), eigenvalues, column-major
/// vectors and a 64-bit FNV-1a hash of everything before it.
std::filesystem::path basis_cache_path(const std::filesystem::path& dir, const Grid& grid,
                                       KernelVariant variant);
void save_basis_cache(const std::filesystem::path& path, const BasisSet& basis,
                      KernelVariant variant);
/// Empty when the file is missing, for another grid/kernel, or corrupted.
std::optional<BasisSet> load_basis_cache(const std::filesystem::path& path, const GridPtr& grid,
                                         KernelVariant variant);

}  // namespace bofp::io
