#include "bofp/synthetic.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "bofp/error.hpp"
#include "bofp/rng.hpp"

namespace bofp {

namespace {

struct ActiveColumns {
  Eigen::MatrixXd vectors;  // n_grid x n_active
  Eigen::VectorXd sd;
};

ActiveColumns active_columns(const BasisSet& basis, const Eigen::VectorXd& spectrum) {
  std::vector<Eigen::Index> idx;
  for (Eigen::Index i = 0; i < spectrum.size(); ++i) {
    if (spectrum(i) > 0.0) idx.push_back(i);
  }
  ActiveColumns out;
  out.vectors.resize(basis.vectors.rows(), static_cast<Eigen::Index>(idx.size()));
  out.sd.resize(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t j = 0; j < idx.size(); ++j) {
    out.vectors.col(static_cast<Eigen::Index>(j)) = basis.vectors.col(idx[j]);
    out.sd(static_cast<Eigen::Index>(j)) = std::sqrt(spectrum(idx[j]));
  }
  return out;
}

Eigen::VectorXd draw(const ActiveColumns& a, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd eps(a.sd.size());
  for (Eigen::Index i = 0; i < eps.size(); ++i) eps(i) = normal(rng);
  if (eps.size() == 0) return Eigen::VectorXd::Zero(a.vectors.rows());
  return a.vectors * eps.cwiseProduct(a.sd);
}

}  // namespace

SyntheticWorld generate_synthetic_world(const SyntheticWorldSpec& spec) {
  if (!spec.basis) throw std::invalid_argument("synthetic world without a basis");
  const BasisSet& basis = *spec.basis;
  if (spec.true_spectrum.size() != basis.n_basis()) {
    throw std::invalid_argument("synthetic spectrum length differs from basis size");
  }
  if ((spec.true_spectrum.array() < 0.0).any()) {
    throw std::invalid_argument("synthetic spectrum must be nonnegative");
  }
  const GridPtr grid = basis.grid;
  Eigen::VectorXd forced = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid->n_grid()));
  if (spec.true_forced_field.grid) {
    require_same_grid(*grid, *spec.true_forced_field.grid, "synthetic forced field");
    forced = spec.true_forced_field.values;
  }

  Eigen::VectorXd inv_w = Eigen::VectorXd::Ones(forced.size());
  if (spec.physical_space) inv_w = area_weights(*grid).cwiseInverse();

  const ActiveColumns active = active_columns(basis, spec.true_spectrum);

  SyntheticWorld world;
  world.control.model_id = spec.model_id;
  world.forced.model_id = spec.model_id;

  std::mt19937_64 control_rng(derive_seed(spec.seed, {0}));
  for (std::size_t k = 0; k < spec.n_P; ++k) {
    world.control.fields.emplace_back(grid, draw(active, control_rng).cwiseProduct(inv_w));
  }
  std::mt19937_64 forced_rng(derive_seed(spec.seed, {1}));
  for (std::size_t k = 0; k < spec.n_H; ++k) {
    world.forced.members.emplace_back(grid, (forced + draw(active, forced_rng)).cwiseProduct(inv_w));
  }
  return world;
}

Eigen::VectorXd power_law_spectrum(Eigen::Index n_basis, Eigen::Index n_active, double amplitude,
                                   double exponent) {
  if (n_active <= 0 || n_active > n_basis) n_active = n_basis;
  Eigen::VectorXd s = Eigen::VectorXd::Zero(n_basis);
  for (Eigen::Index i = 0; i < n_active; ++i) {
    s(i) = amplitude * std::pow(static_cast<double>(i + 1), -exponent);
  }
  return s;
}

Eigen::VectorXd perturb_spectrum(const Eigen::VectorXd& base, double log_sd, double rho,
                                 std::uint64_t seed) {
  if (log_sd < 0.0) throw std::invalid_argument("log_sd must be nonnegative");
  if (!(rho > -1.0 && rho < 1.0)) throw std::invalid_argument("rho must lie in (-1, 1)");
  if (log_sd == 0.0) return base;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double innovation = std::sqrt(1.0 - rho * rho);
  Eigen::VectorXd out = base;
  double g = log_sd * normal(rng);
  for (Eigen::Index i = 0; i < base.size(); ++i) {
    if (i > 0) g = rho * g + innovation * log_sd * normal(rng);
    out(i) = base(i) * std::exp(g);
  }
  return out;
}

Eigen::VectorXd synthetic_forced_coefficients(const Eigen::VectorXd& spectrum, double scale,
                                              double decay, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd a = Eigen::VectorXd::Zero(spectrum.size());
  for (Eigen::Index i = 0; i < spectrum.size(); ++i) {
    const double g = normal(rng);
    const double sd = std::sqrt(std::max(spectrum(i), 0.0));
    a(i) = i == 0 ? 2.0 * scale * sd
                  : scale * sd * std::pow(static_cast<double>(i + 1), -decay) * g;
  }
  return a;
}

SyntheticStudy generate_synthetic_study(const SyntheticStudySpec& spec, const BasisPtr& basis,
                                        bool physical_space) {
  if (!basis) throw std::invalid_argument("synthetic study without a basis");
  if (basis->grid->n_lat() != spec.n_lat || basis->grid->n_lon() != spec.n_lon) {
    throw DataError("synthetic study grid differs from the basis grid");
  }
  const Eigen::Index n_basis = basis->n_basis();
  const Eigen::VectorXd base =
      power_law_spectrum(n_basis, spec.n_active, spec.amplitude, spec.exponent);

  SyntheticStudy study;
  for (std::size_t c = 0; c < spec.n_control_models; ++c) {
    SyntheticWorldSpec w;
    w.basis = basis;
    w.true_spectrum = perturb_spectrum(base, spec.mismatch_log_sd, spec.mismatch_rho,
                                       derive_seed(spec.seed, {1, c}));
    w.n_P = spec.n_P;
    w.seed = derive_seed(spec.seed, {2, c});
    w.model_id = "ctrl-" + std::to_string(c);
    w.physical_space = physical_space;
    study.controls.push_back(generate_synthetic_world(w).control);
  }
  for (std::size_t f = 0; f < spec.n_forced_models; ++f) {
    SyntheticWorldSpec w;
    w.basis = basis;
    w.true_spectrum = perturb_spectrum(base, spec.mismatch_log_sd, spec.mismatch_rho,
                                       derive_seed(spec.seed, {3, f}));
    const Eigen::VectorXd coeffs = synthetic_forced_coefficients(
        base, spec.signal_scale, spec.signal_decay, derive_seed(spec.seed, {4, f}));
    w.true_forced_field = FieldVector(basis->grid, basis->vectors * coeffs);
    w.n_H = spec.n_H;
    w.seed = derive_seed(spec.seed, {5, f});
    w.model_id = "hist-" + std::to_string(f);
    w.physical_space = physical_space;
    study.historicals.push_back(generate_synthetic_world(w).forced);
  }
  return study;
}

}  // namespace bofp
