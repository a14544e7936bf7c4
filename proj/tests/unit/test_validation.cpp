#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "bofp/laplacian_basis.hpp"
#include "bofp/metrics.hpp"
#include "bofp/rng.hpp"
#include "bofp/synthetic.hpp"
#include "bofp/validation.hpp"
#include "oracles.hpp"

using namespace bofp;

namespace {

FitRecord rec(double mean, bool contains, double crps_value = 0.0) {
  FitRecord r;
  r.beta_mean = mean;
  r.contains_one = contains;
  r.crps = crps_value;
  return r;
}

FitResult fit_with(double mean, double sd) {
  FitResult f;
  f.beta_post_mean = mean;
  f.beta_post_sd = sd;
  return f;
}

SyntheticStudy small_study(std::size_t n_controls, std::size_t n_hist, std::size_t n_h,
                           const BasisPtr& basis, std::uint64_t seed = 1) {
  SyntheticStudySpec s;
  s.n_lat = basis->grid->n_lat();
  s.n_lon = basis->grid->n_lon();
  s.n_control_models = n_controls;
  s.n_forced_models = n_hist;
  s.n_P = 20;
  s.n_H = n_h;
  s.n_active = 30;
  s.seed = seed;
  return generate_synthetic_study(s, basis, false);
}

}  // namespace

TEST_CASE("quantile interpolates between order statistics") {
  const std::vector<double> v{4.0, 1.0, 3.0, 2.0, 5.0};
  CHECK(quantile(v, 0.0) == 1.0);
  CHECK(quantile(v, 1.0) == 5.0);
  CHECK(quantile(v, 0.5) == 3.0);
  CHECK(quantile(v, 0.05) == doctest::Approx(1.2));
  CHECK(quantile(v, 0.95) == doctest::Approx(4.8));
  CHECK_THROWS_AS(quantile(std::vector<double>{}, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(quantile(v, 1.5), std::invalid_argument);
}

TEST_CASE("crps hand examples") {
  CHECK(crps(std::vector<double>{1.0, 1.0, 1.0}, 1.0) == 0.0);
  CHECK(crps(std::vector<double>{0.0, 2.0}, 1.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(crps(std::vector<double>{3.0}, 1.0) == doctest::Approx(2.0));
  CHECK_THROWS_AS(crps(std::vector<double>{}, 1.0), std::invalid_argument);
}

TEST_CASE("crps matches quadrature of the CDF definition") {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> z;
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> s(5);
    for (double& x : s) x = 1.0 + 0.7 * z(rng);
    const double truth = rep % 5 == 0 ? s[2] : 1.0;
    CHECK(std::abs(crps(s, truth) - oracle::crps_quadrature(s, truth)) < 1e-6);
  }
}

TEST_CASE("crps is bounded by the mean absolute error and order-free") {
  std::mt19937_64 rng(10);
  std::normal_distribution<double> z;
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> s(1 + rep);
    for (double& x : s) x = z(rng);
    double mae = 0.0;
    for (double x : s) mae += std::abs(x - 0.3) / double(s.size());
    const double c = crps(s, 0.3);
    CHECK(c <= mae + 1e-15);
    CHECK(c >= -1e-15);
    std::shuffle(s.begin(), s.end(), rng);
    CHECK(crps(s, 0.3) == doctest::Approx(c).epsilon(1e-13));
  }
}

TEST_CASE("coverage and rmse hand examples") {
  std::vector<FitRecord> all(10, rec(1.0, true));
  CHECK(coverage_rate(all) == 1.0);
  CHECK(rmse(all) == 0.0);
  std::vector<FitRecord> none(4, rec(2.0, false));
  CHECK(coverage_rate(none) == 0.0);
  std::vector<FitRecord> nine(9, rec(1.0, true));
  nine.push_back(rec(1.0, false));
  CHECK(coverage_rate(nine) == 0.9);
  CHECK(rmse(std::vector<FitRecord>{rec(0.9, true), rec(1.1, true)}) == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(rmse(std::vector<FitRecord>{rec(1.5, true)}) == 0.5);
  CHECK_THROWS_AS(coverage_rate(std::vector<FitRecord>{}), std::invalid_argument);
  CHECK_THROWS_AS(rmse(std::vector<FitRecord>{}), std::invalid_argument);
  std::vector<FitRecord> mixed{rec(0.3, true), rec(1.4, false), rec(0.9, true), rec(2.0, false)};
  const double c0 = coverage_rate(mixed), r0 = rmse(mixed);
  std::reverse(mixed.begin(), mixed.end());
  CHECK(coverage_rate(mixed) == c0);
  CHECK(rmse(mixed) == doctest::Approx(r0).epsilon(1e-15));
}

TEST_CASE("detection statistic and threshold") {
  CHECK(detection_statistic(fit_with(0.0, 1.0)) == 0.0);
  CHECK(detection_statistic(fit_with(3.28, 2.0)) == kDetectionThreshold);
  CHECK(kDetectionThreshold == 1.64);
  CHECK_FALSE(detected(detection_statistic(fit_with(3.28, 2.0))));
  CHECK(detected(std::nextafter(1.64, 2.0)));
  CHECK_THROWS_AS(detection_statistic(fit_with(1.0, 0.0)), std::invalid_argument);
}

TEST_CASE("attribution statistic and threshold") {
  CHECK(attribution_statistic(fit_with(1.0, 0.3)) == 0.0);
  CHECK(attribution_statistic(fit_with(0.02, 0.5)) == doctest::Approx(kAttributionThreshold).epsilon(1e-15));
  CHECK(kAttributionThreshold == 1.96);
  CHECK(attribution_statistic(fit_with(1.98, 0.5)) == doctest::Approx(1.96).epsilon(1e-15));
  CHECK_THROWS_AS(attribution_statistic(fit_with(1.0, -1.0)), std::invalid_argument);

  // Attribution is decided by the 95% interval of the draws.
  FitResult f;
  f.samples.beta = Eigen::VectorXd::LinSpaced(2001, 0.0, 2.0);  // 2.5% quantile is 0.05
  CHECK(attributed(f));
  f.samples.beta.array() -= 1.05;  // upper 97.5% quantile lands on 0.9, below 1
  CHECK_FALSE(attributed(f));
  f.samples.beta = Eigen::VectorXd::LinSpaced(2001, 0.0, 2.0).array() + 0.95;  // lower bound 1.0
  CHECK(attributed(f));
}

TEST_CASE("leave-one-out mean") {
  const auto g = build_grid(2, 3);
  const Eigen::VectorXd v = oracle::random_matrix(6, 1, 1).col(0);
  const Eigen::VectorXd w = oracle::random_matrix(6, 1, 2).col(0);
  std::vector<FieldVector> same{FieldVector(g, v), FieldVector(g, v)};
  CHECK(leave_one_out_mean(same, 0).values == v);
  std::vector<FieldVector> two{FieldVector(g, v), FieldVector(g, w)};
  CHECK(leave_one_out_mean(two, 0).values == w);
  const Eigen::MatrixXd m = oracle::random_matrix(6, 7, 3);
  std::vector<FieldVector> seven;
  for (int k = 0; k < 7; ++k) seven.emplace_back(g, m.col(k));
  const Eigen::VectorXd mean = m.rowwise().mean();
  for (std::size_t k = 0; k < 7; ++k) {
    const Eigen::VectorXd loo = leave_one_out_mean(seven, k).values;
    CHECK((7.0 * mean - (m.col(Eigen::Index(k)) + 6.0 * loo)).cwiseAbs().maxCoeff() < 1e-12);
  }
  CHECK_THROWS_AS(leave_one_out_mean(std::vector<FieldVector>{FieldVector(g, v)}, 0), std::invalid_argument);
  CHECK_THROWS_AS(leave_one_out_mean(two, 2), std::out_of_range);
}

TEST_CASE("tuple enumeration at full study scale") {
  const std::vector<std::size_t> sizes{40, 65, 46, 30, 25, 31, 29};
  const auto t = enumerate_tuples(16, sizes);
  CHECK(t.size() == 4256);
  CHECK(t.front().c == 0);
  CHECK(t.back().c == 15);
  CHECK(t.back().f == 6);
  CHECK(t.back().k == 28);
  CHECK(t[1].k == 1);
}

TEST_CASE("tuple seeds are distinct and order-sensitive") {
  std::vector<std::uint64_t> seeds;
  for (const FitTuple& t : enumerate_tuples(4, std::vector<std::size_t>{5, 5, 5})) seeds.push_back(tuple_seed(7, t));
  std::sort(seeds.begin(), seeds.end());
  CHECK(std::adjacent_find(seeds.begin(), seeds.end()) == seeds.end());
  CHECK(tuple_seed(7, {1, 2, 3}) != tuple_seed(7, {3, 2, 1}));
  CHECK(tuple_seed(7, {1, 2, 3}) != tuple_seed(8, {1, 2, 3}));
  CHECK(tuple_seed(7, {1, 2, 3}) == tuple_seed(7, {1, 2, 3}));
}

TEST_CASE("synthetic world with zero spectrum") {
  const auto g = build_grid(3, 6);
  auto basis = std::make_shared<const BasisSet>(compute_laplacian_basis(g));
  SyntheticWorldSpec w;
  w.basis = basis;
  w.true_spectrum = Eigen::VectorXd::Zero(18);
  w.true_forced_field = FieldVector(g, Eigen::VectorXd::LinSpaced(18, 0.0, 1.0));
  w.n_P = 4;
  w.n_H = 3;
  const SyntheticWorld world = generate_synthetic_world(w);
  for (const auto& f : world.control.fields) CHECK(f.values.cwiseAbs().maxCoeff() == 0.0);
  for (const auto& m : world.forced.members) CHECK(m.values == w.true_forced_field.values);
  w.true_spectrum(2) = -1.0;
  CHECK_THROWS_AS(generate_synthetic_world(w), std::invalid_argument);
}

TEST_CASE("synthetic controls recover the true spectrum") {
  const auto g = build_grid(4, 8);
  auto basis = std::make_shared<const BasisSet>(compute_laplacian_basis(g));
  const Eigen::VectorXd base = power_law_spectrum(32, 32, 2.0, 1.0);
  for (double log_sd : {0.0, 0.6}) {
    SyntheticWorldSpec w;
    w.basis = basis;
    w.true_spectrum = perturb_spectrum(base, log_sd, 0.8, 3);
    w.n_P = 40000;
    w.seed = 5;
    const SyntheticWorld world = generate_synthetic_world(w);
    const VarianceSpectrum s = empirical_basis_variances(world.control, *basis);
    for (Eigen::Index i = 0; i < 32; ++i) {
      // relative sd of each variance estimate is sqrt(2 / n_P), about 0.7%
      CHECK(std::abs(s.lambdas(i) / w.true_spectrum(i) - 1.0) < 0.03);
    }
  }
}

TEST_CASE("spectrum helpers") {
  const Eigen::VectorXd s = power_law_spectrum(10, 4, 3.0, 2.0);
  CHECK(s(0) == 3.0);
  CHECK(s(1) == doctest::Approx(0.75));
  CHECK(s(3) == doctest::Approx(3.0 / 16));
  CHECK(s.tail(6).cwiseAbs().maxCoeff() == 0.0);
  CHECK(power_law_spectrum(5, 0, 1.0, 1.0).minCoeff() > 0.0);
  const Eigen::VectorXd p = perturb_spectrum(s, 0.5, 0.8, 1);
  CHECK(p.tail(6).cwiseAbs().maxCoeff() == 0.0);
  CHECK((p.head(4).array() > 0.0).all());
  CHECK(perturb_spectrum(s, 0.0, 0.8, 1) == s);
  CHECK_THROWS_AS(perturb_spectrum(s, -0.1, 0.8, 1), std::invalid_argument);
  CHECK_THROWS_AS(perturb_spectrum(s, 0.1, 1.0, 1), std::invalid_argument);
  const Eigen::VectorXd a = synthetic_forced_coefficients(s, 1.0, 0.5, 2);
  CHECK(a(0) == doctest::Approx(2.0 * std::sqrt(3.0)));
  CHECK(a.tail(6).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("desk validation run: record count, determinism and thread independence") {
  const auto g = build_grid(4, 8);
  auto basis = std::make_shared<const BasisSet>(compute_laplacian_basis(g));
  const SyntheticStudy study = small_study(2, 1, 3, basis);
  StudyConfig cfg;
  cfg.controls = study.controls;
  cfg.historicals = study.historicals;
  cfg.laplacian = basis;
  cfg.fit.M = 400;
  cfg.fit.burn_in = 200;
  cfg.base_seed = 11;
  const auto a = run_validation(cfg);
  REQUIRE(a.size() == 6);
  cfg.threads = 3;
  const auto b = run_validation(cfg);
  REQUIRE(b.size() == 6);
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(a[i].ok());
    CHECK(a[i].c == i / 3);
    CHECK(a[i].k == i % 3);
    CHECK(a[i].beta_mean == b[i].beta_mean);
    CHECK(a[i].ci_low == b[i].ci_low);
    CHECK(a[i].crps == b[i].crps);
    CHECK(a[i].kappa_post == b[i].kappa_post);
    CHECK(a[i].ci_low <= a[i].ci_high);
    CHECK(a[i].contains_one == (a[i].ci_low <= 1.0 && 1.0 <= a[i].ci_high));
    CHECK(a[i].crps >= 0.0);
  }
  cfg.basis_kind = BasisKind::PrincipalComponent;
  const auto e = run_validation(cfg);
  CHECK(e.size() == 6);
  for (const auto& r : e) CHECK(r.ok());
}

TEST_CASE("failed fits are recorded without aborting the sweep") {
  const auto g = build_grid(3, 6);
  auto basis = std::make_shared<const BasisSet>(compute_laplacian_basis(g));
  SyntheticStudy study = small_study(2, 1, 3, basis);
  // a control without variability makes every fit against it fail
  for (auto& f : study.controls[1].fields) f.values = study.controls[1].fields[0].values;
  StudyConfig cfg;
  cfg.controls = study.controls;
  cfg.historicals = study.historicals;
  cfg.laplacian = basis;
  cfg.fit.M = 200;
  cfg.fit.burn_in = 100;
  const auto r = run_validation(cfg);
  REQUIRE(r.size() == 6);
  for (std::size_t i = 0; i < 3; ++i) CHECK(r[i].ok());
  for (std::size_t i = 3; i < 6; ++i) {
    CHECK_FALSE(r[i].ok());
    CHECK(r[i].c == 1);
  }
  const auto pairs = aggregate_pairs(r);
  REQUIRE(pairs.size() == 2);
  CHECK(pairs[0].n == 3);
  CHECK(pairs[1].n == 0);
  CHECK(pairs[1].n_failed == 3);
  CHECK(std::isnan(pairs[1].coverage));
}

TEST_CASE("study config validation") {
  const auto g = build_grid(3, 6);
  auto basis = std::make_shared<const BasisSet>(compute_laplacian_basis(g));
  const SyntheticStudy study = small_study(1, 1, 3, basis);
  StudyConfig cfg;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.controls = study.controls;
  cfg.historicals = study.historicals;
  CHECK_NOTHROW(cfg.validate());
  cfg.credible_level = 1.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.credible_level = 0.9;
  cfg.historicals[0].members.resize(1);
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.historicals = study.historicals;
  cfg.threads = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("pair aggregation and spreads") {
  std::vector<FitRecord> r;
  for (std::size_t c = 0; c < 2; ++c) {
    for (std::size_t f = 0; f < 3; ++f) {
      for (std::size_t k = 0; k < 4; ++k) {
        FitRecord x = rec(1.0 + 0.1 * double(k) * double(f), k < 3, 0.2 * double(c + 1));
        x.c = c;
        x.f = f;
        x.k = k;
        x.kappa_post = long(2 + k);
        r.push_back(x);
      }
    }
  }
  const auto pairs = aggregate_pairs(r);
  REQUIRE(pairs.size() == 6);
  CHECK(pairs[0].coverage == 0.75);
  CHECK(pairs[0].rmse == 0.0);
  CHECK(pairs[4].c == 1);
  CHECK(pairs[4].f == 1);
  CHECK(pairs[4].rmse == doctest::Approx(std::sqrt((0.0 + 0.01 + 0.04 + 0.09) / 4)));
  CHECK(pairs[3].mean_crps == doctest::Approx(0.4));
  CHECK(pairs[3].median_kappa == 3.5);

  const auto summaries = summarize_by_control(pairs);
  REQUIRE(summaries.size() == 2);
  CHECK(summaries[1].coverage.median == 0.75);
  CHECK(summaries[0].crps.mean == doctest::Approx(0.2));

  const Spread s = spread_of(std::vector<double>{1, 2, 3, 4, 5, std::nan("")});
  CHECK(s.median == 3.0);
  CHECK(s.q25 == 2.0);
  CHECK(s.q75 == 4.0);
  CHECK(s.q05 == doctest::Approx(1.2));
  CHECK(s.mean == 3.0);
  CHECK(std::isnan(spread_of(std::vector<double>{}).median));
}
