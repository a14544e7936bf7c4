#include "bofp/validation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>

#include "bofp/error.hpp"
#include "bofp/metrics.hpp"
#include "bofp/pipeline.hpp"
#include "bofp/rng.hpp"

namespace bofp {

FieldVector leave_one_out_mean(std::span<const FieldVector> members, std::size_t k) {
  if (members.size() < 2) throw std::invalid_argument("leave-one-out mean needs at least 2 members");
  if (k >= members.size()) throw std::out_of_range("leave-one-out index out of range");
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(members.front().values.size());
  for (std::size_t i = 0; i < members.size(); ++i) {
    if (i == k) continue;
    require_same_grid(*members.front().grid, *members[i].grid, "leave_one_out_mean");
    sum += members[i].values;
  }
  return FieldVector(members.front().grid, sum / static_cast<double>(members.size() - 1));
}

void StudyConfig::validate() const {
  if (!(credible_level > 0.0 && credible_level < 1.0)) {
    throw std::invalid_argument("credible_level must lie in (0, 1)");
  }
  if (controls.empty()) throw std::invalid_argument("study has no control ensembles");
  if (historicals.empty()) throw std::invalid_argument("study has no historical ensembles");
  for (const ControlEnsemble& c : controls) {
    if (c.size() < 2) throw std::invalid_argument("control '" + c.model_id + "' has fewer than 2 fields");
  }
  for (const ForcedEnsemble& h : historicals) {
    if (h.size() < 2) {
      throw std::invalid_argument("historical '" + h.model_id + "' needs n_H >= 2 for leave-one-out");
    }
  }
  if (threads < 1) throw std::invalid_argument("threads must be >= 1");
}

std::vector<FitTuple> enumerate_tuples(std::size_t n_controls,
                                       std::span<const std::size_t> historical_sizes) {
  std::vector<FitTuple> out;
  std::size_t total = 0;
  for (std::size_t n : historical_sizes) total += n;
  out.reserve(n_controls * total);
  for (std::size_t c = 0; c < n_controls; ++c) {
    for (std::size_t f = 0; f < historical_sizes.size(); ++f) {
      for (std::size_t k = 0; k < historical_sizes[f]; ++k) out.push_back({c, f, k});
    }
  }
  return out;
}

std::uint64_t tuple_seed(std::uint64_t base_seed, const FitTuple& t) {
  return derive_seed(base_seed, {t.c, t.f, t.k});
}

namespace {

FitRecord fit_tuple(const FitTuple& t, const CovarianceSetup& setup, const ForcedEnsemble& hist,
                    const StudyConfig& config) {
  FitRecord rec;
  rec.c = t.c;
  rec.f = t.f;
  rec.k = t.k;
  const FieldVector& y = hist.members[t.k];
  const FieldVector x = leave_one_out_mean(hist.members, t.k);
  TwoFitOptions opts = config.fit;
  opts.seed = tuple_seed(config.base_seed, t);
  const FitResult fit = two_fit(y, x, *setup.basis, setup.spectrum, opts);

  const std::span<const double> beta(fit.samples.beta.data(),
                                     static_cast<std::size_t>(fit.samples.beta.size()));
  const double tail = 0.5 * (1.0 - config.credible_level);
  rec.beta_mean = fit.beta_post_mean;
  rec.beta_sd = fit.beta_post_sd;
  rec.ci_low = quantile(beta, tail);
  rec.ci_high = quantile(beta, 1.0 - tail);
  rec.contains_one = rec.ci_low <= 1.0 && 1.0 <= rec.ci_high;
  rec.crps = crps(beta, 1.0);
  rec.kappa_post = static_cast<long>(fit.kappa_post);
  rec.converged = fit.converged;
  rec.n_iterations = fit.n_iterations;
  return rec;
}

}  // namespace

std::vector<FitRecord> run_validation(const StudyConfig& config) {
  config.validate();
  PipelineOptions prep;
  prep.area_weighting = config.area_weighting;

  std::vector<ForcedEnsemble> historicals;
  historicals.reserve(config.historicals.size());
  for (const ForcedEnsemble& h : config.historicals) {
    ForcedEnsemble p{h.model_id, {}};
    for (const FieldVector& m : h.members) p.members.push_back(prepare_field(m, prep));
    historicals.push_back(std::move(p));
  }

  BasisPtr laplacian = config.laplacian;
  if (config.basis_kind == BasisKind::Laplacian && !laplacian) {
    laplacian = std::make_shared<const BasisSet>(
        compute_laplacian_basis(config.controls.front().fields.front().grid, config.kernel));
  }
  // A control that cannot be set up fails each of its tuples, not the sweep.
  std::vector<std::optional<CovarianceSetup>> setups(config.controls.size());
  std::vector<std::string> setup_errors(config.controls.size());
  for (std::size_t c = 0; c < config.controls.size(); ++c) {
    try {
      setups[c] = covariance_setup(prepare_ensemble(config.controls[c], prep), config.basis_kind,
                                   laplacian);
    } catch (const std::exception& e) {
      setup_errors[c] = e.what();
    }
  }

  std::vector<std::size_t> sizes;
  for (const ForcedEnsemble& h : historicals) sizes.push_back(h.size());
  const std::vector<FitTuple> tuples = enumerate_tuples(config.controls.size(), sizes);
  std::vector<FitRecord> records(tuples.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next.fetch_add(1); i < tuples.size(); i = next.fetch_add(1)) {
      const FitTuple& t = tuples[i];
      try {
        if (!setups[t.c]) throw NumericalError(setup_errors[t.c]);
        records[i] = fit_tuple(t, *setups[t.c], historicals[t.f], config);
      } catch (const std::exception& e) {
        FitRecord failed;
        failed.c = t.c;
        failed.f = t.f;
        failed.k = t.k;
        failed.error = e.what();
        records[i] = std::move(failed);
      }
    }
  };
  const int n_threads = std::min<int>(config.threads, static_cast<int>(std::max<std::size_t>(tuples.size(), 1)));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  }
  return records;
}

double coverage_rate(std::span<const FitRecord> records) {
  if (records.empty()) throw std::invalid_argument("coverage_rate of no records");
  std::size_t hits = 0;
  for (const FitRecord& r : records) hits += r.contains_one ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(records.size());
}

double rmse(std::span<const FitRecord> records) {
  if (records.empty()) throw std::invalid_argument("rmse of no records");
  double ss = 0.0;
  for (const FitRecord& r : records) ss += (r.beta_mean - 1.0) * (r.beta_mean - 1.0);
  return std::sqrt(ss / static_cast<double>(records.size()));
}

std::vector<PairAggregate> aggregate_pairs(std::span<const FitRecord> records) {
  std::map<std::pair<std::size_t, std::size_t>, std::vector<FitRecord>> groups;
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> failed;
  for (const FitRecord& r : records) {
    if (r.ok()) groups[{r.c, r.f}].push_back(r);
    else ++failed[{r.c, r.f}];
    groups.try_emplace({r.c, r.f});
  }
  std::vector<PairAggregate> out;
  for (const auto& [key, recs] : groups) {
    PairAggregate a;
    a.c = key.first;
    a.f = key.second;
    a.n = recs.size();
    a.n_failed = failed.contains(key) ? failed.at(key) : 0;
    if (!recs.empty()) {
      a.coverage = coverage_rate(recs);
      a.rmse = rmse(recs);
      std::vector<double> kappas;
      for (const FitRecord& r : recs) {
        a.mean_crps += r.crps;
        kappas.push_back(static_cast<double>(r.kappa_post));
      }
      a.mean_crps /= static_cast<double>(recs.size());
      a.median_kappa = quantile(kappas, 0.5);
    } else {
      a.coverage = a.rmse = a.mean_crps = a.median_kappa = std::nan("");
    }
    out.push_back(a);
  }
  return out;
}

Spread spread_of(std::span<const double> values) {
  Spread s;
  std::vector<double> v;
  for (double x : values) {
    if (!std::isnan(x)) v.push_back(x);
  }
  if (v.empty()) {
    s.median = s.q25 = s.q75 = s.q05 = s.q95 = s.mean = std::nan("");
    return s;
  }
  s.median = quantile(v, 0.5);
  s.q25 = quantile(v, 0.25);
  s.q75 = quantile(v, 0.75);
  s.q05 = quantile(v, 0.05);
  s.q95 = quantile(v, 0.95);
  double sum = 0.0;
  for (double x : v) sum += x;
  s.mean = sum / static_cast<double>(v.size());
  return s;
}

std::vector<ControlSummary> summarize_by_control(std::span<const PairAggregate> pairs) {
  std::map<std::size_t, std::vector<const PairAggregate*>> by_c;
  for (const PairAggregate& p : pairs) by_c[p.c].push_back(&p);
  std::vector<ControlSummary> out;
  for (const auto& [c, ps] : by_c) {
    std::vector<double> cov, rm, cr, ka;
    for (const PairAggregate* p : ps) {
      cov.push_back(p->coverage);
      rm.push_back(p->rmse);
      cr.push_back(p->mean_crps);
      ka.push_back(p->median_kappa);
    }
    out.push_back({c, spread_of(cov), spread_of(rm), spread_of(cr), spread_of(ka)});
  }
  return out;
}

}  // namespace bofp
