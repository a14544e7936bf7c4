#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bofp/covariance.hpp"
#include "bofp/error.hpp"
#include "bofp/laplacian_basis.hpp"
#include "oracles.hpp"

using namespace bofp;

namespace {

ControlEnsemble random_ensemble(const GridPtr& g, Eigen::Index n_p, std::uint64_t seed) {
  const Eigen::MatrixXd m = oracle::random_matrix(static_cast<Eigen::Index>(g->n_grid()), n_p, seed);
  ControlEnsemble e{"rand", {}};
  for (Eigen::Index k = 0; k < n_p; ++k) e.fields.emplace_back(g, m.col(k));
  return e;
}

Eigen::MatrixXd dense_cov_oracle(const ControlEnsemble& e) {
  const Eigen::Index n = e.fields.front().values.size();
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(n);
  for (const auto& f : e.fields) mean += f.values;
  mean /= double(e.size());
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, n);
  for (const auto& f : e.fields) c += (f.values - mean) * (f.values - mean).transpose();
  return c / double(e.size());
}

}  // namespace

TEST_CASE("empirical covariance of identical fields is zero") {
  const auto g = build_grid(3, 4);
  const Eigen::VectorXd v = oracle::random_matrix(12, 1, 1).col(0);
  ControlEnsemble e{"same", {FieldVector(g, v), FieldVector(g, v), FieldVector(g, v)}};
  CHECK(empirical_covariance(e).cwiseAbs().maxCoeff() < 1e-28);
}

TEST_CASE("empirical covariance of v and -v is v v^T") {
  const auto g = build_grid(3, 4);
  const Eigen::VectorXd v = oracle::random_matrix(12, 1, 2).col(0);
  ControlEnsemble e{"pm", {FieldVector(g, v), FieldVector(g, -v)}};
  CHECK((empirical_covariance(e) - v * v.transpose()).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("empirical covariance uses divisor n_P and has rank <= n_P - 1") {
  const auto g = build_grid(4, 8);
  const ControlEnsemble e = random_ensemble(g, 6, 3);
  const Eigen::MatrixXd c = empirical_covariance(e);
  CHECK((c - dense_cov_oracle(e)).cwiseAbs().maxCoeff() < 1e-12);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c);
  const double top = es.eigenvalues().maxCoeff();
  int rank = 0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) rank += es.eigenvalues()(i) > 1e-10 * top;
  CHECK(rank == 5);
}

TEST_CASE("ensemble errors") {
  const auto g = build_grid(3, 4);
  const auto h = build_grid(4, 3);
  ControlEnsemble one{"one", {FieldVector(g, Eigen::VectorXd::Ones(12))}};
  CHECK_THROWS_AS(empirical_covariance(one), std::invalid_argument);
  CHECK_THROWS_AS(principal_components(one), std::invalid_argument);
  ControlEnsemble mixed{"mixed", {FieldVector(g, Eigen::VectorXd::Ones(12)),
                                  FieldVector(h, Eigen::VectorXd::Zero(12))}};
  CHECK_THROWS_AS(empirical_covariance(mixed), DataError);
  CHECK_THROWS_AS(FieldVector(g, Eigen::VectorXd::Ones(11)), DataError);
  Eigen::VectorXd bad = Eigen::VectorXd::Ones(12);
  bad(3) = std::nan("");
  CHECK_THROWS_AS(FieldVector(g, bad), DataError);
}

TEST_CASE("principal components of the rank-one case") {
  const auto g = build_grid(3, 4);
  const Eigen::VectorXd v = oracle::random_matrix(12, 1, 4).col(0);
  ControlEnsemble e{"pm", {FieldVector(g, v), FieldVector(g, -v)}};
  const PrincipalComponents pc = principal_components(e);
  REQUIRE(pc.basis.n_basis() == 1);
  CHECK(pc.spectrum.lambdas(0) == doctest::Approx(v.squaredNorm()).epsilon(1e-12));
  const Eigen::VectorXd unit = v / v.norm();
  CHECK(std::abs(pc.basis.vectors.col(0).dot(unit)) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("principal components reconstruct the covariance") {
  const auto g = build_grid(4, 8);
  const ControlEnsemble e = random_ensemble(g, 10, 5);
  const PrincipalComponents pc = principal_components(e);
  CHECK(pc.basis.kind == BasisKind::PrincipalComponent);
  CHECK(pc.basis.n_basis() == 9);
  const Eigen::MatrixXd& p = pc.basis.vectors;
  const Eigen::MatrixXd rec = p * pc.spectrum.lambdas.asDiagonal() * p.transpose();
  CHECK((rec - dense_cov_oracle(e)).cwiseAbs().maxCoeff() < 1e-8);
  for (Eigen::Index i = 1; i < pc.spectrum.lambdas.size(); ++i) {
    CHECK(pc.spectrum.lambdas(i) <= pc.spectrum.lambdas(i - 1));
  }
  CHECK(((p.transpose() * p) - Eigen::MatrixXd::Identity(9, 9)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("66 control fields give at most 65 components") {
  const auto g = build_grid(12, 24);
  const PrincipalComponents pc = principal_components(random_ensemble(g, 66, 6));
  CHECK(pc.basis.n_basis() <= 65);
  CHECK(pc.basis.n_basis() == 65);
}

TEST_CASE("empirical basis variances match diag(B^T C B)") {
  const auto g = build_grid(6, 12);
  const ControlEnsemble e = random_ensemble(g, 10, 7);
  const BasisSet b = compute_laplacian_basis(g);
  const VarianceSpectrum s = empirical_basis_variances(e, b);
  const Eigen::VectorXd dense = (b.vectors.transpose() * dense_cov_oracle(e) * b.vectors).diagonal();
  CHECK((s.lambdas - dense).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(s.source_n == 10);
  CHECK((s.lambdas.array() >= 0.0).all());
  // total variance is conserved by a complete basis
  CHECK(s.lambdas.sum() == doctest::Approx(dense_cov_oracle(e).trace()).epsilon(1e-10));
}

TEST_CASE("empirical basis variances in special cases") {
  const auto g = build_grid(4, 8);
  const Eigen::VectorXd v = oracle::random_matrix(32, 1, 8).col(0);
  ControlEnsemble same{"same", {FieldVector(g, v), FieldVector(g, v)}};
  CHECK(empirical_basis_variances(same, compute_laplacian_basis(g)).lambdas.cwiseAbs().maxCoeff() ==
        0.0);

  const ControlEnsemble e = random_ensemble(g, 8, 9);
  const PrincipalComponents pc = principal_components(e);
  const VarianceSpectrum s = empirical_basis_variances(e, pc.basis);
  CHECK((s.lambdas - pc.spectrum.lambdas).cwiseAbs().maxCoeff() < 1e-10);

  CHECK_THROWS_AS(empirical_basis_variances(e, compute_laplacian_basis(build_grid(8, 4))), DataError);
}

TEST_CASE("PC spectrum majorizes the Laplacian spectrum") {
  const auto g = build_grid(6, 12);
  const BasisSet b = compute_laplacian_basis(g);
  for (std::uint64_t seed : {10, 11, 12}) {
    const ControlEnsemble e = random_ensemble(g, 15, seed);
    const Eigen::VectorXd pc = principal_components(e).spectrum.lambdas;
    Eigen::VectorXd lap = empirical_basis_variances(e, b).lambdas;
    double a = 0.0, c = 0.0;
    for (Eigen::Index m = 0; m < lap.size(); ++m) {
      if (m < pc.size()) a += pc(m);
      c += lap(m);
      CHECK(a >= c - 1e-10);
    }
  }
}

TEST_CASE("project_field") {
  const auto g = build_grid(4, 8);
  const BasisSet b = compute_laplacian_basis(g);
  const FieldVector l1(g, b.vectors.col(0));
  const Eigen::VectorXd c = project_field(b, l1, 1);
  REQUIRE(c.size() == 1);
  CHECK(c(0) == doctest::Approx(1.0).epsilon(1e-14));

  // orthogonal to the leading 5 vectors
  const FieldVector tail(g, b.vectors.col(7) - 2.0 * b.vectors.col(20));
  CHECK(project_field(b, tail, 5).cwiseAbs().maxCoeff() < 1e-13);

  const FieldVector f(g, oracle::random_matrix(32, 1, 13).col(0));
  const Eigen::MatrixXd bk = b.vectors.leftCols(6);
  const Eigen::MatrixXd projector = bk * (bk.transpose() * bk).inverse() * bk.transpose();
  CHECK((bk * project_field(b, f, 6) - projector * f.values).cwiseAbs().maxCoeff() < 1e-12);

  CHECK_THROWS_AS(project_field(b, f, 0), std::out_of_range);
  CHECK_THROWS_AS(project_field(b, f, 33), std::out_of_range);
}

TEST_CASE("area weights") {
  const auto g = build_grid(10, 20);
  const Eigen::VectorXd w = area_weights(*g);
  // weighted sum of squares of a uniform unit field
  const FieldVector ones(g, Eigen::VectorXd::Ones(200));
  const FieldVector wf = area_weight_field(*g, ones);
  CHECK(wf.values.squaredNorm() == doctest::Approx(200.0).epsilon(1e-12));
  // equator-symmetric
  for (std::size_t r = 0; r < 10; ++r) {
    CHECK(wf.values(g->index(r, 0)) == doctest::Approx(wf.values(g->index(9 - r, 7))).epsilon(1e-14));
  }
  // ratio to the cos-latitude square root is the global constant
  const double k = w(0) / std::sqrt(std::cos(g->cell(0).lat));
  for (Eigen::Index i = 0; i < 200; ++i) {
    CHECK(w(i) / std::sqrt(std::cos(g->cell(std::size_t(i)).lat)) == doctest::Approx(k).epsilon(1e-13));
  }
  const auto g3 = build_grid(3, 6);
  const FieldVector eq = area_weight_field(*g3, FieldVector(g3, Eigen::VectorXd::Ones(18)));
  double mean_cos = 0.0;
  for (std::size_t i = 0; i < 18; ++i) mean_cos += std::cos(g3->cell(i).lat) / 18.0;
  CHECK(eq.values(g3->index(1, 0)) == doctest::Approx(1.0 / std::sqrt(mean_cos)).epsilon(1e-14));
  CHECK_THROWS_AS(area_weight_field(*g3, ones), DataError);
}
