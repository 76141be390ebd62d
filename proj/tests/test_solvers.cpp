#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>

#include "beamopt/conic.hpp"
#include "beamopt/manifold.hpp"
#include "beamopt/procrustes.hpp"
#include "beamopt/rng.hpp"
#include "beamopt/rootfind.hpp"
#include "corpus.hpp"

using namespace beamopt;

TEST_CASE("safeguarded root finder solves classic scalar equations") {
  const RootResult r1 = newton_scalar_root([](double x) { return x * x - 2.0; }, 0.0, 2.0);
  CHECK(r1.x == Catch::Approx(std::sqrt(2.0)).epsilon(1e-12));

  const RootResult r2 =
      newton_scalar_root([](double x) { return std::cos(x) - x; }, 0.0, 1.0);
  CHECK(r2.x == Catch::Approx(0.7390851332151607).epsilon(1e-10));

  // Root at a bracket endpoint is returned immediately.
  const RootResult r3 = newton_scalar_root([](double x) { return x; }, 0.0, 1.0);
  CHECK(r3.x == 0.0);

  CHECK_THROWS_AS(newton_scalar_root([](double x) { return x * x + 1.0; }, -1.0, 1.0),
                  std::domain_error);
  CHECK_THROWS_AS(newton_scalar_root([](double x) { return x; }, 1.0, 1.0),
                  std::invalid_argument);
}

TEST_CASE("svec/smat are mutually inverse and inner-product preserving") {
  Rng rng(3);
  for (int n : {1, 2, 3, 5}) {
    RMat a(n, n), b(n, n);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        a(i, j) = rng.normal();
        b(i, j) = rng.normal();
      }
    a = RMat(0.5 * (a + a.transpose()));
    b = RMat(0.5 * (b + b.transpose()));
    CHECK((smat(svec(a), n) - a).cwiseAbs().maxCoeff() < 1e-14);
    // <svec(A), svec(B)> = tr(A B) for symmetric matrices.
    const double lhs = svec(a).dot(svec(b));
    const double rhs = (a * b).trace();
    CHECK(lhs == Catch::Approx(rhs).margin(1e-12));
  }
}

TEST_CASE("psd projection clamps negative eigenvalues") {
  RMat s(2, 2);
  s << 1.0, 0.0, 0.0, -2.0;
  const RMat p = psd_project(s);
  CHECK(p(0, 0) == Catch::Approx(1.0));
  CHECK(p(1, 1) == Catch::Approx(0.0).margin(1e-14));

  // Idempotence on an already-PSD Hermitian matrix.
  CMat h(2, 2);
  h << cd(2, 0), cd(0, 1), cd(0, -1), cd(2, 0);
  CHECK((psd_project(CMat(psd_project(h))) - psd_project(h)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("cone projections fix the canonical cases") {
  // SOC: a point outside with xn > |t| lands on the cone boundary.
  RVec v(3);
  v << 1.0, 3.0, 4.0;  // t = 1, ||x|| = 5
  ConeSpec soc{ConeSpec::Soc, 3};
  RVec w = v;
  project_cone_block(w, soc);
  CHECK(w(0) == Catch::Approx(3.0));  // alpha = (1 + 5)/2
  CHECK(w.tail(2).norm() == Catch::Approx(3.0));
  // Inside: unchanged. Polar interior: zeroed.
  RVec in(3);
  in << 5.0, 3.0, 0.0;
  RVec in2 = in;
  project_cone_block(in2, soc);
  CHECK((in2 - in).cwiseAbs().maxCoeff() == 0.0);
  RVec pol(3);
  pol << -5.0, 3.0, 0.0;
  project_cone_block(pol, soc);
  CHECK(pol.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("complex embedding helpers satisfy their defining identities") {
  Rng rng(5);
  const CMat m = rng.cnormal_matrix(3, 2);
  const CVec x = rng.cnormal_vector(2);
  const CVec q = rng.cnormal_vector(3);

  // complex_op_block maps stacked real/imag parts as M does complex vectors.
  RVec xs(4);
  xs << x.real(), x.imag();
  const RVec ys = complex_op_block(m) * xs;
  const CVec y = m * x;
  CHECK((ys.head(3) - y.real()).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((ys.tail(3) - y.imag()).cwiseAbs().maxCoeff() < 1e-14);

  // re/im inner rows match Re(q^H w), Im(q^H w).
  const CVec w = rng.cnormal_vector(3);
  RVec wstack(6);
  wstack << w.real(), w.imag();
  const cd qw = q.dot(w);
  CHECK(re_inner_row(q).dot(wstack) == Catch::Approx(std::real(qw)).margin(1e-12));
  CHECK(im_inner_row(q).dot(wstack) == Catch::Approx(std::imag(qw)).margin(1e-12));

  // Hermitian embedding: doubles the trace, duplicates the spectrum.
  CMat hm(2, 2);
  hm << cd(1, 0), cd(0, 2), cd(0, -2), cd(3, 0);
  const RMat e = hermitian_embed(hm);
  CHECK(e.trace() == Catch::Approx(2.0 * std::real(hm.trace())));
  Eigen::SelfAdjointEigenSolver<CMat> esc(hm);
  Eigen::SelfAdjointEigenSolver<RMat> esr(e);
  CHECK(esr.eigenvalues()(0) == Catch::Approx(esc.eigenvalues()(0)).margin(1e-12));
  CHECK(esr.eigenvalues()(1) == Catch::Approx(esc.eigenvalues()(0)).margin(1e-12));
  CHECK(esr.eigenvalues()(2) == Catch::Approx(esc.eigenvalues()(1)).margin(1e-12));
  CHECK(esr.eigenvalues()(3) == Catch::Approx(esc.eigenvalues()(1)).margin(1e-12));
}

TEST_CASE("hermitian variable parameterization is exact and self-consistent") {
  Rng rng(9);
  const int n = 3;
  HermitianVariable hv(n);
  REQUIRE(hv.param_count() == n * n);

  // pack/unpack roundtrip through a random Hermitian matrix.
  CMat x = rng.cnormal_matrix(n, n);
  x = CMat(0.5 * (x + x.adjoint()));
  RVec p(hv.param_count());
  // Recover parameters via the basis inner products (orthogonality varies, so
  // solve the tiny linear system instead of assuming orthonormality).
  {
    RMat basis_mat(2 * n * n, hv.param_count());
    for (int k = 0; k < hv.param_count(); ++k) {
      const CMat bk = hv.basis(k);
      const RMat br = bk.real();
      const RMat bi = bk.imag();
      RVec col(2 * n * n);
      col << Eigen::Map<const RVec>(br.data(), n * n), Eigen::Map<const RVec>(bi.data(), n * n);
      basis_mat.col(k) = col;
    }
    const RMat xr = x.real();
    const RMat xi = x.imag();
    RVec xs(2 * n * n);
    xs << Eigen::Map<const RVec>(xr.data(), n * n), Eigen::Map<const RVec>(xi.data(), n * n);
    p = basis_mat.colPivHouseholderQr().solve(xs);
  }
  CHECK((hv.unpack(p) - x).cwiseAbs().maxCoeff() < 1e-10);

  // trace_row(Q) agrees with tr(Q X) for Hermitian Q.
  CMat q = rng.cnormal_matrix(n, n);
  q = CMat(0.5 * (q + q.adjoint()));
  const double traced = std::real(CMat(q * x).trace());
  CHECK(hv.trace_row(q).dot(p) == Catch::Approx(traced).margin(1e-10));

  // embed_map columns are svec(embed(basis_k)).
  const RMat em = hv.embed_map();
  CHECK((em.col(0) - svec(hermitian_embed(hv.basis(0)))).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("conic solver flags a primal-infeasible pair of half-spaces") {
  ConicProblem p;  // x >= 0 and x <= -1
  p.c = RVec::Constant(1, 1.0);
  p.A = RMat(2, 1);
  p.A << -1.0, 1.0;
  p.b = RVec(2);
  p.b << 0.0, -1.0;
  p.cones = {{ConeSpec::NonNeg, 2}};
  const ConicSolution sol = conic_solve(p, {.tol = 1e-8, .max_iter = 200000});
  CHECK(sol.status == ConicStatus::Infeasible);
}

TEST_CASE("conic solver writes a residual history when asked") {
  ConicProblem p;
  p.c = RVec::Constant(1, 1.0);
  p.A = RMat::Constant(1, 1, -1.0);
  p.b = RVec::Constant(1, -1.0);
  p.cones = {{ConeSpec::NonNeg, 1}};
  ConicSettings s;
  s.debug_csv = "conic_debug_test.csv";
  const ConicSolution sol = conic_solve(p, s);
  CHECK(sol.status == ConicStatus::Optimal);
  std::FILE* f = std::fopen("conic_debug_test.csv", "r");
  REQUIRE(f != nullptr);
  char header[64] = {0};
  REQUIRE(std::fgets(header, sizeof header, f) != nullptr);
  CHECK(std::string(header).find("primal_residual") != std::string::npos);
  std::fclose(f);
  std::remove("conic_debug_test.csv");
}

TEST_CASE("conic corpus: 30 problems with known optima solve to tolerance") {
  const auto cases = corpus::conic_corpus();
  REQUIRE(cases.size() == 30);
  for (const auto& c : cases) {
    INFO("corpus case " << c.name);
    const corpus::CorpusOutcome out = c.run();
    CHECK(out.status == ConicStatus::Optimal);
    CHECK(out.primal_residual < 1e-6);
    CHECK(out.dual_residual < 1e-6);
    CHECK(out.gap < 1e-6);
    CHECK(std::abs(out.objective - c.analytic) <
          1e-5 * std::max(1.0, std::abs(c.analytic)));
    if (c.rank_check) {
      REQUIRE(out.rank_ratio >= 0.0);
      CHECK(out.rank_ratio < 1e-6);
    }
  }
}

TEST_CASE("manifold descent solves the separable circle-projection problem") {
  // min ||x - t||^2 over entries with |x_i| = r: solution x_i = r t_i /|t_i|.
  Rng rng(11);
  const CMat target = rng.cnormal_matrix(4, 2);
  const double radius = 0.7;
  ManifoldCost cost = [&](const CMat& x) {
    const CMat diff = x - target;
    return std::make_pair(diff.squaredNorm(), CMat(2.0 * diff));
  };
  UnitModulusPoint x0;
  x0.radius = radius;
  x0.entries = CMat::Constant(4, 2, cd(radius, 0.0));
  const ManifoldResult res = manifold_minimize(cost, x0, {.max_iter = 2000});

  double expect = 0.0;
  for (Eigen::Index j = 0; j < 2; ++j)
    for (Eigen::Index i = 0; i < 4; ++i) {
      const cd xi = radius * target(i, j) / std::abs(target(i, j));
      expect += std::norm(xi - target(i, j));
      CHECK(std::abs(res.point.entries(i, j) - xi) < 1e-5);
    }
  CHECK(res.cost == Catch::Approx(expect).epsilon(1e-8));

  // Accepted-step trace is monotone non-increasing.
  for (size_t k = 1; k < res.trace.size(); ++k) CHECK(res.trace[k] <= res.trace[k - 1] + 1e-15);
  // Entries stay on the circle.
  for (Eigen::Index j = 0; j < 2; ++j)
    for (Eigen::Index i = 0; i < 4; ++i)
      CHECK(std::abs(std::abs(res.point.entries(i, j)) - radius) < 1e-12);
}

TEST_CASE("manifold helpers validate inputs and keep tangency") {
  CHECK_THROWS_AS(UnitModulusPoint::from(CMat::Zero(2, 2)), std::invalid_argument);
  CMat mixed(1, 2);
  mixed << cd(1.0, 0.0), cd(2.0, 0.0);
  CHECK_THROWS_AS(UnitModulusPoint::from(mixed), std::invalid_argument);

  Rng rng(13);
  CMat x = retract_modulus(rng.cnormal_matrix(3, 3), 1.0);
  const CMat g = rng.cnormal_matrix(3, 3);
  const CMat t = tangent_project(x, g, 1.0);
  for (Eigen::Index j = 0; j < 3; ++j)
    for (Eigen::Index i = 0; i < 3; ++i)
      CHECK(std::abs(std::real(t(i, j) * std::conj(x(i, j)))) < 1e-12);
}

TEST_CASE("orthogonal procrustes recovers a planted rotation and is optimal") {
  Rng rng(17);
  const CMat a = rng.cnormal_matrix(8, 2);

  // Planted row-orthonormal P (2 x 3): first two rows of a random unitary.
  const CMat gm = rng.cnormal_matrix(3, 3);
  Eigen::HouseholderQR<CMat> qr(gm);
  const CMat qfull = qr.householderQ();
  const CMat ptrue = qfull.leftCols(2).adjoint();  // 2 x 3, P P^H = I

  const CMat b = a * ptrue;
  const CMat p = orthogonal_procrustes(a, b);
  CHECK((p * p.adjoint() - CMat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((p - ptrue).cwiseAbs().maxCoeff() < 1e-10);

  // Optimality: no random row-orthonormal Q beats the returned P.
  const CMat b2 = b + 0.1 * rng.cnormal_matrix(8, 3);
  const CMat popt = orthogonal_procrustes(a, b2);
  const double best = (b2 - a * popt).squaredNorm();
  for (int k = 0; k < 50; ++k) {
    Eigen::HouseholderQR<CMat> qk(CMat(rng.cnormal_matrix(3, 3)));
    const CMat q = CMat(qk.householderQ()).leftCols(2).adjoint();
    CHECK(best <= (b2 - a * q).squaredNorm() + 1e-10);
  }

  CHECK_THROWS_AS(orthogonal_procrustes(CMat::Zero(4, 3), CMat::Zero(4, 2)),
                  std::invalid_argument);
  CHECK_THROWS_AS(orthogonal_procrustes(CMat::Zero(4, 2), CMat::Zero(5, 2)),
                  std::invalid_argument);
}
