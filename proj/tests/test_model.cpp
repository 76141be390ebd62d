#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "beamopt/model.hpp"

using namespace beamopt;

namespace {

ArrayGeometry ula(int n, double spacing = 0.5, double fc = 3.0e9) {
  ArrayGeometry g;
  g.n_elements = n;
  g.spacing_wavelengths = spacing;
  g.carrier_freq_hz = fc;
  return g;
}

double max_abs_diff(const CVec& a, const CVec& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("steering vector matches hand-computed values") {
  // N = 2, d = lambda/2, theta = 30 deg: a = (1/sqrt(2)) [1, e^{-j pi sin 30}]
  //                                        = (1/sqrt(2)) [1, -j].
  const CVec a = steering_vector(ula(2), 30.0);
  const double s = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(a(0) - cd(s, 0.0)) < 1e-14);
  CHECK(std::abs(a(1) - cd(0.0, -s)) < 1e-14);

  // Broadside: all entries equal 1/sqrt(N).
  const CVec b = steering_vector(ula(4), 0.0);
  for (int i = 0; i < 4; ++i) CHECK(std::abs(b(i) - cd(0.5, 0.0)) < 1e-15);
}

TEST_CASE("steering vector has unit norm for all angles and sizes") {
  for (int n : {1, 2, 3, 8, 16, 33}) {
    for (double th = -85.0; th <= 85.0; th += 7.3) {
      CHECK(std::abs(steering_vector(ula(n), th).norm() - 1.0) < 1e-13);
    }
  }
}

TEST_CASE("steering vector rejects angles outside the open (-90, 90) range") {
  CHECK_THROWS_AS(steering_vector(ula(4), 90.0), std::domain_error);
  CHECK_THROWS_AS(steering_vector(ula(4), -95.0), std::domain_error);
  CHECK_NOTHROW(steering_vector(ula(4), 89.999));
}

TEST_CASE("frequency-scaled steering equals steering at the scaled angle") {
  // At f = 2 fc the spatial frequency doubles: with sin(theta) = 0.25 the
  // response equals the carrier steering vector at asin(0.5) = 30 deg.
  const ArrayGeometry g = ula(6);
  const double theta = 14.477512185929925;  // asin(0.25) in degrees
  const CVec a2f = steering_vector_at(g, theta, 2.0 * g.carrier_freq_hz);
  const CVec a30 = steering_vector(g, 30.0);
  CHECK(max_abs_diff(a2f, a30) < 1e-12);
  // And at the carrier the two functions agree exactly.
  CHECK(max_abs_diff(steering_vector_at(g, theta, g.carrier_freq_hz),
                     steering_vector(g, theta)) < 1e-15);
}

TEST_CASE("fraunhofer distance matches the aperture formula by hand") {
  // N = 10, d = lambda/2 at 3 GHz: A = 9 * 0.5 * c/f, R = 2 A^2 f / c.
  const double r = fraunhofer_distance(ula(10));
  CHECK(r == Catch::Approx(4.047198183).epsilon(1e-9));
}

TEST_CASE("near-field steering converges to far-field steering at large range") {
  for (int n : {4, 16, 64}) {
    const ArrayGeometry g = ula(n);
    const double r = 100.0 * fraunhofer_distance(g);
    for (double th : {0.0, -35.0, 60.0}) {
      const CVec nf = near_field_steering(g, th, r);
      const CVec ff = steering_vector(g, th);
      // "Agrees up to a common phase" means some rotation e^{j phi} brings all
      // per-element phases within tolerance; the best such phi leaves the
      // midrange of the per-element offsets, so the residual is half the
      // spread of arg(nf_i / ff_i).
      const double ref = std::arg(nf(0) * std::conj(ff(0)));
      double lo = 0.0;
      double hi = 0.0;
      for (int i = 0; i < n; ++i) {
        const double e =
            std::arg(nf(i) * std::conj(ff(i)) * std::exp(cd(0.0, -ref)));
        lo = std::min(lo, e);
        hi = std::max(hi, e);
      }
      CHECK(0.5 * (hi - lo) < 1e-2);
    }
  }
}

TEST_CASE("near-field steering deviates from far-field well inside Fraunhofer") {
  const ArrayGeometry g = ula(32);
  const double r = 0.05 * fraunhofer_distance(g);
  const CVec nf = near_field_steering(g, 10.0, r);
  const CVec ff = steering_vector(g, 10.0);
  const cd corr = ff.dot(nf);
  // Correlation loss is substantial: |a_ff^H a_nf| < 0.99.
  CHECK(std::abs(corr) < 0.99);
}

TEST_CASE("near-field steering validates its inputs") {
  CHECK_THROWS_AS(near_field_steering(ula(4), 0.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(near_field_steering(ula(4), 90.0, 10.0), std::domain_error);
}

TEST_CASE("true covariance matches a hand-built two-element example") {
  // Noise power 1, no SoI, single interferer at 30 deg with power 4:
  // R = I + 4 a a^H = [[3, 2j], [-2j, 3]] for a = (1/sqrt2)[1, -j].
  Scenario sc;
  sc.soi_power = 0.0;
  sc.noise_power = 1.0;
  sc.interferers = {{30.0, 4.0}};
  const CMat r = true_covariance(ula(2), sc, false);
  CHECK(std::abs(r(0, 0) - cd(3.0, 0.0)) < 1e-12);
  CHECK(std::abs(r(0, 1) - cd(0.0, 2.0)) < 1e-12);
  CHECK(std::abs(r(1, 0) - cd(0.0, -2.0)) < 1e-12);
  CHECK(std::abs(r(1, 1) - cd(3.0, 0.0)) < 1e-12);

  // include_soi = false drops only the SoI term.
  sc.soi_power = 5.0;
  sc.soi_direction_deg = 0.0;
  const CMat r_all = true_covariance(ula(2), sc, true);
  const CVec a0 = steering_vector(ula(2), 0.0);
  CHECK((r_all - (r + 5.0 * a0 * a0.adjoint())).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("sample covariance matches a hand-computed snapshot matrix") {
  CMat y(2, 2);
  y << cd(1, 0), cd(0, 1), cd(0, 0), cd(1, 0);
  const CMat r = sample_covariance(y);
  CHECK(std::abs(r(0, 0) - cd(1.0, 0.0)) < 1e-15);
  CHECK(std::abs(r(0, 1) - cd(0.0, 0.5)) < 1e-15);
  CHECK(std::abs(r(1, 0) - cd(0.0, -0.5)) < 1e-15);
  CHECK(std::abs(r(1, 1) - cd(0.5, 0.0)) < 1e-15);
  CHECK_THROWS_AS(sample_covariance(CMat(2, 0)), std::invalid_argument);
}

TEST_CASE("generated snapshots are reproducible and match the ensemble covariance") {
  const ArrayGeometry g = ula(6);
  Scenario sc;
  sc.soi_direction_deg = 10.0;
  sc.soi_power = 2.0;
  sc.interferers = {{-40.0, 8.0}};
  sc.snapshots = 4000;

  Rng rng1(42), rng2(42), rng3(43);
  const CMat y1 = generate_snapshots(g, sc, rng1);
  const CMat y2 = generate_snapshots(g, sc, rng2);
  const CMat y3 = generate_snapshots(g, sc, rng3);
  REQUIRE(y1.rows() == 6);
  REQUIRE(y1.cols() == 4000);
  CHECK((y1 - y2).cwiseAbs().maxCoeff() == 0.0);  // same seed, same bits
  CHECK((y1 - y3).cwiseAbs().maxCoeff() > 1e-3);  // different seed differs

  const CMat rhat = sample_covariance(y1);
  const CMat rtrue = true_covariance(g, sc);
  // Statistical agreement: relative Frobenius error shrinks like 1/sqrt(T).
  CHECK((rhat - rtrue).norm() / rtrue.norm() < 0.10);
}

TEST_CASE("subcarrier grid is centered and symmetric") {
  const auto f = subcarrier_frequencies(100.0, 8.0, 4);
  REQUIRE(f.size() == 4);
  CHECK(f[0] == Catch::Approx(97.0));
  CHECK(f[1] == Catch::Approx(99.0));
  CHECK(f[2] == Catch::Approx(101.0));
  CHECK(f[3] == Catch::Approx(103.0));
  const auto single = subcarrier_frequencies(5.0e9, 1.0e9, 1);
  REQUIRE(single.size() == 1);
  CHECK(single[0] == Catch::Approx(5.0e9));
  CHECK_THROWS_AS(subcarrier_frequencies(1.0, 1.0, 0), std::invalid_argument);
}

TEST_CASE("geometric channel is normalized and reproducible") {
  const ArrayGeometry tx = ula(16, 0.5, 28.0e9);
  const int n_rx = 4;

  Rng rng(7);
  double acc = 0.0;
  const int draws = 400;
  for (int i = 0; i < draws; ++i) {
    const ChannelMatrix ch = geometric_channel(tx, n_rx, 3, rng);
    acc += ch.matrix.squaredNorm();
  }
  // E ||H||_F^2 = N * N_R = 64 (law of large numbers, loose gate).
  CHECK(acc / draws == Catch::Approx(64.0).epsilon(0.15));

  Rng ra(11), rb(11);
  const ChannelMatrix c1 = geometric_channel(tx, n_rx, 3, ra);
  const ChannelMatrix c2 = geometric_channel(tx, n_rx, 3, rb);
  CHECK((c1.matrix - c2.matrix).cwiseAbs().maxCoeff() == 0.0);

  // Wideband request fills per-subcarrier responses on the centered grid.
  Rng rc(11);
  const ChannelMatrix cw = geometric_channel(tx, n_rx, 3, rc, 60.0, 8, 2.0e9);
  REQUIRE(cw.per_subcarrier.size() == 8);
  REQUIRE(cw.subcarrier_freqs_hz.size() == 8);
  // Narrowband matrix equals the same draw's carrier response.
  CHECK((cw.matrix - c1.matrix).cwiseAbs().maxCoeff() == 0.0);
  // Center of the grid straddles the carrier.
  CHECK(0.5 * (cw.subcarrier_freqs_hz[3] + cw.subcarrier_freqs_hz[4]) ==
        Catch::Approx(28.0e9));
  CHECK_THROWS_AS(geometric_channel(tx, 0, 3, rc), std::invalid_argument);
  CHECK_THROWS_AS(geometric_channel(tx, 4, 0, rc), std::invalid_argument);
}

TEST_CASE("sector matrices are Hermitian PSD with the exact trace identity") {
  const ArrayGeometry g = ula(8);
  const SectorMatrix sm = sector_matrices(g, 5.0, 15.0);

  CHECK((sm.C - sm.C.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((sm.C_tilde - sm.C_tilde.adjoint()).cwiseAbs().maxCoeff() < 1e-12);

  Eigen::SelfAdjointEigenSolver<CMat> es(sm.C);
  CHECK(es.eigenvalues().minCoeff() > -1e-12);
  Eigen::SelfAdjointEigenSolver<CMat> est(sm.C_tilde);
  CHECK(est.eigenvalues().minCoeff() > -1e-12);

  // ||a~||^2 = N identically, so tr(C) = N * (sector width in radians).
  const double width_rad = deg2rad(10.0);
  CHECK(std::real(sm.C.trace()) == Catch::Approx(8.0 * width_rad).epsilon(1e-10));

  // In-sector steering stays within the delta0 complement-leakage bound.
  for (double th = 5.0; th <= 15.0; th += 0.5) {
    const CVec at = std::sqrt(8.0) * steering_vector(g, th);
    const cd q = at.adjoint() * sm.C_tilde * at;
    CHECK(std::real(q) <= sm.delta0 * (1.0 + 1e-12));
  }
  // Far out-of-sector steering leaks far more than delta0.
  const CVec aout = std::sqrt(8.0) * steering_vector(g, -50.0);
  const cd qout = aout.adjoint() * sm.C_tilde * aout;
  CHECK(std::real(qout) > 2.0 * sm.delta0);

  CHECK_THROWS_AS(sector_matrices(g, 15.0, 5.0), std::invalid_argument);
}
