#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "beamopt/hybrid.hpp"
#include "beamopt/model.hpp"
#include "beamopt/rng.hpp"

using namespace beamopt;

namespace {

ArrayGeometry ula(int n, double fc = 28.0e9) {
  ArrayGeometry g;
  g.n_elements = n;
  g.spacing_wavelengths = 0.5;
  g.carrier_freq_hz = fc;
  return g;
}

}  // namespace

TEST_CASE("optimal digital precoder matches the SVD hand computation") {
  // H = diag(3, 2, 1): top-2 right singular vectors are e1, e2 and the
  // Frobenius norm is already sqrt(2).
  CMat h = CMat::Zero(3, 3);
  h(0, 0) = cd(3, 0);
  h(1, 1) = cd(2, 0);
  h(2, 2) = cd(1, 0);
  const CMat f = optimal_digital(h, 2);
  REQUIRE(f.rows() == 3);
  REQUIRE(f.cols() == 2);
  CHECK(std::abs(f(0, 0) - cd(1, 0)) < 1e-12);
  CHECK(std::abs(f(1, 1) - cd(1, 0)) < 1e-12);
  CHECK(std::abs(f(2, 0)) < 1e-12);
  CHECK(f.norm() == Catch::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK_THROWS_AS(optimal_digital(h, 0), std::invalid_argument);
  CHECK_THROWS_AS(optimal_digital(h, 4), std::invalid_argument);
}

TEST_CASE("spectral efficiency matches the closed form and handles wideband") {
  // H = I2, F = I2, kappa = sigma^2 = 1, N_S = 2: 2 log2(1.5).
  const CMat eye = CMat::Identity(2, 2);
  CHECK(spectral_efficiency(eye, eye, 1.0, 1.0, 2) ==
        Catch::Approx(1.1699250014423124).epsilon(1e-12));
  CHECK_THROWS_AS(spectral_efficiency(eye, eye, 0.0, 1.0, 2), std::domain_error);

  // Wideband overload averages the per-subcarrier rates.
  CMat h2 = 2.0 * eye;
  const double se1 = spectral_efficiency(eye, eye, 1.0, 1.0, 2);
  const double se2 = spectral_efficiency(h2, eye, 1.0, 1.0, 2);
  CHECK(spectral_efficiency(std::vector<CMat>{eye, h2}, {eye, eye}, 1.0, 1.0, 2) ==
        Catch::Approx(0.5 * (se1 + se2)).epsilon(1e-12));
  CHECK_THROWS_AS(spectral_efficiency(std::vector<CMat>{eye}, {eye, eye}, 1.0, 1.0, 2),
                  std::invalid_argument);
}

TEST_CASE("fully digital dominates any equal-power hybrid factorization") {
  Rng rng(101);
  const ArrayGeometry tx = ula(16);
  for (int k = 0; k < 5; ++k) {
    const ChannelMatrix ch = geometric_channel(tx, 4, 3, rng);
    const CMat fc = optimal_digital(ch.matrix, 2);
    const HybridBeamformer hb = mo_hybrid(fc, 4);
    const double se_d = spectral_efficiency(ch.matrix, fc, 1.0, 0.1, 2);
    const double se_h =
        spectral_efficiency(ch.matrix, effective_precoder(hb), 1.0, 0.1, 2);
    CHECK(se_h <= se_d + 1e-9);
    // Terminal normalization: ||F_RF F_BB|| = sqrt(N_S).
    CHECK(effective_precoder(hb).norm() == Catch::Approx(std::sqrt(2.0)).epsilon(1e-12));
  }
}

TEST_CASE("steering dictionary atoms are unit-norm steering vectors") {
  const ArrayGeometry g = ula(8);
  const CMat dict = steering_dictionary(g);
  REQUIRE(dict.cols() == 16);
  REQUIRE(dict.rows() == 8);
  for (int k = 0; k < 16; ++k) {
    CHECK(dict.col(k).norm() == Catch::Approx(1.0).epsilon(1e-12));
    for (int i = 0; i < 8; ++i)
      CHECK(std::abs(dict(i, k)) == Catch::Approx(1.0 / std::sqrt(8.0)).epsilon(1e-12));
  }
}

TEST_CASE("OMP recovers targets lying in the span of two dictionary atoms") {
  const ArrayGeometry g = ula(12);
  const CMat dict = steering_dictionary(g);
  CMat fc(12, 2);
  fc.col(0) = dict.col(3);
  fc.col(1) = dict.col(17);
  const HybridBeamformer hb = omp_hybrid(fc, 2, dict);
  CHECK(hb.cost < 1e-20);
  CHECK(hb.method == "omp");
  // After normalization the effective precoder still spans the two atoms.
  CHECK((effective_precoder(hb) - fc).norm() < 1e-9);

  CHECK_THROWS_AS(omp_hybrid(fc, 1, dict), std::invalid_argument);   // N_RF < N_S
  CHECK_THROWS_AS(omp_hybrid(fc, 13, dict), std::invalid_argument);  // N_RF > N
}

TEST_CASE("OMP reduces the fit residual as RF chains are added") {
  Rng rng(103);
  const ArrayGeometry tx = ula(16);
  const ChannelMatrix ch = geometric_channel(tx, 4, 4, rng);
  const CMat fc = optimal_digital(ch.matrix, 2);
  double prev = std::numeric_limits<double>::infinity();
  for (int nrf = 2; nrf <= 6; ++nrf) {
    const HybridBeamformer hb = omp_hybrid(fc, nrf);
    CHECK(hb.cost <= prev * (1.0 + 1e-9));
    prev = hb.cost;
    // Analog entries keep constant modulus 1/sqrt(N).
    for (Eigen::Index j = 0; j < hb.f_rf.cols(); ++j)
      for (Eigen::Index i = 0; i < hb.f_rf.rows(); ++i)
        CHECK(std::abs(hb.f_rf(i, j)) == Catch::Approx(0.25).epsilon(1e-12));
  }
}

TEST_CASE("manifold alternation is exact when N_RF = N") {
  Rng rng(104);
  const ArrayGeometry tx = ula(8);
  const ChannelMatrix ch = geometric_channel(tx, 4, 3, rng);
  const CMat fc = optimal_digital(ch.matrix, 2);
  const HybridBeamformer hb = mo_hybrid(fc, 8);
  CHECK(hb.cost < 1e-10);
  CHECK((effective_precoder(hb) - fc).norm() < 1e-6);
  const double se_d = spectral_efficiency(ch.matrix, fc, 1.0, 0.1, 2);
  const double se_h = spectral_efficiency(ch.matrix, effective_precoder(hb), 1.0, 0.1, 2);
  CHECK(se_h == Catch::Approx(se_d).epsilon(1e-9));
}

TEST_CASE("manifold alternation descends monotonically and beats its start") {
  Rng rng(105);
  const ArrayGeometry tx = ula(24);
  const ChannelMatrix ch = geometric_channel(tx, 4, 3, rng);
  const CMat fc = optimal_digital(ch.matrix, 2);
  const HybridBeamformer hb = mo_hybrid(fc, 3);
  REQUIRE(hb.trace.size() >= 2);
  for (size_t k = 1; k < hb.trace.size(); ++k) CHECK(hb.trace[k] <= hb.trace[k - 1] + 1e-12);
  CHECK(hb.cost <= hb.trace.front());
  CHECK(hb.method == "mo");
}

TEST_CASE("phase quantization snaps to the grid and preserves moduli") {
  CMat f(1, 3);
  f << 0.7 * std::exp(cd(0.0, 0.3)), 0.7 * std::exp(cd(0.0, 1.2)),
      0.7 * std::exp(cd(0.0, -2.9));
  const CMat q2 = quantize_phases(f, 2);  // grid step pi/2
  CHECK(std::arg(q2(0, 0)) == Catch::Approx(0.0).margin(1e-12));
  CHECK(std::arg(q2(0, 1)) == Catch::Approx(pi / 2.0).epsilon(1e-12));
  CHECK(std::arg(q2(0, 2)) == Catch::Approx(-pi).margin(1e-9));  // -2.9 -> -pi
  for (int j = 0; j < 3; ++j) CHECK(std::abs(q2(0, j)) == Catch::Approx(0.7).epsilon(1e-12));
  // Idempotence.
  CHECK((quantize_phases(q2, 2) - q2).cwiseAbs().maxCoeff() < 1e-15);
  CHECK_THROWS_AS(quantize_phases(f, 0), std::domain_error);
  CHECK_THROWS_AS(quantize_phases(f, 31), std::domain_error);
}

TEST_CASE("quantized hybrid designs approach the unquantized fit at high resolution") {
  Rng rng(106);
  const ArrayGeometry tx = ula(16);
  const ChannelMatrix ch = geometric_channel(tx, 4, 3, rng);
  const CMat fc = optimal_digital(ch.matrix, 2);
  const HybridBeamformer hb = mo_hybrid(fc, 4);
  const HybridBeamformer q8 = quantize_hybrid(hb, {fc}, 8);
  CHECK(q8.method == "mo-q8");
  const double se = spectral_efficiency(ch.matrix, effective_precoder(hb), 1.0, 0.1, 2);
  const double se_q = spectral_efficiency(ch.matrix, effective_precoder(q8), 1.0, 0.1, 2);
  CHECK(std::abs(se - se_q) < 0.05);
  // One-bit phases live on {1, j, -1, -j} rays.
  const HybridBeamformer q1 = quantize_hybrid(hb, {fc}, 1);
  for (Eigen::Index j = 0; j < q1.f_rf.cols(); ++j)
    for (Eigen::Index i = 0; i < q1.f_rf.rows(); ++i) {
      const double ph = std::arg(q1.f_rf(i, j));
      const double snapped = std::round(ph / pi) * pi;
      CHECK(std::abs(ph - snapped) < 1e-12);
    }
  CHECK_THROWS_AS(quantize_hybrid(hb, {fc, fc}, 4), std::invalid_argument);
}

TEST_CASE("wideband design with one subcarrier equals the narrowband design") {
  Rng rng(107);
  const ArrayGeometry tx = ula(12);
  const ChannelMatrix ch = geometric_channel(tx, 4, 3, rng);
  const CMat fc = optimal_digital(ch.matrix, 2);
  const HybridBeamformer nb = mo_hybrid(fc, 4);
  const HybridBeamformer wb = wideband_hybrid({fc}, 4);
  CHECK((nb.f_rf - wb.f_rf).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((nb.f_bb[0] - wb.f_bb[0]).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(wb.method == "wideband-mo");
}

TEST_CASE("wideband design normalizes every subcarrier block") {
  Rng rng(108);
  const ArrayGeometry tx = ula(16, 0.3e12);
  const ChannelMatrix ch = geometric_channel(tx, 4, 3, rng, 60.0, 4, 0.1 * 0.3e12);
  std::vector<CMat> targets;
  for (const auto& hm : ch.per_subcarrier) targets.push_back(optimal_digital(hm, 2));
  const HybridBeamformer wb = wideband_hybrid(targets, 4);
  REQUIRE(wb.f_bb.size() == 4);
  for (int m = 0; m < 4; ++m)
    CHECK(effective_precoder(wb, m).norm() == Catch::Approx(std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("beam squint deviation reproduces the reference band-edge anchors") {
  // 0.3 THz carrier, 30 GHz band, theta = 60 deg.
  const SquintDeviation thz = beam_squint_deviation(3.0e11, 3.0e10, 60.0);
  CHECK(thz.low_deg == Catch::Approx(5.7281974420892965).epsilon(1e-9));
  CHECK(thz.high_deg == Catch::Approx(-4.433188974668887).epsilon(1e-9));
  CHECK(std::max(std::abs(thz.low_deg), std::abs(thz.high_deg)) > 4.0);
  CHECK(std::max(std::abs(thz.low_deg), std::abs(thz.high_deg)) < 8.0);

  // 60 GHz carrier, 1 GHz band: under a degree of drift.
  const SquintDeviation mmw = beam_squint_deviation(6.0e10, 1.0e9, 60.0);
  CHECK(mmw.low_deg == Catch::Approx(0.8447596217011224).epsilon(1e-9));
  CHECK(std::abs(thz.low_deg) / std::abs(mmw.low_deg) ==
        Catch::Approx(6.780860844833258).epsilon(1e-9));

  // Zero bandwidth: no drift. Validation gates.
  const SquintDeviation none = beam_squint_deviation(1.0e9, 0.0, 45.0);
  CHECK(none.low_deg == Catch::Approx(0.0).margin(1e-12));
  CHECK(none.high_deg == Catch::Approx(0.0).margin(1e-12));
  CHECK_THROWS_AS(beam_squint_deviation(1.0e9, 3.0e9, 45.0), std::domain_error);
}

TEST_CASE("beam squint correction recovers pointing and realigns band edges") {
  const double fc = 3.0e11, bw = 0.1 * fc;
  const ArrayGeometry g = ula(64, fc);
  // A fan of analog beams around the intended direction gives the digital
  // correction enough span to follow the squinted steering vector.
  const std::vector<double> fan = {36.0, 39.0, 42.3, 45.0, 48.0};
  const CMat f_rf = radar_steering_matrix(g, fan);
  const double th0 = 42.3;  // intended pointing (fan[2])
  const auto freqs = subcarrier_frequencies(fc, bw, 8);
  CMat bb0 = CMat::Zero(5, 1);
  bb0(2, 0) = cd(1.0, 0.0);
  std::vector<CMat> f_bb(8, bb0);

  const SquintCorrection corr = beam_squint_correct(f_rf, f_bb, freqs, g);
  for (int j = 0; j < 5; ++j) CHECK(std::abs(corr.pointing_deg(j) - fan[j]) <= 0.051);

  // At the band edges the corrected effective precoder aligns far better
  // with the frequency-shifted steering vector than the uncorrected one.
  for (int m : {0, 7}) {
    const CVec a_m = steering_vector_at(g, th0, freqs[m]);
    const CVec unc = f_rf * f_bb[m];
    CVec cor = f_rf * corr.f_bb[m];
    cor *= unc.norm() / cor.norm();  // compare at equal power
    CHECK(std::abs(a_m.dot(cor)) > 2.0 * std::abs(a_m.dot(unc)));
  }
  CHECK_THROWS_AS(beam_squint_correct(f_rf, f_bb, subcarrier_frequencies(fc, bw, 4), g),
                  std::invalid_argument);
}

TEST_CASE("radar steering matrix stacks steering columns") {
  const ArrayGeometry g = ula(8);
  const CMat f = radar_steering_matrix(g, {-30.0, 10.0});
  CHECK((f.col(0) - steering_vector(g, -30.0)).norm() < 1e-15);
  CHECK((f.col(1) - steering_vector(g, 10.0)).norm() < 1e-15);
}

TEST_CASE("JRC tradeoff at zeta = 1 reproduces the plain hybrid design") {
  Rng rng(109);
  const ArrayGeometry tx = ula(16);
  const ChannelMatrix ch = geometric_channel(tx, 4, 3, rng);
  const CMat fc = optimal_digital(ch.matrix, 2);
  const CMat fr = radar_steering_matrix(tx, {-30.0, 30.0});
  const JrcResult jrc = jrc_hybrid(fc, fr, 1.0, 4);
  const HybridBeamformer mo = mo_hybrid(fc, 4);
  CHECK((jrc.hybrid.f_rf - mo.f_rf).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((jrc.hybrid.f_bb[0] - mo.f_bb[0]).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(jrc.hybrid.cost == Catch::Approx(mo.cost).margin(1e-12));
  CHECK(jrc.hybrid.method == "jrc");
}

TEST_CASE("JRC objective is monotone and the P factor stays row-orthonormal") {
  Rng rng(110);
  const ArrayGeometry tx = ula(16);
  const ChannelMatrix ch = geometric_channel(tx, 4, 3, rng);
  const CMat fc = optimal_digital(ch.matrix, 2);
  const CMat fr = radar_steering_matrix(tx, {-40.0, 20.0});
  const JrcResult jrc = jrc_hybrid(fc, fr, 0.5, 4);
  REQUIRE(!jrc.objective_trace.empty());
  for (size_t k = 1; k < jrc.objective_trace.size(); ++k)
    CHECK(jrc.objective_trace[k] <= jrc.objective_trace[k - 1] + 1e-9);
  CHECK((jrc.p * jrc.p.adjoint() - CMat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK_THROWS_AS(jrc_hybrid(fc, fr, 1.5, 4), std::domain_error);
}

TEST_CASE("JRC at zeta = 0 points beams at the radar targets") {
  Rng rng(111);
  const ArrayGeometry tx = ula(16);
  const ChannelMatrix ch = geometric_channel(tx, 4, 3, rng);
  const CMat fc = optimal_digital(ch.matrix, 2);
  const std::vector<double> targets = {-30.0, 30.0};
  const CMat fr = radar_steering_matrix(tx, targets);
  const JrcResult jrc = jrc_hybrid(fc, fr, 0.0, 4);
  const CMat feff = effective_precoder(jrc.hybrid);

  for (double target : targets) {
    double best_v = -1.0, best_th = 0.0;
    for (double th = target - 5.0; th <= target + 5.0; th += 0.05) {
      const CVec a = steering_vector(tx, th);
      const double v = (feff.adjoint() * a).norm();
      if (v > best_v) {
        best_v = v;
        best_th = th;
      }
    }
    CHECK(std::abs(best_th - target) <= 1.0);
  }
}

TEST_CASE("ADC quantization produces two-level outputs at one bit") {
  Rng rng(112);
  const CVec r = rng.cnormal_vector(64);
  const CMat w_rf = CMat::Identity(64, 64);
  const CVec y = w_rf.adjoint() * r;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) acc += std::norm(y(i));
  const double sigma = std::sqrt(acc / (2.0 * 64.0));

  const CVec q1 = adc_quantize(r, w_rf, 1);
  for (Eigen::Index i = 0; i < q1.size(); ++i) {
    CHECK(std::abs(std::abs(q1(i).real()) - 1.5 * sigma) < 1e-12);
    CHECK(std::abs(std::abs(q1(i).imag()) - 1.5 * sigma) < 1e-12);
  }
  // High resolution tracks the unquantized combine closely (saturation of
  // rare tail samples keeps this from being machine precision).
  const CVec q12 = adc_quantize(r, w_rf, 12);
  CHECK((q12 - y).norm() / y.norm() < 5e-2);
  const CVec q4 = adc_quantize(r, w_rf, 4);
  CHECK((q12 - y).norm() < (q4 - y).norm());
  // All-zero input is returned unchanged.
  CHECK(adc_quantize(CVec::Zero(4), CMat::Identity(4, 4), 3).norm() == 0.0);
  CHECK_THROWS_AS(adc_quantize(r, w_rf, 0), std::domain_error);
  CHECK_THROWS_AS(adc_quantize(r, w_rf, 25), std::domain_error);
}

TEST_CASE("combiners: ZF inverts the effective channel, MRC matches it") {
  Rng rng(113);
  const CMat h_eff = rng.cnormal_matrix(6, 2);
  const CMat w_zf = zf_mrc_combine(h_eff, CombinerMode::Zf);
  CHECK((w_zf.adjoint() * h_eff - CMat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-10);
  const CMat w_mrc = zf_mrc_combine(h_eff, CombinerMode::Mrc);
  CHECK((w_mrc - h_eff).norm() == 0.0);
  CMat defective(4, 2);
  defective.col(0) = CVec::Ones(4);
  defective.col(1) = CVec::Ones(4);
  CHECK_THROWS_AS(zf_mrc_combine(defective, CombinerMode::Zf), std::domain_error);
}
