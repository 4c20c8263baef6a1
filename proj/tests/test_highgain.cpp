#include <gtest/gtest.h>

#include "desk_configs.hpp"
#include "stsm/correlation.hpp"
#include "stsm/highgain.hpp"
#include "stsm/model.hpp"

using namespace stsm;

namespace {

CrystalConfig bbo() { return CrystalConfig{degrees_to_radians(32.914), 2e-3, SellmeierSet::bbo_eimerl()}; }

ModelConfig small_high_gain(double g) {
  auto cfg = desk::base(5, 4, 9, 3.5e5, 3.5e14);
  cfg.regime = Regime::high_gain;
  cfg.waist = 25e-6;
  cfg.delta_t = 3e-14;
  cfg.g = g;
  cfg.highgain.rho_nodes = 32;
  cfg.highgain.t_nodes = 32;
  return cfg;
}

// Weighted overlap |<a, b>| / (|a| |b|) of two correlation tensors.
double tensor_correlation(const CorrelationTensor& a, const CorrelationTensor& b) {
  const auto w = a.grid.flat_weights();
  const std::size_t n = a.grid.flat_size();
  cplx ab{};
  double aa = 0.0;
  double bb = 0.0;
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t t = 0; t < n; ++t)
      for (std::size_t j = 0; j < a.grid.m(); ++j) {
        const double wt = w[s] * w[t];
        ab += wt * std::conj(a.at(s, t, j)) * b.at(s, t, j);
        aa += wt * std::norm(a.at(s, t, j));
        bb += wt * std::norm(b.at(s, t, j));
      }
  return std::abs(ab) / std::sqrt(aa * bb);
}

} // namespace

TEST(Gamma, RealAboveThresholdImaginaryBelow) {
  const auto cal = GainCalibration{1.0};
  const PumpHighGain pump{1.0, 1e-4, 1e-13, 355e-9};
  const cplx above = gamma(0.0, 0.0, 0.0, pump, cal, 1.0);
  EXPECT_DOUBLE_EQ(above.real(), 1.0);
  EXPECT_EQ(above.imag(), 0.0);
  const cplx below = gamma(4.0, 0.0, 0.0, pump, cal, 1.0);
  EXPECT_EQ(below.real(), 0.0);
  EXPECT_NEAR(below.imag(), std::sqrt(3.0), 1e-15);
}

TEST(GainKernel, ZeroBracketGivesLength) {
  EXPECT_EQ(gain_kernel(0.0, 2e-3), 2e-3);
}

TEST(GainKernel, SeriesAgreesWithClosedFormAtSmallArgument) {
  const double length = 2e-3;
  for (double x : {1e-12, 1e-10, 1e-8, 1e-6, 1e-4, 3e-4}) {
    const double bracket = x * x / (length * length);
    EXPECT_NEAR(gain_kernel_series(bracket, length) / length, std::sinh(x) / x, 1e-15);
    EXPECT_NEAR(gain_kernel_series(-bracket, length) / length, std::sin(x) / x, 1e-15);
  }
}

TEST(GainKernel, AccurateOnBothSidesOfTheSeriesSwitch) {
  const double length = 2e-3;
  for (double x : {0.999999e-4, 1.000001e-4}) {
    const double bracket = x * x / (length * length);
    EXPECT_NEAR(gain_kernel(bracket, length) / length, std::sinh(x) / x, 1e-15);
    EXPECT_NEAR(gain_kernel(-bracket, length) / length, std::sin(x) / x, 1e-15);
  }
}

TEST(GainKernel, LargeArgumentGrowsExponentially) {
  const double length = 2e-3;
  const double bracket = 25.0 / (length * length);
  EXPECT_NEAR(gain_kernel(bracket, length), length * std::sinh(5.0) / 5.0, 1e-12 * length * std::sinh(5.0));
  EXPECT_NEAR(gain_kernel(-bracket, length), length * std::sin(5.0) / 5.0, 1e-15);
}

TEST(Calibration, GainParameterEqualsGammaLOnAxis) {
  const auto crystal = bbo();
  const auto cal = GainCalibration::calibrate(crystal, 355e-9);
  const double k0 = ordinary_wavenumber(0.5 * angular_frequency(355e-9), crystal.sellmeier);
  for (double g : {0.5, 1.0, 8.0}) {
    const double bracket = gain_bracket(0.0, g * g, k0 * k0, cal);
    EXPECT_NEAR(std::sqrt(bracket) * crystal.length, g, 1e-13 * g);
  }
  EXPECT_THROW(GainCalibration{0.0}.validate(), ConfigError);
}

TEST(Pump, MatchedLowGainBandwidth) {
  const PumpHighGain p{1.0, 25e-6, 3e-14, 355e-9};
  const auto low = matched_low_gain_pump(p);
  EXPECT_NEAR(low.delta_omega(), std::sqrt(2.0) / p.delta_t, 1e-6 * low.delta_omega());
  EXPECT_EQ(low.waist, p.waist);
  EXPECT_THROW((PumpHighGain{0.0, 1e-5, 1e-13, 355e-9}.validate()), ConfigError);
}

TEST(Quadrature, GaussLegendreIntegratesPolynomialsExactly) {
  const auto q = Quadrature::gauss_legendre(8, -1.0, 2.0);
  double acc = 0.0;
  for (std::size_t k = 0; k < q.x.size(); ++k) acc += q.w[k] * std::pow(q.x[k], 15);
  EXPECT_NEAR(acc, (std::pow(2.0, 16) - 1.0) / 16.0, 1e-10);
  EXPECT_THROW(Quadrature::gauss_legendre(0, 0.0, 1.0), ConfigError);
}

TEST(Correlation, HermitianAndUnitTrace) {
  const auto g1 = build_correlation(small_high_gain(2.0));
  EXPECT_EQ(g1.hermitian_defect(), 0.0);
  EXPECT_NEAR(g1.trace(), 1.0, 1e-12);
  EXPECT_GT(g1.scale, 0.0);
  EXPECT_LT(harmonic_hermitian_defect(g1, 4), 1e-12 * std::abs(g1.at(0, 0, 0)));
}

TEST(Correlation, ShortIntegrationBoxIsNumericalError) {
  auto cfg = small_high_gain(1.0);
  cfg.highgain.span = 2.0;
  EXPECT_THROW(build_correlation(cfg), NumericalError);
  EXPECT_LT(envelope_tail(4.0), 1e-6);
}

TEST(Correlation, IntensityIsQuadraticAtLowGain) {
  const double i1 = integrated_intensity(build_correlation(small_high_gain(1e-3)));
  const double i2 = integrated_intensity(build_correlation(small_high_gain(2e-3)));
  EXPECT_NEAR(i2 / i1, 4.0, 1e-5);
}

TEST(Correlation, IntensityGrowsFasterThanQuadraticAtHighGain) {
  const double i2 = integrated_intensity(build_correlation(small_high_gain(2.0)));
  const double i4 = integrated_intensity(build_correlation(small_high_gain(4.0)));
  EXPECT_GT(i4 / i2, 4.0);
}

TEST(CoherentModes, SpectrumKMatchesPurityK) {
  const auto g1 = build_correlation(small_high_gain(2.0));
  const auto res = coherent_modes(g1, 4, 1000, 0.0);
  EXPECT_NEAR(res.K, schmidt_number_g1(g1), 1e-9 * res.K);
  EXPECT_NEAR(res.spectrum_sum(), 1.0, 1e-12);
  EXPECT_LT(gram_deviation(res), 1e-10);
}

TEST(CoherentModes, RankOneCorrelationHasKOne) {
  const auto grid = GridSpec::make(4, 2e5, 3, 2.6e15, 1e13, 7);
  CorrelationTensor g1(grid);
  const std::size_t n = grid.flat_size();
  std::vector<cplx> u(n);
  for (std::size_t s = 0; s < n; ++s) u[s] = std::polar(std::exp(-0.1 * static_cast<double>(s)), 0.2 * s);
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t t = 0; t < n; ++t)
      for (std::size_t j = 0; j < grid.m(); ++j) g1.at(s, t, j) = u[s] * std::conj(u[t]);
  const auto res = coherent_modes(g1, 3, 10);
  ASSERT_EQ(res.modes.size(), 1u);
  EXPECT_NEAR(res.K, 1.0, 1e-12);
  EXPECT_NEAR(schmidt_number_g1(g1), 1.0, 1e-12);
}

TEST(CoherentModes, NegativeWeightIsNumericalError) {
  const auto grid = GridSpec::make(4, 2e5, 3, 2.6e15, 1e13, 7);
  CorrelationTensor g1(grid);
  for (std::size_t j = 0; j < grid.m(); ++j) {
    g1.at(0, 0, j) = 1.0;
    g1.at(1, 1, j) = -0.5;
  }
  EXPECT_THROW(coherent_modes(g1, 3, 10), NumericalError);
}

// With a quasi-monochromatic pump and low gain the correlation reduces to the
// low-gain one built from the matched wavefunction.
TEST(Correlation, LowGainLimitMatchesTheWavefunction) {
  auto cfg = desk::base(32, 1, 121, 1e5, 1e11);
  cfg.regime = Regime::high_gain;
  cfg.waist = 200e-6;
  cfg.delta_t = 1e-9;
  cfg.g = 1e-3;
  const auto high = build_correlation(cfg);
  const auto low_pump = matched_low_gain_pump(cfg.high_gain_pump());
  const auto low = g1_from_psi(build_wavefunction(cfg.make_grid(), low_pump, cfg.crystal));
  EXPECT_GT(tensor_correlation(high, low), 0.99);
  const double k_high = schmidt_number_g1(high);
  const double k_low = schmidt_number_g1(low);
  EXPECT_NEAR(k_high, k_low, 0.05 * k_low);
}

TEST(GainSweep, WidthsAndIntensityPerGain) {
  const auto cfg = small_high_gain(1.0);
  const auto rows = gain_sweep(cfg.make_grid(), cfg.high_gain_pump(), cfg.crystal, {0.5, 4.0}, 4, 100, 1e-8,
                               cfg.highgain);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_GT(rows[1].intensity, rows[0].intensity);
  for (const auto& r : rows) {
    EXPECT_NEAR(r.K, r.K_g1, 1e-6 * r.K_g1);
    EXPECT_GT(r.width_q, 0.0);
    EXPECT_GT(r.width_omega, 0.0);
  }
}
