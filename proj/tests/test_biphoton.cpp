#include <gtest/gtest.h>

#include "desk_configs.hpp"
#include "stsm/biphoton.hpp"
#include "stsm/model.hpp"
#include "stsm/run.hpp"
#include "stsm/schmidt.hpp"

using namespace stsm;

namespace {

PumpLowGain pump() { return PumpLowGain{355e-9, 25e-6, 0.5e-9}; }

} // namespace

TEST(Grid, MidpointSamplesAndWeights) {
  const auto g = GridSpec::make(4, 4e5, 3, 2.6e15, 3e13, 7);
  EXPECT_DOUBLE_EQ(g.q[0], 0.5e5);
  EXPECT_DOUBLE_EQ(g.q[3], 3.5e5);
  EXPECT_DOUBLE_EQ(g.omega[1], 2.6e15);
  EXPECT_DOUBLE_EQ(g.omega[0] + g.omega[2], 2.0 * 2.6e15);
  EXPECT_DOUBLE_EQ(g.dphi, two_pi / 7.0);
  EXPECT_DOUBLE_EQ(g.weight(2, 1), g.q[2] * g.dq * g.domega);
  EXPECT_EQ(g.flat(2, 1), 7u);
  EXPECT_EQ(g.q_index(7), 2u);
  EXPECT_EQ(g.omega_index(7), 1u);
}

TEST(Grid, AzimuthalNyquistAndWindowChecks) {
  const auto g = GridSpec::make(4, 4e5, 3, 2.6e15, 3e13, 7);
  EXPECT_NO_THROW(g.require_resolves(3));
  EXPECT_THROW(g.require_resolves(4), ConfigError);
  EXPECT_THROW(GridSpec::make(0, 1e5, 3, 2.6e15, 3e13, 7), ConfigError);
  EXPECT_THROW(GridSpec::make(4, 1e5, 3, 1e13, 3e13, 7), ConfigError);
}

TEST(Pump, GaussianValues) {
  const auto p = pump();
  EXPECT_DOUBLE_EQ(pump_amplitude(0.0, p.omega_p0(), p), 1.0);
  EXPECT_NEAR(pump_amplitude(2.0 / p.waist, p.omega_p0(), p), std::exp(-1.0), 1e-15);
  EXPECT_NEAR(pump_amplitude(0.0, p.omega_p0() + p.delta_omega(), p), std::exp(-1.0), 1e-12);
  EXPECT_DOUBLE_EQ(p.delta_omega(), p.delta_lambda * p.omega_p0() / p.lambda_p0);
  EXPECT_THROW((PumpLowGain{355e-9, 0.0, 1e-9}.validate()), ConfigError);
}

TEST(Pump, TransverseMagnitude) {
  EXPECT_NEAR(pump_q_magnitude(7.0, 7.0, pi), 0.0, 1e-7);
  EXPECT_DOUBLE_EQ(pump_q_magnitude(7.0, 7.0, 0.0), 14.0);
  EXPECT_NEAR(pump_q_magnitude(3.0, 4.0, pi / 2), 5.0, 1e-14);
  for (double phi = 0.0; phi < two_pi; phi += 0.3) {
    const double v = pump_q_magnitude(2.0, 5.0, phi);
    EXPECT_GE(v, 3.0 - 1e-12);
    EXPECT_LE(v, 7.0 + 1e-12);
    EXPECT_EQ(v, pump_q_magnitude(5.0, 2.0, phi));
  }
}

TEST(Wavefunction, ExactSymmetriesAndUnitNorm) {
  const auto cfg = desk::mode_shape();
  const auto psi = build_state(cfg);
  const auto [even, exchange] = symmetry_defects(psi);
  EXPECT_EQ(even, 0.0);
  EXPECT_EQ(exchange, 0.0);
  EXPECT_NEAR(psi.squared_norm(), 1.0, 1e-12);
}

TEST(Wavefunction, ValuesFollowTheClosedForm) {
  const auto cfg = desk::mode_shape();
  const auto psi = build_state(cfg);
  const auto& g = psi.grid;
  const double scale = std::sqrt(psi.raw_norm);
  for (std::size_t s : {0u, 17u, 100u})
    for (std::size_t i : {5u, 64u})
      for (std::size_t j : {0u, 3u, 12u}) {
        const double qs = g.q[g.q_index(s)];
        const double qi = g.q[g.q_index(i)];
        const double ws = g.omega[g.omega_index(s)];
        const double wi = g.omega[g.omega_index(i)];
        const double qp = pump_q_magnitude(qs, qi, g.phi[j]);
        const double x = 0.5 * cfg.crystal.length * delta_kz(qp, qs, qi, ws, wi, cfg.crystal);
        const cplx expected = pump_amplitude(qp, ws + wi, cfg.low_gain_pump()) * (std::sin(x) / x) * std::polar(1.0, x);
        EXPECT_NEAR(std::abs(psi.at(s, i, j) * scale - expected), 0.0, 1e-14);
      }
}

TEST(Wavefunction, VanishingMismatchGivesUnitSinc) {
  auto cfg = desk::mode_shape();
  cfg.crystal.length = 1e-300;
  const auto psi = build_state(cfg);
  const auto& g = psi.grid;
  const double qp = pump_q_magnitude(g.q[0], g.q[0], g.phi[0]);
  const double expected = pump_amplitude(qp, 2.0 * g.omega[0], cfg.low_gain_pump());
  EXPECT_DOUBLE_EQ(std::abs(psi.at(0, 0, 0)) * std::sqrt(psi.raw_norm), expected);
}

TEST(Wavefunction, EvanescentPointNamesTheGridPoint) {
  auto cfg = desk::mode_shape();
  cfg.grid.q_max = 5e7;
  try {
    build_state(cfg);
    FAIL() << "expected DomainError";
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("q_max"), std::string::npos);
  }
}

TEST(Wavefunction, MeasureCovariance) {
  // Same samples, different cell sizes: the normalised values scale with the
  // inverse square root of the measure.
  const auto grid = desk::mode_shape().make_grid();
  auto amplitude = [](double qs, double ws, double qi, double wi, double phi) {
    return cplx{std::exp(-1e-10 * (qs * qs + qi * qi)) * std::cos(0.5 * phi), 1e-16 * (ws - wi)};
  };
  const auto base = build_state(grid, amplitude);
  auto wide_q = grid;
  wide_q.dq *= 2.0; // every weight doubles, the pair measure w_s w_i quadruples
  const auto a = build_state(wide_q, amplitude);
  auto wide_phi = grid;
  wide_phi.dphi *= 2.0; // pair measure doubles
  const auto b = build_state(wide_phi, amplitude);
  for (std::size_t k = 0; k < base.values.size(); k += 331) {
    EXPECT_NEAR(std::norm(a.values[k]), 0.25 * std::norm(base.values[k]), 1e-12 * std::norm(base.values[0]));
    EXPECT_NEAR(std::norm(b.values[k]), 0.5 * std::norm(base.values[k]), 1e-12 * std::norm(base.values[0]));
  }
}

TEST(Wavefunction, NormaliseRecordsRawNorm) {
  const auto cfg = desk::mode_shape();
  auto psi = build_state(cfg);
  const auto before = psi.values;
  for (auto& v : psi.values) v *= 3.0;
  psi.normalize();
  EXPECT_NEAR(psi.raw_norm, 9.0, 1e-12);
  for (std::size_t k = 0; k < before.size(); k += 997) EXPECT_NEAR(std::abs(psi.values[k] - before[k]), 0.0, 1e-14);
}

TEST(Marginal, IntegratesToOne) {
  const auto cfg = desk::mode_shape();
  const auto psi = build_state(cfg);
  const auto intensity = marginal_intensity(psi);
  const auto w = psi.grid.flat_weights();
  double total = 0.0;
  for (std::size_t f = 0; f < w.size(); ++f) {
    EXPECT_GE(intensity[f], 0.0);
    total += two_pi * w[f] * intensity[f];
  }
  EXPECT_NEAR(total, 1.0, 1e-10);
}

TEST(Marginal, SeparableStateFactorises) {
  auto cfg = desk::mode_shape();
  cfg.state = StateModel::separable;
  const auto psi = build_state(cfg);
  const auto intensity = marginal_intensity(psi);
  const auto& g = psi.grid;
  const double w = cfg.waist;
  const double dw = cfg.low_gain_pump().delta_omega();
  const double centre = 0.5 * cfg.low_gain_pump().omega_p0();
  double ratio = 0.0;
  for (std::size_t f = 0; f < g.flat_size(); ++f) {
    const double q = g.q[g.q_index(f)];
    const double x = (g.omega[g.omega_index(f)] - centre) / dw;
    const double f2 = std::exp(-0.5 * q * q * w * w) * std::exp(-2.0 * x * x);
    if (f == 0) ratio = intensity[f] / f2;
    else EXPECT_NEAR(intensity[f] / f2, ratio, 1e-10 * ratio);
  }
}

TEST(Marginal, MatchesModeSum) {
  const auto cfg = desk::mode_shape();
  const auto psi = build_state(cfg);
  const auto res = decompose(psi, cfg.truncation);
  const auto direct = marginal_intensity(psi);
  const auto modes = intensity_from_modes(res);
  double peak = 0.0;
  for (double v : direct) peak = std::max(peak, v);
  for (std::size_t f = 0; f < direct.size(); ++f) EXPECT_NEAR(modes[f], direct[f], 1e-6 * peak);
}

// A waist the 25-point azimuthal grid resolves, with a frequency window wide
// enough to reach the arms.
TEST(Marginal, ResolvedStateShowsTheXRidge) {
  auto cfg = desk::mode_shape();
  cfg.grid.omega_half_width = 3.5e14;
  const auto psi = build_state(cfg);
  const auto intensity = marginal_intensity(psi);
  const auto& g = psi.grid;
  // Radial position of the intensity maximum at each frequency: it moves
  // outwards on both sides of degeneracy, tracing the two arms of the X.
  std::vector<std::size_t> ridge(g.nw());
  for (std::size_t iw = 0; iw < g.nw(); ++iw) {
    std::size_t best = 0;
    for (std::size_t iq = 1; iq < g.nq(); ++iq)
      if (intensity[g.flat(iq, iw)] > intensity[g.flat(best, iw)]) best = iq;
    ridge[iw] = best;
  }
  const std::size_t centre = g.nw() / 2;
  for (std::size_t iw = centre; iw + 1 < g.nw(); ++iw) EXPECT_LE(ridge[iw], ridge[iw + 1]);
  for (std::size_t iw = 0; iw + 1 < centre; ++iw) EXPECT_GE(ridge[iw], ridge[iw + 1]);
  EXPECT_GT(ridge.front(), ridge[centre]);
  EXPECT_GT(ridge.back(), ridge[centre]);

  // Energy conservation concentrates the joint spectrum on the anti-diagonal.
  const auto joint = joint_frequency_intensity(psi);
  const std::size_t n = g.nw();
  for (std::size_t s = 0; s < n; ++s) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < n; ++i)
      if (joint[s * n + i] > joint[s * n + best]) best = i;
    EXPECT_EQ(best, n - 1 - s);
  }
}

TEST(Boundary, RatioReflectsWindow) {
  auto cfg = desk::mode_shape();
  const double base = window_boundary_ratio(build_state(cfg));
  EXPECT_GT(base, 0.0);
  EXPECT_LE(base, 1.0);
  cfg.state = StateModel::separable;
  cfg.grid.q_max = 4e5;
  cfg.grid.omega_half_width = 3e13;
  EXPECT_LT(window_boundary_ratio(build_state(cfg)), 1e-4);
}
