#pragma once

#include <cmath>
#include <cstddef>
#include <string>

#include "stsm/biphoton.hpp"
#include "stsm/dispersion.hpp"
#include "stsm/errors.hpp"
#include "stsm/grid.hpp"
#include "stsm/highgain.hpp"
#include "stsm/schmidt.hpp"

namespace stsm {

enum class Regime { low_gain, high_gain };

/// `separable` replaces the SPDC amplitude by a product of two Gaussians with
/// the pump's widths; it is a reference state with K = 1.
enum class StateModel { spdc, separable };

struct GridConfig {
  std::size_t nq = 12;
  std::size_t nw = 12;
  std::size_t m = 25;
  double q_max = 3.5e5;            ///< rad/m
  double omega_half_width = 1e13;  ///< rad/s, window is omega_p0/2 +- this

  GridSpec make(double lambda_p0) const {
    return GridSpec::make(nq, q_max, nw, 0.5 * angular_frequency(lambda_p0), omega_half_width, m);
  }
};

/// Every physical and numerical parameter of one run.
struct ModelConfig {
  Regime regime = Regime::low_gain;
  StateModel state = StateModel::spdc;
  GridConfig grid;
  double lambda_p0 = 355e-9;
  double waist = 25e-6;
  double delta_lambda = 0.5e-9;
  double g = 1.0;
  double delta_t = 3e-14;
  CrystalConfig crystal{degrees_to_radians(32.914), 2e-3, SellmeierSet::bbo_eimerl()};
  SchmidtOptions truncation{};
  HighGainOptions highgain{};

  PumpLowGain low_gain_pump() const { return PumpLowGain{lambda_p0, waist, delta_lambda}; }
  PumpHighGain high_gain_pump() const { return PumpHighGain{g, waist, delta_t, lambda_p0}; }
  GridSpec make_grid() const { return grid.make(lambda_p0); }

  void set_workers(std::size_t workers) {
    truncation.workers = workers;
    highgain.workers = workers;
  }

  void validate() const {
    crystal.validate();
    if (regime == Regime::low_gain) low_gain_pump().validate();
    else high_gain_pump().validate();
    make_grid().require_resolves(truncation.l_max);
    if (truncation.m_max < 1) throw ConfigError("m_max must be at least 1");
    if (!(truncation.tol >= 0.0 && truncation.tol < 1.0)) throw ConfigError("tol must lie in [0, 1)");
  }
};

/// Product of Gaussians f(q_s, omega_s) f(q_i, omega_i) with no angular dependence.
inline BiphotonTensor build_separable(const GridSpec& grid, const PumpLowGain& pump, std::size_t workers = 1) {
  pump.validate();
  const double w = pump.waist;
  const double dw = pump.delta_omega();
  const double centre = 0.5 * pump.omega_p0();
  auto f = [&](double q, double omega) {
    const double x = (omega - centre) / dw;
    return std::exp(-0.25 * q * q * w * w) * std::exp(-x * x);
  };
  return build_state(
      grid, [&](double qs, double ws, double qi, double wi, double) { return cplx{f(qs, ws) * f(qi, wi), 0.0}; },
      workers);
}

inline BiphotonTensor build_state(const ModelConfig& cfg) {
  const auto grid = cfg.make_grid();
  if (cfg.state == StateModel::separable) return build_separable(grid, cfg.low_gain_pump(), cfg.truncation.workers);
  return build_wavefunction(grid, cfg.low_gain_pump(), cfg.crystal, cfg.truncation.workers);
}

inline CorrelationTensor build_correlation(const ModelConfig& cfg) {
  const auto cal = GainCalibration::calibrate(cfg.crystal, cfg.lambda_p0);
  return build_g1(cfg.make_grid(), cfg.high_gain_pump(), cfg.crystal, cal, cfg.highgain);
}

} // namespace stsm
