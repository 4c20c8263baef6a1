#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

#include "stsm/biphoton.hpp"
#include "stsm/correlation.hpp"
#include "stsm/errors.hpp"
#include "stsm/highgain.hpp"
#include "stsm/mode_metrics.hpp"
#include "stsm/model.hpp"
#include "stsm/parallel.hpp"
#include "stsm/schmidt.hpp"

namespace stsm {

enum class SweepAxis { waist, length, delta_lambda, theta_p, g };

inline SweepAxis parse_sweep_axis(const std::string& name) {
  if (name == "w_p" || name == "waist") return SweepAxis::waist;
  if (name == "L" || name == "length") return SweepAxis::length;
  if (name == "delta_lambda_p" || name == "delta_lambda") return SweepAxis::delta_lambda;
  if (name == "theta_p" || name == "theta_p_deg") return SweepAxis::theta_p;
  if (name == "g") return SweepAxis::g;
  throw ConfigError("unknown sweep axis '" + name + "' (expected w_p, L, delta_lambda_p, theta_p or g)");
}

inline std::string sweep_axis_name(SweepAxis axis) {
  switch (axis) {
  case SweepAxis::waist: return "w_p";
  case SweepAxis::length: return "L";
  case SweepAxis::delta_lambda: return "delta_lambda_p";
  case SweepAxis::theta_p: return "theta_p";
  case SweepAxis::g: return "g";
  }
  return "?";
}

/// Copy of `base` with one parameter replaced. theta_p values are in radians;
/// a g sweep switches the run to the high-gain regime.
inline ModelConfig with_value(ModelConfig cfg, SweepAxis axis, double value) {
  switch (axis) {
  case SweepAxis::waist: cfg.waist = value; break;
  case SweepAxis::length: cfg.crystal.length = value; break;
  case SweepAxis::delta_lambda: cfg.delta_lambda = value; break;
  case SweepAxis::theta_p: cfg.crystal.theta_p = value; break;
  case SweepAxis::g:
    cfg.g = value;
    cfg.regime = Regime::high_gain;
    break;
  }
  return cfg;
}

struct SweepPoint {
  double value = 0.0;
  double K = 0.0;
  double boundary_ratio = 0.0; ///< low gain only; 0 otherwise
};

/// K of one configuration: the purity integral of G by default, the full
/// mode decomposition when `full` is set.
inline SweepPoint evaluate_point(const ModelConfig& cfg, double value, bool full) {
  SweepPoint p;
  p.value = value;
  if (cfg.regime == Regime::high_gain) {
    const auto g1 = build_correlation(cfg);
    p.K = full ? coherent_modes(g1, cfg.truncation.l_max, cfg.truncation.m_max, cfg.truncation.tol,
                                cfg.truncation.workers)
                     .K
               : schmidt_number_g1(g1);
    return p;
  }
  const auto psi = build_state(cfg);
  p.boundary_ratio = window_boundary_ratio(psi);
  p.K = full ? decompose(psi, cfg.truncation).K : schmidt_number_g1(g1_from_psi(psi));
  return p;
}

/// One K per value; points run in parallel, each single threaded.
inline std::vector<SweepPoint> sweep(SweepAxis axis, const std::vector<double>& values, const ModelConfig& base,
                                     bool full = false, std::size_t workers = 1) {
  if (values.empty()) throw ConfigError("sweep needs at least one value");
  std::vector<SweepPoint> out(values.size());
  parallel_for(values.size(), workers, [&](std::size_t k) {
    auto cfg = with_value(base, axis, values[k]);
    cfg.set_workers(1);
    cfg.validate();
    out[k] = evaluate_point(cfg, values[k], full);
  });
  return out;
}

/// Monotonicity with a relative slack: each step may move against the trend by
/// at most `slack` of the previous value.
inline bool increasing_within(const std::vector<double>& v, double slack = 0.005) {
  for (std::size_t k = 1; k < v.size(); ++k)
    if (!(v[k] > v[k - 1] * (1.0 - slack))) return false;
  return v.size() >= 2;
}

inline bool decreasing_within(const std::vector<double>& v, double slack = 0.005) {
  for (std::size_t k = 1; k < v.size(); ++k)
    if (!(v[k] < v[k - 1] * (1.0 + slack))) return false;
  return v.size() >= 2;
}

inline std::vector<double> k_values(const std::vector<SweepPoint>& pts) {
  std::vector<double> k;
  for (const auto& p : pts) k.push_back(p.K);
  return k;
}

/// theta_p sweep evaluated with the configured window and with q_max and the
/// frequency half-width both doubled (sample counts unchanged).
struct WindowDoubling {
  std::vector<SweepPoint> base;
  std::vector<SweepPoint> doubled;

  std::size_t peak_base() const { return peak(base); }
  std::size_t peak_doubled() const { return peak(doubled); }

  /// |K_2W - K_W| / K_2W at each angle.
  std::vector<double> divergence() const {
    std::vector<double> d;
    for (std::size_t k = 0; k < base.size(); ++k) d.push_back(std::abs(doubled[k].K - base[k].K) / doubled[k].K);
    return d;
  }

  static std::size_t peak(const std::vector<SweepPoint>& pts) {
    return static_cast<std::size_t>(
        std::max_element(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.K < b.K; }) -
        pts.begin());
  }
};

inline WindowDoubling window_doubling(const std::vector<double>& theta, const ModelConfig& base,
                                      std::size_t workers = 1) {
  WindowDoubling out;
  out.base = sweep(SweepAxis::theta_p, theta, base, false, workers);
  auto wide = base;
  wide.grid.q_max *= 2.0;
  wide.grid.omega_half_width *= 2.0;
  out.doubled = sweep(SweepAxis::theta_p, theta, wide, false, workers);
  return out;
}

} // namespace stsm
