#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "stsm/analysis.hpp"
#include "stsm/artifact.hpp"
#include "stsm/bench.hpp"
#include "stsm/config.hpp"
#include "stsm/correlation.hpp"
#include "stsm/mode_metrics.hpp"
#include "stsm/model.hpp"
#include "stsm/oracle.hpp"
#include "stsm/schmidt.hpp"

namespace stsm {

/// Largest |Psi|^2 edge share above which a run warns that the window clips the state.
inline constexpr double boundary_warning_threshold = 1e-4;

/// J(omega_s, omega_i): |Psi|^2 summed over both radial axes (q dq weights) and dphi, layout [s][i].
inline std::vector<double> joint_frequency_intensity(const BiphotonTensor& psi) {
  const auto& grid = psi.grid;
  const std::size_t nw = grid.nw();
  std::vector<double> out(nw * nw, 0.0);
  for (std::size_t s = 0; s < grid.flat_size(); ++s)
    for (std::size_t i = 0; i < grid.flat_size(); ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < grid.m(); ++j) row += std::norm(psi.at(s, i, j));
      const double qs = grid.q[grid.q_index(s)];
      const double qi = grid.q[grid.q_index(i)];
      out[grid.omega_index(s) * nw + grid.omega_index(i)] += qs * grid.dq * qi * grid.dq * grid.dphi * row;
    }
  return out;
}

inline void add_grid(Container& c, const GridSpec& grid) {
  c.add("grid_q", {grid.q.size()}, grid.q);
  c.add("grid_omega", {grid.omega.size()}, grid.omega);
  c.add("grid_phi", {grid.phi.size()}, grid.phi);
}

/// Labels, weights, per-mode non-separability and sampled u, v of every retained mode.
inline Container mode_container(const SchmidtResult& res, const std::string& hash) {
  Container c;
  c.add_hash(hash);
  add_grid(c, res.grid);
  const std::uint64_t count = res.modes.size();
  std::vector<double> l, m, deg, lambda, beta, sep;
  std::vector<cplx> u, v;
  for (const auto& md : res.modes) {
    l.push_back(md.l);
    m.push_back(md.m);
    deg.push_back(md.degeneracy);
    lambda.push_back(md.lambda);
    beta.push_back(md.beta);
    sep.push_back(nonseparability(md.u, res.grid));
    u.insert(u.end(), md.u.begin(), md.u.end());
    v.insert(v.end(), md.v.begin(), md.v.end());
  }
  c.add("mode_l", {count}, l);
  c.add("mode_m", {count}, m);
  c.add("degeneracy", {count}, deg);
  c.add("lambda", {count}, lambda);
  c.add("beta", {count}, beta);
  c.add("nonseparability", {count}, sep);
  const std::vector<std::uint64_t> dims{count, res.grid.nq(), res.grid.nw()};
  c.add_complex("u", dims, u);
  c.add_complex("v", dims, v);
  c.add("intensity", {res.grid.nq(), res.grid.nw()}, intensity_from_modes(res));
  c.add_scalar("K", res.K);
  return c;
}

inline CsvTable spectrum_table(const Container& c) {
  CsvTable t(c.hash(), {"l", "m", "degeneracy", "lambda", "beta", "nonseparability"});
  const auto& l = c.get("mode_l").data;
  for (std::size_t k = 0; k < l.size(); ++k)
    t.row({format_number(l[k]), format_number(c.get("mode_m").data[k]), format_number(c.get("degeneracy").data[k]),
           format_number(c.get("lambda").data[k]), format_number(c.get("beta").data[k]),
           format_number(c.get("nonseparability").data[k])});
  return t;
}

/// Checks of a coherent-mode result and the correlation tensor it came from.
inline InvariantReport check_correlation_invariants(const CorrelationTensor& g1, const SchmidtResult& res) {
  InvariantReport rep;
  rep.add("g1_hermitian", g1.hermitian_defect(), 0.0);
  rep.add("spectrum_normalisation", std::abs(res.spectrum_sum() - 1.0), 1e-10);
  rep.add("spectrum_ordering", ordering_defect(res), 0.0);
  rep.add("gram_deviation", gram_deviation(res), 1e-8);
  double s2 = 0.0;
  for (const auto& md : res.modes) s2 += md.degeneracy * md.lambda * md.lambda;
  rep.add("k_definition", std::abs(res.K * s2 - 1.0), 1e-10);
  return rep;
}

namespace detail {

inline std::filesystem::path prepare_output(const RunConfig& rc) {
  std::filesystem::path dir(rc.output_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + rc.output_dir + "': " + ec.message());
  return dir;
}

inline std::string check_line(const InvariantCheck& c) {
  return "check." + c.name + " = " + format_number(c.value) + " (tolerance " + format_number(c.tolerance) + ") " +
         (c.pass ? "PASS" : "FAIL") + "\n";
}

} // namespace detail

/// Builds the state, decomposes it and writes spectrum.csv, modes.stsm and summary.txt.
/// Returns 0 when every invariant holds, 5 otherwise.
inline int run_decompose(const RunConfig& rc, std::ostream& log) {
  const auto dir = detail::prepare_output(rc);
  const auto& cfg = rc.model;
  SchmidtResult res;
  InvariantReport rep;
  std::string extra;
  Container c;
  if (cfg.regime == Regime::low_gain) {
    const auto psi = build_state(cfg);
    res = decompose(psi, cfg.truncation);
    rep = check_invariants(psi, res, cfg.truncation.l_max);
    const double boundary = window_boundary_ratio(psi);
    extra += "K_g1 = " + format_number(schmidt_number_g1(g1_from_psi(psi))) + "\n";
    extra += "boundary_ratio = " + format_number(boundary) + "\n";
    if (boundary > boundary_warning_threshold) {
      extra += "boundary_warning = window clips the state\n";
      log << "warning: |Psi|^2 on the window edge reaches " << format_number(boundary)
          << " of its peak; enlarge grid.q_max or grid.omega_half_width\n";
    }
    c = mode_container(res, rc.hash);
    c.add("joint_frequency_intensity", {cfg.grid.nw, cfg.grid.nw}, joint_frequency_intensity(psi));
    c.add_scalar("high_gain", 0.0);
  } else {
    const auto g1 = build_correlation(cfg);
    res = coherent_modes(g1, cfg.truncation.l_max, cfg.truncation.m_max, cfg.truncation.tol, cfg.truncation.workers);
    rep = check_correlation_invariants(g1, res);
    extra += "K_g1 = " + format_number(schmidt_number_g1(g1)) + "\n";
    extra += "integrated_intensity = " + format_number(integrated_intensity(g1)) + "\n";
    c = mode_container(res, rc.hash);
    c.add_scalar("integrated_intensity", integrated_intensity(g1));
    c.add_scalar("high_gain", 1.0);
    c.add_scalar("g", cfg.g);
  }
  write_container((dir / "modes.stsm").string(), c);
  spectrum_table(c).save((dir / "spectrum.csv").string());

  std::string s = "config_sha256 = " + rc.hash + "\n";
  s += std::string("regime = ") + (cfg.regime == Regime::low_gain ? "low-gain" : "high-gain") + "\n";
  s += "K = " + format_number(res.K) + "\n";
  s += extra;
  s += "modes = " + std::to_string(res.modes.size()) + "\n";
  s += "norm_residual = " + format_number(res.spectrum_sum() - 1.0) + "\n";
  for (const auto& chk : rep.checks) s += detail::check_line(chk);
  s += std::string("invariants = ") + (rep.all_pass() ? "PASS" : "FAIL") + "\n";
  write_file((dir / "summary.txt").string(), s);
  log << s;
  return rep.all_pass() ? 0 : 5;
}

/// Reduced pipeline against the dense oracle. The corrupt hook drops the q
/// factor from the reduced measure as a negative control. Returns 0 or 5.
inline int run_validate(const RunConfig& rc, bool corrupt_weighting, std::ostream& log) {
  const auto& cfg = rc.model;
  if (cfg.regime != Regime::low_gain) throw ConfigError("validate compares low-gain states only");
  const auto grid = cfg.make_grid();
  oracle::guard(grid);
  const auto dir = detail::prepare_output(rc);

  const auto psi = build_state(cfg);
  auto opt = cfg.truncation;
  opt.measure = corrupt_weighting ? Measure::flat : Measure::polar;
  const auto reduced = decompose(psi, opt);
  const auto dense = oracle::brute_force_spectrum(psi);
  const auto cmp = oracle::compare_spectra(dense, reduced.expanded_spectrum(), rc.validate_top);
  const double k_spec = reduced.K;
  const double k_g1 = schmidt_number_g1(g1_from_psi(psi));
  const double k_brute = oracle::brute_force_K(psi);
  auto rel = [](double a, double b) { return std::abs(a - b) / std::max(a, b); };

  InvariantReport rep;
  rep.add("spectrum_top" + std::to_string(rc.validate_top) + "_max_relative_deviation", cmp.max_relative_deviation,
          rc.validate_spectrum_tol);
  rep.add("K_spectrum_vs_g1", rel(k_spec, k_g1), rc.validate_k_tol);
  rep.add("K_spectrum_vs_bruteforce", rel(k_spec, k_brute), rc.validate_k_tol);
  rep.add("K_g1_vs_bruteforce", rel(k_g1, k_brute), rc.validate_k_tol);
  for (const auto& chk : check_invariants(psi, reduced, opt.l_max).checks) rep.checks.push_back(chk);

  std::string s = "config_sha256 = " + rc.hash + "\n";
  s += std::string("weighting = ") + (corrupt_weighting ? "flat (corrupted)" : "polar") + "\n";
  s += "K_spectrum = " + format_number(k_spec) + "\n";
  s += "K_g1 = " + format_number(k_g1) + "\n";
  s += "K_bruteforce = " + format_number(k_brute) + "\n";
  s += "compared = " + std::to_string(cmp.compared) + "\n";
  for (const auto& chk : rep.checks) s += detail::check_line(chk);
  s += std::string("result = ") + (rep.all_pass() ? "PASS" : "FAIL") + "\n";
  write_file((dir / "validate.txt").string(), s);
  log << s;
  return rep.all_pass() ? 0 : 5;
}

inline std::string trend_name(const std::vector<double>& k) {
  if (increasing_within(k)) return "increasing";
  if (decreasing_within(k)) return "decreasing";
  return "mixed";
}

/// K over the configured sweep axis; writes sweep.csv and sweep.stsm.
inline int run_sweep(const RunConfig& rc, std::ostream& log) {
  if (rc.sweep_values.empty()) throw ConfigError("sweep.values is empty");
  const auto dir = detail::prepare_output(rc);
  const auto pts = sweep(rc.sweep_axis, rc.sweep_values, rc.model, rc.sweep_full, rc.workers);
  std::vector<double> value, k, boundary;
  for (const auto& p : pts) {
    value.push_back(rc.sweep_axis == SweepAxis::theta_p ? p.value * 180.0 / pi : p.value);
    k.push_back(p.K);
    boundary.push_back(p.boundary_ratio);
  }
  Container c;
  c.add_hash(rc.hash);
  c.add("sweep_value", {value.size()}, value);
  c.add("K", {k.size()}, k);
  c.add("boundary_ratio", {boundary.size()}, boundary);
  write_container((dir / "sweep.stsm").string(), c);
  const auto table = [&] {
    CsvTable t(rc.hash, {sweep_axis_name(rc.sweep_axis), "K", "boundary_ratio"});
    for (std::size_t i = 0; i < pts.size(); ++i)
      t.row({format_number(value[i]), format_number(k[i]), format_number(boundary[i])});
    return t;
  }();
  table.save((dir / "sweep.csv").string());
  log << table.str() << "trend = " << trend_name(k) << "\n";
  return 0;
}

inline int run_bench(const RunConfig& rc, std::ostream& log) {
  if (rc.bench_sizes.empty()) throw ConfigError("bench.sizes is empty");
  for (auto n : rc.bench_sizes)
    if (n > oracle::max_axis) throw ConfigError("bench size " + std::to_string(n) + " exceeds the oracle limit of 16");
  const auto dir = detail::prepare_output(rc);
  CsvTable t(rc.hash, {"n", "reduced_seconds", "oracle_seconds", "speedup", "max_spectrum_deviation"});
  for (const auto& r : benchmark(rc.model, rc.bench_sizes))
    t.row({std::to_string(r.n), format_number(r.reduced_seconds), format_number(r.oracle_seconds),
           format_number(r.speedup), format_number(r.max_spectrum_deviation)});
  t.save((dir / "bench.csv").string());
  log << t.str();
  return 0;
}

/// Re-emits part of an artifact directory: spectrum and sweep as CSV, one mode
/// or the intensity maps as a container.
inline int run_export(const std::string& artifact_dir, const std::string& what, int l, int m,
                      const std::string& out_path, std::ostream& log) {
  const std::filesystem::path dir(artifact_dir);
  if (what == "sweep") {
    const auto c = read_container((dir / "sweep.stsm").string());
    CsvTable t(c.hash(), {"value", "K", "boundary_ratio"});
    for (std::size_t k = 0; k < c.get("K").data.size(); ++k)
      t.row({format_number(c.get("sweep_value").data[k]), format_number(c.get("K").data[k]),
             format_number(c.get("boundary_ratio").data[k])});
    t.save(out_path);
    log << "wrote " << t.size() << " sweep rows to " << out_path << "\n";
    return 0;
  }
  const auto c = read_container((dir / "modes.stsm").string());
  if (what == "spectrum") {
    const auto t = spectrum_table(c);
    t.save(out_path);
    log << "wrote " << t.size() << " spectrum rows to " << out_path << "\n";
    return 0;
  }
  Container out;
  out.add_hash(c.hash());
  for (const char* axis : {"grid_q", "grid_omega", "grid_phi"}) out.arrays.push_back(c.get(axis));
  if (what == "mode") {
    const auto& ls = c.get("mode_l").data;
    const auto& ms = c.get("mode_m").data;
    const auto& dims = c.get("u").dims;
    const std::size_t size = dims[1] * dims[2];
    std::size_t k = 0;
    while (k < ls.size() && !(ls[k] == l && ms[k] == m)) ++k;
    if (k == ls.size())
      throw ConfigError("artifact has no mode (l = " + std::to_string(l) + ", m = " + std::to_string(m) + ")");
    const auto u = c.get_complex("u");
    const auto v = c.get_complex("v");
    out.add_scalar("l", l);
    out.add_scalar("m", m);
    out.add_scalar("lambda", c.get("lambda").data[k]);
    out.add_scalar("beta", c.get("beta").data[k]);
    out.add_complex("u", {dims[1], dims[2]}, {u.begin() + k * size, u.begin() + (k + 1) * size});
    out.add_complex("v", {dims[1], dims[2]}, {v.begin() + k * size, v.begin() + (k + 1) * size});
  } else if (what == "intensity") {
    out.arrays.push_back(c.get("intensity"));
    if (c.has("joint_frequency_intensity")) out.arrays.push_back(c.get("joint_frequency_intensity"));
  } else {
    throw ConfigError("export target must be spectrum, mode, intensity or sweep, got '" + what + "'");
  }
  write_container(out_path, out);
  log << "wrote " << what << " to " << out_path << "\n";
  return 0;
}

} // namespace stsm
