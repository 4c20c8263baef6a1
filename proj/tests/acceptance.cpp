// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
#include <chrono>
#include <cstring>
#include <cstdio>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "desk_configs.hpp"
#include "stsm/stsm.hpp"

using namespace stsm;

namespace {

int failures = 0;

void report(int id, const char* name, bool pass, const std::string& detail) {
  std::printf("%s %d %s: %s\n", pass ? "PASS" : "FAIL", id, name, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(a, b); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Criteria 1 and 2 share the oracle state.
void oracle_criteria() {
  const auto cfg = desk::oracle();
  const auto t0 = std::chrono::steady_clock::now();
  const auto psi = build_state(cfg);
  const auto reduced = decompose(psi, cfg.truncation);
  const auto dense = oracle::brute_force_spectrum(psi);
  const auto cmp = oracle::compare_spectra(dense, reduced.expanded_spectrum(), 50);
  const double elapsed = seconds_since(t0);
  report(1, "oracle equivalence", cmp.compared == 50 && cmp.max_relative_deviation < 1e-8 && elapsed < 120.0,
         "top-50 max relative deviation " + fmt("%.3e", cmp.max_relative_deviation) + ", " + fmt("%.1f", elapsed) +
             " s");

  const double k_spec = reduced.K;
  const double k_g1 = schmidt_number_g1(g1_from_psi(psi));
  const double k_brute = oracle::brute_force_K(psi);
  const double worst = std::max({rel(k_spec, k_g1), rel(k_spec, k_brute), rel(k_g1, k_brute)});
  report(2, "triple-route K agreement", worst < 0.01,
         "K spectrum " + fmt("%.8f", k_spec) + ", g1 " + fmt("%.8f", k_g1) + ", brute force " + fmt("%.8f", k_brute) +
             ", worst pairwise " + fmt("%.2e", worst));
}

void invariant_criterion() {
  std::vector<ModelConfig> states{desk::oracle(), desk::mode_shape(), desk::radial_node(), desk::theta_window()};
  for (double w : {15e-6, 25e-6, 35e-6}) states.push_back(with_value(desk::waist_ramp(), SweepAxis::waist, w));
  for (double len : {1e-3, 3e-3}) states.push_back(with_value(desk::length_ramp(), SweepAxis::length, len));
  for (double dl : {0.1e-9, 0.5e-9}) states.push_back(with_value(desk::bandwidth_ramp(), SweepAxis::delta_lambda, dl));
  auto sep = desk::oracle();
  sep.state = StateModel::separable;
  states.push_back(sep);

  std::string failed;
  double worst_gram = 0.0;
  double worst_align = 0.0;
  double worst_parseval = 0.0;
  for (std::size_t k = 0; k < states.size(); ++k) {
    const auto psi = build_state(states[k]);
    const auto res = decompose(psi, states[k].truncation);
    const auto rep = check_invariants(psi, res, states[k].truncation.l_max);
    for (const auto& c : rep.checks)
      if (!c.pass) failed += " state" + std::to_string(k) + ":" + c.name;
    worst_gram = std::max(worst_gram, rep.get("gram_deviation").value);
    worst_align = std::max(worst_align, rep.get("phase_alignment").value);
    worst_parseval = std::max(worst_parseval, rep.get("parseval").value);
  }
  report(3, "invariant suite", failed.empty(),
         std::to_string(states.size()) + " states; worst gram " + fmt("%.2e", worst_gram) + ", phase alignment " +
             fmt("%.2e", worst_align) + ", parseval " + fmt("%.2e", worst_parseval) +
             (failed.empty() ? "" : "; failed" + failed));
}

void trend_criterion() {
  const auto kw = k_values(sweep(SweepAxis::waist, {15e-6, 20e-6, 25e-6, 30e-6, 35e-6}, desk::waist_ramp()));
  const auto kl = k_values(sweep(SweepAxis::length, {1e-3, 1.5e-3, 2e-3, 2.5e-3, 3e-3}, desk::length_ramp()));
  const auto kb =
      k_values(sweep(SweepAxis::delta_lambda, {0.1e-9, 0.2e-9, 0.3e-9, 0.4e-9, 0.5e-9}, desk::bandwidth_ramp()));

  std::vector<double> theta;
  for (double d : {32.914, 32.93, 32.95, 32.97, 33.0, 33.03}) theta.push_back(degrees_to_radians(d));
  const auto wd = window_doubling(theta, desk::theta_window());
  const auto div = wd.divergence();
  const std::size_t peak = wd.peak_base();
  double before = 0.0;
  double after = 0.0;
  for (std::size_t k = 0; k <= peak; ++k) before = std::max(before, div[k]);
  for (std::size_t k = peak + 1; k < div.size(); ++k) after = std::max(after, div[k]);
  const bool later_decline = wd.peak_doubled() > peak;
  const bool grows = peak + 1 < div.size() && after > before;

  const bool pass = increasing_within(kw) && decreasing_within(kl) && decreasing_within(kb) && later_decline && grows;
  std::ostringstream d;
  d << "w_p K " << fmt("%.3f", kw.front()) << " -> " << fmt("%.3f", kw.back()) << " ("
    << (increasing_within(kw) ? "increasing" : "not increasing") << "), L K " << fmt("%.3f", kl.front()) << " -> "
    << fmt("%.3f", kl.back()) << " (" << (decreasing_within(kl) ? "decreasing" : "not decreasing") << "), dlambda K "
    << fmt("%.3f", kb.front()) << " -> " << fmt("%.3f", kb.back()) << " ("
    << (decreasing_within(kb) ? "decreasing" : "not decreasing") << "), theta peak index W " << peak << " vs 2W "
    << wd.peak_doubled() << ", divergence up to peak " << fmt("%.3f", before) << " beyond " << fmt("%.3f", after);
  report(4, "trend reproduction", pass, d.str());
}

double axis_ratio(const SchmidtMode& md, const GridSpec& grid) {
  double peak = 0.0;
  double axis = 0.0;
  for (std::size_t f = 0; f < grid.flat_size(); ++f) {
    peak = std::max(peak, std::abs(md.u[f]));
    if (grid.q_index(f) == 0) axis = std::max(axis, std::abs(md.u[f]));
  }
  return axis / peak;
}

// Modes |l| = 0, 1, 2 and m = 0..3, the set shown for the low-gain mode profiles.
void node_criterion() {
  const auto cfg = desk::radial_node();
  const auto res = decompose(build_state(cfg), cfg.truncation);
  double worst_vortex = 0.0;
  double weakest_l0 = 1.0;
  for (int l = 0; l <= 2; ++l)
    for (int m = 0; m <= 3; ++m) {
      const double r = axis_ratio(res.mode(l, m), res.grid);
      if (l == 0) weakest_l0 = std::min(weakest_l0, r);
      else worst_vortex = std::max(worst_vortex, r);
    }
  report(5, "low-gain mode structure", worst_vortex < 0.05 && weakest_l0 >= 0.05,
         "largest |u(q_min)|/max|u| for l = 1, 2 is " + fmt("%.4f", worst_vortex) + "; smallest for l = 0 is " +
             fmt("%.4f", weakest_l0));
}

void high_gain_criterion() {
  const auto cfg = desk::high_gain(1.0);
  const std::vector<double> gains{0.01, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0};
  const auto rows = gain_sweep(cfg.make_grid(), cfg.high_gain_pump(), cfg.crystal, gains, cfg.truncation.l_max,
                               cfg.truncation.m_max, cfg.truncation.tol, cfg.highgain);
  auto at = [&](double g) -> const GainSweepRow& {
    for (const auto& r : rows)
      if (r.g == g) return r;
    throw ConfigError("missing gain row");
  };
  bool monotone = true;
  for (std::size_t k = 1; k < rows.size(); ++k) monotone = monotone && rows[k].intensity > rows[k - 1].intensity;
  const double r_low = at(0.5).intensity / at(0.25).intensity;
  const double r1 = at(2.0).intensity / at(1.0).intensity;
  const double r2 = at(4.0).intensity / at(2.0).intensity;
  const double r4 = at(8.0).intensity / at(4.0).intensity;
  const bool superlinear = r4 > r_low && r1 < r2 && r2 < r4;
  const bool narrowing = at(8.0).K < at(1.0).K;
  const bool broadening = at(1.0).width_q < at(4.0).width_q && at(4.0).width_q < at(8.0).width_q &&
                          at(1.0).width_omega < at(4.0).width_omega && at(4.0).width_omega < at(8.0).width_omega;

  double limit = 0.0;
  const double length = cfg.crystal.length;
  for (double dk : {1e-3, 0.5, 1e2, 1e3, 3.7e3, 2e4}) {
    const double x = 0.5 * dk * length;
    const double expected = length * std::sin(x) / x;
    const double got = gain_kernel(gain_bracket(dk, 0.0, 1.0, GainCalibration{1.0}), length);
    limit = std::max(limit, std::abs(got - expected) / std::abs(expected));
  }
  std::ostringstream d;
  d << "I ratio I(2g)/I(g) at g = 0.25, 1, 2, 4: " << fmt("%.3f", r_low) << ", " << fmt("%.3f", r1) << ", "
    << fmt("%.3f", r2) << ", " << fmt("%.3f", r4) << "; K(1) " << fmt("%.3f", at(1.0).K) << " K(8) "
    << fmt("%.3f", at(8.0).K) << "; |u_00| q width " << fmt("%.4e", at(1.0).width_q) << " / "
    << fmt("%.4e", at(4.0).width_q) << " / " << fmt("%.4e", at(8.0).width_q) << "; sinc limit error "
    << fmt("%.2e", limit);
  report(6, "high-gain trends", monotone && superlinear && narrowing && broadening && limit < 1e-10, d.str());
}

void nonseparability_criterion() {
  const auto grid = GridSpec::make(10, 1e5, 8, 2.6e15, 1e14, 5);
  std::vector<cplx> product(grid.flat_size());
  std::vector<cplx> pair(grid.flat_size());
  for (std::size_t iq = 0; iq < grid.nq(); ++iq)
    for (std::size_t iw = 0; iw < grid.nw(); ++iw) {
      const double x = grid.q[iq] / 4e4;
      const double y = (grid.omega[iw] - grid.omega_center) / 5e13;
      product[grid.flat(iq, iw)] = std::exp(-x * x) * std::exp(-y * y) * cplx{1.0, 0.5};
      // Two weighted-orthogonal product terms of equal norm: a basis pair on
      // distinct q and omega cells.
      const double a = (iq == 1 && iw == 2) ? 1.0 / std::sqrt(grid.q[1]) : 0.0;
      const double b = (iq == 6 && iw == 5) ? 1.0 / std::sqrt(grid.q[6]) : 0.0;
      pair[grid.flat(iq, iw)] = a + b;
    }
  const double c1 = nonseparability(product, grid);
  const double c2 = nonseparability(pair, grid);

  const auto cfg = desk::mode_shape();
  const auto res = decompose(build_state(cfg), cfg.truncation);
  const double c00 = nonseparability(res.mode(0, 0).u, res.grid);
  double smallest_other = 1e300;
  for (int l = 0; l <= 2; ++l)
    for (int m = 0; m <= 3; ++m)
      if (l != 0 || m != 0) smallest_other = std::min(smallest_other, nonseparability(res.mode(l, m).u, res.grid));
  report(7, "non-separability", std::abs(c1 - 1.0) < 1e-6 && std::abs(c2 - 2.0) < 1e-6 && c00 < smallest_other,
         "separable C " + fmt("%.10f", c1) + ", two-term C " + fmt("%.10f", c2) + ", C_00 " + fmt("%.5f", c00) +
             " vs smallest other (|l| <= 2, m <= 3) " + fmt("%.5f", smallest_other));
}

void bench_criterion() {
  const auto rows = benchmark(desk::oracle(), {8, 12, 16});
  bool pass = true;
  std::ostringstream d;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    pass = pass && rows[k].speedup > 1.0 && (k == 0 || rows[k].speedup > rows[k - 1].speedup);
    d << (k ? ", " : "") << "N=" << rows[k].n << " speedup " << fmt("%.2f", rows[k].speedup);
  }
  report(8, "performance scaling", pass, d.str());
}

void serialization_criterion() {
  const auto cfg = desk::oracle();
  const auto res = decompose(build_state(cfg), cfg.truncation);
  const auto c = mode_container(res, sha256_hex("acceptance"));
  const auto bytes = serialize(c);
  const auto back = deserialize(bytes);
  bool exact = serialize(back) == bytes && back.arrays.size() == c.arrays.size();
  for (std::size_t k = 0; exact && k < c.arrays.size(); ++k)
    exact = back.arrays[k].name == c.arrays[k].name && back.arrays[k].dims == c.arrays[k].dims &&
            std::memcmp(back.arrays[k].data.data(), c.arrays[k].data.data(), c.arrays[k].data.size() * 8) == 0;

  const auto root = std::filesystem::temp_directory_path() / "stsm_acceptance";
  std::filesystem::remove_all(root);
  ConfigMap map;
  map.set("grid.nq", "12");
  map.set("grid.nw", "12");
  map.set("grid.m", "16");
  map.set("grid.q_max", "1e5");
  map.set("grid.omega_half_width", "2e14");
  map.set("pump.waist", "20e-6");
  map.set("pump.delta_lambda", "6e-9");
  std::ostringstream sink;
  for (const char* run : {"a", "b"}) {
    map.set("run.output_dir", (root / run).string());
    run_decompose(parse_config(map), sink);
  }
  bool identical = true;
  for (const char* file : {"modes.stsm", "spectrum.csv", "summary.txt"})
    identical = identical && read_file((root / "a" / file).string()) == read_file((root / "b" / file).string());
  std::filesystem::remove_all(root);
  report(9, "serialization", exact && identical,
         std::string("container round trip ") + (exact ? "bit-exact" : "differs") + " (" +
             std::to_string(bytes.size()) + " bytes); repeated run artifacts " + (identical ? "identical" : "differ"));
}

} // namespace

int main() {
  const std::vector<void (*)()> steps{oracle_criteria,  invariant_criterion, trend_criterion,
                                      node_criterion,   high_gain_criterion, nonseparability_criterion,
                                      bench_criterion,  serialization_criterion};
  for (auto step : steps) {
    try {
      step();
    } catch (const std::exception& e) {
      std::printf("FAIL step raised: %s\n", e.what());
      ++failures;
    }
  }
  return failures == 0 ? 0 : 1;
}
