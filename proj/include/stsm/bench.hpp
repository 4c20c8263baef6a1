#pragma once

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <vector>

#include "stsm/model.hpp"
#include "stsm/oracle.hpp"
#include "stsm/schmidt.hpp"

namespace stsm {

struct BenchRow {
  std::size_t n = 0;
  double reduced_seconds = 0.0;
  double oracle_seconds = 0.0;
  double speedup = 0.0;               ///< oracle time / reduced time
  double max_spectrum_deviation = 0.0; ///< top-50 relative deviation between the two paths
};

/// Times the reduced pipeline (FFT + per-l SVD with modes, best of `repeats`)
/// against the dense oracle on an N x N x N grid. State construction is not timed.
inline BenchRow bench_one(ModelConfig cfg, std::size_t n, int repeats = 3) {
  using clock = std::chrono::steady_clock;
  cfg.grid.nq = cfg.grid.nw = cfg.grid.m = n;
  cfg.truncation.l_max = static_cast<int>((n - 1) / 2);
  cfg.set_workers(1);
  const auto psi = build_state(cfg);

  BenchRow row;
  row.n = n;
  row.reduced_seconds = 1e300;
  SchmidtResult reduced;
  for (int r = 0; r < std::max(1, repeats); ++r) {
    const auto t0 = clock::now();
    reduced = decompose(psi, cfg.truncation);
    row.reduced_seconds =
        std::min(row.reduced_seconds, std::chrono::duration<double>(clock::now() - t0).count());
  }
  const auto t0 = clock::now();
  const auto dense = oracle::brute_force_spectrum(psi);
  row.oracle_seconds = std::chrono::duration<double>(clock::now() - t0).count();
  row.speedup = row.oracle_seconds / row.reduced_seconds;
  row.max_spectrum_deviation = oracle::compare_spectra(dense, reduced.expanded_spectrum(), 50).max_relative_deviation;
  return row;
}

inline std::vector<BenchRow> benchmark(const ModelConfig& cfg, const std::vector<std::size_t>& sizes) {
  std::vector<BenchRow> rows;
  for (auto n : sizes) rows.push_back(bench_one(cfg, n));
  return rows;
}

} // namespace stsm
