#pragma once

#include <cstddef>
#include <mutex>

#include <fftw3.h>

#include "stsm/constants.hpp"
#include "stsm/errors.hpp"

namespace stsm {

namespace detail {
// FFTW's planner is not thread safe; execution is.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}
} // namespace detail

/// Unnormalised DFT of `howmany` contiguous rows of length n.
/// sign = -1 gives sum_j x_j e^{-2 pi i k j / n}, sign = +1 the inverse kernel.
/// `in` and `out` may alias. FFTW_ESTIMATE keeps plans, and hence bits, reproducible.
inline void batched_dft(const cplx* in, cplx* out, std::size_t howmany, std::size_t n, int sign) {
  if (howmany == 0 || n == 0) return;
  auto* fin = reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in));
  auto* fout = reinterpret_cast<fftw_complex*>(out);
  const int len = static_cast<int>(n);
  fftw_plan plan;
  {
    std::lock_guard lock(detail::fftw_planner_mutex());
    plan = fftw_plan_many_dft(1, &len, static_cast<int>(howmany), fin, nullptr, 1, len, fout, nullptr, 1,
                              len, sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  if (plan == nullptr) throw NumericalError("fftw: could not create plan");
  fftw_execute_dft(plan, fin, fout);
  std::lock_guard lock(detail::fftw_planner_mutex());
  fftw_destroy_plan(plan);
}

} // namespace stsm
