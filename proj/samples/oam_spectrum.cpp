// Leading Schmidt weight per OAM index for a small low-gain state.
#include <cstdio>

#include "stsm/model.hpp"
#include "stsm/schmidt.hpp"

int main() {
  stsm::ModelConfig cfg;
  cfg.grid = {12, 12, 16, 1e5, 2e14};
  cfg.waist = 20e-6;
  cfg.delta_lambda = 6e-9;
  cfg.truncation.l_max = 7;
  cfg.validate();

  const auto psi = stsm::build_state(cfg);
  const auto res = stsm::decompose(psi, cfg.truncation);
  std::printf("K = %.6f over %zu retained (l, m) pairs\n", res.K, res.modes.size());
  for (int l = 0; l <= res.max_l(); ++l) {
    const auto& md = res.mode(l, 0);
    std::printf("l = %2d  lambda_l0 = %.6e  degeneracy = %d\n", l, md.lambda, md.degeneracy);
  }
}
