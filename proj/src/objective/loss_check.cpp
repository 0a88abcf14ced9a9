#include "mlvse/objective/loss_check.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace mlvse {

namespace {

constexpr double kKinkGap = 1e-3;

bool kink_free(const MatrixD& s, double margin, bool max_variant) {
  const std::size_t n = s.rows();
  for (std::size_t i = 0; i < n; ++i) {
    for (int dir = 0; dir < 2; ++dir) {
      std::vector<double> hinges;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        const double h = margin - s(i, i) + (dir == 0 ? s(j, i) : s(i, j));
        if (std::abs(h) < kKinkGap) return false;
        hinges.push_back(h);
      }
      if (max_variant && hinges.size() > 1) {
        std::sort(hinges.begin(), hinges.end(), std::greater<>());
        if (hinges[0] > 0 && hinges[0] - hinges[1] < kKinkGap) return false;
      }
    }
  }
  return true;
}

}  // namespace

GradCheckReport loss_backward_check(const LossConfig& config, const LossCheckOptions& opts) {
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  const bool max_variant = config.variant == LossVariant::MaxOfHinges;
  MatrixD s(opts.batch, opts.batch);
  do {
    for (auto& v : s.values()) v = uni(rng);
  } while (!kink_free(s, config.margin, max_variant));

  ParamBlock<double> block("similarity", s);
  block.grad = ranking_loss(block.value, config).grad;
  if (opts.corrupt != 0.0) block.grad(0, std::min<std::size_t>(1, opts.batch - 1)) += opts.corrupt;

  GradCheckOptions gc;
  gc.tolerance = opts.tolerance;
  gc.step = 1e-6;
  gc.seed = opts.seed;
  return finite_difference_check({&block}, [&] { return ranking_loss(block.value, config).value; }, gc);
}

}  // namespace mlvse
