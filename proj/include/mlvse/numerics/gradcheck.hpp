#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "mlvse/error.hpp"
#include "mlvse/numerics/param_block.hpp"

namespace mlvse {

struct BlockCheck {
  std::string name;
  double max_relative_error = 0.0;
  std::size_t entries_checked = 0;
};

struct GradCheckReport {
  std::vector<BlockCheck> blocks;
  double tolerance = 0.0;
  bool passed = false;

  double max_relative_error() const {
    double worst = 0.0;
    for (const auto& b : blocks) worst = std::max(worst, b.max_relative_error);
    return worst;
  }
};

struct GradCheckOptions {
  double step = 1e-5;
  double tolerance = 1e-4;
  // Blocks larger than this are checked on a seeded random subsample of this many entries.
  std::size_t max_entries_per_block = 400;
  std::uint64_t seed = 0;
  // Denominator floor of the relative error. Central differences carry about
  // 1e-11 of absolute rounding noise at the default step, so entries far below
  // this floor are compared on an absolute scale instead.
  double floor = 1e-6;
};

inline double relative_error(double analytic, double numeric, double floor = 1e-8) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), floor});
  return std::abs(analytic - numeric) / denom;
}

// Compares the gradients currently stored in `blocks` against central finite
// differences of `loss`. `loss` must be deterministic and must only read the
// block values; gradients are snapshotted before any perturbation.
inline GradCheckReport finite_difference_check(const std::vector<ParamBlock<double>*>& blocks,
                                               const std::function<double()>& loss,
                                               const GradCheckOptions& opts = {}) {
  std::vector<Matrix<double>> analytic;
  analytic.reserve(blocks.size());
  for (const auto* b : blocks) analytic.push_back(b->grad);

  std::mt19937_64 rng(opts.seed);
  auto eval = [&](const std::string& where) {
    const double f = loss();
    if (!std::isfinite(f)) throw DivergenceError("gradient check aborted: loss is non-finite at " + where);
    return f;
  };
  eval("initial parameters");

  GradCheckReport report;
  report.tolerance = opts.tolerance;
  for (std::size_t bi = 0; bi < blocks.size(); ++bi) {
    auto& block = *blocks[bi];
    const std::size_t n = block.value.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    if (n > opts.max_entries_per_block) {
      std::shuffle(idx.begin(), idx.end(), rng);
      idx.resize(opts.max_entries_per_block);
      std::sort(idx.begin(), idx.end());
    }
    BlockCheck check{block.name, 0.0, idx.size()};
    for (std::size_t k : idx) {
      double& v = block.value.values()[k];
      const double saved = v;
      v = saved + opts.step;
      const double plus = eval(block.name + "[" + std::to_string(k) + "]+h");
      v = saved - opts.step;
      const double minus = eval(block.name + "[" + std::to_string(k) + "]-h");
      v = saved;
      const double numeric = (plus - minus) / (2.0 * opts.step);
      check.max_relative_error =
          std::max(check.max_relative_error, relative_error(analytic[bi].values()[k], numeric, opts.floor));
    }
    report.blocks.push_back(check);
  }
  report.passed = std::all_of(report.blocks.begin(), report.blocks.end(),
                              [&](const BlockCheck& b) { return b.max_relative_error < opts.tolerance; });
  return report;
}

}  // namespace mlvse
