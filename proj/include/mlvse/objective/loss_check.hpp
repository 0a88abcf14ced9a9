#pragma once

#include <cstddef>
#include <cstdint>

#include "mlvse/numerics/gradcheck.hpp"
#include "mlvse/objective/ranking_loss.hpp"

namespace mlvse {

struct LossCheckOptions {
  std::size_t batch = 4;
  std::uint64_t seed = 0;
  double tolerance = 1e-6;
  // Added to one analytic gradient entry; non-zero values act as a negative control.
  double corrupt = 0.0;
};

// Draws a random similarity matrix away from every hinge kink (|hinge| and the
// gap between competing hinges both >= 1e-3) and compares the analytic dLoss/dS
// against central finite differences in double precision.
GradCheckReport loss_backward_check(const LossConfig& config, const LossCheckOptions& opts = {});

}  // namespace mlvse
