#include "mlvse/objective/ranking_loss.hpp"

namespace mlvse {

LossVariant parse_loss_variant(const std::string& s) {
  if (s == "max" || s == "max-of-hinges") return LossVariant::MaxOfHinges;
  if (s == "sum" || s == "sum-of-hinges") return LossVariant::SumOfHinges;
  throw ConfigError("unknown loss variant '" + s + "' (expected max-of-hinges or sum-of-hinges)");
}

std::string to_string(LossVariant v) {
  return v == LossVariant::MaxOfHinges ? "max-of-hinges" : "sum-of-hinges";
}

}  // namespace mlvse
