#pragma once

#include "training/train.hpp"

namespace bspinn::eval {

/// Per-epoch min/median/max of the total loss across an ensemble (median
/// with even counts = mean of the two central values).
struct LossBand {
  std::vector<long long> epochs;
  std::vector<double> min;
  std::vector<double> median;
  std::vector<double> max;

  std::string to_csv() const;
};

LossBand loss_band(std::span<const train::RunRecord> records);

}  // namespace bspinn::eval
