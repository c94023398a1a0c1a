#include "training/scheduler.hpp"

#include <cmath>

namespace bspinn::train {

LrScheduler LrScheduler::plateau(double lr0, double factor, long long patience,
                                 double rel_threshold) {
  if (lr0 <= 0.0 || factor <= 0.0 || factor >= 1.0 || patience < 0) {
    throw InvalidArgument("plateau scheduler: bad settings");
  }
  LrScheduler s(Kind::kPlateau, lr0);
  s.factor_ = factor;
  s.patience_ = patience;
  s.rel_threshold_ = rel_threshold;
  return s;
}

LrScheduler LrScheduler::exponential(double lr0, double factor,
                                     long long every) {
  if (lr0 <= 0.0 || factor <= 0.0 || factor >= 1.0 || every <= 0) {
    throw InvalidArgument("exponential scheduler: bad settings");
  }
  LrScheduler s(Kind::kExponential, lr0);
  s.factor_ = factor;
  s.every_ = every;
  return s;
}

void LrScheduler::observe(long long epoch, double loss) {
  if (kind_ == Kind::kExponential) {
    // Rate for the *next* epoch; pure in the epoch counter.
    lr_ = lr0_ * std::pow(factor_, static_cast<double>((epoch + 1) / every_));
    return;
  }
  if (loss < best_ * (1.0 - rel_threshold_)) {
    best_ = loss;
    bad_epochs_ = 0;
  } else {
    ++bad_epochs_;
    if (bad_epochs_ > patience_) {
      lr_ *= factor_;
      bad_epochs_ = 0;
    }
  }
}

}  // namespace bspinn::train
