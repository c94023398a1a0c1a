#pragma once

#include <limits>

#include "common.hpp"

namespace bspinn::train {

/// Learning-rate schedules. Plateau halves the rate after `patience`
/// consecutive epochs without a relative improvement of the best loss;
/// exponential is lr0 * factor^floor(epoch/every), a pure function of the
/// epoch. observe() is called once per epoch after the optimizer step.
class LrScheduler {
 public:
  static LrScheduler plateau(double lr0, double factor, long long patience,
                             double rel_threshold);
  static LrScheduler exponential(double lr0, double factor, long long every);

  double lr() const { return lr_; }
  void observe(long long epoch, double loss);

 private:
  enum class Kind { kPlateau, kExponential };

  LrScheduler(Kind kind, double lr0) : kind_(kind), lr0_(lr0), lr_(lr0) {}

  Kind kind_;
  double lr0_;
  double lr_;
  double factor_ = 0.5;
  double rel_threshold_ = 1e-4;
  long long patience_ = 0;
  long long every_ = 1000;
  double best_ = std::numeric_limits<double>::infinity();
  long long bad_epochs_ = 0;
};

}  // namespace bspinn::train
