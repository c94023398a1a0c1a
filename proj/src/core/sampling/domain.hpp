#pragma once

#include <vector>

#include "common.hpp"

namespace bspinn::sample {

/// Axis-aligned box, optionally with a trailing time coordinate whose
/// interval is half-open (t_lo, t_hi].
struct BoxDomain {
  std::vector<double> lo;
  std::vector<double> hi;
  bool has_time = false;

  int dim() const { return static_cast<int>(lo.size()); }
  int space_dim() const { return dim() - (has_time ? 1 : 0); }
  int time_index() const { return has_time ? dim() - 1 : -1; }

  void validate() const {
    if (lo.size() != hi.size() || lo.empty()) {
      throw InvalidArgument("domain: bounds arrays must match and be nonempty");
    }
    for (std::size_t i = 0; i < lo.size(); ++i) {
      if (!(lo[i] < hi[i])) {
        throw InvalidArgument("domain: lower bound must be below upper bound");
      }
    }
  }

  static BoxDomain cube(int d, double lo_v, double hi_v) {
    BoxDomain b;
    b.lo.assign(d, lo_v);
    b.hi.assign(d, hi_v);
    return b;
  }

  /// Space box plus (t_lo, t_hi] time interval as the last coordinate.
  static BoxDomain space_time(std::vector<double> space_lo,
                              std::vector<double> space_hi, double t_lo,
                              double t_hi) {
    BoxDomain b;
    b.lo = std::move(space_lo);
    b.hi = std::move(space_hi);
    b.lo.push_back(t_lo);
    b.hi.push_back(t_hi);
    b.has_time = true;
    return b;
  }
};

}  // namespace bspinn::sample
