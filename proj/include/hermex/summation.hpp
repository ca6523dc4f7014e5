#pragma once

#include <cmath>

namespace hermex {

/// Neumaier compensated accumulator. Order of add() calls is part of the
/// result contract; callers that need determinism fix the order themselves.
struct NeumaierSum {
  double sum = 0.0;
  double comp = 0.0;

  void add(double v) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      comp += (sum - t) + v;
    } else {
      comp += (v - t) + sum;
    }
    sum = t;
  }

  double value() const { return sum + comp; }
};

}  // namespace hermex
