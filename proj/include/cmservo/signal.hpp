#pragma once

#include "cmservo/core.hpp"

namespace cmservo {

/// First-order low-pass filter x_f' = -L (x_f - x) with per-channel gains L,
/// discretized exactly under zero-order hold:
///   x_f <- x_f + (1 - exp(-lambda_i * dt)) * (x - x_f)
/// The first sample passes through unchanged so runs start transient-free.
class LowPassFilter {
 public:
  LowPassFilter(Vec lambda, double dt);

  /// Filters one sample; returns the updated state.
  Vec apply(const Vec& x);

  int dim() const { return static_cast<int>(lambda_.size()); }
  double dt() const { return dt_; }
  bool initialized() const { return initialized_; }
  const Vec& state() const { return state_; }

  /// Forces the internal state (mostly for tests of the transient response).
  void reset_state(const Vec& state);

 private:
  Vec lambda_;
  double dt_;
  Vec alpha_;  // 1 - exp(-lambda*dt), precomputed per channel
  Vec state_;
  bool initialized_ = false;
};

}  // namespace cmservo
