#include "cmservo/signal.hpp"

#include <cmath>

namespace cmservo {

LowPassFilter::LowPassFilter(Vec lambda, double dt)
    : lambda_(std::move(lambda)), dt_(dt), state_(Vec::Zero(lambda_.size())) {
  if (lambda_.size() < 1) throw std::invalid_argument("LowPassFilter: empty gain vector");
  require_finite(lambda_, "LowPassFilter lambda");
  if ((lambda_.array() <= 0.0).any()) {
    throw std::invalid_argument("LowPassFilter: all gains must be positive");
  }
  if (!(dt_ > 0.0) || !std::isfinite(dt_)) {
    throw std::invalid_argument("LowPassFilter: dt must be positive");
  }
  alpha_ = 1.0 - (-lambda_.array() * dt_).exp();
}

Vec LowPassFilter::apply(const Vec& x) {
  if (x.size() != lambda_.size()) {
    throw std::invalid_argument("LowPassFilter: sample dimension mismatch");
  }
  require_finite(x, "LowPassFilter input");
  if (!initialized_) {
    state_ = x;
    initialized_ = true;
    return state_;
  }
  state_ += (alpha_.array() * (x - state_).array()).matrix();
  return state_;
}

void LowPassFilter::reset_state(const Vec& state) {
  if (state.size() != lambda_.size()) {
    throw std::invalid_argument("LowPassFilter: state dimension mismatch");
  }
  require_finite(state, "LowPassFilter state");
  state_ = state;
  initialized_ = true;
}

}  // namespace cmservo
