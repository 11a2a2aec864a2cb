#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "satolab/error.hpp"
#include "satolab/numeric.hpp"

namespace satolab {

/// Closed arc I = [a, b] of angles, 0 <= a < b <= pi (radians).
struct ArcInterval {
  double a;
  double b;

  ArcInterval(double a_, double b_) : a(a_), b(b_) {
    if (!std::isfinite(a) || !std::isfinite(b) || a < 0.0 || b > kPi || !(a < b)) {
      throw ConfigError("interval must satisfy 0 <= a < b <= pi, got [" + std::to_string(a) +
                        ", " + std::to_string(b) + "]");
    }
  }

  bool contains(double theta) const { return a <= theta && theta <= b; }
};

/// Closed interval J = [alpha, beta] on the circle R/Z, -1/2 <= alpha < beta <= 1/2.
struct CircleInterval {
  double alpha;
  double beta;

  CircleInterval(double alpha_, double beta_) : alpha(alpha_), beta(beta_) {
    if (!std::isfinite(alpha) || !std::isfinite(beta) || alpha < -0.5 || beta > 0.5 ||
        !(alpha < beta)) {
      throw ConfigError("circle interval must satisfy -1/2 <= alpha < beta <= 1/2");
    }
  }

  /// The rescaling theta -> theta / (2 pi) of an arc.
  static CircleInterval from_arc(const ArcInterval& arc) {
    return CircleInterval(arc.a / (2.0 * kPi), arc.b / (2.0 * kPi));
  }

  double length() const { return beta - alpha; }
};

}  // namespace satolab
