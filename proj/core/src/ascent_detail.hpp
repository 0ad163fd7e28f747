#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "haarfact/spaces.hpp"

namespace haarfact::detail {

// Per-coordinate line search for a nonnegative, scale-invariant ratio
// objective. Probes adaptive steps both ways on each coordinate, keeps any
// improvement, and stops when a full sweep gains less than rel_tol.
// Returns the best value; x is updated in place.
template <class Objective>
double coordinate_ascent(Eigen::VectorXd& x, double value, Objective&& objective,
                         const AscentOptions& opt) {
  const Eigen::Index dim = x.size();
  for (int sweep = 0; sweep < opt.max_sweeps; ++sweep) {
    const double sweep_start = value;
    for (Eigen::Index i = 0; i < dim; ++i) {
      const double base = x[i];
      double step = 0.5 * std::max(std::abs(base), 0.25);
      for (int shrink = 0; shrink < 3; ++shrink) {
        double best_candidate = value;
        double best_coord = base;
        for (double cand : {base + step, base - step}) {
          x[i] = cand;
          double v = objective(x);
          if (v > best_candidate) {
            best_candidate = v;
            best_coord = cand;
          }
        }
        if (best_candidate > value) {
          value = best_candidate;
          x[i] = best_coord;
          // ride the improving direction while it keeps paying
          double dir = best_coord - base;
          for (int grow = 0; grow < 4; ++grow) {
            dir *= 2.0;
            double cand = base + dir;
            x[i] = cand;
            double v = objective(x);
            if (v > value) {
              value = v;
            } else {
              x[i] = base + dir / 2.0;
              break;
            }
          }
          break;
        }
        x[i] = base;
        step *= 0.25;
      }
    }
    if (value - sweep_start <= opt.rel_tol * std::max(std::abs(value), 1e-12)) break;
  }
  return value;
}

}  // namespace haarfact::detail
