#include "flowsearch/surrogate/calibrate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace flowsearch::surrogate {

double calibration_weight(double epsilon, double tau, double psi, double alpha_max) {
  if (epsilon < 0.0) throw std::invalid_argument("epsilon must be >= 0");
  if (!(tau > 0.0)) throw std::invalid_argument("tau must be > 0");
  if (!(psi > 0.0 && psi <= 1.0)) throw std::invalid_argument("psi must be in (0,1]");
  if (!(alpha_max > 0.0 && alpha_max <= 1.0))
    throw std::invalid_argument("alpha_max must be in (0,1]");
  if (epsilon <= tau) return 0.0;
  return std::min((epsilon / tau) * psi, alpha_max);
}

double calibrated_score(double s_pred, double s_few, double alpha) {
  if (!(s_pred >= 0.0 && s_pred <= 1.0)) throw std::invalid_argument("s_pred out of [0,1]");
  if (!(s_few >= 0.0 && s_few <= 1.0)) throw std::invalid_argument("s_few out of [0,1]");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha out of [0,1]");
  return (1.0 - alpha) * s_pred + alpha * s_few;
}

CalibrationOutcome calibrate(double s_pred, double s_few, double psi, double tau,
                             double alpha_max) {
  CalibrationOutcome out;
  out.s_pred = s_pred;
  out.s_few = s_few;
  out.psi = psi;
  out.epsilon = std::abs(s_pred - s_few);
  out.alpha = calibration_weight(out.epsilon, tau, psi, alpha_max);
  out.s_hat = calibrated_score(s_pred, s_few, out.alpha);
  return out;
}

}  // namespace flowsearch::surrogate
