#pragma once

namespace flowsearch::surrogate {

/// All values of one calibrated evaluation. For outcomes computed by the
/// adaptive rule, alpha <= alpha_max; a prediction-failure fallback instead
/// carries alpha = 1 with `fallback` set (s_pred is recorded as s_few there).
struct CalibrationOutcome {
  double s_pred = 0.0;
  double s_few = 0.0;
  double epsilon = 0.0;  // |s_pred - s_few|
  double psi = 0.0;      // |D_few| / |D_val|, from the actual sampled sizes
  double alpha = 0.0;
  double s_hat = 0.0;
  bool fallback = false;
};

/// Adaptive calibration weight:
///   alpha = 0                                if epsilon <= tau
///   alpha = min((epsilon / tau) * psi, alpha_max)  otherwise
/// Monotone non-decreasing in epsilon and in psi.
double calibration_weight(double epsilon, double tau, double psi, double alpha_max);

/// Convex blend (1 - alpha) * s_pred + alpha * s_few; lies between the two.
double calibrated_score(double s_pred, double s_few, double alpha);

/// The rule applied end to end; epsilon and alpha are derived inside.
CalibrationOutcome calibrate(double s_pred, double s_few, double psi, double tau,
                             double alpha_max);

}  // namespace flowsearch::surrogate
