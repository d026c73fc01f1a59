#pragma once

namespace simlab {

// Constants governing Assumptions 1-5 and the lemma bounds.
struct TheoryConstants {
  double alpha = 0;  // lower bound on a_k
  double gamma = 0;  // a_k <= gamma * alpha
  double beta = 0;   // |w_ij(0)| <= beta * omega
  double omega = 0;  // omega <= |w_ij(0)|
  double K = 0;      // step-size constant, >= 20
  double P = 0;      // initial-phase multiplier, >= 2
  double kappa = 0;  // growth-rate slack, > 1.1
  double C = 0;      // signal-gap constant, >= 1
  double eta = 0;    // step size

  // Initial-phase ceiling P * beta * omega.
  double phase_threshold() const { return P * beta * omega; }
};

}  // namespace simlab
