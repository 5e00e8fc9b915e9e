#pragma once

namespace finsler {

/// Central numeric tolerances. One knob per class of check; the defaults are
/// what the test suites assert against.
struct Tolerances {
    double structural = 1e-8;     // torsion, compatibility, bracket closure
    double fd_oracle = 1e-6;      // jet derivatives vs finite differences
    double symmetry = 1e-10;      // reversibility / parity tables
    double t_residual = 1e-8;     // certification: |t(X)| at a zero
    double lemma2 = 1e-8;         // certification: algebraic criterion
    double sup_distance = 1e-6;   // certification: orbit vs geodesic
    double speed_drift = 1e-7;    // integrator constant-speed budget
    double angular_match = 1e-4;  // zero-set matching on the sphere
};

}  // namespace finsler
