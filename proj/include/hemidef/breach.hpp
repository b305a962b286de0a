#pragma once

#include <stdexcept>

#include "hemidef/geometry.hpp"

namespace hemidef {

// One-on-one game instance in the relative frame, radius normalized to 1.
// psi is |psi_A - psi_D| folded into [0, pi]; `sign` records the original
// side so the breaching azimuth can be unfolded afterwards.
struct BreachInstance {
    double psi = 0.0;   // folded relative azimuth, [0, pi]
    double phi = 0.0;   // defender elevation, [0, pi/2]
    double r = 0.0;     // intruder radius / R, must exceed 1 for a live game
    double nu = 1.0;    // speed ratio
    int sign = 1;       // +-1, side of the original relative azimuth
};

struct BreachSolution {
    double theta_star = 0.0;      // optimal breaching angle, relative frame
    double beta_star = 0.0;       // optimal approach angle
    double breach_psi_abs = 0.0;  // absolute breaching azimuth (psi_D + sign*theta*)
    double tau_d = 0.0;           // defender target time
    double tau_a = 0.0;           // intruder target time
    double payoff = 0.0;          // tau_d - tau_a; negative means the defender wins
};

struct AlreadyAtPerimeter : std::runtime_error {
    AlreadyAtPerimeter() : std::runtime_error("intruder already at or inside the perimeter") {}
};

struct NoBracket : std::runtime_error {
    NoBracket() : std::runtime_error("no sign change bracketing the breaching angle") {}
};

// Approach angle for a given breaching angle:
//   beta = acos(nu * cos(phi) * sin(theta) / sqrt(1 - cos^2(phi) cos^2(theta)))
// Singular (0/0) only when phi = 0 and theta in {0, pi}; that case throws.
double approach_angle(double theta, double phi, double nu);

// Residual of the breaching-angle fixed point,
//   g(theta) = psi - beta(theta) + acos(cos(beta(theta)) / r) - theta.
// A root of g is the optimal breaching angle.
double breach_residual(double theta, const BreachInstance& inst);

// Solve the one-on-one game in the relative frame (unit radius, defender at
// azimuth 0). psi = 0 short-circuits to theta* = 0, beta* = pi/2. Scans 64
// uniform cells over [0, pi] for sign changes of the residual and bisects;
// with several roots the one with the smallest intruder target time wins.
BreachSolution solve_breach(const BreachInstance& inst, double tol = 1e-10,
                            int max_iter = 200);

// Fold a defender/intruder pair into a relative instance (r normalized by R).
BreachInstance make_instance(const DefenderPose& d, const IntruderPose& a,
                             double R, double nu = 1.0);

// Solve for a world pair: breaching azimuth re-based on the defender's
// azimuth and times rescaled by R.
BreachSolution solve_pair(const DefenderPose& d, const IntruderPose& a,
                          double R, double nu = 1.0, double tol = 1e-10,
                          int max_iter = 200);

// Geodesic time for the defender to reach the breaching azimuth, unit speed.
double defender_target_time(double phi_d, double psi_d, double breach_psi, double R);

// Straight-line time for the intruder to reach the breaching point, unit speed.
double intruder_target_time(double r, double psi_a, double breach_psi, double R);

// Payoff tau_d - tau_a of the pair's game at the optimal breaching point.
double pair_payoff(const DefenderPose& d, const IntruderPose& a, double R,
                   double nu = 1.0);

} // namespace hemidef
