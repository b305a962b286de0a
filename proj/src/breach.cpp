#include "hemidef/breach.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <vector>

namespace hemidef {

namespace {

constexpr int kScanCells = 64;

// guards acos arguments that land just outside [-1, 1] from rounding
double clamp_acos_arg(double x) { return std::clamp(x, -1.0, 1.0); }

} // namespace

double approach_angle(double theta, double phi, double nu) {
    if (!std::isfinite(theta) || !std::isfinite(phi) || !std::isfinite(nu))
        throw std::domain_error("approach_angle: non-finite input");
    const double cphi = std::cos(phi);
    const double ctheta = std::cos(theta);
    const double den2 = 1.0 - cphi * cphi * ctheta * ctheta;
    if (den2 <= 0.0)
        throw std::domain_error("approach_angle: singular at phi = 0 with theta in {0, pi}");
    const double x = nu * cphi * std::sin(theta) / std::sqrt(den2);
    return std::acos(clamp_acos_arg(x));
}

double breach_residual(double theta, const BreachInstance& inst) {
    const double beta = approach_angle(theta, inst.phi, inst.nu);
    return inst.psi - beta + std::acos(clamp_acos_arg(std::cos(beta) / inst.r)) - theta;
}

namespace {

double bisect(const BreachInstance& inst, double lo, double hi, double flo,
              double tol, int max_iter) {
    for (int it = 0; it < max_iter && hi - lo > tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fmid = breach_residual(mid, inst);
        if (fmid == 0.0) return mid;
        if ((flo < 0.0) == (fmid < 0.0)) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

BreachSolution finish(const BreachInstance& inst, double theta, double beta) {
    BreachSolution s;
    s.theta_star = theta;
    s.beta_star = beta;
    s.breach_psi_abs = wrap_angle(inst.sign * theta);
    s.tau_d = std::acos(std::clamp(std::cos(inst.phi) * std::cos(theta), -1.0, 1.0));
    s.tau_a = std::sqrt(inst.r * inst.r + 1.0 - 2.0 * inst.r * std::cos(inst.psi - theta));
    s.payoff = s.tau_d - s.tau_a;
    return s;
}

} // namespace

BreachSolution solve_breach(const BreachInstance& inst, double tol, int max_iter) {
    if (inst.r <= 1.0) throw AlreadyAtPerimeter();

    // symmetric fixed point: the intruder heads straight at the defender's azimuth
    if (inst.psi == 0.0) return finish(inst, 0.0, kPi / 2.0);

    // phi = 0 leaves beta independent of theta, so the residual is linear
    if (inst.phi == 0.0) {
        const double beta = std::acos(clamp_acos_arg(inst.nu));
        const double theta = inst.psi - beta +
                             std::acos(clamp_acos_arg(std::cos(beta) / inst.r));
        if (theta < 0.0 || theta > kPi) throw NoBracket();
        return finish(inst, theta, beta);
    }

    double grid[kScanCells + 1];
    double gval[kScanCells + 1];
    for (int i = 0; i <= kScanCells; ++i) {
        grid[i] = kPi * static_cast<double>(i) / kScanCells;
        gval[i] = breach_residual(grid[i], inst);
    }

    std::vector<double> roots;
    for (int i = 0; i < kScanCells; ++i) {
        if (gval[i] == 0.0) {
            roots.push_back(grid[i]);
        } else if ((gval[i] < 0.0) != (gval[i + 1] < 0.0)) {
            roots.push_back(bisect(inst, grid[i], grid[i + 1], gval[i], tol, max_iter));
        }
    }
    if (gval[kScanCells] == 0.0) roots.push_back(grid[kScanCells]);

    if (roots.empty()) throw NoBracket();

    // coalesce near-duplicates from adjacent cells, then pick min intruder time
    std::sort(roots.begin(), roots.end());
    std::vector<double> distinct;
    for (double t : roots)
        if (distinct.empty() || t - distinct.back() > 1e-9) distinct.push_back(t);

    BreachSolution best = finish(inst, distinct[0], approach_angle(distinct[0], inst.phi, inst.nu));
    if (distinct.size() > 1) {
        std::fprintf(stderr,
                     "solve_breach: %zu breaching-angle roots for psi=%.6g phi=%.6g r=%.6g; "
                     "keeping the one with minimum intruder target time\n",
                     distinct.size(), inst.psi, inst.phi, inst.r);
        for (std::size_t i = 1; i < distinct.size(); ++i) {
            BreachSolution cand =
                finish(inst, distinct[i], approach_angle(distinct[i], inst.phi, inst.nu));
            if (cand.tau_a < best.tau_a) best = cand;
        }
    }
    return best;
}

BreachInstance make_instance(const DefenderPose& d, const IntruderPose& a,
                             double R, double nu) {
    const double rel = wrap_angle(a.psi - d.psi);
    BreachInstance inst;
    inst.psi = std::abs(rel);
    inst.phi = d.phi;
    inst.r = a.r / R;
    inst.nu = nu;
    inst.sign = rel < 0.0 ? -1 : 1;
    return inst;
}

BreachSolution solve_pair(const DefenderPose& d, const IntruderPose& a, double R,
                          double nu, double tol, int max_iter) {
    BreachSolution s = solve_breach(make_instance(d, a, R, nu), tol, max_iter);
    s.breach_psi_abs = wrap_angle(d.psi + s.breach_psi_abs);
    s.tau_d *= R;
    s.tau_a *= R;
    s.payoff = s.tau_d - s.tau_a;
    return s;
}

double defender_target_time(double phi_d, double psi_d, double breach_psi, double R) {
    return R * central_angle(phi_d, psi_d, 0.0, breach_psi);
}

double intruder_target_time(double r, double psi_a, double breach_psi, double R) {
    return std::sqrt(r * r + R * R - 2.0 * r * R * std::cos(psi_a - breach_psi));
}

double pair_payoff(const DefenderPose& d, const IntruderPose& a, double R, double nu) {
    return solve_pair(d, a, R, nu).payoff;
}

} // namespace hemidef
