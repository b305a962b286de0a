#include "hemidef/geometry.hpp"

#include <algorithm>
#include <stdexcept>

namespace hemidef {

double wrap_angle(double a) {
    if (!std::isfinite(a)) throw std::domain_error("wrap_angle: non-finite input");
    double w = std::fmod(a, kTwoPi);
    if (w <= -kPi) w += kTwoPi;
    else if (w > kPi) w -= kTwoPi;
    return w;
}

Point3 defender_cartesian(const DefenderPose& p, double R) {
    const double cphi = std::cos(p.phi);
    return {R * cphi * std::cos(p.psi), R * cphi * std::sin(p.psi), R * std::sin(p.phi)};
}

Point3 intruder_cartesian(const IntruderPose& p) {
    return {p.r * std::cos(p.psi), p.r * std::sin(p.psi), 0.0};
}

static double clamp1(double x) { return std::clamp(x, -1.0, 1.0); }

double central_angle(double phi1, double psi1, double phi2, double psi2) {
    const double c = std::cos(phi1) * std::cos(phi2) * std::cos(psi1 - psi2) +
                     std::sin(phi1) * std::sin(phi2);
    return std::acos(clamp1(c));
}

DefenderPose step_defender(const DefenderPose& p, double target_psi,
                           double target_phi, double arc, double R) {
    if (R <= 0.0) throw std::domain_error("step_defender: R must be positive");
    if (!p.alive || arc <= 0.0) return p;

    const double sep = central_angle(p.phi, p.psi, target_phi, target_psi);
    const double advance = arc / R;
    if (advance >= sep) {
        DefenderPose q = p;
        q.psi = wrap_angle(target_psi);
        q.phi = target_phi;
        return q;
    }

    // slerp between the two unit direction vectors; sep > 0 here
    const Point3 u = defender_cartesian(p, 1.0);
    const Point3 v = defender_cartesian({target_psi, target_phi, true}, 1.0);
    const double s = advance / sep;
    const double a = std::sin((1.0 - s) * sep) / std::sin(sep);
    const double b = std::sin(s * sep) / std::sin(sep);
    const double wx = a * u.x + b * v.x;
    const double wy = a * u.y + b * v.y;
    const double wz = a * u.z + b * v.z;

    DefenderPose q = p;
    q.phi = std::asin(clamp1(wz));
    // at the pole the azimuth column collapses; keep the previous azimuth
    if (std::abs(wx) > 1e-300 || std::abs(wy) > 1e-300)
        q.psi = wrap_angle(std::atan2(wy, wx));
    return q;
}

IntruderPose step_intruder(const IntruderPose& p, const Point3& target, double dist) {
    if (dist <= 0.0) return p;
    const Point3 pos = intruder_cartesian(p);
    const double dx = target.x - pos.x;
    const double dy = target.y - pos.y;
    const double sep = std::sqrt(dx * dx + dy * dy);

    IntruderPose q = p;
    if (dist >= sep) {
        q.r = std::sqrt(target.x * target.x + target.y * target.y);
        if (q.r > 0.0) q.psi = wrap_angle(std::atan2(target.y, target.x));
        return q;
    }
    const double nx = pos.x + dist * dx / sep;
    const double ny = pos.y + dist * dy / sep;
    q.r = std::sqrt(nx * nx + ny * ny);
    if (q.r > 0.0) q.psi = wrap_angle(std::atan2(ny, nx));
    return q;
}

double defender_chord(const DefenderPose& a, const DefenderPose& b, double R) {
    return dist3(defender_cartesian(a, R), defender_cartesian(b, R));
}

} // namespace hemidef
