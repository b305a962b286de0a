#pragma once

#include <cmath>

namespace hemidef {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// Defender lives on the hemisphere surface: azimuth psi in (-pi, pi],
// elevation phi in [0, pi/2]. A consumed defender stays where it died.
struct DefenderPose {
    double psi = 0.0;
    double phi = 0.0;
    bool alive = true;
};

enum class IntruderStatus { active, captured, intruded };

// Intruder lives on the ground plane: azimuth psi, radial distance r >= 0.
// Status only ever advances active -> captured or active -> intruded.
struct IntruderPose {
    double psi = 0.0;
    double r = 0.0;
    IntruderStatus status = IntruderStatus::active;
};

// Relative position of an intruder seen from a defender: psi = psi_A - psi_D
// (wrapped), phi = defender elevation, r = intruder radius over R.
struct RelativeCoord {
    double psi = 0.0;
    double phi = 0.0;
    double r = 0.0;
};

struct Point3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

// Wrap an angle into (-pi, pi]. Throws std::domain_error on non-finite input.
double wrap_angle(double a);

// Spherical-to-Cartesian on the hemisphere of radius R.
Point3 defender_cartesian(const DefenderPose& p, double R);

// Ground-plane polar to Cartesian (z = 0).
Point3 intruder_cartesian(const IntruderPose& p);

// Great-circle central angle between (phi1, psi1) and (phi2, psi2), in [0, pi].
double central_angle(double phi1, double psi1, double phi2, double psi2);

// Advance a defender by `arc` meters along the great circle toward the target
// direction (target_psi, target_phi); clamps at the target. The azimuth at the
// pole is undefined, so the previous azimuth is retained there.
DefenderPose step_defender(const DefenderPose& p, double target_psi,
                           double target_phi, double arc, double R);

// Advance an intruder by `dist` meters straight toward a ground-plane target;
// clamps at the target.
IntruderPose step_intruder(const IntruderPose& p, const Point3& target, double dist);

inline double dist3(const Point3& a, const Point3& b) {
    const double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

// 3D chord distance between two defenders on the dome of radius R.
double defender_chord(const DefenderPose& a, const DefenderPose& b, double R);

} // namespace hemidef
