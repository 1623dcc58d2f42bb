#pragma once

#include <cmath>
#include <stdexcept>

namespace uavtb {

/// 3D position in meters. Ground users sit at z = 0, UAVs and balloons above.
struct Point3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend bool operator==(const Point3& a, const Point3& b) {
        return a.x == b.x && a.y == b.y && a.z == b.z;
    }
};

inline double distance(const Point3& a, const Point3& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    const double dz = a.z - b.z;
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

inline double horizontal_distance(const Point3& a, const Point3& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return std::sqrt(dx * dx + dy * dy);
}

/// Elevation angle in degrees seen from `low` towards `high`.
/// atan2 form is robust when the points are almost vertically aligned.
inline double elevation_angle_deg(const Point3& high, const Point3& low) {
    const double dz = high.z - low.z;
    const double dh = horizontal_distance(high, low);
    if (dz == 0.0 && dh == 0.0) {
        throw std::domain_error("elevation angle undefined for coincident points");
    }
    return std::atan2(dz, dh) * 180.0 / M_PI;
}

} // namespace uavtb
