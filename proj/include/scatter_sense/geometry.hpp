#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace scatter_sense {

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    constexpr Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    constexpr Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
    constexpr Vec3& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }

    friend constexpr Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
    friend constexpr Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
    friend constexpr Vec3 operator*(Vec3 a, double s) { return a *= s; }
    friend constexpr Vec3 operator*(double s, Vec3 a) { return a *= s; }
    friend constexpr Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.z}; }
    friend constexpr bool operator==(const Vec3&, const Vec3&) = default;
};

constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr Vec3 cross(const Vec3& a, const Vec3& b)
{
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline double distance(const Vec3& a, const Vec3& b) { return norm(a - b); }

// Throws DomainError for a zero vector.
Vec3 normalized(const Vec3& a);

// Half-line origin + s*direction, s >= 0. The constructor normalises the direction.
class Ray {
public:
    Ray(const Vec3& origin, const Vec3& direction);

    const Vec3& origin() const noexcept { return origin_; }
    const Vec3& direction() const noexcept { return direction_; }
    Vec3 at(double s) const { return origin_ + s * direction_; }

private:
    Vec3 origin_;
    Vec3 direction_;
};

// Infinite plane normal . x = offset tagged with a material name.
struct PlaneScatterer {
    Vec3 normal;
    double offset = 0.0;
    std::string material;

    // Normalises (normal, offset) jointly so the plane is unchanged.
    static PlaneScatterer from_equation(const Vec3& normal, double offset, std::string material);
    static PlaneScatterer through_point(const Vec3& normal, const Vec3& point, std::string material);
    double signed_distance(const Vec3& p) const { return dot(normal, p) - offset; }
};

// TX, RP1..RPn, RX with derived per-RP incident angles and segment lengths.
struct Trajectory {
    std::vector<Vec3> points;
    std::vector<double> incident_angles_deg;
    std::vector<double> segment_lengths_m;
    double total_length_m = 0.0;

    std::size_t bounce_count() const { return points.size() < 2 ? 0 : points.size() - 2; }
    std::span<const Vec3> reflection_points() const
    {
        return bounce_count() == 0 ? std::span<const Vec3>{} : std::span<const Vec3>(points).subspan(1, bounce_count());
    }
};

// Half the angle between u and v, in degrees. Both are taken from the RP.
double incident_angle(const Vec3& u, const Vec3& v);

// Specular reflection d - 2(d.n)n.
Vec3 reflect_direction(const Vec3& d, const Vec3& n);

inline constexpr double kDefaultCoplanarTolerance = 1e-6;

// Intersection of the TX beam with the RX beam traced backwards. rx_ray.direction() is the
// arrival direction at RX. Absent unless the beams are coplanar within tolerance and meet
// at positive parameters on both.
std::optional<Vec3> single_bounce_rp(const Ray& tx_ray, const Ray& rx_ray,
                                     double coplanar_tolerance = kDefaultCoplanarTolerance);

// Points origin + i*delta_d*direction for i*delta_d <= d_max.
std::vector<Vec3> sample_ray(const Ray& ray, double delta_d, double d_max);

// Throws DomainError on fewer than two points or repeated consecutive points.
Trajectory build_trajectory(std::vector<Vec3> points);

}  // namespace scatter_sense
