#include "scatter_sense/geometry.hpp"

#include "scatter_sense/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <numbers>

namespace scatter_sense {

Vec3 normalized(const Vec3& a)
{
    const double n = norm(a);
    if (!(n > 0.0)) throw DomainError("cannot normalise a zero vector");
    return a * (1.0 / n);
}

Ray::Ray(const Vec3& origin, const Vec3& direction) : origin_(origin), direction_(normalized(direction)) {}

PlaneScatterer PlaneScatterer::from_equation(const Vec3& normal, double offset, std::string material)
{
    const double n = norm(normal);
    if (!(n > 0.0)) throw DomainError("plane normal must be non-zero");
    return {normal * (1.0 / n), offset / n, std::move(material)};
}

PlaneScatterer PlaneScatterer::through_point(const Vec3& normal, const Vec3& point, std::string material)
{
    const Vec3 unit = normalized(normal);
    return {unit, dot(unit, point), std::move(material)};
}

double incident_angle(const Vec3& u, const Vec3& v)
{
    const double nu = norm(u);
    const double nv = norm(v);
    if (!(nu > 0.0) || !(nv > 0.0)) throw DomainError("incident angle needs non-zero vectors");
    const double cosine = std::clamp(dot(u, v) / (nu * nv), -1.0, 1.0);
    return 0.5 * std::acos(cosine) * 180.0 / std::numbers::pi;
}

Vec3 reflect_direction(const Vec3& d, const Vec3& n) { return d - 2.0 * dot(d, n) * n; }

std::optional<Vec3> single_bounce_rp(const Ray& tx_ray, const Ray& rx_ray, double coplanar_tolerance)
{
    const Vec3& p0 = tx_ray.origin();
    const Vec3& u = tx_ray.direction();
    const Vec3& q0 = rx_ray.origin();
    const Vec3 w = -rx_ray.direction();

    const Vec3 baseline = q0 - p0;
    const Vec3 uw = cross(u, w);
    const double uw_norm = norm(uw);
    const double base_norm = norm(baseline);
    if (uw_norm < 1e-12 || base_norm == 0.0) return std::nullopt;  // parallel beams or shared origin

    const double triple = dot(baseline, uw) / (base_norm * uw_norm);
    if (std::abs(triple) >= coplanar_tolerance) return std::nullopt;

    // p0 + s*u = q0 + t*w, solved in the least-squares sense via the common normal.
    const double denom = uw_norm * uw_norm;
    const double s = dot(cross(baseline, w), uw) / denom;
    const double t = dot(cross(baseline, u), uw) / denom;
    if (!(s > 0.0) || !(t > 0.0)) return std::nullopt;
    return 0.5 * (tx_ray.at(s) + (q0 + t * w));
}

std::vector<Vec3> sample_ray(const Ray& ray, double delta_d, double d_max)
{
    if (!(delta_d > 0.0) || !(d_max > 0.0)) throw DomainError("sample_ray needs positive step and range");
    std::vector<Vec3> points;
    const auto count = static_cast<std::size_t>(std::floor(d_max / delta_d + 1e-9)) + 1;
    points.reserve(count);
    for (std::size_t i = 0; i < count; ++i) points.push_back(ray.at(static_cast<double>(i) * delta_d));
    return points;
}

Trajectory build_trajectory(std::vector<Vec3> points)
{
    if (points.size() < 2) throw DomainError("a trajectory needs at least two points");
    Trajectory traj;
    traj.segment_lengths_m.reserve(points.size() - 1);
    for (std::size_t k = 0; k + 1 < points.size(); ++k) {
        const double len = distance(points[k], points[k + 1]);
        if (!(len > 0.0)) throw DomainError(fmt::format("trajectory points {} and {} coincide", k, k + 1));
        traj.segment_lengths_m.push_back(len);
        traj.total_length_m += len;
    }
    for (std::size_t k = 1; k + 1 < points.size(); ++k) {
        traj.incident_angles_deg.push_back(incident_angle(points[k - 1] - points[k], points[k + 1] - points[k]));
    }
    traj.points = std::move(points);
    return traj;
}

}  // namespace scatter_sense
