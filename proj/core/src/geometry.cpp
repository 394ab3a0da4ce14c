#include "cvfp/geometry.hpp"

#include <cmath>
#include <string>

#include "cvfp/error.hpp"

namespace cvfp {

namespace {

template <class... Fs>
struct Overloaded : Fs... {
    using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

bool finite(const Vec& v) {
    for (int i = 0; i < v.dim(); ++i)
        if (!std::isfinite(v[i])) return false;
    return true;
}

}  // namespace

Domain::Domain(Shape shape) : shape_(std::move(shape)) {
    std::visit(Overloaded{
                   [&](const Interval& s) {
                       require(s.length > 0.0 && std::isfinite(s.length), ErrorKind::InvalidArgument,
                               "interval length must be positive");
                       dim_ = 1;
                   },
                   [&](const Ball& s) {
                       require(s.center.dim() >= 2, ErrorKind::InvalidArgument,
                               "ball requires dimension >= 2");
                       require(s.radius > 0.0 && finite(s.center), ErrorKind::InvalidArgument,
                               "ball radius must be positive");
                       dim_ = s.center.dim();
                   },
                   [&](const Annulus& s) {
                       require(s.center.dim() >= 2, ErrorKind::InvalidArgument,
                               "annulus requires dimension >= 2");
                       require(s.inner_radius > 0.0 && s.inner_radius < s.outer_radius &&
                                   finite(s.center),
                               ErrorKind::InvalidArgument, "annulus requires 0 < r < R");
                       dim_ = s.center.dim();
                   },
               },
               shape_);
}

std::string_view Domain::kind_name() const noexcept {
    return std::visit(Overloaded{
                          [](const Interval&) { return std::string_view("interval"); },
                          [](const Ball&) { return std::string_view("ball"); },
                          [](const Annulus&) { return std::string_view("annulus"); },
                      },
                      shape_);
}

double Domain::band_width() const noexcept {
    return std::visit(Overloaded{
                          [](const Interval& s) { return 0.5 * s.length; },
                          [](const Ball& s) { return 0.5 * s.radius; },
                          [](const Annulus& s) { return 0.5 * (s.outer_radius - s.inner_radius); },
                      },
                      shape_);
}

Vec Domain::box_lo() const noexcept {
    return std::visit(Overloaded{
                          [](const Interval&) { return Vec{0.0}; },
                          [](const Ball& s) { return s.center - Vec::filled(s.center.dim(), s.radius); },
                          [](const Annulus& s) {
                              return s.center - Vec::filled(s.center.dim(), s.outer_radius);
                          },
                      },
                      shape_);
}

Vec Domain::box_hi() const noexcept {
    return std::visit(Overloaded{
                          [](const Interval& s) { return Vec{s.length}; },
                          [](const Ball& s) { return s.center + Vec::filled(s.center.dim(), s.radius); },
                          [](const Annulus& s) {
                              return s.center + Vec::filled(s.center.dim(), s.outer_radius);
                          },
                      },
                      shape_);
}

std::string_view to_string(BoundaryClass c) noexcept {
    switch (c) {
        case BoundaryClass::Incoming: return "Incoming";
        case BoundaryClass::Outgoing: return "Outgoing";
        case BoundaryClass::Tangential: return "Tangential";
        case BoundaryClass::Interior: return "Interior";
    }
    return "Unknown";
}

double signed_distance(const Domain& domain, const Vec& x) noexcept {
    return std::visit(Overloaded{
                          [&](const Interval& s) { return std::max(-x[0], x[0] - s.length); },
                          [&](const Ball& s) { return norm(x - s.center) - s.radius; },
                          [&](const Annulus& s) {
                              const double r = norm(x - s.center);
                              return std::max(s.inner_radius - r, r - s.outer_radius);
                          },
                      },
                      domain.shape());
}

Vec outward_normal(const Domain& domain, const Vec& x) {
    const double sd = signed_distance(domain, x);
    if (!(std::abs(sd) < domain.band_width()))
        fail(ErrorKind::AmbiguousProjection,
             "point at signed distance " + std::to_string(sd) + " is outside the projection band");
    return std::visit(Overloaded{
                          [&](const Interval& s) { return Vec{x[0] < 0.5 * s.length ? -1.0 : 1.0}; },
                          [&](const Ball& s) {
                              Vec d = x - s.center;
                              return d * (1.0 / norm(d));
                          },
                          [&](const Annulus& s) {
                              Vec d = x - s.center;
                              const double r = norm(d);
                              const double sign =
                                  r < 0.5 * (s.inner_radius + s.outer_radius) ? -1.0 : 1.0;
                              return d * (sign / r);
                          },
                      },
                      domain.shape());
}

Vec project_to_boundary(const Domain& domain, const Vec& x) {
    const Vec n = outward_normal(domain, x);
    // Radial shapes: rebuild from the centre so the result lies on the sphere
    // to round-off rather than accumulating x - sd*n cancellation.
    return std::visit(Overloaded{
                          [&](const Interval& s) { return Vec{n[0] < 0.0 ? 0.0 : s.length}; },
                          [&](const Ball& s) { return s.center + n * s.radius; },
                          [&](const Annulus& s) {
                              // n points toward the centre on the inner wall.
                              const bool inner = dot(n, x - s.center) < 0.0;
                              return inner ? s.center - n * s.inner_radius
                                           : s.center + n * s.outer_radius;
                          },
                      },
                      domain.shape());
}

Vec reflect(const Vec& u, const Vec& n) {
    const double nn = norm(n);
    if (!(std::abs(nn - 1.0) <= kUnitNormalTolerance))
        fail(ErrorKind::NotUnitNormal, "normal has length " + std::to_string(nn));
    return u - n * (2.0 * dot(u, n));
}

BoundaryClass classify(const Domain& domain, const Vec& x, const Vec& u, double eps_bd,
                       double eps_tan) {
    if (signed_distance(domain, x) < -eps_bd) return BoundaryClass::Interior;
    const double un = dot(u, outward_normal(domain, x));
    if (std::abs(un) <= eps_tan * norm(u)) return BoundaryClass::Tangential;
    return un > 0.0 ? BoundaryClass::Outgoing : BoundaryClass::Incoming;
}

}  // namespace cvfp
