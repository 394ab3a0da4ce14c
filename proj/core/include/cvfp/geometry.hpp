#pragma once

#include <string_view>
#include <variant>

#include "cvfp/vec.hpp"

namespace cvfp {

/// The closed segment [0, length] in d = 1.
struct Interval {
    double length = 1.0;
};

struct Ball {
    Vec center{0.0, 0.0};
    double radius = 1.0;
};

/// Shell inner_radius < |x - center| < outer_radius.
struct Annulus {
    Vec center{0.0, 0.0};
    double inner_radius = 0.5;
    double outer_radius = 1.0;
};

/// Confinement region with a closed-form signed distance. The constructor
/// validates the shape parameters; the object is immutable afterwards.
class Domain {
  public:
    using Shape = std::variant<Interval, Ball, Annulus>;

    explicit Domain(Shape shape);

    static Domain interval(double length) { return Domain(Interval{length}); }
    static Domain ball(Vec center, double radius) { return Domain(Ball{center, radius}); }
    static Domain annulus(Vec center, double inner, double outer) {
        return Domain(Annulus{center, inner, outer});
    }

    const Shape& shape() const noexcept { return shape_; }
    int dimension() const noexcept { return dim_; }
    std::string_view kind_name() const noexcept;

    /// Half-width of the boundary band in which the projection is unique.
    double band_width() const noexcept;

    /// Axis-aligned bounding box of the closure.
    Vec box_lo() const noexcept;
    Vec box_hi() const noexcept;

  private:
    Shape shape_;
    int dim_ = 1;
};

enum class BoundaryClass { Incoming, Outgoing, Tangential, Interior };

std::string_view to_string(BoundaryClass c) noexcept;

inline constexpr double kDefaultTangentialTolerance = 1e-12;
inline constexpr double kUnitNormalTolerance = 1e-12;

/// Negative inside, zero on the boundary, positive outside.
double signed_distance(const Domain& domain, const Vec& x) noexcept;

/// n_D(pi(x)); equals the gradient of the signed distance at x.
/// Throws AmbiguousProjection when |signed_distance(x)| >= band_width().
Vec outward_normal(const Domain& domain, const Vec& x);

/// Closest boundary point pi(x) = x - signed_distance(x) * n_D(pi(x)).
Vec project_to_boundary(const Domain& domain, const Vec& x);

/// Specular map u - 2 (u.n) n. Throws NotUnitNormal if |n| != 1 beyond 1e-12.
Vec reflect(const Vec& u, const Vec& n);

BoundaryClass classify(const Domain& domain, const Vec& x, const Vec& u, double eps_bd,
                       double eps_tan = kDefaultTangentialTolerance);

}  // namespace cvfp
