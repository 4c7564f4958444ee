#pragma once
/**
 * @file   shapes.hpp
 * @brief  Closed boundaries and paths around the beacon, in polar form.
 *
 * A shape answers two questions for a bearing theta seen from the beacon
 * (the origin): how far away the boundary is, and which way an agent must
 * head to traverse the boundary at that point. Circles are evaluated in
 * closed form; every other shape is a polygon that must be star-shaped with
 * respect to the origin and is evaluated by ray/edge intersection.
 */

#include "angles.hpp"

#include <algorithm>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fencemill
{
    enum class ShapeKind
    {
        circle,
        polygon
    };

    /// Rotation sign D. `cw` (+1) follows increasing bearing, the sense in
    /// which a circle is tangent to theta + 90 degrees.
    enum class Rotation : int
    {
        cw = +1,
        ccw = -1
    };

    [[nodiscard]] constexpr double sign_of (Rotation d) noexcept { return static_cast<double> (static_cast<int> (d)); }

    class ShapeError : public std::invalid_argument
    {
    public:
        using std::invalid_argument::invalid_argument;
    };

    class ShapeSpec
    {
    public:
        [[nodiscard]] static ShapeSpec circle (double radius)
        {
            if (!(radius > 0.0) || !std::isfinite (radius))
                throw ShapeError ("circle radius must be positive and finite");
            ShapeSpec s;
            s.kind_ = ShapeKind::circle;
            s.label_ = "circle";
            s.radius_ = radius;
            s.length_ = 2.0 * radius;
            return s;
        }

        /// Axis-aligned square centred on the beacon.
        [[nodiscard]] static ShapeSpec square (double side)
        {
            if (!(side > 0.0) || !std::isfinite (side))
                throw ShapeError ("square side must be positive and finite");
            const double h = side / 2.0;
            ShapeSpec s = polygon ({{h, -h}, {h, h}, {-h, h}, {-h, -h}});
            s.label_ = "square";
            s.length_ = side;
            return s;
        }

        /// Eight-segment isotoxal star: tips at (+-outer, 0) and (0, +-outer),
        /// concave corners at (+-inner, +-inner).
        [[nodiscard]] static ShapeSpec isotoxal_star (double outer, double inner)
        {
            if (!(outer > 0.0) || !(inner > 0.0) || !(inner < outer))
                throw ShapeError ("star requires 0 < inner < outer");
            ShapeSpec s = polygon ({{outer, 0.0},
                                    {inner, inner},
                                    {0.0, outer},
                                    {-inner, inner},
                                    {-outer, 0.0},
                                    {-inner, -inner},
                                    {0.0, -outer},
                                    {inner, -inner}});
            s.label_ = "star";
            s.length_ = 2.0 * outer;
            s.star_slope_ = (outer - inner) / inner;
            return s;
        }

        /// Generic polygon. Vertices may be given in either winding; they are
        /// stored counter-clockwise. Throws unless every ray from the origin
        /// crosses the boundary exactly once.
        [[nodiscard]] static ShapeSpec polygon (std::vector<Vec2> vertices)
        {
            if (vertices.size () < 3)
                throw ShapeError ("polygon needs at least 3 vertices");
            for (const Vec2 &v : vertices)
                if (!std::isfinite (v.x) || !std::isfinite (v.y))
                    throw ShapeError ("polygon vertex is not finite");

            double signed_sweep = 0.0;
            for (std::size_t i = 0; i < vertices.size (); ++i)
            {
                const Vec2 a = vertices[i];
                const Vec2 b = vertices[(i + 1) % vertices.size ()];
                signed_sweep += std::atan2 (cross (a, b), dot (a, b));
            }
            if (signed_sweep < 0.0)
                std::reverse (vertices.begin (), vertices.end ());

            double sweep = 0.0;
            for (std::size_t i = 0; i < vertices.size (); ++i)
            {
                const Vec2 a = vertices[i];
                const Vec2 b = vertices[(i + 1) % vertices.size ()];
                // Each edge must turn strictly counter-clockwise about the
                // origin, and the edges together exactly once around it.
                if (!(cross (a, b) > 0.0))
                    throw ShapeError ("polygon is not star-shaped with respect to the beacon (edge " + std::to_string (i) + ")");
                sweep += std::atan2 (cross (a, b), dot (a, b));
            }
            if (std::abs (sweep - 2.0 * kPi) > 1e-9)
                throw ShapeError ("polygon winds around the beacon more than once");

            ShapeSpec s;
            s.kind_ = ShapeKind::polygon;
            s.label_ = "polygon";
            s.vertices_ = std::move (vertices);
            double far = 0.0;
            for (const Vec2 &v : s.vertices_)
                far = std::max (far, norm (v));
            s.length_ = 2.0 * far;
            return s;
        }

        [[nodiscard]] ShapeKind kind () const noexcept { return kind_; }
        [[nodiscard]] const std::string &label () const noexcept { return label_; }
        [[nodiscard]] std::span<const Vec2> vertices () const noexcept { return vertices_; }

        /// Circle radius; zero for polygons.
        [[nodiscard]] double radius () const noexcept { return radius_; }

        /// Side length for squares, tip-to-tip length for stars, diameter otherwise.
        [[nodiscard]] double characteristic_length () const noexcept { return length_; }

        /// Slope magnitude of the steep star segments; zero for non-stars.
        [[nodiscard]] double star_slope () const noexcept { return star_slope_; }

        /// Scale used for tolerance bands: the circle radius, or half the
        /// characteristic length for polygons.
        [[nodiscard]] double nominal_radius () const noexcept { return kind_ == ShapeKind::circle ? radius_ : length_ / 2.0; }

        /// Index of the edge hit by the ray at `theta`. Edge i runs from
        /// vertex i to vertex i+1. A ray through a vertex resolves to the
        /// first matching edge in storage order.
        [[nodiscard]] std::size_t edge_at (double theta) const
        {
            const Vec2 d = unit_from_angle (theta);
            std::size_t best = 0;
            double best_slack = -std::numeric_limits<double>::infinity ();
            for (std::size_t i = 0; i < vertices_.size (); ++i)
            {
                const Vec2 a = vertices_[i];
                const Vec2 b = vertices_[(i + 1) % vertices_.size ()];
                // The ray lies in the edge's angular sector iff it is on the
                // left of a and on the right of b.
                const double slack = std::min (cross (a, d), cross (d, b));
                if (slack >= 0.0)
                    return i;
                if (slack > best_slack)
                {
                    best_slack = slack;
                    best = i;
                }
            }
            // Only reachable through rounding right at a vertex.
            return best;
        }

        /// Distance from the beacon to the boundary along bearing `theta`.
        [[nodiscard]] double radius_at (double theta) const
        {
            if (kind_ == ShapeKind::circle)
                return radius_;
            const std::size_t i = edge_at (theta);
            const Vec2 a = vertices_[i];
            const Vec2 e = vertices_[(i + 1) % vertices_.size ()] - a;
            const Vec2 d = unit_from_angle (theta);
            // Solve a + s e = t d for t.
            return cross (a, e) / cross (d, e);
        }

        /// Heading that traverses the boundary at bearing `theta` in sense `d`.
        [[nodiscard]] double desired_heading_at (double theta, Rotation d) const
        {
            double heading = 0.0;
            if (kind_ == ShapeKind::circle)
                heading = theta + kPi / 2.0;
            else
            {
                const std::size_t i = edge_at (theta);
                const Vec2 e = vertices_[(i + 1) % vertices_.size ()] - vertices_[i];
                heading = std::atan2 (e.y, e.x);
            }
            if (d == Rotation::ccw)
                heading += kPi;
            return normalize_angle (heading);
        }

        [[nodiscard]] bool contains (double r, double theta) const { return r <= radius_at (theta); }

        /// Signed radial error of a point: positive outside the boundary.
        [[nodiscard]] double radial_error (Vec2 p) const { return norm (p) - radius_at (std::atan2 (p.y, p.x)); }

    private:
        ShapeSpec () = default;

        ShapeKind kind_ = ShapeKind::circle;
        std::string label_;
        double radius_ = 0.0;
        double length_ = 0.0;
        double star_slope_ = 0.0;
        std::vector<Vec2> vertices_;
    };

} // namespace fencemill
