#pragma once

// Planar polygon geometry: oriented area with its exact derivatives, cyclic
// polygon quantities (central half-angles, side orientations, winding number),
// circumcircle fitting, admissibility and bifurcation tests.
//
// Vertices are stored 0-based; side i runs from p_i to p_{i+1 mod n}.
// Coordinate vectors of length 2n are interleaved: (x_0, y_0, x_1, y_1, ...).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "necklace/errors.hpp"

namespace necklace {

using Point = Eigen::Vector2d;

/// 2D cross product (determinant of the column pair).
inline double cross(const Point& a, const Point& b) { return a.x() * b.y() - a.y() * b.x(); }

class Polygon {
public:
    Polygon() = default;

    explicit Polygon(std::vector<Point> vertices) : vertices_(std::move(vertices)) {
        if (vertices_.size() < 3) {
            throw DegenerateInputError("a polygon needs at least 3 vertices");
        }
    }

    /// Builds a polygon from an interleaved coordinate vector of even length >= 6.
    static Polygon from_coordinates(const Eigen::Ref<const Eigen::VectorXd>& coords) {
        if (coords.size() % 2 != 0) {
            throw DegenerateInputError("coordinate vector must have even length");
        }
        std::vector<Point> pts(static_cast<std::size_t>(coords.size() / 2));
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const auto k = static_cast<Eigen::Index>(2 * i);
            pts[i] = Point(coords(k), coords(k + 1));
        }
        return Polygon(std::move(pts));
    }

    std::size_t size() const { return vertices_.size(); }
    const std::vector<Point>& vertices() const { return vertices_; }

    /// Cyclic vertex access; any integer index is reduced mod n.
    const Point& vertex(std::ptrdiff_t i) const { return vertices_[wrap(i)]; }

    /// Side vector p_{i+1} - p_i.
    Point side(std::ptrdiff_t i) const { return vertex(i + 1) - vertex(i); }

    double side_length(std::ptrdiff_t i) const { return side(i).norm(); }

    std::vector<double> side_lengths() const {
        std::vector<double> l(size());
        for (std::size_t i = 0; i < size(); ++i) {
            l[i] = side_length(static_cast<std::ptrdiff_t>(i));
        }
        return l;
    }

    /// Oriented angle between (1,0) and side i; undefined for a zero-length side.
    std::optional<double> direction_angle(std::ptrdiff_t i) const {
        const Point d = side(i);
        if (d.x() == 0.0 && d.y() == 0.0) {
            return std::nullopt;
        }
        return std::atan2(d.y(), d.x());
    }

    Eigen::VectorXd coordinates() const {
        Eigen::VectorXd v(2 * static_cast<Eigen::Index>(size()));
        for (std::size_t i = 0; i < size(); ++i) {
            v(2 * static_cast<Eigen::Index>(i)) = vertices_[i].x();
            v(2 * static_cast<Eigen::Index>(i) + 1) = vertices_[i].y();
        }
        return v;
    }

    /// Largest pairwise vertex distance.
    double diameter() const {
        double d = 0.0;
        for (std::size_t a = 0; a < size(); ++a) {
            for (std::size_t b = a + 1; b < size(); ++b) {
                d = std::max(d, (vertices_[a] - vertices_[b]).norm());
            }
        }
        return d;
    }

    double perimeter() const {
        double s = 0.0;
        for (double l : side_lengths()) {
            s += l;
        }
        return s;
    }

private:
    std::size_t wrap(std::ptrdiff_t i) const {
        const auto n = static_cast<std::ptrdiff_t>(vertices_.size());
        return static_cast<std::size_t>(((i % n) + n) % n);
    }

    std::vector<Point> vertices_;
};

/// Signed shoelace area, positive for counter-clockwise traversal.
inline double oriented_area(const Polygon& P) {
    double twice = 0.0;
    const auto n = static_cast<std::ptrdiff_t>(P.size());
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        twice += cross(P.vertex(i), P.vertex(i + 1));
    }
    return 0.5 * twice;
}

/// Gradient of oriented area, interleaved (dA/dx_i, dA/dy_i).
///
/// Written through the side vectors l_i (cos b_i, sin b_i), so a zero-length
/// side contributes nothing; this is the "0 * undefined = 0" convention.
inline Eigen::VectorXd area_gradient(const Polygon& P) {
    const auto n = static_cast<std::ptrdiff_t>(P.size());
    Eigen::VectorXd g(2 * n);
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const Point prev = P.side(i - 1);
        const Point next = P.side(i);
        g(2 * i) = 0.5 * (prev.y() + next.y());
        g(2 * i + 1) = -0.5 * (prev.x() + next.x());
    }
    return g;
}

/// Constant Hessian of oriented area on n-gons: area_gradient(P) == H * coords(P).
inline Eigen::MatrixXd area_hessian(std::size_t n) {
    if (n < 3) {
        throw DegenerateInputError("area_hessian needs n >= 3");
    }
    const auto m = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(2 * m, 2 * m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const Eigen::Index next = (i + 1) % m;
        const Eigen::Index prev = (i + m - 1) % m;
        H(2 * i, 2 * next + 1) += 0.5;
        H(2 * i, 2 * prev + 1) -= 0.5;
        H(2 * i + 1, 2 * prev) += 0.5;
        H(2 * i + 1, 2 * next) -= 0.5;
    }
    return H;
}

/// Circumcircle of a cyclic polygon together with per-side central quantities.
struct CyclicData {
    Point center = Point::Zero();
    double radius = 0.0;
    std::vector<double> half_angles;  ///< alpha_i in [0, pi/2]
    std::vector<int> orientations;    ///< epsilon_i in {-1, 0, +1}
    std::optional<int> winding;       ///< set only for admissible polygons
    double max_residual = 0.0;        ///< max | |p_i - o| - R |
};

struct CircleFitTolerances {
    double cyclic = 1e-8;       ///< residual threshold relative to R
    double orientation = 1e-9;  ///< |cross| <= orientation * R * l_i means epsilon_i = 0
    double distinct = 1e-12;    ///< vertices closer than this * diameter coincide
};

inline bool is_admissible(const CyclicData& C) {
    return std::ranges::none_of(C.orientations, [](int e) { return e == 0; });
}

/// Winding number about the centre from the signed central angles.
inline int winding_number(const CyclicData& C) {
    if (!is_admissible(C)) {
        throw AdmissibilityError("winding number needs an admissible cyclic polygon");
    }
    double turn = 0.0;
    for (std::size_t i = 0; i < C.half_angles.size(); ++i) {
        turn += C.orientations[i] * 2.0 * C.half_angles[i];
    }
    const double s = turn / (2.0 * std::numbers::pi);
    const double w = std::round(s);
    if (std::abs(s - w) > 1e-6) {
        throw InconsistencyError("signed central angles do not sum to a multiple of 2*pi");
    }
    return static_cast<int>(w);
}

namespace detail {

inline std::vector<Point> distinct_vertices(const Polygon& P, double tol) {
    const double scale = std::max(P.diameter(), 1e-300);
    std::vector<Point> out;
    for (const Point& p : P.vertices()) {
        const bool seen = std::ranges::any_of(out, [&](const Point& q) { return (p - q).norm() <= tol * scale; });
        if (!seen) {
            out.push_back(p);
        }
    }
    return out;
}

}  // namespace detail

/// Least-squares circle through the distinct vertices of P.
///
/// Algebraic fit of x^2 + y^2 + D x + E y + F = 0 on centred, scaled data,
/// then geometric Gauss-Newton refinement of (centre, radius). Returns
/// nullopt when the points are collinear or the max geometric residual
/// exceeds tol.cyclic * R.
inline std::optional<CyclicData> fit_circumcircle(const Polygon& P, const CircleFitTolerances& tol = {}) {
    const std::vector<Point> pts = detail::distinct_vertices(P, tol.distinct);
    if (pts.size() < 3) {
        throw DegenerateInputError("circle fit needs at least 3 distinct vertices");
    }
    const auto m = static_cast<Eigen::Index>(pts.size());

    Point centroid = Point::Zero();
    for (const Point& p : pts) {
        centroid += p;
    }
    centroid /= static_cast<double>(m);
    double scale = 0.0;
    for (const Point& p : pts) {
        scale = std::max(scale, (p - centroid).norm());
    }

    Eigen::MatrixXd A(m, 3);
    Eigen::VectorXd b(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const Point q = (pts[static_cast<std::size_t>(i)] - centroid) / scale;
        A(i, 0) = q.x();
        A(i, 1) = q.y();
        A(i, 2) = 1.0;
        b(i) = -q.squaredNorm();
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    qr.setThreshold(1e-12);
    if (qr.rank() < 3) {
        return std::nullopt;
    }
    const Eigen::Vector3d def = qr.solve(b);
    Point c(-0.5 * def(0), -0.5 * def(1));
    const double r2 = c.squaredNorm() - def(2);
    if (!(r2 > 0.0)) {
        return std::nullopt;
    }
    double R = std::sqrt(r2);

    // Geometric refinement in scaled coordinates.
    for (int iter = 0; iter < 10; ++iter) {
        Eigen::MatrixXd Jg(m, 3);
        Eigen::VectorXd r(m);
        for (Eigen::Index i = 0; i < m; ++i) {
            const Point q = (pts[static_cast<std::size_t>(i)] - centroid) / scale;
            const Point d = q - c;
            const double dist = d.norm();
            if (dist == 0.0) {
                return std::nullopt;
            }
            r(i) = dist - R;
            Jg(i, 0) = -d.x() / dist;
            Jg(i, 1) = -d.y() / dist;
            Jg(i, 2) = -1.0;
        }
        const Eigen::Vector3d step = Jg.colPivHouseholderQr().solve(-r);
        c += step.head<2>();
        R += step(2);
        if (step.norm() <= 1e-15 * std::max(1.0, R)) {
            break;
        }
    }
    if (!(R > 0.0) || !std::isfinite(R)) {
        return std::nullopt;
    }

    CyclicData out;
    out.center = centroid + scale * c;
    out.radius = scale * R;
    for (const Point& p : P.vertices()) {
        out.max_residual = std::max(out.max_residual, std::abs((p - out.center).norm() - out.radius));
    }
    if (out.max_residual > tol.cyclic * out.radius) {
        return std::nullopt;
    }

    const auto n = static_cast<std::ptrdiff_t>(P.size());
    out.half_angles.resize(P.size());
    out.orientations.resize(P.size());
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const double l = P.side_length(i);
        const double ratio = std::clamp(l / (2.0 * out.radius), 0.0, 1.0);
        out.half_angles[static_cast<std::size_t>(i)] = std::asin(ratio);
        const double cr = cross(P.vertex(i) - out.center, P.vertex(i + 1) - out.center);
        int e = 0;
        if (std::abs(cr) > tol.orientation * out.radius * l) {
            e = cr > 0.0 ? 1 : -1;
        }
        out.orientations[static_cast<std::size_t>(i)] = e;
    }
    if (is_admissible(out)) {
        out.winding = winding_number(out);
    }
    return out;
}

/// Sum of epsilon_i tan(alpha_i); a polygon is bifurcating when this vanishes.
inline double bifurcation_value(const CyclicData& C, double right_angle_tol = 1e-9) {
    double s = 0.0;
    for (std::size_t i = 0; i < C.half_angles.size(); ++i) {
        if (C.orientations[i] == 0 || std::abs(C.half_angles[i] - std::numbers::pi / 2) <= right_angle_tol) {
            throw AdmissibilityError("bifurcation value needs an admissible cyclic polygon");
        }
        s += C.orientations[i] * std::tan(C.half_angles[i]);
    }
    return s;
}

}  // namespace necklace
