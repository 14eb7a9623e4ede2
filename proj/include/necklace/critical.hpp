#pragma once

// Critical configurations of oriented area on a necklace configuration space.
//
// A non-singular configuration is critical exactly when all beads lie on one
// circle, the sides of each piece are equal (length L_j / n_j) and equally
// oriented. For per-piece signs E_j and winding w the circumradius R solves
//
//     F(R) = sum_j n_j E_j asin(L_j / (2 n_j R)) - pi w = 0,
//
// and the configuration is then placed on that circle side by side.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <tuple>
#include <vector>

#include "necklace/errors.hpp"
#include "necklace/necklace.hpp"
#include "necklace/polygon.hpp"

namespace necklace {

struct CriticalConfig {
    std::vector<int> signs;           ///< E_j in {-1, +1}
    int winding = 0;                  ///< w
    double radius = 0.0;              ///< R
    std::vector<double> half_angles;  ///< A_j in (0, pi/2]
    std::vector<double> multipliers;  ///< lambda_j = (L_j / n_j) E_j cot A_j
    Polygon polygon;                  ///< centred at the origin, p_0 on the positive x-axis
    bool admissible = false;
    bool bifurcating = false;
    double bifurcation_value = std::numeric_limits<double>::quiet_NaN();  ///< sum_j n_j E_j tan A_j
    double area = 0.0;
};

struct SolverOptions {
    int scan_per_bead = 200;        ///< radius scan uses scan_per_bead * n samples
    double root_tol = 1e-13;        ///< |F| at accepted roots
    double boundary_tol = 1e-12;    ///< |F(R_min)| below this is a boundary root
    double closure_tol = 1e-9;      ///< closure check in build_configuration (radians)
    double right_angle_tol = 1e-9;  ///< A_j this close to pi/2 is a diameter side
    double bifurcation_tol = 1e-9;  ///< |sum n_j E_j tan A_j| at or below this is bifurcating
    double dedup_tol = 1e-9;        ///< relative to L
    std::optional<int> max_winding; ///< default ceil(n / 2)
};

/// Smallest admissible circumradius max_j L_j / (2 n_j).
inline double min_radius(const Necklace& N) {
    double r = 0.0;
    for (std::size_t j = 0; j < N.piece_count(); ++j) {
        r = std::max(r, 0.5 * N.side_length(j));
    }
    return r;
}

namespace detail {

inline void check_signs(const Necklace& N, std::span<const int> signs) {
    if (signs.size() != N.piece_count()) {
        throw InstanceError("need one sign per piece");
    }
    for (int e : signs) {
        if (e != 1 && e != -1) {
            throw InstanceError("piece signs must be +1 or -1");
        }
    }
}

/// F expressed in u = 1/R; chord ratios are clamped to 1 at the boundary.
inline double residual_at_inverse_radius(const Necklace& N, std::span<const int> signs, int w, double u) {
    double s = 0.0;
    for (std::size_t j = 0; j < N.piece_count(); ++j) {
        const double ratio = std::min(1.0, 0.5 * N.side_length(j) * u);
        s += N.piece(j).beads * signs[j] * std::asin(ratio);
    }
    return s - std::numbers::pi * w;
}

/// F at R itself. At R = R_min the ratio (L_j / n_j) / (2 R) is exactly 1 for
/// the widest piece, whereas going through u = 1/R can land an ulp below 1,
/// where asin loses ~1e-8 to its square-root singularity.
inline double residual_at_radius(const Necklace& N, std::span<const int> signs, int w, double R) {
    double s = 0.0;
    for (std::size_t j = 0; j < N.piece_count(); ++j) {
        const double ratio = std::min(1.0, N.side_length(j) / (2.0 * R));
        s += N.piece(j).beads * signs[j] * std::asin(ratio);
    }
    return s - std::numbers::pi * w;
}

/// True when F does not depend on R: the signed bead counts cancel within
/// every group of pieces sharing a side length.
inline bool residual_is_constant(const Necklace& N, std::span<const int> signs) {
    std::vector<bool> used(N.piece_count(), false);
    for (std::size_t a = 0; a < N.piece_count(); ++a) {
        if (used[a]) {
            continue;
        }
        int net = 0;
        for (std::size_t b = a; b < N.piece_count(); ++b) {
            const double la = N.side_length(a);
            const double lb = N.side_length(b);
            if (!used[b] && std::abs(la - lb) <= 1e-12 * std::max(la, lb)) {
                used[b] = true;
                net += N.piece(b).beads * signs[b];
            }
        }
        if (net != 0) {
            return false;
        }
    }
    return true;
}

}  // namespace detail

/// F(R) = sum_j n_j E_j asin(L_j / (2 n_j R)) - pi w.
inline double closure_residual(const Necklace& N, std::span<const int> signs, int w, double R) {
    detail::check_signs(N, signs);
    const double rmin = min_radius(N);
    if (!(R >= rmin)) {
        throw DomainError("radius below the smallest admissible circumradius");
    }
    return detail::residual_at_radius(N, signs, w, R);
}

struct RadiusRoots {
    std::vector<double> interior;  ///< R in (R_min, R_cap], ascending
    std::optional<double> boundary;  ///< R_min when F(R_min) vanishes (a diameter side)
    bool constant_residual = false;  ///< F is independent of R (no isolated roots)
};

/// Roots of closure_residual, by a uniform sign-change scan in u = 1/R over
/// (0, 1/R_min] followed by bisection. F'(u) = (1/u) sum n_j E_j tan A_j, so
/// roots of even multiplicity sit exactly at bifurcating configurations and
/// are not resolved by the scan.
inline RadiusRoots solve_radii(const Necklace& N, std::span<const int> signs, int w, const SolverOptions& opt = {}) {
    detail::check_signs(N, signs);
    RadiusRoots out;
    if (detail::residual_is_constant(N, signs)) {
        out.constant_residual = (w == 0);
        return out;
    }
    const double umax = 1.0 / min_radius(N);
    const int samples = std::max(16, opt.scan_per_bead * static_cast<int>(N.bead_count()));
    auto F = [&](double u) { return detail::residual_at_inverse_radius(N, signs, w, u); };

    std::vector<double> us(static_cast<std::size_t>(samples) + 1);
    std::vector<double> fs(us.size());
    for (int m = 1; m <= samples; ++m) {
        us[static_cast<std::size_t>(m)] = umax * (static_cast<double>(m) / samples);
        fs[static_cast<std::size_t>(m)] = F(us[static_cast<std::size_t>(m)]);
    }
    const auto last = static_cast<std::size_t>(samples);
    fs[last] = detail::residual_at_radius(N, signs, w, min_radius(N));
    if (std::abs(fs[last]) <= opt.boundary_tol) {
        out.boundary = min_radius(N);
        fs[last] = 0.0;
    }

    std::vector<double> roots_u;
    for (std::size_t m = 1; m < last; ++m) {
        if (fs[m] == 0.0) {
            roots_u.push_back(us[m]);
        }
    }
    for (std::size_t m = 1; m < last; ++m) {
        if (!(fs[m] * fs[m + 1] < 0.0)) {
            continue;
        }
        double a = us[m];
        double b = us[m + 1];
        double fa = fs[m];
        double mid = 0.5 * (a + b);
        for (int it = 0; it < 200; ++it) {
            mid = 0.5 * (a + b);
            const double fm = F(mid);
            if (std::abs(fm) <= opt.root_tol || b - a <= 4.0 * std::numeric_limits<double>::epsilon() * b) {
                break;
            }
            if ((fm < 0.0) == (fa < 0.0)) {
                a = mid;
                fa = fm;
            } else {
                b = mid;
            }
        }
        roots_u.push_back(mid);
    }
    std::ranges::sort(roots_u, std::greater<>());
    for (double u : roots_u) {
        out.interior.push_back(1.0 / u);
    }
    return out;
}

/// Places the critical configuration for (signs, w, R) on the circle of radius
/// R about the origin, p_0 at angle 0, each side turning by E_j * 2 A_j.
inline CriticalConfig build_configuration(const Necklace& N, std::span<const int> signs, int w, double R,
                                          const SolverOptions& opt = {}) {
    detail::check_signs(N, signs);
    const double rmin = min_radius(N);
    if (!(R >= rmin * (1.0 - 1e-15))) {
        throw DomainError("radius below the smallest admissible circumradius");
    }
    const std::size_t k = N.piece_count();
    CriticalConfig c;
    c.signs.assign(signs.begin(), signs.end());
    c.winding = w;
    c.radius = R;
    c.half_angles.resize(k);
    c.multipliers.resize(k);

    double turn = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
        const double A = std::asin(std::min(1.0, N.side_length(j) / (2.0 * R)));
        c.half_angles[j] = A;
        c.multipliers[j] = N.side_length(j) * signs[j] * std::cos(A) / std::sin(A);
        turn += N.piece(j).beads * signs[j] * 2.0 * A;
    }
    if (std::abs(turn - 2.0 * std::numbers::pi * w) > opt.closure_tol) {
        throw InconsistencyError("signed central angles do not close up with the requested winding");
    }

    std::vector<Point> pts(N.bead_count());
    double phi = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        pts[i] = Point(R * std::cos(phi), R * std::sin(phi));
        const std::size_t j = N.piece_of_side(i);
        phi += signs[j] * 2.0 * c.half_angles[j];
    }
    c.polygon = Polygon(std::move(pts));
    c.area = oriented_area(c.polygon);

    c.admissible = std::ranges::none_of(
        c.half_angles, [&](double A) { return std::abs(A - std::numbers::pi / 2) <= opt.right_angle_tol; });
    if (c.admissible) {
        double v = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            v += N.piece(j).beads * signs[j] * std::tan(c.half_angles[j]);
        }
        c.bifurcation_value = v;
        c.bifurcating = std::abs(v) <= opt.bifurcation_tol;
    }
    return c;
}

/// Mirror image (y -> -y): negated signs and winding, same radius.
inline CriticalConfig mirror(const CriticalConfig& c) {
    CriticalConfig m = c;
    for (int& e : m.signs) {
        e = -e;
    }
    m.winding = -c.winding;
    for (double& l : m.multipliers) {
        l = -l;
    }
    std::vector<Point> pts = c.polygon.vertices();
    for (Point& p : pts) {
        p.y() = -p.y();
    }
    m.polygon = Polygon(std::move(pts));
    m.area = -c.area;
    m.bifurcation_value = -c.bifurcation_value;
    return m;
}

struct CriticalSet {
    std::vector<CriticalConfig> interior;  ///< critical points with every A_j < pi/2
    std::vector<CriticalConfig> boundary;  ///< roots at R_min: some side is a diameter
    std::vector<std::vector<int>> constant_families;  ///< sign patterns whose residual is identically 0 at w = 0
};

namespace detail {

inline bool same_configuration(const CriticalConfig& a, const CriticalConfig& b, double tol) {
    if (a.polygon.size() != b.polygon.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.polygon.size(); ++i) {
        if ((a.polygon.vertices()[i] - b.polygon.vertices()[i]).norm() > tol) {
            return false;
        }
    }
    return true;
}

inline void push_unique(std::vector<CriticalConfig>& list, CriticalConfig c, double tol) {
    const bool dup = std::ranges::any_of(list, [&](const CriticalConfig& o) { return same_configuration(o, c, tol); });
    if (!dup) {
        list.push_back(std::move(c));
    }
}

inline void sort_configs(std::vector<CriticalConfig>& list) {
    std::ranges::sort(list, [](const CriticalConfig& a, const CriticalConfig& b) {
        return std::tie(a.winding, a.signs, a.radius) < std::tie(b.winding, b.signs, b.radius);
    });
}

}  // namespace detail

/// Every critical configuration, over all sign vectors in {-1,+1}^k and all
/// windings |w| <= ceil(n/2). Results are sorted by (w, signs, R) and
/// deduplicated; configurations are already in canonical position.
inline CriticalSet enumerate_critical(const Necklace& N, const SolverOptions& opt = {}) {
    if (!is_realisable(N)) {
        throw NotRealisableError("necklace is not realisable");
    }
    const std::size_t k = N.piece_count();
    const int n = static_cast<int>(N.bead_count());
    const int wmax = opt.max_winding.value_or((n + 1) / 2);
    const double tol = opt.dedup_tol * N.total_length();

    CriticalSet out;
    std::vector<int> signs(k);
    for (std::size_t mask = 0; mask < (std::size_t{1} << k); ++mask) {
        for (std::size_t j = 0; j < k; ++j) {
            signs[j] = (mask >> j) & 1U ? -1 : 1;
        }
        for (int w = -wmax; w <= wmax; ++w) {
            const RadiusRoots roots = solve_radii(N, signs, w, opt);
            if (roots.constant_residual) {
                out.constant_families.push_back(signs);
            }
            for (double R : roots.interior) {
                CriticalConfig c = build_configuration(N, signs, w, R, opt);
                detail::push_unique(c.admissible ? out.interior : out.boundary, std::move(c), tol);
            }
            if (roots.boundary) {
                detail::push_unique(out.boundary, build_configuration(N, signs, w, *roots.boundary, opt), tol);
            }
        }
    }
    detail::sort_configs(out.interior);
    detail::sort_configs(out.boundary);
    return out;
}

}  // namespace necklace
