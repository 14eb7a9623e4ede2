#pragma once

// Independent search for critical points of oriented area on a necklace
// configuration space, used to cross-check enumerate_critical. It knows
// nothing about circles: starts are random polygons pulled onto the length
// constraints, pushed along the projected area gradient for a few steps,
// then polished by a damped Newton iteration on the Lagrange system
//
//     grad A(x) - J(x)^T mu = 0,   L_j(x) = L_j.
//
// The Newton step is the minimum-norm solution, which absorbs the three
// isometry directions in the kernel.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "necklace/critical.hpp"
#include "necklace/errors.hpp"
#include "necklace/lagrange.hpp"
#include "necklace/necklace.hpp"
#include "necklace/polygon.hpp"

namespace necklace {

struct SearchOptions {
    int starts = 200;
    std::uint64_t seed = 1;
    int gradient_steps_max = 40;     ///< each start takes 0..max projected-gradient steps
    double gradient_step = 0.02;     ///< relative to L
    int newton_iterations = 60;
    double stationary_tol = 1e-7;    ///< projected-gradient residual, relative to L
    double feasibility_tol = 1e-9;   ///< relative to L
    double cluster_tol = 1e-6;       ///< relative to L
    double rank_tol = 1e-6;          ///< constraint Jacobian rank cut for rejecting singular points
};

struct SearchResult {
    std::vector<Polygon> stationary;  ///< distinct non-singular stationary points
    int starts = 0;
    int converged = 0;          ///< starts that ended at a stationary point
    int rejected_singular = 0;  ///< converged to a singular (or non-differentiable) point
};

namespace detail {

inline Eigen::VectorXd constraint_values(const Polygon& P, const Necklace& N) {
    const std::vector<double> got = piece_lengths(P, N);
    Eigen::VectorXd r(static_cast<Eigen::Index>(got.size()));
    for (std::size_t j = 0; j < got.size(); ++j) {
        r(static_cast<Eigen::Index>(j)) = got[j] - N.piece(j).length;
    }
    return r;
}

inline Polygon polygon_from(const Eigen::VectorXd& x) { return Polygon::from_coordinates(x); }

/// Gauss-Newton pull onto the constraint set; false if it fails to converge.
inline bool project_onto_constraints(Eigen::VectorXd& x, const Necklace& N, double tol, int max_iter = 50) {
    for (int it = 0; it < max_iter; ++it) {
        const Polygon P = polygon_from(x);
        const Eigen::VectorXd r = constraint_values(P, N);
        if (r.cwiseAbs().maxCoeff() <= tol * N.total_length()) {
            return true;
        }
        const Eigen::MatrixXd J = length_gradients(P, N);
        x -= J.completeOrthogonalDecomposition().solve(r);
    }
    return constraint_values(polygon_from(x), N).cwiseAbs().maxCoeff() <= tol * N.total_length();
}

inline Eigen::VectorXd kkt_residual(const Eigen::VectorXd& z, const Necklace& N) {
    const Eigen::Index m = 2 * static_cast<Eigen::Index>(N.bead_count());
    const Polygon P = polygon_from(z.head(m));
    const Eigen::MatrixXd J = length_gradients(P, N);
    Eigen::VectorXd G(z.size());
    G.head(m) = area_gradient(P) - J.transpose() * z.tail(J.rows());
    G.tail(J.rows()) = constraint_values(P, N);
    return G;
}

/// Damped minimum-norm Newton on the Lagrange system; x is updated in place.
inline void kkt_newton(Eigen::VectorXd& x, const Necklace& N, int iterations) {
    const Eigen::Index m = x.size();
    const auto k = static_cast<Eigen::Index>(N.piece_count());
    Eigen::VectorXd z(m + k);
    z.head(m) = x;
    z.tail(k) = 0.5 * least_squares_multipliers(polygon_from(x), N);
    Eigen::VectorXd G = kkt_residual(z, N);
    for (int it = 0; it < iterations; ++it) {
        const double g0 = G.norm();
        if (g0 <= 1e-14 * N.total_length()) {
            break;
        }
        const Polygon P = polygon_from(z.head(m));
        const Eigen::MatrixXd J = length_gradients(P, N);
        const std::vector<Eigen::MatrixXd> HL = length_hessians(P, N);
        Eigen::MatrixXd H = area_hessian(P.size());
        for (Eigen::Index j = 0; j < k; ++j) {
            H -= z(m + j) * HL[static_cast<std::size_t>(j)];
        }
        Eigen::MatrixXd DG = Eigen::MatrixXd::Zero(m + k, m + k);
        DG.topLeftCorner(m, m) = H;
        DG.topRightCorner(m, k) = -J.transpose();
        DG.bottomLeftCorner(k, m) = J;
        const Eigen::VectorXd step = DG.completeOrthogonalDecomposition().solve(-G);

        double t = 1.0;
        bool moved = false;
        for (int half = 0; half < 30; ++half, t *= 0.5) {
            const Eigen::VectorXd trial = z + t * step;
            Eigen::VectorXd Gt;
            try {
                Gt = kkt_residual(trial, N);
            } catch (const NonDifferentiableError&) {
                continue;
            }
            if (Gt.norm() < g0) {
                z = trial;
                G = std::move(Gt);
                moved = true;
                break;
            }
        }
        if (!moved) {
            break;
        }
    }
    x = z.head(m);
}

/// Largest vertex distance after the best proper rigid motion taking b onto a.
inline double rigid_distance(const Polygon& a, const Polygon& b) {
    if (a.size() != b.size()) {
        return std::numeric_limits<double>::infinity();
    }
    Point ca = Point::Zero();
    Point cb = Point::Zero();
    for (std::size_t i = 0; i < a.size(); ++i) {
        ca += a.vertices()[i];
        cb += b.vertices()[i];
    }
    ca /= static_cast<double>(a.size());
    cb /= static_cast<double>(b.size());
    double s_cross = 0.0;
    double s_dot = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const Point p = a.vertices()[i] - ca;
        const Point q = b.vertices()[i] - cb;
        s_cross += cross(q, p);
        s_dot += q.dot(p);
    }
    const double th = std::atan2(s_cross, s_dot);
    const Eigen::Rotation2Dd rot(th);
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        d = std::max(d, (rot * (b.vertices()[i] - cb) - (a.vertices()[i] - ca)).norm());
    }
    return d;
}

}  // namespace detail

/// A random polygon satisfying the length constraints of N, or throws
/// InconsistencyError after repeated projection failures.
template <class Rng>
Polygon random_configuration(const Necklace& N, Rng& rng, double tol = 1e-12) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    const auto m = 2 * static_cast<Eigen::Index>(N.bead_count());
    const double scale = N.total_length() / static_cast<double>(N.bead_count());
    for (int attempt = 0; attempt < 100; ++attempt) {
        Eigen::VectorXd x(m);
        for (Eigen::Index i = 0; i < m; ++i) {
            x(i) = scale * gauss(rng);
        }
        try {
            if (detail::project_onto_constraints(x, N, tol)) {
                return detail::polygon_from(x);
            }
        } catch (const NonDifferentiableError&) {
        }
    }
    throw InconsistencyError("could not generate a feasible configuration");
}

inline SearchResult search_critical(const Necklace& N, const SearchOptions& opt = {}) {
    std::mt19937_64 rng(opt.seed);
    std::uniform_int_distribution<int> steps_dist(0, opt.gradient_steps_max);
    const double L = N.total_length();
    SearchResult out;

    for (int s = 0; s < opt.starts; ++s) {
        ++out.starts;
        Eigen::VectorXd x = random_configuration(N, rng).coordinates();
        try {
            // Ascent on even starts, descent on odd ones.
            const double dir = (s % 2 == 0) ? 1.0 : -1.0;
            const int steps = steps_dist(rng);
            for (int t = 0; t < steps; ++t) {
                const Polygon P = detail::polygon_from(x);
                const Eigen::MatrixXd J = length_gradients(P, N);
                Eigen::VectorXd g = area_gradient(P);
                g -= J.transpose() * J.transpose().completeOrthogonalDecomposition().solve(g);
                if (g.norm() <= 1e-12 * L) {
                    break;
                }
                x += dir * opt.gradient_step * L * g / g.norm();
                if (!detail::project_onto_constraints(x, N, 1e-12)) {
                    break;
                }
            }
            detail::kkt_newton(x, N, opt.newton_iterations);
            const Polygon P = detail::polygon_from(x);
            if (!is_configuration(P, N, opt.feasibility_tol)) {
                continue;
            }
            if (constraint_rank_deficient(P, N, opt.rank_tol)) {
                ++out.rejected_singular;
                continue;
            }
            if (projected_gradient_residual(P, N) > opt.stationary_tol * L) {
                continue;
            }
            ++out.converged;
            const bool seen = std::ranges::any_of(out.stationary, [&](const Polygon& Q) {
                return detail::rigid_distance(Q, P) <= opt.cluster_tol * L;
            });
            if (!seen) {
                out.stationary.push_back(P);
            }
        } catch (const NonDifferentiableError&) {
            ++out.rejected_singular;
        }
    }
    return out;
}

struct CompletenessReport {
    SearchResult search;
    std::vector<Polygon> unmatched;  ///< stationary points far from every enumerated configuration
    std::size_t enumerated_hit = 0;  ///< enumerated configurations the search rediscovered
};

/// Matches every searched stationary point against the enumerated interior and
/// boundary configurations, modulo orientation-preserving rigid motions.
inline CompletenessReport check_completeness(const Necklace& N, const CriticalSet& set, const SearchOptions& opt = {}) {
    CompletenessReport rep;
    rep.search = search_critical(N, opt);
    std::vector<const CriticalConfig*> known;
    for (const CriticalConfig& c : set.interior) {
        known.push_back(&c);
    }
    for (const CriticalConfig& c : set.boundary) {
        known.push_back(&c);
    }
    std::vector<bool> hit(known.size(), false);
    const double tol = opt.cluster_tol * N.total_length();
    for (const Polygon& P : rep.search.stationary) {
        bool matched = false;
        for (std::size_t i = 0; i < known.size(); ++i) {
            if (detail::rigid_distance(known[i]->polygon, P) <= tol) {
                matched = true;
                hit[i] = true;
            }
        }
        if (!matched) {
            rep.unmatched.push_back(P);
        }
    }
    rep.enumerated_hit = static_cast<std::size_t>(std::ranges::count(hit, true));
    return rep;
}

}  // namespace necklace
