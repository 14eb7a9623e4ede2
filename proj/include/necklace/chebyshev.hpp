#pragma once

// Two consecutive fixed beads: the necklace ((n, L), (1, l)), i.e. broken
// lines of length L with n links and fixed endpoints at distance l.
//
// With x = cos(alpha / 2), alpha the oriented central angle of each link,
// critical configurations correspond one-to-one with the solutions of
// |U_{n-1}(x)| = n l / L on (-1, 1), where U_m is the Chebyshev polynomial of
// the second kind: U_m(cos t) = sin((m + 1) t) / sin t.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

#include "necklace/critical.hpp"
#include "necklace/errors.hpp"
#include "necklace/necklace.hpp"

namespace necklace {

/// Coefficients of U_m in the monomial basis, lowest degree first.
inline std::vector<double> chebyshev_U(int m) {
    if (m < 0) {
        throw DomainError("Chebyshev degree must be non-negative");
    }
    std::vector<double> prev{1.0};
    if (m == 0) {
        return prev;
    }
    std::vector<double> cur{0.0, 2.0};
    for (int d = 2; d <= m; ++d) {
        std::vector<double> next(static_cast<std::size_t>(d) + 1, 0.0);
        for (std::size_t i = 0; i < cur.size(); ++i) {
            next[i + 1] += 2.0 * cur[i];
        }
        for (std::size_t i = 0; i < prev.size(); ++i) {
            next[i] -= prev[i];
        }
        prev = std::move(cur);
        cur = std::move(next);
    }
    return cur;
}

/// U_m(x) by the three-term recurrence.
inline double chebyshev_U_value(int m, double x) {
    if (m < 0) {
        throw DomainError("Chebyshev degree must be non-negative");
    }
    double prev = 1.0;
    if (m == 0) {
        return prev;
    }
    double cur = 2.0 * x;
    for (int d = 2; d <= m; ++d) {
        const double next = 2.0 * x * cur - prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

inline Necklace two_bead_necklace(int n, double L, double l) {
    if (n < 2 || !(l > 0.0) || !(L > l)) {
        throw InstanceError("two-bead necklace needs n >= 2 and L > l > 0");
    }
    return Necklace({Piece{n, L}, Piece{1, l}});
}

struct TwoBeadSolution {
    double x = 0.0;  ///< cos(alpha / 2)
    CriticalConfig config;
};

/// Critical configuration of ((n, L), (1, l)) attached to a solution x.
inline CriticalConfig two_bead_configuration(int n, double L, double l, double x, const SolverOptions& opt = {}) {
    const Necklace N = two_bead_necklace(n, L, l);
    const double half = std::acos(std::clamp(x, -1.0, 1.0));  // alpha / 2 in (0, pi)
    const double alpha = 2.0 * half;
    const double R = (L / n) / (2.0 * std::sin(half));

    const int e1 = x >= 0.0 ? 1 : -1;
    const double a1 = x >= 0.0 ? half : std::numbers::pi - half;

    // Oriented central angle of the closing side, reduced to (-pi, pi].
    double last = std::remainder(-n * alpha, 2.0 * std::numbers::pi);
    if (last <= -std::numbers::pi) {
        last += 2.0 * std::numbers::pi;
    }
    const int e2 = last >= 0.0 ? 1 : -1;
    const double turn = n * e1 * 2.0 * a1 + last;
    const int w = static_cast<int>(std::lround(turn / (2.0 * std::numbers::pi)));
    const std::array<int, 2> signs{e1, e2};
    return build_configuration(N, signs, w, R, opt);
}

/// All x in (-1, 1) with |U_{n-1}(x)| = n l / L, in descending order, each with
/// its critical configuration. Roots are isolated by a dense sign-change scan
/// of U_{n-1}(x) -+ n l / L and refined by bisection.
inline std::vector<TwoBeadSolution> solve_two_bead(int n, double L, double l, const SolverOptions& opt = {}) {
    two_bead_necklace(n, L, l);
    const double level = n * l / L;
    const int samples = std::max(64, opt.scan_per_bead * n);

    std::vector<double> xs;
    for (const double target : {level, -level}) {
        auto g = [&](double x) { return chebyshev_U_value(n - 1, x) - target; };
        double a = -1.0;
        double ga = g(a);
        for (int m = 1; m <= samples; ++m) {
            const double b = -1.0 + 2.0 * static_cast<double>(m) / samples;
            const double gb = g(b);
            if (gb == 0.0 && m < samples) {
                xs.push_back(b);
            } else if (ga * gb < 0.0) {
                double lo = a;
                double hi = b;
                double glo = ga;
                for (int it = 0; it < 200 && hi - lo > 2.0 * std::numeric_limits<double>::epsilon(); ++it) {
                    const double mid = 0.5 * (lo + hi);
                    const double gm = g(mid);
                    if (gm == 0.0) {
                        lo = hi = mid;
                        break;
                    }
                    if ((gm < 0.0) == (glo < 0.0)) {
                        lo = mid;
                        glo = gm;
                    } else {
                        hi = mid;
                    }
                }
                xs.push_back(0.5 * (lo + hi));
            }
            a = b;
            ga = gb;
        }
    }
    std::ranges::sort(xs, std::greater<>());

    std::vector<TwoBeadSolution> out;
    out.reserve(xs.size());
    for (double x : xs) {
        out.push_back({x, two_bead_configuration(n, L, l, x, opt)});
    }
    return out;
}

/// Index attached to each solution by its rank: 2n - 2 - i for the i-th
/// largest positive x, i - 1 for the i-th smallest negative x. Input must be
/// sorted descending (as returned by solve_two_bead).
inline std::vector<std::optional<int>> two_bead_rank_indices(int n, const std::vector<TwoBeadSolution>& sols) {
    std::vector<std::optional<int>> out(sols.size());
    int positive_rank = 0;
    for (std::size_t s = 0; s < sols.size(); ++s) {
        if (sols[s].x > 0.0) {
            out[s] = 2 * n - 2 - ++positive_rank;
        }
    }
    int negative_rank = 0;
    for (std::size_t s = sols.size(); s-- > 0;) {
        if (sols[s].x < 0.0) {
            out[s] = ++negative_rank - 1;
        }
    }
    return out;
}

}  // namespace necklace
