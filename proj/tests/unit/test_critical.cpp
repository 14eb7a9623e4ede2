#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "necklace/critical.hpp"
#include "necklace/lagrange.hpp"

using namespace necklace;

namespace {

constexpr double pi = std::numbers::pi;

Necklace random_realisable(std::mt19937_64& rng, int n) {
    for (;;) {
        std::vector<Piece> pieces;
        int left = n;
        while (left > 0) {
            const int b = std::uniform_int_distribution<int>(1, left)(rng);
            pieces.push_back({b, b * std::uniform_real_distribution<double>(0.3, 1.5)(rng)});
            left -= b;
        }
        Necklace N(pieces);
        if (is_realisable(N)) {
            return N;
        }
    }
}

}  // namespace

TEST(ClosureResidual, Examples) {
    const std::vector<int> plus{1};
    EXPECT_NEAR(closure_residual(Necklace({{4, 4}}), plus, 1, std::sqrt(0.5)), 0.0, 1e-14);
    EXPECT_NEAR(closure_residual(Necklace({{3, 3}}), plus, 1, 0.5 / std::sin(pi / 3)), 0.0, 1e-14);
    // w = 0: F tends to 0 as R grows, never reaching it.
    const Necklace N({{2, 1}, {3, 2.7}});
    const std::vector<int> signs{1, -1};
    EXPECT_LT(std::abs(closure_residual(N, signs, 0, 1e9)), 1e-8);
    EXPECT_THROW(closure_residual(Necklace({{4, 4}}), plus, 1, 0.4), DomainError);
    EXPECT_THROW(closure_residual(Necklace({{4, 4}}), std::vector<int>{0}, 1, 1.0), InstanceError);
    EXPECT_THROW(closure_residual(Necklace({{4, 4}}), std::vector<int>{1, 1}, 1, 1.0), InstanceError);
}

TEST(SolveRadii, Examples) {
    const std::vector<int> plus{1};
    RadiusRoots r = solve_radii(Necklace({{4, 4}}), plus, 1);
    ASSERT_EQ(r.interior.size(), 1U);
    EXPECT_NEAR(r.interior[0], std::sqrt(0.5), 1e-12);
    EXPECT_FALSE(r.boundary);

    r = solve_radii(Necklace({{4, 4}}), plus, 3);
    EXPECT_TRUE(r.interior.empty());
    EXPECT_FALSE(r.boundary);

    // Complete fold: four diameters.
    r = solve_radii(Necklace({{4, 4}}), plus, 2);
    EXPECT_TRUE(r.interior.empty());
    ASSERT_TRUE(r.boundary);
    EXPECT_DOUBLE_EQ(*r.boundary, 0.5);

    const std::vector<int> ppp{1, 1, 1};
    r = solve_radii(Necklace({{1, 1}, {1, 1}, {1, 1}}), ppp, 1);
    ASSERT_EQ(r.interior.size(), 1U);
    EXPECT_NEAR(r.interior[0], 1.0 / std::sqrt(3.0), 1e-12);

    // All-equal signs with w = 0 has no root.
    EXPECT_TRUE(solve_radii(Necklace({{2, 1}, {3, 2.7}}), std::vector<int>{1, 1}, 0).interior.empty());
}

TEST(SolveRadii, RootsHaveTinyResidual) {
    std::mt19937_64 rng(8);
    for (int t = 0; t < 30; ++t) {
        const Necklace N = random_realisable(rng, 3 + t % 6);
        std::vector<int> signs(N.piece_count());
        for (int& e : signs) {
            e = std::bernoulli_distribution(0.5)(rng) ? 1 : -1;
        }
        for (int w = -3; w <= 3; ++w) {
            for (double R : solve_radii(N, signs, w).interior) {
                EXPECT_LE(std::abs(closure_residual(N, signs, w, R)), 1e-12);
            }
        }
    }
}

TEST(SolveRadii, ConstantResidualFamilyIsReported) {
    // Equal side lengths with opposite signs and equal bead counts: F does not depend on R.
    const Necklace N({{2, 2}, {2, 2}});
    const RadiusRoots r = solve_radii(N, std::vector<int>{1, -1}, 0);
    EXPECT_TRUE(r.constant_residual);
    EXPECT_TRUE(r.interior.empty());
    EXPECT_FALSE(solve_radii(N, std::vector<int>{1, -1}, 1).constant_residual);
}

TEST(BuildConfiguration, SquareAndMirror) {
    const Necklace N({{4, 4}});
    const CriticalConfig c = build_configuration(N, std::vector<int>{1}, 1, std::sqrt(0.5));
    EXPECT_NEAR(c.area, 1.0, 1e-14);
    for (double l : c.polygon.side_lengths()) {
        EXPECT_NEAR(l, 1.0, 1e-14);
    }
    EXPECT_TRUE(c.admissible);
    EXPECT_FALSE(c.bifurcating);
    EXPECT_NEAR(c.bifurcation_value, 4.0, 1e-12);
    EXPECT_NEAR(c.multipliers[0], 1.0, 1e-14);  // l cot(pi/4)
    EXPECT_DOUBLE_EQ(c.polygon.vertices()[0].y(), 0.0);

    const CriticalConfig m = build_configuration(N, std::vector<int>{-1}, -1, std::sqrt(0.5));
    EXPECT_NEAR(m.area, -1.0, 1e-14);
    const CriticalConfig mm = mirror(c);
    for (std::size_t i = 0; i < 4; ++i) {
        EXPECT_LE((mm.polygon.vertices()[i] - m.polygon.vertices()[i]).norm(), 1e-14);
    }
    EXPECT_EQ(mm.signs, m.signs);
    EXPECT_EQ(mm.winding, m.winding);
    EXPECT_NEAR(mm.multipliers[0], m.multipliers[0], 1e-14);

    EXPECT_THROW(build_configuration(N, std::vector<int>{1}, 2, std::sqrt(0.5)), InconsistencyError);
    EXPECT_THROW(build_configuration(N, std::vector<int>{1}, 1, 0.3), DomainError);
}

TEST(BuildConfiguration, InvariantsOnRandomNecklaces) {
    std::mt19937_64 rng(12);
    for (int t = 0; t < 40; ++t) {
        const Necklace N = random_realisable(rng, 3 + t % 6);
        const double L = N.total_length();
        for (const CriticalConfig& c : enumerate_critical(N).interior) {
            double turn = 0.0;
            for (std::size_t j = 0; j < N.piece_count(); ++j) {
                EXPECT_NEAR(2 * c.radius * std::sin(c.half_angles[j]), N.side_length(j), 1e-10 * L);
                EXPECT_NEAR(c.multipliers[j], N.side_length(j) * c.signs[j] / std::tan(c.half_angles[j]), 1e-12 * L);
                turn += N.piece(j).beads * c.signs[j] * 2 * c.half_angles[j];
            }
            EXPECT_NEAR(turn, 2 * pi * c.winding, 1e-10);
            const std::vector<double> got = piece_lengths(c.polygon, N);
            for (std::size_t j = 0; j < got.size(); ++j) {
                EXPECT_NEAR(got[j], N.piece(j).length, 1e-10 * L);
            }
            // Equal orientation within each piece: every side turns the same way about the centre.
            for (std::size_t i = 0; i < N.bead_count(); ++i) {
                const auto si = static_cast<std::ptrdiff_t>(i);
                const double cr = cross(c.polygon.vertex(si), c.polygon.vertex(si + 1));
                EXPECT_EQ(cr > 0 ? 1 : -1, c.signs[N.piece_of_side(i)]);
            }
            EXPECT_LE(projected_gradient_residual(c.polygon, N), 1e-9 * L);
        }
    }
}

TEST(Enumerate, TriangleLinkageHasTwoPoints) {
    const CriticalSet s = enumerate_critical(Necklace({{1, 1}, {1, 1}, {1, 1}}));
    ASSERT_EQ(s.interior.size(), 2U);
    EXPECT_EQ(s.interior[0].winding, -1);
    EXPECT_EQ(s.interior[1].winding, 1);
    EXPECT_NEAR(s.interior[1].area, std::sqrt(3.0) / 4, 1e-14);
}

TEST(Enumerate, SquareNecklaceAndCompleteFold) {
    const CriticalSet s = enumerate_critical(Necklace({{4, 4}}));
    ASSERT_EQ(s.interior.size(), 2U);
    EXPECT_EQ(s.interior[0].winding, -1);
    EXPECT_EQ(s.interior[1].winding, 1);
    ASSERT_EQ(s.boundary.size(), 1U);  // the two fold orientations coincide
    EXPECT_FALSE(s.boundary[0].admissible);
    const auto& v = s.boundary[0].polygon.vertices();
    EXPECT_LE((v[0] - v[2]).norm(), 1e-14);
    EXPECT_LE((v[1] - v[3]).norm(), 1e-14);
}

TEST(Enumerate, TwoPlusOneMatchesChebyshevRoots) {
    const CriticalSet s = enumerate_critical(Necklace({{2, 2}, {1, 1}}));
    ASSERT_EQ(s.interior.size(), 2U);
    // x = cos(alpha / 2) = cos(A_1) for E_1 = +1; -cos(A_1) for E_1 = -1.
    std::vector<double> xs;
    for (const CriticalConfig& c : s.interior) {
        xs.push_back(c.signs[0] * std::cos(c.half_angles[0]));
    }
    std::ranges::sort(xs);
    EXPECT_NEAR(xs[0], -0.5, 1e-12);
    EXPECT_NEAR(xs[1], 0.5, 1e-12);
}

TEST(Enumerate, RegularStarsOfOneBeadNecklace) {
    for (int n = 3; n <= 8; ++n) {
        const CriticalSet s = enumerate_critical(Necklace({{n, 1.0}}));
        // Stars {n/w} with 1 <= |w| < n/2 (w = n/2 is the fold).
        int expected = 0;
        for (int w = 1; 2 * w < n; ++w) {
            expected += 2;
        }
        EXPECT_EQ(static_cast<int>(s.interior.size()), expected) << "n=" << n;
        EXPECT_EQ(s.boundary.size(), n % 2 == 0 ? 1U : 0U);
        for (const CriticalConfig& c : s.interior) {
            EXPECT_NEAR(c.radius, 0.5 / n / std::sin(pi * std::abs(c.winding) / n), 1e-12);
        }
    }
}

TEST(Enumerate, SortedAndClosedUnderMirror) {
    std::mt19937_64 rng(31);
    for (int t = 0; t < 30; ++t) {
        const Necklace N = random_realisable(rng, 3 + t % 6);
        const CriticalSet s = enumerate_critical(N);
        for (std::size_t i = 1; i < s.interior.size(); ++i) {
            const auto& a = s.interior[i - 1];
            const auto& b = s.interior[i];
            EXPECT_LE(std::tie(a.winding, a.signs, a.radius), std::tie(b.winding, b.signs, b.radius));
        }
        for (const CriticalConfig& c : s.interior) {
            const CriticalConfig m = mirror(c);
            const auto it = std::ranges::find_if(s.interior, [&](const CriticalConfig& o) {
                return o.signs == m.signs && o.winding == m.winding && std::abs(o.radius - m.radius) <= 1e-12;
            });
            ASSERT_NE(it, s.interior.end());
            EXPECT_NEAR(it->area, -c.area, 1e-12 * N.total_length() * N.total_length());
        }
    }
}

TEST(Enumerate, RejectsNonRealisable) {
    EXPECT_THROW(enumerate_critical(Necklace({{1, 3}, {1, 1}, {1, 1}})), NotRealisableError);
}

TEST(Enumerate, ConstantFamilyIsSkippedAndRecorded) {
    const CriticalSet s = enumerate_critical(Necklace({{2, 2}, {2, 2}}));
    ASSERT_FALSE(s.constant_families.empty());
    for (const auto& signs : s.constant_families) {
        EXPECT_EQ(signs[0], -signs[1]);
    }
}

TEST(Enumerate, MaxWindingLimitsTheScan) {
    SolverOptions o;
    o.max_winding = 1;
    const CriticalSet s = enumerate_critical(Necklace({{7, 1}}), o);
    for (const CriticalConfig& c : s.interior) {
        EXPECT_LE(std::abs(c.winding), 1);
    }
    EXPECT_EQ(s.interior.size(), 2U);
}
