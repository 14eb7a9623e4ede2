#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "necklace/chebyshev.hpp"
#include "necklace/morse.hpp"

using namespace necklace;

namespace {

std::vector<Necklace> suite() {
    return {Necklace({{4, 4}}),
            Necklace({{1, 1}, {1, 1}, {1, 1}}),
            Necklace({{2, 2}, {1, 1}}),
            Necklace({{3, 3}, {1, 1}}),
            Necklace({{6, 1}}),
            Necklace({{1, 1.0}, {1, 1.3}, {1, 0.8}, {1, 1.1}, {1, 0.9}}),
            Necklace({{3, 2}, {2, 1.5}, {1, 1.2}}),
            Necklace({{2, 1}, {3, 2.7}}),
            Necklace({{2, 1.0}, {2, 1.4}})};
}

bool morse_point(const CriticalConfig& c) { return c.admissible && !c.bifurcating; }

}  // namespace

TEST(TangentFrame, DimensionsKernelAndOrbit) {
    for (const Necklace& N : suite()) {
        for (const CriticalConfig& c : enumerate_critical(N).interior) {
            const TangentFrame f = tangent_frame(c.polygon, N);
            EXPECT_EQ(f.basis.cols(), manifold_dimension(N));
            if (f.basis.cols() == 0) {
                continue;
            }
            EXPECT_LE((length_gradients(c.polygon, N) * f.basis).cwiseAbs().maxCoeff(), 1e-10);
            EXPECT_LE((f.orbit_dirs.transpose() * f.basis).cwiseAbs().maxCoeff(), 1e-12);
            const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(f.basis.cols(), f.basis.cols());
            EXPECT_LE((f.basis.transpose() * f.basis - I).norm(), 1e-12);
        }
    }
}

TEST(TangentFrame, SingularConfigurationThrows) {
    const Polygon P({Point(0, 0), Point(1, 0), Point(2, 0), Point(1, 0)});
    EXPECT_THROW(tangent_frame(P, Necklace({{2, 2}, {2, 2}})), SingularityError);
}

TEST(ReducedHessian, SquareIsNegativeDefiniteAndMirrorPositive) {
    const Necklace N({{4, 4}});
    const CriticalSet s = enumerate_critical(N);
    const CriticalConfig& sq = s.interior[1];
    ASSERT_EQ(sq.winding, 1);
    EXPECT_EQ(numerical_index(sq, N), (Signature{4, 0, 0}));
    EXPECT_EQ(formula_index(sq, N), 4);
    EXPECT_EQ(numerical_index(s.interior[0], N), (Signature{0, 0, 4}));
    EXPECT_EQ(numerical_index(enumerate_critical(Necklace({{1, 1}, {1, 1}, {1, 1}})).interior[0],
                              Necklace({{1, 1}, {1, 1}, {1, 1}})),
              (Signature{0, 0, 0}));
}

TEST(ReducedHessian, OrbitDirectionsAddExactlyThreeZeros) {
    for (const Necklace& N : suite()) {
        for (const CriticalConfig& c : enumerate_critical(N).interior) {
            if (!morse_point(c)) {
                continue;
            }
            const TangentFrame f = tangent_frame(c.polygon, N);
            if (f.basis.cols() == 0) {
                continue;  // the augmented block is pure rounding noise; a relative cut is meaningless
            }
            Eigen::MatrixXd V(f.basis.rows(), f.basis.cols() + 3);
            V << f.basis, f.orbit_dirs;
            const Eigen::MatrixXd H = lagrangian_hessian(c.polygon, N, c.multipliers);
            const Signature with = numerical_index(Eigen::MatrixXd(V.transpose() * H * V));
            const Signature without = numerical_index(c, N);
            EXPECT_EQ(with.zero, without.zero + 3);
            EXPECT_EQ(with.negative, without.negative);
            EXPECT_EQ(with.positive, without.positive);
        }
    }
}

TEST(ReducedHessian, FrameIndependence) {
    std::mt19937_64 rng(13);
    std::normal_distribution<double> g;
    for (const Necklace& N : suite()) {
        for (const CriticalConfig& c : enumerate_critical(N).interior) {
            if (!morse_point(c)) {
                continue;
            }
            TangentFrame f = tangent_frame(c.polygon, N);
            const Eigen::Index d = f.basis.cols();
            if (d == 0) {
                continue;
            }
            Eigen::MatrixXd G(d, d);
            for (Eigen::Index i = 0; i < G.size(); ++i) {
                G.data()[i] = g(rng);
            }
            const Eigen::MatrixXd Q = Eigen::HouseholderQR<Eigen::MatrixXd>(G).householderQ();
            const Signature a = numerical_index(reduced_hessian(c, N, f));
            f.basis = f.basis * Q;
            const Signature b = numerical_index(reduced_hessian(c, N, f));
            EXPECT_EQ(a, b);
        }
    }
}

TEST(ReducedHessian, RejectsNonCriticalInput) {
    const Necklace N({{4, 4}});
    CriticalConfig c = enumerate_critical(N).interior[1];
    std::vector<Point> v = c.polygon.vertices();
    v[1] += Point(0.05, 0.0);
    c.polygon = Polygon(v);
    EXPECT_THROW(reduced_hessian(c, N), NotCriticalError);
}

TEST(FormulaIndex, AgreesWithEigenvaluesOnSuite) {
    for (const Necklace& N : suite()) {
        for (const CriticalConfig& c : enumerate_critical(N).interior) {
            if (!morse_point(c)) {
                continue;
            }
            const MorseReport r = morse_report(c, N);
            EXPECT_EQ(r.signature.zero, 0);
            ASSERT_TRUE(r.formula_index);
            EXPECT_EQ(*r.formula_index, r.signature.negative);
            EXPECT_TRUE(r.agree);
            EXPECT_EQ(r.signature.total(), manifold_dimension(N));
        }
    }
}

TEST(FormulaIndex, ClosedFormCases) {
    // All positive, w = 1, positive bifurcation value: 2n - k - 3.
    const std::vector<int> beads{3, 2, 1};
    const std::vector<int> plus{1, 1, 1};
    EXPECT_EQ(morse_index_formula(beads, plus, 1, 2.0), 2 * 6 - 3 - 3);
    // One-piece regular stars: 2n - 2w - 2 for w > 0 and 2|w| - 2 for w < 0.
    for (int n = 3; n <= 8; ++n) {
        const std::vector<int> one{n};
        for (int w = 1; 2 * w < n; ++w) {
            EXPECT_EQ(morse_index_formula(one, std::vector<int>{1}, w, 1.0), 2 * n - 2 * w - 2);
            EXPECT_EQ(morse_index_formula(one, std::vector<int>{-1}, -w, -1.0), 2 * w - 2);
        }
    }
}

TEST(FormulaIndex, UndefinedOffMorsePoints) {
    const Necklace N({{4, 4}});
    CriticalConfig fold = enumerate_critical(N).boundary.at(0);
    EXPECT_THROW(formula_index(fold, N), UndefinedIndexError);
    CriticalConfig c = enumerate_critical(N).interior[1];
    c.bifurcating = true;
    EXPECT_THROW(formula_index(c, N), UndefinedIndexError);
    EXPECT_THROW(orthogonality_report(c, N), ChartDegeneracyError);
    EXPECT_THROW(orthogonality_report(fold, N), AdmissibilityError);
}

TEST(FormulaIndex, ConvexityCap) {
    std::mt19937_64 rng(41);
    for (int t = 0; t < 30; ++t) {
        const int n = 3 + t % 6;
        std::vector<Piece> pieces;
        int left = n;
        while (left > 0) {
            const int b = std::uniform_int_distribution<int>(1, left)(rng);
            pieces.push_back({b, b * std::uniform_real_distribution<double>(0.3, 1.5)(rng)});
            left -= b;
        }
        const Necklace N(pieces);
        if (!is_realisable(N)) {
            continue;
        }
        const int dim = manifold_dimension(N);
        for (const CriticalConfig& c : enumerate_critical(N).interior) {
            if (!morse_point(c)) {
                continue;
            }
            const int idx = formula_index(c, N);
            EXPECT_LE(idx, dim);
            const bool convex = c.winding == 1 && std::ranges::all_of(c.signs, [](int e) { return e == 1; });
            if (convex) {
                // Non-convex local maxima exist too (a folded-back short piece with w = 0), so only one direction holds.
                EXPECT_EQ(idx, dim);
            }
        }
    }
}

TEST(Orthogonality, SquareAndTwoPieceSplit) {
    const Necklace sqN({{4, 4}});
    const OrthogonalityReport sq = orthogonality_report(enumerate_critical(sqN).interior[1], sqN);
    EXPECT_EQ(sq.dim_edge, 1);
    EXPECT_EQ(sq.dim_cyclic, 3);
    EXPECT_LE(sq.max_cross_edge_cyclic, 1e-8);

    const Necklace N({{2, 1.0}, {2, 1.4}});
    for (const CriticalConfig& c : enumerate_critical(N).interior) {
        if (!morse_point(c)) {
            continue;
        }
        const OrthogonalityReport r = orthogonality_report(c, N);
        EXPECT_EQ(r.dim_pieces, (std::vector<int>{1, 1}));
        EXPECT_EQ(r.dim_cyclic, 2);
        EXPECT_LE(r.max_cross_pieces, 1e-8);
    }
}

TEST(Orthogonality, LemmaDimensionsAndResidualsOnSuite) {
    for (const Necklace& N : suite()) {
        const int n = static_cast<int>(N.bead_count());
        const int k = static_cast<int>(N.piece_count());
        for (const CriticalConfig& c : enumerate_critical(N).interior) {
            if (!morse_point(c)) {
                continue;
            }
            const OrthogonalityReport r = orthogonality_report(c, N);
            EXPECT_EQ(r.dim_edge, n - 3);
            EXPECT_EQ(r.dim_cyclic, n - k);
            for (int j = 0; j < k; ++j) {
                EXPECT_EQ(r.dim_pieces[static_cast<std::size_t>(j)], N.piece(static_cast<std::size_t>(j)).beads - 1);
            }
            EXPECT_EQ(r.dim_edge + r.dim_cyclic, r.dim_tangent);
            EXPECT_LE(r.edge_cyclic_sum_residual, 1e-8);
            EXPECT_LE(r.piece_sum_residual, 1e-8);
            EXPECT_LE(r.max_cross_edge_cyclic, 1e-7);
            EXPECT_LE(r.max_cross_pieces, 1e-7);
        }
    }
}

TEST(Bifurcating, ZeroEigenvalueAppears) {
    // Two-bead family with n = 4: the bifurcation value changes sign near x = 1/sqrt(6).
    const int n = 4;
    auto build = [&](double x) {
        const double l = std::abs(chebyshev_U_value(n - 1, x)) / n;
        return two_bead_configuration(n, 1.0, l, x);
    };
    double lo = 0.39;
    double hi = 0.42;
    const bool lo_neg = build(lo).bifurcation_value < 0;
    ASSERT_NE(lo_neg, build(hi).bifurcation_value < 0);
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        ((build(mid).bifurcation_value < 0) == lo_neg ? lo : hi) = mid;
    }
    const double x = 0.5 * (lo + hi);
    const CriticalConfig c = build(x);
    ASSERT_TRUE(c.bifurcating);
    const Necklace N = two_bead_necklace(n, 1.0, std::abs(chebyshev_U_value(n - 1, x)) / n);
    const MorseReport r = morse_report(c, N, 1e-6);
    EXPECT_FALSE(r.formula_index);
    EXPECT_GE(r.signature.zero, 1);
    EXPECT_TRUE(r.agree);
}
