#pragma once

// Morse indices of critical configurations, computed two ways: the closed-form
// index formula, and the signature of the Lagrangian Hessian restricted to an
// orthonormal frame of the configuration space's tangent space. Also builds
// the tangent subspaces of edge-length-preserving and cyclic deformations and
// measures their Hessian orthogonality.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "necklace/critical.hpp"
#include "necklace/errors.hpp"
#include "necklace/lagrange.hpp"
#include "necklace/necklace.hpp"
#include "necklace/polygon.hpp"

namespace necklace {

/// Orthonormal frame of ker(dL) with the isometry-orbit directions removed.
struct TangentFrame {
    Eigen::MatrixXd basis;       ///< 2n x (2n - k - 3), orthonormal columns
    Eigen::MatrixXd orbit_dirs;  ///< 2n x 3: x-translation, y-translation, rotation (unit vectors)
};

namespace detail {

/// Unit translation and rotation generators at P.
inline Eigen::MatrixXd orbit_directions(const Polygon& P) {
    const auto n = static_cast<Eigen::Index>(P.size());
    Eigen::MatrixXd O = Eigen::MatrixXd::Zero(2 * n, 3);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Point& p = P.vertices()[static_cast<std::size_t>(i)];
        O(2 * i, 0) = 1.0;
        O(2 * i + 1, 1) = 1.0;
        O(2 * i, 2) = -p.y();
        O(2 * i + 1, 2) = p.x();
    }
    for (Eigen::Index c = 0; c < 3; ++c) {
        O.col(c).normalize();
    }
    return O;
}

/// Orthonormal basis of the column space, dropping directions whose singular
/// value is at most tol * scale. scale defaults to the largest singular value;
/// pass the pre-projection column scale when M may have collapsed to noise.
inline Eigen::MatrixXd orthonormal_range(const Eigen::MatrixXd& M, double tol, double scale = -1.0) {
    if (M.cols() == 0 || M.rows() == 0) {
        return Eigen::MatrixXd(M.rows(), 0);
    }
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinU);
    const Eigen::VectorXd& s = svd.singularValues();
    const double cut = tol * (scale > 0.0 ? scale : s(0));
    Eigen::Index r = 0;
    while (r < s.size() && s(r) > cut) {
        ++r;
    }
    return svd.matrixU().leftCols(r);
}

inline double max_column_norm(const Eigen::MatrixXd& M) {
    return M.cols() == 0 ? 0.0 : M.colwise().norm().maxCoeff();
}

/// Orthonormal basis of the null space of M (columns of V past the numerical rank).
inline Eigen::MatrixXd null_space(const Eigen::MatrixXd& M, double rel_tol) {
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullV);
    const Eigen::VectorXd& s = svd.singularValues();
    Eigen::Index r = 0;
    while (r < s.size() && s(r) > rel_tol * s(0)) {
        ++r;
    }
    return svd.matrixV().rightCols(M.cols() - r);
}

inline double smallest_singular_value(const Eigen::MatrixXd& M) {
    if (M.cols() == 0) {
        return 1.0;
    }
    const Eigen::VectorXd s = Eigen::JacobiSVD<Eigen::MatrixXd>(M).singularValues();
    return M.cols() > M.rows() ? 0.0 : s(s.size() - 1);
}

/// Largest distance of a column of V from the span of the orthonormal Q.
inline double max_distance_to_span(const Eigen::MatrixXd& V, const Eigen::MatrixXd& Q) {
    double d = 0.0;
    for (Eigen::Index c = 0; c < V.cols(); ++c) {
        const Eigen::VectorXd v = V.col(c);
        d = std::max(d, (v - Q * (Q.transpose() * v)).norm());
    }
    return d;
}

inline double spectral_norm_symmetric(const Eigen::MatrixXd& B) {
    if (B.rows() == 0) {
        return 0.0;
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace detail

/// Orthonormal basis of ker(dL) intersected with the orthogonal complement of
/// the isometry orbit, from the SVD of the stacked constraint and orbit rows.
inline TangentFrame tangent_frame(const Polygon& P, const Necklace& N, double gap_tol = 1e-8) {
    const Eigen::MatrixXd J = length_gradients(P, N);
    const auto k = J.rows();
    const auto dim = J.cols();
    TangentFrame f;
    f.orbit_dirs = detail::orbit_directions(P);
    Eigen::MatrixXd M(k + 3, dim);
    M << J, f.orbit_dirs.transpose();
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullV);
    const Eigen::VectorXd& s = svd.singularValues();
    if (s(k + 2) <= gap_tol * s(0)) {
        throw SingularityError("constraint and orbit directions are linearly dependent");
    }
    f.basis = svd.matrixV().rightCols(dim - k - 3);
    return f;
}

/// Full multiplier-weighted stationarity check; throws NotCriticalError.
inline void require_critical(const CriticalConfig& C, const Necklace& N, double rel_tol = 1e-7) {
    const double r = lagrange_residual(C.polygon, N, C.multipliers);
    if (r > rel_tol * N.total_length()) {
        throw NotCriticalError("configuration is not a critical point of oriented area");
    }
}

/// Lagrangian Hessian H_A - (1/2) sum_j lambda_j H_{L_j} in the tangent frame.
inline Eigen::MatrixXd reduced_hessian(const CriticalConfig& C, const Necklace& N, const TangentFrame& frame) {
    require_critical(C, N);
    const Eigen::MatrixXd H = lagrangian_hessian(C.polygon, N, C.multipliers);
    const Eigen::MatrixXd B = frame.basis.transpose() * H * frame.basis;
    return 0.5 * (B + B.transpose());
}

inline Eigen::MatrixXd reduced_hessian(const CriticalConfig& C, const Necklace& N) {
    return reduced_hessian(C, N, tangent_frame(C.polygon, N));
}

struct Signature {
    int negative = 0;
    int zero = 0;
    int positive = 0;

    int total() const { return negative + zero + positive; }
    friend bool operator==(const Signature&, const Signature&) = default;
};

/// Eigenvalue sign counts; |lambda| <= zero_threshold * ||B|| counts as zero.
inline Signature numerical_index(const Eigen::MatrixXd& B, double zero_threshold = 1e-7) {
    Signature sig;
    if (B.rows() == 0) {
        return sig;
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B, Eigen::EigenvaluesOnly);
    const Eigen::VectorXd& ev = es.eigenvalues();
    const double cut = zero_threshold * ev.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (std::abs(ev(i)) <= cut) {
            ++sig.zero;
        } else if (ev(i) < 0.0) {
            ++sig.negative;
        } else {
            ++sig.positive;
        }
    }
    return sig;
}

inline Signature numerical_index(const CriticalConfig& C, const Necklace& N, double zero_threshold = 1e-7) {
    return numerical_index(reduced_hessian(C, N), zero_threshold);
}

/// (1/2) sum_j (2 n_j - 1)(E_j + 1) - 1 - 2w - delta, where delta = 0 when
/// sum_j n_j E_j tan A_j > 0 and 1 otherwise.
inline int morse_index_formula(std::span<const int> beads, std::span<const int> signs, int winding,
                               double bifurcation_value) {
    int twice = 0;
    for (std::size_t j = 0; j < beads.size(); ++j) {
        twice += (2 * beads[j] - 1) * (signs[j] + 1);
    }
    return twice / 2 - 1 - 2 * winding - (bifurcation_value > 0.0 ? 0 : 1);
}

inline int formula_index(const CriticalConfig& C, const Necklace& N) {
    if (!C.admissible) {
        throw UndefinedIndexError("index formula needs an admissible configuration");
    }
    if (C.bifurcating) {
        throw UndefinedIndexError("bifurcating configurations are not Morse points");
    }
    std::vector<int> beads;
    for (const Piece& p : N.pieces()) {
        beads.push_back(p.beads);
    }
    return morse_index_formula(beads, C.signs, C.winding, C.bifurcation_value);
}

struct MorseReport {
    std::optional<int> formula_index;  ///< empty at bifurcating or non-admissible points
    Signature signature;
    double zero_threshold = 1e-7;
    bool agree = false;  ///< formula equals the negative count with no zero eigenvalues;
                         ///< at bifurcating points, a zero eigenvalue was found
};

inline MorseReport morse_report(const CriticalConfig& C, const Necklace& N, double zero_threshold = 1e-7) {
    MorseReport rep;
    rep.zero_threshold = zero_threshold;
    rep.signature = numerical_index(C, N, zero_threshold);
    if (C.admissible && !C.bifurcating) {
        rep.formula_index = formula_index(C, N);
        rep.agree = rep.signature.zero == 0 && *rep.formula_index == rep.signature.negative;
    } else {
        rep.agree = rep.signature.zero >= 1;
    }
    return rep;
}

/// Tangent subspaces at a critical configuration, each as orthonormal columns
/// in ambient coordinates (inside the orbit complement), plus their mutual
/// Hessian cross terms normalised by the spectral norm of the reduced Hessian.
struct OrthogonalityReport {
    int dim_tangent = 0;
    int dim_edge = 0;             ///< edge-length-preserving deformations, expected n - 3
    int dim_cyclic = 0;           ///< cyclic deformations, expected n - k
    std::vector<int> dim_pieces;  ///< per-piece cyclic deformations, expected n_j - 1

    double membership_residual = 0.0;      ///< max distance of any subspace vector from the tangent frame
    double edge_cyclic_sum_residual = 0.0;  ///< tangent frame vs span(edge + cyclic)
    double edge_cyclic_min_angle = 0.0;     ///< smallest singular value of [edge cyclic]
    double piece_sum_residual = 0.0;        ///< cyclic subspace vs span of the per-piece subspaces
    double piece_min_angle = 0.0;           ///< smallest singular value of [piece_1 ... piece_k]

    double max_cross_edge_cyclic = 0.0;
    double max_cross_pieces = 0.0;
    double hessian_norm = 0.0;

    Eigen::MatrixXd edge_basis;
    Eigen::MatrixXd cyclic_basis;
    std::vector<Eigen::MatrixXd> piece_bases;
    Eigen::MatrixXd lagrangian;  ///< ambient Lagrangian Hessian
};

/// Builds the edge-preserving subspace (common kernel of all side-length
/// differentials), the cyclic subspace (push-forward of the polar
/// parametrisation (theta_1..theta_n, R) cut down by the piece constraints),
/// and per-piece cyclic subspaces spanned by d/dt_{i-1} - d/dt_i over inner
/// vertices i, where t are side-length coordinates on cyclic polygons.
inline OrthogonalityReport orthogonality_report(const CriticalConfig& C, const Necklace& N, double chart_tol = 1e-9) {
    if (!C.admissible) {
        throw AdmissibilityError("orthogonality report needs an admissible configuration");
    }
    if (C.bifurcating) {
        throw ChartDegeneracyError("side-length chart degenerates at a bifurcating configuration");
    }
    const Polygon& P = C.polygon;
    const auto n = static_cast<Eigen::Index>(P.size());
    const auto k = static_cast<Eigen::Index>(N.piece_count());
    const TangentFrame frame = tangent_frame(P, N);
    const Eigen::MatrixXd J = length_gradients(P, N);
    const Eigen::MatrixXd D = side_length_differentials(P);

    OrthogonalityReport rep;
    rep.lagrangian = lagrangian_hessian(P, N, C.multipliers);
    rep.dim_tangent = static_cast<int>(frame.basis.cols());
    rep.hessian_norm = detail::spectral_norm_symmetric(frame.basis.transpose() * rep.lagrangian * frame.basis);
    const double norm = rep.hessian_norm > 0.0 ? rep.hessian_norm : 1.0;

    const Eigen::MatrixXd orbitQ = detail::orthonormal_range(frame.orbit_dirs, 1e-12);
    auto project = [&](const Eigen::MatrixXd& V) -> Eigen::MatrixXd {
        return V - orbitQ * (orbitQ.transpose() * V);
    };

    // Edge-length-preserving deformations.
    rep.edge_basis = detail::orthonormal_range(project(detail::null_space(D, 1e-10)), 1e-8, 1.0);

    // Polar parametrisation about the circumcentre.
    const std::optional<CyclicData> cyc = fit_circumcircle(P);
    if (!cyc) {
        throw NotCriticalError("critical configuration is not cyclic");
    }
    Eigen::MatrixXd Jphi = Eigen::MatrixXd::Zero(2 * n, n + 1);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Point r = P.vertices()[static_cast<std::size_t>(i)] - cyc->center;
        Jphi(2 * i, i) = -r.y();
        Jphi(2 * i + 1, i) = r.x();
        Jphi(2 * i, n) = r.x() / cyc->radius;
        Jphi(2 * i + 1, n) = r.y() / cyc->radius;
    }
    const Eigen::MatrixXd cyclic_dirs = Jphi * detail::null_space(J * Jphi, 1e-10);
    rep.cyclic_basis = detail::orthonormal_range(project(cyclic_dirs), 1e-8, detail::max_column_norm(cyclic_dirs));

    // Side-length coordinates t on cyclic polygons: d/dt_m is the minimum-norm
    // preimage of e_m under the side-length Jacobian of the parametrisation.
    const Eigen::MatrixXd Jpsi = D * Jphi;
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd_psi(Jpsi, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& spsi = svd_psi.singularValues();
    if (spsi(n - 1) <= chart_tol * spsi(0)) {
        throw ChartDegeneracyError("side-length coordinates degenerate on cyclic polygons");
    }
    const Eigen::MatrixXd dt = svd_psi.solve(Eigen::MatrixXd::Identity(n, n));  // (n+1) x n
    rep.piece_bases.resize(static_cast<std::size_t>(k));
    for (Eigen::Index j = 0; j < k; ++j) {
        const auto start = static_cast<Eigen::Index>(N.boundary_index(static_cast<std::size_t>(j)));
        const int beads = N.piece(static_cast<std::size_t>(j)).beads;
        Eigen::MatrixXd V(2 * n, beads - 1);
        for (int t = 1; t < beads; ++t) {
            const Eigen::Index i = start + t;  // inner vertex between sides i-1 and i
            V.col(t - 1) = Jphi * (dt.col(i - 1) - dt.col(i));
        }
        rep.piece_bases[static_cast<std::size_t>(j)] =
            detail::orthonormal_range(project(V), 1e-8, detail::max_column_norm(V));
    }

    rep.dim_edge = static_cast<int>(rep.edge_basis.cols());
    rep.dim_cyclic = static_cast<int>(rep.cyclic_basis.cols());
    Eigen::MatrixXd all_pieces(2 * n, 0);
    for (const Eigen::MatrixXd& Bj : rep.piece_bases) {
        rep.dim_pieces.push_back(static_cast<int>(Bj.cols()));
        Eigen::MatrixXd grown(2 * n, all_pieces.cols() + Bj.cols());
        grown << all_pieces, Bj;
        all_pieces = std::move(grown);
    }

    rep.membership_residual = std::max({detail::max_distance_to_span(rep.edge_basis, frame.basis),
                                        detail::max_distance_to_span(rep.cyclic_basis, frame.basis),
                                        detail::max_distance_to_span(all_pieces, frame.basis)});

    Eigen::MatrixXd ec(2 * n, rep.edge_basis.cols() + rep.cyclic_basis.cols());
    ec << rep.edge_basis, rep.cyclic_basis;
    rep.edge_cyclic_min_angle = detail::smallest_singular_value(ec);
    rep.edge_cyclic_sum_residual =
        std::max(rep.membership_residual, detail::max_distance_to_span(frame.basis, detail::orthonormal_range(ec, 1e-10)));

    rep.piece_min_angle = detail::smallest_singular_value(all_pieces);
    rep.piece_sum_residual =
        std::max(detail::max_distance_to_span(all_pieces, rep.cyclic_basis),
                 detail::max_distance_to_span(rep.cyclic_basis, detail::orthonormal_range(all_pieces, 1e-10)));

    if (rep.edge_basis.cols() > 0 && rep.cyclic_basis.cols() > 0) {
        rep.max_cross_edge_cyclic =
            (rep.edge_basis.transpose() * rep.lagrangian * rep.cyclic_basis).cwiseAbs().maxCoeff() / norm;
    }
    for (std::size_t a = 0; a < rep.piece_bases.size(); ++a) {
        for (std::size_t b = a + 1; b < rep.piece_bases.size(); ++b) {
            if (rep.piece_bases[a].cols() == 0 || rep.piece_bases[b].cols() == 0) {
                continue;
            }
            const double c =
                (rep.piece_bases[a].transpose() * rep.lagrangian * rep.piece_bases[b]).cwiseAbs().maxCoeff() / norm;
            rep.max_cross_pieces = std::max(rep.max_cross_pieces, c);
        }
    }
    return rep;
}

struct SliceVerdict {
    bool maximum = false;         ///< true: negative definite on the cyclic slice
    Eigen::VectorXd eigenvalues;  ///< of the Hessian restricted to the slice
    double hessian_norm = 0.0;
};

/// For ((n, L), (1, l)): the Hessian restricted to the cyclic deformations is
/// negative definite when the long piece turns positively and positive
/// definite when it turns negatively. Throws LemmaViolationError otherwise.
inline SliceVerdict extremum_on_cyclic_slice(const CriticalConfig& C, const Necklace& N,
                                             double zero_threshold = 1e-7) {
    if (N.piece_count() != 2 || N.piece(1).beads != 1) {
        throw InstanceError("cyclic slice test needs a ((n, L), (1, l)) necklace");
    }
    const OrthogonalityReport rep = orthogonality_report(C, N);
    SliceVerdict v;
    v.maximum = C.signs[0] > 0;
    v.hessian_norm = rep.hessian_norm;
    const Eigen::MatrixXd S = rep.cyclic_basis.transpose() * rep.lagrangian * rep.cyclic_basis;
    if (S.rows() == 0) {
        return v;
    }
    v.eigenvalues = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(0.5 * (S + S.transpose())).eigenvalues();
    const double cut = zero_threshold * rep.hessian_norm;
    const bool ok = v.maximum ? (v.eigenvalues.array() < -cut).all() : (v.eigenvalues.array() > cut).all();
    if (!ok) {
        throw LemmaViolationError("Hessian on the cyclic slice is not definite with the expected sign");
    }
    return v;
}

}  // namespace necklace
