#pragma once

// Necklace instances and the per-piece length constraints.
//
// A necklace ((n_1, L_1), ..., (n_k, L_k)) has n = sum n_j beads. Piece j
// (0-based here) owns the sides s(j), ..., s(j) + n_j - 1 where
// s(j) = n_0 + ... + n_{j-1}; vertex s(j) is its fixed bead. In 1-based
// notation s(j) = n_1 + ... + n_{j-1} + 1, so every index shifts by one.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "necklace/errors.hpp"
#include "necklace/polygon.hpp"

namespace necklace {

struct Piece {
    int beads = 1;
    double length = 1.0;

    friend bool operator==(const Piece&, const Piece&) = default;
};

class Necklace {
public:
    Necklace() = default;

    explicit Necklace(std::vector<Piece> pieces) : pieces_(std::move(pieces)) {
        if (pieces_.empty()) {
            throw InstanceError("a necklace needs at least one piece");
        }
        std::size_t start = 0;
        for (const Piece& p : pieces_) {
            if (p.beads < 1) {
                throw InstanceError("every piece needs at least one bead");
            }
            if (!(p.length > 0.0) || !std::isfinite(p.length)) {
                throw InstanceError("every piece length must be positive and finite");
            }
            starts_.push_back(start);
            start += static_cast<std::size_t>(p.beads);
            total_length_ += p.length;
        }
        bead_count_ = start;
        if (bead_count_ < 3) {
            // No polygon with fewer than 3 vertices: the configuration space is empty.
            throw NotRealisableError("a necklace needs at least 3 beads in total");
        }
        piece_of_side_.resize(bead_count_);
        for (std::size_t j = 0; j < pieces_.size(); ++j) {
            for (int t = 0; t < pieces_[j].beads; ++t) {
                piece_of_side_[starts_[j] + static_cast<std::size_t>(t)] = j;
            }
        }
    }

    const std::vector<Piece>& pieces() const { return pieces_; }
    const Piece& piece(std::size_t j) const { return pieces_[j]; }
    std::size_t piece_count() const { return pieces_.size(); }
    std::size_t bead_count() const { return bead_count_; }
    double total_length() const { return total_length_; }

    /// 0-based index of the fixed bead that starts piece j (cyclic in j).
    std::size_t boundary_index(std::size_t j) const { return starts_[j % pieces_.size()]; }

    /// Piece that owns side i (the side from p_i to p_{i+1}).
    std::size_t piece_of_side(std::size_t i) const { return piece_of_side_[i % bead_count_]; }

    /// Vertex i is inner when both adjacent sides belong to the same piece.
    bool is_inner(std::size_t i) const {
        i %= bead_count_;
        return std::ranges::find(starts_, i) == starts_.end();
    }

    /// Common side length L_j / n_j of piece j at a critical configuration.
    double side_length(std::size_t j) const { return pieces_[j].length / pieces_[j].beads; }

    friend bool operator==(const Necklace& a, const Necklace& b) { return a.pieces_ == b.pieces_; }

private:
    std::vector<Piece> pieces_;
    std::vector<std::size_t> starts_;
    std::vector<std::size_t> piece_of_side_;
    std::size_t bead_count_ = 0;
    double total_length_ = 0.0;
};

namespace detail {

inline void check_sizes(const Polygon& P, const Necklace& N) {
    if (P.size() != N.bead_count()) {
        throw InstanceError("polygon has " + std::to_string(P.size()) + " vertices but the necklace has " +
                            std::to_string(N.bead_count()) + " beads");
    }
}

inline Point unit_side(const Polygon& P, std::size_t i) {
    const Point d = P.side(static_cast<std::ptrdiff_t>(i));
    const double l = d.norm();
    if (!(l > 0.0)) {
        throw NonDifferentiableError("side " + std::to_string(i) + " has zero length");
    }
    return d / l;
}

}  // namespace detail

/// Total side length of each piece.
inline std::vector<double> piece_lengths(const Polygon& P, const Necklace& N) {
    detail::check_sizes(P, N);
    std::vector<double> out(N.piece_count(), 0.0);
    for (std::size_t i = 0; i < P.size(); ++i) {
        out[N.piece_of_side(i)] += P.side_length(static_cast<std::ptrdiff_t>(i));
    }
    return out;
}

inline bool is_configuration(const Polygon& P, const Necklace& N, double tol = 1e-9) {
    const std::vector<double> lengths = piece_lengths(P, N);
    for (std::size_t j = 0; j < lengths.size(); ++j) {
        if (std::abs(lengths[j] - N.piece(j).length) > tol * N.total_length()) {
            return false;
        }
    }
    return true;
}

/// k x 2n Jacobian of the piece-length map; row j is grad L_j.
///
/// Accumulated side by side: side i contributes -u_i at p_i and +u_i at
/// p_{i+1}. At a boundary vertex s(j) this leaves -u_{s(j)} in row j and
/// +u_{s(j)-1} in row j-1, at an inner vertex u_{i-1} - u_i in its own row.
inline Eigen::MatrixXd length_gradients(const Polygon& P, const Necklace& N) {
    detail::check_sizes(P, N);
    const auto n = static_cast<Eigen::Index>(P.size());
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(N.piece_count()), 2 * n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Point u = detail::unit_side(P, static_cast<std::size_t>(i));
        const auto j = static_cast<Eigen::Index>(N.piece_of_side(static_cast<std::size_t>(i)));
        const Eigen::Index next = (i + 1) % n;
        J(j, 2 * i) -= u.x();
        J(j, 2 * i + 1) -= u.y();
        J(j, 2 * next) += u.x();
        J(j, 2 * next + 1) += u.y();
    }
    return J;
}

/// Hessian of each L_j, assembled from the side-length blocks (I - u u^T) / l_i.
inline std::vector<Eigen::MatrixXd> length_hessians(const Polygon& P, const Necklace& N) {
    detail::check_sizes(P, N);
    const auto n = static_cast<Eigen::Index>(P.size());
    std::vector<Eigen::MatrixXd> H(N.piece_count(), Eigen::MatrixXd::Zero(2 * n, 2 * n));
    for (Eigen::Index i = 0; i < n; ++i) {
        const Point u = detail::unit_side(P, static_cast<std::size_t>(i));
        const double l = P.side_length(i);
        const Eigen::Matrix2d M = (Eigen::Matrix2d::Identity() - u * u.transpose()) / l;
        const Eigen::Index next = (i + 1) % n;
        Eigen::MatrixXd& Hj = H[N.piece_of_side(static_cast<std::size_t>(i))];
        Hj.block<2, 2>(2 * i, 2 * i) += M;
        Hj.block<2, 2>(2 * next, 2 * next) += M;
        Hj.block<2, 2>(2 * i, 2 * next) -= M;
        Hj.block<2, 2>(2 * next, 2 * i) -= M;
    }
    return H;
}

/// Rows of the n x 2n differential of the individual side lengths.
inline Eigen::MatrixXd side_length_differentials(const Polygon& P) {
    const auto n = static_cast<Eigen::Index>(P.size());
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, 2 * n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Point u = detail::unit_side(P, static_cast<std::size_t>(i));
        const Eigen::Index next = (i + 1) % n;
        D(i, 2 * i) = -u.x();
        D(i, 2 * i + 1) = -u.y();
        D(i, 2 * next) = u.x();
        D(i, 2 * next + 1) = u.y();
    }
    return D;
}

enum class SingularityReason { none, zero_side, aligned_line };

inline const char* to_string(SingularityReason r) {
    switch (r) {
        case SingularityReason::zero_side:
            return "zero-side";
        case SingularityReason::aligned_line:
            return "aligned-line";
        case SingularityReason::none:
            break;
    }
    return "none";
}

struct SingularityVerdict {
    bool singular = false;
    SingularityReason reason = SingularityReason::none;
};

struct SingularityTolerances {
    double zero_side = 1e-10;  ///< relative to total length L
    double collinear = 1e-9;   ///< smallest singular value of centred vertices, relative to L
    double angle = 1e-9;       ///< |u_i - u_{i-1}| at inner vertices
};

/// Geometric singularity test: a zero side, or the polygon lies on a line
/// with equal side directions at every inner vertex.
inline SingularityVerdict is_singular(const Polygon& P, const Necklace& N, const SingularityTolerances& tol = {}) {
    detail::check_sizes(P, N);
    const double L = N.total_length();
    for (std::size_t i = 0; i < P.size(); ++i) {
        if (P.side_length(static_cast<std::ptrdiff_t>(i)) <= tol.zero_side * L) {
            return {true, SingularityReason::zero_side};
        }
    }

    const auto n = static_cast<Eigen::Index>(P.size());
    Eigen::MatrixXd centred(n, 2);
    Point mean = Point::Zero();
    for (const Point& p : P.vertices()) {
        mean += p;
    }
    mean /= static_cast<double>(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        centred.row(i) = (P.vertices()[static_cast<std::size_t>(i)] - mean).transpose();
    }
    const Eigen::Vector2d sv = Eigen::JacobiSVD<Eigen::MatrixXd>(centred).singularValues();
    if (sv(1) > tol.collinear * L) {
        return {};
    }
    for (std::size_t i = 0; i < P.size(); ++i) {
        if (!N.is_inner(i)) {
            continue;
        }
        const Point a = detail::unit_side(P, (i + P.size() - 1) % P.size());
        const Point b = detail::unit_side(P, i);
        if ((a - b).norm() > tol.angle) {
            return {};
        }
    }
    return {true, SingularityReason::aligned_line};
}

/// Numerical counterpart of is_singular: the constraint Jacobian has rank < k.
/// A non-differentiable point (zero side) counts as rank deficient.
inline bool constraint_rank_deficient(const Polygon& P, const Necklace& N, double rel_tol = 1e-8) {
    Eigen::MatrixXd J;
    try {
        J = length_gradients(P, N);
    } catch (const NonDifferentiableError&) {
        return true;
    }
    const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(J).singularValues();
    return sv(sv.size() - 1) <= rel_tol * sv(0);
}

/// Every single-bead piece must be shorter than half the string.
inline bool is_realisable(const Necklace& N) {
    const double L = N.total_length();
    return std::ranges::all_of(N.pieces(), [L](const Piece& p) { return p.beads != 1 || 2.0 * p.length < L; });
}

/// Dimension 2n - k - 3 of the non-singular configuration space.
inline int manifold_dimension(const Necklace& N) {
    if (!is_realisable(N)) {
        throw NotRealisableError("necklace is not realisable");
    }
    return 2 * static_cast<int>(N.bead_count()) - static_cast<int>(N.piece_count()) - 3;
}

}  // namespace necklace
