#pragma once

// Lagrange-multiplier bookkeeping for oriented area on a necklace
// configuration space. Multipliers follow the normalisation
// 2 grad A = sum_j lambda_j grad L_j.

#include <span>

#include <Eigen/Dense>

#include "necklace/necklace.hpp"
#include "necklace/polygon.hpp"

namespace necklace {

/// Least-squares lambda with J^T lambda closest to 2 grad A.
inline Eigen::VectorXd least_squares_multipliers(const Polygon& P, const Necklace& N) {
    const Eigen::MatrixXd J = length_gradients(P, N);
    const Eigen::VectorXd rhs = 2.0 * area_gradient(P);
    return J.transpose().colPivHouseholderQr().solve(rhs);
}

/// Norm of grad A projected onto ker(J), the tangent space of the level set.
inline double projected_gradient_residual(const Polygon& P, const Necklace& N) {
    const Eigen::MatrixXd J = length_gradients(P, N);
    const Eigen::VectorXd g = area_gradient(P);
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(J.transpose());
    const Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(J.cols(), J.rows());
    return (g - Q * (Q.transpose() * g)).norm();
}

/// Norm of grad A - (1/2) J^T lambda for the given multipliers.
inline double lagrange_residual(const Polygon& P, const Necklace& N, std::span<const double> multipliers) {
    const Eigen::MatrixXd J = length_gradients(P, N);
    const Eigen::Map<const Eigen::VectorXd> lambda(multipliers.data(), static_cast<Eigen::Index>(multipliers.size()));
    return (area_gradient(P) - 0.5 * J.transpose() * lambda).norm();
}

/// Hessian of the Lagrangian A - (1/2) sum_j lambda_j L_j in ambient coordinates.
inline Eigen::MatrixXd lagrangian_hessian(const Polygon& P, const Necklace& N, std::span<const double> multipliers) {
    Eigen::MatrixXd H = area_hessian(P.size());
    const std::vector<Eigen::MatrixXd> HL = length_hessians(P, N);
    for (std::size_t j = 0; j < HL.size(); ++j) {
        H -= 0.5 * multipliers[j] * HL[j];
    }
    return 0.5 * (H + H.transpose());
}

}  // namespace necklace
