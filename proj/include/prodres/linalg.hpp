#pragma once

#include <Eigen/Dense>
#include <complex>
#include <random>
#include <stdexcept>

namespace prodres {

using Index = Eigen::Index;
using Vec   = Eigen::VectorXd;
using Mat   = Eigen::MatrixXd;
using CVec  = Eigen::VectorXcd;
using CMat  = Eigen::MatrixXcd;

template <class Scalar> using VecX = Eigen::Vector<Scalar, Eigen::Dynamic>;
template <class Scalar> using MatX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

// Matrices up to this order go through the dense eigenvalue solver; larger
// ones use two-column subspace iteration, which only needs the dominant
// modulus and scales as O(n^2) per sweep.
inline constexpr Index kDenseEigenLimit = 64;

namespace detail {

// Dominant eigenvalue modulus of a 2x2 real matrix. A negative discriminant
// means a conjugate pair, whose common modulus is sqrt(det).
inline double dominant_modulus_2x2(const Eigen::Matrix2d& t) {
    const double tr   = t(0, 0) + t(1, 1);
    const double det  = t(0, 0) * t(1, 1) - t(0, 1) * t(1, 0);
    const double disc = tr * tr - 4.0 * det;
    if (disc >= 0.0) {
        const double root = std::sqrt(disc);
        return std::max(std::abs((tr + root) / 2.0), std::abs((tr - root) / 2.0));
    }
    return std::sqrt(det);
}

// Orthogonal (subspace) iteration with a two-dimensional block. The block
// keeps conjugate pairs together, where single-vector power iteration
// oscillates indefinitely.
inline double subspace_dominant_modulus(const Mat& a, double tol, long max_iters) {
    const Index n = a.rows();
    std::mt19937_64 gen(0x70726F6472657321ULL); // fixed start basis, keeps the estimate pure
    std::normal_distribution<double> normal(0.0, 1.0);
    Mat q(n, 2);
    for (Index j = 0; j < 2; ++j)
        for (Index i = 0; i < n; ++i) q(i, j) = normal(gen);
    q = Eigen::HouseholderQR<Mat>(q).householderQ() * Mat::Identity(n, 2);

    double rho_prev = -1.0;
    for (long it = 0; it < max_iters; ++it) {
        Mat z = a * q;
        if (z.norm() < 1e-300) return 0.0;
        const Eigen::Matrix2d t = q.transpose() * z;
        const double rho = dominant_modulus_2x2(t);
        if (it > 2 && std::abs(rho - rho_prev) <= tol * std::max(1.0, rho)) return rho;
        rho_prev = rho;
        q = Eigen::HouseholderQR<Mat>(z).householderQ() * Mat::Identity(n, 2);
    }
    return rho_prev;
}

} // namespace detail

// Largest eigenvalue modulus of a square real matrix.
inline double spectral_radius(const Mat& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("spectral_radius: matrix must be square");
    if (m.size() == 0) throw std::invalid_argument("spectral_radius: empty matrix");
    if (!m.allFinite()) throw std::invalid_argument("spectral_radius: non-finite entries");

    if (m.rows() <= kDenseEigenLimit) {
        Eigen::EigenSolver<Mat> solver(m, /*computeEigenvectors=*/false);
        return solver.eigenvalues().cwiseAbs().maxCoeff();
    }
    return detail::subspace_dominant_modulus(m, 1e-12, 100000);
}

} // namespace prodres
