#pragma once

#include <cstdint>
#include <string>

#include "prodres/linalg.hpp"
#include "prodres/reservoir.hpp"

namespace prodres {

struct ReadoutInfo {
    std::string family;
    std::string task;
    Index reservoir_size = 0;
    std::uint64_t seed = 0;
};

// Trained linear readout: one weight per reservoir node plus the constant
// term, so weights.size() == nodes + 1.
template <class Scalar = double>
struct Readout {
    VecX<Scalar> weights;
    ReadoutInfo trained_on;
};

// Minimum-norm least-squares solve of design * X = targets through the SVD.
// Singular values below rcond * sigma_max are treated as zero. A positive
// ridge switches the spectral filter to sigma / (sigma^2 + ridge); it
// defaults off and exists as an escape hatch for ill-conditioned product
// trajectories. Complex designs are solved in the complex field with
// conjugate-transpose geometry.
template <class Scalar = double>
MatX<Scalar> solve_least_squares(const MatX<Scalar>& design, const MatX<Scalar>& targets,
                                 double rcond = 1e-12, double ridge = 0.0) {
    if (design.rows() != targets.rows())
        throw std::invalid_argument("solve_least_squares: row counts differ");
    if (design.size() == 0) throw std::invalid_argument("solve_least_squares: empty design matrix");
    if (rcond < 0.0) throw std::invalid_argument("solve_least_squares: rcond must be >= 0");
    if (ridge < 0.0) throw std::invalid_argument("solve_least_squares: ridge must be >= 0");

    constexpr unsigned opts = Eigen::ComputeThinU | Eigen::ComputeThinV;
    Vec sv;
    MatX<Scalar> u, v;
    if constexpr (detail::is_complex_v<Scalar>) {
        Eigen::JacobiSVD<MatX<Scalar>> svd(design, opts);
        sv = svd.singularValues();
        u = svd.matrixU();
        v = svd.matrixV();
    } else {
        Eigen::BDCSVD<MatX<Scalar>> svd(design, opts);
        sv = svd.singularValues();
        u = svd.matrixU();
        v = svd.matrixV();
    }

    const double sigma_max = sv.size() > 0 ? sv(0) : 0.0;
    if (!(sigma_max > 0.0))
        throw std::invalid_argument("solve_least_squares: all-zero design matrix");

    Vec filter(sv.size());
    for (Index i = 0; i < sv.size(); ++i) {
        if (ridge > 0.0)
            filter(i) = sv(i) / (sv(i) * sv(i) + ridge);
        else
            filter(i) = sv(i) > rcond * sigma_max ? 1.0 / sv(i) : 0.0;
    }
    return v * (filter.cast<Scalar>().asDiagonal() * (u.adjoint() * targets));
}

// Train the readout on a recorded trajectory: regress the augmented states
// (constant column included) onto the target sequence.
template <class Scalar = double>
Readout<Scalar> train_readout(const Trajectory<Scalar>& traj, const VecX<Scalar>& targets,
                              double rcond = 1e-12, double ridge = 0.0, ReadoutInfo info = {}) {
    if (traj.rows() != targets.size())
        throw std::invalid_argument("train_readout: trajectory rows and target length differ");
    if (!targets.allFinite() || !traj.states.allFinite())
        throw std::invalid_argument("train_readout: non-finite data");

    Readout<Scalar> r;
    r.weights = solve_least_squares<Scalar>(traj.augmented(), targets, rcond, ridge);
    r.trained_on = std::move(info);
    return r;
}

// Row-wise inner product of augmented states with the readout weights.
template <class Scalar = double>
VecX<Scalar> predict(const Readout<Scalar>& r, const Trajectory<Scalar>& traj) {
    if (r.weights.size() != traj.nodes() + 1)
        throw std::invalid_argument("predict: readout length does not match trajectory width");
    return traj.augmented() * r.weights;
}

} // namespace prodres
