#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <utility>

#include "prodres/errors.hpp"
#include "prodres/linalg.hpp"

namespace prodres {

// Benchmark data for one task: input rows feed the reservoir, target row t
// is the desired output paired with input row t.
struct SeriesSet {
    Mat inputs;
    Mat targets;
    int tau = 0;
    std::string task_id;
};

// I.i.d. uniform samples on (0,1]; never exactly zero, so product
// reservoirs can take logarithms after clamping.
inline Vec uniform_input(Index t, std::uint64_t seed) {
    if (t < 1) throw std::invalid_argument("uniform_input: length must be >= 1");
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0); // [0,1)
    Vec u(t);
    for (Index i = 0; i < t; ++i) u(i) = 1.0 - unit(gen);
    return u;
}

// A target sequence aligned to absolute time: values(i) is the desired
// output at time start + i. Leading rows without defined history are
// dropped rather than zero-padded.
struct AlignedTarget {
    Vec values;
    Index start = 0;
};

// Delay-recall target y_t = u_{t-tau}, defined for t in [tau, T).
inline AlignedTarget delay_target(const Vec& u, int tau) {
    if (tau < 0) throw std::invalid_argument("delay_target: tau must be >= 0");
    if (tau >= u.size()) throw std::invalid_argument("delay_target: tau >= sequence length");
    AlignedTarget a;
    a.start = tau;
    a.values = u.head(u.size() - tau);
    return a;
}

namespace detail {

// Binomial coefficients up to n = 20 stay exactly representable in double.
inline double binomial(int n, int k) {
    double c = 1.0;
    for (int i = 1; i <= k; ++i) c = c * static_cast<double>(n - k + i) / static_cast<double>(i);
    return c;
}

inline double legendre_value(double x, int n) {
    double sum = 0.0;
    for (int k = 0; k <= n; ++k) {
        const double c = binomial(n, k);
        sum += c * c * std::pow(x - 1.0, n - k) * std::pow(x + 1.0, k);
    }
    return std::ldexp(sum, -n); // * 2^-n
}

} // namespace detail

// Degree-n Legendre polynomial of the tau-delayed input,
//   y_t = 2^-n * sum_k binom(n,k)^2 (u_{t-tau}-1)^{n-k} (u_{t-tau}+1)^k,
// the product-form expansion whose n=1 case reduces to the plain delay
// target. Orders above 20 are rejected (binomial overflow guard).
inline AlignedTarget legendre_target(const Vec& u, int n, int tau) {
    if (n < 0) throw std::invalid_argument("legendre_target: order must be >= 0");
    if (n > 20) throw std::invalid_argument("legendre_target: order above 20 not supported");
    if (tau < 0) throw std::invalid_argument("legendre_target: tau must be >= 0");
    if (tau >= u.size()) throw std::invalid_argument("legendre_target: tau >= sequence length");
    AlignedTarget a;
    a.start = tau;
    a.values.resize(u.size() - tau);
    for (Index i = 0; i < a.values.size(); ++i)
        a.values(i) = detail::legendre_value(u(i), n);
    return a;
}

// dx/dt = beta * x(t-delta) / (1 + x(t-delta)^n) - gamma * x(t), with a
// constant history for t <= 0. delta must be an integer multiple of dt.
struct MackeyGlassParams {
    double beta = 0.2;
    double n = 10.0;
    double gamma = 0.1;
    double delta = 17.0;
    double dt = 0.1;
    double history_init = 1.2;
};

// Integrate the delayed equation with classical fourth-order Runge-Kutta.
// Delayed values are read from the stored sample grid; the half-step stages
// use linear interpolation between adjacent grid points. Returns t_steps
// samples after discarding the first `warmup`.
inline Vec mackey_glass(Index t_steps, const MackeyGlassParams& p = {}, Index warmup = 1000) {
    if (t_steps < 1) throw std::invalid_argument("mackey_glass: t_steps must be >= 1");
    if (warmup < 0) throw std::invalid_argument("mackey_glass: warmup must be >= 0");
    if (!(p.dt > 0.0) || !(p.delta > 0.0) || !(p.n > 0.0) || p.beta < 0.0 || p.gamma < 0.0)
        throw std::invalid_argument("mackey_glass: invalid parameters");
    const double steps_per_delay = p.delta / p.dt;
    const Index m = static_cast<Index>(std::llround(steps_per_delay));
    if (m < 1 || std::abs(static_cast<double>(m) * p.dt - p.delta) > 1e-9 * std::max(1.0, p.delta))
        throw std::invalid_argument("mackey_glass: delta must be an integer multiple of dt");

    const Index total = warmup + t_steps;
    Vec grid(total + 1);
    grid(0) = p.history_init;

    auto delayed = [&](double idx) -> double {
        // idx indexes the sample grid in units of dt; t <= 0 is the constant history
        if (idx <= 0.0) return p.history_init;
        const Index lo = static_cast<Index>(std::floor(idx));
        const double frac = idx - static_cast<double>(lo);
        if (frac == 0.0) return grid(lo);
        return (1.0 - frac) * grid(lo) + frac * grid(lo + 1);
    };
    auto deriv = [&](double x, double xd) {
        const double pow_term = std::pow(xd, p.n);
        return p.beta * xd / (1.0 + pow_term) - p.gamma * x;
    };

    for (Index k = 0; k < total; ++k) {
        const double x = grid(k);
        const double d0 = delayed(static_cast<double>(k - m));
        const double dh = delayed(static_cast<double>(k - m) + 0.5);
        const double d1 = delayed(static_cast<double>(k - m) + 1.0);
        const double k1 = deriv(x, d0);
        const double k2 = deriv(x + 0.5 * p.dt * k1, dh);
        const double k3 = deriv(x + 0.5 * p.dt * k2, dh);
        const double k4 = deriv(x + p.dt * k3, d1);
        const double next = x + p.dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!std::isfinite(next)) throw divergence_error("mackey_glass state became non-finite", k);
        grid(k + 1) = next;
    }
    return grid.segment(warmup, t_steps);
}

// dx/dt = sigma (y - x), dy/dt = x (rho - z) - y, dz/dt = x y - beta z.
struct LorenzParams {
    double sigma = 10.0;
    double rho = 28.0;
    double beta = 8.0 / 3.0;
    double dt = 0.01;
    Eigen::Vector3d init{1.0, 1.0, 1.0};
    Index transient_discard = 1000;
};

// RK4 integration of the three coupled equations; one sample per step after
// dropping the leading transient.
inline Mat lorenz(Index t_steps, const LorenzParams& p = {}) {
    if (t_steps < 1) throw std::invalid_argument("lorenz: t_steps must be >= 1");
    if (p.transient_discard < 0) throw std::invalid_argument("lorenz: transient_discard must be >= 0");
    if (!(p.dt > 0.0) || p.sigma < 0.0 || !(p.rho > 0.0) || !(p.beta > 0.0))
        throw std::invalid_argument("lorenz: invalid parameters");

    auto deriv = [&](const Eigen::Vector3d& s) -> Eigen::Vector3d {
        return {p.sigma * (s(1) - s(0)),
                s(0) * (p.rho - s(2)) - s(1),
                s(0) * s(1) - p.beta * s(2)};
    };

    const Index total = p.transient_discard + t_steps;
    Mat out(t_steps, 3);
    Eigen::Vector3d s = p.init;
    for (Index k = 0; k < total; ++k) {
        const Eigen::Vector3d k1 = deriv(s);
        const Eigen::Vector3d k2 = deriv(s + 0.5 * p.dt * k1);
        const Eigen::Vector3d k3 = deriv(s + 0.5 * p.dt * k2);
        const Eigen::Vector3d k4 = deriv(s + p.dt * k3);
        s += p.dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!s.allFinite()) throw divergence_error("lorenz state became non-finite", k);
        if (k >= p.transient_discard) out.row(k - p.transient_discard) = s.transpose();
    }
    return out;
}

// Per-column affine parameters of a unit rescale; original = unit * span + offset.
struct AffineRecord {
    Vec offset;
    Vec span;

    Mat inverse(const Mat& unit) const {
        Mat out = unit;
        for (Index j = 0; j < out.cols(); ++j)
            out.col(j) = unit.col(j) * span(j) + Vec::Constant(unit.rows(), offset(j));
        return out;
    }
};

// Map every column onto [0,1], then clamp from below at epsilon so the
// result is safe to feed through a logarithm. Returns the affine parameters
// for inverse mapping.
inline std::pair<Mat, AffineRecord> rescale_unit(const Mat& series, double epsilon) {
    if (series.rows() < 2) throw std::invalid_argument("rescale_unit: need at least two rows");
    if (epsilon < 0.0 || epsilon >= 1.0) throw std::invalid_argument("rescale_unit: epsilon out of range");
    AffineRecord rec;
    rec.offset.resize(series.cols());
    rec.span.resize(series.cols());
    Mat out(series.rows(), series.cols());
    for (Index j = 0; j < series.cols(); ++j) {
        const double lo = series.col(j).minCoeff();
        const double hi = series.col(j).maxCoeff();
        if (!(hi > lo)) throw std::invalid_argument("rescale_unit: constant column");
        rec.offset(j) = lo;
        rec.span(j) = hi - lo;
        out.col(j) = (series.col(j).array() - lo) / (hi - lo);
        if (epsilon > 0.0) out.col(j) = out.col(j).cwiseMax(epsilon);
    }
    return {std::move(out), std::move(rec)};
}

// Pair each sample with the sample tau steps ahead: inputs are rows
// [0, T-tau), targets rows [tau, T), every column predicted.
inline SeriesSet prediction_dataset(const Mat& series, int tau) {
    if (tau < 1) throw std::invalid_argument("prediction_dataset: tau must be >= 1");
    if (tau >= series.rows()) throw std::invalid_argument("prediction_dataset: tau >= series length");
    SeriesSet set;
    set.tau = tau;
    set.inputs = series.topRows(series.rows() - tau);
    set.targets = series.bottomRows(series.rows() - tau);
    return set;
}

} // namespace prodres
