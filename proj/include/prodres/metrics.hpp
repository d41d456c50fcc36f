#pragma once

#include <cmath>
#include <complex>
#include <map>
#include <span>
#include <stdexcept>
#include <utility>

#include "prodres/linalg.hpp"

namespace prodres {

// Capacity of one (output, target) pair. `degenerate` flags a zero-variance
// argument, for which the capacity is defined as 0.
struct CapacityValue {
    double value = 0.0;
    bool degenerate = false;
};

namespace detail {

inline void check_pair_lengths(Index a, Index b, const char* who) {
    if (a != b) throw std::invalid_argument(std::string(who) + ": sequence lengths differ");
    if (a < 2) throw std::invalid_argument(std::string(who) + ": need at least two samples");
}

} // namespace detail

// Squared-correlation capacity Cov^2(y, yhat) / (Var(y) Var(yhat)) with
// population (divide-by-T) moments.
inline CapacityValue capacity(const Vec& y, const Vec& y_hat) {
    detail::check_pair_lengths(y.size(), y_hat.size(), "capacity");
    const double my = y.mean();
    const double mh = y_hat.mean();
    const Eigen::ArrayXd cy = y.array() - my;
    const Eigen::ArrayXd ch = y_hat.array() - mh;
    const double var_y = cy.square().mean();
    const double var_h = ch.square().mean();
    if (var_y == 0.0 || var_h == 0.0) return {0.0, true};
    const double cov = (cy * ch).mean();
    return {cov * cov / (var_y * var_h), false};
}

// Complex-valued sequences: the same formula evaluated in the complex field
// (no conjugation, matching the transpose-style moments of the real case),
// then the modulus of the result. Coincides with the real path on real data.
inline CapacityValue capacity(const CVec& y, const CVec& y_hat) {
    detail::check_pair_lengths(y.size(), y_hat.size(), "capacity");
    using C = std::complex<double>;
    const C my = y.mean();
    const C mh = y_hat.mean();
    const Eigen::ArrayXcd cy = y.array() - my;
    const Eigen::ArrayXcd ch = y_hat.array() - mh;
    const C var_y = (cy * cy).mean();
    const C var_h = (ch * ch).mean();
    if (std::abs(var_y) == 0.0 || std::abs(var_h) == 0.0) return {0.0, true};
    const C cov = (cy * ch).mean();
    return {std::abs(cov * cov / (var_y * var_h)), false};
}

// Total capacity: plain sum of the per-delay values.
inline double total_capacity(const std::map<int, double>& per_tau) {
    double sum = 0.0;
    for (const auto& [tau, mc] : per_tau) sum += mc;
    return sum;
}

// Capacity function over a delay range plus its sum.
struct CapacityProfile {
    std::map<int, double> per_tau;
    double total = 0.0;
    std::pair<int, int> tau_range{1, 50};
};

inline CapacityProfile make_capacity_profile(std::map<int, double> per_tau,
                                             std::pair<int, int> tau_range = {1, 50}) {
    constexpr double slack = 1e-9; // numerical slack on the [0, 1] range
    CapacityProfile p;
    p.tau_range = tau_range;
    for (const auto& [tau, mc] : per_tau) {
        if (tau < tau_range.first || tau > tau_range.second)
            throw std::invalid_argument("make_capacity_profile: delay outside configured range");
        if (!(mc >= -slack) || !(mc <= 1.0 + slack))
            throw std::invalid_argument("make_capacity_profile: capacity outside [0, 1]");
    }
    p.per_tau = std::move(per_tau);
    p.total = total_capacity(p.per_tau);
    const double max_total = static_cast<double>(tau_range.second - tau_range.first + 1);
    if (p.total > max_total + slack)
        throw std::invalid_argument("make_capacity_profile: total exceeds the delay count");
    return p;
}

// Normalized error with a root-mean-square numerator over a variance
// denominator:  sqrt(mean((y - yhat)^2)) / Var(yhat).
// That mixed normalization is deliberate and kept verbatim; see
// nmse_conventional for the plain MSE / Var variant reported alongside it.
inline double nmse(const Vec& y, const Vec& y_hat) {
    detail::check_pair_lengths(y.size(), y_hat.size(), "nmse");
    const double mh = y_hat.mean();
    const double var_h = (y_hat.array() - mh).square().mean();
    if (var_h == 0.0) throw std::invalid_argument("nmse: target sequence has zero variance");
    const double num = std::sqrt((y - y_hat).array().square().mean());
    return num / var_h;
}

// Complex sequences: evaluate the same expression in the complex field and
// report the modulus of the result.
inline double nmse(const CVec& y, const CVec& y_hat) {
    detail::check_pair_lengths(y.size(), y_hat.size(), "nmse");
    using C = std::complex<double>;
    const C mh = y_hat.mean();
    const Eigen::ArrayXcd ch = y_hat.array() - mh;
    const C var_h = (ch * ch).mean();
    if (std::abs(var_h) == 0.0) throw std::invalid_argument("nmse: target sequence has zero variance");
    const Eigen::ArrayXcd e = y.array() - y_hat.array();
    const C num = std::sqrt((e * e).mean());
    return std::abs(num / var_h);
}

// Conventional mean-squared-error over variance, reported side by side for
// comparison with external results.
inline double nmse_conventional(const Vec& y, const Vec& y_hat) {
    detail::check_pair_lengths(y.size(), y_hat.size(), "nmse_conventional");
    const double mh = y_hat.mean();
    const double var_h = (y_hat.array() - mh).square().mean();
    if (var_h == 0.0)
        throw std::invalid_argument("nmse_conventional: target sequence has zero variance");
    return (y - y_hat).array().square().mean() / var_h;
}

// Multi-output error: per-output values added together.
inline double nmse_total(std::span<const double> per_output) {
    if (per_output.empty()) throw std::invalid_argument("nmse_total: empty input");
    double sum = 0.0;
    for (double v : per_output) sum += v;
    return sum;
}

} // namespace prodres
