#pragma once

#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <string_view>

#include "prodres/errors.hpp"
#include "prodres/linalg.hpp"
#include "prodres/weights.hpp"

namespace prodres {

enum class ReservoirFamily { Linear, Tanh, Product };
enum class Activation { Identity, Tanh };

inline std::string_view family_name(ReservoirFamily f) {
    switch (f) {
        case ReservoirFamily::Linear: return "linear";
        case ReservoirFamily::Tanh: return "tanh";
        case ReservoirFamily::Product: return "product";
    }
    return "?";
}

inline ReservoirFamily parse_family(std::string_view s) {
    if (s == "linear") return ReservoirFamily::Linear;
    if (s == "tanh") return ReservoirFamily::Tanh;
    if (s == "product") return ReservoirFamily::Product;
    throw config_error("unknown reservoir family: " + std::string(s));
}

// A reservoir ready to run: family, size, weights, and the clamp applied to
// product-reservoir inputs before the logarithm (log 0 is undefined; task
// inputs live in (0,1] so the clamp window is [epsilon, 1]).
struct ReservoirSpec {
    ReservoirFamily family = ReservoirFamily::Tanh;
    Index size = 0;
    WeightSet weights;
    double clamp_epsilon = 1e-6;

    // Linear and tanh nodes start at 0, product nodes at 1 (the fixed point
    // of the multiplicative update under unit input).
    template <class Scalar = double>
    VecX<Scalar> initial_state() const {
        if (family == ReservoirFamily::Product) return VecX<Scalar>::Ones(size);
        return VecX<Scalar>::Zero(size);
    }
};

inline ReservoirSpec make_reservoir(ReservoirFamily family, WeightSet weights,
                                    double clamp_epsilon = 1e-6) {
    ReservoirSpec spec;
    spec.family = family;
    spec.size = weights.recurrent.rows();
    spec.weights = std::move(weights);
    spec.clamp_epsilon = clamp_epsilon;
    return spec;
}

namespace detail {

template <class Scalar>
inline constexpr bool is_complex_v = false;
template <class T>
inline constexpr bool is_complex_v<std::complex<T>> = true;

template <class Scalar>
bool finite_value(const Scalar& v) {
    if constexpr (is_complex_v<Scalar>)
        return std::isfinite(v.real()) && std::isfinite(v.imag());
    else
        return std::isfinite(v);
}

template <class Scalar>
bool all_finite(const VecX<Scalar>& v) {
    for (Index i = 0; i < v.size(); ++i)
        if (!finite_value(v(i))) return false;
    return true;
}

// Element-wise logarithm of a reservoir state. Real mode requires strict
// positivity; complex mode uses the principal branch.
template <class Scalar>
VecX<Scalar> log_state(const VecX<Scalar>& x) {
    VecX<Scalar> out(x.size());
    for (Index i = 0; i < x.size(); ++i) {
        if constexpr (is_complex_v<Scalar>) {
            if (x(i) == Scalar(0))
                throw zero_input_error("product node state is zero; multiplicative history reset");
            out(i) = std::log(x(i));
        } else {
            if (!(x(i) > 0.0))
                throw std::domain_error(
                    "product reservoir state must be strictly positive in real mode; "
                    "use the complex mode for sign-carrying values");
            out(i) = std::log(x(i));
        }
    }
    return out;
}

// Element-wise logarithm of a (real) input vector, lifted into the state
// scalar domain. Negative inputs are only admissible in complex mode.
template <class Scalar>
VecX<Scalar> log_input(const Vec& u) {
    VecX<Scalar> out(u.size());
    for (Index i = 0; i < u.size(); ++i) {
        if constexpr (is_complex_v<Scalar>) {
            if (u(i) == 0.0)
                throw zero_input_error("zero input annihilates product node history");
            out(i) = std::log(std::complex<double>(u(i), 0.0));
        } else {
            if (!(u(i) > 0.0))
                throw std::domain_error(
                    "product reservoir input must be strictly positive in real mode; "
                    "clamp it or switch to complex mode");
            out(i) = std::log(u(i));
        }
    }
    return out;
}

} // namespace detail

// One additive update x <- f(recurrent * x + input_weights * u).
inline Vec step_additive(const Vec& state, const Vec& input, const WeightSet& w,
                         Activation act) {
    if (state.size() != w.recurrent.rows())
        throw std::invalid_argument("step_additive: state size does not match weights");
    if (input.size() != w.input.cols())
        throw std::invalid_argument("step_additive: input size does not match weights");

    Vec next = w.recurrent * state + w.input * input;
    if (act == Activation::Tanh) next = next.array().tanh();
    if (!next.allFinite())
        throw divergence_error("additive reservoir state became non-finite", 0);
    return next;
}

// One multiplicative update, simulated through logs:
//   x <- exp(recurrent * log x + input_weights * log u)
// which is the matrix form of the per-node weighted product
//   x_i <- prod_j x_j^{recurrent_ij} * prod_k u_k^{input_ik}.
template <class Scalar = double>
VecX<Scalar> step_product(const VecX<Scalar>& state, const Vec& input, const WeightSet& w) {
    if (state.size() != w.recurrent.rows())
        throw std::invalid_argument("step_product: state size does not match weights");
    if (input.size() != w.input.cols())
        throw std::invalid_argument("step_product: input size does not match weights");

    const VecX<Scalar> log_x = detail::log_state<Scalar>(state);
    const VecX<Scalar> log_u = detail::log_input<Scalar>(input);
    VecX<Scalar> log_next = w.recurrent.cast<Scalar>() * log_x + w.input.cast<Scalar>() * log_u;
    VecX<Scalar> next(log_next.size());
    for (Index i = 0; i < next.size(); ++i) next(i) = std::exp(log_next(i));
    if (!detail::all_finite(next))
        throw divergence_error("product reservoir state became non-finite", 0);
    return next;
}

struct ProductFeedback {
    std::complex<double> prev;
    double weight = 0.0;
};

// Response of a single product node: u^omega on the principal branch, so a
// negative input of modulus |u| maps to |u|^omega * exp(i*pi*omega). With a
// feedback connection the node also multiplies by prev^weight.
inline std::complex<double> product_node_response(double u, double omega,
                                                  std::optional<ProductFeedback> feedback = {}) {
    if (u == 0.0)
        throw zero_input_error("zero input resets the entire history of a product node");
    std::complex<double> out = std::pow(std::complex<double>(u, 0.0), omega);
    if (feedback) {
        if (feedback->prev == std::complex<double>(0.0, 0.0))
            throw zero_input_error("zero feedback value resets the entire history of a product node");
        out *= std::pow(feedback->prev, feedback->weight);
    }
    return out;
}

// State of a product reservoir after t steps, evaluated directly from the
// initial state and the input history:
//   x(t) = exp(R^t log x(0) + sum_{i=0}^{t-1} R^{t-1-i} W_in log u(i))
// The whole computation stays in log space with explicit matrix powers, so it
// is an independent route from iterating step_product.
template <class Scalar = double>
VecX<Scalar> closed_form_product_state(const VecX<Scalar>& init, const Mat& inputs,
                                       const WeightSet& w, Index t) {
    const Index n = w.recurrent.rows();
    if (t < 0) throw std::invalid_argument("closed_form_product_state: t must be >= 0");
    if (init.size() != n)
        throw std::invalid_argument("closed_form_product_state: init size does not match weights");
    if (inputs.rows() < t)
        throw std::invalid_argument("closed_form_product_state: fewer input rows than steps");
    if (inputs.cols() != w.input.cols())
        throw std::invalid_argument("closed_form_product_state: input width does not match weights");
    if (t == 0) return init;

    const MatX<Scalar> recurrent = w.recurrent.cast<Scalar>();
    const MatX<Scalar> win = w.input.cast<Scalar>();

    MatX<Scalar> power = MatX<Scalar>::Identity(n, n);
    VecX<Scalar> driven = VecX<Scalar>::Zero(n);
    for (Index i = t - 1; i >= 0; --i) {
        const Vec u = inputs.row(i).transpose();
        driven += power * (win * detail::log_input<Scalar>(u));
        power = power * recurrent; // after the loop: recurrent^t
    }
    VecX<Scalar> log_x = power * detail::log_state<Scalar>(init) + driven;
    VecX<Scalar> out(n);
    for (Index i = 0; i < n; ++i) out(i) = std::exp(log_x(i));
    if (!detail::all_finite(out))
        throw divergence_error("closed-form product state became non-finite", t);
    return out;
}

// Reservoir state history: one row per retained step. Row r holds the state
// after consuming input row r + washout. The augmented view appends the
// constant-1 column used by the readout.
template <class Scalar = double>
struct Trajectory {
    MatX<Scalar> states;
    Index washout = 0;

    Index rows() const { return states.rows(); }
    Index nodes() const { return states.cols(); }

    MatX<Scalar> augmented() const {
        MatX<Scalar> a(states.rows(), states.cols() + 1);
        a.leftCols(states.cols()) = states;
        a.col(states.cols()).setOnes();
        return a;
    }
};

namespace detail {

inline Vec clamp_unit(Vec u, double eps) {
    for (Index i = 0; i < u.size(); ++i) u(i) = std::min(std::max(u(i), eps), 1.0);
    return u;
}

template <class Scalar>
VecX<Scalar> step_for_family(const ReservoirSpec& spec, const VecX<Scalar>& state, Vec input) {
    if constexpr (is_complex_v<Scalar>) {
        if (spec.family != ReservoirFamily::Product)
            throw std::invalid_argument("complex mode is only defined for product reservoirs");
        return step_product<Scalar>(state, input, spec.weights);
    } else {
        switch (spec.family) {
            case ReservoirFamily::Linear:
                return step_additive(state, input, spec.weights, Activation::Identity);
            case ReservoirFamily::Tanh:
                return step_additive(state, input, spec.weights, Activation::Tanh);
            case ReservoirFamily::Product:
                return step_product<Scalar>(state, clamp_unit(std::move(input), spec.clamp_epsilon),
                                            spec.weights);
        }
        throw std::logic_error("unreachable");
    }
}

} // namespace detail

// Drive the reservoir with the input rows and record the state after each
// step, discarding the first `washout` rows. Deterministic given spec and
// inputs; a non-finite state aborts with the step index.
template <class Scalar = double>
Trajectory<Scalar> run_reservoir(const ReservoirSpec& spec, const Mat& inputs, Index washout = 0,
                                 std::optional<VecX<Scalar>> initial = {}) {
    const Index steps = inputs.rows();
    if (washout < 0) throw std::invalid_argument("run_reservoir: washout must be >= 0");
    if (steps <= washout)
        throw std::invalid_argument("run_reservoir: no rows left after washout (empty trajectory)");
    if (inputs.cols() != spec.weights.input.cols())
        throw std::invalid_argument("run_reservoir: input width does not match weights");

    VecX<Scalar> state = initial ? *initial : spec.initial_state<Scalar>();
    if (state.size() != spec.size)
        throw std::invalid_argument("run_reservoir: initial state size does not match reservoir");

    Trajectory<Scalar> traj;
    traj.washout = washout;
    traj.states.resize(steps - washout, spec.size);
    for (Index t = 0; t < steps; ++t) {
        try {
            state = detail::step_for_family<Scalar>(spec, state, inputs.row(t).transpose());
        } catch (const divergence_error&) {
            throw divergence_error("reservoir diverged", t);
        }
        if (spec.family == ReservoirFamily::Product && !detail::is_complex_v<Scalar>) {
            // exp underflow to 0 would poison the next logarithm
            for (Index i = 0; i < state.size(); ++i)
                if (!(std::real(state(i)) > 0.0)) throw divergence_error("reservoir diverged", t);
        }
        if (t >= washout) traj.states.row(t - washout) = state.transpose();
    }
    return traj;
}

// Distance between two identically driven trajectories started from
// different states; the probe behind the echo-state checks. Entry t is the
// Euclidean distance after consuming input row t.
template <class Scalar = double>
Vec esp_divergence(const ReservoirSpec& spec, const Mat& inputs, const VecX<Scalar>& init_a,
                   const VecX<Scalar>& init_b) {
    if (init_a.size() != spec.size || init_b.size() != spec.size)
        throw std::invalid_argument("esp_divergence: initial state size does not match reservoir");
    if (inputs.rows() < 1) throw std::invalid_argument("esp_divergence: empty input");

    VecX<Scalar> a = init_a;
    VecX<Scalar> b = init_b;
    Vec dist(inputs.rows());
    for (Index t = 0; t < inputs.rows(); ++t) {
        const Vec u = inputs.row(t).transpose();
        try {
            a = detail::step_for_family<Scalar>(spec, a, u);
            b = detail::step_for_family<Scalar>(spec, b, u);
        } catch (const divergence_error&) {
            throw divergence_error("esp probe diverged", t);
        }
        dist(t) = (a - b).norm();
    }
    return dist;
}

} // namespace prodres
