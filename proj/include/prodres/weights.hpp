#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>

#include "prodres/linalg.hpp"

namespace prodres {

// Recurrent and input weights of one reservoir. `recurrent` is rescaled at
// construction so its measured spectral radius equals `spectral_radius`;
// `input` holds N(0,1) draws multiplied by `input_scale`, one column per
// input channel.
struct WeightSet {
    Mat recurrent;
    Mat input;
    double spectral_radius = 0.0;
    double input_scale = 0.0;
};

// Draw a fully connected reservoir: recurrent and input entries i.i.d.
// N(0,1), recurrent rescaled to the requested spectral radius, input
// multiplied by input_scale. Identical seeds give bit-identical weights.
inline WeightSet generate_weights(Index n, Index input_dim, double lambda,
                                  double input_scale, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("generate_weights: n must be >= 1");
    if (input_dim < 1) throw std::invalid_argument("generate_weights: input_dim must be >= 1");
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        throw std::invalid_argument("generate_weights: lambda must be positive");
    if (!(input_scale > 0.0) || !std::isfinite(input_scale))
        throw std::invalid_argument("generate_weights: input_scale must be positive");

    std::mt19937_64 gen(seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    WeightSet w;
    w.recurrent.resize(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) w.recurrent(i, j) = normal(gen);
    w.input.resize(n, input_dim);
    for (Index i = 0; i < n; ++i)
        for (Index k = 0; k < input_dim; ++k) w.input(i, k) = normal(gen);

    const double raw_radius = spectral_radius(w.recurrent);
    if (!(raw_radius > 0.0))
        throw std::runtime_error("generate_weights: drawn matrix has zero spectral radius");
    w.recurrent *= lambda / raw_radius;
    w.input *= input_scale;
    w.spectral_radius = lambda;
    w.input_scale = input_scale;
    return w;
}

} // namespace prodres
