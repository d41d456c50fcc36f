#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "prodres/experiment.hpp"
#include "prodres/metrics.hpp"
#include "prodres/tasks.hpp"

using namespace prodres;

namespace {

CVec lift(const Vec& v) {
    CVec out(v.size());
    for (Index i = 0; i < v.size(); ++i) out(i) = std::complex<double>(v(i), 0.0);
    return out;
}

} // namespace

TEST_CASE("capacity basics") {
    const Vec y = uniform_input(500, 3);

    SECTION("perfect match scores one") {
        REQUIRE(capacity(y, y).value == Catch::Approx(1.0).margin(1e-12));
    }
    SECTION("affine relations score one") {
        const Vec scaled = 2.5 * y.array() - 0.7;
        const auto c = capacity(y, scaled);
        REQUIRE_FALSE(c.degenerate);
        REQUIRE(c.value == Catch::Approx(1.0).margin(1e-12));
    }
    SECTION("symmetric in its arguments") {
        const Vec other = uniform_input(500, 4);
        REQUIRE(capacity(y, other).value == Catch::Approx(capacity(other, y).value).margin(1e-15));
    }
    SECTION("independent sequences score near zero") {
        const Vec a = uniform_input(100000, 5);
        const Vec b = uniform_input(100000, 6);
        REQUIRE(capacity(a, b).value < 1e-3);
    }
    SECTION("zero variance is degenerate, not an error") {
        const Vec flat = Vec::Ones(10);
        const auto c = capacity(flat, uniform_input(10, 7));
        REQUIRE(c.degenerate);
        REQUIRE(c.value == 0.0);
    }
    SECTION("length preconditions") {
        const Vec three = Vec::Ones(3), four = Vec::Ones(4), one = Vec::Ones(1);
        REQUIRE_THROWS_AS(capacity(three, four), std::invalid_argument);
        REQUIRE_THROWS_AS(capacity(one, one), std::invalid_argument);
    }
}

TEST_CASE("complex capacity agrees with the real path on real data") {
    const Vec y = uniform_input(400, 8);
    const Vec z = 0.3 * uniform_input(400, 9).array() + 0.2 * y.array();
    REQUIRE(std::abs(capacity(lift(y), lift(z)).value - capacity(y, z).value) <= 1e-14);

    // affine complex relation still scores modulus one
    CVec cy = lift(y);
    CVec cz(cy.size());
    const std::complex<double> a(1.5, -0.4), b(0.2, 0.1);
    for (Index i = 0; i < cy.size(); ++i) cz(i) = a * cy(i) + b;
    REQUIRE(capacity(cy, cz).value == Catch::Approx(1.0).margin(1e-10));
}

TEST_CASE("total capacity sums the profile") {
    REQUIRE(total_capacity({}) == 0.0);
    REQUIRE(total_capacity({{1, 1.0}, {2, 0.5}}) == Catch::Approx(1.5).margin(1e-15));

    const CapacityProfile p = make_capacity_profile({{1, 0.9}, {2, 0.4}, {50, 0.01}});
    REQUIRE(p.total == Catch::Approx(1.31).margin(1e-12));
    REQUIRE_THROWS_AS(make_capacity_profile({{51, 0.1}}), std::invalid_argument);
    REQUIRE_THROWS_AS(make_capacity_profile({{1, 1.5}}), std::invalid_argument);
    REQUIRE_THROWS_AS(make_capacity_profile({{1, -0.2}}), std::invalid_argument);
}

TEST_CASE("capacity profile of a real run stays in range") {
    const WeightSet w = generate_weights(10, 1, 0.9, 0.2, 654);
    CapacityEvalParams params;
    params.tau_min = 1;
    params.tau_max = 20;
    const auto mc = evaluate_capacity_cell(ReservoirFamily::Linear, w, uniform_input(1500, 20),
                                           uniform_input(1500, 21), params);
    std::map<int, double> per_tau;
    for (int tau = 1; tau <= 20; ++tau) per_tau[tau] = mc[static_cast<std::size_t>(tau - 1)];
    const CapacityProfile p = make_capacity_profile(per_tau, {1, 20});
    REQUIRE(p.total > 1.0);
    REQUIRE(p.total <= 20.0 + 1e-9);
}

TEST_CASE("error metric hand checks") {
    Vec y(2), yh(2);
    y << 0.0, 0.0;
    yh << 0.0, 1.0;
    // numerator sqrt(1/2), variance 1/4
    REQUIRE(nmse(y, yh) == Catch::Approx(2.0 * std::sqrt(2.0)).margin(1e-12));

    const Vec same = uniform_input(100, 10);
    REQUIRE(nmse(same, same) == 0.0);
}

TEST_CASE("error metric scaling law") {
    const Vec y = uniform_input(1000, 11);
    const Vec yh = uniform_input(1000, 12);
    const double base = nmse(y, yh);
    for (double c : {2.0, 10.0, 0.25}) {
        REQUIRE(nmse(Vec(c * y), Vec(c * yh)) == Catch::Approx(base / c).margin(1e-12 * base));
    }
}

TEST_CASE("error metric rejects constant targets") {
    const Vec flat = Vec::Ones(10);
    REQUIRE_THROWS_AS(nmse(uniform_input(10, 13), flat), std::invalid_argument);
    REQUIRE_THROWS_AS(nmse_conventional(uniform_input(10, 13), flat), std::invalid_argument);
}

TEST_CASE("complex error metric agrees with the real path on real data") {
    const Vec y = uniform_input(300, 14);
    const Vec yh = uniform_input(300, 15);
    REQUIRE(std::abs(nmse(lift(y), lift(yh)) - nmse(y, yh)) <= 1e-14);
}

TEST_CASE("nonzero error iff sequences differ") {
    const Vec yh = uniform_input(50, 16);
    Vec y = yh;
    REQUIRE(nmse(y, yh) == 0.0);
    y(20) += 1e-6;
    REQUIRE(nmse(y, yh) > 0.0);
}

TEST_CASE("conventional variant is mse over variance") {
    Vec y(2), yh(2);
    y << 0.0, 0.0;
    yh << 0.0, 1.0;
    REQUIRE(nmse_conventional(y, yh) == Catch::Approx(2.0).margin(1e-12));
}

TEST_CASE("multi-output totals") {
    const std::vector<double> parts{0.1, 0.2, 0.3};
    REQUIRE(nmse_total(parts) == Catch::Approx(0.6).margin(1e-15));
    const std::vector<double> single{0.4};
    REQUIRE(nmse_total(single) == 0.4);
    const std::vector<double> shuffled{0.3, 0.1, 0.2};
    REQUIRE(nmse_total(shuffled) == Catch::Approx(nmse_total(parts)).margin(1e-15));
    REQUIRE_THROWS_AS(nmse_total({}), std::invalid_argument);
}
