#include <doctest.h>

#include <cmath>

#include "fracsoc/frac_calc.hpp"
#include "oracles.hpp"

using namespace fracsoc;

TEST_CASE("gl_weights: integer order collapses to backward difference") {
    const GlWeights w = gl_weights(FracOrder(1.0), 4);
    REQUIRE(w.weights.size() == 5);
    CHECK(w.weights[0] == 1.0);
    CHECK(w.weights[1] == -1.0);
    CHECK(w.weights[2] == 0.0);
    CHECK(w.weights[3] == 0.0);
    CHECK(w.weights[4] == 0.0);
}

TEST_CASE("gl_weights: alpha = 0.5 frozen values") {
    const GlWeights w = gl_weights(FracOrder(0.5), 3);
    CHECK(w.weights[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(w.weights[1] == doctest::Approx(-0.5).epsilon(1e-15));
    CHECK(w.weights[2] == doctest::Approx(-0.125).epsilon(1e-15));
    CHECK(w.weights[3] == doctest::Approx(-0.0625).epsilon(1e-15));
}

TEST_CASE("gl_weights: w_1 = -alpha for any order") {
    for (double a : {0.1, 0.25, 0.6, 0.99, 1.0}) {
        CHECK(gl_weights(FracOrder(a), 1).weights[1] == doctest::Approx(-a).epsilon(1e-15));
    }
}

TEST_CASE("gl_weights: recurrence matches Gamma-binomial oracle") {
    for (double a = 0.1; a < 0.95; a += 0.1) {
        const GlWeights w = gl_weights(FracOrder(a), 64);
        for (int j = 0; j <= 64; ++j) {
            const double expected = oracles::gl_weight_gamma(a, j);
            CHECK(std::abs(w.weights[j] - expected) <=
                  1e-10 * std::max(std::abs(expected), 1e-300));
        }
    }
}

TEST_CASE("gl_weights: sign, monotonicity and partial sums") {
    for (double a : {0.125, 0.5, 0.9}) {
        const GlWeights w = gl_weights(FracOrder(a), 50);
        CHECK(w.weights[0] == 1.0);
        double partial = w.weights[0];
        double prev_partial = 1.0;
        for (int j = 1; j <= 50; ++j) {
            CHECK(w.weights[j] < 0.0);
            if (j >= 2) CHECK(std::abs(w.weights[j]) < std::abs(w.weights[j - 1]));
            partial += w.weights[j];
            CHECK(partial > 0.0);
            CHECK(partial <= prev_partial);
            prev_partial = partial;
        }
    }
}

TEST_CASE("gl_weights: domain errors") {
    CHECK_THROWS_AS(FracOrder(0.0), std::invalid_argument);
    CHECK_THROWS_AS(FracOrder(1.5), std::invalid_argument);
    CHECK_THROWS_AS(FracOrder(-0.5), std::invalid_argument);
    CHECK_THROWS_AS(gl_weights(FracOrder(0.5), 0), std::invalid_argument);
}

TEST_CASE("history buffer: ring semantics and padding") {
    HistoryBuffer buf(3, 1.0);
    CHECK_THROWS_AS(buf.padded(0), std::domain_error);
    buf.push(10.0);
    CHECK(buf.padded(0) == 10.0);
    CHECK(buf.padded(5) == 10.0);  // constant extension
    buf.push(20.0);
    buf.push(30.0);
    CHECK(buf.padded(0) == 30.0);
    CHECK(buf.padded(1) == 20.0);
    CHECK(buf.padded(2) == 10.0);
    buf.push(40.0);  // evicts 10
    CHECK(buf.padded(0) == 40.0);
    CHECK(buf.padded(2) == 20.0);
    CHECK(buf.padded(7) == 20.0);  // oldest stored is now 20
}

TEST_CASE("gl_derivative: all-zero history is zero") {
    HistoryBuffer buf(5, 0.5);
    for (int i = 0; i < 5; ++i) buf.push(0.0);
    CHECK(gl_derivative(buf, gl_weights(FracOrder(0.7), 4)) == 0.0);
}

TEST_CASE("gl_derivative: constant history is zero for every order") {
    for (double a : {0.25, 0.5, 1.0}) {
        HistoryBuffer buf(6, 2.0);
        for (int i = 0; i < 4; ++i) buf.push(3.7);
        CHECK(gl_derivative(buf, gl_weights(FracOrder(a), 5)) == 0.0);
    }
}

TEST_CASE("gl_derivative: alpha = 1 is the backward difference") {
    HistoryBuffer buf(2, 1.0);
    buf.push(1.0);
    buf.push(2.0);
    CHECK(gl_derivative(buf, gl_weights(FracOrder(1.0), 1)) == doctest::Approx(1.0));

    HistoryBuffer buf2(8, 0.25);
    for (double x : {0.0, 0.5, 1.5, 1.0}) buf2.push(x);
    CHECK(gl_derivative(buf2, gl_weights(FracOrder(1.0), 7)) ==
          doctest::Approx((1.0 - 1.5) / 0.25).epsilon(1e-14));
}

TEST_CASE("gl_derivative: ramp with full memory matches brute-force sum") {
    const double t_s = 0.1, a = 0.5;
    const int n = 21;  // x(t) = t from t = 0 to 2
    HistoryBuffer buf(n, t_s);
    std::vector<double> newest_first;
    for (int k = 0; k < n; ++k) buf.push(k * t_s);
    for (int k = n - 1; k >= 0; --k) newest_first.push_back((n - 1 - k) * t_s);
    // newest_first holds x(t), x(t-T), ...
    std::vector<double> samples;
    for (int k = 0; k < n; ++k) samples.push_back((n - 1 - k) * t_s);
    const double got = gl_derivative(buf, gl_weights(FracOrder(a), n - 1));
    const double want = oracles::gl_derivative_brute(samples, t_s, a, n - 1);
    CHECK(got == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("gl_derivative: linearity") {
    const double t_s = 0.5;
    const GlWeights w = gl_weights(FracOrder(0.6), 7);
    std::vector<double> x = {0.3, -1.2, 2.0, 0.7, 1.1, -0.4, 0.9, 2.2};
    std::vector<double> y = {1.0, 0.2, -0.5, 1.9, -2.2, 0.8, 0.1, -1.0};
    const double a = 1.7, b = -0.9;
    HistoryBuffer bx(8, t_s), by(8, t_s), bz(8, t_s);
    for (size_t i = 0; i < x.size(); ++i) {
        bx.push(x[i]);
        by.push(y[i]);
        bz.push(a * x[i] + b * y[i]);
    }
    CHECK(gl_derivative(bz, w) ==
          doctest::Approx(a * gl_derivative(bx, w) + b * gl_derivative(by, w))
              .epsilon(1e-12));
}

TEST_CASE("gl_derivative: converges to the analytic value for x = t^2") {
    // D^a t^2 = Gamma(3)/Gamma(3-a) * t^(2-a); halving the step shrinks error
    for (double a : {0.25, 0.5, 0.75}) {
        const double analytic = 2.0 / std::tgamma(3.0 - a);
        double prev_err = 1e300;
        for (double t_s : {4e-3, 2e-3, 1e-3}) {
            const int n = static_cast<int>(std::lround(1.0 / t_s)) + 1;
            HistoryBuffer buf(n, t_s);
            for (int k = 0; k < n; ++k) buf.push((k * t_s) * (k * t_s));
            const double got = gl_derivative(buf, gl_weights(FracOrder(a), n - 1));
            const double err = std::abs(got - analytic) / analytic;
            CHECK(err < prev_err);
            prev_err = err;
        }
        CHECK(prev_err < 0.01);
    }
}

TEST_CASE("cpe_impedance: phase and magnitude") {
    const auto z_cap = cpe_impedance(2.0, FracOrder(1.0), 3.0);
    CHECK(std::real(z_cap) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(std::arg(z_cap) == doctest::Approx(-M_PI / 2).epsilon(1e-12));

    const auto z_warburg = cpe_impedance(1.0, FracOrder(0.5), 10.0);
    CHECK(std::arg(z_warburg) == doctest::Approx(-M_PI / 4).epsilon(1e-12));

    CHECK(std::abs(cpe_impedance(1.0, FracOrder(0.5), 1.0)) ==
          doctest::Approx(1.0).epsilon(1e-14));

    CHECK_THROWS_AS(cpe_impedance(1.0, FracOrder(0.5), 0.0), std::invalid_argument);
    CHECK_THROWS_AS(cpe_impedance(0.0, FracOrder(0.5), 1.0), std::invalid_argument);
}
