#include <doctest.h>

#include <cmath>
#include <vector>

#include "support.hpp"

using namespace twospin;
using namespace testsupport;

namespace {

// Independent long-double evaluation of the contraction formula.
long double alpha_reference(const SpinSystem& s, const std::vector<double>& xs) {
    const long double b = s.beta, g = s.gamma;
    long double f = s.lambda;
    for (double x : xs) f *= (b * x + 1) / (x + g);
    long double sum = 0;
    for (double x : xs) sum += std::sqrt(x / ((b * x + 1) * (x + g)));
    return (1 - b * g) * std::sqrt(f / ((b * f + 1) * (f + g))) * sum;
}

// The auxiliary function that agrees with alpha_d at its maximizer.
double alpha_tilde(const SpinSystem& s, int d, double x) {
    const long double b = s.beta, g = s.gamma, f = symmetric_f(s, d, x);
    const long double v = d * (1 - b * g) * (g - b * x * x) / ((b * x + 1) * (x + g)) * f / (g - b * f * f);
    return static_cast<double>(std::sqrt(v));
}

}  // namespace

TEST_CASE("classify") {
    CHECK(classify({0, 1, 1}).kind == SpinClass::AntiFerromagnetic);
    CHECK(classify({1, 1, 1}).kind == SpinClass::Degenerate);
    CHECK(classify({2, 3, 1}).kind == SpinClass::Ferromagnetic);
    CHECK(classify({0, 0, 1}).kind == SpinClass::Degenerate);
    CHECK_THROWS_AS(classify({-0.1, 1, 1}), InvalidParameter);
    CHECK_THROWS_AS(classify({0.1, 1, 0}), InvalidParameter);

    const Classification c = classify({2.0, 0.25, 4.0});
    CHECK(c.kind == SpinClass::AntiFerromagnetic);
    CHECK(c.swapped);
    CHECK(c.normalized.beta == 0.25);
    CHECK(c.normalized.gamma == 2.0);
    CHECK(c.normalized.lambda == doctest::Approx(0.25));
    CHECK_FALSE(classify({0.25, 2.0, 4.0}).swapped);
    CHECK(is_antiferromagnetic(SpinSystem::hardcore(3)));
    CHECK_THROWS_AS(require_antiferromagnetic({2, 3, 1}), InvalidParameter);
}

TEST_CASE("extended ratio") {
    CHECK(ExtendedRatio::infinity().is_infinite());
    CHECK(ExtendedRatio::infinity().probability() == 1.0);
    CHECK(ExtendedRatio::zero().probability() == 0.0);
    CHECK(ExtendedRatio::finite(1.0).probability() == doctest::Approx(0.5));
    CHECK(ExtendedRatio::from_probability(1.0).is_infinite());
    CHECK(ExtendedRatio::from_probability(0.25).value() == doctest::Approx(1.0 / 3.0));
    CHECK_THROWS_AS(ExtendedRatio::infinity().value(), DomainError);
    CHECK(ExtendedRatio::finite(1e300) < ExtendedRatio::infinity());
    CHECK(ExtendedRatio::zero() < ExtendedRatio::finite(1e-300));
}

TEST_CASE("edge factor") {
    const SpinSystem hc{0, 1, 1};
    CHECK(edge_factor(hc, ExtendedRatio::zero()) == 1.0);
    CHECK(edge_factor(hc, ExtendedRatio::infinity()) == 0.0);
    CHECK(edge_factor({0.2, 2, 1}, ExtendedRatio::finite(1)) == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(edge_factor({0.2, 2, 1}, ExtendedRatio::zero()) == doctest::Approx(0.5));
}

TEST_CASE("recursion") {
    const SpinSystem hc{0, 1, 1};
    CHECK(recursion_f(hc, 1, {}).value() == 1.0);
    const std::vector<ExtendedRatio> one{ExtendedRatio::finite(1)};
    CHECK(recursion_f(hc, 1, one).value() == doctest::Approx(0.5));
    const std::vector<ExtendedRatio> mixed{ExtendedRatio::infinity(), ExtendedRatio::zero()};
    CHECK(recursion_f(hc, 1, mixed).value() == 0.0);
}

TEST_CASE("recursion agrees across the log-domain switch") {
    const SpinSystem s{0.3, 1.7, 2.5};
    for (int d : {30, 32, 33, 40}) {
        std::vector<ExtendedRatio> kids(static_cast<std::size_t>(d), ExtendedRatio::finite(0.8));
        const double expect = 2.5 * std::pow((0.3 * 0.8 + 1) / (0.8 + 1.7), d);
        CHECK(recursion_f(s, 2.5, kids).value() == doctest::Approx(expect).epsilon(1e-12));
    }
    std::vector<ExtendedRatio> many(2000, ExtendedRatio::zero());
    const double r = recursion_f({0.1, 1.5, 1.0}, 1.0, many).value();
    CHECK(r >= 0.0);
    CHECK(std::isfinite(r));
}

TEST_CASE("symmetric f") {
    const SpinSystem hc{0, 1, 1};
    CHECK(symmetric_f(hc, 2, 0) == 1.0);
    CHECK(symmetric_f(hc, 2, 1) == doctest::Approx(0.25));
    const long double ref = 5.0L * std::pow(1.1L / 3.0L, 3);
    CHECK(symmetric_f({0.1, 2, 5}, 3, 1) == doctest::Approx(static_cast<double>(ref)).epsilon(1e-14));
    CHECK(symmetric_f({0.1, 2, 5}, 3, 1) == doctest::Approx(0.2464814814814815).epsilon(1e-14));
    CHECK_THROWS_AS(symmetric_f(hc, 0, 1), InvalidArgument);
    CHECK(log_symmetric_f({0.1, 2, 5}, 3, 1) == doctest::Approx(std::log(static_cast<double>(ref))));
}

TEST_CASE("potential") {
    CHECK(potential_phi({0, 1, 1}, 1) == doctest::Approx(1 / std::sqrt(2.0)));
    CHECK(potential_phi({0.5, 2, 1}, 2) == doctest::Approx(0.25));
    const long double ref = 1.0L / std::sqrt(0.7L * (0.3L * 0.7L + 1) * (0.7L + 1.5L));
    CHECK(potential_phi({0.3, 1.5, 1}, 0.7) == doctest::Approx(static_cast<double>(ref)).epsilon(1e-14));
    CHECK(potential_phi({0.3, 1.5, 1}, 0.7) == doctest::Approx(0.732).epsilon(1e-3));
    CHECK_THROWS_AS(potential_phi({0, 1, 1}, 0), DomainError);
    CHECK_THROWS_AS(potential_phi({0, 1, 1}, -1), DomainError);
    CHECK_THROWS_AS(potential_phi({0, 1, 1}, INFINITY), DomainError);
}

TEST_CASE("alpha examples") {
    const SpinSystem hc{0, 1, 1};
    CHECK(alpha(hc, {}) == 0.0);
    const std::vector<double> zeros{0, 0, 0};
    CHECK(alpha(hc, zeros) == 0.0);
    const std::vector<double> one{1.0};
    CHECK(alpha(hc, one) == doctest::Approx(static_cast<double>(alpha_reference(hc, one))).epsilon(1e-14));
    CHECK(alpha(hc, one) == doctest::Approx(0.408).epsilon(1e-3));
    CHECK(alpha_sym(hc, 3, 0) == 0.0);
}

TEST_CASE("alpha at the fixed point and at its maximizer") {
    const SpinSystem hc{0, 1, 1};
    const FixedPointResult fp = fixed_point(hc, 2);
    // x (1 + x)^2 = 1
    CHECK(fp.x_hat == doctest::Approx(0.46557123187676802).epsilon(1e-12));
    // at x = f(x) the two square-root factors coincide
    CHECK(alpha_sym(hc, 2, fp.x_hat) == doctest::Approx(fp.derivative_abs).epsilon(1e-12));

    Rng rng(9);
    for (int trial = 0; trial < 200; ++trial) {
        const SpinSystem s = classify(random_af_system(rng)).normalized;
        const int d = uniform_int(rng, 1, 8);
        const FixedPointResult f = fixed_point(s, d);
        CHECK(alpha_sym(s, d, f.x_hat) == doctest::Approx(f.derivative_abs).epsilon(1e-9));
        CHECK(alpha_tilde(s, d, f.x_hat) == doctest::Approx(std::sqrt(f.derivative_abs)).epsilon(1e-9));
        const double xd = alpha_maximizer(s, d);
        if (std::abs(s.gamma - s.beta * xd * xd) > 1e-6 && std::abs(s.gamma - s.beta * std::pow(symmetric_f(s, d, xd), 2)) > 1e-6)
            CHECK(alpha_tilde(s, d, xd) == doctest::Approx(alpha_sym(s, d, xd)).epsilon(1e-7));
    }
}

TEST_CASE("property: recursion is monotone and in range") {
    Rng rng(1);
    for (int trial = 0; trial < 2000; ++trial) {
        SpinSystem s = random_af_system(rng);
        s = classify(s).normalized;
        const int d = uniform_int(rng, 1, 8);
        std::vector<ExtendedRatio> kids;
        for (int i = 0; i < d; ++i) kids.push_back(ExtendedRatio::finite(uniform(rng, 0, 10)));
        const double lv = uniform(rng, 0.1, 5);
        const ExtendedRatio base = recursion_f(s, lv, kids);
        CHECK(base.value() >= lv * std::pow(s.beta, d) * (1 - 1e-12));
        CHECK(base.value() <= lv * std::pow(s.gamma, -d) * (1 + 1e-12));
        const std::size_t i = static_cast<std::size_t>(uniform_int(rng, 0, d - 1));
        auto bumped = kids;
        bumped[i] = ExtendedRatio::finite(kids[i].value() + uniform(rng, 0, 5));
        CHECK(recursion_f(s, lv, bumped).value() <= base.value() * (1 + 1e-12));
        bumped[i] = ExtendedRatio::infinity();
        CHECK(recursion_f(s, lv, bumped).value() <= base.value() * (1 + 1e-12));
    }
}

TEST_CASE("property: alpha bounds and symmetric identity") {
    Rng rng(2);
    for (int trial = 0; trial < 2000; ++trial) {
        const SpinSystem s = classify(random_af_system(rng)).normalized;
        const int d = uniform_int(rng, 1, 10);
        std::vector<double> xs;
        for (int i = 0; i < d; ++i) xs.push_back(uniform(rng, 0, 8));
        const double a = alpha(s, xs);
        CHECK(a == doctest::Approx(static_cast<double>(alpha_reference(s, xs))).epsilon(1e-12));
        CHECK(a <= d * (1 + 1e-12));
        CHECK(a <= d * std::sqrt(s.lambda / std::pow(s.gamma, d + 1)) * (1 + 1e-12));
        const double x = xs[0];
        CHECK(alpha_sym(s, d, x) == doctest::Approx(alpha(s, std::vector<double>(static_cast<std::size_t>(d), x))).epsilon(1e-12));
        // single child contracts
        const double one[] = {x};
        CHECK(alpha(s, one) < 1.0);
    }
}

TEST_CASE("property: symmetrization dominance") {
    Rng rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        const SpinSystem s = classify(random_af_system(rng)).normalized;
        const int d = uniform_int(rng, 2, 6);
        const double top = 10.0 * std::max(1.0, s.lambda / std::pow(s.gamma, d) + fixed_point(s, d).x_hat);
        double grid_max = 0;
        for (int k = 0; k <= 4000; ++k) grid_max = std::max(grid_max, alpha_sym(s, d, top * k / 4000.0));
        grid_max = std::max(grid_max, max_alpha_at_degree(s, d));
        for (int i = 0; i < 20; ++i) {
            std::vector<double> xs;
            for (int j = 0; j < d; ++j) xs.push_back(uniform(rng, 0, top));
            CHECK(alpha(s, xs) <= grid_max + 1e-9);
        }
    }
}

TEST_CASE("property: edge factor tends to beta") {
    Rng rng(4);
    for (int trial = 0; trial < 500; ++trial) {
        const SpinSystem s = classify(random_af_system(rng)).normalized;
        const double near = edge_factor(s, ExtendedRatio::finite(1e9));
        CHECK(std::abs(near - s.beta) < 1e-6 * (1 + s.beta));
        const double mid = edge_factor(s, ExtendedRatio::finite(1e3));
        CHECK(std::abs(mid - s.beta) >= std::abs(near - s.beta));
    }
}
