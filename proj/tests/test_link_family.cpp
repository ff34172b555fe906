#include <doctest.h>

#include <cmath>
#include <random>

#include "aolink/link_family.hpp"

using namespace aolink;

namespace {

double rel_err(double got, double want) {
    return std::abs(got - want) / std::abs(want);
}

}  // namespace

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(TransformParam(-0.1), std::domain_error);
    CHECK_THROWS_AS(TransformParam(1.5), std::domain_error);
    CHECK_THROWS_AS(TransformParam(std::nan("")), std::domain_error);
    CHECK_NOTHROW(TransformParam(0.0));
    CHECK_NOTHROW(TransformParam(1.0));

    CHECK_THROWS_AS(Probability(0.0), std::domain_error);
    CHECK_THROWS_AS(Probability(1.0), std::domain_error);
    CHECK_THROWS_AS(Probability(-0.2), std::domain_error);
    CHECK_NOTHROW(Probability(1e-15));
}

TEST_CASE("w_transform reference values") {
    // lambda=1 is the odds transform; theta=0.5 gives odds 1
    CHECK(w_transform(Probability(0.5), TransformParam(1)) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(w_transform(Probability(0.5), TransformParam(0)) ==
          doctest::Approx(0.69314718055994531).epsilon(1e-14));
    // 2*((0.75)^(-1/2) - 1)
    CHECK(w_transform(Probability(0.25), TransformParam(0.5)) ==
          doctest::Approx(0.30940107675850306).epsilon(1e-14));
}

TEST_CASE("w_inverse reference values and domain") {
    CHECK(w_inverse(1.0, TransformParam(1)).value() == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(w_inverse(0.69314718055994531, TransformParam(0)).value() ==
          doctest::Approx(0.5).epsilon(1e-14));
    CHECK(w_inverse(0.30940107675850306, TransformParam(0.5)).value() ==
          doctest::Approx(0.25).epsilon(1e-14));
    CHECK_THROWS_AS(w_inverse(0.0, TransformParam(0.5)), std::domain_error);
    CHECK_THROWS_AS(w_inverse(-1.0, TransformParam(0.5)), std::domain_error);
}

TEST_CASE("link reference values") {
    CHECK(link(Probability(0.5), TransformParam(1)) == doctest::Approx(0.0).epsilon(1e-14));
    // cloglog link is zero where -log(1-theta) = 1
    CHECK(link(Probability(1.0 - std::exp(-1.0)), TransformParam(0)) ==
          doctest::Approx(0.0).epsilon(1e-12));
    CHECK(link(Probability(0.25), TransformParam(0.5)) ==
          doctest::Approx(-1.1731168606989262).epsilon(1e-14));
}

TEST_CASE("inverse_link reference values and saturation") {
    CHECK(inverse_link(0.0, TransformParam(1)).value() == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(inverse_link(0.0, TransformParam(0)).value() ==
          doctest::Approx(0.63212055882855768).epsilon(1e-14));
    for (double lambda : {0.0, 0.3, 1.0}) {
        CHECK(inverse_link(-800.0, TransformParam(lambda)).value() == kMeanClamp);
        CHECK(inverse_link(800.0, TransformParam(lambda)).value() == 1.0 - kMeanClamp);
    }
}

TEST_CASE("dmu_deta reference values") {
    CHECK(dmu_deta(0.0, TransformParam(1)) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(dmu_deta(0.0, TransformParam(0)) ==
          doctest::Approx(0.36787944117144233).epsilon(1e-14));
}

TEST_CASE("dmu_deta matches finite differences of inverse_link") {
    const double h = 1e-6;
    int checked = 0;
    for (double lambda : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        const TransformParam lp(lambda);
        for (double eta = -10.0; eta <= 10.0; eta += 0.5) {
            const double mu = inverse_link(eta, lp).value();
            // near saturation the clamp flattens the curve and the central
            // difference loses all significant digits; skip those points
            if (mu < 1e-6 || mu > 1.0 - 1e-4) continue;
            const double num = (inverse_link(eta + h, lp).value() -
                                inverse_link(eta - h, lp).value()) /
                               (2.0 * h);
            const double ana = dmu_deta(eta, lp);
            CHECK(rel_err(ana, num) < 1e-6);
            CHECK(ana > 0.0);
            ++checked;
        }
    }
    CHECK(checked > 100);
}

TEST_CASE("round trip w_inverse(w_transform(theta))") {
    std::mt19937_64 rng(20240817);
    std::uniform_real_distribution<double> utheta(1e-12, 1.0 - 1e-12);
    std::uniform_real_distribution<double> ulam(0.0, 1.0);
    for (int i = 0; i < 2000; ++i) {
        const double theta = utheta(rng);
        const double lambda = i % 10 == 0 ? 0.0 : ulam(rng);
        const TransformParam lp(lambda);
        const double back = w_inverse(w_transform(Probability(theta), lp), lp).value();
        CHECK(std::abs(back - theta) < 1e-12);
    }
}

TEST_CASE("continuity across lambda -> 0") {
    for (double theta = 0.01; theta < 0.995; theta += 0.01) {
        const double w_small = w_transform(Probability(theta), TransformParam(1e-8));
        const double w_zero = w_transform(Probability(theta), TransformParam(0));
        CHECK(std::abs(w_small - w_zero) / w_zero < 1e-6);
    }
}

TEST_CASE("strict monotonicity in theta") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(1e-6, 1.0 - 1e-6);
    for (int i = 0; i < 1000; ++i) {
        double t1 = u(rng), t2 = u(rng);
        if (t1 == t2) continue;
        if (t1 > t2) std::swap(t1, t2);
        const TransformParam lp(i % 7 == 0 ? 0.0 : u(rng));
        CHECK(w_transform(Probability(t1), lp) < w_transform(Probability(t2), lp));
    }
}

TEST_CASE("convexity of W_lambda") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(1e-4, 1.0 - 1e-4);
    for (int i = 0; i < 2000; ++i) {
        const double t1 = u(rng), t2 = u(rng), t = u(rng);
        const TransformParam lp(i % 5 == 0 ? 0.0 : u(rng));
        const double mid = w_transform(Probability(t * t1 + (1 - t) * t2), lp);
        const double chord = t * w_transform(Probability(t1), lp) +
                             (1 - t) * w_transform(Probability(t2), lp);
        CHECK(mid <= chord + 1e-12);
    }
}

TEST_CASE("closed forms at lambda 0 and 1") {
    for (double theta = 0.005; theta < 1.0; theta += 0.005) {
        const Probability p(theta);
        CHECK(w_transform(p, TransformParam(1)) ==
              doctest::Approx(theta / (1.0 - theta)).epsilon(1e-14));
        CHECK(w_transform(p, TransformParam(0)) ==
              doctest::Approx(-std::log(1.0 - theta)).epsilon(1e-13));
    }
}

TEST_CASE("link is strictly increasing in theta") {
    for (double lambda : {0.0, 0.4, 1.0}) {
        const TransformParam lp(lambda);
        double prev = link(Probability(0.001), lp);
        for (double theta = 0.006; theta < 1.0; theta += 0.005) {
            const double cur = link(Probability(theta), lp);
            CHECK(cur > prev);
            prev = cur;
        }
    }
}
