#include "doctest.h"

#include <cmath>
#include <numbers>

#include "rieszgas/energy.hpp"
#include "rieszgas/measures.hpp"

using namespace rieszgas;

namespace {
constexpr double kPi = std::numbers::pi;

DensityMeasure uniform_ball_density(const Grid& g, double radius) {
    std::vector<double> v(static_cast<size_t>(g.size()), 0.0);
    for (std::int64_t i = 0; i < g.size(); ++i)
        if (norm(g.center(i), g.d) <= radius) v[static_cast<size_t>(i)] = 1.0;
    return normalized_density(g, std::move(v));
}
}  // namespace

TEST_CASE("empirical measure") {
    ParticleConfiguration X1{2, {{0, 0, 0}}};
    auto e1 = empirical_measure(X1);
    REQUIRE(e1.size() == 1);
    CHECK(e1.weights[0] == 1.0);

    ParticleConfiguration X{2, {}};
    for (int i = 0; i < 100; ++i)
        X.points.push_back({0.01 * i, 0.003 * i * i, 0});
    auto e = empirical_measure(X);
    CHECK(e.total_mass() == doctest::Approx(1.0).epsilon(1e-14));

    // int f d emp equals the direct average for f = |x|^2
    double via_measure = 0;
    for (size_t i = 0; i < e.size(); ++i) {
        double r = norm(e.support[i], 2);
        via_measure += e.weights[i] * r * r;
    }
    double direct = 0;
    for (const auto& p : X.points) direct += norm(p, 2) * norm(p, 2);
    direct /= X.n();
    CHECK(via_measure == doctest::Approx(direct).epsilon(1e-14));

    ParticleConfiguration bad{1, {{0.5, 0, 0}, {0.5, 0, 0}}};
    CHECK_THROWS(empirical_measure(bad));
}

TEST_CASE("potential field is linear") {
    auto spec = KernelSpec::riesz(1, 0.25);
    Grid g(1, -2, 2, 128);
    PotentialOperator op(spec, g);
    std::vector<double> u(static_cast<size_t>(g.size())), v(static_cast<size_t>(g.size()));
    for (std::int64_t i = 0; i < g.size(); ++i) {
        Point p = g.center(i);
        u[static_cast<size_t>(i)] = std::exp(-4 * p[0] * p[0]);
        v[static_cast<size_t>(i)] = std::cos(p[0]);
    }
    auto hu = op.apply(u), hv = op.apply(v);
    std::vector<double> w(static_cast<size_t>(g.size()));
    const double a = 2.5, b = -0.75;
    for (size_t i = 0; i < w.size(); ++i) w[i] = a * u[i] + b * v[i];
    auto hw = op.apply(w);
    for (std::int64_t i = 0; i < g.size(); i += 17)
        CHECK(hw[i] == doctest::Approx(a * hu[i] + b * hv[i]).epsilon(1e-12));
}

TEST_CASE("potential of a uniform Coulomb ball matches the kernel outside") {
    auto spec = KernelSpec::coulomb(3);
    Grid g(3, -2, 2, 64);
    auto mu = uniform_ball_density(g, 0.5);
    auto h = potential_field(mu, spec);
    // Outside a radial unit-mass distribution the potential equals g (shell
    // theorem for the Coulomb kernel).
    for (std::int64_t i = 0; i < g.size(); ++i) {
        Point p = g.center(i);
        double r = norm(p, 3);
        if (r < 1.0 || r > 1.6) continue;
        if (i % 23 != 0) continue;
        CHECK(h[i] == doctest::Approx(eval_kernel(spec, p)).epsilon(0.005));
    }
}

TEST_CASE("potential far field approaches the kernel") {
    auto spec = KernelSpec::riesz(1, 0.25);
    Grid g(1, -8, 8, 256);
    std::vector<double> v(static_cast<size_t>(g.size()), 0.0);
    for (std::int64_t i = 0; i < g.size(); ++i) {
        Point p = g.center(i);
        if (std::abs(p[0]) <= 0.2) v[static_cast<size_t>(i)] = 1.0 + p[0];  // diam 0.4
    }
    auto mu = normalized_density(g, std::move(v));
    auto h = potential_field(mu, spec);
    // direct summation oracle + ratio to g at |x| >= 10 diam
    for (double x : {4.0, 5.5, 7.0}) {
        Point p{x, 0, 0};
        double direct = 0;
        for (std::int64_t i = 0; i < g.size(); ++i) {
            double m = mu.values[static_cast<size_t>(i)] * g.cell_volume();
            if (m > 0) direct += m * eval_kernel(spec, sub(p, g.center(i)));
        }
        double interp = h.interpolate(p);
        CHECK(interp == doctest::Approx(direct).epsilon(1e-3));
        double ratio = interp / eval_kernel(spec, p);
        CHECK(ratio > 0.99);
        CHECK(ratio < 1.01);
    }
}

TEST_CASE("entropy closed forms") {
    SUBCASE("uniform on a unit-volume box") {
        Grid g(1, -1, 1, 64);
        std::vector<double> v(64, 0.0);
        for (int i = 16; i < 48; ++i) v[static_cast<size_t>(i)] = 1.0;  // middle half: volume 1
        DensityMeasure mu(g, v);
        mu.validate();
        CHECK(entropy(mu) == doctest::Approx(0.0));
    }
    SUBCASE("uniform on a volume-2^d box") {
        Grid g(2, -1, 1, 32);
        std::vector<double> v(static_cast<size_t>(32 * 32), 0.25);
        DensityMeasure mu(g, v);
        mu.validate();
        CHECK(entropy(mu) == doctest::Approx(-2 * std::log(2.0)).epsilon(1e-12));
    }
    SUBCASE("truncated Gaussian vs quadrature oracle") {
        const double sigma = 0.6;
        Grid g(1, -4, 4, 1024);
        std::vector<double> v(static_cast<size_t>(g.size()));
        for (std::int64_t i = 0; i < g.size(); ++i) {
            double x = g.center(i)[0];
            v[static_cast<size_t>(i)] = std::exp(-x * x / (2 * sigma * sigma));
        }
        auto mu = normalized_density(g, std::move(v));
        // composite Simpson oracle on the continuum-normalized density
        const int q = 20001;
        double hq = 8.0 / (q - 1);
        double z = 0;
        auto f = [&](double x) { return std::exp(-x * x / (2 * sigma * sigma)); };
        for (int i = 0; i < q; ++i) {
            double w = (i == 0 || i == q - 1) ? 1 : (i % 2 ? 4 : 2);
            z += w * f(-4 + i * hq);
        }
        z *= hq / 3;
        double oracle = 0;
        for (int i = 0; i < q; ++i) {
            double w = (i == 0 || i == q - 1) ? 1 : (i % 2 ? 4 : 2);
            double den = f(-4 + i * hq) / z;
            if (den > 0) oracle += w * den * std::log(den);
        }
        oracle *= hq / 3;
        CHECK(entropy(mu) == doctest::Approx(oracle).epsilon(1e-4));
    }
}

TEST_CASE("smear_ball") {
    Grid g(2, -1, 1, 128);
    SignedDiscreteMeasure nu;
    nu.d = 2;
    nu.support = {{0.1, -0.2, 0}, {-0.3, 0.25, 0}};
    nu.weights = {0.7, 0.3};
    const double eta = 0.15;
    auto field = smear_ball(nu, eta, g);

    SUBCASE("mass preserved") {
        CHECK(integral(field) == doctest::Approx(1.0).epsilon(1e-10));
    }
    SUBCASE("single atom: uniform value on the ball") {
        SignedDiscreteMeasure one;
        one.d = 2;
        one.support = {{0, 0, 0}};
        one.weights = {1.0};
        auto f1 = smear_ball(one, eta, g);
        double expect = 1.0 / (kPi * eta * eta);
        // away from the rasterized rim the value is the uniform density
        for (std::int64_t i = 0; i < g.size(); ++i) {
            if (norm(g.center(i), 2) < 0.6 * eta)
                CHECK(f1[i] == doctest::Approx(expect).epsilon(0.02));
        }
    }
    SUBCASE("weak convergence rate against a Hoelder test function") {
        // |f(x)-f(y)| <= |x-y|^alpha with alpha=1/2 and seminorm 1
        const double alpha = 0.5;
        auto f = [](const Point& p) { return std::sqrt(dist(p, Point{0.05, -0.1, 0}, 2)); };
        for (double e : {0.05, 0.1, 0.2}) {
            auto fld = smear_ball(nu, e, g);
            double smeared = 0;
            for (std::int64_t i = 0; i < g.size(); ++i)
                smeared += fld[i] * f(g.center(i)) * g.cell_volume();
            double atomic = 0;
            for (size_t k = 0; k < nu.size(); ++k) atomic += nu.weights[k] * f(nu.support[k]);
            CHECK(std::abs(smeared - atomic) <= std::pow(e, alpha) + 5e-3);
        }
    }
}

TEST_CASE("smear_sphere") {
    SUBCASE("d=1 endpoints") {
        ParticleConfiguration X{1, {{0, 0, 0}}};
        auto nu = smear_sphere(X, {0.5}, 0.1);
        REQUIRE(nu.size() == 2);
        CHECK(nu.support[0][0] == doctest::Approx(0.5));
        CHECK(nu.support[1][0] == doctest::Approx(-0.5));
        CHECK(nu.weights[0] == doctest::Approx(0.5));
        CHECK(nu.total_mass() == doctest::Approx(1.0));
    }
    SUBCASE("total mass 1 for any N") {
        ParticleConfiguration X{2, {}};
        for (int i = 0; i < 17; ++i) X.points.push_back({0.1 * i, 0.05 * i, 0});
        std::vector<double> etas(17, 0.02);
        auto nu = smear_sphere(X, etas, 0.01);
        CHECK(nu.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("Coulomb d=3: two smeared atoms interact like points") {
        auto spec = KernelSpec::coulomb(3);
        ParticleConfiguration X{3, {{0, 0, 0}, {1.0, 0, 0}}};
        const double eta = 0.05;
        auto nu = smear_sphere(X, {eta, eta}, eta / 16);  // Q = 128 per sphere
        // cross energy between the two smeared clouds
        size_t q = nu.size() / 2;
        double cross = 0;
        for (size_t i = 0; i < q; ++i)
            for (size_t j = q; j < nu.size(); ++j)
                cross += eval_kernel(spec, sub(nu.support[i], nu.support[j]));
        cross /= static_cast<double>(q * q);
        // shell theorem: each sphere acts as a point charge at distance 1
        CHECK(cross == doctest::Approx(eval_kernel(spec, Point{1, 0, 0})).epsilon(1e-6));
    }
}

TEST_CASE("quantize") {
    Grid g(1, -1, 1, 64);
    std::vector<double> v(64);
    for (int i = 0; i < 64; ++i) v[static_cast<size_t>(i)] = std::sin(0.2 * i);
    auto nu = quantize(g, v);
    double direct = 0;
    for (double x : v) direct += x * g.cell_volume();
    CHECK(nu.total_mass() == doctest::Approx(direct).epsilon(1e-12));

    auto thin = quantize(g, v, 16);
    CHECK(thin.size() == 16);
    CHECK(thin.total_mass() == doctest::Approx(direct).epsilon(1e-12));
}
