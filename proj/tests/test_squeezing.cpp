#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"

#include "magnon/errors.hpp"
#include "magnon/squeezing.hpp"

using namespace magnon;

namespace {

constexpr double thz = 2e12 * std::numbers::pi;
constexpr double pi = std::numbers::pi;

HopfieldParams random_normal(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> w(0.2, 2.0), u(-1, 1);
    for (;;) {
        HopfieldParams hp{w(rng) * thz, w(rng) * thz, 0, 0};
        const double s = std::sqrt(hp.omega_a * hp.omega_b);
        hp.g1 = u(rng) * 0.5 * s;
        hp.g2 = u(rng) * 0.5 * s;
        if (phase_boundary(hp) == Phase::normal && std::abs(hp.omega_a - hp.omega_b) > 1e-3 * thz) return hp;
    }
}

// brute-force minimum over a dense (chi, psi, phi) grid
double grid_minimum(const BogoliubovModes& m, int n)
{
    double best = 1e300;
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                best = std::min(best, quadrature_variance(m, SqueezingQuery::from_angles(0.5 * pi * i / n,
                                                                                         2 * pi * j / n, pi * k / n)));
    return best;
}

} // namespace

TEST_CASE("decoupled vacuum sits at the standard quantum limit")
{
    const BogoliubovModes m = bogoliubov_transform({0.6 * thz, 0.9 * thz, 0, 0});
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0, 2 * pi);
    for (int k = 0; k < 20; ++k)
        CHECK(quadrature_variance(m, SqueezingQuery::from_angles(u(rng), u(rng), u(rng) / 2)) ==
              doctest::Approx(0.25).epsilon(1e-12));
    const SqueezingResult r = minimize_variance(m);
    CHECK(std::abs(r.suppression_db) < 1e-10);
    CHECK(r.orthogonal_variance == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("optimizer beats a dense brute-force grid")
{
    std::mt19937_64 rng(2);
    for (int k = 0; k < 10; ++k) {
        const BogoliubovModes m = bogoliubov_transform(random_normal(rng));
        const SqueezingResult r = minimize_variance(m);
        CHECK(r.min_variance <= grid_minimum(m, 40) + 1e-12);
        CHECK(quadrature_variance(m, r.optimal) == doctest::Approx(r.min_variance).epsilon(1e-9));
        CHECK(r.min_variance <= 0.25 + 1e-12);
        CHECK(r.min_variance > 0);
    }
}

TEST_CASE("Heisenberg bound for conjugate quadratures")
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0, 2 * pi);
    for (int k = 0; k < 50; ++k) {
        const BogoliubovModes m = bogoliubov_transform(random_normal(rng));
        const SqueezingResult r = minimize_variance(m);
        SqueezingQuery conj = r.optimal;
        conj.phi += pi / 2;
        CHECK(r.min_variance * quadrature_variance(m, conj) >= 1.0 / 16 - 1e-10);
        const SqueezingQuery q = SqueezingQuery::from_angles(u(rng), u(rng), u(rng));
        SqueezingQuery q2 = q;
        q2.phi += pi / 2;
        CHECK(quadrature_variance(m, q) * quadrature_variance(m, q2) >= 1.0 / 16 - 1e-10);
    }
}

TEST_CASE("variance is pi-periodic in phi")
{
    std::mt19937_64 rng(4);
    const BogoliubovModes m = bogoliubov_transform(random_normal(rng));
    SqueezingQuery q = SqueezingQuery::from_angles(0.4, 1.1, 0.3);
    const double v = quadrature_variance(m, q);
    q.phi += pi;
    CHECK(quadrature_variance(m, q) == doctest::Approx(v).epsilon(1e-12));
}

TEST_CASE("orthogonal operator")
{
    std::mt19937_64 rng(5);
    const BogoliubovModes m = bogoliubov_transform(random_normal(rng));
    const SqueezingResult r = minimize_variance(m);
    const OrthogonalResult o = orthogonal_squeezing(m, r.optimal);
    // d = conj(beta) a - alpha b, checked by explicit phi scan
    SqueezingQuery d;
    d.alpha = std::abs(r.optimal.beta);
    d.beta = -r.optimal.alpha * std::polar(1.0, std::arg(r.optimal.beta));
    double best = 1e300;
    for (int k = 0; k < 20000; ++k) {
        d.phi = pi * k / 20000;
        best = std::min(best, quadrature_variance(m, d));
    }
    CHECK(o.variance == doctest::Approx(best).epsilon(1e-6));
    CHECK(o.variance >= r.min_variance - 1e-12);
}

TEST_CASE("query validation")
{
    const BogoliubovModes m = bogoliubov_transform({0.6 * thz, 0.9 * thz, 0, 0});
    SqueezingQuery q;
    q.alpha = 0.9;
    q.beta = 0.9;
    CHECK_THROWS_AS(quadrature_variance(m, q), PreconditionError);
}

TEST_CASE("dB convention")
{
    CHECK(to_db(0.25) == 0);
    CHECK(to_db(0.025) == doctest::Approx(10));
}
