#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>

#include "doctest.h"

#include "magnon/errors.hpp"
#include "magnon/fock_oracle.hpp"

using namespace magnon;

namespace {

constexpr double thz = 2e12 * std::numbers::pi;

HopfieldParams random_moderate(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> w(0.3, 1.5), u(-1, 1);
    for (;;) {
        HopfieldParams hp{w(rng) * thz, w(rng) * thz, 0, 0};
        const double s = std::sqrt(hp.omega_a * hp.omega_b);
        hp.g1 = u(rng) * 0.3 * s;
        hp.g2 = u(rng) * 0.3 * s;
        if (std::abs(hp.omega_a - hp.omega_b) > 0.01 * thz) return hp;
    }
}

} // namespace

TEST_CASE("Hamiltonian is symmetric")
{
    const Eigen::MatrixXd h = fock_hamiltonian({0.7 * thz, 0.5 * thz, 0.1 * thz, -0.2 * thz}, 12, thz);
    CHECK((h - h.transpose()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("banded solver agrees with a dense eigensolve")
{
    std::mt19937_64 rng(1);
    for (int k = 0; k < 5; ++k) {
        const HopfieldParams hp = random_moderate(rng);
        const int n = 16;
        const double scale = std::max(hp.omega_a, hp.omega_b);
        const Eigen::VectorXd e = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(fock_hamiltonian(hp, n, scale)).eigenvalues();
        const FockResult r = build_and_diagonalize(hp, n);
        CHECK(r.ground_energy / scale == doctest::Approx(e(0)).epsilon(1e-10));
        CHECK(r.gap_lower / scale == doctest::Approx(e(1) - e(0)).epsilon(1e-8));
        CHECK(r.ground.amplitudes.norm() == doctest::Approx(1).epsilon(1e-12));
    }
}

TEST_CASE("decoupled gaps are exact at any cutoff")
{
    const HopfieldParams hp{0.8 * thz, 0.5 * thz, 0, 0};
    for (int n : {10, 20}) {
        const FockResult r = build_and_diagonalize(hp, n);
        CHECK(r.gap_lower == doctest::Approx(0.5 * thz).epsilon(1e-12));
        CHECK(r.gap_upper == doctest::Approx(0.8 * thz).epsilon(1e-12));
        CHECK(std::abs(r.ground.amplitudes(0) - 1) < 1e-12);
        CHECK(oracle_min_variance(r.ground) == doctest::Approx(0.25).epsilon(1e-12));
    }
}

TEST_CASE("gaps and variances match the analytic route")
{
    std::mt19937_64 rng(2);
    for (int k = 0; k < 5; ++k) {
        const HopfieldParams hp = random_moderate(rng);
        const TruncatedSpace ts = converge(hp, 40);
        REQUIRE(ts.convergence_report.converged);
        const auto [lo, up] = coupled_eigenfrequencies(hp);
        CHECK(ts.result.gap_lower == doctest::Approx(lo).epsilon(1e-6));
        CHECK(ts.result.gap_upper == doctest::Approx(up).epsilon(1e-6));
        const BogoliubovModes m = bogoliubov_transform(hp);
        const SqueezingResult s = minimize_variance(m);
        CHECK(std::abs(oracle_min_variance(ts.result.ground) - s.min_variance) < 1e-6);
        CHECK(std::abs(oracle_variance(ts.result.ground, s.optimal) - s.min_variance) < 1e-6);
        const SqueezingQuery q = SqueezingQuery::from_angles(0.7, 2.0, 1.2);
        CHECK(std::abs(oracle_variance(ts.result.ground, q) - quadrature_variance(m, q)) < 1e-6);
        if (hp.g2 != 0) CHECK(std::abs(ts.result.ground.amplitudes(0)) < 1);
    }
}

TEST_CASE("near-critical parameters report slow convergence")
{
    HopfieldParams hp{0.6 * thz, 0.8 * thz, 0, 0};
    hp.g1 = hp.g2 = 0.4999 * std::sqrt(hp.omega_a * hp.omega_b);
    const TruncatedSpace ts = converge(hp, 30);
    CHECK_FALSE(ts.convergence_report.converged);
}

TEST_CASE("guards")
{
    const HopfieldParams hp{0.6 * thz, 0.8 * thz, 0, 0};
    CHECK_THROWS_AS(build_and_diagonalize(hp, 5), PreconditionError);
    CHECK_THROWS_AS(build_and_diagonalize(hp, 121), PreconditionError);
    HopfieldParams bad = hp;
    bad.g2 = thz;
    CHECK_THROWS_AS(build_and_diagonalize(bad, 20), SoftModeError);
}
