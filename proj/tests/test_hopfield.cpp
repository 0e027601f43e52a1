#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>

#include "doctest.h"

#include "magnon/errors.hpp"
#include "magnon/hopfield.hpp"

using namespace magnon;
using cd = std::complex<double>;

namespace {

constexpr double thz = 2e12 * std::numbers::pi;

MaterialParams reference()
{
    MaterialParams p;
    p.exchange_field = 641.84;
    p.dm_field = 13.855;
    p.anisotropy_a = 0.0861;
    p.anisotropy_c = 0.04057;
    return p;
}

// positive normal-mode frequencies of the classical amplitude equations
//   i da/dt = wa a - i g1 b + i g2 b*,   i db/dt = wb b + i g1 a + i g2 a*
Eigen::Vector2d amplitude_equation_frequencies(const HopfieldParams& hp)
{
    const cd i(0, 1);
    Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero(); // i d/dt (a, b, a*, b*) = m (a, b, a*, b*)
    m(0, 0) = hp.omega_a;
    m(0, 1) = -i * hp.g1;
    m(0, 3) = i * hp.g2;
    m(1, 1) = hp.omega_b;
    m(1, 0) = i * hp.g1;
    m(1, 2) = i * hp.g2;
    // conjugate rows: i d/dt a* = -(conj of the a equation)
    m(2, 2) = -hp.omega_a;
    m(2, 3) = -i * hp.g1;
    m(2, 1) = i * hp.g2;
    m(3, 3) = -hp.omega_b;
    m(3, 2) = i * hp.g1;
    m(3, 0) = i * hp.g2;
    Eigen::Vector4cd ev = Eigen::ComplexEigenSolver<Eigen::Matrix4cd>(m, false).eigenvalues();
    std::vector<double> pos;
    for (int k = 0; k < 4; ++k)
        if (ev(k).real() > 0) pos.push_back(ev(k).real());
    std::sort(pos.begin(), pos.end());
    REQUIRE(pos.size() == 2);
    return {pos[0], pos[1]};
}

HopfieldParams random_normal(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> w(0.2, 2.0), u(-1, 1);
    for (;;) {
        HopfieldParams hp{w(rng) * thz, w(rng) * thz, 0, 0};
        const double s = std::sqrt(hp.omega_a * hp.omega_b);
        hp.g1 = u(rng) * s;
        hp.g2 = u(rng) * 0.6 * s;
        if (phase_boundary(hp) == Phase::normal && std::abs(hp.omega_a - hp.omega_b) > 1e-3 * thz) return hp;
    }
}

Eigen::Matrix4cd metric()
{
    return Eigen::Vector4cd(1, 1, -1, -1).asDiagonal();
}

} // namespace

TEST_CASE("closed-form eigenfrequencies match the amplitude equations")
{
    std::mt19937_64 rng(5);
    for (int k = 0; k < 200; ++k) {
        const HopfieldParams hp = random_normal(rng);
        const auto [lo, up] = coupled_eigenfrequencies(hp);
        const Eigen::Vector2d ref = amplitude_equation_frequencies(hp);
        CHECK(lo == doctest::Approx(ref(0)).epsilon(1e-8));
        CHECK(up == doctest::Approx(ref(1)).epsilon(1e-10));
    }
}

TEST_CASE("decoupled limit")
{
    const HopfieldParams hp{0.7 * thz, 0.4 * thz, 0, 0};
    const auto [lo, up] = coupled_eigenfrequencies(hp);
    CHECK(lo == doctest::Approx(0.4 * thz).epsilon(1e-14));
    CHECK(up == doctest::Approx(0.7 * thz).epsilon(1e-14));
    const auto w = mode_weights(bogoliubov_transform(hp));
    CHECK(w[0].x == doctest::Approx(1));
    CHECK(w[0].w + w[0].y + w[0].z < 1e-20);
    CHECK(w[1].w == doctest::Approx(1));
    CHECK(w[1].x + w[1].y + w[1].z < 1e-20);
    CHECK(phase_boundary(hp) == Phase::normal);
}

TEST_CASE("Bogoliubov transform is symplectic and invertible")
{
    std::mt19937_64 rng(6);
    const Eigen::Matrix4cd eta = metric();
    for (int k = 0; k < 200; ++k) {
        const HopfieldParams hp = random_normal(rng);
        const BogoliubovModes m = bogoliubov_transform(hp);
        const Eigen::Matrix4cd t = m.transform();
        CHECK((t * eta * t.adjoint() - eta).norm() < 1e-10);
        CHECK((m.inverse() * t - Eigen::Matrix4cd::Identity()).norm() < 1e-10);
        for (const auto& w : mode_weights(m)) CHECK(w.w + w.x - w.y - w.z == doctest::Approx(1).epsilon(1e-10));
        // phase convention
        CHECK(std::abs(m.lower(0).imag()) < 1e-12);
        CHECK(m.lower(0).real() >= 0);
        CHECK(std::abs(m.upper(1).imag()) < 1e-12);
    }
}

TEST_CASE("transformed Hamiltonian is diagonal")
{
    // H = sum h_ij alpha_i alpha_j in (a, b, a+, b+); in the mode basis only B+B terms survive
    std::mt19937_64 rng(8);
    const cd i(0, 1);
    for (int k = 0; k < 50; ++k) {
        const HopfieldParams hp = random_normal(rng);
        Eigen::Matrix4cd h = Eigen::Matrix4cd::Zero();
        h(2, 0) = hp.omega_a;
        h(3, 1) = hp.omega_b;
        h(0, 3) = i * hp.g1;
        h(2, 1) = -i * hp.g1;
        h(2, 3) = i * hp.g2;
        h(0, 1) = -i * hp.g2;
        const Eigen::Matrix4cd sym = 0.5 * (h + h.transpose());
        const BogoliubovModes m = bogoliubov_transform(hp);
        // alpha = T^{-1} B, so the quadratic form becomes T^{-T} sym T^{-1}
        const Eigen::Matrix4cd tinv = m.inverse();
        const Eigen::Matrix4cd d = tinv.transpose() * sym * tinv;
        const double scale = hp.omega_a + hp.omega_b;
        CHECK(std::abs(d(2, 0) + d(0, 2) - m.omega_lower) < 1e-9 * scale);
        CHECK(std::abs(d(3, 1) + d(1, 3) - m.omega_upper) < 1e-9 * scale);
        for (auto [r, c] : {std::pair{0, 0}, {1, 1}, {0, 1}, {2, 2}, {3, 3}, {2, 3}, {0, 3}, {1, 2}})
            CHECK(std::abs(d(r, c)) < 1e-9 * scale);
    }
}

TEST_CASE("phase classification")
{
    const HopfieldParams base{0.5 * thz, 0.8 * thz, 0, 0};
    CHECK(phase_boundary(base) == Phase::normal);
    HopfieldParams hp = base;
    hp.g1 = hp.g2 = 0.5 * std::sqrt(hp.omega_a * hp.omega_b);
    CHECK(phase_boundary(hp) == Phase::critical);
    hp.g2 *= 1.01;
    CHECK(phase_boundary(hp) == Phase::superradiant);
    CHECK_THROWS_AS(coupled_eigenfrequencies(hp), SoftModeError);
    CHECK_THROWS_AS(bogoliubov_transform(hp), SoftModeError);
    // both factors of the phase expression negative is still superradiant
    hp.g1 = 3 * thz;
    hp.g2 = 0;
    CHECK(phase_expression(hp) > 0);
    CHECK(phase_boundary(hp) == Phase::superradiant);
}

TEST_CASE("degenerate coupled modes are reported")
{
    const HopfieldParams hp{0.6 * thz, 0.6 * thz, 0, 0};
    CHECK_THROWS_AS(bogoliubov_transform(hp), DegeneracyError);
}

TEST_CASE("Bloch-Siegert shifts")
{
    HopfieldParams hp{0.5 * thz, 0.8 * thz, 0.1 * thz, 0};
    BlochSiegert bs = vbss_vrss(hp);
    CHECK(std::abs(bs.vbss) < 1e-3);
    CHECK(bs.vrss > 0);
    CHECK_FALSE(bs.dominant);
    hp.g2 = 0.15 * thz;
    bs = vbss_vrss(hp);
    CHECK(bs.vbss > 0);
}

TEST_CASE("reference parameters at 90 deg and 30 T")
{
    const MaterialParams p = reference();
    const FieldConfig f{30, 90};
    const HopfieldParams hp = coupling_strengths(linearize(p, f, find_equilibrium(p, f)));
    const BlochSiegert bs = vbss_vrss(hp);
    CHECK(bs.dominant);
    const auto w = mode_weights(bogoliubov_transform(hp));
    // qFM weight and its time reversal in the upper mode
    CHECK(w[1].w == doctest::Approx(w[1].y).epsilon(0.01));
    // lower mode carries large time-reversed components
    CHECK(w[0].y + w[0].z > 0.1);
}

TEST_CASE("counter-rotating coupling dominates and grows with tilt")
{
    const MaterialParams p = reference();
    double prev = 0;
    for (double th : {20.0, 40.0, 60.0, 89.0}) {
        const NormalizedCouplings n = normalized_couplings(p, th);
        CHECK_FALSE(n.discontinuous);
        CHECK(n.g2_ratio > n.g1_ratio);
        const double ratio = n.g2_ratio / n.g1_ratio;
        CHECK(ratio >= prev);
        prev = ratio;
    }
    for (double th : {20.0, 40.0, 60.0, 90.0})
        for (double h : {5.0, 15.0, 30.0}) {
            const FieldConfig f{h, th};
            const HopfieldParams hp = coupling_strengths(linearize(p, f, find_equilibrium(p, f)));
            CHECK(std::abs(hp.g2) > std::abs(hp.g1));
        }
}

TEST_CASE("normalized couplings")
{
    const MaterialParams p = reference();
    const NormalizedCouplings n0 = normalized_couplings(p, 0);
    CHECK(n0.g1_ratio < 1e-9);
    CHECK(n0.g2_ratio < 1e-9);
    const NormalizedCouplings n90 = normalized_couplings(p, 90);
    CHECK(n90.discontinuous);
    CHECK(n90.h_cross == doctest::Approx(1284).epsilon(0.05));
}
