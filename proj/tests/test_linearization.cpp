#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>

#include "doctest.h"

#include "magnon/errors.hpp"
#include "magnon/hopfield.hpp"
#include "magnon/linearization.hpp"

using namespace magnon;

namespace {

MaterialParams reference()
{
    MaterialParams p;
    p.exchange_field = 641.84;
    p.dm_field = 13.855;
    p.anisotropy_a = 0.0861;
    p.anisotropy_c = 0.04057;
    return p;
}

// precession frequencies from the full 6x6 flow Jacobian (two zero modes from the unit constraints)
Eigen::Vector2d full_jacobian_frequencies(const MaterialParams& p, const FieldConfig& f, const EquilibriumState& eq)
{
    Eigen::Matrix<double, 6, 1> y;
    y << eq.r1, eq.r2;
    Eigen::Matrix<double, 6, 6> jac;
    const double h = 1e-7;
    for (int k = 0; k < 6; ++k) {
        Eigen::Matrix<double, 6, 1> e = Eigen::Matrix<double, 6, 1>::Zero();
        e(k) = h;
        jac.col(k) = (llg_rhs(p, f, y + e, 0) - llg_rhs(p, f, y - e, 0)) / (2 * h);
    }
    const Eigen::VectorXcd ev = Eigen::EigenSolver<Eigen::Matrix<double, 6, 6>>(jac, false).eigenvalues();
    std::vector<double> im;
    for (int k = 0; k < 6; ++k)
        if (ev(k).imag() > 0) im.push_back(ev(k).imag());
    std::sort(im.begin(), im.end());
    REQUIRE(im.size() >= 2);
    return {im[im.size() - 2], im[im.size() - 1]};
}

} // namespace

TEST_CASE("reduced 4x4 dynamics reproduce the full LLG Jacobian spectrum")
{
    const MaterialParams p = reference();
    for (const FieldConfig f : {FieldConfig{0, 0}, FieldConfig{12.6, 20}, FieldConfig{30, 58}, FieldConfig{30, 90},
                                FieldConfig{7, 75}}) {
        const EquilibriumState eq = find_equilibrium(p, f);
        const LinearizedDynamics lin = linearize(p, f, eq);
        const ModeFrequencies m = coupled_frequencies(lin);
        const Eigen::Vector2d full = full_jacobian_frequencies(p, f, eq);
        CHECK(m.omega_minus == doctest::Approx(full(0)).epsilon(1e-6));
        CHECK(m.omega_plus == doctest::Approx(full(1)).epsilon(1e-6));
    }
}

TEST_CASE("matrix has the template structure")
{
    const MaterialParams p = reference();
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> th(0, 89), h(0, 30);
    for (int k = 0; k < 100; ++k) {
        const FieldConfig f{h(rng), th(rng)};
        const LinearizedDynamics lin = linearize(p, f, find_equilibrium(p, f));
        CHECK(lin.structure_residual < 1e-8);
        CHECK(lin.a_x > 0);
        CHECK(lin.a_y > 0);
        CHECK(lin.b_x > 0);
        CHECK(lin.b_y > 0);
    }
}

TEST_CASE("closed-form frequencies equal the matrix eigenvalues")
{
    const MaterialParams p = reference();
    for (double th : {0.0, 10.0, 45.0, 80.0, 90.0})
        for (double h : {0.0, 5.0, 15.0, 30.0}) {
            const FieldConfig f{h, th};
            const LinearizedDynamics lin = linearize(p, f, find_equilibrium(p, f));
            const ModeFrequencies m = coupled_frequencies(lin);
            const Eigen::Vector2d d = matrix_frequencies(lin.matrix);
            CHECK(m.omega_minus == doctest::Approx(d(0)).epsilon(1e-10));
            CHECK(m.omega_plus == doctest::Approx(d(1)).epsilon(1e-10));
            CHECK(m.omega_plus >= m.omega_minus);
        }
}

TEST_CASE("field along c decouples the two channels")
{
    const MaterialParams p = reference();
    for (double h : {0.0, 10.0, 30.0}) {
        const FieldConfig f{h, 0};
        const LinearizedDynamics lin = linearize(p, f, find_equilibrium(p, f));
        const double scale = std::max({lin.a_x, lin.a_y, lin.b_x, lin.b_y});
        CHECK(std::abs(lin.d_xy) < 1e-10 * scale);
        CHECK(std::abs(lin.d_yx) < 1e-10 * scale);
        const ModeFrequencies c = coupled_frequencies(lin), d = decoupled_frequencies(lin);
        CHECK(std::min(d.omega_fm, d.omega_afm) == doctest::Approx(c.omega_minus).epsilon(1e-10));
        CHECK(std::max(d.omega_fm, d.omega_afm) == doctest::Approx(c.omega_plus).epsilon(1e-10));
    }
}

TEST_CASE("tilting the field breaks the parity symmetry")
{
    const MaterialParams p = reference();
    for (double h : {0.0, 5.0, 30.0}) {
        const FieldConfig f{h, 0};
        const LinearizedDynamics lin = linearize(p, f, find_equilibrium(p, f));
        CHECK(symmetry_check(lin) < 1e-10 * lin.matrix.norm());
    }
    for (double th : {20.0, 40.0, 60.0, 90.0}) {
        const FieldConfig f{5, th};
        const LinearizedDynamics lin = linearize(p, f, find_equilibrium(p, f));
        CHECK(symmetry_check(lin) > 1e-4 * lin.matrix.norm());
    }
}

TEST_CASE("coupled upper mode against the bare frequencies near the crossing")
{
    const MaterialParams p = reference();
    const double thz = 2e12 * std::numbers::pi;
    for (double th : {20.0, 40.0, 60.0}) {
        const NormalizedCouplings n = normalized_couplings(p, th);
        const FieldConfig f{n.h_cross, th};
        const LinearizedDynamics lin = linearize(p, f, find_equilibrium(p, f));
        const ModeFrequencies c = coupled_frequencies(lin), d = decoupled_frequencies(lin);
        CHECK(c.omega_plus >= std::max(d.omega_fm, d.omega_afm));
    }
    const FieldConfig f{30, 90};
    const LinearizedDynamics lin = linearize(p, f, find_equilibrium(p, f));
    const ModeFrequencies c = coupled_frequencies(lin), d = decoupled_frequencies(lin);
    CHECK(c.omega_plus < d.omega_afm);
    CHECK(d.omega_afm / thz > 1.0);
}

TEST_CASE("zero-field resonances")
{
    const MaterialParams p = reference();
    const FieldConfig f{0, 0};
    const ModeFrequencies d = decoupled_frequencies(linearize(p, f, find_equilibrium(p, f)));
    const double thz = 2e12 * std::numbers::pi;
    // low-field qFM and qAFM lines the parameter file was fitted to
    CHECK(d.omega_fm / thz == doctest::Approx(0.303).epsilon(2e-3));
    CHECK(d.omega_afm / thz == doctest::Approx(0.5696).epsilon(2e-3));
}

TEST_CASE("template matrix layout")
{
    const Eigen::Matrix4d t = LinearizedDynamics::template_matrix(1, 2, 3, 4, 5, 6);
    CHECK(t(0, 1) == 2 * 2);
    CHECK(t(1, 0) == -2 * 1);
    CHECK(t(2, 3) == 2 * 4);
    CHECK(t(3, 2) == -2 * 3);
    CHECK(t.trace() == 0);
}

TEST_CASE("alignment point is reported as a discontinuity")
{
    const MaterialParams p = reference();
    const double h = alignment_field(p, 90);
    const FieldConfig f{h + 1, 90};
    CHECK_THROWS_AS(linearize(p, f, find_equilibrium(p, f)), DiscontinuityError);
}
