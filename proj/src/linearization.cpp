#include "magnon/linearization.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "magnon/errors.hpp"

namespace magnon {

using Vec6 = Eigen::Matrix<double, 6, 1>;

Eigen::Matrix4d LinearizedDynamics::template_matrix(double ax, double ay, double bx, double by, double dxy,
                                                    double dyx)
{
    Eigen::Matrix4d t;
    t << 0, 2 * ay, dyx, 0,
        -2 * ax, 0, 0, -dxy,
        dxy, 0, 0, 2 * by,
        0, -dyx, -2 * bx, 0;
    return t;
}

namespace {

// (dF_a, dF_b, dG_a, dG_b) -> tangent displacement of (r1, r2); c components fixed by |r_i| = 1
Eigen::Matrix<double, 6, 4> chart_inverse(const Vec3& r1, const Vec3& r2)
{
    Eigen::Matrix<double, 6, 4> p = Eigen::Matrix<double, 6, 4>::Zero();
    // r1 = (F + G)/2, r2 = (F - G)/2
    p(0, 0) = 0.5; p(0, 2) = 0.5;
    p(1, 1) = 0.5; p(1, 3) = 0.5;
    p(3, 0) = 0.5; p(3, 2) = -0.5;
    p(4, 1) = 0.5; p(4, 3) = -0.5;
    for (int s = 0; s < 2; ++s) {
        const Vec3& r = s == 0 ? r1 : r2;
        const int o = 3 * s;
        p.row(o + 2) = -(r.x() * p.row(o) + r.y() * p.row(o + 1)) / r.z();
    }
    return p;
}

Eigen::Matrix<double, 4, 6> chart_forward()
{
    Eigen::Matrix<double, 4, 6> l = Eigen::Matrix<double, 4, 6>::Zero();
    l(0, 0) = 1; l(0, 3) = 1;
    l(1, 1) = 1; l(1, 4) = 1;
    l(2, 0) = 1; l(2, 3) = -1;
    l(3, 1) = 1; l(3, 4) = -1;
    return l;
}

} // namespace

LinearizedDynamics linearize(const MaterialParams& p, const FieldConfig& f, const EquilibriumState& eq,
                             const LinearizeOptions& opt)
{
    const double rc = 0.5 * (eq.r1.z() + eq.r2.z());
    if (std::abs(eq.r1.z()) < 1e-9 || std::abs(eq.r2.z()) < 1e-9)
        throw DiscontinuityError("linearization singular: sublattices lie in the a-b plane (alignment transition)");

    MaterialParams undamped = p;
    undamped.gilbert_damping = 0;
    Vec6 y;
    y << eq.r1, eq.r2;
    const auto pin = chart_inverse(eq.r1, eq.r2);
    const auto pout = chart_forward();

    auto central = [&](double h) {
        Eigen::Matrix4d m;
        for (int k = 0; k < 4; ++k) {
            const Vec6 d = h * pin.col(k);
            m.col(k) = pout * (llg_rhs(undamped, f, y + d, 0) - llg_rhs(undamped, f, y - d, 0)) / (2 * h);
        }
        return m;
    };
    // one Richardson step
    const Eigen::Matrix4d jac = (4 * central(0.5 * opt.step) - central(opt.step)) / 3;

    LinearizedDynamics lin;
    lin.gamma = p.gamma;
    lin.sin_beta = std::abs(rc);
    lin.prefactor = 2 * p.gamma * lin.sin_beta;

    // orient y = +/-b so that A_x > 0
    Eigen::Matrix4d m = jac;
    if (-m(1, 0) < 0) {
        const Eigen::Vector4d s(1, -1, 1, -1);
        m = s.asDiagonal() * m * s.asDiagonal();
    }
    lin.jacobian = m;
    const Eigen::Matrix4d t = m / lin.prefactor;
    lin.a_y = t(0, 1) / 2;
    lin.a_x = -t(1, 0) / 2;
    lin.b_y = t(2, 3) / 2;
    lin.b_x = -t(3, 2) / 2;
    lin.d_yx = (t(0, 2) - t(3, 1)) / 2;
    lin.d_xy = (t(2, 0) - t(1, 3)) / 2;
    lin.matrix = lin.prefactor * LinearizedDynamics::template_matrix(lin.a_x, lin.a_y, lin.b_x, lin.b_y, lin.d_xy,
                                                                     lin.d_yx);
    const double scale = m.cwiseAbs().maxCoeff();
    lin.structure_residual = (m - lin.matrix).cwiseAbs().maxCoeff() / scale;
    if (!(lin.structure_residual < opt.structure_tol)) {
        std::ostringstream os;
        os << "Jacobian does not match the coupled-oscillator template (residual " << lin.structure_residual << ")";
        throw StructureError(os.str(), lin.structure_residual);
    }
    return lin;
}

Eigen::Vector2d matrix_frequencies(const Eigen::Matrix4d& m)
{
    Eigen::EigenSolver<Eigen::Matrix4d> es(m, false);
    std::array<double, 4> w;
    for (int k = 0; k < 4; ++k) w[k] = std::abs(es.eigenvalues()(k).imag());
    std::sort(w.begin(), w.end());
    // eigenvalues come in +/- i w pairs
    return {0.5 * (w[0] + w[1]), 0.5 * (w[2] + w[3])};
}

ModeFrequencies coupled_frequencies(const LinearizedDynamics& lin)
{
    const double k2 = std::pow(2 * lin.prefactor, 2); // (4 gamma sin beta)^2
    const double s = lin.a_x * lin.a_y + lin.b_x * lin.b_y - 0.5 * lin.d_xy * lin.d_yx;
    const double prod = (lin.a_x * lin.b_y - 0.25 * lin.d_xy * lin.d_xy)
        * (lin.a_y * lin.b_x - 0.25 * lin.d_yx * lin.d_yx);
    const double disc = s * s - 4 * prod;
    if (disc < 0) throw OutsideDomainError("complex discriminant in coupled frequencies");
    const double wm2 = 0.5 * k2 * (s - std::sqrt(disc));
    const double wp2 = 0.5 * k2 * (s + std::sqrt(disc));
    if (wm2 < 0) {
        std::ostringstream os;
        os << "soft mode: omega_-^2 = " << wm2 << " (A=" << lin.a_x << "," << lin.a_y << " B=" << lin.b_x << ","
           << lin.b_y << " D=" << lin.d_xy << "," << lin.d_yx << ")";
        throw SoftModeError(os.str(), wm2);
    }
    ModeFrequencies out;
    out.omega_minus = std::sqrt(wm2);
    out.omega_plus = std::sqrt(wp2);

    const Eigen::Vector2d direct = matrix_frequencies(lin.matrix);
    const double ref = std::max(out.omega_plus, 1e-300);
    if (std::abs(direct(0) - out.omega_minus) > 1e-9 * std::max(out.omega_minus, 1e-6 * ref)
        || std::abs(direct(1) - out.omega_plus) > 1e-9 * ref)
        throw NumericalError("closed-form frequencies disagree with direct eigenvalues");
    return out;
}

ModeFrequencies decoupled_frequencies(const LinearizedDynamics& lin)
{
    const double pa = lin.a_x * lin.a_y, pb = lin.b_x * lin.b_y;
    if (pa < 0 || pb < 0) throw AnisotropySignError("negative radicand in decoupled frequencies");
    ModeFrequencies out;
    out.omega_fm = 2 * lin.prefactor * std::sqrt(pa);
    out.omega_afm = 2 * lin.prefactor * std::sqrt(pb);
    return out;
}

ModeFrequencies mode_frequencies(const LinearizedDynamics& lin)
{
    ModeFrequencies out = coupled_frequencies(lin);
    const ModeFrequencies d = decoupled_frequencies(lin);
    out.omega_fm = d.omega_fm;
    out.omega_afm = d.omega_afm;
    return out;
}

double symmetry_check(const LinearizedDynamics& lin)
{
    const Eigen::Matrix4d sigma = Eigen::Vector4d(-1, -1, 1, 1).asDiagonal();
    return (lin.matrix * sigma - sigma * lin.matrix).norm();
}

} // namespace magnon
