#include "magnon/hopfield.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include "magnon/errors.hpp"

namespace magnon {

using cd = std::complex<double>;

const char* to_string(Phase ph)
{
    switch (ph) {
    case Phase::normal: return "normal";
    case Phase::critical: return "critical";
    case Phase::superradiant: return "superradiant";
    }
    return "?";
}

namespace {

const Eigen::Vector4d eta(1, 1, -1, -1);

// [alpha_i, alpha_j] for alpha = (a, b, a+, b+)
Eigen::Matrix4d commutator()
{
    Eigen::Matrix4d c = Eigen::Matrix4d::Zero();
    c(0, 2) = c(1, 3) = 1;
    c(2, 0) = c(3, 1) = -1;
    return c;
}

// B+ coefficients from B coefficients
Eigen::Vector4cd dagger(const Eigen::Vector4cd& u)
{
    return Eigen::Vector4cd(std::conj(u(2)), std::conj(u(3)), std::conj(u(0)), std::conj(u(1)));
}

double symplectic_norm(const Eigen::Vector4cd& u)
{
    double n = 0;
    for (int i = 0; i < 4; ++i) n += eta(i) * std::norm(u(i));
    return n;
}

void fix_phase(Eigen::Vector4cd& u, int preferred)
{
    int k = preferred;
    if (std::abs(u(k)) < 1e-12) u.cwiseAbs().maxCoeff(&k);
    u *= std::conj(u(k)) / std::abs(u(k));
    u(k) = std::abs(u(k));
}

double omega_sq_lower(double wa, double wb, double g1, double g2, double& disc)
{
    const double s = 2 * g1 * g1 - 2 * g2 * g2 + wa * wa + wb * wb;
    disc = 4 * g1 * g1 * std::pow(wa + wb, 2) + std::pow(wa * wa - wb * wb, 2) - 4 * g2 * g2 * std::pow(wa - wb, 2);
    return 0.5 * (s - std::sqrt(std::max(disc, 0.0)));
}

} // namespace

Eigen::Matrix4cd BogoliubovModes::transform() const
{
    Eigen::Matrix4cd t;
    t.row(0) = lower.transpose();
    t.row(1) = upper.transpose();
    t.row(2) = dagger(lower).transpose();
    t.row(3) = dagger(upper).transpose();
    return t;
}

Eigen::Matrix4cd BogoliubovModes::inverse() const
{
    const Eigen::Matrix4cd e = eta.cast<cd>().asDiagonal();
    return e * transform().adjoint() * e;
}

HopfieldParams coupling_strengths(const LinearizedDynamics& lin)
{
    if (!(lin.a_x > 0 && lin.a_y > 0 && lin.b_x > 0 && lin.b_y > 0)) {
        std::ostringstream os;
        os << "non-positive anisotropy coefficients (A=" << lin.a_x << "," << lin.a_y << " B=" << lin.b_x << ","
           << lin.b_y << ")";
        throw DomainError(os.str());
    }
    const ModeFrequencies d = decoupled_frequencies(lin);
    const double gs = 0.5 * lin.prefactor; // gamma sin(beta_z)
    const double r = std::pow(lin.a_y * lin.b_x / (lin.a_x * lin.b_y), 0.25);
    HopfieldParams hp;
    hp.omega_a = d.omega_fm;
    hp.omega_b = d.omega_afm;
    hp.g1 = gs * (lin.d_xy * r - lin.d_yx / r);
    hp.g2 = gs * (lin.d_xy * r + lin.d_yx / r);
    return hp;
}

std::pair<double, double> coupled_eigenfrequencies(const HopfieldParams& hp)
{
    const double wa = hp.omega_a, wb = hp.omega_b, g1 = hp.g1, g2 = hp.g2;
    double disc;
    double lo = omega_sq_lower(wa, wb, g1, g2, disc);
    if (disc < 0) throw OutsideDomainError("complex inner square root in the coupled eigenfrequencies");
    const double s = 2 * g1 * g1 - 2 * g2 * g2 + wa * wa + wb * wb;
    const double hi = 0.5 * (s + std::sqrt(disc));
    const double scale = std::max(wa * wa, wb * wb);
    if (lo < 0) {
        if (lo > -1e-14 * scale) lo = 0;
        else throw SoftModeError("superradiant instability: Omega_-^2 < 0", lo);
    }
    return {std::sqrt(lo), std::sqrt(hi)};
}

BogoliubovModes bogoliubov_transform(const HopfieldParams& hp)
{
    if (!(hp.omega_a > 0 && hp.omega_b > 0)) throw DomainError("decoupled frequencies must be positive");
    if (phase_boundary(hp) != Phase::normal)
        throw SoftModeError("Bogoliubov transform requires the normal phase", phase_expression(hp));
    const auto [om, op] = coupled_eigenfrequencies(hp);

    // work in units of the larger bare frequency
    const double w = std::max(hp.omega_a, hp.omega_b);
    const double wa = hp.omega_a / w, wb = hp.omega_b / w, g1 = hp.g1 / w, g2 = hp.g2 / w;
    const cd i(0, 1);
    // H = sum h_ij alpha_i alpha_j
    Eigen::Matrix4cd h = Eigen::Matrix4cd::Zero();
    h(2, 0) = wa;
    h(3, 1) = wb;
    h(0, 3) = i * g1;
    h(2, 1) = -i * g1;
    h(2, 3) = i * g2;
    h(0, 1) = -i * g2;
    const Eigen::Matrix4cd k = h + h.transpose();
    // [B, H] = Omega B  <=>  u C K = Omega u
    const Eigen::Matrix4cd dyn = (commutator().cast<cd>() * k).transpose();
    Eigen::ComplexEigenSolver<Eigen::Matrix4cd> es(dyn);
    if (es.info() != Eigen::Success) throw NumericalError("Bogoliubov eigen-solve failed");

    std::vector<std::pair<double, Eigen::Vector4cd>> modes;
    for (int j = 0; j < 4; ++j) {
        Eigen::Vector4cd u = es.eigenvectors().col(j);
        const double n = symplectic_norm(u);
        if (n <= 0) continue;
        modes.push_back({es.eigenvalues()(j).real(), u / std::sqrt(n)});
    }
    if (modes.size() != 2) throw NumericalError("could not isolate two positive-norm modes");
    std::sort(modes.begin(), modes.end(), [](const auto& x, const auto& y) { return x.first < y.first; });

    BogoliubovModes out;
    out.omega_lower = modes[0].first * w;
    out.omega_upper = modes[1].first * w;
    out.lower = modes[0].second;
    out.upper = modes[1].second;
    if (std::abs(out.omega_upper - out.omega_lower) < 1e-8 * out.omega_upper)
        throw DegeneracyError("degenerate coupled modes", out.lower, out.upper);
    fix_phase(out.lower, 0);
    fix_phase(out.upper, 1);

    // the +-Omega_- pair is ill-conditioned near the phase boundary, so agreement with the closed form
    // is judged by the eigen-residual rather than by comparing eigenvalues
    double residual = 0;
    for (const auto& [u, om_j] : {std::pair{out.lower, om}, std::pair{out.upper, op}})
        residual = std::max(residual, (dyn * u - (om_j / w) * u).norm() / u.norm());
    if (residual > 1e-9 || std::abs(out.omega_upper - op) > 1e-9 * op) {
        std::ostringstream os;
        os << "eigenproblem frequencies (" << out.omega_lower << ", " << out.omega_upper
           << ") disagree with closed form (" << om << ", " << op << "), residual " << residual;
        throw NumericalError(os.str());
    }
    out.omega_lower = om;
    out.omega_upper = op;
    const cd cross = (out.lower.array() * eta.cast<cd>().array() * out.upper.conjugate().array()).sum();
    const cd anti = out.lower.transpose() * commutator().cast<cd>() * out.upper;
    if (std::abs(cross) > 1e-10 || std::abs(anti) > 1e-10) throw NumericalError("Bogoliubov modes not symplectic");
    return out;
}

std::array<ModeWeights, 2> mode_weights(const BogoliubovModes& m)
{
    auto w = [](const Eigen::Vector4cd& u) {
        return ModeWeights{std::norm(u(0)), std::norm(u(1)), std::norm(u(2)), std::norm(u(3))};
    };
    return {w(m.lower), w(m.upper)};
}

double phase_expression(const HopfieldParams& hp)
{
    const double w = hp.omega_a * hp.omega_b;
    const double g1s = hp.g1 * hp.g1, g2s = hp.g2 * hp.g2;
    return 1 + (g1s - g2s) * (g1s - g2s) / (w * w) - 2 * (g1s + g2s) / w;
}

Phase phase_boundary(const HopfieldParams& hp)
{
    const double l = phase_expression(hp);
    if (std::abs(l) <= 1e-12) return Phase::critical;
    // l factors as (1 - (|g1|+|g2|)^2/w)(1 - (|g1|-|g2|)^2/w); both factors positive in the normal phase
    const double outer = std::pow(std::abs(hp.g1) + std::abs(hp.g2), 2) / (hp.omega_a * hp.omega_b);
    return (l > 0 && outer < 1) ? Phase::normal : Phase::superradiant;
}

BlochSiegert vbss_vrss(const HopfieldParams& hp)
{
    HopfieldParams rot = hp;
    rot.g2 = 0;
    for (const HopfieldParams* x : {&hp, static_cast<const HopfieldParams*>(&rot)})
        if (phase_boundary(*x) != Phase::normal)
            throw SoftModeError("Bloch-Siegert shifts require the normal phase", phase_expression(*x));
    const double up0 = coupled_eigenfrequencies(rot).second;
    const double up = coupled_eigenfrequencies(hp).second;
    BlochSiegert out;
    out.vbss = up0 - up;
    out.vrss = up0 - std::max(hp.omega_a, hp.omega_b);
    out.dominant = out.vbss > out.vrss;
    return out;
}

namespace {

struct CrossPoint {
    double diff; // omega_fm - omega_afm
    HopfieldParams hp;
    EquilibriumState eq;
};

CrossPoint evaluate(const MaterialParams& p, double theta, double h, const std::optional<EquilibriumState>& warm)
{
    const FieldConfig f{h, theta};
    EquilibriumState eq = find_equilibrium(p, f, warm);
    const LinearizedDynamics lin = linearize(p, f, eq);
    const HopfieldParams hp = coupling_strengths(lin);
    return {hp.omega_a - hp.omega_b, hp, eq};
}

} // namespace

NormalizedCouplings normalized_couplings(const MaterialParams& p, double theta_deg, const CrossingOptions& opt)
{
    if (!(theta_deg >= 0 && theta_deg <= 90)) throw PreconditionError("theta must lie in [0, 90] degrees");
    NormalizedCouplings out;
    out.discontinuous = theta_deg >= 90;
    std::optional<EquilibriumState> warm;
    CrossPoint left = evaluate(p, theta_deg, 0, warm);
    double hl = 0;
    for (double h = opt.scan_step; h <= opt.h_max + 1e-12; h += opt.scan_step) {
        CrossPoint right;
        try {
            right = evaluate(p, theta_deg, h, left.eq);
        } catch (const DiscontinuityError&) {
            // crossing coincides with the alignment transition: report its left limit
            double hr = h;
            while (hr - hl > opt.tol) {
                const double hm = 0.5 * (hl + hr);
                try {
                    left = evaluate(p, theta_deg, hm, left.eq);
                    hl = hm;
                } catch (const DiscontinuityError&) {
                    hr = hm;
                }
            }
            out.discontinuous = true;
            out.h_cross = 0.5 * (hl + hr);
            out.omega0 = 0.5 * (left.hp.omega_a + left.hp.omega_b);
            out.g1_ratio = std::abs(left.hp.g1) / out.omega0;
            out.g2_ratio = std::abs(left.hp.g2) / out.omega0;
            return out;
        }
        if ((left.diff < 0) != (right.diff < 0)) {
            double hr = h;
            while (hr - hl > opt.tol) {
                const double hm = 0.5 * (hl + hr);
                CrossPoint mid = evaluate(p, theta_deg, hm, left.eq);
                if ((mid.diff < 0) == (left.diff < 0)) {
                    left = mid;
                    hl = hm;
                } else {
                    hr = hm;
                }
            }
            out.h_cross = 0.5 * (hl + hr);
            CrossPoint c = evaluate(p, theta_deg, out.h_cross, left.eq);
            out.omega0 = 0.5 * (c.hp.omega_a + c.hp.omega_b);
            out.g1_ratio = std::abs(c.hp.g1) / out.omega0;
            out.g2_ratio = std::abs(c.hp.g2) / out.omega0;
            return out;
        }
        left = right;
        hl = h;
    }
    std::ostringstream os;
    os << "no qFM/qAFM crossing found below " << opt.h_max << " T at theta = " << theta_deg;
    throw NoCrossingError(os.str());
}

} // namespace magnon
