#include "magnon/squeezing.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "magnon/errors.hpp"

namespace magnon {

using cd = std::complex<double>;
constexpr double pi = std::numbers::pi;

void SqueezingQuery::validate() const
{
    if (!(alpha >= -1e-15 && alpha <= 1 + 1e-15)) throw PreconditionError("alpha must lie in [0, 1]");
    if (std::abs(alpha * alpha + std::norm(beta) - 1) > 1e-12) throw PreconditionError("query is not normalized");
}

SqueezingQuery SqueezingQuery::from_angles(double chi, double psi, double phi)
{
    SqueezingQuery q;
    q.alpha = std::cos(chi);
    q.beta = std::polar(std::sin(chi), psi);
    q.phi = phi;
    if (q.alpha < 0) {
        // c -> -c is the same quadrature shifted by pi
        q.alpha = -q.alpha;
        q.beta = -q.beta;
    }
    return q;
}

double to_db(double variance) { return 10 * std::log10(0.25 / variance); }

Eigen::Matrix4cd ground_moments(const BogoliubovModes& m)
{
    const Eigen::Matrix4cd tinv = m.inverse();
    Eigen::Matrix4cd e = Eigen::Matrix4cd::Zero();
    e(0, 2) = e(1, 3) = 1;
    return tinv * e * tinv.transpose();
}

double quadrature_variance(const BogoliubovModes& m, const SqueezingQuery& q)
{
    q.validate();
    const cd ph = std::polar(1.0, q.phi);
    const Eigen::Vector4cd x(0.5 * q.alpha * ph, 0.5 * q.beta * ph, 0.5 * q.alpha * std::conj(ph),
                             0.5 * std::conj(q.beta) * std::conj(ph));
    const cd v = x.transpose() * ground_moments(m) * x;
    if (std::abs(v.imag()) > 1e-10) throw NumericalError("quadrature variance has an imaginary part");
    return v.real();
}

namespace {

// second moments of c = v0 a + v1 b: N = <c+c>, M = <cc>
struct Moments {
    Eigen::Matrix2cd a; // <alpha_i+ alpha_j>
    Eigen::Matrix2cd s; // <alpha_i alpha_j>

    explicit Moments(const BogoliubovModes& m)
    {
        const Eigen::Matrix4cd g = ground_moments(m);
        a = g.block<2, 2>(2, 0);
        s = 0.5 * (g.block<2, 2>(0, 0) + g.block<2, 2>(0, 0).transpose());
    }

    double n(const Eigen::Vector2cd& v) const { return (v.adjoint() * a * v)(0).real(); }
    cd mm(const Eigen::Vector2cd& v) const { return (v.transpose() * s * v)(0); }

    // phi-minimized variance
    double value(const Eigen::Vector2cd& v) const { return 0.25 * (1 + 2 * n(v) - 2 * std::abs(mm(v))); }
    double best_phi(const Eigen::Vector2cd& v) const
    {
        double phi = 0.5 * (pi - std::arg(mm(v)));
        phi = std::fmod(phi, pi);
        return phi < 0 ? phi + pi : phi;
    }
};

Eigen::Vector2cd vec(double chi, double psi)
{
    return {std::cos(chi), std::polar(std::sin(chi), psi)};
}

struct Objective {
    const Moments& mo;

    double value(const Eigen::Vector2d& x) const { return mo.value(vec(x(0), x(1))); }

    Eigen::Vector2d gradient(const Eigen::Vector2d& x) const
    {
        const double chi = x(0), psi = x(1);
        const Eigen::Vector2cd v = vec(chi, psi);
        const Eigen::Vector2cd dchi(-std::sin(chi), std::polar(std::cos(chi), psi));
        const Eigen::Vector2cd dpsi(0, cd(0, 1) * std::polar(std::sin(chi), psi));
        const cd m = mo.mm(v);
        const double am = std::abs(m);
        Eigen::Vector2d g;
        int k = 0;
        for (const auto& d : {dchi, dpsi}) {
            const double dn = 2 * (v.adjoint() * mo.a * d)(0).real();
            const cd dm = 2.0 * (v.transpose() * mo.s * d)(0);
            const double dam = am > 1e-300 ? (std::conj(m) * dm).real() / am : 0.0;
            g(k++) = 0.5 * (dn - dam);
        }
        return g;
    }

    Eigen::Matrix2d hessian(const Eigen::Vector2d& x) const
    {
        const double h = 1e-6;
        Eigen::Matrix2d hs;
        for (int k = 0; k < 2; ++k) {
            Eigen::Vector2d e = Eigen::Vector2d::Zero();
            e(k) = h;
            hs.col(k) = (gradient(x + e) - gradient(x - e)) / (2 * h);
        }
        return 0.5 * (hs + hs.transpose());
    }
};

Eigen::Vector2d refine(const Objective& f, Eigen::Vector2d x)
{
    double fx = f.value(x);
    for (int it = 0; it < 100; ++it) {
        const Eigen::Vector2d g = f.gradient(x);
        if (g.norm() < 1e-13) break;
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(f.hessian(x));
        const double lmin = es.eigenvalues().minCoeff();
        const double shift = lmin < 1e-10 ? 1e-10 - lmin : 0.0;
        Eigen::Vector2d dx = -(f.hessian(x) + shift * Eigen::Matrix2d::Identity()).ldlt().solve(g);
        if (dx.norm() > 0.2) dx *= 0.2 / dx.norm();
        double t = 1;
        bool moved = false;
        for (; t > 1e-8; t *= 0.5) {
            const Eigen::Vector2d y = x + t * dx;
            const double fy = f.value(y);
            if (fy <= fx + 1e-16) {
                x = y;
                fx = fy;
                moved = true;
                break;
            }
        }
        if (!moved) break;
    }
    return x;
}

} // namespace

SqueezingResult minimize_variance(const BogoliubovModes& m)
{
    const Moments mo(m);
    const Objective f{mo};
    constexpr int n = 64;
    struct Cell {
        double v;
        Eigen::Vector2d x;
    };
    std::vector<Cell> grid;
    grid.reserve(n * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const Eigen::Vector2d x((i + 0.5) * 0.5 * pi / n, (j + 0.5) * 2 * pi / n);
            grid.push_back({f.value(x), x});
        }
    // refine the best few grid points
    std::partial_sort(grid.begin(), grid.begin() + 8, grid.end(), [](const Cell& a, const Cell& b) { return a.v < b.v; });
    Eigen::Vector2d best = grid[0].x;
    double best_v = grid[0].v;
    for (int k = 0; k < 8; ++k) {
        const Eigen::Vector2d x = refine(f, grid[k].x);
        const double v = f.value(x);
        if (v < best_v) {
            best_v = v;
            best = x;
        }
    }
    const Eigen::Vector2cd v = vec(best(0), best(1));
    SqueezingResult out;
    out.optimal = SqueezingQuery::from_angles(best(0), best(1), mo.best_phi(v));
    out.min_variance = best_v;
    out.suppression_db = to_db(best_v);
    const OrthogonalResult o = orthogonal_squeezing(m, out.optimal);
    out.orthogonal_variance = o.variance;
    out.orthogonal_db = o.db;
    out.orthogonal_phi = o.phi;
    return out;
}

OrthogonalResult orthogonal_squeezing(const BogoliubovModes& m, const SqueezingQuery& c)
{
    c.validate();
    const Eigen::Vector2cd vc(c.alpha, c.beta);
    const Eigen::Vector2cd vd(std::conj(c.beta), -c.alpha);
    // [c, d+] = sum vc_i conj(vd_i)
    if (std::abs((vc.transpose() * vd.conjugate())(0)) > 1e-12) throw NumericalError("c and d are not orthogonal");
    const Moments mo(m);
    OrthogonalResult out;
    out.variance = mo.value(vd);
    out.phi = mo.best_phi(vd);
    out.db = to_db(out.variance);
    return out;
}

} // namespace magnon
