#include "magnon/spin_model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "magnon/errors.hpp"

namespace magnon {

using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

void MaterialParams::validate() const
{
    if (!(exchange_field > 0)) throw ConfigError("exchange_field must be > 0");
    if (!(gamma > 0)) throw ConfigError("gamma must be > 0");
    if (!(gilbert_damping >= 0)) throw ConfigError("gilbert_damping must be >= 0");
    for (double v : {dm_field, anisotropy_a, anisotropy_c})
        if (!std::isfinite(v)) throw ConfigError("non-finite material constant");
}

Vec3 FieldConfig::vector() const
{
    const double t = theta_deg * std::numbers::pi / 180.0;
    return magnitude * Vec3(0.0, std::sin(t), std::cos(t));
}

void FieldConfig::validate() const
{
    if (!(magnitude >= 0) || !std::isfinite(magnitude)) throw ConfigError("field magnitude must be >= 0");
    if (!(theta_deg >= 0 && theta_deg <= 90)) throw ConfigError("theta must lie in [0, 90] degrees");
}

namespace {

// E = 1/2 y^T Q y - h^T y over y = (r1, r2)
Mat6 energy_hessian(const MaterialParams& p)
{
    Mat6 q = Mat6::Zero();
    const double J = p.exchange_field, D = p.dm_field;
    for (int k : {0, 3}) {
        q(k + 0, k + 0) = -2 * p.anisotropy_a;
        q(k + 2, k + 2) = -2 * p.anisotropy_c;
    }
    Eigen::Matrix3d x = J * Eigen::Matrix3d::Identity();
    x(0, 2) = D;
    x(2, 0) = -D;
    q.block<3, 3>(0, 3) = x;
    q.block<3, 3>(3, 0) = x.transpose();
    return q;
}

Vec6 zeeman(const FieldConfig& f)
{
    Vec6 h;
    const Vec3 v = f.vector();
    h << v, v;
    return h;
}

Vec6 stack(const Vec3& a, const Vec3& b)
{
    Vec6 y;
    y << a, b;
    return y;
}

void check_unit(const Vec3& r)
{
    if (std::abs(r.norm() - 1.0) > 1e-9) throw PreconditionError("sublattice vector is not unit norm");
}

Eigen::Matrix3d cross_matrix(const Vec3& v)
{
    Eigen::Matrix3d m;
    m << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
    return m;
}

double tangent_gradient(const Vec6& y, const Vec6& g)
{
    Vec3 t1 = g.head<3>() - y.head<3>().dot(g.head<3>()) * y.head<3>();
    Vec3 t2 = g.tail<3>() - y.tail<3>().dot(g.tail<3>()) * y.tail<3>();
    return std::sqrt(t1.squaredNorm() + t2.squaredNorm());
}

// spherical chart for one spin: r = B (sin t cos p, sin t sin p, cos t)
struct Chart {
    Eigen::Matrix3d basis = Eigen::Matrix3d::Identity(); // columns e1 e2 e3(polar)
    double t = 0, p = 0;

    Vec3 local() const { return {std::sin(t) * std::cos(p), std::sin(t) * std::sin(p), std::cos(t)}; }
    Vec3 r() const { return basis * local(); }
    Vec3 dt() const { return basis * Vec3(std::cos(t) * std::cos(p), std::cos(t) * std::sin(p), -std::sin(t)); }
    Vec3 dp() const { return basis * Vec3(-std::sin(t) * std::sin(p), std::sin(t) * std::cos(p), 0); }
    Vec3 dtt() const { return -r(); }
    Vec3 dtp() const { return basis * Vec3(-std::cos(t) * std::sin(p), std::cos(t) * std::cos(p), 0); }
    Vec3 dpp() const { return basis * Vec3(-std::sin(t) * std::cos(p), -std::sin(t) * std::sin(p), 0); }

    // polar axis chosen from {c, a, b} to keep r far from the poles
    static Chart around(const Vec3& r)
    {
        const Vec3 u = r.normalized();
        Chart c;
        const int order[3][3] = {{0, 1, 2}, {1, 2, 0}, {2, 0, 1}};
        int best = 0;
        double best_s = -1;
        for (int k = 0; k < 3; ++k) {
            double s = std::abs(u(order[k][2]));
            if (best_s < 0 || s < best_s) { best_s = s; best = k; }
        }
        for (int j = 0; j < 3; ++j) c.basis.col(j) = Eigen::Matrix3d::Identity().col(order[best][j]);
        Vec3 l = c.basis.transpose() * u;
        c.t = std::acos(std::clamp(l.z(), -1.0, 1.0));
        c.p = std::atan2(l.y(), l.x());
        return c;
    }
};

struct Solver {
    Mat6 q;
    Vec6 h;
    std::array<Chart, 2> ch;

    Vec6 y() const { return stack(ch[0].r(), ch[1].r()); }
    double energy(const Vec6& v) const { return 0.5 * v.dot(q * v) - h.dot(v); }

    void derivatives(Eigen::Vector4d& g, Eigen::Matrix4d& hess) const
    {
        const Vec6 v = y();
        const Vec6 gr = q * v - h;
        Eigen::Matrix<double, 6, 4> d = Eigen::Matrix<double, 6, 4>::Zero();
        d.block<3, 1>(0, 0) = ch[0].dt();
        d.block<3, 1>(0, 1) = ch[0].dp();
        d.block<3, 1>(3, 2) = ch[1].dt();
        d.block<3, 1>(3, 3) = ch[1].dp();
        g = d.transpose() * gr;
        hess = d.transpose() * q * d;
        for (int s = 0; s < 2; ++s) {
            const Vec3 gs = gr.segment<3>(3 * s);
            const int k = 2 * s;
            hess(k, k) += gs.dot(ch[s].dtt());
            hess(k, k + 1) += gs.dot(ch[s].dtp());
            hess(k + 1, k) += gs.dot(ch[s].dtp());
            hess(k + 1, k + 1) += gs.dot(ch[s].dpp());
        }
    }

    void step(const Eigen::Vector4d& dx)
    {
        ch[0].t += dx(0);
        ch[0].p += dx(1);
        ch[1].t += dx(2);
        ch[1].p += dx(3);
    }

    void rechart()
    {
        for (auto& c : ch)
            if (std::abs(std::sin(c.t)) < 0.2) c = Chart::around(c.r());
    }
};

struct Attempt {
    Vec6 y;
    double energy;
    double grad;
    int iterations;
    bool ok;
};

Attempt newton(const Mat6& q, const Vec6& h, const Vec3& s1, const Vec3& s2, const EquilibriumOptions& opt)
{
    Solver s{q, h, {Chart::around(s1), Chart::around(s2)}};
    const double scale = std::max({q.cwiseAbs().maxCoeff(), h.cwiseAbs().maxCoeff(), 1.0});
    Eigen::Vector4d g;
    Eigen::Matrix4d hs;
    double best_grad = std::numeric_limits<double>::infinity();
    int stall = 0, it = 0;
    for (; it < opt.max_iterations; ++it) {
        s.rechart();
        s.derivatives(g, hs);
        const double gn = g.norm();
        if (gn < opt.gradient_tol) break;
        if (gn < best_grad * 0.5) {
            best_grad = gn;
            stall = 0;
        } else if (gn < 1e-9 * scale && ++stall > 4) {
            break; // roundoff floor
        }
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(hs);
        const double lmin = es.eigenvalues().minCoeff();
        const double lmax = es.eigenvalues().cwiseAbs().maxCoeff();
        const double floor = 1e-8 * std::max(lmax, 1e-3);
        double mu = lmin < floor ? floor - lmin : 0.0;
        Eigen::Vector4d dx = -(hs + mu * Eigen::Matrix4d::Identity()).ldlt().solve(g);
        const double cap = 0.5;
        if (dx.cwiseAbs().maxCoeff() > cap) dx *= cap / dx.cwiseAbs().maxCoeff();
        if (gn < 1e-6 * scale && mu == 0) {
            s.step(dx);
            continue;
        }
        const double e0 = s.energy(s.y());
        const double slope = g.dot(dx);
        double t = 1.0;
        Solver trial = s;
        for (; t > 1e-12; t *= 0.5) {
            trial = s;
            trial.step(t * dx);
            if (trial.energy(trial.y()) <= e0 + 1e-4 * t * slope) break;
        }
        s = trial;
    }
    s.derivatives(g, hs);
    Vec6 v = s.y();
    v.head<3>().normalize();
    v.tail<3>().normalize();
    const double tg = tangent_gradient(v, q * v - h);
    return {v, s.energy(v), tg, it, tg < 1e-10};
}

std::vector<std::pair<Vec3, Vec3>> seeds(const FieldConfig& f)
{
    std::vector<std::pair<Vec3, Vec3>> out;
    const double d = 0.02;
    for (double ga : {1.0, -1.0})
        for (double fc : {1.0, -1.0})
            out.push_back({Vec3(ga, 0, fc * d).normalized(), Vec3(-ga, 0, fc * d).normalized()});
    // spin-flop along b and c
    out.push_back({Vec3(d, 1, d).normalized(), Vec3(d, -1, d).normalized()});
    out.push_back({Vec3(d, d, 1).normalized(), Vec3(-d, d, -1).normalized()});
    // canted toward the field, G along a
    Vec3 n = f.magnitude > 0 ? f.vector().normalized() : Vec3(0, 0, 1);
    out.push_back({(Vec3(1, 0, 0) + 0.3 * n).normalized(), (Vec3(-1, 0, 0) + 0.3 * n).normalized()});
    // nearly saturated along the field
    Vec3 t = Vec3(1, 0, 0);
    out.push_back({(n + 0.05 * t).normalized(), (n - 0.05 * t).normalized()});
    return out;
}

EquilibriumState finish(const Attempt& a)
{
    EquilibriumState eq;
    eq.r1 = a.y.head<3>();
    eq.r2 = a.y.tail<3>();
    eq.energy = a.energy;
    eq.tangent_gradient = a.grad;
    eq.iterations = a.iterations;
    eq.beta_z = std::asin(std::clamp(0.5 * (eq.r1.z() + eq.r2.z()), -1.0, 1.0));
    return eq;
}

} // namespace

double free_energy(const MaterialParams& p, const FieldConfig& f, const Vec3& r1, const Vec3& r2)
{
    check_unit(r1);
    check_unit(r2);
    const Vec3 h = f.vector();
    return p.exchange_field * r1.dot(r2) - p.dm_field * r1.cross(r2).y()
        - p.anisotropy_a * (r1.x() * r1.x() + r2.x() * r2.x())
        - p.anisotropy_c * (r1.z() * r1.z() + r2.z() * r2.z()) - h.dot(r1 + r2);
}

void effective_fields(const MaterialParams& p, const FieldConfig& f, const Vec3& r1, const Vec3& r2,
                      Vec3& h1, Vec3& h2)
{
    const Vec6 g = energy_hessian(p) * stack(r1, r2) - zeeman(f);
    h1 = -g.head<3>();
    h2 = -g.tail<3>();
}

Vec6 llg_rhs(const MaterialParams& p, const FieldConfig& f, const Vec6& y, double alpha)
{
    const Vec6 heff = zeeman(f) - energy_hessian(p) * y;
    const double pre = -p.gamma / (1 + alpha * alpha);
    Vec6 out;
    for (int s = 0; s < 2; ++s) {
        const Vec3 r = y.segment<3>(3 * s);
        const Vec3 hh = heff.segment<3>(3 * s);
        const Vec3 rxh = r.cross(hh);
        out.segment<3>(3 * s) = pre * (rxh + alpha * r.cross(rxh));
    }
    return out;
}

EquilibriumState find_equilibrium(const MaterialParams& p, const FieldConfig& f,
                                  const std::optional<EquilibriumState>& warm, const EquilibriumOptions& opt)
{
    p.validate();
    f.validate();
    const Mat6 q = energy_hessian(p);
    const Vec6 h = zeeman(f);
    if (warm) {
        Attempt a = newton(q, h, warm->r1, warm->r2, opt);
        if (a.ok) return finish(a);
    }
    std::optional<Attempt> best;
    Attempt last{};
    const double tie = 1e-12 * std::max(1.0, p.exchange_field);
    for (const auto& [s1, s2] : seeds(f)) {
        Attempt a = newton(q, h, s1, s2, opt);
        last = a;
        if (!a.ok) continue;
        if (!best || a.energy < best->energy - tie) {
            best = a;
            continue;
        }
        if (std::abs(a.energy - best->energy) <= tie) {
            // degenerate domains: prefer F along +c, then R1 along +a
            auto key = [](const Vec6& y) { return std::make_pair(y(2) + y(5), y(0)); };
            auto ka = key(a.y), kb = key(best->y);
            if (ka.first > kb.first + 1e-9 || (std::abs(ka.first - kb.first) <= 1e-9 && ka.second > kb.second))
                best = a;
        }
    }
    if (!best)
        throw NonConvergenceError("equilibrium search did not converge", last.y.head<3>(), last.y.tail<3>(), last.grad);
    return finish(*best);
}

double alignment_field(const MaterialParams& p, double theta_deg, double h_max, double tol)
{
    auto aligned = [](const EquilibriumState& e) { return (e.r1 - e.r2).norm() < 1e-9; };
    EquilibriumState left = find_equilibrium(p, {0, theta_deg});
    if (aligned(left)) return 0;
    double hl = 0;
    const double step = std::max(h_max / 400, tol);
    for (double h = step; h <= h_max + 1e-12; h += step) {
        EquilibriumState right = find_equilibrium(p, {h, theta_deg}, left);
        if (aligned(right)) {
            double hr = h;
            while (hr - hl > tol) {
                const double hm = 0.5 * (hl + hr);
                EquilibriumState mid = find_equilibrium(p, {hm, theta_deg}, left);
                if (aligned(mid)) {
                    hr = hm;
                } else {
                    hl = hm;
                    left = mid;
                }
            }
            return 0.5 * (hl + hr);
        }
        left = right;
        hl = h;
    }
    throw NumericalError("no alignment transition below h_max");
}

namespace {

Mat6 flow_jacobian(const MaterialParams& p, const FieldConfig& f, const Vec6& y, double alpha)
{
    Mat6 jac;
    const double eps = 1e-6;
    for (int k = 0; k < 6; ++k) {
        Vec6 a = y, b = y;
        a(k) += eps;
        b(k) -= eps;
        jac.col(k) = (llg_rhs(p, f, a, alpha) - llg_rhs(p, f, b, alpha)) / (2 * eps);
    }
    return jac;
}

} // namespace

double fastest_mode(const MaterialParams& p, const FieldConfig& f, const EquilibriumState& eq)
{
    // analytic Jacobian of the undamped flow
    const Mat6 q = energy_hessian(p);
    const Vec6 y = stack(eq.r1, eq.r2);
    const Vec6 heff = zeeman(f) - q * y;
    Mat6 jac = Mat6::Zero();
    for (int s = 0; s < 2; ++s) {
        const Vec3 r = y.segment<3>(3 * s);
        const Vec3 hh = heff.segment<3>(3 * s);
        jac.block<3, 3>(3 * s, 3 * s) += p.gamma * cross_matrix(hh);
        jac.block<3, 6>(3 * s, 0) += p.gamma * cross_matrix(r) * q.block<3, 6>(3 * s, 0);
    }
    Eigen::EigenSolver<Mat6> es(jac, false);
    return es.eigenvalues().imag().cwiseAbs().maxCoeff();
}

EquilibriumState apply_impulse(const EquilibriumState& eq, const Impulse& imp)
{
    EquilibriumState out = eq;
    if (imp.angle == 0) return out;
    if (imp.axis.norm() == 0) throw ConfigError("impulse axis must be nonzero");
    const Eigen::AngleAxisd rot(imp.angle, imp.axis.normalized());
    out.r1 = rot * eq.r1;
    out.r2 = rot * eq.r2;
    return out;
}

Trajectory integrate_llg(const MaterialParams& p, const FieldConfig& f, const EquilibriumState& initial,
                         double duration, double dt)
{
    p.validate();
    f.validate();
    if (!(dt > 0) || !(duration >= 0)) throw ConfigError("dt must be > 0 and duration >= 0");
    check_unit(initial.r1);
    check_unit(initial.r2);
    const double wmax = fastest_mode(p, f, initial);
    if (wmax > 0 && 2 * std::numbers::pi / wmax / dt < 20)
        throw ConfigError("dt too coarse: fewer than 20 steps per fastest magnon period");

    const double alpha = p.gilbert_damping;
    const auto steps = static_cast<long>(std::llround(duration / dt));
    Trajectory tr;
    tr.dt = dt;
    tr.samples.reserve(steps + 1);
    Vec6 y = stack(initial.r1, initial.r2);
    auto record = [&](double t) {
        tr.samples.push_back({t, y.head<3>(), y.tail<3>(), y.head<3>() + y.tail<3>(), y.head<3>() - y.tail<3>()});
    };
    record(0);
    for (long n = 0; n < steps; ++n) {
        // implicit midpoint, Newton on the 6x6 system
        Vec6 z = y + dt * llg_rhs(p, f, y, alpha);
        for (int it = 0; it < 50; ++it) {
            const Vec6 mid = 0.5 * (y + z);
            const Vec6 res = z - y - dt * llg_rhs(p, f, mid, alpha);
            if (res.cwiseAbs().maxCoeff() < 1e-15) break;
            const Mat6 jm = Mat6::Identity() - 0.5 * dt * flow_jacobian(p, f, mid, alpha);
            const Vec6 dz = jm.partialPivLu().solve(res);
            z -= dz;
            if (dz.cwiseAbs().maxCoeff() < 1e-16) break;
            if (it == 49) throw NumericalError("midpoint Newton iteration failed");
        }
        z.head<3>().normalize();
        z.tail<3>().normalize();
        y = z;
        record((n + 1) * dt);
    }
    return tr;
}

} // namespace magnon
