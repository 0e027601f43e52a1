#include "magnon/fock_oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <sstream>
#include <vector>

#include <lapacke.h>

#include "magnon/errors.hpp"

namespace magnon {

using cd = std::complex<double>;

namespace {

struct Entry {
    int i, j;
    double v;
};

// rotated-gauge Hamiltonian: wa a+a + wb b+b - g1 (a b+ + a+ b) - g2 (a+ b+ + a b)
template <class Sink>
void hamiltonian_entries(const HopfieldParams& hp, int n, double scale, Sink&& sink)
{
    const double wa = hp.omega_a / scale, wb = hp.omega_b / scale, g1 = hp.g1 / scale, g2 = hp.g2 / scale;
    for (int na = 0; na <= n; ++na)
        for (int nb = 0; nb <= n; ++nb) {
            sink(na, nb, na, nb, wa * na + wb * nb);
            if (na > 0 && nb < n) sink(na - 1, nb + 1, na, nb, -g1 * std::sqrt(na * (nb + 1.0)));
            if (nb > 0 && na < n) sink(na + 1, nb - 1, na, nb, -g1 * std::sqrt((na + 1.0) * nb));
            if (na < n && nb < n) sink(na + 1, nb + 1, na, nb, -g2 * std::sqrt((na + 1.0) * (nb + 1.0)));
            if (na > 0 && nb > 0) sink(na - 1, nb - 1, na, nb, -g2 * std::sqrt(na * double(nb)));
        }
}

struct Sector {
    std::vector<int> full;  // sector index -> full index
    std::vector<int> local; // full index -> sector index or -1
};

Sector make_sector(int n, int parity)
{
    Sector s;
    s.local.assign((n + 1) * (n + 1), -1);
    for (int na = 0; na <= n; ++na)
        for (int nb = 0; nb <= n; ++nb)
            if ((na + nb) % 2 == parity) {
                s.local[na * (n + 1) + nb] = static_cast<int>(s.full.size());
                s.full.push_back(na * (n + 1) + nb);
            }
    return s;
}

struct Band {
    int dim = 0, kd = 0;
    std::vector<double> ab; // LAPACK upper band storage, column major
};

Band band_matrix(const HopfieldParams& hp, int n, double scale, const Sector& sec)
{
    std::vector<Entry> entries;
    Band b;
    hamiltonian_entries(hp, n, scale, [&](int ia, int ib, int ja, int jb, double v) {
        const int i = sec.local[ia * (n + 1) + ib], j = sec.local[ja * (n + 1) + jb];
        if (i < 0 || j < 0 || i > j) return;
        entries.push_back({i, j, v});
        b.kd = std::max(b.kd, j - i);
    });
    b.dim = static_cast<int>(sec.full.size());
    b.ab.assign(static_cast<size_t>(b.kd + 1) * b.dim, 0.0);
    for (const auto& e : entries) b.ab[(b.kd + e.i - e.j) + static_cast<size_t>(e.j) * (b.kd + 1)] += e.v;
    return b;
}

std::vector<double> lowest_values(Band b, int count)
{
    count = std::min(count, b.dim);
    std::vector<double> w(b.dim);
    std::vector<lapack_int> ifail(b.dim);
    lapack_int found = 0;
    double dummy = 0;
    const lapack_int info = LAPACKE_dsbevx(LAPACK_COL_MAJOR, 'N', 'I', 'U', b.dim, b.kd, b.ab.data(), b.kd + 1, &dummy,
                                           1, 0.0, 0.0, 1, count, 2 * LAPACKE_dlamch('S'), &found, w.data(), &dummy,
                                           1, ifail.data());
    if (info != 0 || found != count) throw NumericalError("banded eigensolver failed in the Fock oracle");
    w.resize(count);
    return w;
}

// eigenvector for the lowest eigenvalue e0 by shifted inverse iteration (banded Cholesky)
Eigen::VectorXd lowest_vector(Band b, double e0)
{
    const double shift = e0 - 1e-9;
    for (int j = 0; j < b.dim; ++j) b.ab[b.kd + static_cast<size_t>(j) * (b.kd + 1)] -= shift;
    if (LAPACKE_dpbtrf(LAPACK_COL_MAJOR, 'U', b.dim, b.kd, b.ab.data(), b.kd + 1) != 0)
        throw NumericalError("inverse iteration factorization failed in the Fock oracle");
    Eigen::VectorXd v = Eigen::VectorXd::Ones(b.dim).normalized();
    for (int it = 0; it < 4; ++it) {
        LAPACKE_dpbtrs(LAPACK_COL_MAJOR, 'U', b.dim, b.kd, 1, b.ab.data(), b.kd + 1, v.data(), b.dim);
        v.normalize();
    }
    return v;
}

void check_space(const HopfieldParams& hp, int cutoff)
{
    if (cutoff < 10) throw PreconditionError("cutoff must be >= 10");
    if (cutoff > max_cutoff) throw PreconditionError("cutoff above memory guard (120)");
    if (phase_boundary(hp) != Phase::normal) throw SoftModeError("Fock oracle requires the normal phase", phase_expression(hp));
}

// apply a, a+, b', b'+ (rotated gauge) on the full basis
Eigen::VectorXcd apply(const Eigen::VectorXcd& v, int n, int mode, bool raise)
{
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(v.size());
    for (int na = 0; na <= n; ++na)
        for (int nb = 0; nb <= n; ++nb) {
            const cd x = v(na * (n + 1) + nb);
            if (x == cd(0)) continue;
            int ma = na, mb = nb;
            double amp;
            int& k = mode == 0 ? ma : mb;
            if (raise) {
                if (k == n) continue; // truncated
                amp = std::sqrt(k + 1.0);
                ++k;
            } else {
                if (k == 0) continue;
                amp = std::sqrt(double(k));
                --k;
            }
            out(ma * (n + 1) + mb) += amp * x;
        }
    return out;
}

// quadratures (X_a0, X_a90, X_b0, X_b90) of the original modes applied to psi; b = -i b'
std::array<Eigen::VectorXcd, 4> quadratures(const FockGroundState& gs)
{
    const int n = gs.cutoff;
    const Eigen::VectorXcd psi = gs.amplitudes.cast<cd>();
    const cd i(0, 1);
    const Eigen::VectorXcd a = apply(psi, n, 0, false), ad = apply(psi, n, 0, true);
    const Eigen::VectorXcd b = -i * apply(psi, n, 1, false), bd = i * apply(psi, n, 1, true);
    return {0.5 * (a + ad), 0.5 * i * (a - ad), 0.5 * (b + bd), 0.5 * i * (b - bd)};
}

} // namespace

Eigen::MatrixXd fock_hamiltonian(const HopfieldParams& hp, int cutoff, double scale)
{
    if (cutoff > max_cutoff) throw PreconditionError("cutoff above memory guard (120)");
    const int n = cutoff, dim = (n + 1) * (n + 1);
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    hamiltonian_entries(hp, n, scale, [&](int ia, int ib, int ja, int jb, double v) {
        h(ia * (n + 1) + ib, ja * (n + 1) + jb) += v;
    });
    return h;
}

FockResult build_and_diagonalize(const HopfieldParams& hp, int cutoff)
{
    check_space(hp, cutoff);
    const int n = cutoff;
    const double scale = std::max(hp.omega_a, hp.omega_b);
    const Sector even = make_sector(n, 0), odd = make_sector(n, 1);

    const Band he = band_matrix(hp, n, scale, even), ho = band_matrix(hp, n, scale, odd);
    const double e0 = lowest_values(he, 1)[0];
    const Eigen::VectorXd g = lowest_vector(he, e0);
    FockResult out;
    out.ground_energy = e0 * scale;
    out.ground.cutoff = n;
    out.ground.amplitudes = Eigen::VectorXd::Zero((n + 1) * (n + 1));
    for (size_t k = 0; k < even.full.size(); ++k) out.ground.amplitudes(even.full[k]) = g(k);
    out.ground.amplitudes.normalize();
    // fix sign: vacuum amplitude positive
    if (out.ground.amplitudes(0) < 0) out.ground.amplitudes *= -1;

    // odd-parity levels are (n_L, n_U) combinations with n_L + n_U odd: the lower gap is the first,
    // the upper gap is the first level that is not an odd multiple of the lower one
    for (int count = 6;; count *= 2) {
        const std::vector<double> o = lowest_values(ho, count);
        const double e1 = o[0] - e0;
        int next_multiple = 3;
        for (size_t k = 1; k < o.size(); ++k) {
            const double e = o[k] - e0;
            if (std::abs(e - next_multiple * e1) < 1e-5 * e) {
                next_multiple += 2;
                continue;
            }
            out.gap_lower = e1 * scale;
            out.gap_upper = e * scale;
            return out;
        }
        if (count >= static_cast<int>(odd.full.size()))
            throw NumericalError("could not identify the upper single-quasiparticle gap");
    }
}

double oracle_variance(const FockGroundState& gs, const SqueezingQuery& q)
{
    q.validate();
    const auto x = quadratures(gs);
    // X = sum Re(u_m) X_m0 + Im(u_m) X_m90 with u = e^{i phi} (alpha, beta)
    const cd ua = std::polar(1.0, q.phi) * q.alpha, ub = std::polar(1.0, q.phi) * q.beta;
    const Eigen::VectorXcd v = ua.real() * x[0] + ua.imag() * x[1] + ub.real() * x[2] + ub.imag() * x[3];
    const Eigen::VectorXcd psi = gs.amplitudes.cast<cd>();
    const double mean = psi.dot(v).real();
    return v.squaredNorm() - mean * mean;
}

double oracle_min_variance(const FockGroundState& gs)
{
    const auto x = quadratures(gs);
    const Eigen::VectorXcd psi = gs.amplitudes.cast<cd>();
    Eigen::Vector4d mean;
    for (int k = 0; k < 4; ++k) mean(k) = psi.dot(x[k]).real();
    Eigen::Matrix4d cov;
    for (int k = 0; k < 4; ++k)
        for (int l = 0; l < 4; ++l) cov(k, l) = x[k].dot(x[l]).real() - mean(k) * mean(l);
    return Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d>(cov).eigenvalues().minCoeff();
}

TruncatedSpace converge(const HopfieldParams& hp, int cutoff, double tol)
{
    TruncatedSpace ts;
    ts.cutoff = cutoff;
    ts.result = build_and_diagonalize(hp, cutoff);
    const FockResult ref = build_and_diagonalize(hp, cutoff - 10);
    auto& r = ts.convergence_report;
    r.cutoff = cutoff;
    r.reference_cutoff = cutoff - 10;
    r.gap_change = std::max(std::abs(ts.result.gap_lower - ref.gap_lower) / ts.result.gap_lower,
                            std::abs(ts.result.gap_upper - ref.gap_upper) / ts.result.gap_upper);
    r.variance_change = std::abs(oracle_min_variance(ts.result.ground) - oracle_min_variance(ref.ground));
    r.converged = r.gap_change < tol && r.variance_change < tol;
    return ts;
}

} // namespace magnon
