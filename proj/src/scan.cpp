#include <cmath>
#include <limits>
#include <numbers>

#include "magnon/errors.hpp"
#include "magnon/harness.hpp"

namespace magnon {

namespace {

constexpr double thz = 2e12 * std::numbers::pi;

HopfieldParams with_g2(const HopfieldParams& base, double g2_abs)
{
    HopfieldParams hp = base;
    hp.g2 = std::copysign(g2_abs, base.g2);
    return hp;
}

// strict normal-phase test, no tolerance band
bool normal(const HopfieldParams& hp)
{
    const double w = hp.omega_a * hp.omega_b;
    return phase_expression(hp) > 0 && std::pow(std::abs(hp.g1) + std::abs(hp.g2), 2) < w;
}

} // namespace

double critical_g2(const HopfieldParams& base)
{
    if (!(base.omega_a > 0 && base.omega_b > 0)) throw PreconditionError("decoupled frequencies must be positive");
    double lo = 0, hi = std::sqrt(base.omega_a * base.omega_b);
    if (!normal(with_g2(base, lo))) throw DomainError("base parameters are not in the normal phase at g2 = 0");
    while (hi - lo > 1e-15 * hi) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        (normal(with_g2(base, mid)) ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

ScanResult scan_g2(const HopfieldParams& base, const std::vector<double>& g2_abs_thz)
{
    ScanResult out;
    out.base = base;
    out.critical_g2 = critical_g2(base);
    out.critical_residual = phase_expression(with_g2(base, out.critical_g2));
    out.variance_near_critical =
        minimize_variance(bogoliubov_transform(with_g2(base, out.critical_g2 * (1 - 1e-9)))).min_variance;
    for (double g : g2_abs_thz) {
        if (!(g >= 0)) throw ConfigError("|g2| values must be >= 0");
        ScanRow row;
        row.g2_abs = g;
        const HopfieldParams hp = with_g2(base, g * thz);
        row.phase = phase_boundary(hp);
        row.min_variance = row.phase == Phase::normal ? minimize_variance(bogoliubov_transform(hp)).min_variance
                                                      : std::numeric_limits<double>::quiet_NaN();
        out.rows.push_back(row);
    }
    return out;
}

} // namespace magnon
