#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>

#include <fftw3.h>

#include "magnon/errors.hpp"
#include "magnon/harness.hpp"

namespace magnon {

namespace {

// observable in units of 2pi THz
constexpr double omega_unit = 2e12 * std::numbers::pi;

// fftw planning is not thread-safe
std::mutex plan_mutex;

std::vector<std::complex<double>> real_fft(std::vector<double> in)
{
    const int n = static_cast<int>(in.size());
    std::vector<std::complex<double>> out(n / 2 + 1);
    fftw_plan plan;
    {
        std::lock_guard lock(plan_mutex);
        plan = fftw_plan_dft_r2c_1d(n, in.data(), reinterpret_cast<fftw_complex*>(out.data()), FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard lock(plan_mutex);
        fftw_destroy_plan(plan);
    }
    return out;
}

} // namespace

WaveformRecord analyze_series(const std::vector<double>& t, const std::vector<double>& x, const FidOptions& opt,
                              double noise_floor)
{
    if (t.size() != x.size() || t.size() < 4) throw ConfigError("series too short for spectral analysis");
    const size_t n = x.size();
    const double dt = t[1] - t[0];
    const double window_len = dt * static_cast<double>(n - 1);

    WaveformRecord rec;
    rec.t = t;
    rec.observable = x;

    double mean = 0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(n);
    const size_t m = n * static_cast<size_t>(std::max(1, opt.zero_pad));
    std::vector<double> buf(m, 0.0);
    double peak_time = 0;
    for (size_t k = 0; k < n; ++k) {
        const double w = opt.hann ? 0.5 * (1 - std::cos(2 * std::numbers::pi * k / static_cast<double>(n - 1))) : 1.0;
        buf[k] = w * (x[k] - mean);
        peak_time = std::max(peak_time, std::abs(x[k] - mean));
    }
    double energy = 0;
    for (double v : buf) energy += v * v;

    const auto spec = real_fft(buf);
    rec.frequency.resize(spec.size());
    rec.power.resize(spec.size());
    double total = 0;
    for (size_t k = 0; k < spec.size(); ++k) {
        const bool edge = k == 0 || (m % 2 == 0 && k == m / 2);
        rec.frequency[k] = static_cast<double>(k) / (static_cast<double>(m) * dt) * 1e-12;
        rec.power[k] = (edge ? 1.0 : 2.0) * std::norm(spec[k]) / static_cast<double>(m);
        total += rec.power[k];
    }
    rec.parseval_error = energy > 0 ? std::abs(total - energy) / energy : std::abs(total);

    if (peak_time <= noise_floor) return rec;
    std::vector<double> amp(rec.power.size());
    for (size_t k = 0; k < amp.size(); ++k) amp[k] = std::sqrt(rec.power[k]);
    const double top = *std::max_element(amp.begin(), amp.end());
    const double df = rec.frequency.size() > 1 ? rec.frequency[1] : 0;
    for (size_t k = 1; k + 1 < amp.size(); ++k) {
        if (!(amp[k] > amp[k - 1] && amp[k] >= amp[k + 1] && amp[k] >= opt.threshold * top)) continue;
        // parabolic interpolation on the amplitude
        const double a = amp[k - 1], b = amp[k], c = amp[k + 1];
        const double den = a - 2 * b + c;
        const double shift = den != 0 ? 0.5 * (a - c) / den : 0.0;
        rec.peaks.push_back({rec.frequency[k] + shift * df, b, 1e-12 / window_len});
    }
    return rec;
}

WaveformRecord synthesize_fid(const MaterialParams& p, const FieldConfig& f, const FidOptions& opt)
{
    const EquilibriumState eq = find_equilibrium(p, f);
    const EquilibriumState start = apply_impulse(eq, opt.impulse);
    const Trajectory tr = integrate_llg(p, f, start, opt.duration, opt.dt);

    // transverse to propagation along the static field direction
    const double th = f.theta_deg * std::numbers::pi / 180;
    const Vec3 e1(1, 0, 0), e2(0, std::cos(th), -std::sin(th));
    Vec3 u;
    switch (opt.polarization) {
    case Polarization::a: u = e1; break;
    case Polarization::bc: u = e2; break;
    case Polarization::mixed: u = (e1 + e2).normalized(); break;
    }
    std::vector<double> t, x;
    t.reserve(tr.samples.size());
    x.reserve(tr.samples.size());
    for (const auto& s : tr.samples) {
        Eigen::Matrix<double, 6, 1> y;
        y << s.r1, s.r2;
        const auto d = llg_rhs(p, f, y, p.gilbert_damping);
        t.push_back(s.t);
        x.push_back(u.dot(d.head<3>() + d.tail<3>()) / omega_unit);
    }
    return analyze_series(t, x, opt, 1e-10 * p.gamma * p.exchange_field / omega_unit);
}

} // namespace magnon
