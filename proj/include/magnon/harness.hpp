#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "magnon/hopfield.hpp"
#include "magnon/spin_model.hpp"
#include "magnon/squeezing.hpp"

namespace magnon {

// ---- parameter files

MaterialParams load_params(const std::filesystem::path& file);
MaterialParams params_from_json_text(const std::string& text);

// ---- sweeps

// frequencies in THz (value / 2pi)
struct SweepRecord {
    double theta = 0, field = 0;
    double omega_fm = 0, omega_afm = 0, omega_lower = 0, omega_upper = 0;
    double g1 = 0, g2 = 0, vbss = 0, vrss = 0;
    double suppression_db = 0;
    std::string phase; // normal | critical | superradiant | error:<code>
};

struct PointResult {
    SweepRecord record;
    std::optional<EquilibriumState> eq;
    std::optional<HopfieldParams> hp;
    std::optional<SqueezingResult> squeeze;
};

// full module chain at one field point; failures are recorded in record.phase
PointResult evaluate_point(const MaterialParams& p, const FieldConfig& f,
                           const std::optional<EquilibriumState>& warm = std::nullopt);

// min:max:step (inclusive of max within 1e-9 step)
std::vector<double> parse_range(const std::string& spec);
std::vector<double> parse_list(const std::string& spec);

std::vector<SweepRecord> run_sweep(const MaterialParams& p, std::vector<double> thetas,
                                   const std::vector<double>& fields, unsigned threads = 0);

extern const std::vector<std::string> sweep_columns;
std::string format_number(double v);
void write_csv(std::ostream& os, const std::vector<SweepRecord>& rows);
std::vector<SweepRecord> read_csv(std::istream& is);
void write_json(std::ostream& os, const std::vector<SweepRecord>& rows);

// refuses to overwrite an existing file unless force
void check_output(const std::filesystem::path& out, bool force);

// ---- FID synthesis

enum class Polarization { a, bc, mixed };

struct FidOptions {
    Impulse impulse{Eigen::Vector3d(1, 1, 1), 1e-3};
    double duration = 200e-12; // s
    double dt = 20e-15;        // s
    int zero_pad = 4;
    bool hann = true;
    double threshold = 0.05; // relative to the largest spectral amplitude
    Polarization polarization = Polarization::mixed;
};

struct SpectralPeak {
    double frequency; // THz
    double amplitude;
    double resolution; // 1/T in THz
};

struct WaveformRecord {
    std::vector<double> t;          // s
    std::vector<double> observable; // dF/dt transverse to propagation, in units of 2pi THz
    std::vector<double> frequency;  // THz
    std::vector<double> power;      // one-sided, sums to the windowed series energy
    std::vector<SpectralPeak> peaks;
    double parseval_error = 0; // relative
};

WaveformRecord synthesize_fid(const MaterialParams& p, const FieldConfig& f, const FidOptions& opt = {});

// spectrum + peaks of an arbitrary uniformly sampled series
WaveformRecord analyze_series(const std::vector<double>& t, const std::vector<double>& x, const FidOptions& opt,
                              double noise_floor);

// ---- artificial |g2| scans

struct ScanRow {
    double g2_abs = 0; // THz
    double min_variance = 0;
    Phase phase = Phase::normal;
};

struct ScanResult {
    HopfieldParams base;
    std::vector<ScanRow> rows;
    double critical_g2 = 0;          // rad/s
    double critical_residual = 0;    // phase expression at critical_g2
    double variance_near_critical = 0; // at critical_g2 * (1 - 1e-9)
};

double critical_g2(const HopfieldParams& base);
ScanResult scan_g2(const HopfieldParams& base, const std::vector<double>& g2_abs_thz);

} // namespace magnon
