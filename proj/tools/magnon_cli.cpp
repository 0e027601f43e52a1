#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "magnon/errors.hpp"
#include "magnon/harness.hpp"
#include "magnon/linearization.hpp"

using namespace magnon;
using ojson = nlohmann::ordered_json;

namespace {

constexpr double thz = 2e12 * std::numbers::pi;

struct Common {
    std::string params = "data/reference_params.json";
    std::string theta = "90";
    std::string field = "30";
    std::string out;
    std::string format = "csv";
    bool force = false;
};

void add_common(CLI::App* app, Common& c)
{
    app->add_option("--params", c.params, "material parameter file (JSON)")->capture_default_str();
    app->add_option("--theta", c.theta, "field tilt from c toward b, degrees (value or comma list)")
        ->capture_default_str();
    app->add_option("--field", c.field, "field magnitude in T, value or min:max:step")->capture_default_str();
    app->add_option("--out", c.out, "output path (stdout if omitted)");
    app->add_option("--format", c.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    app->add_flag("--force", c.force, "overwrite an existing output file");
}

double single_value(const std::vector<double>& v, const char* what)
{
    if (v.size() != 1) throw ConfigError(std::string(what) + " must be a single value for this subcommand");
    return v[0];
}

// writes via a temporary string so a failed run leaves no partial file
void emit(const Common& c, const std::string& text)
{
    if (c.out.empty()) {
        std::cout << text;
        return;
    }
    check_output(c.out, c.force);
    std::ofstream os(c.out, std::ios::binary);
    if (!os) throw ConfigError("cannot write output file: " + c.out);
    os << text;
}

double num(double v) { return std::stod(format_number(v)); }

ojson number_or_null(double v)
{
    if (std::isnan(v)) return nullptr;
    return num(v);
}

int run_sweep_cmd(const Common& c, unsigned threads)
{
    const MaterialParams p = load_params(c.params);
    const auto rows = run_sweep(p, parse_list(c.theta), parse_range(c.field), threads);
    std::ostringstream os;
    if (c.format == "csv") write_csv(os, rows);
    else write_json(os, rows);
    emit(c, os.str());
    size_t failed = 0;
    for (const auto& r : rows)
        if (r.phase.rfind("error:", 0) == 0) ++failed;
    if (failed) {
        std::fprintf(stderr, "%zu of %zu points failed\n", failed, rows.size());
        return 3;
    }
    return 0;
}

int run_single_cmd(const Common& c)
{
    const MaterialParams p = load_params(c.params);
    const FieldConfig f{single_value(parse_range(c.field), "--field"), single_value(parse_list(c.theta), "--theta")};
    f.validate();
    const PointResult r = evaluate_point(p, f);
    std::ostringstream os;
    if (c.format == "csv") {
        write_csv(os, {r.record});
    } else {
        std::ostringstream rows;
        write_json(rows, {r.record});
        ojson j = ojson::parse(rows.str())[0];
        if (r.eq) {
            j["r1"] = {num(r.eq->r1(0)), num(r.eq->r1(1)), num(r.eq->r1(2))};
            j["r2"] = {num(r.eq->r2(0)), num(r.eq->r2(1)), num(r.eq->r2(2))};
            j["beta_z_deg"] = num(r.eq->beta_z * 180 / std::numbers::pi);
        }
        os << j.dump(2) << '\n';
    }
    emit(c, os.str());
    return r.record.phase.rfind("error:", 0) == 0 ? 3 : 0;
}

int run_squeeze_cmd(const Common& c)
{
    const MaterialParams p = load_params(c.params);
    const FieldConfig f{single_value(parse_range(c.field), "--field"), single_value(parse_list(c.theta), "--theta")};
    f.validate();
    const PointResult r = evaluate_point(p, f);
    if (!r.squeeze) {
        std::fprintf(stderr, "no squeezing result: %s\n", r.record.phase.c_str());
        return 3;
    }
    const SqueezingResult& s = *r.squeeze;
    std::ostringstream os;
    if (c.format == "csv") {
        os << "theta_deg,field_T,min_variance,suppression_db,alpha,beta_re,beta_im,phi,orthogonal_variance,"
              "orthogonal_db\n";
        for (double v : {f.theta_deg, f.magnitude, s.min_variance, s.suppression_db, s.optimal.alpha,
                         s.optimal.beta.real(), s.optimal.beta.imag(), s.optimal.phi, s.orthogonal_variance})
            os << format_number(v) << ',';
        os << format_number(s.orthogonal_db) << '\n';
    } else {
        ojson j;
        j["theta_deg"] = num(f.theta_deg);
        j["field_T"] = num(f.magnitude);
        j["min_variance"] = num(s.min_variance);
        j["suppression_db"] = num(s.suppression_db);
        j["alpha"] = num(s.optimal.alpha);
        j["beta"] = {num(s.optimal.beta.real()), num(s.optimal.beta.imag())};
        j["phi"] = num(s.optimal.phi);
        j["orthogonal_variance"] = num(s.orthogonal_variance);
        j["orthogonal_db"] = num(s.orthogonal_db);
        os << j.dump(2) << '\n';
    }
    emit(c, os.str());
    return 0;
}

struct ScanArgs {
    std::string g2 = "0:1:0.01";
};

int run_scan_cmd(const Common& c, const ScanArgs& a)
{
    const MaterialParams p = load_params(c.params);
    const FieldConfig f{single_value(parse_range(c.field), "--field"), single_value(parse_list(c.theta), "--theta")};
    f.validate();
    const EquilibriumState eq = find_equilibrium(p, f);
    const HopfieldParams base = coupling_strengths(linearize(p, f, eq));
    const ScanResult s = scan_g2(base, parse_range(a.g2));
    std::ostringstream os;
    if (c.format == "csv") {
        os << "g2_abs_THz,min_variance,phase\n";
        for (const auto& r : s.rows)
            os << format_number(r.g2_abs) << ',' << format_number(r.min_variance) << ',' << to_string(r.phase) << '\n';
    } else {
        ojson j;
        j["critical_g2_THz"] = num(s.critical_g2 / thz);
        j["critical_residual"] = num(s.critical_residual);
        j["variance_near_critical"] = num(s.variance_near_critical);
        ojson rows = ojson::array();
        for (const auto& r : s.rows)
            rows.push_back({{"g2_abs_THz", num(r.g2_abs)},
                            {"min_variance", number_or_null(r.min_variance)},
                            {"phase", to_string(r.phase)}});
        j["rows"] = rows;
        os << j.dump(2) << '\n';
    }
    emit(c, os.str());
    std::fprintf(stderr, "critical |g2| = %s THz\n", format_number(s.critical_g2 / thz).c_str());
    return 0;
}

struct FidArgs {
    std::vector<double> axis{1, 1, 1};
    double angle = 1e-3;
    double duration_ps = 200;
    double dt_fs = 20;
    std::string polarization = "mixed";
    double threshold = 0.05;
};

int run_fid_cmd(const Common& c, const FidArgs& a)
{
    const MaterialParams p = load_params(c.params);
    const FieldConfig f{single_value(parse_range(c.field), "--field"), single_value(parse_list(c.theta), "--theta")};
    f.validate();
    FidOptions o;
    const Vec3 axis(a.axis[0], a.axis[1], a.axis[2]);
    if (axis.norm() == 0) throw ConfigError("impulse axis must be nonzero");
    o.impulse = {axis.normalized(), a.angle};
    o.duration = a.duration_ps * 1e-12;
    o.dt = a.dt_fs * 1e-15;
    o.threshold = a.threshold;
    o.polarization = a.polarization == "a" ? Polarization::a : a.polarization == "bc" ? Polarization::bc
                                                                                    : Polarization::mixed;
    const WaveformRecord w = synthesize_fid(p, f, o);
    std::ostringstream os;
    if (c.format == "csv") {
        os << "f_THz,power\n";
        for (size_t k = 0; k < w.frequency.size(); ++k)
            os << format_number(w.frequency[k]) << ',' << format_number(w.power[k]) << '\n';
    } else {
        ojson j;
        ojson ts = ojson::array(), sp = ojson::array(), pk = ojson::array();
        for (size_t k = 0; k < w.t.size(); ++k) ts.push_back({num(w.t[k]), num(w.observable[k])});
        for (size_t k = 0; k < w.frequency.size(); ++k) sp.push_back({num(w.frequency[k]), num(w.power[k])});
        for (const auto& q : w.peaks)
            pk.push_back({{"f_THz", num(q.frequency)}, {"amplitude", num(q.amplitude)}, {"resolution_THz", num(q.resolution)}});
        j["time_series"] = ts;
        j["spectrum"] = sp;
        j["peaks"] = pk;
        j["parseval_error"] = num(w.parseval_error);
        os << j.dump(1) << '\n';
    }
    emit(c, os.str());
    for (const auto& q : w.peaks)
        std::fprintf(stderr, "peak %s THz +- %s\n", format_number(q.frequency).c_str(),
                     format_number(q.resolution).c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"two-sublattice magnon coupling, squeezing and FID tool"};
    app.require_subcommand(1);

    Common sweep_c, single_c, squeeze_c, scan_c, fid_c;
    unsigned threads = 0;
    ScanArgs scan_a;
    FidArgs fid_a;

    auto* sweep = app.add_subcommand("sweep", "theta x field grid through the full chain");
    add_common(sweep, sweep_c);
    sweep->add_option("--threads", threads, "worker threads (0 = hardware)");

    auto* single = app.add_subcommand("single", "one field point with equilibrium details");
    add_common(single, single_c);

    auto* squeeze = app.add_subcommand("squeeze", "optimal two-mode quadrature at one field point");
    add_common(squeeze, squeeze_c);

    auto* scan = app.add_subcommand("scan-g2", "artificial |g2| scan at fixed base parameters");
    add_common(scan, scan_c);
    scan->add_option("--g2", scan_a.g2, "|g2| range in THz, min:max:step")->capture_default_str();

    auto* fid = app.add_subcommand("fid", "free-induction decay waveform and spectrum");
    add_common(fid, fid_c);
    fid->add_option("--axis", fid_a.axis, "impulse rotation axis (a b c)")->expected(3)->capture_default_str();
    fid->add_option("--angle", fid_a.angle, "impulse angle, rad")->capture_default_str();
    fid->add_option("--duration", fid_a.duration_ps, "integration window, ps")->capture_default_str();
    fid->add_option("--dt", fid_a.dt_fs, "time step, fs")->capture_default_str();
    fid->add_option("--polarization", fid_a.polarization, "observable direction")
        ->check(CLI::IsMember({"a", "bc", "mixed"}))
        ->capture_default_str();
    fid->add_option("--threshold", fid_a.threshold, "peak threshold relative to max")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*sweep) return run_sweep_cmd(sweep_c, threads);
        if (*single) return run_single_cmd(single_c);
        if (*squeeze) return run_squeeze_cmd(squeeze_c);
        if (*scan) return run_scan_cmd(scan_c, scan_a);
        if (*fid) return run_fid_cmd(fid_c, fid_a);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const NumericalError& e) {
        std::fprintf(stderr, "numerical failure (%s): %s\n", e.code(), e.what());
        return 3;
    }
    return 0;
}
