#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "magnon/errors.hpp"
#include "magnon/harness.hpp"
#include "magnon/linearization.hpp"

namespace magnon {

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();
constexpr double thz = 2e12 * std::numbers::pi;

const std::vector<std::string> param_keys = {"exchange_field_T", "dm_field_T", "anisotropy_a_T",
                                             "anisotropy_c_T", "gamma_rad_per_s_per_T", "gilbert_damping"};

} // namespace

MaterialParams params_from_json_text(const std::string& text)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("parameter file is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("parameter file must contain a JSON object");
    for (const auto& [key, value] : j.items()) {
        if (std::find(param_keys.begin(), param_keys.end(), key) == param_keys.end())
            throw ConfigError("unknown parameter key: " + key);
        if (!value.is_number()) throw ConfigError("parameter " + key + " must be a number");
    }
    auto need = [&](const char* k) {
        if (!j.contains(k)) throw ConfigError(std::string("missing parameter key: ") + k);
        return j[k].get<double>();
    };
    MaterialParams p;
    p.exchange_field = need("exchange_field_T");
    p.dm_field = need("dm_field_T");
    p.anisotropy_a = need("anisotropy_a_T");
    p.anisotropy_c = need("anisotropy_c_T");
    p.gamma = need("gamma_rad_per_s_per_T");
    p.gilbert_damping = j.value("gilbert_damping", 0.0);
    p.validate();
    return p;
}

MaterialParams load_params(const std::filesystem::path& file)
{
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot read parameter file: " + file.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return params_from_json_text(ss.str());
}

PointResult evaluate_point(const MaterialParams& p, const FieldConfig& f, const std::optional<EquilibriumState>& warm)
{
    PointResult r;
    SweepRecord& rec = r.record;
    rec.theta = f.theta_deg;
    rec.field = f.magnitude;
    rec.omega_fm = rec.omega_afm = rec.omega_lower = rec.omega_upper = nan;
    rec.g1 = rec.g2 = rec.vbss = rec.vrss = rec.suppression_db = nan;
    try {
        r.eq = find_equilibrium(p, f, warm);
        const LinearizedDynamics lin = linearize(p, f, *r.eq);
        const HopfieldParams hp = coupling_strengths(lin);
        r.hp = hp;
        rec.omega_fm = hp.omega_a / thz;
        rec.omega_afm = hp.omega_b / thz;
        rec.g1 = hp.g1 / thz;
        rec.g2 = hp.g2 / thz;
        const Phase ph = phase_boundary(hp);
        rec.phase = to_string(ph);
        if (ph != Phase::normal) return r;

        const ModeFrequencies mf = coupled_frequencies(lin);
        const auto [lo, up] = coupled_eigenfrequencies(hp);
        if (std::abs(lo - mf.omega_minus) > 1e-9 * mf.omega_minus || std::abs(up - mf.omega_plus) > 1e-9 * mf.omega_plus)
            throw NumericalError("coupled frequencies from the Hopfield model disagree with the linearization");
        rec.omega_lower = mf.omega_minus / thz;
        rec.omega_upper = mf.omega_plus / thz;

        const BlochSiegert bs = vbss_vrss(hp);
        rec.vbss = bs.vbss / thz;
        rec.vrss = bs.vrss / thz;
        r.squeeze = minimize_variance(bogoliubov_transform(hp));
        rec.suppression_db = r.squeeze->suppression_db;
    } catch (const NumericalError& e) {
        rec.phase = std::string("error:") + e.code();
    } catch (const std::invalid_argument&) {
        rec.phase = "error:precondition";
    }
    return r;
}

std::vector<double> parse_range(const std::string& spec)
{
    std::vector<double> parts;
    std::stringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ':')) {
        try {
            size_t used = 0;
            parts.push_back(std::stod(tok, &used));
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw ConfigError("bad field range '" + spec + "' (expected min:max:step)");
        }
    }
    if (parts.size() == 1) return parts;
    if (parts.size() != 3) throw ConfigError("bad field range '" + spec + "' (expected min:max:step)");
    const double lo = parts[0], hi = parts[1], step = parts[2];
    if (!(step > 0)) throw ConfigError("field step must be > 0");
    if (hi < lo) throw ConfigError("field range max < min");
    const auto n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
    std::vector<double> out;
    for (long k = 0; k <= n; ++k) out.push_back(lo + k * step);
    return out;
}

std::vector<double> parse_list(const std::string& spec)
{
    std::vector<double> out;
    std::stringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            size_t used = 0;
            out.push_back(std::stod(tok, &used));
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw ConfigError("bad number list '" + spec + "'");
        }
    }
    if (out.empty()) throw ConfigError("empty number list");
    return out;
}

std::vector<SweepRecord> run_sweep(const MaterialParams& p, std::vector<double> thetas,
                                   const std::vector<double>& fields, unsigned threads)
{
    p.validate();
    std::sort(thetas.begin(), thetas.end());
    thetas.erase(std::unique(thetas.begin(), thetas.end()), thetas.end());
    for (double t : thetas) FieldConfig{0, t}.validate();
    for (double h : fields) FieldConfig{h, 0}.validate();
    if (!std::is_sorted(fields.begin(), fields.end())) throw ConfigError("field grid must be ascending");

    // one worker per theta: warm starts run along the field axis
    std::vector<std::vector<SweepRecord>> per(thetas.size());
    std::atomic<size_t> next{0};
    auto work = [&] {
        for (size_t i; (i = next++) < thetas.size();) {
            std::optional<EquilibriumState> warm;
            for (double h : fields) {
                PointResult r = evaluate_point(p, {h, thetas[i]}, warm);
                if (r.eq) warm = r.eq;
                per[i].push_back(std::move(r.record));
            }
        }
    };
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, std::max<size_t>(1, thetas.size()));
    std::vector<std::thread> pool;
    for (unsigned k = 1; k < threads; ++k) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();

    std::vector<SweepRecord> out;
    for (auto& v : per) out.insert(out.end(), v.begin(), v.end());
    return out;
}

const std::vector<std::string> sweep_columns = {
    "theta_deg", "field_T", "omega_fm_THz", "omega_afm_THz", "omega_lower_THz", "omega_upper_THz",
    "g1_THz",    "g2_THz",  "vbss_THz",     "vrss_THz",      "suppression_db",  "phase"};

std::string format_number(double v)
{
    if (std::isnan(v)) return "nan";
    if (v == 0) v = 0; // drop the sign of -0
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

namespace {

std::vector<double> numeric_fields(const SweepRecord& r)
{
    return {r.theta, r.field, r.omega_fm, r.omega_afm, r.omega_lower, r.omega_upper,
            r.g1,    r.g2,    r.vbss,     r.vrss,      r.suppression_db};
}

double parse_number(const std::string& s)
{
    if (s == "nan") return nan;
    size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw ConfigError("bad CSV number: " + s);
    return v;
}

} // namespace

void write_csv(std::ostream& os, const std::vector<SweepRecord>& rows)
{
    for (size_t k = 0; k < sweep_columns.size(); ++k) os << (k ? "," : "") << sweep_columns[k];
    os << '\n';
    for (const auto& r : rows) {
        for (double v : numeric_fields(r)) os << format_number(v) << ',';
        os << r.phase << '\n';
    }
}

std::vector<SweepRecord> read_csv(std::istream& is)
{
    std::string line;
    if (!std::getline(is, line)) throw ConfigError("empty CSV");
    {
        std::stringstream ss(line);
        std::string tok;
        std::vector<std::string> head;
        while (std::getline(ss, tok, ',')) head.push_back(tok);
        if (head != sweep_columns) throw ConfigError("unexpected CSV header");
    }
    std::vector<SweepRecord> out;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string tok;
        std::vector<std::string> cells;
        while (std::getline(ss, tok, ',')) cells.push_back(tok);
        if (cells.size() != sweep_columns.size()) throw ConfigError("bad CSV row: " + line);
        SweepRecord r;
        double* dst[] = {&r.theta, &r.field, &r.omega_fm, &r.omega_afm, &r.omega_lower, &r.omega_upper,
                         &r.g1,    &r.g2,    &r.vbss,     &r.vrss,      &r.suppression_db};
        for (size_t k = 0; k < 11; ++k) *dst[k] = parse_number(cells[k]);
        r.phase = cells[11];
        out.push_back(std::move(r));
    }
    return out;
}

void write_json(std::ostream& os, const std::vector<SweepRecord>& rows)
{
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
        nlohmann::ordered_json o;
        const auto vals = numeric_fields(r);
        for (size_t k = 0; k < vals.size(); ++k) {
            if (std::isnan(vals[k])) o[sweep_columns[k]] = nullptr;
            else o[sweep_columns[k]] = std::stod(format_number(vals[k]));
        }
        o["phase"] = r.phase;
        arr.push_back(std::move(o));
    }
    os << arr.dump(2) << '\n';
}

void check_output(const std::filesystem::path& out, bool force)
{
    if (std::filesystem::exists(out) && !force)
        throw ConfigError("output file exists (use --force to overwrite): " + out.string());
}

} // namespace magnon
