#include "config.hpp"

#include <wfsim/errors.hpp>
#include <wfsim/experiments.hpp>
#include <wfsim/io.hpp>

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace wfsim::cli {

using nlohmann::json;

namespace {

struct Source {
    std::string text;
    std::string name;
};

// Best-effort line of a key path: find each quoted key in order.
std::size_t locate_line(const std::string& text, const std::vector<std::string>& keys)
{
    std::size_t pos = 0;
    bool found = false;
    for (const auto& k : keys) {
        if (k.empty() || k.front() == '[') continue;
        const auto at = text.find("\"" + k + "\"", pos);
        if (at == std::string::npos) break;
        pos = at;
        found = true;
    }
    if (!found) return 0;
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n'));
}

class Section {
public:
    Section(const json& j, std::vector<std::string> keys, const Source& src) : j_(j), keys_(std::move(keys)), src_(src)
    {
        if (!j_.is_object()) fail({}, "expected an object");
    }

    std::string path(const std::string& key = {}) const
    {
        std::string p;
        for (const auto& k : keys_) {
            if (!p.empty() && k.front() != '[') p += '.';
            p += k;
        }
        if (!key.empty()) p += (p.empty() ? "" : ".") + key;
        return p.empty() ? "<root>" : p;
    }

    [[noreturn]] void fail(const std::string& key, const std::string& msg) const
    {
        auto keys = keys_;
        if (!key.empty()) keys.push_back(key);
        const auto line = locate_line(src_.text, keys);
        if (line > 0) throw config_error(fmt::format("{}:{}: {}: {}", src_.name, line, path(key), msg));
        throw config_error(fmt::format("{}: {}: {}", src_.name, path(key), msg));
    }

    bool has(const std::string& key) const { return j_.contains(key); }

    const json* raw(const std::string& key)
    {
        seen_.insert(key);
        auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    Section child(const std::string& key)
    {
        const json* v = raw(key);
        if (!v) fail(key, "missing section");
        auto keys = keys_;
        keys.push_back(key);
        return Section(*v, std::move(keys), src_);
    }

    // Elements of an array-valued key, each as a section of its own.
    std::vector<Section> elements(const std::string& key)
    {
        const json* v = raw(key);
        if (!v || !v->is_array() || v->empty()) fail(key, "expected a non-empty array");
        std::vector<Section> out;
        for (std::size_t i = 0; i < v->size(); ++i) {
            auto keys = keys_;
            keys.push_back(key);
            keys.push_back(fmt::format("[{}]", i));
            out.emplace_back((*v)[i], std::move(keys), src_);
        }
        return out;
    }

    std::optional<double> number(const std::string& key)
    {
        const json* v = raw(key);
        if (!v) return std::nullopt;
        if (!v->is_number()) fail(key, fmt::format("expected a number, got {}", v->dump()));
        return v->get<double>();
    }

    // Number, or null meaning +infinity.
    std::optional<double> number_or_inf(const std::string& key)
    {
        const json* v = raw(key);
        if (!v) return std::nullopt;
        if (v->is_null()) return std::numeric_limits<double>::infinity();
        if (!v->is_number()) fail(key, fmt::format("expected a number or null, got {}", v->dump()));
        return v->get<double>();
    }

    std::optional<std::uint64_t> count(const std::string& key)
    {
        const json* v = raw(key);
        if (!v) return std::nullopt;
        return to_count(*v, key);
    }

    std::optional<bool> boolean(const std::string& key)
    {
        const json* v = raw(key);
        if (!v) return std::nullopt;
        if (!v->is_boolean()) fail(key, fmt::format("expected true or false, got {}", v->dump()));
        return v->get<bool>();
    }

    std::optional<std::string> string(const std::string& key)
    {
        const json* v = raw(key);
        if (!v) return std::nullopt;
        if (!v->is_string()) fail(key, fmt::format("expected a string, got {}", v->dump()));
        return v->get<std::string>();
    }

    std::optional<std::vector<std::uint64_t>> counts(const std::string& key)
    {
        const json* v = raw(key);
        if (!v) return std::nullopt;
        if (!v->is_array() || v->empty()) fail(key, "expected a non-empty array of positive integers");
        std::vector<std::uint64_t> out;
        for (const auto& e : *v) out.push_back(to_count(e, key));
        return out;
    }

    void reject_unknown() const
    {
        for (const auto& [k, _] : j_.items()) {
            if (!seen_.count(k)) fail(k, "unknown key");
        }
    }

    const json& value() const { return j_; }
    const std::vector<std::string>& keys() const { return keys_; }

private:
    std::uint64_t to_count(const json& v, const std::string& key) const
    {
        if (v.is_number_unsigned()) return v.get<std::uint64_t>();
        if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
        if (v.is_number_float()) {
            const double d = v.get<double>();
            if (d >= 0.0 && d == std::floor(d) && d < 1.8e19) return static_cast<std::uint64_t>(d);
        }
        fail(key, fmt::format("expected a non-negative integer, got {}", v.dump()));
    }

    const json& j_;
    std::vector<std::string> keys_;
    const Source& src_;
    std::set<std::string> seen_;
};

template <typename T>
void assign(T& dst, const std::optional<T>& v)
{
    if (v) dst = *v;
}

void read_sensor(Section& s, SensorParams& p, bool* decoherence)
{
    assign(p.gamma_e, s.number("gamma_e"));
    assign(p.T2_star, s.number_or_inf("T2_star"));
    assign(p.T2, s.number_or_inf("T2"));
    assign(p.contrast, s.number("contrast"));
    assign(p.rabi_freq, s.number("rabi_freq"));
    assign(p.t_pi, s.number("t_pi"));
    assign(p.photon_rate_bright, s.number("photon_rate_bright"));
    assign(p.snr_ref, s.number("snr_ref"));
    assign(p.t_overhead, s.number("t_overhead"));
    if (decoherence) assign(*decoherence, s.boolean("decoherence"));
    s.reject_unknown();
}

void read_waveform(Section s, Config& c, const std::filesystem::path& base_dir)
{
    const auto period = s.number("period");
    const int forms = int(s.has("components")) + int(s.has("samples")) + int(s.has("csv")) + int(s.has("preset"));
    if (forms != 1) s.fail({}, "needs exactly one of components, samples, csv or preset");

    try {
        if (s.has("preset")) {
            const auto preset = *s.string("preset");
            const auto amplitude = s.number("amplitude");
            if (preset == "tone") {
                c.waveform = Waveform::parametric(period.value_or(2.4e-6), {{amplitude.value_or(100e-9), 1, 0.0}});
            } else if (preset == "multi-harmonic") {
                c.waveform = multi_harmonic_waveform(period.value_or(2.4e-6), amplitude.value_or(100e-9));
            } else if (preset == "calibrated-tone") {
                c.preset = WaveformPreset::CalibratedTone;
                c.preset_amplitude = amplitude.value_or(0.04);
                c.preset_period = period.value_or(kScalingPeriod);
                if (!(c.preset_amplitude > 0.0)) s.fail("amplitude", "must be positive");
                if (!(c.preset_period > 0.0)) s.fail("period", "must be positive");
            } else {
                s.fail("preset", fmt::format("unknown preset '{}' (tone, multi-harmonic, calibrated-tone)", preset));
            }
        } else if (!period) {
            s.fail("period", "missing");
        } else if (s.has("components")) {
            std::vector<Harmonic> comps;
            for (auto& h : s.elements("components")) {
                Harmonic hc;
                const auto amplitude = h.number("amplitude");
                if (!amplitude) h.fail("amplitude", "missing");
                hc.amplitude = *amplitude;
                const auto index = h.count("index");
                if (!index || *index < 1) h.fail("index", "missing or not a positive integer");
                hc.index = static_cast<int>(*index);
                assign(hc.phase, h.number("phase"));
                h.reject_unknown();
                comps.push_back(hc);
            }
            c.waveform = Waveform::parametric(*period, std::move(comps));
        } else if (s.has("samples")) {
            const json* arr = s.raw("samples");
            if (!arr->is_array()) s.fail("samples", "expected an array of [t_seconds, b_tesla] pairs");
            std::vector<Sample> samples;
            for (const auto& e : *arr) {
                if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
                    s.fail("samples", fmt::format("expected [t_seconds, b_tesla], got {}", e.dump()));
                samples.push_back({e[0].get<double>(), e[1].get<double>()});
            }
            c.waveform = Waveform::tabulated(*period, std::move(samples));
        } else {
            std::filesystem::path csv = *s.string("csv");
            if (csv.is_relative()) csv = base_dir / csv;
            c.waveform = load_waveform_csv(csv, *period);
        }
    } catch (const config_error&) {
        throw;
    } catch (const std::exception& e) {
        s.fail({}, e.what());
    }
    s.reject_unknown();
}

std::vector<int> to_ints(Section& s, const std::string& key, const std::vector<std::uint64_t>& v)
{
    std::vector<int> out;
    for (auto x : v) {
        if (x > 1'000'000'000) s.fail(key, "value too large");
        out.push_back(static_cast<int>(x));
    }
    return out;
}

} // namespace

SensorParams Config::effective_sensor() const
{
    return decoherence ? sensor : sensor.without_decoherence();
}

ReadoutModel Config::readout(std::uint64_t s) const
{
    if (noise == "none") return ReadoutModel::noiseless(s);
    if (noise == "poisson") {
        auto m = ReadoutModel::poisson(effective_sensor(), shots, s);
        if (photons_per_shot_bright) m.photons_per_shot_bright = *photons_per_shot_bright;
        return m;
    }
    return ReadoutModel::calibrated(phase_noise, shots, s);
}

std::optional<Waveform> Config::truth() const
{
    if (preset == WaveformPreset::CalibratedTone)
        return calibrated_tone(preset_period, t_s, effective_sensor(), preset_amplitude);
    return waveform;
}

Waveform Config::require_truth() const
{
    auto w = truth();
    if (!w) throw config_error("config: waveform: missing section (this command needs a truth waveform)");
    return *w;
}

void Config::validate() const
{
    try {
        effective_sensor().validate();
        readout(seed).validate();
        if (!(t_s > 0.0)) throw invalid_argument("grid.t_s must be positive");
        if (hql_batches < 1) throw invalid_argument("grid.hql_batches must be >= 1");
        if (seeds < 1) throw invalid_argument("experiment.seeds must be >= 1");
        if (stat_n1 < 1) throw invalid_argument("experiment.stat_n1 must be >= 1");
        if (n1 && *n1 < 1) throw invalid_argument("grid.n1 must be >= 1");
        if (n2 && *n2 < 1) throw invalid_argument("grid.n2 must be >= 1");
        if (N && *N < 1) throw invalid_argument("grid.N must be >= 1");
        if (protocol.k < 1) throw invalid_argument("protocol.k must be >= 1");
        if (!(phase_noise > 0.0)) throw invalid_argument("readout.phase_noise must be positive");
    } catch (const std::invalid_argument& e) {
        throw config_error(fmt::format("config: {}", e.what()));
    }
}

Config parse_config(const std::string& text, const std::string& source, const std::filesystem::path& base_dir)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw config_error(fmt::format("{}: {}", source, e.what()));
    }

    const Source src{text, source};
    Config c;
    Section root(doc, {}, src);

    if (root.has("waveform")) read_waveform(root.child("waveform"), c, base_dir);
    if (root.has("sensor")) {
        auto s = root.child("sensor");
        read_sensor(s, c.sensor, &c.decoherence);
    }
    if (root.has("readout")) {
        auto s = root.child("readout");
        assign(c.noise, s.string("noise"));
        if (c.noise != "gaussian" && c.noise != "poisson" && c.noise != "none")
            s.fail("noise", fmt::format("unknown noise mode '{}' (gaussian, poisson, none)", c.noise));
        assign(c.phase_noise, s.number("phase_noise"));
        assign(c.shots, s.count("shots"));
        if (auto v = s.number("photons_per_shot_bright")) c.photons_per_shot_bright = *v;
        s.reject_unknown();
    }
    if (root.has("protocol")) {
        auto s = root.child("protocol");
        if (auto kind = s.string("kind")) {
            try {
                c.protocol.kind = parse_protocol(*kind);
            } catch (const std::exception& e) {
                s.fail("kind", e.what());
            }
        }
        if (auto k = s.count("k")) {
            if (*k < 1 || *k > 1'000'000) s.fail("k", "must be in [1, 1e6]");
            c.protocol.k = static_cast<int>(*k);
        }
        assign(c.protocol.t_s, s.number("t_s"));
        assign(c.protocol.t_i, s.number("t_i"));
        assign(c.protocol.period, s.number("period"));
        s.reject_unknown();
    }
    if (root.has("grid")) {
        auto s = root.child("grid");
        if (auto scheme = s.string("scheme")) {
            try {
                c.scheme = parse_scheme(*scheme);
            } catch (const std::exception& e) {
                s.fail("scheme", e.what());
            }
        }
        if (auto v = s.count("n1")) c.n1 = static_cast<std::size_t>(*v);
        if (auto v = s.count("n2")) c.n2 = to_ints(s, "n2", {*v}).front();
        if (auto v = s.count("N")) c.N = *v;
        assign(c.t_s, s.number("t_s"));
        if (auto v = s.count("hql_batches")) c.hql_batches = static_cast<std::size_t>(*v);
        s.reject_unknown();
    }
    if (root.has("experiment")) {
        auto s = root.child("experiment");
        if (auto v = s.count("seeds")) c.seeds = static_cast<std::size_t>(*v);
        assign(c.N_list, s.counts("N_list"));
        if (auto v = s.counts("n2_list")) c.n2_list = to_ints(s, "n2_list", *v);
        if (auto v = s.counts("n1_list")) c.n1_list.assign(v->begin(), v->end());
        if (auto v = s.count("stat_n1")) c.stat_n1 = static_cast<std::size_t>(*v);
        assign(c.seed, s.count("seed"));
        if (auto v = s.count("threads")) c.threads = static_cast<unsigned>(*v);
        s.reject_unknown();
    }
    if (root.has("output")) {
        auto s = root.child("output");
        if (auto dir = s.string("dir")) c.out_dir = *dir;
        assign(c.deterministic, s.boolean("deterministic"));
        s.reject_unknown();
    }
    root.reject_unknown();

    c.validate();
    return c;
}

Config load_config(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error(fmt::format("cannot open config file {}", path.string()));
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str(), path.string(), path.parent_path());
}

SensorParams sensor_from_json(const json& j)
{
    const Source src{j.dump(2), "<metadata>"};
    SensorParams p;
    Section s(j, {"sensor"}, src);
    read_sensor(s, p, nullptr);
    return p;
}

Waveform load_waveform_csv(const std::filesystem::path& path, double period)
{
    const auto table = io::read_csv(path);
    if (table.header.size() != 2) throw config_error(fmt::format("{}: expected two columns t_seconds,b_tesla", path.string()));
    std::vector<Sample> samples;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        if (row.size() != 2) throw config_error(fmt::format("{}:{}: expected two fields", path.string(), r + 2));
        try {
            samples.push_back({io::parse_double(row[0]), io::parse_double(row[1])});
        } catch (const std::exception& e) {
            throw config_error(fmt::format("{}:{}: {}", path.string(), r + 2, e.what()));
        }
    }
    return Waveform::tabulated(period, std::move(samples));
}

} // namespace wfsim::cli
