#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "afdmiq/sim.hpp"

#include <json.hpp>

namespace afdmiq {
namespace {

using nlohmann::json;

[[noreturn]] void bad_config(const std::string& message) {
    throw std::invalid_argument("config: " + message);
}

void check_keys(const json& j, const char* section,
                std::initializer_list<const char*> allowed) {
    if (!j.is_object()) bad_config(std::string(section) + " must be an object");
    for (const auto& item : j.items()) {
        bool known = false;
        for (const char* key : allowed) {
            if (item.key() == key) {
                known = true;
                break;
            }
        }
        if (!known) {
            bad_config("unknown key \"" + item.key() + "\" in " + section);
        }
    }
}

template <typename T>
void read_field(const json& j, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception&) {
        bad_config(std::string("field \"") + key + "\" has the wrong type");
    }
}

DopplerMode parse_doppler_mode(const std::string& s) {
    if (s == "integer") return DopplerMode::integer;
    if (s == "fractional") return DopplerMode::fractional;
    if (s == "jakes") return DopplerMode::jakes;
    bad_config("doppler_mode must be integer, fractional, or jakes");
}

const char* doppler_mode_name(DopplerMode m) {
    switch (m) {
        case DopplerMode::integer: return "integer";
        case DopplerMode::fractional: return "fractional";
        case DopplerMode::jakes: return "jakes";
    }
    return "integer";
}

DelayMode parse_delay_mode(const std::string& s) {
    if (s == "automatic") return DelayMode::automatic;
    if (s == "always_distinct") return DelayMode::always_distinct;
    if (s == "iid") return DelayMode::iid;
    bad_config("delay_mode must be automatic, always_distinct, or iid");
}

const char* delay_mode_name(DelayMode m) {
    switch (m) {
        case DelayMode::automatic: return "automatic";
        case DelayMode::always_distinct: return "always_distinct";
        case DelayMode::iid: return "iid";
    }
    return "automatic";
}

ReceiverKind parse_receiver(const std::string& s) {
    if (s == "mmse") return ReceiverKind::mmse;
    if (s == "ml") return ReceiverKind::ml;
    if (s == "wl_mmse") return ReceiverKind::wl_mmse;
    if (s == "cascade") return ReceiverKind::cascade;
    bad_config("detector must be mmse, ml, wl_mmse, or cascade");
}

const char* receiver_name(ReceiverKind k) {
    switch (k) {
        case ReceiverKind::mmse: return "mmse";
        case ReceiverKind::ml: return "ml";
        case ReceiverKind::wl_mmse: return "wl_mmse";
        case ReceiverKind::cascade: return "cascade";
    }
    return "mmse";
}

InnerDetector parse_inner(const std::string& s) {
    if (s == "mmse") return InnerDetector::mmse;
    if (s == "ml") return InnerDetector::ml;
    bad_config("compensation.inner must be mmse or ml");
}

const char* inner_name(InnerDetector d) {
    return d == InnerDetector::ml ? "ml" : "mmse";
}

AmpDbConvention parse_convention(const std::string& s) {
    if (s == "power_10log") return AmpDbConvention::power_10log;
    if (s == "amplitude_20log") return AmpDbConvention::amplitude_20log;
    bad_config("amp_db_convention must be power_10log or amplitude_20log");
}

const char* convention_name(AmpDbConvention c) {
    return c == AmpDbConvention::amplitude_20log ? "amplitude_20log"
                                                 : "power_10log";
}

IqiSetting parse_iqi_setting(const json& j, const char* section) {
    check_keys(j, section, {"amp_db", "phase_deg"});
    IqiSetting s;
    read_field(j, "amp_db", s.amp_db);
    read_field(j, "phase_deg", s.phase_deg);
    return s;
}

json config_to_json_value(const LinkConfig& cfg, bool with_metadata) {
    json j;
    j["schema_version"] = cfg.schema_version;
    j["waveform"] = cfg.waveform;
    json afdm;
    afdm["n"] = cfg.n;
    afdm["nu_max"] = cfg.nu_max;
    afdm["tau_max"] = cfg.tau_max;
    afdm["zeta_nu"] = cfg.zeta_nu;
    if (cfg.cpp_len) afdm["cpp_len"] = *cfg.cpp_len;
    if (cfg.c2) afdm["c2"] = *cfg.c2;
    j["afdm"] = afdm;
    j["constellation"] = cfg.constellation;
    j["channel"] = {{"paths", cfg.channel.paths},
                    {"doppler_mode", doppler_mode_name(cfg.channel.doppler_mode)},
                    {"delay_mode", delay_mode_name(cfg.channel.delay_mode)},
                    {"awgn_only", cfg.channel.awgn_only},
                    {"frames_per_channel", cfg.channel.frames_per_channel}};
    j["tx_iqi"] = {{"amp_db", cfg.tx_iqi.amp_db},
                   {"phase_deg", cfg.tx_iqi.phase_deg}};
    j["rx_iqi"] = {{"amp_db", cfg.rx_iqi.amp_db},
                   {"phase_deg", cfg.rx_iqi.phase_deg}};
    j["amp_db_convention"] = convention_name(cfg.amp_db_convention);
    j["iqi_on_cpp"] = cfg.iqi_on_cpp;
    j["detector"] = receiver_name(cfg.detector);
    j["compensation"] = {
        {"rx", cfg.compensation.rx_enabled},
        {"tx", cfg.compensation.tx_enabled},
        {"strict_tx_inverse", cfg.compensation.strict_transcription},
        {"inner", inner_name(cfg.compensation.inner)}};
    j["snr_grid_db"] = cfg.snr_grid_db;
    j["min_bit_errors"] = cfg.min_bit_errors;
    j["max_frames"] = cfg.max_frames;
    j["seed"] = cfg.seed;
    j["iqi_sweep"] = {{"axis", cfg.iqi_sweep.axis},
                      {"amp_db", cfg.iqi_sweep.amp_db},
                      {"phase_deg", cfg.iqi_sweep.phase_deg},
                      {"fixed_amp_db", cfg.iqi_sweep.fixed_other.amp_db},
                      {"fixed_phase_deg", cfg.iqi_sweep.fixed_other.phase_deg},
                      {"snr_db", cfg.iqi_sweep.snr_db},
                      {"abep_draws", cfg.iqi_sweep.abep_draws}};
    j["compare"] = {{"target_ber", cfg.compare.target_ber}};
    if (with_metadata && !cfg.metadata_json.empty()) {
        j["metadata"] = json::parse(cfg.metadata_json);
    }
    return j;
}

char hex_digit(std::uint64_t v) {
    return "0123456789abcdef"[v & 0xf];
}

std::string hex64(std::uint64_t v) {
    std::string s = "0x";
    for (int shift = 60; shift >= 0; shift -= 4) s += hex_digit(v >> shift);
    return s;
}

std::string format(const char* fmt, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, fmt, v);
    return buf;
}

json ber_points_json(const BerSweep& sweep) {
    json pts = json::array();
    for (const BerPoint& p : sweep.points) {
        pts.push_back({{"snr_db", p.snr_db},
                       {"ber", p.ber()},
                       {"bit_errors", p.bit_errors},
                       {"bits", p.bits},
                       {"frames", p.frames},
                       {"truncated", p.truncated}});
    }
    return pts;
}

json result_envelope(const LinkConfig& cfg, const char* kind) {
    json j;
    j["kind"] = kind;
    j["schema_version"] = 1;
    j["config"] = config_to_json_value(cfg, true);
    j["config_digest"] = hex64(config_digest(cfg));
    j["seed"] = cfg.seed;
    return j;
}

}  // namespace

LinkConfig parse_link_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        bad_config(std::string("invalid JSON: ") + e.what());
    }
    check_keys(j, "config",
               {"schema_version", "waveform", "afdm", "constellation",
                "channel", "tx_iqi", "rx_iqi", "amp_db_convention",
                "iqi_on_cpp", "detector", "compensation", "snr_grid_db",
                "min_bit_errors", "max_frames", "seed", "metadata",
                "iqi_sweep", "compare"});

    LinkConfig cfg;
    read_field(j, "schema_version", cfg.schema_version);
    read_field(j, "waveform", cfg.waveform);
    if (j.contains("afdm")) {
        const json& a = j.at("afdm");
        check_keys(a, "afdm", {"n", "nu_max", "tau_max", "zeta_nu", "cpp_len", "c2"});
        read_field(a, "n", cfg.n);
        read_field(a, "nu_max", cfg.nu_max);
        read_field(a, "tau_max", cfg.tau_max);
        read_field(a, "zeta_nu", cfg.zeta_nu);
        if (a.contains("cpp_len")) cfg.cpp_len = a.at("cpp_len").get<int>();
        if (a.contains("c2")) cfg.c2 = a.at("c2").get<double>();
    }
    read_field(j, "constellation", cfg.constellation);
    if (j.contains("channel")) {
        const json& ch = j.at("channel");
        check_keys(ch, "channel",
                   {"paths", "doppler_mode", "delay_mode", "awgn_only",
                    "frames_per_channel"});
        read_field(ch, "paths", cfg.channel.paths);
        if (ch.contains("doppler_mode")) {
            cfg.channel.doppler_mode =
                parse_doppler_mode(ch.at("doppler_mode").get<std::string>());
        }
        if (ch.contains("delay_mode")) {
            cfg.channel.delay_mode =
                parse_delay_mode(ch.at("delay_mode").get<std::string>());
        }
        read_field(ch, "awgn_only", cfg.channel.awgn_only);
        read_field(ch, "frames_per_channel", cfg.channel.frames_per_channel);
    }
    if (j.contains("tx_iqi")) {
        cfg.tx_iqi = parse_iqi_setting(j.at("tx_iqi"), "tx_iqi");
    }
    if (j.contains("rx_iqi")) {
        cfg.rx_iqi = parse_iqi_setting(j.at("rx_iqi"), "rx_iqi");
    }
    if (j.contains("amp_db_convention")) {
        cfg.amp_db_convention =
            parse_convention(j.at("amp_db_convention").get<std::string>());
    }
    read_field(j, "iqi_on_cpp", cfg.iqi_on_cpp);
    if (j.contains("detector")) {
        cfg.detector = parse_receiver(j.at("detector").get<std::string>());
    }
    if (j.contains("compensation")) {
        const json& comp = j.at("compensation");
        check_keys(comp, "compensation",
                   {"rx", "tx", "strict_tx_inverse", "inner"});
        read_field(comp, "rx", cfg.compensation.rx_enabled);
        read_field(comp, "tx", cfg.compensation.tx_enabled);
        read_field(comp, "strict_tx_inverse",
                   cfg.compensation.strict_transcription);
        if (comp.contains("inner")) {
            cfg.compensation.inner =
                parse_inner(comp.at("inner").get<std::string>());
        }
    }
    read_field(j, "snr_grid_db", cfg.snr_grid_db);
    read_field(j, "min_bit_errors", cfg.min_bit_errors);
    read_field(j, "max_frames", cfg.max_frames);
    read_field(j, "seed", cfg.seed);
    if (j.contains("metadata")) {
        cfg.metadata_json = j.at("metadata").dump();
    }
    if (j.contains("iqi_sweep")) {
        const json& sw = j.at("iqi_sweep");
        check_keys(sw, "iqi_sweep",
                   {"axis", "amp_db", "phase_deg", "fixed_amp_db",
                    "fixed_phase_deg", "snr_db", "abep_draws"});
        read_field(sw, "axis", cfg.iqi_sweep.axis);
        read_field(sw, "amp_db", cfg.iqi_sweep.amp_db);
        read_field(sw, "phase_deg", cfg.iqi_sweep.phase_deg);
        read_field(sw, "fixed_amp_db", cfg.iqi_sweep.fixed_other.amp_db);
        read_field(sw, "fixed_phase_deg", cfg.iqi_sweep.fixed_other.phase_deg);
        read_field(sw, "snr_db", cfg.iqi_sweep.snr_db);
        read_field(sw, "abep_draws", cfg.iqi_sweep.abep_draws);
    }
    if (j.contains("compare")) {
        const json& cmp = j.at("compare");
        check_keys(cmp, "compare", {"target_ber"});
        read_field(cmp, "target_ber", cfg.compare.target_ber);
    }
    cfg.validate();
    return cfg;
}

LinkConfig load_link_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open config file: " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_link_config(buf.str());
}

std::string link_config_to_json(const LinkConfig& cfg) {
    return config_to_json_value(cfg, true).dump();
}

std::uint64_t config_digest(const LinkConfig& cfg) {
    const std::string canonical = config_to_json_value(cfg, false).dump();
    std::uint64_t h = 1469598103934665603ull;  // FNV-1a 64 offset basis
    for (unsigned char ch : canonical) {
        h ^= ch;
        h *= 1099511628211ull;  // FNV-1a 64 prime
    }
    return h;
}

std::string emit_ber_csv(const BerSweep& sweep) {
    std::string out = "snr_db,ber,bit_errors,bits,frames\n";
    for (const BerPoint& p : sweep.points) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%g,%.6e,%ld,%ld,%ld\n", p.snr_db,
                      p.ber(), p.bit_errors, p.bits, p.frames);
        out += buf;
    }
    return out;
}

std::string emit_ber_json(const LinkConfig& cfg, const BerSweep& sweep) {
    json j = result_envelope(cfg, "ber_sweep");
    j["points"] = ber_points_json(sweep);
    return j.dump();
}

std::string emit_abep_csv(const AbepSweepResult& result) {
    std::string out = "snr_db,abep_bound\n";
    for (const AbepSweepPoint& p : result.points) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "%g,%.6e\n", p.snr_db, p.abep_bound);
        out += buf;
    }
    return out;
}

std::string emit_abep_json(const LinkConfig& cfg,
                           const AbepSweepResult& result) {
    json j = result_envelope(cfg, "abep_sweep");
    json pts = json::array();
    for (const AbepSweepPoint& p : result.points) {
        pts.push_back({{"snr_db", p.snr_db}, {"abep_bound", p.abep_bound}});
    }
    j["points"] = pts;
    return j.dump();
}

std::string emit_iqi_csv(const IqiSweepResult& result) {
    std::string out = "aim_db,pim_deg,ber_sim,abep_bound,bit_errors,bits\n";
    for (const IqiSweepPoint& p : result.points) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%g,%g,%.6e,%.6e,%ld,%ld\n", p.amp_db,
                      p.phase_deg, p.ber_sim, p.abep_bound, p.bit_errors,
                      p.bits);
        out += buf;
    }
    return out;
}

std::string emit_iqi_json(const LinkConfig& cfg, const IqiSweepResult& result) {
    json j = result_envelope(cfg, "iqi_sweep");
    json pts = json::array();
    for (const IqiSweepPoint& p : result.points) {
        pts.push_back({{"amp_db", p.amp_db},
                       {"phase_deg", p.phase_deg},
                       {"ber_sim", p.ber_sim},
                       {"abep_bound", p.abep_bound},
                       {"bit_errors", p.bit_errors},
                       {"bits", p.bits},
                       {"truncated", p.truncated}});
    }
    j["points"] = pts;
    return j.dump();
}

namespace {

void append_compare_row(std::string& out, const CompareSide& side) {
    char buf[200];
    std::snprintf(buf, sizeof buf, "%s,%s,%s,%s,%d,%d\n",
                  side.waveform.c_str(),
                  format("%.4f", side.snr_ideal_db).c_str(),
                  format("%.4f", side.snr_impaired_db).c_str(),
                  format("%.4f", side.loss_db).c_str(),
                  side.reached_ideal ? 1 : 0, side.reached_impaired ? 1 : 0);
    out += buf;
}

json compare_side_json(const CompareSide& side) {
    json j;
    j["waveform"] = side.waveform;
    j["snr_ideal_db"] = side.snr_ideal_db;
    j["snr_impaired_db"] = side.snr_impaired_db;
    j["loss_db"] = side.loss_db;
    j["reached_ideal"] = side.reached_ideal;
    j["reached_impaired"] = side.reached_impaired;
    j["ideal_points"] = ber_points_json(side.ideal);
    j["impaired_points"] = ber_points_json(side.impaired);
    return j;
}

}  // namespace

std::string emit_compare_csv(const CompareResult& result) {
    std::string out =
        "waveform,snr_ideal_db,snr_impaired_db,loss_db,reached_ideal,"
        "reached_impaired\n";
    append_compare_row(out, result.afdm);
    append_compare_row(out, result.ofdm);
    return out;
}

std::string emit_compare_json(const LinkConfig& cfg,
                              const CompareResult& result) {
    json j = result_envelope(cfg, "waveform_compare");
    j["target_ber"] = result.target_ber;
    j["afdm"] = compare_side_json(result.afdm);
    j["ofdm"] = compare_side_json(result.ofdm);
    return j.dump();
}

}  // namespace afdmiq
