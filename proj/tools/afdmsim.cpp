// afdmsim - command line front end for the simulation library.
//
// Subcommands: ber, abep, iqi-sweep, compare, validate. Results go to
// stdout or --out as CSV or JSON; failures print a machine-readable JSON
// object on stderr and exit nonzero.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "afdmiq/bounds.hpp"
#include "afdmiq/compensate.hpp"
#include "afdmiq/constellation.hpp"
#include "afdmiq/detect.hpp"
#include "afdmiq/params.hpp"
#include "afdmiq/rng.hpp"
#include "afdmiq/sim.hpp"
#include "afdmiq/transform.hpp"

namespace {

using nlohmann::json;

struct CommonArgs {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_path;
    std::string format = "csv";
    int workers = 1;
    std::string snr_range;
};

void add_common_flags(CLI::App* sub, CommonArgs& args) {
    sub->add_option("--config", args.config_path, "Link configuration JSON file")
        ->required();
    sub->add_option("--seed", args.seed, "Override the config seed");
    sub->add_option("--out", args.out_path,
                    "Output file (stdout when omitted)");
    sub->add_option("--format", args.format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--workers", args.workers, "Worker thread count")
        ->check(CLI::Range(1, 256));
    sub->add_option("--snr", args.snr_range,
                    "SNR grid override as start:step:stop (dB)");
}

std::vector<double> parse_snr_range(const std::string& text) {
    double start = 0.0, step = 0.0, stop = 0.0;
    char c1 = 0, c2 = 0;
    std::istringstream in(text);
    if (!(in >> start >> c1 >> step >> c2 >> stop) || c1 != ':' || c2 != ':' ||
        !(in >> std::ws).eof()) {
        throw std::invalid_argument(
            "--snr must have the form start:step:stop");
    }
    if (!(step > 0.0) || stop < start) {
        throw std::invalid_argument(
            "--snr needs step > 0 and stop >= start");
    }
    std::vector<double> grid;
    const int count = static_cast<int>((stop - start) / step + 1e-9) + 1;
    grid.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) grid.push_back(start + step * i);
    return grid;
}

afdmiq::LinkConfig load_config(const CommonArgs& args) {
    afdmiq::LinkConfig cfg = afdmiq::load_link_config(args.config_path);
    if (args.seed) cfg.seed = *args.seed;
    if (!args.snr_range.empty()) {
        cfg.snr_grid_db = parse_snr_range(args.snr_range);
    }
    return cfg;
}

void write_output(const CommonArgs& args, const std::string& text) {
    if (args.out_path.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream out(args.out_path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open output file: " + args.out_path);
    }
    out << text;
    if (!out) {
        throw std::runtime_error("write failed: " + args.out_path);
    }
}

struct InvariantCheck {
    std::string name;
    bool pass = false;
    std::string detail;
};

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2e", v);
    return buf;
}

// Fast numerical self-checks of the library against the loaded
// configuration; `validate` runs these and reports each one.
std::vector<InvariantCheck> run_invariant_suite(const afdmiq::LinkConfig& cfg,
                                                int workers) {
    using namespace afdmiq;
    std::vector<InvariantCheck> checks;
    auto record = [&checks](const std::string& name, bool pass,
                            std::string detail = {}) {
        checks.push_back(InvariantCheck{name, pass, std::move(detail)});
    };

    const AfdmParams params =
        cfg.waveform == "afdm"
            ? make_afdm_params(cfg.n, cfg.nu_max, cfg.tau_max, cfg.zeta_nu,
                               cfg.c2, cfg.cpp_len)
            : make_ofdm_params(cfg.n, cfg.tau_max, cfg.cpp_len);
    const DaftTransform daft(params);
    Rng rng(cfg.seed, 0xfeed, 0);

    {  // Transform is unitary and the fast path matches the matrix.
        const CMat& a = daft.matrix();
        const double unitary_err =
            (a * a.adjoint() - CMat::Identity(params.n, params.n))
                .cwiseAbs()
                .maxCoeff();
        const CVec probe = rng.complex_normal_vector(params.n, 1.0);
        const double fast_err =
            (daft.demodulate(probe) - a * probe).cwiseAbs().maxCoeff();
        record("transform_unitary", unitary_err < 1e-10 && fast_err < 1e-10,
               "max deviation " + sci(std::max(unitary_err, fast_err)));
    }

    {  // Sample-wise channel equals the matrix form after the prefix.
        ChannelSampling sampling;
        sampling.paths = cfg.channel.paths;
        sampling.tau_max = cfg.tau_max;
        sampling.nu_max = cfg.nu_max;
        sampling.doppler_mode = cfg.channel.doppler_mode;
        sampling.delay_mode = cfg.channel.delay_mode;
        const ChannelRealization chan = sample_channel(sampling, rng);
        const TimeSignal frame =
            add_cpp(TimeSignal{rng.complex_normal_vector(params.n, 1.0), false},
                    params);
        const TimeSignal through = apply_time_domain(frame, chan, params);
        const CVec direct = remove_cpp(through, params).samples;
        const CVec via_matrix = effective_matrix(chan, daft).time_domain *
                                remove_cpp(frame, params).samples;
        const double err = (direct - via_matrix).cwiseAbs().maxCoeff();
        record("channel_matrix_consistency", err < 1e-10,
               "max deviation " + sci(err));
    }

    {  // Both compensation stages exactly invert their distortions.
        const IqImbalance tx =
            iqi_from_db(1.5, 3.5, cfg.amp_db_convention);
        const IqImbalance rx =
            iqi_from_db(1.0, 3.0, cfg.amp_db_convention);
        const CVec r = rng.complex_normal_vector(params.n, 1.0);
        const double rx_err =
            (compensate_rx(apply_iqi(r, rx), rx) - r).cwiseAbs().maxCoeff();
        const CVec x = rng.complex_normal_vector(params.n, 1.0);
        const CVec distorted =
            daft.demodulate(apply_iqi(daft.modulate(x), tx));
        const double tx_err =
            (compensate_tx(distorted, tx, daft) - x).cwiseAbs().maxCoeff();
        record("compensation_inverts", rx_err < 1e-10 && tx_err < 1e-10,
               "rx " + sci(rx_err) + ", tx " + sci(tx_err));
    }

    {  // Improper noise statistics have the expected structure.
        const IqImbalance rx = iqi_from_db(1.0, 3.0, cfg.amp_db_convention);
        const NoiseStats stats = daft_noise_stats(rx, 0.1, daft);
        const double cov_err =
            (stats.cov - stats.sigma2_eff * CMat::Identity(params.n, params.n))
                .cwiseAbs()
                .maxCoeff();
        const double sym_err =
            (stats.pcov - stats.pcov.transpose()).cwiseAbs().maxCoeff();
        record("noise_stats_structure", cov_err < 1e-10 && sym_err < 1e-10,
               "cov " + sci(cov_err) + ", pcov symmetry " + sci(sym_err));
    }

    {  // Same seed, one worker vs several: identical emitted bytes.
        LinkConfig tiny = cfg;
        tiny.snr_grid_db = {cfg.snr_grid_db.empty() ? 10.0
                                                    : cfg.snr_grid_db.front()};
        tiny.max_frames = 3 * kFramesPerBatch;
        const std::string once = emit_ber_csv(run_ber_sweep(tiny, 1));
        const std::string again = emit_ber_csv(
            run_ber_sweep(tiny, std::max(2, workers)));
        record("worker_count_determinism", once == again,
               once == again ? "identical output" : "outputs differ");
    }

    {  // Every reported point is fully sampled or flagged.
        LinkConfig tiny = cfg;
        tiny.snr_grid_db = {cfg.snr_grid_db.empty() ? 10.0
                                                    : cfg.snr_grid_db.front()};
        tiny.max_frames = kFramesPerBatch;
        const BerSweep sweep = run_ber_sweep(tiny, 1);
        bool ok = true;
        for (const BerPoint& p : sweep.points) {
            ok = ok && (p.bit_errors >= tiny.min_bit_errors || p.truncated);
        }
        record("stopping_contract", ok);
    }

    {  // Joint imbalance with no compensation floors out at high SNR while
       // the cascaded receiver keeps falling; checked on a pinned small
       // scenario so the ratio resolves in a few seconds.
        LinkConfig floorcfg = cfg;
        floorcfg.waveform = "afdm";
        floorcfg.n = 16;
        floorcfg.nu_max = 1;
        floorcfg.tau_max = 1;
        floorcfg.zeta_nu = 0;
        floorcfg.cpp_len.reset();
        floorcfg.c2.reset();
        floorcfg.constellation = "qpsk";
        floorcfg.channel = ChannelConfig{};
        floorcfg.channel.paths = 2;
        floorcfg.tx_iqi = IqiSetting{2.0, 5.0};
        floorcfg.rx_iqi = IqiSetting{2.0, 5.0};
        floorcfg.amp_db_convention = AmpDbConvention::amplitude_20log;
        floorcfg.snr_grid_db = {20.0, 40.0};
        floorcfg.min_bit_errors = 150;
        floorcfg.max_frames = 6400;
        LinkConfig comp = floorcfg;
        floorcfg.detector = ReceiverKind::mmse;
        comp.detector = ReceiverKind::cascade;
        comp.max_frames = 64000;
        const BerSweep raw = run_ber_sweep(floorcfg, workers);
        const BerSweep fixed = run_ber_sweep(comp, workers);
        const double raw_ratio = raw.points[1].ber() / raw.points[0].ber();
        const double comp_ratio = fixed.points[1].ber() / fixed.points[0].ber();
        record("error_floor_structure", raw_ratio > 0.5 && comp_ratio < 0.1,
               "uncompensated 40/20 dB ratio " + sci(raw_ratio) +
                   ", compensated " + sci(comp_ratio));
    }

    return checks;
}

int run_validate(const CommonArgs& args) {
    const afdmiq::LinkConfig cfg = load_config(args);
    const std::vector<InvariantCheck> checks =
        run_invariant_suite(cfg, args.workers);
    const std::string digest_hex = [&] {
        char buf[32];
        std::snprintf(buf, sizeof buf, "0x%016llx",
                      static_cast<unsigned long long>(afdmiq::config_digest(cfg)));
        return std::string(buf);
    }();

    bool all_pass = true;
    for (const InvariantCheck& c : checks) all_pass = all_pass && c.pass;

    std::string text;
    if (args.format == "json") {
        json j;
        j["kind"] = "validate";
        j["config_digest"] = digest_hex;
        j["pass"] = all_pass;
        json items = json::array();
        for (const InvariantCheck& c : checks) {
            items.push_back(
                {{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
        }
        j["invariants"] = items;
        text = j.dump();
    } else {
        std::ostringstream out;
        out << "config_digest " << digest_hex << "\n";
        for (const InvariantCheck& c : checks) {
            out << (c.pass ? "[PASS] " : "[FAIL] ") << c.name;
            if (!c.detail.empty()) out << " (" << c.detail << ")";
            out << "\n";
        }
        out << (all_pass ? "all invariants hold\n" : "invariant failures\n");
        text = out.str();
    }
    write_output(args, text);
    return all_pass ? 0 : 1;
}

void emit_error(const std::string& command, const std::string& message) {
    json j;
    j["error"] = {{"command", command}, {"message", message}};
    std::cerr << j.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"AFDM link simulator with IQ-imbalance analysis"};
    app.require_subcommand(1);

    CommonArgs ber_args, abep_args, iqi_args, compare_args, validate_args;
    int abep_draws = 200;

    CLI::App* ber = app.add_subcommand("ber", "Monte Carlo BER sweep");
    add_common_flags(ber, ber_args);
    CLI::App* abep =
        app.add_subcommand("abep", "Analytical ABEP bound sweep");
    add_common_flags(abep, abep_args);
    abep->add_option("--draws", abep_draws,
                     "Channel geometry draws for the bound average")
        ->check(CLI::Range(1, 100000));
    CLI::App* iqi = app.add_subcommand(
        "iqi-sweep", "BER and ABEP bound over an IQ-imbalance grid");
    add_common_flags(iqi, iqi_args);
    CLI::App* compare = app.add_subcommand(
        "compare", "AFDM vs OFDM SNR loss at a target BER");
    add_common_flags(compare, compare_args);
    CLI::App* validate =
        app.add_subcommand("validate", "Run the invariant suite");
    add_common_flags(validate, validate_args);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            return app.exit(e);  // --help and friends
        }
        emit_error("cli", e.what());
        return e.get_exit_code();
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        if (ber->parsed()) {
            const afdmiq::LinkConfig cfg = load_config(ber_args);
            const afdmiq::BerSweep sweep =
                afdmiq::run_ber_sweep(cfg, ber_args.workers);
            write_output(ber_args, ber_args.format == "json"
                                       ? afdmiq::emit_ber_json(cfg, sweep)
                                       : afdmiq::emit_ber_csv(sweep));
        } else if (abep->parsed()) {
            const afdmiq::LinkConfig cfg = load_config(abep_args);
            const afdmiq::AbepSweepResult result =
                afdmiq::run_abep_sweep(cfg, abep_draws);
            write_output(abep_args, abep_args.format == "json"
                                        ? afdmiq::emit_abep_json(cfg, result)
                                        : afdmiq::emit_abep_csv(result));
        } else if (iqi->parsed()) {
            const afdmiq::LinkConfig cfg = load_config(iqi_args);
            const afdmiq::IqiSweepResult result =
                afdmiq::run_iqi_sweep(cfg, iqi_args.workers);
            write_output(iqi_args, iqi_args.format == "json"
                                       ? afdmiq::emit_iqi_json(cfg, result)
                                       : afdmiq::emit_iqi_csv(result));
        } else if (compare->parsed()) {
            const afdmiq::LinkConfig cfg = load_config(compare_args);
            const afdmiq::CompareResult result =
                afdmiq::run_waveform_compare(cfg, compare_args.workers);
            write_output(compare_args,
                         compare_args.format == "json"
                             ? afdmiq::emit_compare_json(cfg, result)
                             : afdmiq::emit_compare_csv(result));
        } else if (validate->parsed()) {
            return run_validate(validate_args);
        }
    } catch (const std::exception& e) {
        emit_error(command, e.what());
        return 1;
    }
    return 0;
}
