#include "afdmiq/sim.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <optional>
#include <stdexcept>
#include <thread>

#include "afdmiq/bounds.hpp"
#include "afdmiq/constellation.hpp"
#include "afdmiq/detect.hpp"
#include "afdmiq/params.hpp"
#include "afdmiq/rng.hpp"
#include "afdmiq/transform.hpp"

namespace afdmiq {
namespace {

AfdmParams params_from_config(const LinkConfig& cfg) {
    if (cfg.waveform == "afdm") {
        return make_afdm_params(cfg.n, cfg.nu_max, cfg.tau_max, cfg.zeta_nu,
                                cfg.c2, cfg.cpp_len);
    }
    return make_ofdm_params(cfg.n, cfg.tau_max, cfg.cpp_len);
}

struct LinkContext {
    const LinkConfig& cfg;
    AfdmParams params;
    DaftTransform daft;
    Constellation constel;
    IqImbalance tx;
    IqImbalance rx;
    ChannelSampling sampling;
    ChannelRealization identity_channel;

    explicit LinkContext(const LinkConfig& config)
        : cfg(config),
          params(params_from_config(config)),
          daft(params),
          constel(Constellation::by_name(config.constellation)),
          tx(iqi_from_db(config.tx_iqi.amp_db, config.tx_iqi.phase_deg,
                         config.amp_db_convention)),
          rx(iqi_from_db(config.rx_iqi.amp_db, config.rx_iqi.phase_deg,
                         config.amp_db_convention)) {
        // The channel budget comes from the link config, not the waveform
        // parameters: the OFDM reference rides the same doubly selective
        // channel as AFDM.
        sampling.paths = config.channel.paths;
        sampling.tau_max = config.tau_max;
        sampling.nu_max = config.nu_max;
        sampling.doppler_mode = config.channel.doppler_mode;
        sampling.delay_mode = config.channel.delay_mode;
        identity_channel.paths.push_back(PathComponent{cplx(1.0, 0.0), 0, 0.0});
    }
};

// Receiver-side matrices that depend only on the channel realization.
struct ReceiverState {
    std::optional<EffectiveChannel> eff;
    std::optional<WidelyLinearModel> model;
};

ReceiverState make_receiver_state(const LinkContext& ctx,
                                  const ChannelRealization& chan) {
    ReceiverState st;
    switch (ctx.cfg.detector) {
        case ReceiverKind::mmse:
        case ReceiverKind::cascade:
            st.eff = effective_matrix(chan, ctx.daft);
            break;
        case ReceiverKind::ml:
            st.model = build_wl_model(chan, ctx.daft, ctx.tx, ctx.rx);
            break;
        case ReceiverKind::wl_mmse:
            st.model = build_wl_model_rx_only(chan, ctx.daft, ctx.rx);
            break;
    }
    return st;
}

long run_frame(const LinkContext& ctx, double sigma2,
               const NoiseStats* wl_stats, const ReceiverState& st,
               const ChannelRealization& chan, Rng& rng) {
    const int n = ctx.params.n;
    const int nb = ctx.constel.bits_per_symbol;
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(n) *
                                   static_cast<std::size_t>(nb));
    for (auto& b : bits) b = static_cast<std::uint8_t>(rng.uniform_int(0, 1));
    const CVec x = map_bits(bits, ctx.constel);

    TimeSignal frame;
    if (ctx.cfg.iqi_on_cpp) {
        frame = add_cpp(TimeSignal{ctx.daft.modulate(x), false}, ctx.params);
        frame.samples = apply_iqi(frame.samples, ctx.tx);
    } else {
        frame = add_cpp(TimeSignal{apply_iqi(ctx.daft.modulate(x), ctx.tx), false},
                        ctx.params);
    }

    TimeSignal received = ctx.cfg.channel.awgn_only
                              ? frame
                              : apply_time_domain(frame, chan, ctx.params);
    received.samples = add_awgn(received.samples, sigma2, rng);
    received.samples = apply_iqi(received.samples, ctx.rx);

    DetectedFrame det;
    switch (ctx.cfg.detector) {
        case ReceiverKind::mmse: {
            const CVec y =
                ctx.daft.demodulate(remove_cpp(received, ctx.params).samples);
            det = mmse_detect(y, st.eff->daft_domain, sigma2, ctx.constel);
            break;
        }
        case ReceiverKind::ml: {
            const CVec y =
                ctx.daft.demodulate(remove_cpp(received, ctx.params).samples);
            det = ml_detect(y, *st.model, ctx.constel);
            break;
        }
        case ReceiverKind::wl_mmse: {
            const CVec y =
                ctx.daft.demodulate(remove_cpp(received, ctx.params).samples);
            det = wl_mmse_detect(y, *st.model, *wl_stats, ctx.constel);
            break;
        }
        case ReceiverKind::cascade:
            det = cascaded_receive(received, *st.eff, ctx.daft, ctx.constel,
                                   ctx.tx, ctx.rx, sigma2, ctx.cfg.compensation);
            break;
    }

    long errors = 0;
    for (std::size_t i = 0; i < bits.size(); ++i) {
        errors += bits[i] != det.bits[i];
    }
    return errors;
}

struct BatchTotals {
    long bit_errors = 0;
    long bits = 0;
};

BatchTotals run_batch(const LinkContext& ctx, double sigma2,
                      const NoiseStats* wl_stats, const ReceiverState* fixed,
                      int point_idx, long batch_idx) {
    BatchTotals totals;
    const int fpc = ctx.cfg.channel.frames_per_channel;
    const long bits_per_frame = static_cast<long>(ctx.params.n) *
                                ctx.constel.bits_per_symbol;
    ChannelRealization chan;
    std::optional<ReceiverState> local;
    const ReceiverState* st = fixed;
    for (int i = 0; i < kFramesPerBatch; ++i) {
        const long frame_idx = batch_idx * kFramesPerBatch + i;
        Rng rng(ctx.cfg.seed, static_cast<std::uint64_t>(point_idx),
                static_cast<std::uint64_t>(frame_idx));
        if (fixed == nullptr && i % fpc == 0) {
            chan = sample_channel(ctx.sampling, rng);
            local = make_receiver_state(ctx, chan);
            st = &*local;
        }
        totals.bit_errors += run_frame(ctx, sigma2, wl_stats, *st, chan, rng);
        totals.bits += bits_per_frame;
    }
    return totals;
}

BerPoint simulate_point(const LinkContext& ctx, int point_idx, double snr_db,
                        int workers) {
    const double sigma2 = std::pow(10.0, -snr_db / 10.0);
    std::optional<NoiseStats> stats;
    if (ctx.cfg.detector == ReceiverKind::wl_mmse) {
        stats = daft_noise_stats(ctx.rx, sigma2, ctx.daft);
    }
    std::optional<ReceiverState> fixed;
    if (ctx.cfg.channel.awgn_only) {
        fixed = make_receiver_state(ctx, ctx.identity_channel);
    }
    const NoiseStats* stats_ptr = stats ? &*stats : nullptr;
    const ReceiverState* fixed_ptr = fixed ? &*fixed : nullptr;

    const long max_batches =
        std::max<long>(1, ctx.cfg.max_frames / kFramesPerBatch);
    const int w = std::max(1, workers);

    BerPoint point;
    point.snr_db = snr_db;
    long next_batch = 0;
    bool done = false;
    while (!done && next_batch < max_batches) {
        const int count =
            static_cast<int>(std::min<long>(w, max_batches - next_batch));
        std::vector<BatchTotals> round(static_cast<std::size_t>(count));
        if (count == 1) {
            round[0] = run_batch(ctx, sigma2, stats_ptr, fixed_ptr, point_idx,
                                 next_batch);
        } else {
            std::vector<std::thread> threads;
            std::vector<std::exception_ptr> errors(
                static_cast<std::size_t>(count));
            threads.reserve(static_cast<std::size_t>(count));
            for (int t = 0; t < count; ++t) {
                threads.emplace_back([&, t] {
                    try {
                        round[static_cast<std::size_t>(t)] =
                            run_batch(ctx, sigma2, stats_ptr, fixed_ptr,
                                      point_idx, next_batch + t);
                    } catch (...) {
                        errors[static_cast<std::size_t>(t)] =
                            std::current_exception();
                    }
                });
            }
            for (auto& th : threads) th.join();
            for (const auto& e : errors) {
                if (e) std::rethrow_exception(e);
            }
        }
        // Accumulate strictly in batch order and stop at the first batch
        // that satisfies the error target; any batches computed beyond it
        // are discarded so the totals never depend on the worker count.
        for (int t = 0; t < count && !done; ++t) {
            const BatchTotals& b = round[static_cast<std::size_t>(t)];
            point.bit_errors += b.bit_errors;
            point.bits += b.bits;
            point.frames += kFramesPerBatch;
            if (point.bit_errors >= ctx.cfg.min_bit_errors) done = true;
        }
        next_batch += count;
    }
    point.truncated = point.bit_errors < ctx.cfg.min_bit_errors;
    return point;
}

// First SNR at which the curve reaches the target BER, interpolating
// linearly in log10(BER). Zero-error points are clamped to half an error.
struct Crossing {
    double snr_db = 0.0;
    bool reached = false;
};

Crossing snr_at_target(const BerSweep& sweep, double target) {
    Crossing c;
    auto effective_ber = [](const BerPoint& p) {
        const double floor_ber = 0.5 / std::max<long>(1, p.bits);
        return std::max(p.ber(), floor_ber);
    };
    for (std::size_t i = 0; i < sweep.points.size(); ++i) {
        const double ber = effective_ber(sweep.points[i]);
        if (ber > target) continue;
        if (i == 0) {
            c.snr_db = sweep.points[i].snr_db;
        } else {
            const BerPoint& lo = sweep.points[i - 1];
            const BerPoint& hi = sweep.points[i];
            const double la = std::log10(effective_ber(lo));
            const double lb = std::log10(ber);
            const double lt = std::log10(target);
            const double frac = (la - lt) / (la - lb);
            c.snr_db = lo.snr_db + frac * (hi.snr_db - lo.snr_db);
        }
        c.reached = true;
        return c;
    }
    return c;
}

CompareSide compare_side(const LinkConfig& base, const std::string& waveform,
                         double target, int workers) {
    // The comparison isolates the waveform's IQI sensitivity: both sides run
    // the plain uncompensated MMSE chain.
    LinkConfig impaired_cfg = base;
    impaired_cfg.waveform = waveform;
    impaired_cfg.detector = ReceiverKind::mmse;
    LinkConfig ideal_cfg = impaired_cfg;
    ideal_cfg.tx_iqi = IqiSetting{};
    ideal_cfg.rx_iqi = IqiSetting{};

    CompareSide side;
    side.waveform = waveform;
    side.ideal = run_ber_sweep(ideal_cfg, workers);
    const bool has_iqi =
        impaired_cfg.tx_iqi.present() || impaired_cfg.rx_iqi.present();
    side.impaired = has_iqi ? run_ber_sweep(impaired_cfg, workers) : side.ideal;

    const Crossing ci = snr_at_target(side.ideal, target);
    const Crossing cx = snr_at_target(side.impaired, target);
    side.snr_ideal_db = ci.snr_db;
    side.snr_impaired_db = cx.snr_db;
    side.reached_ideal = ci.reached;
    side.reached_impaired = cx.reached;
    side.loss_db =
        (ci.reached && cx.reached) ? cx.snr_db - ci.snr_db : 0.0;
    return side;
}

}  // namespace

void LinkConfig::validate() const {
    if (schema_version != 1) {
        throw std::invalid_argument("unsupported schema_version");
    }
    if (waveform != "afdm" && waveform != "ofdm") {
        throw std::invalid_argument("waveform must be \"afdm\" or \"ofdm\"");
    }
    const AfdmParams params = params_from_config(*this);
    params.validate();
    const Constellation c = Constellation::by_name(constellation);
    if (channel.paths < 1) {
        throw std::invalid_argument("channel.paths must be at least 1");
    }
    if (channel.frames_per_channel < 1 ||
        kFramesPerBatch % channel.frames_per_channel != 0) {
        throw std::invalid_argument(
            "channel.frames_per_channel must divide the batch size");
    }
    if (min_bit_errors < 100) {
        throw std::invalid_argument("min_bit_errors must be at least 100");
    }
    if (max_frames < kFramesPerBatch) {
        throw std::invalid_argument("max_frames must cover at least one batch");
    }
    const bool uses_ml =
        detector == ReceiverKind::ml ||
        (detector == ReceiverKind::cascade &&
         compensation.inner == InnerDetector::ml);
    if (uses_ml) {
        const double hypotheses =
            std::pow(static_cast<double>(c.points.size()), n);
        if (hypotheses > static_cast<double>(1 << 20)) {
            throw std::invalid_argument(
                "ML detection needs |alphabet|^n <= 2^20; reduce n or use "
                "another detector");
        }
    }
    // Surfaces non-invertible imbalance settings at configuration time.
    (void)iqi_from_db(tx_iqi.amp_db, tx_iqi.phase_deg, amp_db_convention);
    (void)iqi_from_db(rx_iqi.amp_db, rx_iqi.phase_deg, amp_db_convention);
    for (double snr : snr_grid_db) {
        if (!std::isfinite(snr)) {
            throw std::invalid_argument("snr_grid_db entries must be finite");
        }
    }
}

BerSweep run_ber_sweep(const LinkConfig& cfg, int workers) {
    cfg.validate();
    if (cfg.snr_grid_db.empty()) {
        throw std::invalid_argument("snr_grid_db must be non-empty");
    }
    LinkContext ctx(cfg);
    BerSweep sweep;
    sweep.points.reserve(cfg.snr_grid_db.size());
    for (std::size_t i = 0; i < cfg.snr_grid_db.size(); ++i) {
        sweep.points.push_back(simulate_point(ctx, static_cast<int>(i),
                                              cfg.snr_grid_db[i], workers));
    }
    return sweep;
}

IqiSweepResult run_iqi_sweep(const LinkConfig& cfg, int workers) {
    cfg.validate();
    if (cfg.iqi_sweep.axis != "tx" && cfg.iqi_sweep.axis != "rx") {
        throw std::invalid_argument("iqi_sweep.axis must be \"tx\" or \"rx\"");
    }
    if (cfg.iqi_sweep.amp_db.empty() || cfg.iqi_sweep.phase_deg.empty()) {
        throw std::invalid_argument("iqi_sweep grids must be non-empty");
    }
    if (cfg.iqi_sweep.abep_draws < 1) {
        throw std::invalid_argument("iqi_sweep.abep_draws must be positive");
    }
    if (cfg.channel.awgn_only) {
        throw std::invalid_argument(
            "the analytical bound assumes the fading channel model; disable "
            "channel.awgn_only");
    }
    const bool sweep_tx = cfg.iqi_sweep.axis == "tx";
    const double sigma2 = std::pow(10.0, -cfg.iqi_sweep.snr_db / 10.0);

    IqiSweepResult out;
    for (double amp : cfg.iqi_sweep.amp_db) {
        for (double phase : cfg.iqi_sweep.phase_deg) {
            LinkConfig point_cfg = cfg;
            const IqiSetting swept{amp, phase};
            point_cfg.tx_iqi = sweep_tx ? swept : cfg.iqi_sweep.fixed_other;
            point_cfg.rx_iqi = sweep_tx ? cfg.iqi_sweep.fixed_other : swept;
            point_cfg.detector = ReceiverKind::ml;
            point_cfg.snr_grid_db = {cfg.iqi_sweep.snr_db};
            const BerSweep ber = run_ber_sweep(point_cfg, workers);

            LinkContext ctx(point_cfg);
            AbepConfig acfg;
            acfg.sigma2 = sigma2;
            // One shared geometry stream across the whole grid keeps the
            // bound surface smooth in the imbalance parameters.
            Rng rng(cfg.seed, std::uint64_t{1} << 32, 0);
            const double bound = averaged_abep_bound(
                ctx.sampling, ctx.daft, ctx.tx, ctx.rx, ctx.constel, acfg, rng,
                cfg.iqi_sweep.abep_draws);

            IqiSweepPoint p;
            p.amp_db = amp;
            p.phase_deg = phase;
            p.ber_sim = ber.points[0].ber();
            p.abep_bound = bound;
            p.bit_errors = ber.points[0].bit_errors;
            p.bits = ber.points[0].bits;
            p.truncated = ber.points[0].truncated;
            out.points.push_back(p);
        }
    }
    return out;
}

AbepSweepResult run_abep_sweep(const LinkConfig& cfg, int draws) {
    cfg.validate();
    if (cfg.snr_grid_db.empty()) {
        throw std::invalid_argument("snr_grid_db must be non-empty");
    }
    if (draws < 1) {
        throw std::invalid_argument("abep draws must be positive");
    }
    if (cfg.channel.awgn_only) {
        throw std::invalid_argument(
            "the analytical bound assumes the fading channel model; disable "
            "channel.awgn_only");
    }
    LinkContext ctx(cfg);
    AbepSweepResult out;
    out.points.reserve(cfg.snr_grid_db.size());
    for (double snr_db : cfg.snr_grid_db) {
        AbepConfig acfg;
        acfg.sigma2 = std::pow(10.0, -snr_db / 10.0);
        Rng rng(cfg.seed, std::uint64_t{1} << 32, 0);
        AbepSweepPoint p;
        p.snr_db = snr_db;
        p.abep_bound =
            averaged_abep_bound(ctx.sampling, ctx.daft, ctx.tx, ctx.rx,
                                ctx.constel, acfg, rng, draws);
        out.points.push_back(p);
    }
    return out;
}

CompareResult run_waveform_compare(const LinkConfig& cfg, int workers) {
    cfg.validate();
    if (cfg.snr_grid_db.empty()) {
        throw std::invalid_argument("snr_grid_db must be non-empty");
    }
    if (!(cfg.compare.target_ber > 0.0) || cfg.compare.target_ber >= 1.0) {
        throw std::invalid_argument("compare.target_ber must lie in (0, 1)");
    }
    CompareResult out;
    out.target_ber = cfg.compare.target_ber;
    out.afdm = compare_side(cfg, "afdm", cfg.compare.target_ber, workers);
    out.ofdm = compare_side(cfg, "ofdm", cfg.compare.target_ber, workers);
    return out;
}

}  // namespace afdmiq
