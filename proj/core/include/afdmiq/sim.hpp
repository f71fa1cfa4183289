// sim.hpp - Link-level Monte Carlo engine: configuration schema, BER sweeps,
// IQ-imbalance sweeps with analytical overlays, and waveform comparison.
// Results are deterministic for a given (config, seed) regardless of worker
// count; frames are simulated in fixed-size batches with per-frame random
// streams derived from (seed, point, frame).
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "afdmiq/compensate.hpp"
#include "afdmiq/channel.hpp"
#include "afdmiq/iqi.hpp"
#include "afdmiq/types.hpp"

namespace afdmiq {

/// Frames per accounting batch; stopping decisions happen only at batch
/// boundaries so results do not depend on thread scheduling.
inline constexpr int kFramesPerBatch = 64;

struct IqiSetting {
    double amp_db = 0.0;
    double phase_deg = 0.0;
    bool present() const { return amp_db != 0.0 || phase_deg != 0.0; }
};

struct ChannelConfig {
    int paths = 4;
    DopplerMode doppler_mode = DopplerMode::integer;
    DelayMode delay_mode = DelayMode::automatic;
    bool awgn_only = false;
    int frames_per_channel = 1;  // must divide kFramesPerBatch
};

enum class ReceiverKind { mmse, ml, wl_mmse, cascade };

struct IqiSweepConfig {
    std::string axis = "tx";     // which end the grid applies to: "tx" or "rx"
    std::vector<double> amp_db;  // swept-end amplitude mismatch grid
    std::vector<double> phase_deg;
    IqiSetting fixed_other;      // imbalance pinned at the non-swept end
    double snr_db = 15.0;
    int abep_draws = 200;
};

struct CompareConfig {
    double target_ber = 1e-3;
};

struct LinkConfig {
    int schema_version = 1;
    std::string waveform = "afdm";  // "afdm" or "ofdm"
    int n = 64;
    int nu_max = 2;
    int tau_max = 2;
    int zeta_nu = 1;
    std::optional<int> cpp_len;
    std::optional<double> c2;
    std::string constellation = "qpsk";
    ChannelConfig channel;
    IqiSetting tx_iqi;
    IqiSetting rx_iqi;
    AmpDbConvention amp_db_convention = AmpDbConvention::power_10log;
    bool iqi_on_cpp = true;
    ReceiverKind detector = ReceiverKind::mmse;
    CompensationConfig compensation;
    std::vector<double> snr_grid_db;
    long min_bit_errors = 500;
    long max_frames = 200000;
    std::uint64_t seed = 1;
    std::string metadata_json;  // verbatim passthrough, excluded from digest
    IqiSweepConfig iqi_sweep;
    CompareConfig compare;

    /// Throws std::invalid_argument on any inconsistency.
    void validate() const;
};

/// Strict JSON parse: unknown keys are errors. Throws std::invalid_argument.
LinkConfig parse_link_config(const std::string& json_text);
LinkConfig load_link_config(const std::string& path);

/// Canonical serialization (sorted keys, no whitespace).
std::string link_config_to_json(const LinkConfig& cfg);

/// FNV-1a 64-bit digest of the canonical serialization minus metadata.
std::uint64_t config_digest(const LinkConfig& cfg);

struct BerPoint {
    double snr_db = 0.0;
    long bit_errors = 0;
    long bits = 0;
    long frames = 0;
    bool truncated = false;  // frame cap hit before the error target
    double ber() const {
        return bits > 0 ? static_cast<double>(bit_errors) /
                              static_cast<double>(bits)
                        : 0.0;
    }
};

struct BerSweep {
    std::vector<BerPoint> points;
};

/**
 * Monte Carlo BER over the configured SNR grid. Each point runs until
 * min_bit_errors is reached or max_frames is exhausted (then truncated is
 * set). workers <= 1 runs inline.
 */
BerSweep run_ber_sweep(const LinkConfig& cfg, int workers = 1);

struct IqiSweepPoint {
    double amp_db = 0.0;
    double phase_deg = 0.0;
    double ber_sim = 0.0;
    double abep_bound = 0.0;
    long bit_errors = 0;
    long bits = 0;
    bool truncated = false;
};

struct IqiSweepResult {
    std::vector<IqiSweepPoint> points;
};

/**
 * Cartesian sweep over the amplitude/phase mismatch grids applied to one
 * link end (iqi_sweep.axis), the other end held at iqi_sweep.fixed_other:
 * ML simulation BER at the sweep SNR next to the geometry-averaged
 * analytical ABEP bound.
 */
IqiSweepResult run_iqi_sweep(const LinkConfig& cfg, int workers = 1);

/**
 * ABEP bound over the configured SNR grid (analytical only, no Monte
 * Carlo), geometry-averaged over `draws` channel draws.
 */
struct AbepSweepPoint {
    double snr_db = 0.0;
    double abep_bound = 0.0;
};
struct AbepSweepResult {
    std::vector<AbepSweepPoint> points;
};
AbepSweepResult run_abep_sweep(const LinkConfig& cfg, int draws = 200);

struct CompareSide {
    std::string waveform;
    double snr_ideal_db = 0.0;     // SNR reaching target BER without IQI
    double snr_impaired_db = 0.0;  // same with the configured IQI
    double loss_db = 0.0;
    bool reached_ideal = false;
    bool reached_impaired = false;
    BerSweep ideal;
    BerSweep impaired;
};

struct CompareResult {
    CompareSide afdm;
    CompareSide ofdm;
    double target_ber = 0.0;
};

/**
 * Runs the configured link as both waveforms, with and without the
 * configured IQI, and interpolates the SNR needed for the target BER in
 * log(BER) domain. A side whose curve never crosses the target (error
 * floor) reports reached=false.
 */
CompareResult run_waveform_compare(const LinkConfig& cfg, int workers = 1);

// Result serialization. CSV carries the data table only; JSON additionally
// carries the config, its digest, the seed, and truncation flags.
std::string emit_ber_csv(const BerSweep& sweep);
std::string emit_ber_json(const LinkConfig& cfg, const BerSweep& sweep);
std::string emit_abep_csv(const AbepSweepResult& result);
std::string emit_abep_json(const LinkConfig& cfg, const AbepSweepResult& result);
std::string emit_iqi_csv(const IqiSweepResult& result);
std::string emit_iqi_json(const LinkConfig& cfg, const IqiSweepResult& result);
std::string emit_compare_csv(const CompareResult& result);
std::string emit_compare_json(const LinkConfig& cfg,
                              const CompareResult& result);

}  // namespace afdmiq
