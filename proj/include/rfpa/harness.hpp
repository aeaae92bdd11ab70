// harness.hpp - experiment orchestration: BER/secrecy sweeps, rate sweeps,
// ambiguity-function jobs, reproducible CSV artifacts.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rfpa/ambiguity.hpp"
#include "rfpa/channel.hpp"
#include "rfpa/codec.hpp"
#include "rfpa/config.hpp"
#include "rfpa/exec.hpp"
#include "rfpa/receiver.hpp"

namespace rfpa {

struct ExperimentSpec {
    ValidatedConfig config;
    Scheme scheme = Scheme::HYB;
    std::vector<double> ebn0_grid_db;
    std::uint32_t trials = 1;       // lower bound; more run until bits_min is met
    std::uint64_t bits_min = 10000; // >= 1000 for any reported point
    std::uint64_t seed = 1;
    EveStrategy eve_strategy = EveStrategy::blind_uniform;
    bool compute_eve = true;        // skip the eavesdropper link when false
};

struct BerPoint {
    double ebn0_db = 0;
    double ber_bob = 0;
    double ber_eve = 0;
    std::uint64_t bits_counted = 0;
    std::uint64_t flagged_chips = 0;
    bool aborted = false;
};

/// Monte-Carlo BER for Bob (true schedule) and Eve (strategy schedule).
/// Deterministic in (spec, seed) including under parallel trial execution:
/// all randomness is stream-addressed by (point, trial) and the per-point
/// reduction is over integer counters.
std::vector<BerPoint> run_ber_sweep(const ExperimentSpec& spec, Exec exec = Exec::parallel);

struct RatePoint {
    std::uint32_t num_tx = 0;
    Scheme scheme = Scheme::HYB;
    double rate_bps = 0;
};

/// Rate rows for every valid M in [m_min, m_max] (template config with M
/// swapped in must validate; invalid combinations are skipped).
std::vector<RatePoint> run_rate_sweep(const SystemConfig& config_template,
                                      std::uint32_t m_min, std::uint32_t m_max,
                                      const std::vector<Scheme>& schemes);

struct SecrecyPoint {
    double ebn0_db = 0;
    double secrecy_bits_per_bit = 0;
};

/// Binary-symmetric-channel proxy: [ (1 - Hb(ber_bob)) - (1 - Hb(ber_eve)) ]^+.
/// A proxy for the secrecy rate, not the channel-coding secrecy capacity.
std::vector<SecrecyPoint> estimate_secrecy(const std::vector<BerPoint>& points);

double binary_entropy(double p);

struct AfJobSpec {
    ValidatedConfig config;
    Scheme scheme = Scheme::HYB;
    std::uint64_t seed = 1;
    double tau_max_s = 0;        // 0 = default (3 chip durations)
    std::size_t n_tau = 101;
    double nu_max_hz = 0;        // 0 = default (2 / (L * T_p))
    std::size_t n_nu = 101;
    std::uint32_t expectation_draws = 16;
    double f = 0.0;
    double f_prime = 0.0;
    std::string out_dir;
    std::string frame_dump_path;  // optional raw binary export of the probe frame
};

struct AfJobResult {
    AFGrid zero_doppler_numerical;
    AFGrid zero_doppler_closed;
    AFGrid zero_delay_numerical;
    AFGrid zero_delay_closed;
    AFGrid expectation_zero_doppler;
    AFGrid expectation_zero_delay;
};

/// Generates one keyed frame and emits delay/Doppler cuts from both
/// evaluators plus the schedule-ensemble expectation. Writes af_*.csv into
/// out_dir when set. Throws GridTooLarge over budget.
AfJobResult run_af_job(const AfJobSpec& spec, Exec exec = Exec::parallel);

/// Runs one Bob trial at the first grid point and writes the per-chip
/// detection trace (l, q, m, bin, hop, |gamma|, arg(gamma), flag).
void dump_receiver_trace(const ExperimentSpec& spec, const std::string& path);

// CSV/metadata artifact writers (schema v1, header row mandatory).
void write_ber_csv(const std::string& path, Scheme scheme,
                   const std::vector<BerPoint>& points,
                   const std::vector<SecrecyPoint>& secrecy);
void append_ber_csv(const std::string& path, Scheme scheme,
                    const std::vector<BerPoint>& points,
                    const std::vector<SecrecyPoint>& secrecy, bool header);
void write_rate_csv(const std::string& path, const std::vector<RatePoint>& points);
void write_meta_json(const std::string& path, const ValidatedConfig& vc,
                     const std::string& command, std::uint64_t seed,
                     const std::vector<std::string>& schemes,
                     const std::string& extra_json = "{}");

} // namespace rfpa
