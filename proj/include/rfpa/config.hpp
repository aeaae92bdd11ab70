// config.hpp - system parameters, validation, and derived quantities.

#pragma once

#include <cstdint>
#include <string>

namespace rfpa {

/**
 * Raw system parameters. Times are seconds, frequencies Hz, indices counts.
 *
 * The offset alphabet sizes may be left at 0, in which case validation
 * derives them from pri_s and bandwidth_hz; when set explicitly they are
 * cross-checked against the derived values.
 */
struct SystemConfig {
    double carrier_freq_hz = 10e9;
    double bandwidth_hz = 200e6;
    std::uint32_t num_hops = 10;          // K
    double pulse_duration_s = 2e-6;       // tau
    std::uint32_t chips_per_pulse = 10;   // Q
    std::uint32_t num_tx = 8;             // M
    std::uint32_t num_rx = 8;             // N
    std::uint32_t num_pulses = 50;        // L
    double pri_s = 34e-6;                 // T_p (default keeps the time alphabet at 16)
    std::uint32_t ask_order = 2;          // J_ASK
    std::uint32_t psk_order = 4;          // J_PSK
    double sample_rate_hz = 200e6;        // f_s (default: critically sampled, f_s = BW)
    std::uint32_t time_offset_alphabet = 0;  // Phi_T; 0 = derive
    std::uint32_t freq_offset_alphabet = 0;  // Phi_f; 0 = derive
};

struct SamplingPlan {
    std::uint32_t samples_per_chip = 0;   // n_c
    std::uint32_t samples_per_pulse = 0;  // Q * n_c
    std::uint64_t samples_per_pri = 0;    // round(f_s * T_p)
};

/**
 * A configuration that passed validation, with every derived quantity
 * filled in. Immutable by convention; safe to share across workers.
 */
struct ValidatedConfig {
    SystemConfig sys;
    double delta_t = 0;       // chip duration, tau/Q
    double delta_f = 0;       // hop spacing, 1/delta_t
    double delta_T = 0;       // time-offset quantum, Q*delta_t = tau
    double delta_F = 0;       // frequency-offset quantum, K*delta_f
    std::uint32_t phi_t_card = 0;  // Phi_T
    std::uint32_t phi_f_card = 0;  // Phi_f
    SamplingPlan sampling;

    std::uint64_t frame_samples() const {
        return static_cast<std::uint64_t>(sys.num_pulses) * sampling.samples_per_pri;
    }
    double prf_hz() const { return 1.0 / sys.pri_s; }
};

bool is_power_of_two(std::uint64_t x);

/// Checks every invariant and fills derived quantities. Throws rfpa::Error
/// with a distinct code per violated invariant.
ValidatedConfig validate(const SystemConfig& cfg);

/// Discretization of the continuous-time model. Validation calls this, so a
/// ValidatedConfig always carries its plan; exposed separately for reuse.
SamplingPlan derive_sampling(const SystemConfig& cfg, double delta_t);

/// Human-readable dump of raw and derived values (CLI --describe).
std::string describe(const ValidatedConfig& vc);

SystemConfig config_from_json_file(const std::string& path);
std::string config_to_json(const SystemConfig& cfg);

} // namespace rfpa
