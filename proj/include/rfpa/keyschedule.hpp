// keyschedule.hpp - secret agility sequences and per-pulse offsets.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rfpa/config.hpp"
#include "rfpa/prf.hpp"

namespace rfpa {

/**
 * Per-pulse agility offsets. phi_t[l] selects the pulse start offset
 * T_l = delta_T * phi_t[l] inside its PRI; phi_f[l] selects the base
 * frequency f_l = delta_F * phi_f[l]. Both invariants
 *   0 <= T_l <= T_p - tau   and   f_l + K*delta_f <= BW
 * hold by construction of the alphabets.
 */
struct AgilitySchedule {
    std::vector<std::uint32_t> phi_t;
    std::vector<std::uint32_t> phi_f;
    std::vector<double> t_offsets_s;
    std::vector<double> f_offsets_hz;

    std::size_t size() const { return phi_t.size(); }
};

/// Deterministic keyed expansion: each phi is the masked output of one
/// counter-mode block addressed by (stream_id, pulse, field). Identical keys
/// on both ends of the link yield identical schedules.
AgilitySchedule generate_schedule(const SecretKey& key, const ValidatedConfig& vc,
                                  std::uint32_t stream_id);

/// Eve's best blind attempt: uniform draws independent of any secret key.
AgilitySchedule adversary_guess_schedule(std::uint64_t rng_seed, const ValidatedConfig& vc);

/// All offsets zero (the "assume no agility" adversary baseline).
AgilitySchedule zero_schedule(const ValidatedConfig& vc);

/// CSV with columns l,phi_t,phi_f,T_l_s,f_l_hz.
void write_schedule_csv(const AgilitySchedule& schedule, const std::string& path);

} // namespace rfpa
