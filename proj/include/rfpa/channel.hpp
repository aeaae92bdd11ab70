// channel.hpp - wiretap MIMO channel: quasi-static Rayleigh fading plus AWGN.

#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "rfpa/codec.hpp"
#include "rfpa/config.hpp"
#include "rfpa/exec.hpp"
#include "rfpa/prf.hpp"
#include "rfpa/waveform.hpp"

namespace rfpa {

enum class Party { bob, eve };

/**
 * One drawn channel state: a fresh N x M matrix per pulse and party, entries
 * i.i.d. CN(0,1), constant across the pulse's whole PRI (the trailing
 * silence carries no signal, so it shares the pulse's matrix).
 */
struct ChannelRealization {
    std::vector<Eigen::MatrixXcd> h_bob;
    std::vector<Eigen::MatrixXcd> h_eve;
    double noise_power_bob = 0;
    double noise_power_eve = 0;

    const std::vector<Eigen::MatrixXcd>& h(Party p) const {
        return p == Party::bob ? h_bob : h_eve;
    }
    double noise_power(Party p) const {
        return p == Party::bob ? noise_power_bob : noise_power_eve;
    }
};

/// Identifies the noise/channel streams of one Monte-Carlo trial.
struct RngStream {
    SecretKey key;
    std::uint32_t trial = 0;
};

ChannelRealization draw_channel_realization(const ValidatedConfig& vc,
                                            const RngStream& rng,
                                            double noise_power_bob,
                                            double noise_power_eve);

/// r = H_l x + v per sample; H_l selected by the PRI the sample belongs to,
/// noise i.i.d. CN(0, sigma^2) per receive antenna on every sample including
/// the inter-pulse silence.
BasebandFrame apply(const BasebandFrame& tx, const ChannelRealization& real, Party party,
                    const ValidatedConfig& vc, const RngStream& rng,
                    Exec exec = Exec::parallel);

/// sigma^2 = (E_pulse / bits_per_pulse) / 10^(ebn0/10) with
/// E_pulse = M * Q * n_c (sample-domain pulse energy summed over antennas at
/// unit amplitude scaling).
double noise_power_from_ebn0(const ValidatedConfig& vc, Scheme scheme, double ebn0_db);

} // namespace rfpa
