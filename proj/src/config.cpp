#include "rfpa/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "rfpa/errors.hpp"

namespace rfpa {

namespace {

constexpr double kIntegerTolerance = 1e-9; // relative

bool near_integer(double x, double* rounded = nullptr) {
    double r = std::round(x);
    if (rounded) *rounded = r;
    double scale = std::max(1.0, std::abs(x));
    return std::abs(x - r) <= kIntegerTolerance * scale;
}

void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
        throw Error(ErrorCode::NonPositiveParameter, std::string(name) + " must be positive");
}

void require_positive(std::uint32_t v, const char* name) {
    if (v == 0)
        throw Error(ErrorCode::NonPositiveParameter, std::string(name) + " must be positive");
}

} // namespace

bool is_power_of_two(std::uint64_t x) {
    return x != 0 && (x & (x - 1)) == 0;
}

SamplingPlan derive_sampling(const SystemConfig& cfg, double delta_t) {
    SamplingPlan plan;
    double nc = cfg.sample_rate_hz * delta_t;
    double nc_rounded;
    if (!near_integer(nc, &nc_rounded) || nc_rounded < 1.0)
        throw Error(ErrorCode::NonIntegerChipLength,
                    "f_s * delta_t = " + std::to_string(nc) + " is not an integer");
    plan.samples_per_chip = static_cast<std::uint32_t>(nc_rounded);
    plan.samples_per_pulse = plan.samples_per_chip * cfg.chips_per_pulse;
    plan.samples_per_pri =
        static_cast<std::uint64_t>(std::llround(cfg.sample_rate_hz * cfg.pri_s));
    return plan;
}

ValidatedConfig validate(const SystemConfig& cfg) {
    require_positive(cfg.carrier_freq_hz, "carrier_freq_hz");
    require_positive(cfg.bandwidth_hz, "bandwidth_hz");
    require_positive(cfg.pulse_duration_s, "pulse_duration_s");
    require_positive(cfg.pri_s, "pri_s");
    require_positive(cfg.sample_rate_hz, "sample_rate_hz");
    require_positive(cfg.num_hops, "num_hops");
    require_positive(cfg.chips_per_pulse, "chips_per_pulse");
    require_positive(cfg.num_tx, "num_tx");
    require_positive(cfg.num_rx, "num_rx");
    require_positive(cfg.num_pulses, "num_pulses");
    require_positive(cfg.ask_order, "ask_order");
    require_positive(cfg.psk_order, "psk_order");

    ValidatedConfig vc;
    vc.sys = cfg;
    vc.delta_t = cfg.pulse_duration_s / cfg.chips_per_pulse;
    vc.delta_f = 1.0 / vc.delta_t; // orthogonality condition by construction
    vc.delta_T = cfg.pulse_duration_s;
    vc.delta_F = cfg.num_hops * vc.delta_f;

    const double K = cfg.num_hops;
    if (K * vc.delta_f > cfg.bandwidth_hz * (1.0 + kIntegerTolerance))
        throw Error(ErrorCode::BandwidthExceeded,
                    "K * delta_f exceeds the available bandwidth");

    if (cfg.num_tx > cfg.num_hops)
        throw Error(ErrorCode::TooManyTxAntennas, "information embedding requires M <= K");
    if (static_cast<std::uint64_t>(cfg.num_tx) * cfg.chips_per_pulse < cfg.num_hops)
        throw Error(ErrorCode::TooFewTxAntennas, "requires K/Q <= M");
    if (cfg.num_rx < cfg.num_tx)
        throw Error(ErrorCode::NotEnoughRxAntennas,
                    "left pseudo-inverse equalization requires N >= M");

    if (!is_power_of_two(cfg.ask_order) || !is_power_of_two(cfg.psk_order))
        throw Error(ErrorCode::NonPowerOfTwoModOrder,
                    "ask_order and psk_order must be powers of two");

    // Phi_T = T_p / delta_T - 1
    double ratio = cfg.pri_s / vc.delta_T;
    double ratio_rounded;
    if (!near_integer(ratio, &ratio_rounded) || ratio_rounded < 2.0)
        throw Error(ErrorCode::NonIntegerPriLength,
                    "T_p must be an integer multiple (>= 2) of the pulse duration");
    std::uint64_t phi_t = static_cast<std::uint64_t>(ratio_rounded) - 1;
    if (!is_power_of_two(phi_t))
        throw Error(ErrorCode::NonPowerOfTwoAlphabet,
                    "Phi_T = " + std::to_string(phi_t) + " is not a power of two");
    if (cfg.time_offset_alphabet != 0 && cfg.time_offset_alphabet != phi_t)
        throw Error(ErrorCode::AlphabetMismatch,
                    "time_offset_alphabet disagrees with T_p/delta_T - 1");
    vc.phi_t_card = static_cast<std::uint32_t>(phi_t);
    vc.sys.time_offset_alphabet = vc.phi_t_card;

    // Phi_f = BW / (K * delta_f)
    double fratio = cfg.bandwidth_hz / vc.delta_F;
    double fratio_rounded;
    if (!near_integer(fratio, &fratio_rounded) || fratio_rounded < 1.0)
        throw Error(ErrorCode::NonPowerOfTwoAlphabet,
                    "BW / (K * delta_f) must be a positive integer");
    std::uint64_t phi_f = static_cast<std::uint64_t>(fratio_rounded);
    if (!is_power_of_two(phi_f))
        throw Error(ErrorCode::NonPowerOfTwoAlphabet,
                    "Phi_f = " + std::to_string(phi_f) + " is not a power of two");
    if (cfg.freq_offset_alphabet != 0 && cfg.freq_offset_alphabet != phi_f)
        throw Error(ErrorCode::AlphabetMismatch,
                    "freq_offset_alphabet disagrees with BW/(K*delta_f)");
    vc.phi_f_card = static_cast<std::uint32_t>(phi_f);
    vc.sys.freq_offset_alphabet = vc.phi_f_card;

    if (cfg.sample_rate_hz < cfg.bandwidth_hz * (1.0 - kIntegerTolerance))
        throw Error(ErrorCode::SampleRateBelowBandwidth, "requires f_s >= BW");

    // f_s * delta_t integral <=> f_s an integer multiple of delta_f, so every
    // hop frequency lands on an exact DFT bin of a chip-length window.
    vc.sampling = derive_sampling(vc.sys, vc.delta_t);
    return vc;
}

std::string describe(const ValidatedConfig& vc) {
    std::ostringstream os;
    const SystemConfig& s = vc.sys;
    os << "carrier_freq_hz      " << s.carrier_freq_hz << "\n"
       << "bandwidth_hz         " << s.bandwidth_hz << "\n"
       << "num_hops (K)         " << s.num_hops << "\n"
       << "pulse_duration_s     " << s.pulse_duration_s << "\n"
       << "chips_per_pulse (Q)  " << s.chips_per_pulse << "\n"
       << "num_tx (M)           " << s.num_tx << "\n"
       << "num_rx (N)           " << s.num_rx << "\n"
       << "num_pulses (L)       " << s.num_pulses << "\n"
       << "pri_s (T_p)          " << s.pri_s << "\n"
       << "ask_order            " << s.ask_order << "\n"
       << "psk_order            " << s.psk_order << "\n"
       << "sample_rate_hz       " << s.sample_rate_hz << "\n"
       << "derived:\n"
       << "  delta_t            " << vc.delta_t << "\n"
       << "  delta_f            " << vc.delta_f << "\n"
       << "  delta_T            " << vc.delta_T << "\n"
       << "  delta_F            " << vc.delta_F << "\n"
       << "  Phi_T              " << vc.phi_t_card << "\n"
       << "  Phi_f              " << vc.phi_f_card << "\n"
       << "  samples_per_chip   " << vc.sampling.samples_per_chip << "\n"
       << "  samples_per_pulse  " << vc.sampling.samples_per_pulse << "\n"
       << "  samples_per_pri    " << vc.sampling.samples_per_pri << "\n"
       << "  prf_hz             " << vc.prf_hz() << "\n";
    return os.str();
}

SystemConfig config_from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoFailure, "cannot open config file " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw Error(ErrorCode::IoFailure, std::string("config parse error: ") + e.what());
    }
    SystemConfig cfg;
    auto get_d = [&](const char* name, double& out) {
        if (j.contains(name)) out = j.at(name).get<double>();
    };
    auto get_u = [&](const char* name, std::uint32_t& out) {
        if (j.contains(name)) out = j.at(name).get<std::uint32_t>();
    };
    get_d("carrier_freq_hz", cfg.carrier_freq_hz);
    get_d("bandwidth_hz", cfg.bandwidth_hz);
    get_u("num_hops", cfg.num_hops);
    get_d("pulse_duration_s", cfg.pulse_duration_s);
    get_u("chips_per_pulse", cfg.chips_per_pulse);
    get_u("num_tx", cfg.num_tx);
    get_u("num_rx", cfg.num_rx);
    get_u("num_pulses", cfg.num_pulses);
    get_d("pri_s", cfg.pri_s);
    get_u("ask_order", cfg.ask_order);
    get_u("psk_order", cfg.psk_order);
    get_d("sample_rate_hz", cfg.sample_rate_hz);
    get_u("time_offset_alphabet", cfg.time_offset_alphabet);
    get_u("freq_offset_alphabet", cfg.freq_offset_alphabet);
    return cfg;
}

std::string config_to_json(const SystemConfig& cfg) {
    nlohmann::json j;
    j["carrier_freq_hz"] = cfg.carrier_freq_hz;
    j["bandwidth_hz"] = cfg.bandwidth_hz;
    j["num_hops"] = cfg.num_hops;
    j["pulse_duration_s"] = cfg.pulse_duration_s;
    j["chips_per_pulse"] = cfg.chips_per_pulse;
    j["num_tx"] = cfg.num_tx;
    j["num_rx"] = cfg.num_rx;
    j["num_pulses"] = cfg.num_pulses;
    j["pri_s"] = cfg.pri_s;
    j["ask_order"] = cfg.ask_order;
    j["psk_order"] = cfg.psk_order;
    j["sample_rate_hz"] = cfg.sample_rate_hz;
    j["time_offset_alphabet"] = cfg.time_offset_alphabet;
    j["freq_offset_alphabet"] = cfg.freq_offset_alphabet;
    return j.dump(2);
}

} // namespace rfpa
