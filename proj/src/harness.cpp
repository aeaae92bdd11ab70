#include "rfpa/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "rfpa/errors.hpp"
#include "rfpa/io_util.hpp"

namespace rfpa {

namespace {

struct TrialCounts {
    std::uint64_t bob_errors = 0;
    std::uint64_t eve_errors = 0;
    std::uint64_t bits = 0;
    std::uint64_t flagged = 0;
};

std::vector<std::uint8_t> random_payload(const SecretKey& key, std::uint32_t point,
                                         std::uint32_t trial, std::uint64_t n_bits) {
    PrfStream stream(key, make_domain(StreamTag::payload, point, trial));
    std::vector<std::uint8_t> bits(n_bits);
    for (auto& b : bits) b = static_cast<std::uint8_t>(stream.next_bits(1));
    return bits;
}

std::uint64_t count_mismatches(const std::vector<std::uint8_t>& a,
                               const std::vector<std::uint8_t>& b) {
    std::uint64_t n = 0;
    for (std::size_t i = 0; i < a.size(); ++i) n += a[i] != b[i];
    return n;
}

/// One Monte-Carlo trial: encode, transmit, push through both channels,
/// decode with Bob's true schedule and Eve's strategy schedule.
TrialCounts run_trial(const ExperimentSpec& spec, std::uint32_t point,
                      std::uint32_t trial, double sigma2) {
    const ValidatedConfig& vc = spec.config;
    const std::uint32_t L = vc.sys.num_pulses;
    const BitsPerChip bits = bits_per_chip(vc, spec.scheme);
    const std::uint64_t bits_per_frame =
        static_cast<std::uint64_t>(L) * vc.sys.chips_per_pulse * bits.total();

    const SecretKey master = SecretKey::from_seed(spec.seed);
    const SecretKey point_key = master.subkey(make_domain(StreamTag::generic, point));
    const SecretKey link_key =
        point_key.subkey(make_domain(StreamTag::schedule_time, trial));

    const AgilitySchedule schedule = generate_schedule(link_key, vc, 0);
    AgilitySchedule eve_schedule;
    if (spec.compute_eve) switch (spec.eve_strategy) {
        case EveStrategy::blind_zero:
            eve_schedule = zero_schedule(vc);
            break;
        case EveStrategy::blind_uniform:
            eve_schedule = adversary_guess_schedule(
                spec.seed ^ (0x9e3779b97f4a7c15ull * (point * 65537ull + trial + 1)), vc);
            break;
        case EveStrategy::genie:
            eve_schedule = schedule;
            break;
    }

    const auto payload = random_payload(point_key, point, trial, bits_per_frame);
    BitReader reader(payload);
    std::vector<PulsePlan> plans;
    plans.reserve(L);
    for (std::uint32_t l = 0; l < L; ++l)
        plans.push_back(encode_pulse(reader, vc, spec.scheme));

    const BasebandFrame tx = synthesize(plans, schedule, vc, Exec::serial);

    RngStream rng{point_key, trial};
    const ChannelRealization real = draw_channel_realization(vc, rng, sigma2, sigma2);
    const BasebandFrame rx_bob = apply(tx, real, Party::bob, vc, rng, Exec::serial);

    BitWriter bob_bits, eve_bits;
    DecodeStats bob_stats, eve_stats;
    for (std::uint32_t l = 0; l < L; ++l) {
        PulsePlan bob_est =
            receive_pulse(rx_bob, l, real.h_bob[l], schedule, vc, spec.scheme);
        decode_pulse(bob_est, vc, spec.scheme, bob_bits, &bob_stats);
    }
    if (spec.compute_eve) {
        const BasebandFrame rx_eve = apply(tx, real, Party::eve, vc, rng, Exec::serial);
        for (std::uint32_t l = 0; l < L; ++l) {
            PulsePlan eve_est =
                receive_pulse(rx_eve, l, real.h_eve[l], eve_schedule, vc, spec.scheme);
            decode_pulse(eve_est, vc, spec.scheme, eve_bits, &eve_stats);
        }
    }

    TrialCounts counts;
    counts.bits = bits_per_frame;
    counts.bob_errors = count_mismatches(payload, bob_bits.bits());
    counts.eve_errors =
        spec.compute_eve ? count_mismatches(payload, eve_bits.bits()) : 0;
    counts.flagged = bob_stats.flagged_chips;
    return counts;
}

} // namespace

void dump_receiver_trace(const ExperimentSpec& spec, const std::string& path) {
    if (spec.ebn0_grid_db.empty())
        throw Error(ErrorCode::InvalidExperiment, "trace needs at least one grid point");
    const ValidatedConfig& vc = spec.config;
    const std::uint32_t L = vc.sys.num_pulses;
    const double ebn0 = spec.ebn0_grid_db.front();
    const double sigma2 =
        std::isinf(ebn0) ? 0.0 : noise_power_from_ebn0(vc, spec.scheme, ebn0);

    const BitsPerChip bits = bits_per_chip(vc, spec.scheme);
    const std::uint64_t bits_per_frame =
        static_cast<std::uint64_t>(L) * vc.sys.chips_per_pulse * bits.total();
    const SecretKey master = SecretKey::from_seed(spec.seed);
    const SecretKey point_key = master.subkey(make_domain(StreamTag::generic, 0));
    const SecretKey link_key = point_key.subkey(make_domain(StreamTag::schedule_time, 0));
    const AgilitySchedule schedule = generate_schedule(link_key, vc, 0);

    const auto payload = random_payload(point_key, 0, 0, bits_per_frame);
    BitReader reader(payload);
    std::vector<PulsePlan> plans;
    plans.reserve(L);
    for (std::uint32_t l = 0; l < L; ++l)
        plans.push_back(encode_pulse(reader, vc, spec.scheme));

    const BasebandFrame tx = synthesize(plans, schedule, vc, Exec::serial);
    RngStream rng{point_key, 0};
    const ChannelRealization real = draw_channel_realization(vc, rng, sigma2, sigma2);
    const BasebandFrame rx = apply(tx, real, Party::bob, vc, rng, Exec::serial);

    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::IoFailure, "cannot open " + path);
    out << "l,q,m,bin,hop,gamma_abs,gamma_arg,flag\n";
    for (std::uint32_t l = 0; l < L; ++l) {
        std::vector<ChipDetection> trace;
        receive_pulse(rx, l, real.h_bob[l], schedule, vc, spec.scheme, &trace);
        for (std::uint32_t q = 0; q < trace.size(); ++q) {
            const ChipDetection& det = trace[q];
            for (std::uint32_t m = 0; m < vc.sys.num_tx; ++m) {
                out << l << ',' << q << ',' << m << ','
                    << (m < det.peak_bins.size() ? static_cast<long>(det.peak_bins[m])
                                                 : -1)
                    << ','
                    << (m < det.hop_estimates.size()
                            ? static_cast<long>(det.hop_estimates[m])
                            : -1)
                    << ','
                    << format_double(m < det.amp_estimates.size() ? det.amp_estimates[m]
                                                                  : 0.0)
                    << ','
                    << format_double(m < det.phase_estimates.size()
                                         ? det.phase_estimates[m]
                                         : 0.0)
                    << ',' << (det.flagged ? 1 : 0) << '\n';
            }
        }
    }
}

std::vector<BerPoint> run_ber_sweep(const ExperimentSpec& spec, Exec exec) {
    if (spec.trials < 1)
        throw Error(ErrorCode::InvalidExperiment, "trials must be >= 1");
    if (spec.bits_min < 1000)
        throw Error(ErrorCode::InvalidExperiment,
                    "bits_min must be >= 1000 for a reported BER point");

    const ValidatedConfig& vc = spec.config;
    const BitsPerChip bits = bits_per_chip(vc, spec.scheme);
    if (bits.total() == 0)
        throw Error(ErrorCode::ZeroRateScheme, "scheme carries no bits at this config");
    const std::uint64_t bits_per_frame = static_cast<std::uint64_t>(vc.sys.num_pulses) *
                                         vc.sys.chips_per_pulse * bits.total();

    std::vector<BerPoint> points;
    points.reserve(spec.ebn0_grid_db.size());

    for (std::uint32_t p = 0; p < spec.ebn0_grid_db.size(); ++p) {
        BerPoint point;
        point.ebn0_db = spec.ebn0_grid_db[p];

        double sigma2 = 0.0;
        try {
            sigma2 = std::isinf(point.ebn0_db)
                         ? 0.0
                         : noise_power_from_ebn0(vc, spec.scheme, point.ebn0_db);
        } catch (const Error&) {
            point.aborted = true;
            points.push_back(point);
            continue;
        }

        const std::uint64_t frames_needed =
            (spec.bits_min + bits_per_frame - 1) / bits_per_frame;
        const std::uint32_t trials = std::max<std::uint32_t>(
            spec.trials, static_cast<std::uint32_t>(frames_needed));

        std::uint64_t bob_errors = 0, eve_errors = 0, total_bits = 0, flagged = 0;
        #pragma omp parallel for schedule(dynamic) \
            reduction(+ : bob_errors, eve_errors, total_bits, flagged) \
            if (exec == Exec::parallel)
        for (std::int64_t t = 0; t < static_cast<std::int64_t>(trials); ++t) {
            TrialCounts counts =
                run_trial(spec, p, static_cast<std::uint32_t>(t), sigma2);
            bob_errors += counts.bob_errors;
            eve_errors += counts.eve_errors;
            total_bits += counts.bits;
            flagged += counts.flagged;
        }

        point.bits_counted = total_bits;
        point.flagged_chips = flagged;
        point.ber_bob = static_cast<double>(bob_errors) / static_cast<double>(total_bits);
        point.ber_eve = static_cast<double>(eve_errors) / static_cast<double>(total_bits);
        points.push_back(point);
    }
    return points;
}

std::vector<RatePoint> run_rate_sweep(const SystemConfig& config_template,
                                      std::uint32_t m_min, std::uint32_t m_max,
                                      const std::vector<Scheme>& schemes) {
    std::vector<RatePoint> rows;
    for (std::uint32_t m = m_min; m <= m_max; ++m) {
        SystemConfig cfg = config_template;
        cfg.num_tx = m;
        ValidatedConfig vc;
        try {
            vc = validate(cfg);
        } catch (const Error&) {
            continue; // combination not realizable under the template
        }
        for (Scheme s : schemes)
            rows.push_back({m, s, achievable_rate(vc, s)});
    }
    return rows;
}

double binary_entropy(double p) {
    if (p <= 0.0 || p >= 1.0) return 0.0;
    return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

std::vector<SecrecyPoint> estimate_secrecy(const std::vector<BerPoint>& points) {
    std::vector<SecrecyPoint> out;
    out.reserve(points.size());
    for (const auto& pt : points) {
        auto clip = [](double p) { return std::clamp(p, 1e-12, 0.5); };
        double cs = (1.0 - binary_entropy(clip(pt.ber_bob))) -
                    (1.0 - binary_entropy(clip(pt.ber_eve)));
        out.push_back({pt.ebn0_db, std::max(cs, 0.0)});
    }
    return out;
}

AfJobResult run_af_job(const AfJobSpec& spec, Exec exec) {
    const ValidatedConfig& vc = spec.config;
    const std::uint32_t L = vc.sys.num_pulses;

    double tau_max = spec.tau_max_s > 0 ? spec.tau_max_s : 3.0 * vc.delta_t;
    double nu_max = spec.nu_max_hz > 0 ? spec.nu_max_hz
                                       : 2.0 / (L * vc.sys.pri_s);

    // rough analytic-evaluation budget (overlap culling keeps the per-point
    // cost near M^2 * L * pairs-in-delay-range * 3 chips)
    const double pulse_pairs =
        L * (1.0 + 2.0 * std::ceil(tau_max / vc.sys.pri_s + 1.0));
    const double terms_per_point = static_cast<double>(vc.sys.num_tx) * vc.sys.num_tx *
                                   pulse_pairs * vc.sys.chips_per_pulse * 3.0;
    const double points = static_cast<double>(spec.n_tau + spec.n_nu) *
                          (2.0 + spec.expectation_draws);
    if (terms_per_point * points > 2e10)
        throw Error(ErrorCode::GridTooLarge,
                    "analytic AF budget exceeded; reduce pulses or grid points");

    const SecretKey master = SecretKey::from_seed(spec.seed);
    const SecretKey link_key = master.subkey(make_domain(StreamTag::generic, 0));
    const AgilitySchedule schedule = generate_schedule(link_key, vc, 0);

    const BitsPerChip bits = bits_per_chip(vc, spec.scheme);
    const std::uint64_t bits_per_frame =
        static_cast<std::uint64_t>(L) * vc.sys.chips_per_pulse * bits.total();
    const auto payload = random_payload(master, 0, 0, bits_per_frame);
    BitReader reader(payload);
    std::vector<PulsePlan> plans;
    plans.reserve(L);
    for (std::uint32_t l = 0; l < L; ++l)
        plans.push_back(encode_pulse(reader, vc, spec.scheme));

    const BasebandFrame frame = synthesize(plans, schedule, vc, exec);
    if (!spec.frame_dump_path.empty()) write_frame_binary(frame, spec.frame_dump_path);

    AfJobResult result;
    result.zero_doppler_numerical =
        zero_doppler_cut(AfSource::numerical, frame, plans, schedule, vc, tau_max,
                         spec.n_tau, spec.f, spec.f_prime, exec);
    result.zero_doppler_closed =
        zero_doppler_cut(AfSource::closed_form, frame, plans, schedule, vc, tau_max,
                         spec.n_tau, spec.f, spec.f_prime, exec);
    result.zero_delay_numerical =
        zero_delay_cut(AfSource::numerical, frame, plans, schedule, vc, nu_max,
                       spec.n_nu, spec.f, spec.f_prime, exec);
    result.zero_delay_closed =
        zero_delay_cut(AfSource::closed_form, frame, plans, schedule, vc, nu_max,
                       spec.n_nu, spec.f, spec.f_prime, exec);

    const SecretKey ensemble = master.subkey(make_domain(StreamTag::af_draw));
    result.expectation_zero_doppler = af_expectation(
        ensemble, spec.expectation_draws, plans, vc,
        linspace_axes(tau_max, spec.n_tau, 0.0, 1), spec.f, spec.f_prime, 1.0, exec);
    result.expectation_zero_delay = af_expectation(
        ensemble, spec.expectation_draws, plans, vc,
        linspace_axes(0.0, 1, nu_max, spec.n_nu), spec.f, spec.f_prime, 1.0, exec);

    if (!spec.out_dir.empty()) {
        std::filesystem::create_directories(spec.out_dir);
        auto p = [&](const char* name) { return spec.out_dir + "/" + name; };
        write_af_csv(result.zero_doppler_numerical, p("af_zero_doppler_numerical.csv"));
        write_af_csv(result.zero_doppler_closed, p("af_zero_doppler_closed.csv"));
        write_af_csv(result.zero_delay_numerical, p("af_zero_delay_numerical.csv"));
        write_af_csv(result.zero_delay_closed, p("af_zero_delay_closed.csv"));
        write_af_csv(result.expectation_zero_doppler,
                     p("af_expectation_zero_doppler.csv"));
        write_af_csv(result.expectation_zero_delay, p("af_expectation_zero_delay.csv"));
    }
    return result;
}

void append_ber_csv(const std::string& path, Scheme scheme,
                    const std::vector<BerPoint>& points,
                    const std::vector<SecrecyPoint>& secrecy, bool header) {
    std::ofstream out(path, header ? std::ios::trunc : std::ios::app);
    if (!out) throw Error(ErrorCode::IoFailure, "cannot open " + path);
    if (header)
        out << "ebn0_db,scheme,ber_bob,ber_eve,bits_counted,flagged_chips,"
               "secrecy_bits_per_bit,status\n";
    for (std::size_t i = 0; i < points.size(); ++i) {
        const BerPoint& pt = points[i];
        out << format_double(pt.ebn0_db) << ',' << scheme_name(scheme) << ','
            << format_double(pt.ber_bob) << ',' << format_double(pt.ber_eve) << ','
            << pt.bits_counted << ',' << pt.flagged_chips << ','
            << format_double(i < secrecy.size() ? secrecy[i].secrecy_bits_per_bit : 0.0)
            << ',' << (pt.aborted ? "aborted" : "ok") << '\n';
    }
}

void write_ber_csv(const std::string& path, Scheme scheme,
                   const std::vector<BerPoint>& points,
                   const std::vector<SecrecyPoint>& secrecy) {
    append_ber_csv(path, scheme, points, secrecy, true);
}

void write_rate_csv(const std::string& path, const std::vector<RatePoint>& points) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::IoFailure, "cannot open " + path);
    out << "num_tx,scheme,rate_bps\n";
    for (const auto& pt : points)
        out << pt.num_tx << ',' << scheme_name(pt.scheme) << ','
            << format_double(pt.rate_bps) << '\n';
}

void write_meta_json(const std::string& path, const ValidatedConfig& vc,
                     const std::string& command, std::uint64_t seed,
                     const std::vector<std::string>& schemes,
                     const std::string& extra_json) {
    nlohmann::json j;
    j["tool"] = "rfpa";
    j["version"] = "0.1.0";
    j["csv_schema_version"] = 1;
    j["command"] = command;
    j["seed"] = seed;
    j["schemes"] = schemes;
    j["config"] = nlohmann::json::parse(config_to_json(vc.sys));
    j["derived"] = {
        {"delta_t_s", vc.delta_t},
        {"delta_f_hz", vc.delta_f},
        {"delta_T_s", vc.delta_T},
        {"delta_F_hz", vc.delta_F},
        {"phi_t_cardinality", vc.phi_t_card},
        {"phi_f_cardinality", vc.phi_f_card},
        {"samples_per_chip", vc.sampling.samples_per_chip},
        {"samples_per_pulse", vc.sampling.samples_per_pulse},
        {"samples_per_pri", vc.sampling.samples_per_pri},
        {"prf_hz", vc.prf_hz()},
    };
    j["extra"] = nlohmann::json::parse(extra_json);
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::IoFailure, "cannot open " + path);
    out << j.dump(2) << '\n';
}

} // namespace rfpa
