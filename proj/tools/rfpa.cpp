// rfpa.cpp - command-line front end.
//
// Subcommands: validate, ber, rate, af, schedule-dump, codec dump-tables.
// Every artifact is a pure function of (flags, seed); rerunning a command
// with the same inputs reproduces its CSV outputs byte for byte.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "rfpa/ambiguity.hpp"
#include "rfpa/codec.hpp"
#include "rfpa/config.hpp"
#include "rfpa/errors.hpp"
#include "rfpa/harness.hpp"
#include "rfpa/keyschedule.hpp"

namespace {

struct CommonOpts {
    std::string config_path;
    std::uint64_t seed = 1;
    std::string out_dir = "out";
    int threads = 0;
    rfpa::SystemConfig overrides;
};

void add_config_flags(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "JSON config file");
    cmd->add_option("--seed", opts.seed, "experiment seed");
    cmd->add_option("--out-dir", opts.out_dir, "output directory");
    cmd->add_option("--threads", opts.threads, "worker threads (0 = library default)");

    rfpa::SystemConfig& c = opts.overrides;
    cmd->add_option("--carrier-freq-hz", c.carrier_freq_hz);
    cmd->add_option("--bandwidth-hz", c.bandwidth_hz);
    cmd->add_option("--num-hops", c.num_hops);
    cmd->add_option("--pulse-duration-s", c.pulse_duration_s);
    cmd->add_option("--chips-per-pulse", c.chips_per_pulse);
    cmd->add_option("--num-tx", c.num_tx);
    cmd->add_option("--num-rx", c.num_rx);
    cmd->add_option("--num-pulses", c.num_pulses);
    cmd->add_option("--pri-s", c.pri_s);
    cmd->add_option("--ask-order", c.ask_order);
    cmd->add_option("--psk-order", c.psk_order);
    cmd->add_option("--sample-rate-hz", c.sample_rate_hz);
    cmd->add_option("--time-offset-alphabet", c.time_offset_alphabet);
    cmd->add_option("--freq-offset-alphabet", c.freq_offset_alphabet);
}

rfpa::SystemConfig resolve_config(const CLI::App* cmd, const CommonOpts& opts) {
    rfpa::SystemConfig cfg;
    if (!opts.config_path.empty()) cfg = rfpa::config_from_json_file(opts.config_path);

    auto take = [&](const char* flag, auto member) {
        if (cmd->count(flag)) cfg.*member = opts.overrides.*member;
    };
    take("--carrier-freq-hz", &rfpa::SystemConfig::carrier_freq_hz);
    take("--bandwidth-hz", &rfpa::SystemConfig::bandwidth_hz);
    take("--num-hops", &rfpa::SystemConfig::num_hops);
    take("--pulse-duration-s", &rfpa::SystemConfig::pulse_duration_s);
    take("--chips-per-pulse", &rfpa::SystemConfig::chips_per_pulse);
    take("--num-tx", &rfpa::SystemConfig::num_tx);
    take("--num-rx", &rfpa::SystemConfig::num_rx);
    take("--num-pulses", &rfpa::SystemConfig::num_pulses);
    take("--pri-s", &rfpa::SystemConfig::pri_s);
    take("--ask-order", &rfpa::SystemConfig::ask_order);
    take("--psk-order", &rfpa::SystemConfig::psk_order);
    take("--sample-rate-hz", &rfpa::SystemConfig::sample_rate_hz);
    take("--time-offset-alphabet", &rfpa::SystemConfig::time_offset_alphabet);
    take("--freq-offset-alphabet", &rfpa::SystemConfig::freq_offset_alphabet);
    return cfg;
}

std::vector<rfpa::Scheme> parse_schemes(const std::string& csv) {
    std::vector<rfpa::Scheme> schemes;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) schemes.push_back(rfpa::scheme_from_name(item));
    return schemes;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"secure frequency-agile FH-ISAC waveform simulator"};
    app.require_subcommand(1);

    // validate ------------------------------------------------------------
    CommonOpts val_opts;
    bool describe_flag = false;
    CLI::App* val = app.add_subcommand("validate", "validate a configuration");
    add_config_flags(val, val_opts);
    val->add_flag("--describe", describe_flag, "print derived values");

    // ber -----------------------------------------------------------------
    CommonOpts ber_opts;
    std::string ber_schemes = "PH,AMP,SIM,HYB";
    std::string ebn0_spec = "0:5:30";
    std::uint32_t ber_trials = 1;
    std::uint64_t bits_min = 10000;
    std::string eve_strategy = "blind-uniform";
    std::string trace_path;
    CLI::App* ber = app.add_subcommand("ber", "Monte-Carlo BER/secrecy sweep");
    add_config_flags(ber, ber_opts);
    ber->add_option("--schemes", ber_schemes, "comma list of PH,AMP,SIM,HYB");
    ber->add_option("--ebn0", ebn0_spec, "grid: start:step:stop or comma list (dB)");
    ber->add_option("--trials", ber_trials, "minimum trials per point");
    ber->add_option("--bits-min", bits_min, "minimum bits per point");
    ber->add_option("--eve", eve_strategy, "blind-zero | blind-uniform | genie");
    ber->add_option("--trace", trace_path,
                    "dump one trial's per-chip detection trace to this CSV");

    // rate ----------------------------------------------------------------
    CommonOpts rate_opts;
    std::string rate_schemes = "PH,AMP,SIM,HYB";
    std::uint32_t m_min = 1, m_max = 0;
    CLI::App* rate = app.add_subcommand("rate", "achievable rate vs number of antennas");
    add_config_flags(rate, rate_opts);
    rate->add_option("--schemes", rate_schemes, "comma list of PH,AMP,SIM,HYB");
    rate->add_option("--m-min", m_min, "smallest M");
    rate->add_option("--m-max", m_max, "largest M (0 = K)");

    // af ------------------------------------------------------------------
    CommonOpts af_opts;
    std::string af_scheme = "HYB";
    double tau_max = 0, nu_max = 0;
    std::size_t n_tau = 101, n_nu = 101;
    std::uint32_t draws = 16;
    double f_spatial = 0.0, f_spatial_prime = 0.0;
    std::string frame_dump;
    CLI::App* af = app.add_subcommand("af", "ambiguity-function cuts and expectation");
    add_config_flags(af, af_opts);
    af->add_option("--scheme", af_scheme, "embedding scheme for the probe frame");
    af->add_option("--dump-frame", frame_dump,
                   "also export the probe frame as raw complex binary");
    af->add_option("--tau-max", tau_max, "delay half-span in seconds (0 = 3 chips)");
    af->add_option("--nu-max", nu_max, "Doppler half-span in Hz (0 = 2/(L*T_p))");
    af->add_option("--tau-points", n_tau, "delay samples per cut");
    af->add_option("--nu-points", n_nu, "Doppler samples per cut");
    af->add_option("--expectation-draws", draws, "schedule draws for the AF expectation");
    af->add_option("--spatial-f", f_spatial, "normalized spatial frequency f");
    af->add_option("--spatial-f-prime", f_spatial_prime, "assumed spatial frequency f'");

    // schedule-dump ---------------------------------------------------------
    CommonOpts sched_opts;
    std::string key_hex;
    std::uint32_t stream_id = 0;
    std::string sched_out = "schedule.csv";
    CLI::App* sched = app.add_subcommand("schedule-dump", "export a keyed agility schedule");
    add_config_flags(sched, sched_opts);
    sched->add_option("--key", key_hex, "256-bit key as 64 hex chars (default: from seed)");
    sched->add_option("--stream-id", stream_id, "schedule stream id");
    sched->add_option("--out", sched_out, "output CSV path");

    // codec dump-tables -----------------------------------------------------
    CommonOpts codec_opts;
    std::size_t table_limit = 64;
    std::string tables_out;
    CLI::App* codec = app.add_subcommand("codec", "codec utilities");
    CLI::App* dump = codec->add_subcommand("dump-tables", "export codebook tables");
    add_config_flags(dump, codec_opts);
    dump->add_option("--limit", table_limit, "max rows per table (0 = all)");
    dump->add_option("--out", tables_out, "output path (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*val) {
            rfpa::ValidatedConfig vc = rfpa::validate(resolve_config(val, val_opts));
            std::cout << "configuration valid\n";
            if (describe_flag) std::cout << rfpa::describe(vc);
            return 0;
        }

        if (*ber) {
            rfpa::set_worker_threads(ber_opts.threads);
            rfpa::ValidatedConfig vc = rfpa::validate(resolve_config(ber, ber_opts));

            std::vector<double> grid;
            if (ebn0_spec.find(':') != std::string::npos) {
                double a, s, b;
                char c1, c2;
                std::istringstream is(ebn0_spec);
                is >> a >> c1 >> s >> c2 >> b;
                for (double v = a; v <= b + 1e-9; v += s) grid.push_back(v);
            } else {
                std::stringstream ss(ebn0_spec);
                std::string item;
                while (std::getline(ss, item, ',')) grid.push_back(std::stod(item));
            }

            std::filesystem::create_directories(ber_opts.out_dir);
            const std::string csv = ber_opts.out_dir + "/ber.csv";
            std::vector<std::string> scheme_names;
            bool header = true;
            bool trace_written = false;
            for (rfpa::Scheme scheme : parse_schemes(ber_schemes)) {
                rfpa::ExperimentSpec spec;
                spec.config = vc;
                spec.scheme = scheme;
                spec.ebn0_grid_db = grid;
                spec.trials = ber_trials;
                spec.bits_min = bits_min;
                spec.seed = ber_opts.seed;
                spec.eve_strategy = rfpa::eve_strategy_from_name(eve_strategy);
                if (!trace_path.empty() && !trace_written) {
                    rfpa::dump_receiver_trace(spec, trace_path);
                    trace_written = true;
                }
                auto points = rfpa::run_ber_sweep(spec);
                auto secrecy = rfpa::estimate_secrecy(points);
                rfpa::append_ber_csv(csv, scheme, points, secrecy, header);
                header = false;
                scheme_names.push_back(rfpa::scheme_name(scheme));
                for (const auto& pt : points)
                    std::cout << rfpa::scheme_name(scheme) << " ebn0=" << pt.ebn0_db
                              << " ber_bob=" << pt.ber_bob << " ber_eve=" << pt.ber_eve
                              << " bits=" << pt.bits_counted << "\n";
            }
            nlohmann::json extra;
            extra["bits_min"] = bits_min;
            extra["trials"] = ber_trials;
            extra["ebn0_grid_db"] = grid;
            extra["eve_strategy"] = eve_strategy;
            rfpa::write_meta_json(ber_opts.out_dir + "/meta.json", vc, "ber",
                                  ber_opts.seed, scheme_names, extra.dump());
            return 0;
        }

        if (*rate) {
            rfpa::SystemConfig cfg = resolve_config(rate, rate_opts);
            if (m_max == 0) m_max = cfg.num_hops;
            auto rows =
                rfpa::run_rate_sweep(cfg, m_min, m_max, parse_schemes(rate_schemes));
            std::filesystem::create_directories(rate_opts.out_dir);
            rfpa::write_rate_csv(rate_opts.out_dir + "/rate.csv", rows);
            rfpa::ValidatedConfig vc = rfpa::validate(cfg);
            rfpa::write_meta_json(rate_opts.out_dir + "/meta.json", vc, "rate",
                                  rate_opts.seed, {rate_schemes});
            std::cout << "wrote " << rows.size() << " rate rows\n";
            return 0;
        }

        if (*af) {
            rfpa::set_worker_threads(af_opts.threads);
            rfpa::ValidatedConfig vc = rfpa::validate(resolve_config(af, af_opts));
            rfpa::AfJobSpec spec;
            spec.config = vc;
            spec.scheme = rfpa::scheme_from_name(af_scheme);
            spec.seed = af_opts.seed;
            spec.tau_max_s = tau_max;
            spec.nu_max_hz = nu_max;
            spec.n_tau = n_tau;
            spec.n_nu = n_nu;
            spec.expectation_draws = draws;
            spec.f = f_spatial;
            spec.f_prime = f_spatial_prime;
            spec.out_dir = af_opts.out_dir;
            spec.frame_dump_path = frame_dump;
            rfpa::run_af_job(spec);
            nlohmann::json extra;
            extra["tau_points"] = n_tau;
            extra["nu_points"] = n_nu;
            extra["expectation_draws"] = draws;
            rfpa::write_meta_json(af_opts.out_dir + "/meta.json", vc, "af", af_opts.seed,
                                  {af_scheme}, extra.dump());
            std::cout << "wrote AF cuts to " << af_opts.out_dir << "\n";
            return 0;
        }

        if (*sched) {
            rfpa::ValidatedConfig vc = rfpa::validate(resolve_config(sched, sched_opts));
            rfpa::SecretKey key = key_hex.empty()
                                      ? rfpa::SecretKey::from_seed(sched_opts.seed)
                                      : rfpa::SecretKey::from_hex(key_hex);
            auto schedule = rfpa::generate_schedule(key, vc, stream_id);
            rfpa::write_schedule_csv(schedule, sched_out);
            std::cout << "wrote " << sched_out << " (key " << key.fingerprint() << ")\n";
            return 0;
        }

        if (*codec) {
            rfpa::ValidatedConfig vc = rfpa::validate(resolve_config(dump, codec_opts));
            if (tables_out.empty()) {
                rfpa::dump_tables(std::cout, vc, table_limit);
            } else {
                std::ofstream out(tables_out);
                rfpa::dump_tables(out, vc, table_limit);
                std::cout << "wrote " << tables_out << "\n";
            }
            return 0;
        }
    } catch (const rfpa::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
