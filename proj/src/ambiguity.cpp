#include "rfpa/ambiguity.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include "rfpa/errors.hpp"
#include "rfpa/io_util.hpp"

namespace rfpa {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline cplx cis(double x) { return cplx(std::cos(x), std::sin(x)); }

} // namespace

cplx cross_af_numerical(const BasebandFrame& frame, std::size_t m, std::size_t m_prime,
                        double tau_s, double nu_hz, double* snap_residual_s) {
    const double fs = frame.sample_rate_hz;
    const std::int64_t d = std::llround(tau_s * fs);
    if (snap_residual_s) *snap_residual_s = tau_s - static_cast<double>(d) / fs;
    const std::int64_t cols = static_cast<std::int64_t>(frame.cols);
    if (d <= -cols || d >= cols)
        throw Error(ErrorCode::DelayOutOfRange, "delay exceeds the frame duration");

    const cplx* xm = frame.row(m);
    const cplx* xp = frame.row(m_prime);
    const double w = kTwoPi * nu_hz / fs;

    // x_m is zero outside its pulse windows, so iterating those windows
    // (clipped to where n + d stays in range) reproduces the full sum.
    std::vector<std::pair<std::uint64_t, std::uint64_t>> spans;
    if (!frame.active_windows.empty()) {
        spans = frame.active_windows;
    } else {
        spans.push_back({0, frame.cols});
    }

    cplx acc(0.0, 0.0);
    for (auto [w0, w1] : spans) {
        std::int64_t n0 = static_cast<std::int64_t>(w0);
        std::int64_t n1 = static_cast<std::int64_t>(w1);
        n0 = std::max<std::int64_t>(n0, -d);
        n1 = std::min<std::int64_t>(n1, cols - d);
        for (std::int64_t n = n0; n < n1; ++n)
            acc += xm[n] * std::conj(xp[n + d]) * cis(w * static_cast<double>(n));
    }
    return acc / fs;
}

cplx mimo_af(const BasebandFrame& frame, double tau_s, double nu_hz, double f,
             double f_prime, double gamma_spacing) {
    cplx acc(0.0, 0.0);
    for (std::size_t m = 0; m < frame.rows; ++m)
        for (std::size_t mp = 0; mp < frame.rows; ++mp) {
            cplx steer = cis(kTwoPi * (f * static_cast<double>(m) -
                                       f_prime * static_cast<double>(mp)) *
                             gamma_spacing);
            acc += steer * cross_af_numerical(frame, m, mp, tau_s, nu_hz);
        }
    return acc;
}

cplx chip_pair_term(const std::vector<PulsePlan>& plans, const AgilitySchedule& schedule,
                    const ValidatedConfig& vc, std::uint32_t m, std::uint32_t m_prime,
                    std::uint32_t l, std::uint32_t l_prime, std::uint32_t q,
                    std::uint32_t q_prime, double tau_s, double nu_hz) {
    const double dt = vc.delta_t;
    const double t_l = l * vc.sys.pri_s + schedule.t_offsets_s[l];
    const double t_lp = l_prime * vc.sys.pri_s + schedule.t_offsets_s[l_prime];

    const double shift = t_lp - t_l - tau_s;
    const double alpha1 = std::max((double(q_prime) - double(q)) * dt + shift, 0.0);
    const double beta1 = std::min((double(q_prime) - double(q) + 1.0) * dt + shift, dt);
    if (beta1 <= alpha1) return cplx(0.0, 0.0);

    const ChipSymbols& a_chip = plans[l].chips[q];
    const ChipSymbols& b_chip = plans[l_prime].chips[q_prime];
    const double F = schedule.f_offsets_hz[l] + a_chip.hop_codes[m] * vc.delta_f;
    const double Fp = schedule.f_offsets_hz[l_prime] + b_chip.hop_codes[m_prime] * vc.delta_f;

    const cplx alpha2(0.0, kTwoPi * (F - Fp + nu_hz));
    const double beta2_im =
        kTwoPi * (F * q * dt + nu_hz * (q * dt + t_l) - Fp * (q * dt + t_l - t_lp + tau_s));

    const cplx amp_phase =
        a_chip.amplitudes[m] * b_chip.amplitudes[m_prime] *
        cis(a_chip.phases[m] - b_chip.phases[m_prime]);

    // |alpha2| dt below threshold: use the (beta1 - alpha1) e^{beta2} limit
    if (std::abs(alpha2.imag()) * dt < 1e-9)
        return amp_phase * cis(beta2_im) * (beta1 - alpha1);

    const cplx num = std::exp(alpha2 * beta1) - std::exp(alpha2 * alpha1);
    return amp_phase * cis(beta2_im) * num / alpha2;
}

cplx closed_form_af(const std::vector<PulsePlan>& plans, const AgilitySchedule& schedule,
                    const ValidatedConfig& vc, double tau_s, double nu_hz, double f,
                    double f_prime, double gamma_spacing) {
    const std::uint32_t M = vc.sys.num_tx;
    const std::uint32_t L = vc.sys.num_pulses;
    const std::uint32_t Q = vc.sys.chips_per_pulse;
    const double dt = vc.delta_t;
    const double pulse_len = Q * dt;

    cplx acc(0.0, 0.0);
    for (std::uint32_t l = 0; l < L; ++l) {
        const double t_l = l * vc.sys.pri_s + schedule.t_offsets_s[l];
        for (std::uint32_t lp = 0; lp < L; ++lp) {
            const double t_lp = lp * vc.sys.pri_s + schedule.t_offsets_s[lp];
            const double shift = t_lp - t_l - tau_s;
            // no (q, q') pair of these two pulses can overlap in time
            if (shift <= -pulse_len || shift >= pulse_len) continue;
            for (std::uint32_t q = 0; q < Q; ++q) {
                // overlap requires |(q'-q) dt + shift| < dt
                const double center = q - shift / dt;
                const std::int64_t qp_lo =
                    std::max<std::int64_t>(0, static_cast<std::int64_t>(std::floor(center - 1.0)));
                const std::int64_t qp_hi = std::min<std::int64_t>(
                    Q - 1, static_cast<std::int64_t>(std::ceil(center + 1.0)));
                for (std::int64_t qp = qp_lo; qp <= qp_hi; ++qp)
                    for (std::uint32_t m = 0; m < M; ++m)
                        for (std::uint32_t mp = 0; mp < M; ++mp) {
                            const cplx term = chip_pair_term(
                                plans, schedule, vc, m, mp, l, lp, q,
                                static_cast<std::uint32_t>(qp), tau_s, nu_hz);
                            if (term == cplx(0.0, 0.0)) continue;
                            acc += cis(kTwoPi * (f * m - f_prime * mp) * gamma_spacing) *
                                   term;
                        }
            }
        }
    }
    return acc;
}

AfAxes linspace_axes(double tau_max_s, std::size_t n_tau, double nu_max_hz,
                     std::size_t n_nu) {
    AfAxes axes;
    axes.delays_s.resize(n_tau);
    axes.dopplers_hz.resize(n_nu);
    for (std::size_t i = 0; i < n_tau; ++i)
        axes.delays_s[i] =
            n_tau == 1 ? 0.0 : -tau_max_s + 2.0 * tau_max_s * i / (n_tau - 1);
    for (std::size_t i = 0; i < n_nu; ++i)
        axes.dopplers_hz[i] =
            n_nu == 1 ? 0.0 : -nu_max_hz + 2.0 * nu_max_hz * i / (n_nu - 1);
    return axes;
}

AFGrid af_grid(AfSource source, const BasebandFrame& frame,
               const std::vector<PulsePlan>& plans, const AgilitySchedule& schedule,
               const ValidatedConfig& vc, const AfAxes& axes, double f, double f_prime,
               double gamma_spacing, AfNormalization normalization, Exec exec) {
    AFGrid grid;
    grid.delays_s = axes.delays_s;
    grid.dopplers_hz = axes.dopplers_hz;
    grid.spatial_freqs = {f, f_prime};
    grid.normalization = normalization;
    const std::size_t n_tau = axes.delays_s.size();
    const std::size_t n_nu = axes.dopplers_hz.size();
    grid.magnitudes.assign(n_tau * n_nu, 0.0);

    const std::int64_t total = static_cast<std::int64_t>(n_tau * n_nu);
    #pragma omp parallel for schedule(dynamic) if (exec == Exec::parallel)
    for (std::int64_t idx = 0; idx < total; ++idx) {
        const std::size_t it = static_cast<std::size_t>(idx) / n_nu;
        const std::size_t iv = static_cast<std::size_t>(idx) % n_nu;
        const double tau = axes.delays_s[it];
        const double nu = axes.dopplers_hz[iv];
        cplx v = source == AfSource::numerical
                     ? mimo_af(frame, tau, nu, f, f_prime, gamma_spacing)
                     : closed_form_af(plans, schedule, vc, tau, nu, f, f_prime,
                                      gamma_spacing);
        grid.magnitudes[static_cast<std::size_t>(idx)] = std::abs(v);
    }

    if (normalization == AfNormalization::peak) {
        double peak = *std::max_element(grid.magnitudes.begin(), grid.magnitudes.end());
        if (peak > 0)
            for (auto& v : grid.magnitudes) v /= peak;
    }
    return grid;
}

AFGrid zero_doppler_cut(AfSource source, const BasebandFrame& frame,
                        const std::vector<PulsePlan>& plans,
                        const AgilitySchedule& schedule, const ValidatedConfig& vc,
                        double tau_max_s, std::size_t n_tau, double f, double f_prime,
                        Exec exec) {
    AfAxes axes = linspace_axes(tau_max_s, n_tau, 0.0, 1);
    return af_grid(source, frame, plans, schedule, vc, axes, f, f_prime, 1.0,
                   AfNormalization::none, exec);
}

AFGrid zero_delay_cut(AfSource source, const BasebandFrame& frame,
                      const std::vector<PulsePlan>& plans, const AgilitySchedule& schedule,
                      const ValidatedConfig& vc, double nu_max_hz, std::size_t n_nu,
                      double f, double f_prime, Exec exec) {
    AfAxes axes = linspace_axes(0.0, 1, nu_max_hz, n_nu);
    return af_grid(source, frame, plans, schedule, vc, axes, f, f_prime, 1.0,
                   AfNormalization::none, exec);
}

AFGrid af_expectation(const SecretKey& ensemble_key, std::uint32_t draws,
                      const std::vector<PulsePlan>& plans, const ValidatedConfig& vc,
                      const AfAxes& axes, double f, double f_prime, double gamma_spacing,
                      Exec exec) {
    std::vector<AgilitySchedule> schedules;
    schedules.reserve(draws);
    for (std::uint32_t r = 0; r < draws; ++r)
        schedules.push_back(generate_schedule(
            ensemble_key.subkey(make_domain(StreamTag::af_draw, r)), vc, r));

    AFGrid grid;
    grid.delays_s = axes.delays_s;
    grid.dopplers_hz = axes.dopplers_hz;
    grid.spatial_freqs = {f, f_prime};
    const std::size_t n_tau = axes.delays_s.size();
    const std::size_t n_nu = axes.dopplers_hz.size();
    grid.magnitudes.assign(n_tau * n_nu, 0.0);

    const std::int64_t total = static_cast<std::int64_t>(n_tau * n_nu);
    #pragma omp parallel for schedule(dynamic) if (exec == Exec::parallel)
    for (std::int64_t idx = 0; idx < total; ++idx) {
        const std::size_t it = static_cast<std::size_t>(idx) / n_nu;
        const std::size_t iv = static_cast<std::size_t>(idx) % n_nu;
        double mean = 0.0;
        for (std::uint32_t r = 0; r < draws; ++r)   // fixed order per point
            mean += std::abs(closed_form_af(plans, schedules[r], vc,
                                            axes.delays_s[it], axes.dopplers_hz[iv], f,
                                            f_prime, gamma_spacing));
        grid.magnitudes[static_cast<std::size_t>(idx)] = mean / draws;
    }
    return grid;
}

void write_af_csv(const AFGrid& grid, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::IoFailure, "cannot open " + path);
    out << "tau_s,doppler_hz,magnitude\n";
    for (std::size_t it = 0; it < grid.delays_s.size(); ++it)
        for (std::size_t iv = 0; iv < grid.dopplers_hz.size(); ++iv)
            out << format_double(grid.delays_s[it]) << ','
                << format_double(grid.dopplers_hz[iv]) << ','
                << format_double(grid.at(it, iv)) << '\n';
}

} // namespace rfpa
