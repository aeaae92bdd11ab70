// ambiguity.hpp - MIMO ambiguity function: numerical cross-AF, analytic form,
// grids/cuts, and the expectation over agility schedules.
//
// The analytic evaluator integrates each overlapping chip pair exactly:
// with t_l = l*T_p + T_l, a pair (l,q,m) x (l',q',m') overlaps on
// [alpha1, beta1] of local chip time, where
//   alpha1 = max((q'-q)*dt + t_l' - t_l - tau, 0)
//   beta1  = min((q'-q+1)*dt + t_l' - t_l - tau, dt),
// and contributes  A A' e^{i(W - W')} e^{beta2} (e^{alpha2 beta1} -
// e^{alpha2 alpha1}) / alpha2  with
//   alpha2 = i 2 pi (F - F' + nu)
//   beta2  = i 2 pi (F q dt + nu (q dt + t_l) - F' (q dt + t_l - t_l' + tau)),
// F = f_l + c df and F' = f_l' + c' df, both obtained by direct integration
// of the cross-AF definition. Chip pairs with beta1 <= alpha1 contribute
// zero; |alpha2| -> 0 takes the limit (beta1 - alpha1) e^{beta2}. The tests
// check every term against an independent quadrature of the definition.

#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "rfpa/codec.hpp"
#include "rfpa/config.hpp"
#include "rfpa/exec.hpp"
#include "rfpa/keyschedule.hpp"
#include "rfpa/prf.hpp"
#include "rfpa/waveform.hpp"

namespace rfpa {

enum class AfSource { numerical, closed_form };
enum class AfNormalization { none, peak };

struct AFGrid {
    std::vector<double> delays_s;
    std::vector<double> dopplers_hz;
    std::pair<double, double> spatial_freqs{0.0, 0.0};
    std::vector<double> magnitudes; // delays-major: [i_delay * n_doppler + i_doppler]
    AfNormalization normalization = AfNormalization::none;

    double at(std::size_t i_delay, std::size_t i_doppler) const {
        return magnitudes[i_delay * dopplers_hz.size() + i_doppler];
    }
};

/// Discrete cross-ambiguity sum_n x_m[n] conj(x_m'[n + round(tau f_s)])
/// e^{i 2 pi nu n / f_s} / f_s. tau snaps to the sample grid; the snap
/// residual is reported through *snap_residual_s when non-null.
cplx cross_af_numerical(const BasebandFrame& frame, std::size_t m, std::size_t m_prime,
                        double tau_s, double nu_hz, double* snap_residual_s = nullptr);

/// sum_{m,m'} chi_{m,m'}(tau, nu) e^{i 2 pi (f m - f' m') gamma_spacing}.
cplx mimo_af(const BasebandFrame& frame, double tau_s, double nu_hz, double f,
             double f_prime, double gamma_spacing = 1.0);

/// Exact contribution of one chip pair to the analytic AF (exposed so a
/// disagreement can be localized term by term).
cplx chip_pair_term(const std::vector<PulsePlan>& plans, const AgilitySchedule& schedule,
                    const ValidatedConfig& vc, std::uint32_t m, std::uint32_t m_prime,
                    std::uint32_t l, std::uint32_t l_prime, std::uint32_t q,
                    std::uint32_t q_prime, double tau_s, double nu_hz);

/// Analytic MIMO AF at continuous (tau, nu).
cplx closed_form_af(const std::vector<PulsePlan>& plans, const AgilitySchedule& schedule,
                    const ValidatedConfig& vc, double tau_s, double nu_hz, double f,
                    double f_prime, double gamma_spacing = 1.0);

struct AfAxes {
    std::vector<double> delays_s;
    std::vector<double> dopplers_hz;
};

AfAxes linspace_axes(double tau_max_s, std::size_t n_tau, double nu_max_hz,
                     std::size_t n_nu);

/// |chi| over the grid. For AfSource::numerical the frame is used; for
/// closed_form the plans/schedule are. Grid points are independent and the
/// per-point summation order is fixed, so serial and parallel runs are
/// bit-identical.
AFGrid af_grid(AfSource source, const BasebandFrame& frame,
               const std::vector<PulsePlan>& plans, const AgilitySchedule& schedule,
               const ValidatedConfig& vc, const AfAxes& axes, double f, double f_prime,
               double gamma_spacing = 1.0,
               AfNormalization normalization = AfNormalization::none,
               Exec exec = Exec::parallel);

AFGrid zero_doppler_cut(AfSource source, const BasebandFrame& frame,
                        const std::vector<PulsePlan>& plans,
                        const AgilitySchedule& schedule, const ValidatedConfig& vc,
                        double tau_max_s, std::size_t n_tau, double f, double f_prime,
                        Exec exec = Exec::parallel);

AFGrid zero_delay_cut(AfSource source, const BasebandFrame& frame,
                      const std::vector<PulsePlan>& plans, const AgilitySchedule& schedule,
                      const ValidatedConfig& vc, double nu_max_hz, std::size_t n_nu,
                      double f, double f_prime, Exec exec = Exec::parallel);

/// Mean of |chi| over R schedules drawn from independent keys derived from
/// `ensemble_key` (fresh agility per draw, fixed plans). Analytic source.
AFGrid af_expectation(const SecretKey& ensemble_key, std::uint32_t draws,
                      const std::vector<PulsePlan>& plans, const ValidatedConfig& vc,
                      const AfAxes& axes, double f, double f_prime,
                      double gamma_spacing = 1.0, Exec exec = Exec::parallel);

/// Long-format CSV (tau_s, doppler_hz, magnitude).
void write_af_csv(const AFGrid& grid, const std::string& path);

} // namespace rfpa
