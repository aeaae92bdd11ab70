#include "rfpa/receiver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rfpa/errors.hpp"

namespace rfpa {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

} // namespace

const char* eve_strategy_name(EveStrategy s) {
    switch (s) {
        case EveStrategy::blind_zero:    return "blind-zero";
        case EveStrategy::blind_uniform: return "blind-uniform";
        case EveStrategy::genie:         return "genie";
    }
    return "?";
}

EveStrategy eve_strategy_from_name(const std::string& name) {
    if (name == "blind-zero") return EveStrategy::blind_zero;
    if (name == "blind-uniform") return EveStrategy::blind_uniform;
    if (name == "genie") return EveStrategy::genie;
    throw Error(ErrorCode::InvalidExperiment, "unknown eve strategy " + name);
}

Eigen::MatrixXcd equalize(const Eigen::Ref<const Eigen::MatrixXcd>& rx_window,
                          const Eigen::MatrixXcd& h, double cond_threshold) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(h, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double smin = sv(sv.size() - 1);
    if (!(smin > 0.0) || sv(0) / smin > cond_threshold)
        throw Error(ErrorCode::RankDeficientChannel, "channel matrix is ill-conditioned");
    Eigen::VectorXd inv_sv = sv.cwiseInverse();
    // left pseudo-inverse V diag(1/s) U^H applied to every sample
    return svd.matrixV() * inv_sv.asDiagonal() *
           (svd.matrixU().adjoint() * rx_window);
}

HopDetection detect_hops(const Eigen::Ref<const Eigen::MatrixXcd>& chip,
                         const ValidatedConfig& vc, std::uint32_t phi_f) {
    const std::uint32_t M = vc.sys.num_tx;
    const std::uint32_t K = vc.sys.num_hops;
    const std::uint32_t nc = vc.sampling.samples_per_chip;

    HopDetection det;
    det.hops.resize(M);
    det.bins.resize(M);

    // dictionary atoms Psi(i, j) = exp(-i 2 pi i j / n_c)
    std::vector<cplx> tw(nc);
    for (std::uint32_t k = 0; k < nc; ++k) {
        double a = kTwoPi * k / nc;
        tw[k] = cplx(std::cos(a), -std::sin(a));
    }

    // peak bin -> frequency -> hop index; base frequency in bin units
    const double base_bin = (vc.delta_F * phi_f) / vc.delta_f; // = phi_f * K

    for (std::uint32_t m = 0; m < M; ++m) {
        std::uint32_t best_bin = 0;
        double best_mag = -1.0;
        for (std::uint32_t i = 0; i < nc; ++i) {
            cplx acc(0.0, 0.0);
            for (std::uint32_t j = 0; j < nc; ++j)
                acc += tw[(static_cast<std::uint64_t>(i) * j) % nc] * chip(m, j);
            double mag = std::norm(acc);
            if (mag > best_mag) {
                best_mag = mag;
                best_bin = i;
            }
        }
        det.bins[m] = best_bin;

        const double hop_float = static_cast<double>(best_bin) - base_bin;
        const double rounded = std::round(hop_float);
        if (std::abs(hop_float - rounded) > 0.01) det.flagged = true;
        long hop = std::lround(rounded);
        if (hop < 0 || hop >= static_cast<long>(K)) {
            det.flagged = true;
            hop = std::clamp<long>(hop, 0, static_cast<long>(K) - 1);
        }
        det.hops[m] = static_cast<std::uint32_t>(hop);
    }
    return det;
}

Eigen::VectorXcd matched_filter(const Eigen::Ref<const Eigen::MatrixXcd>& chip,
                                const std::vector<std::vector<cplx>>& reference_rows) {
    const auto nc = chip.cols();
    Eigen::RowVectorXcd summed = Eigen::RowVectorXcd::Zero(nc);
    for (Eigen::Index m = 0; m < chip.rows(); ++m) summed += chip.row(m);

    Eigen::VectorXcd gamma(static_cast<Eigen::Index>(reference_rows.size()));
    for (std::size_t r = 0; r < reference_rows.size(); ++r) {
        cplx acc(0.0, 0.0);
        for (Eigen::Index j = 0; j < nc; ++j)
            acc += summed(j) * std::conj(reference_rows[r][static_cast<std::size_t>(j)]);
        gamma(static_cast<Eigen::Index>(r)) = acc / static_cast<double>(nc);
    }
    return gamma;
}

std::vector<std::uint32_t> exhaustive_ml_detect(
    const Eigen::Ref<const Eigen::MatrixXcd>& chip, const ValidatedConfig& vc,
    std::uint32_t phi_f) {
    const std::uint32_t K = vc.sys.num_hops;
    const std::uint32_t M = vc.sys.num_tx;
    const std::uint32_t nc = vc.sampling.samples_per_chip;

    const std::uint64_t hypotheses = binomial_exact(K, M) * factorial_exact(M);
    if (hypotheses > 1000000ull)
        throw Error(ErrorCode::SearchSpaceTooLarge,
                    std::to_string(hypotheses) + " hypotheses");

    // residual ||chip_m - tone_k||^2 for every antenna/hop pair
    Eigen::MatrixXd dist(M, K);
    const std::uint32_t base = phi_f * K;
    for (std::uint32_t k = 0; k < K; ++k) {
        auto tone = chip_tone(vc, base + k);
        for (std::uint32_t m = 0; m < M; ++m) {
            double d = 0.0;
            for (std::uint32_t j = 0; j < nc; ++j)
                d += std::norm(chip(m, j) - tone[j]);
            dist(m, k) = d;
        }
    }

    const std::uint64_t n_subsets = binomial_exact(K, M);
    const std::uint64_t n_perms = factorial_exact(M);
    double best = std::numeric_limits<double>::infinity();
    std::vector<std::uint32_t> best_codes(M, 0);
    for (std::uint64_t s = 0; s < n_subsets; ++s) {
        auto subset = combinadic_unrank(s, K, M);
        for (std::uint64_t p = 0; p < n_perms; ++p) {
            auto perm = lehmer_unrank(p, M);
            double d = 0.0;
            for (std::uint32_t m = 0; m < M; ++m) d += dist(m, subset[perm[m]]);
            if (d < best) {
                best = d;
                for (std::uint32_t m = 0; m < M; ++m) best_codes[m] = subset[perm[m]];
            }
        }
    }
    return best_codes;
}

PulsePlan receive_pulse(const BasebandFrame& rx, std::uint32_t l,
                        const Eigen::MatrixXcd& h, const AgilitySchedule& schedule,
                        const ValidatedConfig& vc, Scheme scheme,
                        std::vector<ChipDetection>* trace) {
    const std::uint32_t M = vc.sys.num_tx;
    const std::uint32_t Q = vc.sys.chips_per_pulse;
    const std::uint32_t nc = vc.sampling.samples_per_chip;
    const bool has_im = scheme == Scheme::SIM || scheme == Scheme::HYB;
    const bool has_mf = scheme != Scheme::SIM;

    PulsePlan plan;
    plan.scheme = scheme;
    plan.chips.resize(Q);

    const std::uint64_t start = pulse_start_sample(vc, l, schedule.phi_t[l]);
    using StridedMap =
        Eigen::Map<const Eigen::MatrixXcd, Eigen::Unaligned, Eigen::OuterStride<>>;
    StridedMap window_t(rx.data.data() + start,
                        static_cast<Eigen::Index>(Q) * nc, static_cast<Eigen::Index>(rx.rows),
                        Eigen::OuterStride<>(static_cast<Eigen::Index>(rx.cols)));

    Eigen::MatrixXcd xhat; // M x (Q*nc)
    try {
        xhat = equalize(window_t.transpose(), h);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::RankDeficientChannel) throw;
        // erasure: every chip flagged, defaults elsewhere
        for (auto& chip : plan.chips) {
            chip.amplitudes.assign(M, 1.0);
            chip.phases.assign(M, 0.0);
            chip.hop_codes = predefined_hop_codes(M);
            chip.flagged = true;
        }
        return plan;
    }

    const std::uint32_t base_bin = schedule.phi_f[l] * vc.sys.num_hops;
    const std::vector<double> levels = ask_levels(vc.sys.ask_order);

    for (std::uint32_t q = 0; q < Q; ++q) {
        ChipSymbols& chip = plan.chips[q];
        chip.amplitudes.assign(M, 1.0);
        chip.phases.assign(M, 0.0);
        auto block = xhat.middleCols(static_cast<Eigen::Index>(q) * nc, nc);

        ChipDetection det;
        if (has_im) {
            HopDetection hops = detect_hops(block, vc, schedule.phi_f[l]);
            chip.hop_codes = hops.hops;
            chip.flagged = hops.flagged;
            std::uint64_t sel = 0, perm = 0;
            if (!chip.flagged && factor_hop_codes(chip.hop_codes, vc, sel, perm)) {
                chip.selection_rank = sel;
                chip.permutation_rank = perm;
            } else {
                chip.flagged = true;
            }
            det.hop_estimates = hops.hops;
            det.peak_bins = hops.bins;
        } else {
            chip.hop_codes = predefined_hop_codes(M);
            det.hop_estimates = chip.hop_codes;
        }

        if (has_mf) {
            std::vector<std::vector<cplx>> reference(M);
            for (std::uint32_t m = 0; m < M; ++m)
                reference[m] = chip_tone(vc, base_bin + chip.hop_codes[m]);
            Eigen::VectorXcd gamma = matched_filter(block, reference);

            det.mf_outputs.resize(M);
            det.amp_estimates.resize(M);
            det.phase_estimates.resize(M);
            for (std::uint32_t m = 0; m < M; ++m) {
                const cplx g = gamma(m);
                double amp = std::abs(g);
                double phase = std::arg(g);
                if (phase < 0) phase += kTwoPi;
                det.mf_outputs[m] = g;
                det.amp_estimates[m] = amp;
                det.phase_estimates[m] = phase;
                if (scheme != Scheme::PH)
                    chip.amplitudes[m] = levels[slice_ask(amp, vc.sys.ask_order)];
                if (scheme != Scheme::AMP)
                    chip.phases[m] =
                        psk_phase(slice_psk(phase, vc.sys.psk_order), vc.sys.psk_order);
            }
        }

        det.flagged = chip.flagged;
        if (trace) trace->push_back(std::move(det));
    }
    return plan;
}

} // namespace rfpa
