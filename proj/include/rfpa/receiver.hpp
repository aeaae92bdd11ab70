// receiver.hpp - sparse matched-filter receiver and baselines.
//
// Per pulse the pipeline is: pseudo-inverse equalization, per-chip 1-sparse
// frequency detection against the chip-length DFT dictionary (a single
// greedy atom pick -- the signal is exactly 1-sparse per chip and antenna,
// so no residual iterations are needed), factorization of the detected hop
// codes into selection/permutation, then matched filtering of the summed
// equalized signal against the reconstructed references for the
// amplitude/phase estimates. An exhaustive ML search over all legal
// (selection, permutation) pairs is kept as a small-scale test oracle.

#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "rfpa/channel.hpp"
#include "rfpa/codec.hpp"
#include "rfpa/config.hpp"
#include "rfpa/keyschedule.hpp"
#include "rfpa/waveform.hpp"

namespace rfpa {

enum class EveStrategy { blind_zero, blind_uniform, genie };

const char* eve_strategy_name(EveStrategy s);
EveStrategy eve_strategy_from_name(const std::string& name);

/// Per-chip detection trace (per antenna entries).
struct ChipDetection {
    std::vector<std::uint32_t> hop_estimates;
    std::vector<std::uint32_t> peak_bins;
    std::vector<cplx> mf_outputs;
    std::vector<double> amp_estimates;
    std::vector<double> phase_estimates;
    bool flagged = false;
};

/// x_hat = H^dagger r over a pulse window. Throws RankDeficientChannel when
/// the condition number exceeds `cond_threshold` (callers flag the pulse and
/// decode it as an erasure).
Eigen::MatrixXcd equalize(const Eigen::Ref<const Eigen::MatrixXcd>& rx_window,
                          const Eigen::MatrixXcd& h, double cond_threshold = 1e12);

struct HopDetection {
    std::vector<std::uint32_t> hops;
    std::vector<std::uint32_t> bins;
    bool flagged = false; // clamped out-of-range index or off-bin residual
};

/// Greedy atom pick per antenna: peak |<Psi_i, chip>| over the n_c-bin DFT
/// dictionary, mapped to a hop index via the (known or guessed) pulse base
/// frequency. Out-of-range indices are clamped and flagged.
HopDetection detect_hops(const Eigen::Ref<const Eigen::MatrixXcd>& chip,
                         const ValidatedConfig& vc, std::uint32_t phi_f);

/// gamma_m = (1/n_c) sum_j (sum_m' xhat_m'[j]) conj(href_m[j]). The 1/n_c
/// normalization makes gamma a direct constellation estimate.
Eigen::VectorXcd matched_filter(const Eigen::Ref<const Eigen::MatrixXcd>& chip,
                                const std::vector<std::vector<cplx>>& reference_rows);

/// Exhaustive ML over all C(K,M)*M! hop hypotheses (test oracle only);
/// throws SearchSpaceTooLarge beyond 1e6 hypotheses.
std::vector<std::uint32_t> exhaustive_ml_detect(
    const Eigen::Ref<const Eigen::MatrixXcd>& chip, const ValidatedConfig& vc,
    std::uint32_t phi_f);

/// Runs the full per-pulse receiver. `schedule` is the receiver's belief
/// (Bob's true schedule, or Eve's guess). Returns the estimated pulse plan;
/// per-chip traces are appended to `trace` when provided.
PulsePlan receive_pulse(const BasebandFrame& rx, std::uint32_t l,
                        const Eigen::MatrixXcd& h, const AgilitySchedule& schedule,
                        const ValidatedConfig& vc, Scheme scheme,
                        std::vector<ChipDetection>* trace = nullptr);

} // namespace rfpa
