#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "rfpa/errors.hpp"
#include "rfpa/receiver.hpp"
#include "support/configs.hpp"

using namespace rfpa;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Eigen::MatrixXcd chip_matrix(const ValidatedConfig& vc,
                             const std::vector<std::uint32_t>& hops,
                             std::uint32_t phi_f,
                             const std::vector<double>& amps = {},
                             const std::vector<double>& phases = {}) {
    const std::uint32_t M = static_cast<std::uint32_t>(hops.size());
    const std::uint32_t nc = vc.sampling.samples_per_chip;
    Eigen::MatrixXcd chip(M, nc);
    for (std::uint32_t m = 0; m < M; ++m) {
        auto tone = chip_tone(vc, phi_f * vc.sys.num_hops + hops[m]);
        cplx coeff = (amps.empty() ? 1.0 : amps[m]) *
                     std::polar(1.0, phases.empty() ? 0.0 : phases[m]);
        for (std::uint32_t j = 0; j < nc; ++j) chip(m, j) = coeff * tone[j];
    }
    return chip;
}

Eigen::MatrixXcd random_channel(std::uint32_t n, std::uint32_t m, std::uint64_t seed) {
    PrfStream s(SecretKey::from_seed(seed), make_domain(StreamTag::channel_bob, 0, 0));
    Eigen::MatrixXcd h(n, m);
    for (std::uint32_t i = 0; i < n; ++i)
        for (std::uint32_t j = 0; j < m; ++j)
            h(i, j) = cplx(s.next_gaussian(), s.next_gaussian()) * std::sqrt(0.5);
    return h;
}

} // namespace

TEST_CASE("equalization inverts the channel") {
    ValidatedConfig vc = validate(testing::mini_sys(4, 2, 2));
    Eigen::MatrixXcd x = chip_matrix(vc, {0, 2}, 0);

    SUBCASE("identity channel") {
        Eigen::MatrixXcd h = Eigen::MatrixXcd::Identity(2, 2);
        Eigen::MatrixXcd xhat = equalize(h * x, h);
        CHECK((xhat - x).cwiseAbs().maxCoeff() < 1e-14);
    }
    SUBCASE("random well-conditioned channel") {
        Eigen::MatrixXcd h = random_channel(2, 2, 3);
        Eigen::MatrixXcd xhat = equalize(h * x, h);
        CHECK((xhat - x).norm() / x.norm() < 1e-10);
    }
    SUBCASE("tall channel (N > M)") {
        Eigen::MatrixXcd h = random_channel(4, 2, 4);
        Eigen::MatrixXcd xhat = equalize(h * x, h);
        CHECK((xhat - x).norm() / x.norm() < 1e-10);
    }
    SUBCASE("repeated column is rank deficient") {
        Eigen::MatrixXcd h = random_channel(2, 2, 5);
        h.col(1) = h.col(0);
        CHECK_THROWS_AS(equalize(h * x, h), Error);
    }
}

TEST_CASE("hop detection is exact on noiseless chips") {
    ValidatedConfig vc = validate(testing::mini_sys(4, 2, 2));
    Eigen::MatrixXcd chip = chip_matrix(vc, {3, 1}, 0);
    HopDetection det = detect_hops(chip, vc, 0);
    CHECK(det.hops == std::vector<std::uint32_t>{3, 1});
    CHECK_FALSE(det.flagged);
}

TEST_CASE("a wrong base-frequency assumption derails hop mapping") {
    // transmit with phi_f = 3 (f_l = 150 MHz), receiver assumes phi_f = 0:
    // the peak lands at bin 33, far outside the legal hop range
    ValidatedConfig vc = validate(testing::default_sys(1));
    REQUIRE(vc.phi_f_card == 4);
    Eigen::MatrixXcd chip =
        chip_matrix(vc, {3, 0, 1, 2, 4, 5, 6, 7}, 3);
    HopDetection det = detect_hops(chip, vc, 0);
    CHECK(det.flagged);
    CHECK(det.bins[0] == 33);
    CHECK(det.hops[0] == vc.sys.num_hops - 1); // clamped
}

TEST_CASE("matched filter recovers constellation estimates exactly") {
    ValidatedConfig vc = validate(testing::mini_sys(4, 2, 2));
    const std::uint32_t nc = vc.sampling.samples_per_chip;

    SUBCASE("phase pi/2 yields gamma = i") {
        Eigen::MatrixXcd chip = chip_matrix(vc, {0, 2}, 0, {1, 1}, {kTwoPi / 4, 0});
        std::vector<std::vector<cplx>> ref = {chip_tone(vc, 0), chip_tone(vc, 2)};
        Eigen::VectorXcd gamma = matched_filter(chip, ref);
        CHECK(std::abs(gamma(0) - cplx(0, 1)) < 1e-12);
        CHECK(std::abs(gamma(1) - cplx(1, 0)) < 1e-12);
    }
    SUBCASE("cross-antenna terms cancel for distinct hops") {
        Eigen::MatrixXcd chip = chip_matrix(vc, {1, 3}, 0, {1, 2}, {0, 0});
        std::vector<std::vector<cplx>> ref = {chip_tone(vc, 1), chip_tone(vc, 3)};
        Eigen::VectorXcd gamma = matched_filter(chip, ref);
        CHECK(std::abs(gamma(0) - cplx(1, 0)) < 1e-12);
        CHECK(std::abs(gamma(1) - cplx(2, 0)) < 1e-12);
    }
    SUBCASE("a wrong reference hop correlates to zero") {
        Eigen::MatrixXcd chip = chip_matrix(vc, {1, 3}, 0);
        std::vector<std::vector<cplx>> ref = {chip_tone(vc, 2), chip_tone(vc, 2)};
        Eigen::VectorXcd gamma = matched_filter(chip, ref);
        CHECK(std::abs(gamma(0)) < 1e-12);
        CHECK(std::abs(gamma(1)) < 1e-12);
        (void)nc;
    }
}

TEST_CASE("greedy detection equals exhaustive ML on noiseless codebooks (K<=6, M<=3)") {
    for (std::uint32_t K : {2u, 4u, 6u}) {
        for (std::uint32_t M = 1; M <= std::min(3u, K); ++M) {
            ValidatedConfig vc = validate(testing::mini_sys(K, M, M));
            BitsPerChip b = bits_per_chip(vc, Scheme::SIM);
            for (std::uint64_t sel = 0; sel < (1ull << b.b_sel); ++sel)
                for (std::uint64_t perm = 0; perm < (1ull << b.b_perm); ++perm) {
                    auto subset = combinadic_unrank(sel, K, M);
                    auto p = lehmer_unrank(perm, M);
                    std::vector<std::uint32_t> codes(M);
                    for (std::uint32_t m = 0; m < M; ++m) codes[m] = subset[p[m]];
                    Eigen::MatrixXcd chip = chip_matrix(vc, codes, 0);
                    CHECK(detect_hops(chip, vc, 0).hops == codes);
                    CHECK(exhaustive_ml_detect(chip, vc, 0) == codes);
                }
        }
    }
}

TEST_CASE("greedy detection matches exhaustive ML on noisy chips at 20 dB") {
    ValidatedConfig vc = validate(testing::mini_sys(4, 2, 2));
    const std::uint32_t nc = vc.sampling.samples_per_chip;
    PrfStream noise(SecretKey::from_seed(77), make_domain(StreamTag::generic, 1));
    const double sigma = std::sqrt(0.01); // per-sample chip SNR = 20 dB

    int trials = 10000, matches = 0;
    for (int t = 0; t < trials; ++t) {
        std::uint32_t sel = static_cast<std::uint32_t>(noise.next_bits(2));
        std::uint32_t perm = static_cast<std::uint32_t>(noise.next_bits(1));
        auto subset = combinadic_unrank(sel, 4, 2);
        auto p = lehmer_unrank(perm, 2);
        std::vector<std::uint32_t> codes = {subset[p[0]], subset[p[1]]};
        Eigen::MatrixXcd chip = chip_matrix(vc, codes, 0);
        for (std::uint32_t m = 0; m < 2; ++m)
            for (std::uint32_t j = 0; j < nc; ++j)
                chip(m, j) += sigma * std::sqrt(0.5) *
                              cplx(noise.next_gaussian(), noise.next_gaussian());
        if (detect_hops(chip, vc, 0).hops == exhaustive_ml_detect(chip, vc, 0))
            ++matches;
    }
    CHECK(double(matches) / trials >= 0.999);
}

TEST_CASE("exhaustive ML guards its search space") {
    ValidatedConfig vc = validate(testing::default_sys(1));
    // C(10,8) * 8! = 45 * 40320 = 1,814,400 hypotheses
    CHECK(binomial_exact(10, 8) * factorial_exact(8) == 1814400);
    Eigen::MatrixXcd chip =
        chip_matrix(vc, {0, 1, 2, 3, 4, 5, 6, 7}, 0);
    CHECK_THROWS_AS(exhaustive_ml_detect(chip, vc, 0), Error);
    // K=4, M=2 enumerates C(4,2)*2! = 12 hypotheses without complaint
    CHECK(binomial_exact(4, 2) * factorial_exact(2) == 12);
}

TEST_CASE("noiseless pulse loopback recovers the transmitted plan") {
    ValidatedConfig vc = validate(testing::mini_sys(4, 2, 2));
    SecretKey key = SecretKey::from_seed(21);
    AgilitySchedule sched = generate_schedule(key, vc, 0);

    for (Scheme scheme : {Scheme::PH, Scheme::AMP, Scheme::SIM, Scheme::HYB}) {
        BitsPerChip b = bits_per_chip(vc, scheme);
        PrfStream s(key, make_domain(StreamTag::payload, 1, 1));
        std::vector<std::uint8_t> payload(static_cast<std::size_t>(vc.sys.num_pulses) *
                                          vc.sys.chips_per_pulse * b.total());
        for (auto& v : payload) v = static_cast<std::uint8_t>(s.next_bits(1));
        BitReader reader(payload);
        std::vector<PulsePlan> plans;
        for (std::uint32_t l = 0; l < vc.sys.num_pulses; ++l)
            plans.push_back(encode_pulse(reader, vc, scheme));

        BasebandFrame tx = synthesize(plans, sched, vc);
        RngStream rng{key, 0};
        ChannelRealization real = draw_channel_realization(vc, rng, 0.0, 0.0);
        BasebandFrame rx = apply(tx, real, Party::bob, vc, rng);

        BitWriter decoded;
        for (std::uint32_t l = 0; l < vc.sys.num_pulses; ++l) {
            PulsePlan est = receive_pulse(rx, l, real.h_bob[l], sched, vc, scheme);
            for (std::uint32_t q = 0; q < vc.sys.chips_per_pulse; ++q) {
                CHECK(est.chips[q].hop_codes == plans[l].chips[q].hop_codes);
                CHECK_FALSE(est.chips[q].flagged);
                for (std::uint32_t m = 0; m < vc.sys.num_tx; ++m) {
                    CHECK(est.chips[q].amplitudes[m] ==
                          doctest::Approx(plans[l].chips[q].amplitudes[m]).epsilon(1e-9));
                    CHECK(est.chips[q].phases[m] ==
                          doctest::Approx(plans[l].chips[q].phases[m]).epsilon(1e-9));
                }
            }
            decode_pulse(est, vc, scheme, decoded);
        }
        CHECK(decoded.bits() == payload);
    }
}

TEST_CASE("phase and amplitude estimates tighten as noise vanishes") {
    ValidatedConfig vc = validate(testing::mini_sys(4, 2, 2));
    const std::uint32_t nc = vc.sampling.samples_per_chip;
    PrfStream noise(SecretKey::from_seed(99), make_domain(StreamTag::generic, 2));

    double prev_err = 1e9;
    for (double sigma : {0.3, 0.03, 0.003}) {
        double err = 0;
        const int trials = 400;
        for (int t = 0; t < trials; ++t) {
            Eigen::MatrixXcd chip = chip_matrix(vc, {0, 2}, 0, {1, 1}, {kTwoPi / 4, 0});
            for (std::uint32_t m = 0; m < 2; ++m)
                for (std::uint32_t j = 0; j < nc; ++j)
                    chip(m, j) += sigma * std::sqrt(0.5) *
                                  cplx(noise.next_gaussian(), noise.next_gaussian());
            std::vector<std::vector<cplx>> ref = {chip_tone(vc, 0), chip_tone(vc, 2)};
            Eigen::VectorXcd gamma = matched_filter(chip, ref);
            err += std::abs(std::arg(gamma(0)) - kTwoPi / 4) +
                   std::abs(std::abs(gamma(1)) - 1.0);
        }
        err /= trials;
        CHECK(err < prev_err);
        prev_err = err;
    }
}

TEST_CASE("receive window honours the schedule's time offset") {
    ValidatedConfig vc = validate(testing::mini_sys(4, 2, 2));
    SecretKey key = SecretKey::from_seed(31);
    AgilitySchedule sched = zero_schedule(vc);
    sched.phi_t[1] = 1;
    sched.t_offsets_s[1] = vc.delta_T;

    BitsPerChip b = bits_per_chip(vc, Scheme::SIM);
    PrfStream s(key, make_domain(StreamTag::payload, 2, 2));
    std::vector<std::uint8_t> payload(static_cast<std::size_t>(vc.sys.num_pulses) *
                                      vc.sys.chips_per_pulse * b.total());
    for (auto& v : payload) v = static_cast<std::uint8_t>(s.next_bits(1));
    BitReader reader(payload);
    std::vector<PulsePlan> plans;
    for (std::uint32_t l = 0; l < vc.sys.num_pulses; ++l)
        plans.push_back(encode_pulse(reader, vc, Scheme::SIM));
    BasebandFrame tx = synthesize(plans, sched, vc);

    RngStream rng{key, 0};
    ChannelRealization real = draw_channel_realization(vc, rng, 0.0, 0.0);
    BasebandFrame rx = apply(tx, real, Party::bob, vc, rng);

    // correct offset decodes; a wrong offset lands in silence and flags
    PulsePlan good = receive_pulse(rx, 1, real.h_bob[1], sched, vc, Scheme::SIM);
    CHECK(good.chips[0].hop_codes == plans[1].chips[0].hop_codes);

    AgilitySchedule wrong = sched;
    wrong.phi_t[1] = 0;
    wrong.t_offsets_s[1] = 0;
    PulsePlan bad = receive_pulse(rx, 1, real.h_bob[1], wrong, vc, Scheme::SIM);
    bool any_mismatch = false;
    for (std::uint32_t q = 0; q < vc.sys.chips_per_pulse; ++q)
        any_mismatch |= bad.chips[q].flagged ||
                        bad.chips[q].hop_codes != plans[1].chips[q].hop_codes;
    CHECK(any_mismatch);
}
