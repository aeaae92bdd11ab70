#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "rfpa/config.hpp"
#include "rfpa/errors.hpp"
#include "support/configs.hpp"

using namespace rfpa;

TEST_CASE("desk-scale defaults validate with the expected derived values") {
    ValidatedConfig vc = validate(testing::default_sys());
    CHECK(vc.delta_t == doctest::Approx(200e-9).epsilon(1e-12));
    CHECK(vc.delta_f == doctest::Approx(5e6).epsilon(1e-12));
    CHECK(vc.sys.num_hops * vc.delta_f <= vc.sys.bandwidth_hz);
    CHECK(vc.delta_T == doctest::Approx(2e-6));
    CHECK(vc.delta_F == doctest::Approx(50e6));
    CHECK(vc.phi_t_card == 16);
    CHECK(vc.phi_f_card == 4);
    CHECK(vc.sampling.samples_per_chip == 40);
    CHECK(vc.sampling.samples_per_pulse == 400);
    CHECK(vc.sampling.samples_per_pri == 6800);
    CHECK(vc.prf_hz() == doctest::Approx(1.0 / 34e-6));
}

TEST_CASE("antenna-count invariants raise distinct diagnostics") {
    SystemConfig cfg = testing::default_sys();
    cfg.num_tx = 11; // > K = 10
    CHECK_THROWS_WITH_AS(validate(cfg), doctest::Contains("TooManyTxAntennas"), Error);

    cfg = testing::default_sys();
    cfg.num_tx = 8;
    cfg.num_rx = 7;
    try {
        validate(cfg);
        FAIL("expected NotEnoughRxAntennas");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NotEnoughRxAntennas);
    }

    cfg = testing::default_sys();
    cfg.num_hops = 10;
    cfg.chips_per_pulse = 2;
    cfg.num_tx = 4; // M * Q = 8 < K
    cfg.num_rx = 4;
    try {
        validate(cfg);
        FAIL("expected TooFewTxAntennas");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::TooFewTxAntennas);
    }
}

TEST_CASE("bandwidth and alphabet invariants") {
    SystemConfig cfg = testing::default_sys();
    cfg.bandwidth_hz = 40e6; // K * delta_f = 50 MHz > 40 MHz
    try {
        validate(cfg);
        FAIL("expected BandwidthExceeded");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::BandwidthExceeded);
    }

    cfg = testing::default_sys();
    cfg.pri_s = 4 * cfg.pulse_duration_s; // Phi_T = 3, not a power of two
    try {
        validate(cfg);
        FAIL("expected NonPowerOfTwoAlphabet");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NonPowerOfTwoAlphabet);
    }

    cfg = testing::default_sys();
    cfg.time_offset_alphabet = 8; // derived value is 16
    try {
        validate(cfg);
        FAIL("expected AlphabetMismatch");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::AlphabetMismatch);
    }

    cfg = testing::default_sys();
    cfg.freq_offset_alphabet = 4; // matches BW/(K delta_f) = 4
    CHECK(validate(cfg).phi_f_card == 4);
}

TEST_CASE("sampling plan derivation") {
    SystemConfig cfg = testing::default_sys();
    SamplingPlan plan = derive_sampling(cfg, 200e-9);
    CHECK(plan.samples_per_chip == 40);
    CHECK(plan.samples_per_pulse == 400);

    // f_s * delta_t = 39.8: not an integer number of samples per chip
    try {
        derive_sampling(cfg, 199e-9);
        FAIL("expected NonIntegerChipLength");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NonIntegerChipLength);
    }

    cfg.sample_rate_hz = 100e6; // below BW
    try {
        validate(cfg);
        FAIL("expected SampleRateBelowBandwidth");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::SampleRateBelowBandwidth);
    }
}

TEST_CASE("validation is idempotent and delta_f * delta_t == 1 exactly") {
    ValidatedConfig vc = validate(testing::default_sys());
    ValidatedConfig vc2 = validate(vc.sys);
    CHECK(vc2.delta_t == vc.delta_t);
    CHECK(vc2.delta_f == vc.delta_f);
    CHECK(vc2.phi_t_card == vc.phi_t_card);
    CHECK(vc2.phi_f_card == vc.phi_f_card);
    CHECK(vc2.sampling.samples_per_pri == vc.sampling.samples_per_pri);
    CHECK(vc.delta_f * vc.delta_t == doctest::Approx(1.0).epsilon(1e-15));

    ValidatedConfig small = validate(testing::af_small_sys());
    CHECK(small.delta_f * small.delta_t == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(small.sampling.samples_per_chip == 8);
    CHECK(small.phi_t_card == 2);
    CHECK(small.phi_f_card == 1);
}

TEST_CASE("power-of-two predicate is exact") {
    CHECK(is_power_of_two(1));
    CHECK(is_power_of_two(2));
    CHECK(is_power_of_two(1ull << 40));
    CHECK_FALSE(is_power_of_two(0));
    CHECK_FALSE(is_power_of_two(3));
    CHECK_FALSE(is_power_of_two((1ull << 40) + 1));
}

TEST_CASE("json config round trip") {
    SystemConfig cfg = testing::k16_sys();
    const char* path = "test_config_roundtrip.json";
    {
        std::ofstream out(path);
        out << config_to_json(cfg);
    }
    SystemConfig loaded = config_from_json_file(path);
    CHECK(loaded.num_hops == cfg.num_hops);
    CHECK(loaded.bandwidth_hz == cfg.bandwidth_hz);
    CHECK(loaded.sample_rate_hz == cfg.sample_rate_hz);
    CHECK(loaded.pri_s == cfg.pri_s);
    std::remove(path);
}
