#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>

#include "rfpa/channel.hpp"
#include "rfpa/errors.hpp"
#include "support/configs.hpp"

using namespace rfpa;

namespace {

BasebandFrame zero_frame(const ValidatedConfig& vc) {
    BasebandFrame f;
    f.rows = vc.sys.num_tx;
    f.cols = vc.frame_samples();
    f.sample_rate_hz = vc.sys.sample_rate_hz;
    f.data.assign(f.rows * f.cols, cplx(0, 0));
    return f;
}

ChannelRealization identity_channels(const ValidatedConfig& vc, double sigma2) {
    ChannelRealization real;
    real.noise_power_bob = sigma2;
    real.noise_power_eve = sigma2;
    for (std::uint32_t l = 0; l < vc.sys.num_pulses; ++l) {
        real.h_bob.push_back(
            Eigen::MatrixXcd::Identity(vc.sys.num_rx, vc.sys.num_tx));
        real.h_eve.push_back(
            Eigen::MatrixXcd::Identity(vc.sys.num_rx, vc.sys.num_tx));
    }
    return real;
}

} // namespace

TEST_CASE("identity channel with zero noise is a passthrough") {
    ValidatedConfig vc = validate(testing::af_small_sys());
    BasebandFrame tx = zero_frame(vc);
    // fill the pulse windows with a deterministic pattern
    for (std::uint32_t l = 0; l < vc.sys.num_pulses; ++l) {
        std::uint64_t w0 = static_cast<std::uint64_t>(l) * vc.sampling.samples_per_pri;
        for (std::uint32_t j = 0; j < vc.sampling.samples_per_pulse; ++j)
            for (std::size_t m = 0; m < tx.rows; ++m)
                tx.at(m, w0 + j) = cplx(0.1 * m + 0.01 * j, -0.2);
    }
    RngStream rng{SecretKey::from_seed(5), 0};
    BasebandFrame rx = apply(tx, identity_channels(vc, 0.0), Party::bob, vc, rng);
    REQUIRE(rx.rows == vc.sys.num_rx);
    for (std::size_t i = 0; i < rx.data.size(); ++i)
        CHECK(std::abs(rx.data[i] - tx.data[i]) < 1e-15);
}

TEST_CASE("channel application is linear") {
    ValidatedConfig vc = validate(testing::af_small_sys());
    BasebandFrame tx = zero_frame(vc);
    for (std::size_t i = 0; i < tx.data.size(); ++i)
        tx.data[i] = cplx(std::sin(0.1 * i), std::cos(0.2 * i));

    RngStream rng{SecretKey::from_seed(6), 0};
    ChannelRealization real = draw_channel_realization(vc, rng, 0.0, 0.0);
    BasebandFrame r1 = apply(tx, real, Party::bob, vc, rng);

    for (auto& v : tx.data) v *= 2.0;
    BasebandFrame r2 = apply(tx, real, Party::bob, vc, rng);
    for (std::size_t i = 0; i < r1.data.size(); ++i)
        CHECK(std::abs(r2.data[i] - 2.0 * r1.data[i]) < 1e-12);
}

TEST_CASE("noise statistics: variance, whiteness") {
    SystemConfig sys = testing::af_small_sys();
    sys.num_pulses = 1100; // 1100 * 48 samples * 2 antennas > 1e5 noise draws
    ValidatedConfig vc = validate(sys);
    BasebandFrame tx = zero_frame(vc);
    RngStream rng{SecretKey::from_seed(7), 3};
    ChannelRealization real = identity_channels(vc, 1.0);
    BasebandFrame rx = apply(tx, real, Party::bob, vc, rng);

    const std::size_t n = rx.data.size();
    REQUIRE(n >= 100000);
    double power = 0.0;
    for (const auto& v : rx.data) power += std::norm(v);
    power /= double(n);
    CHECK(std::abs(power - 1.0) < 3.0 / std::sqrt(double(n)) * 1.5);

    // lag-1 sample autocorrelation along each antenna row
    for (std::size_t m = 0; m < rx.rows; ++m) {
        cplx acc(0, 0);
        for (std::size_t i = 0; i + 1 < rx.cols; ++i)
            acc += rx.at(m, i) * std::conj(rx.at(m, i + 1));
        double rho = std::abs(acc) / double(rx.cols - 1);
        CHECK(rho < 3.0 / std::sqrt(double(rx.cols)));
    }
}

TEST_CASE("fading magnitudes pass a Rayleigh KS test at 1% significance") {
    SystemConfig sys = testing::default_sys(2000); // 2000 pulses * 64 entries
    ValidatedConfig vc = validate(sys);
    RngStream rng{SecretKey::from_seed(8), 0};
    ChannelRealization real = draw_channel_realization(vc, rng, 0, 0);

    std::vector<double> mags;
    mags.reserve(vc.sys.num_pulses * 64);
    for (const auto& h : real.h_bob)
        for (Eigen::Index i = 0; i < h.rows(); ++i)
            for (Eigen::Index j = 0; j < h.cols(); ++j)
                mags.push_back(std::abs(h(i, j)));
    std::sort(mags.begin(), mags.end());

    const std::size_t n = mags.size();
    REQUIRE(n >= 100000);
    double ks = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double cdf = 1.0 - std::exp(-mags[i] * mags[i]); // Rayleigh(sqrt(1/2))
        ks = std::max(ks, std::abs(cdf - double(i + 1) / n));
        ks = std::max(ks, std::abs(cdf - double(i) / n));
    }
    CHECK(ks < 1.63 / std::sqrt(double(n))); // 1% critical value
}

TEST_CASE("channel is quasi-static within a pulse") {
    ValidatedConfig vc = validate(testing::af_small_sys());
    RngStream rng{SecretKey::from_seed(9), 1};
    ChannelRealization real = draw_channel_realization(vc, rng, 0, 0);

    // probe: one unit impulse per antenna at two sample offsets in pulse 1
    for (std::uint32_t m = 0; m < vc.sys.num_tx; ++m) {
        BasebandFrame tx = zero_frame(vc);
        std::uint64_t w0 = vc.sampling.samples_per_pri;
        tx.at(m, w0 + 1) = cplx(1, 0);
        tx.at(m, w0 + 7) = cplx(1, 0);
        BasebandFrame rx = apply(tx, real, Party::eve, vc, rng);
        for (std::uint32_t i = 0; i < vc.sys.num_rx; ++i) {
            CHECK(std::abs(rx.at(i, w0 + 1) - real.h_eve[1](i, m)) < 1e-14);
            CHECK(std::abs(rx.at(i, w0 + 7) - real.h_eve[1](i, m)) < 1e-14);
        }
    }
}

TEST_CASE("ebn0 mapping reproduces the documented sigma^2") {
    ValidatedConfig vc = validate(testing::default_sys());
    // HYB at 0 dB: sigma^2 = M*Q*n_c / (Q * 44) = 3200/440
    CHECK(noise_power_from_ebn0(vc, Scheme::HYB, 0.0) ==
          doctest::Approx(3200.0 / 440.0).epsilon(1e-12));
    // doubling bits per pulse halves E_b hence halves sigma^2
    double ph = noise_power_from_ebn0(vc, Scheme::PH, 10.0);   // 160 bits/pulse
    double hyb = noise_power_from_ebn0(vc, Scheme::HYB, 10.0); // 440 bits/pulse
    CHECK(ph / hyb == doctest::Approx(440.0 / 160.0).epsilon(1e-12));
    // ebn0 -> infinity drives sigma^2 to zero
    CHECK(noise_power_from_ebn0(vc, Scheme::HYB, 300.0) < 1e-25);

    SystemConfig flat = testing::default_sys();
    flat.psk_order = 1;
    ValidatedConfig vf = validate(flat);
    CHECK_THROWS_AS(noise_power_from_ebn0(vf, Scheme::PH, 0.0), Error);
}

TEST_CASE("dimension mismatches are rejected") {
    ValidatedConfig vc = validate(testing::af_small_sys());
    BasebandFrame tx = zero_frame(vc);
    tx.rows = 3; // no longer matches M = 2
    tx.data.assign(tx.rows * tx.cols, cplx(0, 0));
    RngStream rng{SecretKey::from_seed(10), 0};
    ChannelRealization real = identity_channels(vc, 0.0);
    CHECK_THROWS_AS(apply(tx, real, Party::bob, vc, rng), Error);
}

TEST_CASE("serial and parallel channel application are bit-identical") {
    ValidatedConfig vc = validate(testing::af_small_sys());
    BasebandFrame tx = zero_frame(vc);
    for (std::size_t i = 0; i < tx.data.size(); ++i) tx.data[i] = cplx(0.3, 0.1 * (i % 7));
    RngStream rng{SecretKey::from_seed(11), 2};
    ChannelRealization real = draw_channel_realization(vc, rng, 0.5, 0.5);
    BasebandFrame a = apply(tx, real, Party::bob, vc, rng, Exec::serial);
    BasebandFrame b = apply(tx, real, Party::bob, vc, rng, Exec::parallel);
    CHECK(a.data == b.data);
}
