#include "rfpa/channel.hpp"

#include <cmath>

#include "rfpa/errors.hpp"

namespace rfpa {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

Eigen::MatrixXcd draw_matrix(PrfStream& stream, std::uint32_t rows, std::uint32_t cols) {
    Eigen::MatrixXcd h(rows, cols);
    for (std::uint32_t i = 0; i < rows; ++i)
        for (std::uint32_t j = 0; j < cols; ++j)
            h(i, j) = cplx(stream.next_gaussian(), stream.next_gaussian()) * kInvSqrt2;
    return h;
}

} // namespace

ChannelRealization draw_channel_realization(const ValidatedConfig& vc,
                                            const RngStream& rng,
                                            double noise_power_bob,
                                            double noise_power_eve) {
    const std::uint32_t L = vc.sys.num_pulses;
    ChannelRealization real;
    real.noise_power_bob = noise_power_bob;
    real.noise_power_eve = noise_power_eve;
    real.h_bob.reserve(L);
    real.h_eve.reserve(L);
    for (std::uint32_t l = 0; l < L; ++l) {
        PrfStream sb(rng.key, make_domain(StreamTag::channel_bob, rng.trial, l));
        PrfStream se(rng.key, make_domain(StreamTag::channel_eve, rng.trial, l));
        real.h_bob.push_back(draw_matrix(sb, vc.sys.num_rx, vc.sys.num_tx));
        real.h_eve.push_back(draw_matrix(se, vc.sys.num_rx, vc.sys.num_tx));
    }
    return real;
}

BasebandFrame apply(const BasebandFrame& tx, const ChannelRealization& real, Party party,
                    const ValidatedConfig& vc, const RngStream& rng, Exec exec) {
    const std::uint32_t M = vc.sys.num_tx;
    const std::uint32_t N = vc.sys.num_rx;
    const std::uint32_t L = vc.sys.num_pulses;
    const auto& h = real.h(party);
    if (tx.rows != M || h.size() != L || h[0].rows() != N || h[0].cols() != M)
        throw Error(ErrorCode::DimensionMismatch, "frame/channel shape mismatch");

    const double sigma2 = real.noise_power(party);
    const double noise_scale = std::sqrt(sigma2) * kInvSqrt2;
    const std::uint64_t spp = vc.sampling.samples_per_pri;
    const StreamTag noise_tag =
        party == Party::bob ? StreamTag::noise_bob : StreamTag::noise_eve;

    BasebandFrame rx;
    rx.rows = N;
    rx.cols = tx.cols;
    rx.sample_rate_hz = tx.sample_rate_hz;
    rx.start_time_s = tx.start_time_s;
    rx.data.assign(rx.rows * rx.cols, cplx(0.0, 0.0));

    #pragma omp parallel for schedule(static) if (exec == Exec::parallel)
    for (std::int64_t l = 0; l < static_cast<std::int64_t>(L); ++l) {
        const std::uint64_t w0 = static_cast<std::uint64_t>(l) * spp;
        const std::uint64_t w1 = std::min<std::uint64_t>(w0 + spp, tx.cols);
        const Eigen::MatrixXcd& H = h[static_cast<std::size_t>(l)];

        // H x over the active pulse window only (the rest of the PRI is zero)
        const auto [a0, a1] = tx.active_windows.empty()
                                  ? std::pair<std::uint64_t, std::uint64_t>{w0, w1}
                                  : tx.active_windows[static_cast<std::size_t>(l)];
        using StridedMap =
            Eigen::Map<const Eigen::MatrixXcd, Eigen::Unaligned, Eigen::OuterStride<>>;
        using StridedMapMut =
            Eigen::Map<Eigen::MatrixXcd, Eigen::Unaligned, Eigen::OuterStride<>>;
        if (a1 > a0) {
            StridedMap x(tx.data.data() + a0, static_cast<Eigen::Index>(a1 - a0), M,
                         Eigen::OuterStride<>(static_cast<Eigen::Index>(tx.cols)));
            StridedMapMut r(rx.data.data() + a0, static_cast<Eigen::Index>(a1 - a0), N,
                            Eigen::OuterStride<>(static_cast<Eigen::Index>(rx.cols)));
            r.noalias() = x * H.transpose();
        }

        if (sigma2 > 0.0) {
            PrfStream noise(rng.key, make_domain(noise_tag, rng.trial,
                                                 static_cast<std::uint32_t>(l)));
            for (std::uint64_t n = w0; n < w1; ++n)
                for (std::uint32_t i = 0; i < N; ++i) {
                    double re = noise.next_gaussian();
                    double im = noise.next_gaussian();
                    rx.at(i, n) += cplx(re, im) * noise_scale;
                }
        }
    }
    return rx;
}

double noise_power_from_ebn0(const ValidatedConfig& vc, Scheme scheme, double ebn0_db) {
    const BitsPerChip bits = bits_per_chip(vc, scheme);
    const double bits_per_pulse =
        static_cast<double>(vc.sys.chips_per_pulse) * bits.total();
    if (bits_per_pulse <= 0)
        throw Error(ErrorCode::ZeroRateScheme, "scheme carries no bits at this config");
    const double e_pulse = static_cast<double>(vc.sys.num_tx) * vc.sys.chips_per_pulse *
                           vc.sampling.samples_per_chip;
    return (e_pulse / bits_per_pulse) / std::pow(10.0, ebn0_db / 10.0);
}

} // namespace rfpa
