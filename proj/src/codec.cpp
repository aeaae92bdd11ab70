#include "rfpa/codec.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <ostream>

#include "rfpa/errors.hpp"

namespace rfpa {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

} // namespace

const char* scheme_name(Scheme s) {
    switch (s) {
        case Scheme::PH:  return "PH";
        case Scheme::AMP: return "AMP";
        case Scheme::SIM: return "SIM";
        case Scheme::HYB: return "HYB";
    }
    return "?";
}

Scheme scheme_from_name(const std::string& name) {
    if (name == "PH" || name == "ph") return Scheme::PH;
    if (name == "AMP" || name == "amp") return Scheme::AMP;
    if (name == "SIM" || name == "sim") return Scheme::SIM;
    if (name == "HYB" || name == "hyb") return Scheme::HYB;
    throw Error(ErrorCode::InvalidExperiment, "unknown scheme " + name);
}

std::uint64_t binomial_exact(std::uint32_t n, std::uint32_t k) {
    if (k > n) return 0;
    if (k > n - k) k = n - k;
    unsigned __int128 c = 1;
    for (std::uint32_t i = 1; i <= k; ++i) {
        c = c * (n - k + i) / i; // divides exactly at every step
        if (c > static_cast<unsigned __int128>(UINT64_MAX))
            throw Error(ErrorCode::OverflowGuard, "binomial exceeds 64-bit range");
    }
    return static_cast<std::uint64_t>(c);
}

std::uint64_t factorial_exact(std::uint32_t n) {
    unsigned __int128 f = 1;
    for (std::uint32_t i = 2; i <= n; ++i) {
        f *= i;
        if (f > static_cast<unsigned __int128>(UINT64_MAX))
            throw Error(ErrorCode::OverflowGuard, "factorial exceeds 64-bit range");
    }
    return static_cast<std::uint64_t>(f);
}

unsigned floor_log2(std::uint64_t v) {
    return v == 0 ? 0 : static_cast<unsigned>(std::bit_width(v) - 1);
}

BitsPerChip bits_per_chip(const ValidatedConfig& vc, Scheme scheme) {
    const std::uint32_t K = vc.sys.num_hops;
    const std::uint32_t M = vc.sys.num_tx;
    BitsPerChip bits;
    bits.b_sel = floor_log2(binomial_exact(K, M));
    bits.b_perm = floor_log2(factorial_exact(M));
    bits.b_ask = M * floor_log2(vc.sys.ask_order);
    bits.b_psk = M * floor_log2(vc.sys.psk_order);
    switch (scheme) {
        case Scheme::PH:  bits.b_sel = bits.b_perm = bits.b_ask = 0; break;
        case Scheme::AMP: bits.b_sel = bits.b_perm = bits.b_psk = 0; break;
        case Scheme::SIM: bits.b_ask = bits.b_psk = 0; break;
        case Scheme::HYB: break;
    }
    return bits;
}

double achievable_rate(const ValidatedConfig& vc, Scheme scheme) {
    BitsPerChip bits = bits_per_chip(vc, scheme);
    return vc.prf_hz() * vc.sys.chips_per_pulse * bits.total();
}

std::uint64_t combinadic_rank(const std::vector<std::uint32_t>& subset) {
    std::uint64_t rank = 0;
    for (std::size_t i = 0; i < subset.size(); ++i)
        rank += binomial_exact(subset[i], static_cast<std::uint32_t>(i) + 1);
    return rank;
}

std::vector<std::uint32_t> combinadic_unrank(std::uint64_t rank, std::uint32_t K,
                                             std::uint32_t M) {
    std::vector<std::uint32_t> subset(M);
    std::uint32_t bound = K;
    for (std::uint32_t i = M; i-- > 0;) {
        std::uint32_t v = bound;
        while (v > i && binomial_exact(v, i + 1) > rank) --v;
        // v is now the largest value with C(v, i+1) <= rank
        subset[i] = v;
        rank -= binomial_exact(v, i + 1);
        bound = v;
    }
    return subset;
}

std::uint64_t lehmer_rank(const std::vector<std::uint32_t>& perm) {
    const std::size_t M = perm.size();
    std::uint64_t rank = 0;
    for (std::size_t i = 0; i < M; ++i) {
        std::uint32_t smaller_after = 0;
        for (std::size_t j = i + 1; j < M; ++j)
            if (perm[j] < perm[i]) ++smaller_after;
        rank += smaller_after * factorial_exact(static_cast<std::uint32_t>(M - 1 - i));
    }
    return rank;
}

std::vector<std::uint32_t> lehmer_unrank(std::uint64_t rank, std::uint32_t M) {
    std::vector<std::uint32_t> pool(M);
    for (std::uint32_t i = 0; i < M; ++i) pool[i] = i;
    std::vector<std::uint32_t> perm(M);
    for (std::uint32_t i = 0; i < M; ++i) {
        std::uint64_t f = factorial_exact(M - 1 - i);
        std::uint64_t digit = rank / f;
        rank %= f;
        perm[i] = pool[digit];
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(digit));
    }
    return perm;
}

std::uint32_t gray_encode(std::uint32_t v) { return v ^ (v >> 1); }

std::uint32_t gray_decode(std::uint32_t g) {
    std::uint32_t v = g;
    while (g >>= 1) v ^= g;
    return v;
}

std::vector<double> ask_levels(std::uint32_t J) {
    double sum_sq = 0.0;
    for (std::uint32_t j = 1; j <= J; ++j) sum_sq += double(j) * j;
    double rms = std::sqrt(sum_sq / J);
    std::vector<double> levels(J);
    for (std::uint32_t j = 0; j < J; ++j) levels[j] = (j + 1) / rms;
    return levels;
}

double psk_phase(std::uint32_t index, std::uint32_t J) {
    return kTwoPi * index / J;
}

std::uint32_t slice_ask(double amplitude, std::uint32_t J) {
    if (J <= 1) return 0;
    double sum_sq = 0.0;
    for (std::uint32_t j = 1; j <= J; ++j) sum_sq += double(j) * j;
    double rms = std::sqrt(sum_sq / J);
    long idx = std::lround(amplitude * rms) - 1;
    return static_cast<std::uint32_t>(std::clamp<long>(idx, 0, J - 1));
}

std::uint32_t slice_psk(double phase, std::uint32_t J) {
    if (J <= 1) return 0;
    double step = kTwoPi / J;
    long idx = std::lround(phase / step);
    idx %= static_cast<long>(J);
    if (idx < 0) idx += J;
    return static_cast<std::uint32_t>(idx);
}

std::uint64_t BitReader::take(unsigned width) {
    if (pos_ + width > bits_.size())
        throw Error(ErrorCode::InsufficientBits, "bitstream exhausted");
    std::uint64_t v = 0;
    for (unsigned i = 0; i < width; ++i) v = (v << 1) | bits_[pos_++];
    return v;
}

void BitWriter::put(std::uint64_t value, unsigned width) {
    for (unsigned i = width; i-- > 0;)
        bits_.push_back(static_cast<std::uint8_t>((value >> i) & 1));
}

std::vector<std::uint32_t> predefined_hop_codes(std::uint32_t M) {
    std::vector<std::uint32_t> codes(M);
    for (std::uint32_t m = 0; m < M; ++m) codes[m] = m;
    return codes;
}

PulsePlan encode_pulse(BitReader& bits, const ValidatedConfig& vc, Scheme scheme) {
    const std::uint32_t K = vc.sys.num_hops;
    const std::uint32_t M = vc.sys.num_tx;
    const BitsPerChip b = bits_per_chip(vc, scheme);
    const bool has_im = scheme == Scheme::SIM || scheme == Scheme::HYB;
    const unsigned ask_w = b.b_ask / std::max(1u, M);
    const unsigned psk_w = b.b_psk / std::max(1u, M);
    const std::vector<double> levels = ask_levels(vc.sys.ask_order);

    PulsePlan plan;
    plan.scheme = scheme;
    plan.chips.resize(vc.sys.chips_per_pulse);
    for (auto& chip : plan.chips) {
        chip.amplitudes.assign(M, 1.0);
        chip.phases.assign(M, 0.0);

        if (has_im) {
            chip.selection_rank = bits.take(b.b_sel);
            chip.permutation_rank = bits.take(b.b_perm);
            auto subset = combinadic_unrank(chip.selection_rank, K, M);
            auto perm = lehmer_unrank(chip.permutation_rank, M);
            chip.hop_codes.resize(M);
            for (std::uint32_t m = 0; m < M; ++m) chip.hop_codes[m] = subset[perm[m]];
        } else {
            chip.hop_codes = predefined_hop_codes(M);
        }

        if (b.b_ask > 0)
            for (std::uint32_t m = 0; m < M; ++m)
                chip.amplitudes[m] =
                    levels[gray_decode(static_cast<std::uint32_t>(bits.take(ask_w)))];
        if (b.b_psk > 0)
            for (std::uint32_t m = 0; m < M; ++m)
                chip.phases[m] = psk_phase(
                    gray_decode(static_cast<std::uint32_t>(bits.take(psk_w))),
                    vc.sys.psk_order);
    }
    return plan;
}

bool factor_hop_codes(const std::vector<std::uint32_t>& codes, const ValidatedConfig& vc,
                      std::uint64_t& selection_rank, std::uint64_t& permutation_rank) {
    const std::uint32_t K = vc.sys.num_hops;
    const std::uint32_t M = vc.sys.num_tx;
    if (codes.size() != M) return false;
    for (auto c : codes)
        if (c >= K) return false;

    std::vector<std::uint32_t> subset(codes);
    std::sort(subset.begin(), subset.end());
    if (std::adjacent_find(subset.begin(), subset.end()) != subset.end())
        return false; // duplicate hop

    // permutation = position of each antenna's code within the sorted subset
    std::vector<std::uint32_t> perm(M);
    for (std::uint32_t m = 0; m < M; ++m) {
        auto it = std::lower_bound(subset.begin(), subset.end(), codes[m]);
        perm[m] = static_cast<std::uint32_t>(it - subset.begin());
    }

    selection_rank = combinadic_rank(subset);
    permutation_rank = lehmer_rank(perm);

    const BitsPerChip b = bits_per_chip(vc, Scheme::HYB);
    if (b.b_sel < 64 && selection_rank >= (1ull << b.b_sel)) return false;
    if (b.b_perm < 64 && permutation_rank >= (1ull << b.b_perm)) return false;
    return true;
}

void decode_pulse(const PulsePlan& estimate, const ValidatedConfig& vc, Scheme scheme,
                  BitWriter& out, DecodeStats* stats) {
    const std::uint32_t M = vc.sys.num_tx;
    const BitsPerChip b = bits_per_chip(vc, scheme);
    const bool has_im = scheme == Scheme::SIM || scheme == Scheme::HYB;
    const unsigned ask_w = b.b_ask / std::max(1u, M);
    const unsigned psk_w = b.b_psk / std::max(1u, M);

    for (const auto& chip : estimate.chips) {
        bool bad = chip.flagged;
        std::uint64_t sel = 0, perm = 0;
        if (has_im && !bad)
            bad = !factor_hop_codes(chip.hop_codes, vc, sel, perm);

        if (bad) {
            out.put(0, b.total());
            if (stats) ++stats->flagged_chips;
            continue;
        }
        if (has_im) {
            out.put(sel, b.b_sel);
            out.put(perm, b.b_perm);
        }
        if (b.b_ask > 0)
            for (std::uint32_t m = 0; m < M; ++m)
                out.put(gray_encode(slice_ask(chip.amplitudes[m], vc.sys.ask_order)), ask_w);
        if (b.b_psk > 0)
            for (std::uint32_t m = 0; m < M; ++m)
                out.put(gray_encode(slice_psk(chip.phases[m], vc.sys.psk_order)), psk_w);
    }
}

void dump_tables(std::ostream& os, const ValidatedConfig& vc, std::size_t limit) {
    const std::uint32_t K = vc.sys.num_hops;
    const std::uint32_t M = vc.sys.num_tx;
    const BitsPerChip b = bits_per_chip(vc, Scheme::HYB);

    os << "# codec tables: K=" << K << " M=" << M << " J_ASK=" << vc.sys.ask_order
       << " J_PSK=" << vc.sys.psk_order << "\n";
    os << "# bits per chip (HYB): sel=" << b.b_sel << " perm=" << b.b_perm
       << " ask=" << b.b_ask << " psk=" << b.b_psk << "\n";
    os << "# chip bit layout: selection, permutation, ASK per antenna, PSK per antenna"
       << " (all MSB-first, antenna-major)\n";

    os << "\n[ask] bits -> level (Gray labelled, unit average power)\n";
    auto levels = ask_levels(vc.sys.ask_order);
    unsigned ask_w = floor_log2(vc.sys.ask_order);
    for (std::uint32_t j = 0; j < vc.sys.ask_order; ++j) {
        std::uint32_t g = gray_encode(j);
        os << "bits=";
        for (unsigned i = ask_w; i-- > 0;) os << ((g >> i) & 1);
        os << " level=" << levels[j] << "\n";
    }

    os << "\n[psk] bits -> phase (Gray labelled)\n";
    unsigned psk_w = floor_log2(vc.sys.psk_order);
    for (std::uint32_t j = 0; j < vc.sys.psk_order; ++j) {
        std::uint32_t g = gray_encode(j);
        os << "bits=";
        for (unsigned i = psk_w; i-- > 0;) os << ((g >> i) & 1);
        os << " phase=" << psk_phase(j, vc.sys.psk_order) << "\n";
    }

    std::uint64_t n_sel = b.b_sel >= 64 ? UINT64_MAX : (1ull << b.b_sel);
    os << "\n[selection] rank -> subset (colexicographic), " << n_sel << " codewords\n";
    for (std::uint64_t r = 0; r < n_sel && (limit == 0 || r < limit); ++r) {
        auto subset = combinadic_unrank(r, K, M);
        os << r << " ->";
        for (auto v : subset) os << ' ' << v;
        os << "\n";
    }

    std::uint64_t n_perm = b.b_perm >= 64 ? UINT64_MAX : (1ull << b.b_perm);
    os << "\n[permutation] rank -> permutation (Lehmer), " << n_perm << " codewords\n";
    for (std::uint64_t r = 0; r < n_perm && (limit == 0 || r < limit); ++r) {
        auto perm = lehmer_unrank(r, M);
        os << r << " ->";
        for (auto v : perm) os << ' ' << v;
        os << "\n";
    }
}

} // namespace rfpa
