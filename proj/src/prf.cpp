#include "rfpa/prf.hpp"

#include <bit>
#include <cmath>
#include <cstring>

#include "rfpa/errors.hpp"

namespace rfpa {

namespace {

inline std::uint32_t rotl(std::uint32_t x, int n) {
    return (x << n) | (x >> (32 - n));
}

inline void quarter_round(std::uint32_t& a, std::uint32_t& b,
                          std::uint32_t& c, std::uint32_t& d) {
    a += b; d ^= a; d = rotl(d, 16);
    c += d; b ^= c; b = rotl(b, 12);
    a += b; d ^= a; d = rotl(d, 8);
    c += d; b ^= c; b = rotl(b, 7);
}

constexpr std::array<std::uint32_t, 4> kSigma = {
    0x61707865u, 0x3320646eu, 0x79622d32u, 0x6b206574u};

inline std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline int hex_nibble(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

} // namespace

std::array<std::uint32_t, 16> chacha20_block(const std::array<std::uint32_t, 8>& key,
                                             std::uint64_t counter,
                                             std::uint64_t nonce) {
    std::array<std::uint32_t, 16> state;
    state[0] = kSigma[0]; state[1] = kSigma[1];
    state[2] = kSigma[2]; state[3] = kSigma[3];
    for (int i = 0; i < 8; ++i) state[4 + i] = key[i];
    state[12] = static_cast<std::uint32_t>(counter);
    state[13] = static_cast<std::uint32_t>(counter >> 32);
    state[14] = static_cast<std::uint32_t>(nonce);
    state[15] = static_cast<std::uint32_t>(nonce >> 32);

    std::array<std::uint32_t, 16> x = state;
    for (int round = 0; round < 10; ++round) {
        quarter_round(x[0], x[4], x[8], x[12]);
        quarter_round(x[1], x[5], x[9], x[13]);
        quarter_round(x[2], x[6], x[10], x[14]);
        quarter_round(x[3], x[7], x[11], x[15]);
        quarter_round(x[0], x[5], x[10], x[15]);
        quarter_round(x[1], x[6], x[11], x[12]);
        quarter_round(x[2], x[7], x[8], x[13]);
        quarter_round(x[3], x[4], x[9], x[14]);
    }
    for (int i = 0; i < 16; ++i) x[i] += state[i];
    return x;
}

std::array<std::uint32_t, 8> key_words(const SecretKey& key) {
    std::array<std::uint32_t, 8> words;
    for (int i = 0; i < 8; ++i) {
        words[i] = static_cast<std::uint32_t>(key.bytes[4 * i]) |
                   (static_cast<std::uint32_t>(key.bytes[4 * i + 1]) << 8) |
                   (static_cast<std::uint32_t>(key.bytes[4 * i + 2]) << 16) |
                   (static_cast<std::uint32_t>(key.bytes[4 * i + 3]) << 24);
    }
    return words;
}

SecretKey SecretKey::from_hex(const std::string& hex) {
    if (hex.size() != 64)
        throw Error(ErrorCode::InvalidExperiment,
                    "secret key must be 64 hex characters (256 bits)");
    SecretKey key;
    for (int i = 0; i < 32; ++i) {
        int hi = hex_nibble(hex[2 * i]);
        int lo = hex_nibble(hex[2 * i + 1]);
        if (hi < 0 || lo < 0)
            throw Error(ErrorCode::InvalidExperiment, "invalid hex in secret key");
        key.bytes[i] = static_cast<std::uint8_t>((hi << 4) | lo);
    }
    return key;
}

SecretKey SecretKey::from_seed(std::uint64_t seed) {
    SecretKey key;
    std::uint64_t state = seed;
    for (int i = 0; i < 4; ++i) {
        std::uint64_t w = splitmix64(state);
        std::memcpy(key.bytes.data() + 8 * i, &w, 8);
    }
    return key;
}

SecretKey SecretKey::subkey(std::uint64_t domain) const {
    auto block = chacha20_block(key_words(*this), 0,
                                make_domain(StreamTag::subkey) ^ domain);
    SecretKey child;
    std::memcpy(child.bytes.data(), block.data(), 32);
    return child;
}

std::string SecretKey::to_hex() const {
    static const char* digits = "0123456789abcdef";
    std::string out(64, '0');
    for (int i = 0; i < 32; ++i) {
        out[2 * i] = digits[bytes[i] >> 4];
        out[2 * i + 1] = digits[bytes[i] & 0xf];
    }
    return out;
}

std::string SecretKey::fingerprint() const {
    auto block = chacha20_block(key_words(*this), ~0ull, ~0ull);
    static const char* digits = "0123456789abcdef";
    std::string out;
    for (int i = 0; i < 4; ++i) {
        out.push_back(digits[(block[i] >> 4) & 0xf]);
        out.push_back(digits[block[i] & 0xf]);
    }
    return out;
}

std::uint64_t make_domain(StreamTag tag, std::uint32_t a, std::uint32_t b) {
    return (static_cast<std::uint64_t>(tag) << 56) |
           (static_cast<std::uint64_t>(a & 0x0fffffffu) << 28) |
           static_cast<std::uint64_t>(b & 0x0fffffffu);
}

PrfStream::PrfStream(const SecretKey& key, std::uint64_t domain)
    : key_words_(key_words(key)), nonce_(domain) {}

void PrfStream::refill() {
    block_ = chacha20_block(key_words_, counter_++, nonce_);
    pos_ = 0;
}

std::uint32_t PrfStream::next_u32() {
    if (pos_ >= 16) refill();
    return block_[pos_++];
}

std::uint64_t PrfStream::next_u64() {
    std::uint64_t lo = next_u32();
    std::uint64_t hi = next_u32();
    return lo | (hi << 32);
}

std::uint64_t PrfStream::next_bits(unsigned width) {
    if (width == 0) return 0;
    std::uint64_t v = next_u64();
    if (width >= 64) return v;
    return v & ((1ull << width) - 1);
}

double PrfStream::next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double PrfStream::next_gaussian() {
    if (have_spare_gaussian_) {
        have_spare_gaussian_ = false;
        return spare_gaussian_;
    }
    // Box-Muller; u1 shifted away from zero so log() stays finite.
    double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    double u2 = next_double();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    spare_gaussian_ = r * std::sin(a);
    have_spare_gaussian_ = true;
    return r * std::cos(a);
}

} // namespace rfpa
