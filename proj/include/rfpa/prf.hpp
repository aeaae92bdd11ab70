// prf.hpp - keyed counter-mode pseudorandom expansion.
//
// All randomness in the simulator flows through a ChaCha20 block function
// keyed either by a shared secret (agility schedules) or by values derived
// from an experiment seed (channels, noise, payloads). Streams are addressed
// by a 64-bit domain word, so every draw is a pure function of
// (key, domain, position) and independent of evaluation order.

#pragma once

#include <array>
#include <cstdint>
#include <string>

namespace rfpa {

/// 256-bit key shared between Alice and Bob (or derived for simulation use).
struct SecretKey {
    std::array<std::uint8_t, 32> bytes{};

    static SecretKey from_hex(const std::string& hex);
    static SecretKey from_seed(std::uint64_t seed);

    /// Derives an independent child key for the given domain word.
    SecretKey subkey(std::uint64_t domain) const;

    std::string to_hex() const;
    /// Short non-reversible identifier for logs and metadata.
    std::string fingerprint() const;
};

/// Stream/domain tags. The domain word is tag<<56 | a<<28 | b with
/// a, b < 2^28; collisions across (tag, a, b) triples are impossible.
enum class StreamTag : std::uint8_t {
    schedule_time  = 1,  // (stream_id, pulse)
    schedule_freq  = 2,  // (stream_id, pulse)
    adversary      = 3,
    subkey         = 4,
    payload        = 5,  // (point, trial)
    channel_bob    = 6,  // (trial, pulse) -- point folded into subkey
    channel_eve    = 7,
    noise_bob      = 8,
    noise_eve      = 9,
    af_draw        = 10, // (draw, 0)
    generic        = 15,
};

std::uint64_t make_domain(StreamTag tag, std::uint32_t a = 0, std::uint32_t b = 0);

/**
 * Deterministic random stream over a ChaCha20 keystream.
 *
 * next_bits(w) masks down to w bits, which is exactly uniform for the
 * power-of-two alphabets used throughout. Gaussian variates come from
 * Box-Muller over 53-bit uniforms.
 */
class PrfStream {
public:
    PrfStream(const SecretKey& key, std::uint64_t domain);

    std::uint32_t next_u32();
    std::uint64_t next_u64();

    /// Uniform integer in [0, 2^width); width in [0, 64].
    std::uint64_t next_bits(unsigned width);

    /// Uniform double in [0, 1) with 53 random bits.
    double next_double();

    /// Standard normal variate.
    double next_gaussian();

private:
    void refill();

    std::array<std::uint32_t, 8> key_words_{};
    std::uint64_t nonce_ = 0;
    std::uint64_t counter_ = 0;
    std::array<std::uint32_t, 16> block_{};
    unsigned pos_ = 16;
    bool have_spare_gaussian_ = false;
    double spare_gaussian_ = 0.0;
};

/// One 64-byte keystream block; exposed for the single-block value draws
/// used by the agility schedule (one block per drawn integer).
std::array<std::uint32_t, 16> chacha20_block(const std::array<std::uint32_t, 8>& key,
                                             std::uint64_t counter,
                                             std::uint64_t nonce);

std::array<std::uint32_t, 8> key_words(const SecretKey& key);

} // namespace rfpa
