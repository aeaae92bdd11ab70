// codec.hpp - bit <-> modulation-content mapping for the four embedding schemes.
//
// Per chip, a hybrid symbol carries
//   - an index-modulation rank choosing which M of the K hops are active,
//   - a spatial-modulation rank choosing the permutation assigning the
//     selected hops to antennas,
//   - per-antenna Gray-coded ASK amplitudes and PSK phases.
// PH, AMP and SIM are restrictions of the hybrid symbol with the unused
// components pinned to defaults. Subset ranking is colexicographic
// combinadics; permutation ranking is the Lehmer code. Only the first 2^b
// ranks of each codebook are used (floored-log2 truncation), which makes the
// bit mapping exactly bijective.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "rfpa/config.hpp"

namespace rfpa {

enum class Scheme { PH, AMP, SIM, HYB };

const char* scheme_name(Scheme s);
Scheme scheme_from_name(const std::string& name);

struct BitsPerChip {
    unsigned b_sel = 0;
    unsigned b_perm = 0;
    unsigned b_ask = 0;  // summed over antennas
    unsigned b_psk = 0;  // summed over antennas
    unsigned total() const { return b_sel + b_perm + b_ask + b_psk; }
};

// Exact 64-bit combinatorics; throw OverflowGuard rather than approximate.
std::uint64_t binomial_exact(std::uint32_t n, std::uint32_t k);
std::uint64_t factorial_exact(std::uint32_t n);
unsigned floor_log2(std::uint64_t v);

BitsPerChip bits_per_chip(const ValidatedConfig& vc, Scheme scheme);

/// Bits per second: PRF * Q * (active bits per chip).
double achievable_rate(const ValidatedConfig& vc, Scheme scheme);

// --- subset / permutation codebooks -------------------------------------

/// Colexicographic rank of a strictly increasing M-subset of {0..K-1}.
std::uint64_t combinadic_rank(const std::vector<std::uint32_t>& subset);
/// Inverse of combinadic_rank; strictly monotone in rank.
std::vector<std::uint32_t> combinadic_unrank(std::uint64_t rank, std::uint32_t K,
                                             std::uint32_t M);

/// Lehmer-code rank of a permutation of {0..M-1}.
std::uint64_t lehmer_rank(const std::vector<std::uint32_t>& perm);
std::vector<std::uint32_t> lehmer_unrank(std::uint64_t rank, std::uint32_t M);

// --- constellations ------------------------------------------------------

std::uint32_t gray_encode(std::uint32_t v);
std::uint32_t gray_decode(std::uint32_t g);

/// ASK levels {1..J}/rms so the average symbol power is one.
std::vector<double> ask_levels(std::uint32_t J);
/// PSK phase for constellation index j: 2*pi*j/J.
double psk_phase(std::uint32_t index, std::uint32_t J);

std::uint32_t slice_ask(double amplitude, std::uint32_t J);
std::uint32_t slice_psk(double phase, std::uint32_t J);

// --- pulse plans ----------------------------------------------------------

struct ChipSymbols {
    std::vector<double> amplitudes;        // per antenna
    std::vector<double> phases;            // per antenna, [0, 2*pi)
    std::uint64_t selection_rank = 0;
    std::uint64_t permutation_rank = 0;
    std::vector<std::uint32_t> hop_codes;  // per antenna, pairwise distinct
    bool flagged = false;                  // receiver marked this chip bad
};

struct PulsePlan {
    Scheme scheme = Scheme::HYB;
    std::vector<ChipSymbols> chips;
};

/// MSB-first bit access over a packed 0/1 byte vector.
class BitReader {
public:
    explicit BitReader(const std::vector<std::uint8_t>& bits) : bits_(bits) {}
    std::uint64_t take(unsigned width);  // throws InsufficientBits
    std::size_t position() const { return pos_; }
    std::size_t remaining() const { return bits_.size() - pos_; }

private:
    const std::vector<std::uint8_t>& bits_;
    std::size_t pos_ = 0;
};

class BitWriter {
public:
    void put(std::uint64_t value, unsigned width);  // MSB-first
    const std::vector<std::uint8_t>& bits() const { return bits_; }

private:
    std::vector<std::uint8_t> bits_;
};

/// Hop codes used by PH/AMP, where selection and permutation are predefined
/// and shared: antenna m transmits hop m.
std::vector<std::uint32_t> predefined_hop_codes(std::uint32_t M);

/// Consumes exactly Q * bits_per_chip(scheme).total() bits.
PulsePlan encode_pulse(BitReader& bits, const ValidatedConfig& vc, Scheme scheme);

struct DecodeStats {
    std::uint64_t flagged_chips = 0;
};

/// Inverse of encode_pulse. Estimated amplitudes/phases are sliced to the
/// nearest constellation point; invalid hop sets (duplicates, out-of-range
/// values, out-of-codebook ranks) zero-fill the chip's bits and count as
/// flagged rather than aborting.
void decode_pulse(const PulsePlan& estimate, const ValidatedConfig& vc, Scheme scheme,
                  BitWriter& out, DecodeStats* stats = nullptr);

/// Factor detected hop codes into (selection_rank, permutation_rank).
/// Returns false when the codes do not form a valid in-codebook chip.
bool factor_hop_codes(const std::vector<std::uint32_t>& codes, const ValidatedConfig& vc,
                      std::uint64_t& selection_rank, std::uint64_t& permutation_rank);

/// Codebook dump (Gray maps, constellations, subset/permutation tables) for
/// cross-implementation checks. limit == 0 dumps full tables.
void dump_tables(std::ostream& os, const ValidatedConfig& vc, std::size_t limit = 64);

} // namespace rfpa
