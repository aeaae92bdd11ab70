// waveform.hpp - sampled multi-antenna baseband synthesis.
//
// With f_s an integer multiple of delta_f (validated), every hop frequency
// lands on an exact DFT bin of a chip-length window and every legal pulse
// offset lands on an exact sample index. Synthesis therefore works in exact
// integer phase arithmetic over the n_c-th roots of unity: chip content of
// hop bin b is tw[(b*j) mod n_c] and inter-chip phase continuity is exact,
// since b*n_c mod n_c = 0.

#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "rfpa/codec.hpp"
#include "rfpa/config.hpp"
#include "rfpa/exec.hpp"
#include "rfpa/keyschedule.hpp"

namespace rfpa {

using cplx = std::complex<double>;

/// Dense complex frame, rows = antennas, row-major. Inter-pulse silence is
/// stored explicitly (that silence is where PRI agility lives); the active
/// pulse windows are recorded so downstream sums can skip the zeros.
struct BasebandFrame {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<cplx> data;
    double sample_rate_hz = 0;
    double start_time_s = 0;
    std::vector<std::pair<std::uint64_t, std::uint64_t>> active_windows;

    cplx* row(std::size_t r) { return data.data() + r * cols; }
    const cplx* row(std::size_t r) const { return data.data() + r * cols; }
    cplx& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    const cplx& at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

/// First sample index of pulse l for a given time-offset selector.
std::uint64_t pulse_start_sample(const ValidatedConfig& vc, std::uint32_t l,
                                 std::uint32_t phi_t);

/// Unit-magnitude chip tone for the given absolute frequency bin
/// (bin = phi_f * K + hop); n_c samples referenced to the pulse start.
std::vector<cplx> chip_tone(const ValidatedConfig& vc, std::uint32_t bin);

/// The K reference waveforms h(t;l) over one chip, one row per hop.
std::vector<std::vector<cplx>> chip_reference_vector(const ValidatedConfig& vc,
                                                     const AgilitySchedule& schedule,
                                                     std::uint32_t l);

/// Samples the full L-pulse transmit frame (M rows).
BasebandFrame synthesize(const std::vector<PulsePlan>& plans,
                         const AgilitySchedule& schedule, const ValidatedConfig& vc,
                         Exec exec = Exec::parallel);

double frame_energy(const BasebandFrame& frame);

/// Raw interleaved complex little-endian export with a small header.
void write_frame_binary(const BasebandFrame& frame, const std::string& path);
BasebandFrame read_frame_binary(const std::string& path);

} // namespace rfpa
