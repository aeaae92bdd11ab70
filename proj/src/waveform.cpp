#include "rfpa/waveform.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>

#include "rfpa/errors.hpp"

namespace rfpa {

namespace {

std::vector<cplx> unit_roots(std::uint32_t n) {
    std::vector<cplx> tw(n);
    for (std::uint32_t k = 0; k < n; ++k) {
        double a = 2.0 * std::numbers::pi * k / n;
        tw[k] = cplx(std::cos(a), std::sin(a));
    }
    return tw;
}

} // namespace

std::uint64_t pulse_start_sample(const ValidatedConfig& vc, std::uint32_t l,
                                 std::uint32_t phi_t) {
    return static_cast<std::uint64_t>(l) * vc.sampling.samples_per_pri +
           static_cast<std::uint64_t>(phi_t) * vc.sampling.samples_per_pulse;
}

std::vector<cplx> chip_tone(const ValidatedConfig& vc, std::uint32_t bin) {
    const std::uint32_t nc = vc.sampling.samples_per_chip;
    auto tw = unit_roots(nc);
    std::vector<cplx> tone(nc);
    for (std::uint32_t j = 0; j < nc; ++j)
        tone[j] = tw[(static_cast<std::uint64_t>(bin) * j) % nc];
    return tone;
}

std::vector<std::vector<cplx>> chip_reference_vector(const ValidatedConfig& vc,
                                                     const AgilitySchedule& schedule,
                                                     std::uint32_t l) {
    const std::uint32_t K = vc.sys.num_hops;
    const std::uint32_t base = schedule.phi_f[l] * K;
    std::vector<std::vector<cplx>> rows(K);
    for (std::uint32_t k = 0; k < K; ++k) rows[k] = chip_tone(vc, base + k);
    return rows;
}

BasebandFrame synthesize(const std::vector<PulsePlan>& plans,
                         const AgilitySchedule& schedule, const ValidatedConfig& vc,
                         Exec exec) {
    const std::uint32_t L = vc.sys.num_pulses;
    if (plans.size() != L || schedule.size() != L)
        throw Error(ErrorCode::PlanLengthMismatch,
                    "need one pulse plan and one schedule entry per pulse");

    const std::uint32_t M = vc.sys.num_tx;
    const std::uint32_t Q = vc.sys.chips_per_pulse;
    const std::uint32_t nc = vc.sampling.samples_per_chip;
    const std::uint32_t K = vc.sys.num_hops;

    BasebandFrame frame;
    frame.rows = M;
    frame.cols = vc.frame_samples();
    frame.sample_rate_hz = vc.sys.sample_rate_hz;
    frame.data.assign(frame.rows * frame.cols, cplx(0.0, 0.0));
    frame.active_windows.resize(L);

    const auto tw = unit_roots(nc);

    #pragma omp parallel for schedule(static) if (exec == Exec::parallel)
    for (std::int64_t l = 0; l < static_cast<std::int64_t>(L); ++l) {
        const std::uint64_t start = pulse_start_sample(vc, static_cast<std::uint32_t>(l),
                                                       schedule.phi_t[l]);
        frame.active_windows[l] = {start, start + static_cast<std::uint64_t>(Q) * nc};
        const std::uint32_t bin_base = schedule.phi_f[l] * K;
        const PulsePlan& plan = plans[l];
        for (std::uint32_t q = 0; q < Q; ++q) {
            const ChipSymbols& chip = plan.chips[q];
            const std::uint64_t chip_start = start + static_cast<std::uint64_t>(q) * nc;
            for (std::uint32_t m = 0; m < M; ++m) {
                const std::uint64_t bin = bin_base + chip.hop_codes[m];
                const cplx coeff =
                    chip.amplitudes[m] *
                    cplx(std::cos(chip.phases[m]), std::sin(chip.phases[m]));
                cplx* dst = frame.row(m) + chip_start;
                for (std::uint32_t j = 0; j < nc; ++j)
                    dst[j] = coeff * tw[(bin * j) % nc];
            }
        }
    }
    return frame;
}

double frame_energy(const BasebandFrame& frame) {
    double e = 0.0;
    for (const auto& v : frame.data) e += std::norm(v);
    return e;
}

namespace {
constexpr char kFrameMagic[8] = {'R', 'F', 'P', 'A', 'F', 'R', 'M', '1'};
}

void write_frame_binary(const BasebandFrame& frame, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::IoFailure, "cannot open " + path);
    out.write(kFrameMagic, 8);
    std::uint64_t rows = frame.rows, cols = frame.cols;
    out.write(reinterpret_cast<const char*>(&rows), 8);
    out.write(reinterpret_cast<const char*>(&cols), 8);
    out.write(reinterpret_cast<const char*>(&frame.sample_rate_hz), 8);
    out.write(reinterpret_cast<const char*>(&frame.start_time_s), 8);
    out.write(reinterpret_cast<const char*>(frame.data.data()),
              static_cast<std::streamsize>(frame.data.size() * sizeof(cplx)));
    if (!out) throw Error(ErrorCode::IoFailure, "short write to " + path);
}

BasebandFrame read_frame_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path);
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, kFrameMagic, 8) != 0)
        throw Error(ErrorCode::IoFailure, "bad frame header in " + path);
    BasebandFrame frame;
    std::uint64_t rows = 0, cols = 0;
    in.read(reinterpret_cast<char*>(&rows), 8);
    in.read(reinterpret_cast<char*>(&cols), 8);
    in.read(reinterpret_cast<char*>(&frame.sample_rate_hz), 8);
    in.read(reinterpret_cast<char*>(&frame.start_time_s), 8);
    frame.rows = rows;
    frame.cols = cols;
    frame.data.resize(rows * cols);
    in.read(reinterpret_cast<char*>(frame.data.data()),
            static_cast<std::streamsize>(frame.data.size() * sizeof(cplx)));
    if (!in) throw Error(ErrorCode::IoFailure, "short read from " + path);
    return frame;
}

} // namespace rfpa
