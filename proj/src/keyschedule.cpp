#include "rfpa/keyschedule.hpp"

#include <bit>
#include <fstream>

#include "rfpa/errors.hpp"
#include "rfpa/io_util.hpp"

namespace rfpa {

namespace {

unsigned mask_width(std::uint32_t alphabet) {
    // alphabets are validated powers of two, so masking is exactly uniform
    return static_cast<unsigned>(std::bit_width(static_cast<std::uint64_t>(alphabet)) - 1);
}

std::uint32_t draw_masked(const std::array<std::uint32_t, 8>& kw, StreamTag tag,
                          std::uint32_t stream_id, std::uint32_t pulse, unsigned width) {
    if (width == 0) return 0;
    auto block = chacha20_block(kw, 0, make_domain(tag, stream_id, pulse));
    std::uint64_t v = block[0] | (static_cast<std::uint64_t>(block[1]) << 32);
    return static_cast<std::uint32_t>(v & ((1ull << width) - 1));
}

AgilitySchedule fill_offsets(AgilitySchedule s, const ValidatedConfig& vc) {
    s.t_offsets_s.resize(s.phi_t.size());
    s.f_offsets_hz.resize(s.phi_f.size());
    for (std::size_t l = 0; l < s.phi_t.size(); ++l) {
        s.t_offsets_s[l] = vc.delta_T * s.phi_t[l];
        s.f_offsets_hz[l] = vc.delta_F * s.phi_f[l];
    }
    return s;
}

} // namespace

AgilitySchedule generate_schedule(const SecretKey& key, const ValidatedConfig& vc,
                                  std::uint32_t stream_id) {
    const std::uint32_t L = vc.sys.num_pulses;
    const unsigned wt = mask_width(vc.phi_t_card);
    const unsigned wf = mask_width(vc.phi_f_card);
    auto kw = key_words(key);

    AgilitySchedule s;
    s.phi_t.resize(L);
    s.phi_f.resize(L);
    for (std::uint32_t l = 0; l < L; ++l) {
        s.phi_t[l] = draw_masked(kw, StreamTag::schedule_time, stream_id, l, wt);
        s.phi_f[l] = draw_masked(kw, StreamTag::schedule_freq, stream_id, l, wf);
    }
    return fill_offsets(std::move(s), vc);
}

AgilitySchedule adversary_guess_schedule(std::uint64_t rng_seed, const ValidatedConfig& vc) {
    SecretKey key = SecretKey::from_seed(rng_seed).subkey(make_domain(StreamTag::adversary));
    return generate_schedule(key, vc, 0);
}

AgilitySchedule zero_schedule(const ValidatedConfig& vc) {
    AgilitySchedule s;
    s.phi_t.assign(vc.sys.num_pulses, 0);
    s.phi_f.assign(vc.sys.num_pulses, 0);
    return fill_offsets(std::move(s), vc);
}

void write_schedule_csv(const AgilitySchedule& schedule, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::IoFailure, "cannot open " + path);
    out << "l,phi_t,phi_f,T_l_s,f_l_hz\n";
    for (std::size_t l = 0; l < schedule.size(); ++l) {
        out << l << ',' << schedule.phi_t[l] << ',' << schedule.phi_f[l] << ','
            << format_double(schedule.t_offsets_s[l]) << ','
            << format_double(schedule.f_offsets_hz[l]) << '\n';
    }
}

} // namespace rfpa
