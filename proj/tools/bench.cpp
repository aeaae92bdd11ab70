// bench.cpp - serial vs OpenMP timing for the hot kernels.

#include <chrono>
#include <cstdio>
#include <functional>

#include <omp.h>

#include "rfpa/ambiguity.hpp"
#include "rfpa/channel.hpp"
#include "rfpa/harness.hpp"

using namespace rfpa;

namespace {

double time_ms(const std::function<void()>& fn, int reps = 3) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        auto t0 = std::chrono::steady_clock::now();
        fn();
        auto t1 = std::chrono::steady_clock::now();
        best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    return best;
}

void report(const char* name, double serial_ms, double parallel_ms) {
    std::printf("%-28s serial %9.2f ms   parallel %9.2f ms   speedup %.2fx\n", name,
                serial_ms, parallel_ms, serial_ms / parallel_ms);
}

} // namespace

int main(int argc, char** argv) {
    if (argc > 1) set_worker_threads(std::atoi(argv[1]));
    std::printf("threads: %d\n", omp_get_max_threads());

    SystemConfig sys;       // desk-scale defaults
    sys.num_pulses = 20;
    ValidatedConfig vc = validate(sys);

    SecretKey key = SecretKey::from_seed(7);
    AgilitySchedule schedule = generate_schedule(key, vc, 0);

    BitsPerChip bits = bits_per_chip(vc, Scheme::HYB);
    PrfStream payload(key, make_domain(StreamTag::payload, 0, 0));
    std::vector<std::uint8_t> stream(static_cast<std::size_t>(vc.sys.num_pulses) *
                                     vc.sys.chips_per_pulse * bits.total());
    for (auto& b : stream) b = static_cast<std::uint8_t>(payload.next_bits(1));
    BitReader reader(stream);
    std::vector<PulsePlan> plans;
    for (std::uint32_t l = 0; l < vc.sys.num_pulses; ++l)
        plans.push_back(encode_pulse(reader, vc, Scheme::HYB));

    report("synthesize",
           time_ms([&] { synthesize(plans, schedule, vc, Exec::serial); }),
           time_ms([&] { synthesize(plans, schedule, vc, Exec::parallel); }));

    BasebandFrame tx = synthesize(plans, schedule, vc);
    RngStream rng{key, 0};
    ChannelRealization real = draw_channel_realization(vc, rng, 1.0, 1.0);
    report("channel apply",
           time_ms([&] { apply(tx, real, Party::bob, vc, rng, Exec::serial); }),
           time_ms([&] { apply(tx, real, Party::bob, vc, rng, Exec::parallel); }));

    AfAxes cut = linspace_axes(3.0 * vc.delta_t, 41, 0.0, 1);
    report("af cut (numerical)",
           time_ms([&] {
               af_grid(AfSource::numerical, tx, plans, schedule, vc, cut, 0, 0, 1.0,
                       AfNormalization::none, Exec::serial);
           }),
           time_ms([&] {
               af_grid(AfSource::numerical, tx, plans, schedule, vc, cut, 0, 0, 1.0,
                       AfNormalization::none, Exec::parallel);
           }));
    report("af cut (analytic)",
           time_ms([&] {
               af_grid(AfSource::closed_form, tx, plans, schedule, vc, cut, 0, 0, 1.0,
                       AfNormalization::none, Exec::serial);
           }),
           time_ms([&] {
               af_grid(AfSource::closed_form, tx, plans, schedule, vc, cut, 0, 0, 1.0,
                       AfNormalization::none, Exec::parallel);
           }));

    ExperimentSpec spec;
    spec.config = vc;
    spec.scheme = Scheme::HYB;
    spec.ebn0_grid_db = {15.0};
    spec.trials = 4;
    spec.bits_min = 1000;
    spec.seed = 99;
    report("ber point (4 trials)",
           time_ms([&] { run_ber_sweep(spec, Exec::serial); }, 1),
           time_ms([&] { run_ber_sweep(spec, Exec::parallel); }, 1));

    return 0;
}
