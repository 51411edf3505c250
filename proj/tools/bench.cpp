// Times the OpenMP replica kernel against the serial reference on the
// three replica-heavy workloads. The two paths must produce identical
// results (unit_tests assert bit equality); this tool only reports the
// throughput gap.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "expstable/bbm.hpp"
#include "expstable/decoration.hpp"
#include "expstable/functional.hpp"
#include "expstable/replicas.hpp"
#include "expstable/sampler.hpp"

using namespace expstable;

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

template <typename Fn>
void bench_case(const char* name, long long replicas, Fn&& fn) {
    const std::uint64_t seed = 20250809;

    setenv("EXPSTABLE_WORKERS", "1", 1);
    auto t0 = std::chrono::steady_clock::now();
    auto serial = run_replicas_serial<double>(replicas, seed, fn);
    const double serial_s = seconds_since(t0);

    unsetenv("EXPSTABLE_WORKERS");
    t0 = std::chrono::steady_clock::now();
    auto parallel = run_replicas<double>(replicas, seed, fn);
    const double parallel_s = seconds_since(t0);

    double checksum = 0.0;
    bool identical = serial.size() == parallel.size();
    for (std::size_t i = 0; i < serial.size(); ++i) {
        checksum += serial[i];
        identical = identical && serial[i] == parallel[i];
    }
    std::printf("%-28s %10lld  %9.3fs  %9.3fs  %6.2fx  %s  (checksum %.6g)\n", name, replicas,
                serial_s, parallel_s, serial_s / parallel_s,
                identical ? "bit-identical" : "MISMATCH", checksum);
}

}  // namespace

int main(int argc, char** argv) {
    const double scale = argc > 1 ? std::atof(argv[1]) : 1.0;
    std::printf("replica kernel benchmark, %d worker(s) available\n", worker_count());
    std::printf("%-28s %10s %10s %10s %7s\n", "case", "replicas", "serial", "openmp", "speedup");

    {
        DpppSpec spec;
        spec.decoration = finite_cluster_decoration();
        spec.window = Window{-6.0, kInf};
        bench_case("dppp finite_cluster lo=-6", static_cast<long long>(20000 * scale),
                   [&spec](long long, Rng& rng) {
                       return static_cast<double>(sample_dppp(spec, rng).points.size());
                   });
    }
    {
        BbmParams params;
        params.horizon = 14.0;
        bench_case("bbm t=14", static_cast<long long>(2000 * scale),
                   [&params](long long, Rng& rng) {
                       return simulate(params, rng).additive_martingale;
                   });
    }
    {
        DpppSpec spec;
        spec.decoration = geometric_staircase_decoration();
        spec.window = Window{-2.0, kInf};
        const auto& battery = test_function_battery();
        bench_case("cumulant battery staircase", static_cast<long long>(50000 * scale),
                   [&spec, &battery](long long, Rng& rng) {
                       const auto sample = sample_dppp(spec, rng);
                       double acc = 0.0;
                       for (const auto& f : battery) acc += pair(sample.points, f, 0.0);
                       return acc;
                   });
    }
    return 0;
}
