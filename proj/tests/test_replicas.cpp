#include <doctest.h>

#include <cstdlib>
#include <stdexcept>
#include <vector>

#include "expstable/replicas.hpp"
#include "expstable/sampler.hpp"

using namespace expstable;

namespace {

struct WorkerEnv {
    explicit WorkerEnv(const char* value) { setenv("EXPSTABLE_WORKERS", value, 1); }
    ~WorkerEnv() { unsetenv("EXPSTABLE_WORKERS"); }
};

}  // namespace

TEST_CASE("parallel kernel reproduces the serial reference bit for bit") {
    const auto fn = [](long long i, Rng& rng) {
        double acc = static_cast<double>(i);
        for (int k = 0; k < 50; ++k) acc += rng.exponential();
        return acc;
    };
    const auto serial = run_replicas_serial<double>(3000, 91, fn);
    WorkerEnv env("4");
    const auto parallel = run_replicas<double>(3000, 91, fn);
    REQUIRE(serial.size() == parallel.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
        CHECK(serial[i] == parallel[i]);
    }
}

TEST_CASE("parallel DPPP batches match the serial reference") {
    DpppSpec spec;
    spec.decoration = finite_cluster_decoration();
    spec.window = Window{-3.0, kInf};
    const auto fn = [&spec](long long, Rng& rng) { return sample_dppp(spec, rng).points; };

    const auto serial = run_replicas_serial<PointConfiguration>(400, 2025, fn);
    WorkerEnv env("3");
    const auto parallel = run_replicas<PointConfiguration>(400, 2025, fn);
    REQUIRE(serial.size() == parallel.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
        REQUIRE(serial[i].size() == parallel[i].size());
        for (std::size_t j = 0; j < serial[i].size(); ++j) {
            CHECK(serial[i].atoms()[j].position == parallel[i].atoms()[j].position);
            CHECK(serial[i].atoms()[j].mass == parallel[i].atoms()[j].mass);
        }
    }
}

TEST_CASE("exceptions inside the parallel region propagate") {
    WorkerEnv env("4");
    const auto fn = [](long long i, Rng&) -> double {
        if (i == 57) throw std::runtime_error("boom");
        return 0.0;
    };
    CHECK_THROWS_AS(run_replicas<double>(200, 1, fn), std::runtime_error);
}

TEST_CASE("worker count honors the environment override") {
    {
        WorkerEnv env("1");
        CHECK(worker_count() == 1);
    }
    {
        WorkerEnv env("7");
        CHECK(worker_count() == 7);
    }
}
