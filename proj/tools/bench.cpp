// Timing comparison between the serial reference loops and the parallel
// kernels, on a synthetic dataset.

#include <chrono>
#include <cstdio>
#include <cstdlib>

#include "qmix/datagen.hpp"
#include "qmix/parallel.hpp"
#include "qmix/reference.hpp"

namespace {

using clock_type = std::chrono::steady_clock;

template <class F>
double time_ms(F&& fn, int repeats, double& sink) {
    const auto t0 = clock_type::now();
    for (int r = 0; r < repeats; ++r) {
        sink += fn();
    }
    const auto t1 = clock_type::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count() / repeats;
}

}  // namespace

int main(int argc, char** argv) {
    const std::size_t n = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 200000;
    const int repeats = argc > 2 ? std::atoi(argv[2]) : 5;

    const qmix::PriorConfig priors;
    const qmix::MixingParam v{0.6};
    std::printf("threads: %d (OpenMP %s), n = %zu, repeats = %d\n", qmix::par::max_threads(),
                qmix::par::compiled_with_openmp() ? "on" : "off", n, repeats);

    const auto gen0 = clock_type::now();
    const qmix::SampleSet data = qmix::generate(priors, v, n, 42);
    const auto gen1 = clock_type::now();
    std::printf("generate (parallel fill): %.2f ms\n",
                std::chrono::duration<double, std::milli>(gen1 - gen0).count());

    qmix::EvalOptions serial_opts;
    serial_opts.parallel = false;
    qmix::EvalOptions parallel_opts;

    double sink = 0.0;
    struct Row {
        const char* name;
        double serial_ms;
        double kernel_serial_ms;
        double kernel_parallel_ms;
    };
    Row rows[] = {
        {"log_likelihood",
         time_ms([&] { return qmix::reference::log_likelihood(data, v, priors); }, repeats, sink),
         time_ms([&] { return qmix::log_likelihood(data, v, priors, serial_opts).value; }, repeats,
                 sink),
         time_ms([&] { return qmix::log_likelihood(data, v, priors, parallel_opts).value; },
                 repeats, sink)},
        {"dlogl_dv_total",
         time_ms([&] { return qmix::reference::dlogl_dv_total(data, v, priors); }, repeats, sink),
         time_ms(
             [&] {
                 return qmix::dlogl_dv_total(data, v, priors, qmix::GradientRoute::ClosedForm,
                                             serial_opts)
                     .value;
             },
             repeats, sink),
         time_ms(
             [&] {
                 return qmix::dlogl_dv_total(data, v, priors, qmix::GradientRoute::ClosedForm,
                                             parallel_opts)
                     .value;
             },
             repeats, sink)},
    };

    std::printf("%-16s %14s %14s %16s %9s\n", "kernel", "reference(ms)", "serial(ms)",
                "parallel(ms)", "speedup");
    for (const Row& r : rows) {
        std::printf("%-16s %14.2f %14.2f %16.2f %8.2fx\n", r.name, r.serial_ms, r.kernel_serial_ms,
                    r.kernel_parallel_ms, r.kernel_serial_ms / r.kernel_parallel_ms);
    }
    std::printf("(checksum %.6f)\n", sink);
    return 0;
}
