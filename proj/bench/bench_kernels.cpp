// Serial reference vs OpenMP for the parallel kernels. Each pair must agree bitwise.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>

#include "rtrg/kernels.hpp"
#include "rtrg/phase.hpp"
#include "rtrg/spectral.hpp"
#include "rtrg/time_domain.hpp"

using namespace rtrg;

namespace {

template <class F>
double seconds(F&& f) {
    auto t0 = std::chrono::steady_clock::now();
    f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool all_same = true;

template <class R, class Eq>
void compare(const char* name, const std::function<R(Exec)>& work, Eq same) {
    R a, b;
    double ts = seconds([&] { a = work(Exec::Serial); });
    double tp = seconds([&] { b = work(Exec::Parallel); });
    bool eq = same(a, b);
    all_same = all_same && eq;
    std::printf("%-22s serial %8.3f s  parallel %8.3f s  speedup %5.2f  %s\n", name, ts, tp, ts / tp,
                eq ? "identical" : "MISMATCH");
}

} // namespace

int main(int argc, char** argv) {
    if (argc > 1) set_threads(std::atoi(argv[1]));
    std::printf("threads: %d\n", max_threads());
    const ModelParams p = derive_scales(0.45).with_temperature(0.05);

    compare<ResidualMap>(
        "residual map 48x32",
        [&](Exec e) { return cr_residual_map(p, Rectangle{-1.5, 1.5, -1.5, 0.0}, 48, 32, {}, e); },
        [](const ResidualMap& a, const ResidualMap& b) { return a.values == b.values; });

    std::vector<double> xs;
    for (int k = -4000; k <= 4000; ++k) xs.push_back(0.05 * k);
    compare<LineSamples>(
        "contour samples 8001",
        [&](Exec e) { return sample_line(p, -0.6, xs, 64, AccuracySpec{}, e); },
        [](const LineSamples& a, const LineSamples& b) { return a.pi == b.pi && a.dpi == b.dpi; });

    QuadSpec q;
    q.gamma_lead = 0.7096;
    compare<RelaxationTrace>(
        "P(t) 2000 times",
        [&](Exec e) { return invert_laplace(p, uniform_times(0.01, 50.0, 2000), q, e); },
        [](const RelaxationTrace& a, const RelaxationTrace& b) { return a.values == b.values && a.imag == b.imag; });

    compare<std::vector<PhaseRow>>(
        "phase rows x4",
        [&](Exec e) { return scan_phase_diagram({0.40, 0.43, 0.45, 0.48}, {}, e); },
        [](const std::vector<PhaseRow>& a, const std::vector<PhaseRow>& b) {
            if (a.size() != b.size()) return false;
            for (std::size_t i = 0; i < a.size(); ++i)
                if (a[i].tc1_numeric != b[i].tc1_numeric || a[i].tc2_numeric != b[i].tc2_numeric) return false;
            return true;
        });

    return all_same ? 0 : 1;
}
