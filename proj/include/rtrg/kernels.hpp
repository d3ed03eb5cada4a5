#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

namespace rtrg {

// Serial is the reference path; Parallel runs the same body under OpenMP.
enum class Exec { Serial, Parallel };

// Calls body(i) for i in [0, n). The first exception thrown by any
// iteration is rethrown after the loop.
template <class Body>
void for_each_index(std::size_t n, Exec exec, Body&& body) {
    if (exec == Exec::Serial) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::exception_ptr err;
    std::mutex m;
    const long long N = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic)
    for (long long i = 0; i < N; ++i) {
        try {
            body(static_cast<std::size_t>(i));
        } catch (...) {
            std::lock_guard<std::mutex> lk(m);
            if (!err) err = std::current_exception();
        }
    }
    if (err) std::rethrow_exception(err);
}

void set_threads(int n);
int max_threads();

} // namespace rtrg
