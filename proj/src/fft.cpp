#include "ssct/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

namespace ssct::fft {

namespace {

// FFTW planning is not thread-safe; execution via fftw_execute_dft on
// distinct arrays is. Plans use FFTW_ESTIMATE so planning never touches
// the caller's buffer.
std::mutex g_plan_mutex;
std::map<std::pair<std::size_t, int>, fftw_plan> g_plans;

fftw_plan get_plan(std::size_t n, int sign) {
    std::lock_guard<std::mutex> lock(g_plan_mutex);
    auto key = std::make_pair(n, sign);
    auto it = g_plans.find(key);
    if (it != g_plans.end()) return it->second;
    fftw_complex* scratch = fftw_alloc_complex(n * n);
    fftw_plan plan = fftw_plan_dft_2d(static_cast<int>(n), static_cast<int>(n), scratch,
                                      scratch, sign, FFTW_ESTIMATE);
    fftw_free(scratch);
    g_plans.emplace(key, plan);
    return plan;
}

void execute(std::complex<double>* data, std::size_t n, int sign) {
    fftw_plan plan = get_plan(n, sign);
    auto* raw = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(plan, raw, raw);
}

}  // namespace

void forward2d(std::complex<double>* data, std::size_t n) { execute(data, n, FFTW_FORWARD); }

void backward2d(std::complex<double>* data, std::size_t n) { execute(data, n, FFTW_BACKWARD); }

}  // namespace ssct::fft
