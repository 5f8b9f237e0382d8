#include "iaw/fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <map>
#include <memory>
#include <mutex>

#include "iaw/errors.hpp"

namespace iaw {

namespace {
// FFTW's planner is not thread-safe even with FFTW_ESTIMATE.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
} // namespace

SpectralWorkspace::SpectralWorkspace(int n) : n_(n) {
    if (n < 2) throw param_error("SpectralWorkspace: n too small");
    rbuf_ = fftw_alloc_real(static_cast<size_t>(n));
    fftw_complex* c = fftw_alloc_complex(static_cast<size_t>(n / 2 + 1));
    cbuf_ = c;
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan_fwd_ = fftw_plan_dft_r2c_1d(n, rbuf_, c, FFTW_ESTIMATE);
    plan_inv_ = fftw_plan_dft_c2r_1d(n, c, rbuf_, FFTW_ESTIMATE);
}

SpectralWorkspace::~SpectralWorkspace() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
    fftw_destroy_plan(static_cast<fftw_plan>(plan_inv_));
    fftw_free(rbuf_);
    fftw_free(static_cast<fftw_complex*>(cbuf_));
}

void SpectralWorkspace::forward(const std::vector<double>& in, std::vector<std::complex<double>>& out) {
    std::memcpy(rbuf_, in.data(), sizeof(double) * static_cast<size_t>(n_));
    fftw_execute(static_cast<fftw_plan>(plan_fwd_));
    out.resize(static_cast<size_t>(n_modes()));
    const fftw_complex* c = static_cast<const fftw_complex*>(cbuf_);
    for (int m = 0; m < n_modes(); ++m) out[static_cast<size_t>(m)] = {c[m][0], c[m][1]};
}

void SpectralWorkspace::inverse(const std::vector<std::complex<double>>& in, std::vector<double>& out) {
    fftw_complex* c = static_cast<fftw_complex*>(cbuf_);
    for (int m = 0; m < n_modes(); ++m) {
        c[m][0] = in[static_cast<size_t>(m)].real();
        c[m][1] = in[static_cast<size_t>(m)].imag();
    }
    fftw_execute(static_cast<fftw_plan>(plan_inv_));
    out.resize(static_cast<size_t>(n_));
    const double inv_n = 1.0 / n_;
    for (int j = 0; j < n_; ++j) out[static_cast<size_t>(j)] = rbuf_[j] * inv_n;
}

SpectralWorkspace& SpectralWorkspace::get(int n) {
    thread_local std::map<int, std::unique_ptr<SpectralWorkspace>> cache;
    auto it = cache.find(n);
    if (it == cache.end())
        it = cache.emplace(n, std::make_unique<SpectralWorkspace>(n)).first;
    return *it->second;
}

} // namespace iaw
