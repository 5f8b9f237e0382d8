#pragma once

#include <complex>
#include <vector>

namespace iaw {

// Real<->complex FFT pair for one grid size, wrapping FFTW. Forward leaves the
// spectrum unnormalized; inverse divides by n, so inverse(forward(f)) == f.
// Instances are not thread-safe; use the thread-local cache below.
class SpectralWorkspace {
  public:
    explicit SpectralWorkspace(int n);
    ~SpectralWorkspace();
    SpectralWorkspace(const SpectralWorkspace&) = delete;
    SpectralWorkspace& operator=(const SpectralWorkspace&) = delete;

    int n() const { return n_; }
    int n_modes() const { return n_ / 2 + 1; }

    void forward(const std::vector<double>& in, std::vector<std::complex<double>>& out);
    void inverse(const std::vector<std::complex<double>>& in, std::vector<double>& out);

    // Per-thread workspace cache keyed by grid size.
    static SpectralWorkspace& get(int n);

  private:
    int n_;
    double* rbuf_;
    void* cbuf_;
    void* plan_fwd_;
    void* plan_inv_;
};

} // namespace iaw
