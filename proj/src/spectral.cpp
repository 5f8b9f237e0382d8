#include "iaw/spectral.hpp"

#include <cmath>

#include "iaw/fft.hpp"

namespace iaw {

std::vector<std::complex<double>> spectrum(const GridField& f) {
    auto& ws = SpectralWorkspace::get(f.grid.n_points);
    std::vector<std::complex<double>> s;
    ws.forward(f.v, s);
    const double inv_n = 1.0 / f.grid.n_points;
    for (auto& c : s) c *= inv_n;
    return s;
}

GridField from_spectrum(const Grid& g, const std::vector<std::complex<double>>& s) {
    auto& ws = SpectralWorkspace::get(g.n_points);
    std::vector<std::complex<double>> scaled = s;
    for (auto& c : scaled) c *= static_cast<double>(g.n_points);
    GridField out(g);
    ws.inverse(scaled, out.v);
    return out;
}

GridField deriv(const GridField& f, int order) {
    if (order < 1 || order > 4)
        throw param_error("deriv: order must be in 1..4");
    auto& ws = SpectralWorkspace::get(f.grid.n_points);
    std::vector<std::complex<double>> s;
    ws.forward(f.v, s);
    const int n = f.grid.n_points;
    for (int m = 0; m < ws.n_modes(); ++m) {
        const double xi = f.grid.wavenumber(m);
        std::complex<double> factor = std::pow(std::complex<double>(0.0, xi), order);
        s[static_cast<size_t>(m)] *= factor;
    }
    // The Nyquist mode of a real field has no well-defined odd derivative.
    if (order % 2 == 1 && n % 2 == 0) s[static_cast<size_t>(n / 2)] = 0.0;
    GridField out(f.grid);
    ws.inverse(s, out.v);
    require_finite(out, "deriv");
    return out;
}

GridField antideriv_zero_mean(const GridField& f, double mean_tol) {
    auto& ws = SpectralWorkspace::get(f.grid.n_points);
    std::vector<std::complex<double>> s;
    ws.forward(f.v, s);
    const int n = f.grid.n_points;
    const double mean_f = s[0].real() / n;
    const double scale = max_abs(f);
    if (std::fabs(mean_f) > mean_tol * (scale > 0.0 ? scale : 1.0))
        throw integrability_error("antideriv_zero_mean: integrand mean " + std::to_string(mean_f) +
                                  " exceeds tolerance (non-decaying forcing)");
    s[0] = 0.0;
    for (int m = 1; m < ws.n_modes(); ++m) {
        const double xi = f.grid.wavenumber(m);
        s[static_cast<size_t>(m)] /= std::complex<double>(0.0, xi);
    }
    if (n % 2 == 0) s[static_cast<size_t>(n / 2)] = 0.0;
    GridField out(f.grid);
    ws.inverse(s, out.v);
    require_finite(out, "antideriv_zero_mean");
    return out;
}

namespace {
// |f_hat_m|^2 with the half-spectrum double counting for 0 < m < n/2.
double mode_weight(int m, int n) { return (m == 0 || (n % 2 == 0 && m == n / 2)) ? 1.0 : 2.0; }
} // namespace

double sobolev_norm(const GridField& f, int s) {
    if (s < 0 || s > 4)
        throw param_error("sobolev_norm: s must be in 0..4");
    auto spec = spectrum(f);
    const int n = f.grid.n_points;
    double total = 0.0;
    for (int m = 0; m < static_cast<int>(spec.size()); ++m) {
        const double xi = f.grid.wavenumber(m);
        const double p = std::norm(spec[static_cast<size_t>(m)]) * mode_weight(m, n);
        double w = 1.0, xi2 = xi * xi, acc = 1.0;
        for (int j = 1; j <= s; ++j) {
            acc *= xi2;
            w += acc;
        }
        total += p * w;
    }
    return std::sqrt(total * f.grid.length);
}

double l2_norm(const GridField& f) { return sobolev_norm(f, 0); }

double l2_inner(const GridField& a, const GridField& b) {
    require_same_grid(a, b, "l2_inner");
    double s = 0.0;
    for (size_t j = 0; j < a.v.size(); ++j) s += a.v[j] * b.v[j];
    return s * a.grid.dx();
}

void dealias_in_place(GridField& f) {
    auto& ws = SpectralWorkspace::get(f.grid.n_points);
    std::vector<std::complex<double>> s;
    ws.forward(f.v, s);
    const int cutoff = f.grid.n_points / 3;
    bool touched = false;
    for (int m = cutoff + 1; m < ws.n_modes(); ++m) {
        if (s[static_cast<size_t>(m)] != 0.0) touched = true;
        s[static_cast<size_t>(m)] = 0.0;
    }
    if (!touched) return; // already band-limited; keep samples bit-identical
    ws.inverse(s, f.v);
}

GridField dealias(const GridField& f) {
    GridField out = f;
    dealias_in_place(out);
    return out;
}

GridField lowpass(const GridField& f, double xi_cut) {
    if (xi_cut <= 0.0) return f;
    auto& ws = SpectralWorkspace::get(f.grid.n_points);
    std::vector<std::complex<double>> s;
    ws.forward(f.v, s);
    bool touched = false;
    for (int m = 0; m < ws.n_modes(); ++m) {
        if (f.grid.wavenumber(m) > xi_cut) {
            if (s[static_cast<size_t>(m)] != 0.0) touched = true;
            s[static_cast<size_t>(m)] = 0.0;
        }
    }
    if (!touched) return f;
    GridField out(f.grid);
    ws.inverse(s, out.v);
    return out;
}

double aliased_tail_max(const GridField& f) {
    auto spec = spectrum(f);
    const int cutoff = f.grid.n_points / 3;
    double m = 0.0;
    for (int k = cutoff + 1; k < static_cast<int>(spec.size()); ++k)
        m = std::max(m, std::abs(spec[static_cast<size_t>(k)]));
    return m;
}

} // namespace iaw
