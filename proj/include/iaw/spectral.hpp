#pragma once

#include <complex>
#include <vector>

#include "iaw/field.hpp"

namespace iaw {

// Default relative tolerance on the mean of an integrand handed to
// antideriv_zero_mean: a larger mean signals a non-decaying forcing.
inline constexpr double kDefaultMeanTol = 1e-8;

std::vector<std::complex<double>> spectrum(const GridField& f);
GridField from_spectrum(const Grid& g, const std::vector<std::complex<double>>& s);

// Spectral derivative of order 1..4. Exact for band-limited fields; odd
// orders zero the Nyquist mode.
GridField deriv(const GridField& f, int order);

// Unique zero-mean periodic antiderivative. Requires |mean(f)| <=
// mean_tol * max|f| (a non-decaying integrand breaks the hierarchy); the mean
// is removed before inverting d/dx.
GridField antideriv_zero_mean(const GridField& f, double mean_tol = kDefaultMeanTol);

// ( sum_{j<=s} ||d^j f/dx^j||_L2^2 )^{1/2}, s in 0..4, evaluated by Parseval
// so that norms and deriv commute exactly.
double sobolev_norm(const GridField& f, int s);
double l2_norm(const GridField& f);
double l2_inner(const GridField& a, const GridField& b);

// 2/3-rule: zero every mode with |m| > n/3. Idempotent.
GridField dealias(const GridField& f);
void dealias_in_place(GridField& f);

// Zero every mode with wavenumber above xi_cut (<= 0 disables). Used to
// keep derivative-laden quantities from amplifying the double-precision
// spectral floor.
GridField lowpass(const GridField& f, double xi_cut);

// Largest |spectral coefficient| with |m| > n/3; resolution diagnostic.
double aliased_tail_max(const GridField& f);

} // namespace iaw
