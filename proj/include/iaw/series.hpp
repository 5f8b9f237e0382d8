#pragma once

#include <vector>

#include "iaw/field.hpp"
#include "iaw/jet.hpp"
#include "iaw/spectral.hpp"

namespace iaw {

// Coefficient-ring glue so the series algebra runs over plain fields or over
// time jets without duplication.
template <class C>
struct series_coeff;

template <>
struct series_coeff<GridField> {
    static GridField zero_like(const GridField& a) { return zero_field(a.grid); }
    static GridField one_like(const GridField& a) { return const_field(a.grid, 1.0); }
    static GridField add(const GridField& a, const GridField& b) { return a + b; }
    static GridField sub(const GridField& a, const GridField& b) { return a - b; }
    static GridField scale(const GridField& a, double c) { return c * a; }
    static GridField mul(const GridField& a, const GridField& b) { return a * b; }
    static GridField dealias(const GridField& a) { return iaw::dealias(a); }
    static bool is_zero(const GridField& a) { return max_abs(a) == 0.0; }
    static bool same_shape(const GridField& a, const GridField& b) { return a.grid == b.grid; }
};

template <>
struct series_coeff<TimeJet> {
    static TimeJet zero_like(const TimeJet& a) { return TimeJet::zeros(a.grid(), a.order()); }
    static TimeJet one_like(const TimeJet& a) { return TimeJet::constant(a.grid(), 1.0, a.order()); }
    static TimeJet add(const TimeJet& a, const TimeJet& b) { return jet_add(a, b); }
    static TimeJet sub(const TimeJet& a, const TimeJet& b) { return jet_sub(a, b); }
    static TimeJet scale(const TimeJet& a, double c) { return jet_scale(a, c); }
    static TimeJet mul(const TimeJet& a, const TimeJet& b) { return jet_mul(a, b); }
    static TimeJet dealias(const TimeJet& a) { return jet_dealias(a); }
    static bool is_zero(const TimeJet& a) { return jet_is_zero(a); }
    static bool same_shape(const TimeJet& a, const TimeJet& b) { return a.grid() == b.grid(); }
};

// Truncated formal power series in the expansion parameter with field-valued
// coefficients c[0..K]. Arithmetic never reads or writes beyond order K.
template <class C>
struct EpsSeries {
    std::vector<C> c;

    EpsSeries() = default;
    explicit EpsSeries(std::vector<C> coeffs) : c(std::move(coeffs)) {}

    int trunc_order() const { return static_cast<int>(c.size()) - 1; }
    const C& operator[](int k) const { return c[static_cast<size_t>(k)]; }
    C& operator[](int k) { return c[static_cast<size_t>(k)]; }
};

template <class C>
void require_same_series_shape(const EpsSeries<C>& a, const EpsSeries<C>& b, const char* where) {
    if (a.trunc_order() != b.trunc_order())
        throw shape_error(std::string(where) + ": truncation order mismatch");
    if (!a.c.empty() && !series_coeff<C>::same_shape(a.c.front(), b.c.front()))
        throw shape_error(std::string(where) + ": grid mismatch");
}

template <class C>
EpsSeries<C> series_zero_like(const EpsSeries<C>& a) {
    EpsSeries<C> out;
    out.c.reserve(a.c.size());
    for (const C& ck : a.c) out.c.push_back(series_coeff<C>::zero_like(ck));
    return out;
}

template <class C>
EpsSeries<C> series_add(const EpsSeries<C>& a, const EpsSeries<C>& b) {
    require_same_series_shape(a, b, "series_add");
    EpsSeries<C> out;
    out.c.reserve(a.c.size());
    for (size_t k = 0; k < a.c.size(); ++k) out.c.push_back(series_coeff<C>::add(a.c[k], b.c[k]));
    return out;
}

template <class C>
EpsSeries<C> series_sub(const EpsSeries<C>& a, const EpsSeries<C>& b) {
    require_same_series_shape(a, b, "series_sub");
    EpsSeries<C> out;
    out.c.reserve(a.c.size());
    for (size_t k = 0; k < a.c.size(); ++k) out.c.push_back(series_coeff<C>::sub(a.c[k], b.c[k]));
    return out;
}

template <class C>
EpsSeries<C> series_scale(const EpsSeries<C>& a, double s) {
    EpsSeries<C> out;
    out.c.reserve(a.c.size());
    for (const C& ck : a.c) out.c.push_back(series_coeff<C>::scale(ck, s));
    return out;
}

// Truncated Cauchy product; each output coefficient is dealiased once after
// accumulation (dealiasing is linear, so this equals dealiasing every term).
template <class C>
EpsSeries<C> series_mul(const EpsSeries<C>& a, const EpsSeries<C>& b) {
    require_same_series_shape(a, b, "series_mul");
    EpsSeries<C> out;
    const int K = a.trunc_order();
    out.c.reserve(a.c.size());
    for (int k = 0; k <= K; ++k) {
        C acc = series_coeff<C>::zero_like(a.c.front());
        for (int i = 0; i <= k; ++i)
            acc = series_coeff<C>::add(acc, series_coeff<C>::mul(a[i], b[k - i]));
        out.c.push_back(series_coeff<C>::dealias(acc));
    }
    return out;
}

// exp(a) through order K by the recurrence K*b_K = sum j*a_j*b_{K-j}.
// Requires a vanishing leading coefficient, so exp(a)_0 = 1 exactly.
template <class C>
EpsSeries<C> series_exp(const EpsSeries<C>& a) {
    if (a.c.empty()) throw shape_error("series_exp: empty series");
    if (!series_coeff<C>::is_zero(a.c.front()))
        throw param_error("series_exp: leading coefficient must be identically zero");
    const int K = a.trunc_order();
    EpsSeries<C> b;
    b.c.reserve(a.c.size());
    b.c.push_back(series_coeff<C>::one_like(a.c.front()));
    for (int k = 1; k <= K; ++k) {
        C acc = series_coeff<C>::zero_like(a.c.front());
        for (int j = 1; j <= k; ++j) {
            C term = series_coeff<C>::mul(a[j], b[k - j]);
            acc = series_coeff<C>::add(acc, series_coeff<C>::scale(term, static_cast<double>(j)));
        }
        b.c.push_back(series_coeff<C>::dealias(series_coeff<C>::scale(acc, 1.0 / k)));
    }
    return b;
}

// p/q for q with leading coefficient identically 1 (the only case the
// expansion produces: q = n/n_bar = 1 + O(eps)).
template <class C>
EpsSeries<C> series_div_unit(const EpsSeries<C>& p, const EpsSeries<C>& q) {
    require_same_series_shape(p, q, "series_div_unit");
    C lead_err = series_coeff<C>::sub(q.c.front(), series_coeff<C>::one_like(q.c.front()));
    if (!series_coeff<C>::is_zero(lead_err))
        throw param_error("series_div_unit: divisor leading coefficient must be 1");
    const int K = p.trunc_order();
    EpsSeries<C> w;
    w.c.reserve(p.c.size());
    for (int k = 0; k <= K; ++k) {
        C acc = p[k];
        for (int j = 1; j <= k; ++j)
            acc = series_coeff<C>::sub(acc, series_coeff<C>::mul(q[j], w[k - j]));
        w.c.push_back(series_coeff<C>::dealias(acc));
    }
    return w;
}

// exp(a) as the left-nested projected power sum  sum_m a^(m)/m!  with
// a^(m) = dealias(a^(m-1) * a). Dealiasing is not a ring homomorphism, so
// the nesting order is part of the semantics; the direct solver's
// Boltzmann term uses the same left nesting on plain fields, which is what
// makes the remainder-system identity exact on the grid. Equals series_exp
// up to the product-resolution floor (and exactly on resolved fields).
template <class C>
EpsSeries<C> series_exp_nested(const EpsSeries<C>& a) {
    if (a.c.empty()) throw shape_error("series_exp_nested: empty series");
    if (!series_coeff<C>::is_zero(a.c.front()))
        throw param_error("series_exp_nested: leading coefficient must be identically zero");
    const int K = a.trunc_order();
    EpsSeries<C> acc;
    acc.c.reserve(a.c.size());
    for (int k = 0; k <= K; ++k) acc.c.push_back(series_coeff<C>::zero_like(a.c.front()));
    acc[0] = series_coeff<C>::one_like(a.c.front());
    EpsSeries<C> power = acc; // a^(m) / m!
    for (int m = 1; m <= K; ++m) {
        power = series_scale(series_mul(power, a), 1.0 / m);
        acc = series_add(acc, power); // a has zero lead: power's min order is m
    }
    return acc;
}

// Evaluate the series at a concrete parameter value (Horner).
inline GridField series_eval(const EpsSeries<GridField>& a, double eps) {
    GridField acc = a.c.back();
    for (int k = a.trunc_order() - 1; k >= 0; --k) {
        acc *= eps;
        acc += a[k];
    }
    return acc;
}

} // namespace iaw
