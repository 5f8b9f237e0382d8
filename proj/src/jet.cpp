#include "iaw/jet.hpp"

#include <algorithm>

#include "iaw/spectral.hpp"

namespace iaw {

TimeJet TimeJet::zeros(const Grid& g, int order) {
    std::vector<GridField> s;
    s.reserve(static_cast<size_t>(order) + 1);
    for (int r = 0; r <= order; ++r) s.push_back(zero_field(g));
    return TimeJet(std::move(s));
}

TimeJet TimeJet::constant(const Grid& g, double c, int order) {
    TimeJet j = zeros(g, order);
    j.slot(0) = const_field(g, c);
    return j;
}

void TimeJet::truncate(int new_order) {
    if (new_order < 0) throw hierarchy_error("TimeJet::truncate: negative order");
    if (order() > new_order) s_.resize(static_cast<size_t>(new_order) + 1);
}

namespace {
int common_order(const TimeJet& a, const TimeJet& b, const char* where) {
    if (a.empty() || b.empty()) throw hierarchy_error(std::string(where) + ": empty jet");
    return std::min(a.order(), b.order());
}
} // namespace

TimeJet jet_add(const TimeJet& a, const TimeJet& b) {
    const int m = common_order(a, b, "jet_add");
    std::vector<GridField> s;
    s.reserve(static_cast<size_t>(m) + 1);
    for (int r = 0; r <= m; ++r) s.push_back(a.slot(r) + b.slot(r));
    return TimeJet(std::move(s));
}

TimeJet jet_sub(const TimeJet& a, const TimeJet& b) {
    const int m = common_order(a, b, "jet_sub");
    std::vector<GridField> s;
    s.reserve(static_cast<size_t>(m) + 1);
    for (int r = 0; r <= m; ++r) s.push_back(a.slot(r) - b.slot(r));
    return TimeJet(std::move(s));
}

TimeJet jet_scale(const TimeJet& a, double c) {
    std::vector<GridField> s;
    s.reserve(static_cast<size_t>(a.order()) + 1);
    for (int r = 0; r <= a.order(); ++r) s.push_back(c * a.slot(r));
    return TimeJet(std::move(s));
}

TimeJet jet_mul(const TimeJet& a, const TimeJet& b) {
    const int m = common_order(a, b, "jet_mul");
    std::vector<GridField> s;
    s.reserve(static_cast<size_t>(m) + 1);
    // (ab)^(r) = sum_j C(r,j) a^(j) b^(r-j)
    for (int r = 0; r <= m; ++r) {
        GridField acc = zero_field(a.grid());
        double binom = 1.0;
        for (int j = 0; j <= r; ++j) {
            GridField term = a.slot(j) * b.slot(r - j);
            axpy(acc, binom, term);
            binom = binom * (r - j) / (j + 1);
        }
        s.push_back(std::move(acc));
    }
    return TimeJet(std::move(s));
}

TimeJet jet_dx(const TimeJet& a, int order) {
    std::vector<GridField> s;
    s.reserve(static_cast<size_t>(a.order()) + 1);
    for (int r = 0; r <= a.order(); ++r) s.push_back(deriv(a.slot(r), order));
    return TimeJet(std::move(s));
}

TimeJet jet_antideriv_zero_mean(const TimeJet& a, double mean_tol) {
    std::vector<GridField> s;
    s.reserve(static_cast<size_t>(a.order()) + 1);
    for (int r = 0; r <= a.order(); ++r) s.push_back(antideriv_zero_mean(a.slot(r), mean_tol));
    return TimeJet(std::move(s));
}

TimeJet jet_dt(const TimeJet& a) {
    if (a.order() < 1)
        throw hierarchy_error("jet_dt: time-derivative slot not available (jet order 0)");
    std::vector<GridField> s;
    s.reserve(static_cast<size_t>(a.order()));
    for (int r = 1; r <= a.order(); ++r) s.push_back(a.slot(r));
    return TimeJet(std::move(s));
}

TimeJet jet_dealias(const TimeJet& a) {
    std::vector<GridField> s;
    s.reserve(static_cast<size_t>(a.order()) + 1);
    for (int r = 0; r <= a.order(); ++r) s.push_back(dealias(a.slot(r)));
    return TimeJet(std::move(s));
}

TimeJet jet_lowpass(const TimeJet& a, double xi_cut) {
    std::vector<GridField> s;
    s.reserve(static_cast<size_t>(a.order()) + 1);
    for (int r = 0; r <= a.order(); ++r) s.push_back(lowpass(a.slot(r), xi_cut));
    return TimeJet(std::move(s));
}

bool jet_is_zero(const TimeJet& a) {
    for (int r = 0; r <= a.order(); ++r)
        if (max_abs(a.slot(r)) != 0.0) return false;
    return true;
}

} // namespace iaw
