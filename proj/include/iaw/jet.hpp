#pragma once

#include <vector>

#include "iaw/field.hpp"

namespace iaw {

// A field value bundled with its first few time derivatives, all known as
// spatial expressions at one instant. order() says how many derivative slots
// are valid. Every algebraic operation propagates derivatives by the Leibniz
// rule, so quantities built from evolved profiles always know their own d/dt
// without any finite differencing in time.
class TimeJet {
  public:
    TimeJet() = default;
    explicit TimeJet(GridField value) { s_.push_back(std::move(value)); }
    TimeJet(std::vector<GridField> slots) : s_(std::move(slots)) {}

    static TimeJet zeros(const Grid& g, int order);
    static TimeJet constant(const Grid& g, double c, int order);

    bool empty() const { return s_.empty(); }
    int order() const { return static_cast<int>(s_.size()) - 1; }
    const Grid& grid() const { return s_.front().grid; }

    const GridField& value() const { return s_.front(); }
    const GridField& slot(int r) const { return s_[static_cast<size_t>(r)]; }
    GridField& slot(int r) { return s_[static_cast<size_t>(r)]; }
    void push_slot(GridField f) { s_.push_back(std::move(f)); }
    // Drop derivative slots beyond new_order.
    void truncate(int new_order);

  private:
    std::vector<GridField> s_;
};

TimeJet jet_add(const TimeJet& a, const TimeJet& b);
TimeJet jet_sub(const TimeJet& a, const TimeJet& b);
TimeJet jet_scale(const TimeJet& a, double c);
// Leibniz product; result order = min(order a, order b).
TimeJet jet_mul(const TimeJet& a, const TimeJet& b);
TimeJet jet_dx(const TimeJet& a, int order);
TimeJet jet_antideriv_zero_mean(const TimeJet& a, double mean_tol);
// Time derivative: shifts slots down; result order = order(a) - 1. Throws
// hierarchy_error when no derivative slot is available.
TimeJet jet_dt(const TimeJet& a);
TimeJet jet_dealias(const TimeJet& a);
TimeJet jet_lowpass(const TimeJet& a, double xi_cut);
bool jet_is_zero(const TimeJet& a);

} // namespace iaw
