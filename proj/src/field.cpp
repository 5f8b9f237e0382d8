#include "iaw/field.hpp"

#include <algorithm>

namespace iaw {

Grid make_grid(int n_points, double length) {
    if (n_points < 8)
        throw param_error("make_grid: n_points must be >= 8");
    if (!(length > 0.0) || !std::isfinite(length))
        throw param_error("make_grid: length must be positive and finite");
    return Grid{n_points, length};
}

GridField::GridField(Grid g, std::vector<double> values) : grid(g), v(std::move(values)) {
    if (static_cast<int>(v.size()) != g.n_points)
        throw shape_error("GridField: value count does not match grid");
}

GridField zero_field(const Grid& g) { return GridField(g); }

GridField const_field(const Grid& g, double c) {
    GridField f(g);
    std::fill(f.v.begin(), f.v.end(), c);
    return f;
}

GridField sample(const Grid& g, const std::function<double(double)>& f) {
    GridField out(g);
    for (int j = 0; j < g.n_points; ++j) out[j] = f(g.node(j));
    return out;
}

void require_same_grid(const GridField& a, const GridField& b, const char* where) {
    if (!(a.grid == b.grid))
        throw shape_error(std::string(where) + ": grid mismatch");
}

bool is_finite(const GridField& f) {
    for (double x : f.v)
        if (!std::isfinite(x)) return false;
    return true;
}

void require_finite(const GridField& f, const char* where) {
    if (!is_finite(f))
        throw numeric_error(std::string(where) + ": non-finite field values");
}

GridField operator+(const GridField& a, const GridField& b) {
    require_same_grid(a, b, "field +");
    GridField out = a;
    for (size_t j = 0; j < out.v.size(); ++j) out.v[j] += b.v[j];
    return out;
}

GridField operator-(const GridField& a, const GridField& b) {
    require_same_grid(a, b, "field -");
    GridField out = a;
    for (size_t j = 0; j < out.v.size(); ++j) out.v[j] -= b.v[j];
    return out;
}

GridField operator-(const GridField& a) {
    GridField out = a;
    for (double& x : out.v) x = -x;
    return out;
}

GridField operator*(double c, const GridField& a) {
    GridField out = a;
    for (double& x : out.v) x *= c;
    return out;
}

GridField operator*(const GridField& a, double c) { return c * a; }

GridField operator*(const GridField& a, const GridField& b) {
    require_same_grid(a, b, "field *");
    GridField out = a;
    for (size_t j = 0; j < out.v.size(); ++j) out.v[j] *= b.v[j];
    return out;
}

GridField pointwise_div(const GridField& a, const GridField& b) {
    require_same_grid(a, b, "field /");
    GridField out = a;
    for (size_t j = 0; j < out.v.size(); ++j) out.v[j] /= b.v[j];
    return out;
}

GridField operator+(const GridField& a, double c) {
    GridField out = a;
    for (double& x : out.v) x += c;
    return out;
}

GridField operator-(const GridField& a, double c) { return a + (-c); }

GridField& operator+=(GridField& a, const GridField& b) {
    require_same_grid(a, b, "field +=");
    for (size_t j = 0; j < a.v.size(); ++j) a.v[j] += b.v[j];
    return a;
}

GridField& operator-=(GridField& a, const GridField& b) {
    require_same_grid(a, b, "field -=");
    for (size_t j = 0; j < a.v.size(); ++j) a.v[j] -= b.v[j];
    return a;
}

GridField& operator*=(GridField& a, double c) {
    for (double& x : a.v) x *= c;
    return a;
}

void axpy(GridField& a, double c, const GridField& b) {
    require_same_grid(a, b, "axpy");
    for (size_t j = 0; j < a.v.size(); ++j) a.v[j] += c * b.v[j];
}

double max_abs(const GridField& f) {
    double m = 0.0;
    for (double x : f.v) m = std::max(m, std::fabs(x));
    return m;
}

double min_value(const GridField& f) {
    double m = f.v.empty() ? 0.0 : f.v[0];
    for (double x : f.v) m = std::min(m, x);
    return m;
}

double mean(const GridField& f) {
    double s = 0.0;
    for (double x : f.v) s += x;
    return s / f.v.size();
}

} // namespace iaw
