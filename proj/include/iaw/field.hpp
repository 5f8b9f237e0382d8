#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "iaw/errors.hpp"

namespace iaw {

// Uniform periodic grid on [-L/2, L/2). Cheap value type; fields carry a copy.
struct Grid {
    int n_points = 0;
    double length = 0.0;

    double dx() const { return length / n_points; }
    double node(int j) const { return -0.5 * length + dx() * j; }
    // Wavenumber of integer mode m (2*pi*m/L).
    double wavenumber(int m) const { return 2.0 * M_PI * m / length; }
    bool operator==(const Grid&) const = default;
};

Grid make_grid(int n_points, double length);

// Real-valued periodic grid function; the atom of all states and profiles.
// Value semantics throughout: operations return new fields.
struct GridField {
    Grid grid;
    std::vector<double> v;

    GridField() = default;
    explicit GridField(Grid g) : grid(g), v(static_cast<size_t>(g.n_points), 0.0) {}
    GridField(Grid g, std::vector<double> values);

    int size() const { return grid.n_points; }
    double& operator[](int j) { return v[static_cast<size_t>(j)]; }
    double operator[](int j) const { return v[static_cast<size_t>(j)]; }
};

GridField zero_field(const Grid& g);
GridField const_field(const Grid& g, double c);
GridField sample(const Grid& g, const std::function<double(double)>& f);

void require_same_grid(const GridField& a, const GridField& b, const char* where);
// Throws numeric_error if the field contains NaN/Inf.
void require_finite(const GridField& f, const char* where);
bool is_finite(const GridField& f);

GridField operator+(const GridField& a, const GridField& b);
GridField operator-(const GridField& a, const GridField& b);
GridField operator-(const GridField& a);
GridField operator*(double c, const GridField& a);
GridField operator*(const GridField& a, double c);
// Pointwise product / quotient.
GridField operator*(const GridField& a, const GridField& b);
GridField pointwise_div(const GridField& a, const GridField& b);
GridField operator+(const GridField& a, double c);
GridField operator-(const GridField& a, double c);

GridField& operator+=(GridField& a, const GridField& b);
GridField& operator-=(GridField& a, const GridField& b);
GridField& operator*=(GridField& a, double c);
// a += c*b without temporaries.
void axpy(GridField& a, double c, const GridField& b);

double max_abs(const GridField& f);
double min_value(const GridField& f);
double mean(const GridField& f);

} // namespace iaw
