// quadrature.hpp: uniform time grids and cumulative composite Simpson integration

#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace tpf {

// t_k = k * dt, k = 0 .. n_steps.
class UniformGrid {
public:
    UniformGrid(double t_max, int n_steps);

    static UniformGrid from_times(std::span<const double> times, double rel_tol = 1e-9);

    int n_steps() const { return n_steps_; }
    std::size_t size() const { return static_cast<std::size_t>(n_steps_) + 1; }
    double dt() const { return dt_; }
    double t_max() const { return dt_ * n_steps_; }
    double time(std::size_t k) const { return dt_ * static_cast<double>(k); }
    std::vector<double> times() const;
    // Index of the grid point closest to t.
    std::size_t index_of(double t) const;

private:
    int n_steps_;
    double dt_;
};

// Cumulative integral F_n = int_0^{t_n} f on a uniform grid, for any value type
// with + and scalar *. Even n: composite Simpson. Odd n >= 3: Simpson over
// [0, t_{n-1}] plus the three-point end panel h/12 (-f_{n-2} + 8 f_{n-1} + 5 f_n),
// which keeps fourth-order accuracy at every grid point. n = 1 uses
// h/12 (5 f_0 + 8 f_1 - f_2) when f_2 exists, trapezoid otherwise.
template <typename T>
std::vector<T> cumulative_simpson(std::span<const T> f, double h)
{
    const std::size_t n = f.size();
    if (n == 0) throw std::invalid_argument("cumulative_simpson needs at least one sample");
    std::vector<T> out;
    out.reserve(n);
    out.push_back(f[0] * 0.0);
    if (n == 1) return out;
    if (n == 2) {
        out.push_back((f[0] + f[1]) * (0.5 * h));
        return out;
    }
    out.push_back((f[0] * 5.0 + f[1] * 8.0 - f[2]) * (h / 12.0));
    T even = f[0] * 0.0;
    for (std::size_t k = 2; k < n; ++k) {
        if (k % 2 == 0) {
            even = even + (f[k - 2] + f[k - 1] * 4.0 + f[k]) * (h / 3.0);
            out.push_back(even);
        } else {
            out.push_back(even + (f[k - 1] * 8.0 + f[k] * 5.0 - f[k - 2]) * (h / 12.0));
        }
    }
    return out;
}

inline std::vector<double> cumulative_simpson(const std::vector<double>& f, double h)
{
    return cumulative_simpson<double>(std::span<const double>(f), h);
}

} // namespace tpf
