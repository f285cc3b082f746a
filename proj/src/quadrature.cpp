// quadrature.cpp: uniform grid helpers

#include "tpf/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tpf {

UniformGrid::UniformGrid(double t_max, int n_steps) : n_steps_(n_steps), dt_(0.0)
{
    if (n_steps < 1) throw std::invalid_argument("grid needs at least one step");
    if (!(t_max > 0.0) || !std::isfinite(t_max)) throw std::invalid_argument("grid t_max must be positive");
    dt_ = t_max / n_steps;
}

UniformGrid UniformGrid::from_times(std::span<const double> times, double rel_tol)
{
    if (times.size() < 2) throw std::invalid_argument("grid needs at least two times");
    if (std::abs(times[0]) > 0.0) throw std::invalid_argument("grid must start at t = 0");
    const int n = static_cast<int>(times.size()) - 1;
    const double dt = times.back() / n;
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (std::abs(times[k] - dt * static_cast<double>(k)) > rel_tol * std::max(dt, std::abs(times.back()))) {
            std::ostringstream msg;
            msg << "grid is not uniform at index " << k << " (t = " << times[k] << ")";
            throw std::invalid_argument(msg.str());
        }
    }
    return UniformGrid(times.back(), n);
}

std::vector<double> UniformGrid::times() const
{
    std::vector<double> t(size());
    for (std::size_t k = 0; k < t.size(); ++k) t[k] = time(k);
    return t;
}

std::size_t UniformGrid::index_of(double t) const
{
    const double k = std::round(t / dt_);
    return static_cast<std::size_t>(std::clamp(k, 0.0, static_cast<double>(n_steps_)));
}

} // namespace tpf
