// shared helpers for the unit tests

#pragma once

#include <vector>

#include "tpf/dynamics.hpp"
#include "tpf/linalg.hpp"

namespace tpf::testing {

// Scaling and squaring with a Taylor kernel; plenty for the small generators used here.
inline Matrix expm(const Matrix& a)
{
    int squarings = 0;
    double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
    while (norm > 0.05) {
        norm *= 0.5;
        ++squarings;
    }
    const Matrix x = a / static_cast<double>(1 << squarings);
    Matrix term = Matrix::Identity(a.rows(), a.cols());
    Matrix sum = term;
    for (int k = 1; k < 20; ++k) {
        term = term * x / static_cast<double>(k);
        sum += term;
    }
    for (int k = 0; k < squarings; ++k) sum = sum * sum;
    return sum;
}

// Phi_t = e^{L t} on a uniform grid, with analytic derivatives L Phi_t.
inline dyn::MapTrajectory constant_generator_trajectory(const Superoperator& L, double t_max, int n_steps)
{
    const UniformGrid grid(t_max, n_steps);
    const Matrix step = expm(L.matrix() * grid.dt());
    std::vector<Superoperator> maps{Superoperator::identity(L.dim())};
    std::vector<Superoperator> derivs{Superoperator::unchecked(L.dim(), L.matrix())};
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const Matrix m = step * maps.back().matrix();
        maps.push_back(Superoperator::unchecked(L.dim(), m));
        derivs.push_back(Superoperator::unchecked(L.dim(), L.matrix() * m));
    }
    return dyn::MapTrajectory(grid, std::move(maps), std::move(derivs));
}

inline Superoperator damped_qubit_generator(double omega, double rate)
{
    const Matrix H = 0.5 * omega * pauli::z() + 0.2 * pauli::x();
    return hamiltonian_superop(H) + lindblad_dissipator(pauli::minus()) * Complex(rate);
}

} // namespace tpf::testing
