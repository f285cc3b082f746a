// random.hpp: seeded random operators, states and CPTP trajectories for checks

#pragma once

#include <cstdint>
#include <random>

#include "tpf/dynamics.hpp"
#include "tpf/linalg.hpp"

namespace tpf::rnd {

using Engine = std::mt19937_64;

Matrix ginibre(int rows, int cols, Engine& rng);
HermitianOperator random_hermitian(int d, Engine& rng, double scale = 1.0);
Matrix random_unitary(int d, Engine& rng);
DensityMatrix random_density(int d, Engine& rng);

struct TrajectorySpec {
    int dim = 2;
    double t_max = 2.0;
    int n_steps = 200;
    double rate_scale = 0.2;
    int n_channels = 2;
};

// Time-dependent GKSL dynamics with a random Hamiltonian H0 + sin(nu t) H1 and
// random jump operators at modulated positive rates, propagated with midpoint
// exponentials. Every map is CPTP and invertible; derivatives are left to
// finite differences.
dyn::MapTrajectory random_trajectory(const TrajectorySpec& spec, std::uint64_t seed);

} // namespace tpf::rnd
