// random.cpp: seeded random operators and CPTP trajectories

#include "tpf/random.hpp"

#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

namespace tpf::rnd {

Matrix ginibre(int rows, int cols, Engine& rng)
{
    std::normal_distribution<double> n(0.0, 1.0);
    Matrix m(rows, cols);
    for (int j = 0; j < cols; ++j) {
        for (int i = 0; i < rows; ++i) m(i, j) = Complex(n(rng), n(rng));
    }
    return m;
}

HermitianOperator random_hermitian(int d, Engine& rng, double scale)
{
    const Matrix g = ginibre(d, d, rng);
    return HermitianOperator(0.5 * scale * (g + g.adjoint()));
}

Matrix random_unitary(int d, Engine& rng)
{
    Eigen::HouseholderQR<Matrix> qr(ginibre(d, d, rng));
    Matrix q = qr.householderQ();
    const Matrix r = qr.matrixQR();
    for (int k = 0; k < d; ++k) q.col(k) *= std::polar(1.0, std::arg(r(k, k)));
    return q;
}

DensityMatrix random_density(int d, Engine& rng)
{
    const Matrix g = ginibre(d, d, rng);
    Matrix rho = g * g.adjoint();
    rho /= rho.trace().real();
    return DensityMatrix(0.5 * (rho + rho.adjoint()));
}

dyn::MapTrajectory random_trajectory(const TrajectorySpec& spec, std::uint64_t seed)
{
    Engine rng(seed);
    std::uniform_real_distribution<double> u(0.5, 1.5);
    const int d = spec.dim;
    const HermitianOperator h0 = random_hermitian(d, rng);
    const HermitianOperator h1 = random_hermitian(d, rng, 0.5);
    const double nu = u(rng);
    std::vector<Matrix> jumps;
    std::vector<double> rates, freqs;
    for (int k = 0; k < spec.n_channels; ++k) {
        Matrix l = ginibre(d, d, rng) / std::sqrt(2.0 * d);
        l -= (l.trace() / static_cast<double>(d)) * Matrix::Identity(d, d);
        jumps.push_back(l);
        rates.push_back(spec.rate_scale * u(rng));
        freqs.push_back(u(rng));
    }
    auto generator = [&](double t) {
        Matrix g = hamiltonian_superop(h0.matrix() + std::sin(nu * t) * h1.matrix()).matrix();
        for (int k = 0; k < spec.n_channels; ++k) {
            g += rates[k] * (1.0 + 0.5 * std::sin(freqs[k] * t)) * lindblad_dissipator(jumps[k]).matrix();
        }
        return g;
    };

    const UniformGrid grid(spec.t_max, spec.n_steps);
    const double h = grid.dt();
    std::vector<Superoperator> maps;
    Matrix phi = Matrix::Identity(d * d, d * d);
    maps.push_back(Superoperator::identity(d));
    for (std::size_t k = 1; k < grid.size(); ++k) {
        const Matrix step = (h * generator(grid.time(k) - 0.5 * h)).exp();
        phi = step * phi;
        maps.push_back(Superoperator(d, phi));
    }
    return dyn::MapTrajectory(grid, std::move(maps));
}

} // namespace tpf::rnd
