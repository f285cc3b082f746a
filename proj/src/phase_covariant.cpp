// phase_covariant.cpp: phase-covariant qubit map coefficients and closed-form thermodynamics

#include "tpf/phase_covariant.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "tpf/errors.hpp"

namespace tpf::pc {

namespace {

std::vector<double> eval(const TimeFunction& f, const UniformGrid& grid)
{
    std::vector<double> out(grid.size(), 0.0);
    if (!f) return out;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(grid.time(i));
    return out;
}

// c_n = e^{-I_n} int_0^{t_n} f e^{I}, with the same Simpson weights as
// cumulative_simpson but every term rescaled by e^{I_k - I_n}.
std::vector<double> scaled_cumulative(const std::vector<double>& f, const std::vector<double>& I, double h)
{
    const std::size_t n = f.size();
    std::vector<double> c(n, 0.0);
    if (n < 2) return c;
    auto s = [&](std::size_t k, std::size_t ref) { return f[k] * std::exp(I[k] - I[ref]); };
    if (n == 2) {
        c[1] = 0.5 * h * (s(0, 1) + s(1, 1));
        return c;
    }
    c[1] = h / 12.0 * (5.0 * s(0, 1) + 8.0 * s(1, 1) - s(2, 1));
    double even = 0.0;
    for (std::size_t k = 2; k < n; ++k) {
        if (k % 2 == 0) {
            even = even * std::exp(I[k - 2] - I[k]) + h / 3.0 * (s(k - 2, k) + 4.0 * s(k - 1, k) + s(k, k));
            c[k] = even;
        } else {
            c[k] = even * std::exp(I[k - 1] - I[k]) + h / 12.0 * (-s(k - 2, k) + 8.0 * s(k - 1, k) + 5.0 * s(k, k));
        }
    }
    return c;
}

double log_cosh(double x)
{
    const double ax = std::abs(x);
    return ax + std::log1p(std::exp(-2.0 * ax)) - std::log(2.0);
}

// Columns vec(I), vec(X), vec(Y), vec(Z).
const Matrix& pauli_columns()
{
    static const Matrix B = [] {
        Matrix b(4, 4);
        b.col(0) = vec(pauli::identity());
        b.col(1) = vec(pauli::x());
        b.col(2) = vec(pauli::y());
        b.col(3) = vec(pauli::z());
        return b;
    }();
    return B;
}

template <typename T>
T central4(const std::vector<T>& f, double h, std::size_t i)
{
    const std::size_t n = f.size();
    if (n < 5) throw BoundaryStencil("fourth-order stencil needs at least 5 grid points");
    const double s = 1.0 / (12.0 * h);
    if (i == 0) return T((-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) * s);
    if (i == 1) return T((-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) * s);
    if (i == n - 2) {
        return T((3.0 * f[n - 1] + 10.0 * f[n - 2] - 18.0 * f[n - 3] + 6.0 * f[n - 4] - f[n - 5]) * s);
    }
    if (i == n - 1) {
        return T((25.0 * f[n - 1] - 48.0 * f[n - 2] + 36.0 * f[n - 3] - 16.0 * f[n - 4] + 3.0 * f[n - 5]) * s);
    }
    return T((f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) * s);
}

} // namespace

RateSamples sample(const PCRates& rates, const UniformGrid& grid)
{
    return {eval(rates.omega, grid), eval(rates.gamma_plus, grid), eval(rates.gamma_minus, grid),
            eval(rates.gamma_z, grid)};
}

PCMapCoefficients pc_integrals(const RateSamples& r, const UniformGrid& grid)
{
    const std::size_t n = grid.size();
    if (r.size() != n) throw std::invalid_argument("rate samples do not match the grid");
    const double h = grid.dt();
    std::vector<double> kappa(n), xi(n);
    for (std::size_t i = 0; i < n; ++i) {
        kappa[i] = r.gamma_plus[i] + r.gamma_minus[i];
        xi[i] = r.gamma_plus[i] - r.gamma_minus[i];
    }
    PCMapCoefficients out;
    out.I = cumulative_simpson(kappa, h);
    out.theta = cumulative_simpson(r.omega, h);
    const std::vector<double> gz = cumulative_simpson(r.gamma_z, h);
    out.c = scaled_cumulative(xi, out.I, h);
    out.J.resize(n);
    out.a.resize(n);
    out.b.resize(n);
    out.d_par.resize(n);
    out.d_perp.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.d_par[i] = std::exp(-out.I[i]);
        out.J[i] = out.c[i] * std::exp(out.I[i]);
        out.d_perp[i] = std::exp(-0.5 * out.I[i] - 2.0 * gz[i]);
        out.a[i] = out.d_perp[i] * std::cos(out.theta[i]);
        out.b[i] = out.d_perp[i] * std::sin(out.theta[i]);
    }
    return out;
}

PCThermo pc_thermo(const PCMapCoefficients& cf, const RateSamples& r, const UniformGrid& grid)
{
    const std::size_t n = grid.size();
    const double h = grid.dt();
    std::vector<double> fa(n), fb(n), fc(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double kappa = r.gamma_plus[i] + r.gamma_minus[i];
        const double xi = r.gamma_plus[i] - r.gamma_minus[i];
        fa[i] = r.omega[i] * kappa * cf.c[i];
        fb[i] = r.omega[i] * kappa * cf.d_par[i];
        fc[i] = r.omega[i] * xi;
    }
    PCThermo th;
    th.T_A = cumulative_simpson(fa, h);
    th.T_B = cumulative_simpson(fb, h);
    th.T_C = cumulative_simpson(fc, h);
    th.P0.resize(n);
    th.P3.resize(n);
    th.W0.resize(n);
    th.W3.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        // J T_B = c T_B e^{I}; written through c to stay finite.
        th.P0[i] = 0.5 * (th.T_C[i] - th.T_A[i] + cf.c[i] * th.T_B[i] / cf.d_par[i]);
        th.P3[i] = -0.5 * th.T_B[i] / cf.d_par[i];
        th.W0[i] = -th.P0[i];
        th.W3[i] = 0.5 * r.omega[i] - th.P3[i];
    }
    return th;
}

PCSolution solve(const RateSamples& rates, const UniformGrid& grid)
{
    PCMapCoefficients cf = pc_integrals(rates, grid);
    PCThermo th = pc_thermo(cf, rates, grid);
    return {grid, rates, std::move(cf), std::move(th)};
}

PCSolution solve(const PCRates& rates, const UniformGrid& grid)
{
    return solve(sample(rates, grid), grid);
}

RealMatrix pauli_transfer(const PCMapCoefficients& cf, std::size_t i)
{
    RealMatrix R = RealMatrix::Zero(4, 4);
    R(0, 0) = 1.0;
    R(1, 1) = cf.a[i];
    R(1, 2) = -cf.b[i];
    R(2, 1) = cf.b[i];
    R(2, 2) = cf.a[i];
    R(3, 0) = cf.c[i];
    R(3, 3) = cf.d_par[i];
    return R;
}

Superoperator pauli_to_superop(const RealMatrix& R)
{
    if (R.rows() != 4 || R.cols() != 4) throw InvalidOperator("Pauli transfer matrix must be 4 x 4");
    const Matrix& B = pauli_columns();
    return Superoperator(2, B * R.cast<Complex>() * B.adjoint() / 2.0);
}

RealMatrix superop_to_pauli(const Superoperator& s)
{
    if (s.dim() != 2) throw InvalidOperator("Pauli transfer matrices are defined for qubits");
    const Matrix& B = pauli_columns();
    return (B.adjoint() * s.matrix() * B / 2.0).real();
}

Superoperator pc_map(const PCMapCoefficients& coeffs, std::size_t i)
{
    return pauli_to_superop(pauli_transfer(coeffs, i));
}

Superoperator pc_generator(double omega, double gamma_plus, double gamma_minus, double gamma_z)
{
    return hamiltonian_superop(0.5 * omega * pauli::z()) + lindblad_dissipator(pauli::plus()) * gamma_plus
           + lindblad_dissipator(pauli::minus()) * gamma_minus + lindblad_dissipator(pauli::z()) * gamma_z;
}

double off_structure_norm(const Superoperator& s)
{
    const Matrix& B = pauli_columns();
    const Matrix Rc = B.adjoint() * s.matrix() * B / 2.0;
    double worst = Rc.imag().cwiseAbs().maxCoeff();
    const RealMatrix R = Rc.real();
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            const bool allowed = (i == 0 && j == 0) || (i == 3 && (j == 0 || j == 3)) || ((i == 1 || i == 2) && (j == 1 || j == 2));
            if (!allowed) worst = std::max(worst, std::abs(R(i, j)));
        }
    }
    worst = std::max(worst, std::abs(R(1, 1) - R(2, 2)));
    worst = std::max(worst, std::abs(R(1, 2) + R(2, 1)));
    return worst;
}

dyn::MapTrajectory pc_trajectory(const PCSolution& sol)
{
    std::vector<Superoperator> maps, derivs;
    maps.reserve(sol.grid.size());
    derivs.reserve(sol.grid.size());
    for (std::size_t i = 0; i < sol.grid.size(); ++i) {
        maps.push_back(pc_map(sol.coeffs, i));
        const Superoperator gen = pc_generator(sol.rates.omega[i], sol.rates.gamma_plus[i], sol.rates.gamma_minus[i],
                                               sol.rates.gamma_z[i]);
        derivs.push_back(compose(gen, maps.back()));
    }
    return dyn::MapTrajectory(sol.grid, std::move(maps), std::move(derivs));
}

ClosedForm closed_form(const PCSolution& sol, double beta, std::size_t i)
{
    const auto& cf = sol.coeffs;
    const auto& th = sol.thermo;
    const double w_t = sol.rates.omega[i];
    const double w_0 = sol.rates.omega[0];
    const double c = cf.c[i];

    ClosedForm out;
    out.lambda_w = std::exp(-beta * th.W0[i] - log_cosh(0.5 * beta * w_t))
                   * (std::cosh(beta * th.W3[i]) - c * std::sinh(beta * th.W3[i]));
    out.lambda_w_bound = (1.0 + std::abs(c)) * std::exp(beta * (th.P0[i] + std::abs(th.P3[i])));
    out.lambda_u = 1.0 - c * std::tanh(0.5 * beta * w_t);
    const double vz = std::tanh(-0.5 * beta * w_0);
    out.mean_w = (vz * cf.d_par[i] + c) * th.W3[i] + th.W0[i] - 0.5 * w_0 * vz;
    out.delta_F_bar = (-log_cosh(0.5 * beta * w_t) + log_cosh(0.5 * beta * w_0)) / beta;
    out.dissipated_bound = -th.P0[i] - std::abs(th.P3[i]) - std::log1p(std::abs(c)) / beta;
    return out;
}

// --- general dimension -------------------------------------------------------

PCGeneralTrajectory extract_general(const dyn::MapTrajectory& traj)
{
    const int d = traj.dim();
    PCGeneralTrajectory out{traj.grid(), {}, {}};
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const Matrix& S = traj.map(i).matrix();
        RealMatrix F(d, d);
        Matrix f = Matrix::Ones(d, d);
        for (int j = 0; j < d; ++j) {
            for (int k = 0; k < d; ++k) {
                F(j, k) = S(j + j * d, k + k * d).real();
                if (j != k) f(j, k) = S(j + k * d, j + k * d);
            }
        }
        out.F.push_back(F);
        out.f.push_back(f);
    }
    return out;
}

PCGeneralResult pc_general_d(const PCGeneralTrajectory& traj, double threshold)
{
    const std::size_t n = traj.F.size();
    if (n != traj.grid.size() || traj.f.size() != n) throw std::invalid_argument("coefficient series do not match the grid");
    const Eigen::Index d = traj.F.front().rows();
    const double h = traj.grid.dt();

    PCGeneralResult out;
    std::vector<RealVector> flow;
    flow.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Matrix fdot = central4(traj.f, h, i);
        RealVector k = RealVector::Zero(d);
        for (Eigen::Index j = 0; j < d; ++j) {
            for (Eigen::Index l = 0; l < d; ++l) {
                if (l != j) k(j) -= std::imag(fdot(j, l) / traj.f[i](j, l));
            }
        }
        k /= static_cast<double>(d);
        const RealMatrix Fdot = central4(traj.F, h, i);
        flow.push_back(Fdot.transpose() * k);
        out.k.push_back(std::move(k));
    }
    const std::vector<RealVector> G = cumulative_simpson<RealVector>(std::span<const RealVector>(flow), h);
    for (std::size_t i = 0; i < n; ++i) {
        Eigen::JacobiSVD<RealMatrix> svd(traj.F[i], Eigen::ComputeFullU | Eigen::ComputeFullV);
        const double smin = svd.singularValues()(d - 1);
        if (!(smin > 0.0)) {
            std::ostringstream msg;
            msg << "population map is singular at t = " << traj.grid.time(i);
            throw SingularMap(std::numeric_limits<double>::infinity(), traj.grid.time(i), msg.str());
        }
        out.F_inverse_norm.push_back(1.0 / smin);
        out.flagged.push_back(1.0 / smin > threshold);
        // q = F(t)^{-T} G(t)
        RealVector q = svd.matrixU() * (svd.singularValues().cwiseInverse().asDiagonal() * (svd.matrixV().transpose() * G[i]));
        out.w.push_back(out.k[i] - q);
        out.q.push_back(std::move(q));
    }
    return out;
}

} // namespace tpf::pc
