// models.cpp: weak-coupling driven qubit and Jaynes-Cummings reduced maps

#include "tpf/models.hpp"

#include <array>
#include <cmath>
#include <sstream>

#include "tpf/errors.hpp"

namespace tpf::models {

double WeakCouplingParams::t_f() const
{
    return drive_mode == DriveMode::monotonic ? std::numbers::pi / (2.0 * Omega) : 2.0 * std::numbers::pi / Omega;
}

void WeakCouplingParams::validate() const
{
    if (!(gamma >= 0.0)) throw std::invalid_argument("weak coupling: gamma must be >= 0");
    if (!(beta > 0.0)) throw std::invalid_argument("weak coupling: beta must be > 0");
    if (!(Omega > 0.0)) throw std::invalid_argument("weak coupling: Omega must be > 0");
    if (!(omega0 > 0.0)) throw std::invalid_argument("weak coupling: omega0 must be > 0");
}

double bose_occupation(double beta, double omega)
{
    if (std::isinf(beta)) return 0.0;
    return 1.0 / std::expm1(beta * omega);
}

pc::PCRates weak_coupling_rates(const WeakCouplingParams& p)
{
    p.validate();
    const double n = bose_occupation(p.beta, p.omega0);
    const double gp = p.gamma * n;
    const double gm = p.gamma * (n + 1.0);
    const double gz = p.gamma_z;
    const double w0 = p.omega0, delta = p.delta, Om = p.Omega;
    return {
        [=](double t) {
            const double s = std::sin(Om * t);
            return w0 + delta * s * s;
        },
        [=](double) { return gp; },
        [=](double) { return gm; },
        [=](double) { return gz; },
    };
}

// --- Jaynes-Cummings ---------------------------------------------------------

ThermalWeights jc_thermal_weights(double beta, double omega_m, int n_max)
{
    if (!(omega_m > 0.0)) throw std::invalid_argument("mode frequency must be positive");
    const double q = std::isinf(beta) ? 0.0 : std::exp(-beta * omega_m);
    auto tail = [q](int m) { return std::pow(q, m + 1); };
    int required = 2;
    if (q > 0.0) required = std::max(2, static_cast<int>(std::ceil(std::log(1e-12) / std::log(q))) - 1);
    while (tail(required) > 1e-12) ++required;

    ThermalWeights w;
    if (n_max <= 0) {
        w.n_max = required;
    } else {
        if (n_max < 2) throw std::invalid_argument("n_max must be at least 2");
        if (tail(n_max) > 1e-10) {
            std::ostringstream msg;
            msg << "thermal tail beyond n_max = " << n_max << " is " << tail(n_max) << "; need n_max >= " << required;
            throw TruncationError(required, msg.str());
        }
        w.n_max = n_max;
    }
    w.tail = tail(w.n_max);
    w.p.resize(static_cast<std::size_t>(w.n_max) + 1);
    double pn = 1.0 - q, total = 0.0;
    for (auto& x : w.p) {
        x = pn;
        total += pn;
        pn *= q;
    }
    for (auto& x : w.p) x /= total;
    return w;
}

namespace {

using Block = Eigen::Matrix2cd;

// Excitation block n spans {|e,n>, |g,n+1>}.
Block block_hamiltonian(const JCParams& p, int n)
{
    const double g = p.g * std::sqrt(n + 1.0);
    Block h;
    h << 0.5 * p.omega + n * p.omega_m, g, g, -0.5 * p.omega + (n + 1) * p.omega_m;
    return h;
}

Block block_unitary(const JCParams& p, int n, double t)
{
    const double e0 = (n + 0.5) * p.omega_m;
    const double det = 0.5 * (p.omega - p.omega_m);
    const double g = p.g * std::sqrt(n + 1.0);
    const double rabi = std::hypot(det, g);
    const double sinc = rabi > 0.0 ? std::sin(rabi * t) / rabi : t;
    const Complex phase = std::exp(Complex(0.0, -e0 * t));
    const Complex cs = std::cos(rabi * t);
    const Complex mi(0.0, -1.0);
    Block u;
    u << cs + mi * sinc * det, mi * sinc * g, mi * sinc * g, cs - mi * sinc * det;
    return phase * u;
}

struct ReducedEntries {
    double ee_e = 0, ee_g = 0, gg_e = 0, gg_g = 0;
    Complex coh = 0;
};

Superoperator assemble(const ReducedEntries& r)
{
    Matrix s = Matrix::Zero(4, 4);
    s(0, 0) = r.ee_e;
    s(3, 0) = r.ee_g;
    s(0, 3) = r.gg_e;
    s(3, 3) = r.gg_g;
    s(2, 2) = r.coh;
    s(1, 1) = std::conj(r.coh);
    return Superoperator::unchecked(2, std::move(s));
}

} // namespace

dyn::MapTrajectory jc_reduced_map(const JCParams& p)
{
    const ThermalWeights w = jc_thermal_weights(p.beta, p.omega_m, p.n_max);
    const UniformGrid grid(p.t_max, p.n_steps);
    const int nb = w.n_max + 1;
    std::vector<Block> hs(nb);
    for (int n = 0; n < nb; ++n) hs[n] = block_hamiltonian(p, n);

    std::vector<Superoperator> maps, derivs;
    maps.reserve(grid.size());
    derivs.reserve(grid.size());
    const Complex mi(0.0, -1.0);
    std::vector<Block> u(nb), du(nb);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double t = grid.time(k);
        for (int n = 0; n < nb; ++n) {
            u[n] = block_unitary(p, n, t);
            du[n] = mi * hs[n] * u[n];
        }
        ReducedEntries val, dot;
        for (int n = 0; n < nb; ++n) {
            const double pn = w.p[n];
            const Complex A = u[n](0, 0), B = u[n](1, 0), dA = du[n](0, 0), dB = du[n](1, 0);
            Complex C = 0.0, D, dC = 0.0, dD;
            if (n == 0) {
                D = std::exp(Complex(0.0, 0.5 * p.omega * t));
                dD = Complex(0.0, 0.5 * p.omega) * D;
            } else {
                C = u[n - 1](0, 1);
                D = u[n - 1](1, 1);
                dC = du[n - 1](0, 1);
                dD = du[n - 1](1, 1);
            }
            val.ee_e += pn * std::norm(A);
            val.ee_g += pn * std::norm(B);
            val.gg_e += pn * std::norm(C);
            val.gg_g += pn * std::norm(D);
            val.coh += pn * A * std::conj(D);
            dot.ee_e += pn * 2.0 * std::real(std::conj(A) * dA);
            dot.ee_g += pn * 2.0 * std::real(std::conj(B) * dB);
            dot.gg_e += pn * 2.0 * std::real(std::conj(C) * dC);
            dot.gg_g += pn * 2.0 * std::real(std::conj(D) * dD);
            dot.coh += pn * (dA * std::conj(D) + A * std::conj(dD));
        }
        maps.push_back(assemble(val));
        derivs.push_back(assemble(dot));
    }
    return dyn::MapTrajectory(grid, std::move(maps), std::move(derivs));
}

Matrix jc_evolve_state(const JCParams& p, const Matrix& rho0, double t)
{
    const ThermalWeights w = jc_thermal_weights(p.beta, p.omega_m, p.n_max);
    const int m = w.n_max + 2;  // mode levels 0 .. n_max + 1
    const int dim = 2 * m;
    // index: qubit q (0 = e, 1 = g), mode n -> q * m + n
    Matrix h = Matrix::Zero(dim, dim);
    for (int n = 0; n < m; ++n) {
        h(n, n) = 0.5 * p.omega + n * p.omega_m;
        h(m + n, m + n) = -0.5 * p.omega + n * p.omega_m;
    }
    for (int n = 0; n + 1 < m; ++n) {
        const double g = p.g * std::sqrt(n + 1.0);
        h(n, m + n + 1) = g;  // sigma_+ a : |g, n+1> -> |e, n>
        h(m + n + 1, n) = g;
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    Vector phases(dim);
    for (int i = 0; i < dim; ++i) phases(i) = std::exp(Complex(0.0, -es.eigenvalues()(i) * t));
    const Matrix U = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();

    Matrix env = Matrix::Zero(m, m);
    for (int n = 0; n <= w.n_max; ++n) env(n, n) = w.p[n];
    const Matrix total = kron(rho0, env);
    const Matrix evolved = U * total * U.adjoint();
    Matrix out(2, 2);
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) out(a, b) = evolved.block(a * m, b * m, m, m).trace();
    }
    return out;
}

ExtractedRates jc_extract_pc(const dyn::MapTrajectory& traj, const dyn::GeneratorOptions& options)
{
    if (traj.dim() != 2) throw InvalidOperator("phase-covariant rate extraction needs a qubit trajectory");
    const std::array<Superoperator, 4> basis{hamiltonian_superop(0.5 * pauli::z()), lindblad_dissipator(pauli::plus()),
                                             lindblad_dissipator(pauli::minus()), lindblad_dissipator(pauli::z())};
    RealMatrix A(32, 4);
    for (int k = 0; k < 4; ++k) {
        const Matrix& m = basis[k].matrix();
        for (int e = 0; e < 16; ++e) {
            A(e, k) = m(e % 4, e / 4).real();
            A(16 + e, k) = m(e % 4, e / 4).imag();
        }
    }
    const auto qr = A.colPivHouseholderQr();

    ExtractedRates out;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 0; i < traj.size(); ++i) {
        out.times.push_back(traj.time(i));
        Superoperator gen = Superoperator::zero(2);
        try {
            gen = dyn::generator_at(traj, i, options);
        } catch (const SingularMap&) {
            out.omega.push_back(nan);
            out.gamma_plus.push_back(nan);
            out.gamma_minus.push_back(nan);
            out.gamma_z.push_back(nan);
            out.residual.push_back(nan);
            out.singular.push_back(true);
            continue;
        }
        RealVector b(32);
        for (int e = 0; e < 16; ++e) {
            b(e) = gen.matrix()(e % 4, e / 4).real();
            b(16 + e) = gen.matrix()(e % 4, e / 4).imag();
        }
        const RealVector x = qr.solve(b);
        out.omega.push_back(x(0));
        out.gamma_plus.push_back(x(1));
        out.gamma_minus.push_back(x(2));
        out.gamma_z.push_back(x(3));
        out.residual.push_back((A * x - b).norm());
        out.singular.push_back(false);
    }
    return out;
}

HermitianOperator closed_drive_hamiltonian(const ClosedDriveParams& p, double t)
{
    const double s = std::sin(p.Omega * t);
    const double w = p.omega0 + p.delta * s * s;
    return HermitianOperator(0.5 * w * pauli::z() + 0.5 * p.field_x * pauli::x());
}

ClosedDrive closed_drive(const ClosedDriveParams& p)
{
    const UniformGrid grid(p.t_max, p.n_steps);
    const double h = grid.dt();
    std::vector<Superoperator> maps, derivs;
    std::vector<Matrix> us;
    std::vector<HermitianOperator> hs;
    Matrix u = Matrix::Identity(2, 2);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        if (k > 0) {
            const auto eig = eig_hermitian(closed_drive_hamiltonian(p, grid.time(k) - 0.5 * h));
            Vector ph(2);
            for (int j = 0; j < 2; ++j) ph(j) = std::exp(Complex(0.0, -eig.values(j) * h));
            u = eig.vectors * ph.asDiagonal() * eig.vectors.adjoint() * u;
        }
        hs.push_back(closed_drive_hamiltonian(p, grid.time(k)));
        us.push_back(u);
        maps.push_back(unitary_conjugation(u));
        derivs.push_back(compose(hamiltonian_superop(hs.back().matrix()), maps.back()));
    }
    return {dyn::MapTrajectory(grid, std::move(maps), std::move(derivs)), std::move(us), std::move(hs)};
}

pc::RateSamples to_samples(const ExtractedRates& r)
{
    return {r.omega, r.gamma_plus, r.gamma_minus, r.gamma_z};
}

} // namespace tpf::models
