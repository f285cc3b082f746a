// phase_covariant.hpp: exact qubit engine for phase-covariant dynamics
//
// Generator: L_t = -i[omega(t) sigma_z / 2, .] + g+(t) D[sigma_+] + g-(t) D[sigma_-] + gz(t) D[sigma_z]
// with kappa = g+ + g-, xi = g+ - g-, I = int kappa, J = int xi e^{I}.
//
// Pauli transfer matrix, rows and columns ordered {I, X, Y, Z}:
//     [ 1  0   0   0    ]
//     [ 0  a  -b   0    ]      a = d_perp cos(theta), b = d_perp sin(theta), theta = int omega
//     [ 0  b   a   0    ]      d_perp = e^{-I/2 - 2 int gz}, d_par = e^{-I}, c = J e^{-I}
//     [ c  0   0   d_par]
// It converts to the column-stacked superoperator by S = B R B^dag / 2 where the
// columns of B are vec(I), vec(X), vec(Y), vec(Z).

#pragma once

#include <functional>
#include <vector>

#include "tpf/dynamics.hpp"
#include "tpf/linalg.hpp"
#include "tpf/quadrature.hpp"

namespace tpf::pc {

using TimeFunction = std::function<double(double)>;

struct PCRates {
    TimeFunction omega;
    TimeFunction gamma_plus;
    TimeFunction gamma_minus;
    TimeFunction gamma_z;
};

struct RateSamples {
    std::vector<double> omega;
    std::vector<double> gamma_plus;
    std::vector<double> gamma_minus;
    std::vector<double> gamma_z;

    std::size_t size() const { return omega.size(); }
};

RateSamples sample(const PCRates& rates, const UniformGrid& grid);

struct PCMapCoefficients {
    std::vector<double> a, b, c, d_par, d_perp, I, J, theta;
};

struct PCThermo {
    std::vector<double> T_A, T_B, T_C, P0, P3, W0, W3;
};

// Cumulative Simpson integrals on the grid. J is accumulated through the scaled
// quantity c = J e^{-I} so it never overflows.
PCMapCoefficients pc_integrals(const RateSamples& rates, const UniformGrid& grid);

// Path-operator components P = P0 I + P3 sigma_z and work components W0, W3.
PCThermo pc_thermo(const PCMapCoefficients& coeffs, const RateSamples& rates, const UniformGrid& grid);

struct PCSolution {
    UniformGrid grid;
    RateSamples rates;
    PCMapCoefficients coeffs;
    PCThermo thermo;
};

PCSolution solve(const RateSamples& rates, const UniformGrid& grid);
PCSolution solve(const PCRates& rates, const UniformGrid& grid);

RealMatrix pauli_transfer(const PCMapCoefficients& coeffs, std::size_t i);
Superoperator pauli_to_superop(const RealMatrix& R);
RealMatrix superop_to_pauli(const Superoperator& s);  // real part; imaginary residue is dropped

Superoperator pc_map(const PCMapCoefficients& coeffs, std::size_t i);
Superoperator pc_generator(double omega, double gamma_plus, double gamma_minus, double gamma_z);

// Largest |entry| of the transfer matrix outside the phase-covariant pattern.
double off_structure_norm(const Superoperator& s);

// Map trajectory with analytic derivatives Phi_dot = L_t Phi_t.
dyn::MapTrajectory pc_trajectory(const PCSolution& sol);

struct ClosedForm {
    double lambda_w;
    double lambda_w_bound;
    double lambda_u;
    double mean_w;
    double delta_F_bar;
    double dissipated_bound;  // -P0 - |P3| - (1/beta) ln(1 + |c|)
};

// Closed-form thermodynamics at grid index i for a Gibbs initial state at beta.
ClosedForm closed_form(const PCSolution& sol, double beta, std::size_t i);

// --- general dimension -------------------------------------------------------

// Phase-covariant map in the energy eigenbasis: populations p -> F p, coherences
// rho_jk -> f_jk rho_jk (j != k).
struct PCGeneralTrajectory {
    UniformGrid grid;
    std::vector<RealMatrix> F;
    std::vector<Matrix> f;
};

PCGeneralTrajectory extract_general(const dyn::MapTrajectory& traj);

struct PCGeneralResult {
    std::vector<RealVector> k;  // effective-Hamiltonian eigenvalues
    std::vector<RealVector> q;  // heat eigenvalues
    std::vector<RealVector> w;  // work eigenvalues, w = k - q
    std::vector<double> F_inverse_norm;
    std::vector<bool> flagged;  // ||F^{-1}(t)|| above the threshold
};

// Derivatives of F and f by fourth-order finite differences on the grid.
PCGeneralResult pc_general_d(const PCGeneralTrajectory& traj, double threshold = kDefaultConditionThreshold);

} // namespace tpf::pc
