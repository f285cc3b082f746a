// models.hpp: driven weak-coupling qubit and exact Jaynes-Cummings reduced dynamics

#pragma once

#include <limits>
#include <numbers>
#include <vector>

#include "tpf/dynamics.hpp"
#include "tpf/phase_covariant.hpp"

namespace tpf::models {

// --- driven qubit, weak coupling --------------------------------------------

enum class DriveMode { monotonic, periodic };

// omega(t) = omega0 + delta sin^2(Omega t); gamma_- = gamma (N + 1), gamma_+ = gamma N,
// N = 1 / (e^{beta omega(0)} - 1).
struct WeakCouplingParams {
    double omega0 = 1.0;
    double delta = 1.0;
    double Omega = std::numbers::pi / 20.0;
    double gamma = 0.01;
    double gamma_z = 0.0;
    double beta = 1.0;
    DriveMode drive_mode = DriveMode::monotonic;

    // pi / (2 Omega) for the monotonic ramp, 2 pi / Omega for one drive period.
    double t_f() const;
    void validate() const;
};

double bose_occupation(double beta, double omega);

pc::PCRates weak_coupling_rates(const WeakCouplingParams& p);

// --- Jaynes-Cummings ---------------------------------------------------------

// H = (omega/2) sigma_z + omega_m a^dag a + g (sigma_+ a + sigma_- a^dag), mode initially
// thermal at beta (beta = +inf for the vacuum).
struct JCParams {
    double omega = 1.0;
    double omega_m = 2.0;
    double g = 0.01;
    double beta = std::numeric_limits<double>::infinity();
    int n_max = 0;  // 0: smallest n_max with thermal tail <= 1e-12
    double t_max = 10.0;
    int n_steps = 1000;
};

struct ThermalWeights {
    std::vector<double> p;  // renormalized over n = 0 .. n_max
    double tail;            // weight discarded beyond n_max before renormalization
    int n_max;
};

// Throws TruncationError when an explicit n_max leaves a tail above 1e-10.
ThermalWeights jc_thermal_weights(double beta, double omega_m, int n_max);

// Reduced qubit maps on the grid with analytic time derivatives. Basis order
// (|e>, |g>) so that sigma_z = diag(1, -1).
dyn::MapTrajectory jc_reduced_map(const JCParams& p);

// Direct evolution of rho0 (x) thermal mode and partial trace, for cross-checks.
Matrix jc_evolve_state(const JCParams& p, const Matrix& rho0, double t);

struct ExtractedRates {
    std::vector<double> times;
    std::vector<double> omega;
    std::vector<double> gamma_plus;
    std::vector<double> gamma_minus;
    std::vector<double> gamma_z;
    std::vector<double> residual;  // Frobenius norm of the generator part outside the basis
    std::vector<bool> singular;    // generator unavailable (map above the condition threshold)
};

// Least-squares projection of the generator onto
// {-i[sigma_z/2, .], D[sigma_+], D[sigma_-], D[sigma_z]} at every grid point.
ExtractedRates jc_extract_pc(const dyn::MapTrajectory& traj, const dyn::GeneratorOptions& options = {});

// --- closed driven qubit -----------------------------------------------------

// H(t) = (omega(t)/2) sigma_z + (field_x/2) sigma_x with omega(t) = omega0 + delta sin^2(Omega t).
// The propagator is built from midpoint exponentials on the grid.
struct ClosedDriveParams {
    double omega0 = 1.0;
    double delta = 1.0;
    double Omega = std::numbers::pi / 20.0;
    double field_x = 0.0;
    double t_max = 10.0;
    int n_steps = 1000;
};

HermitianOperator closed_drive_hamiltonian(const ClosedDriveParams& p, double t);

struct ClosedDrive {
    dyn::MapTrajectory traj;            // conjugation by U_t, derivative -i[H(t), .] o Phi_t
    std::vector<Matrix> unitaries;
    std::vector<HermitianOperator> hamiltonians;
};

ClosedDrive closed_drive(const ClosedDriveParams& p);

// Rates in sample form, for rebuilding the map through the phase-covariant engine.
pc::RateSamples to_samples(const ExtractedRates& r);

} // namespace tpf::models
