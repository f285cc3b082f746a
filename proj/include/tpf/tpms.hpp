// tpms.hpp: two-point measurement statistics, correction factors and free energies

#pragma once

#include <string>
#include <vector>

#include "tpf/linalg.hpp"

namespace tpf::tpms {

// Outcomes x = o_m(t) - o_n(0), clustered and strictly increasing.
struct OutcomeDistribution {
    std::vector<double> outcomes;
    std::vector<double> probs;
    // ||rho0 - sum_n P_n rho0 P_n||_F in the eigenbasis of the first observable.
    // Above 1e-9 the first measurement destroys coherences and the mean of the
    // distribution need not equal Tr{O_t rho_t} - Tr{O_0 rho0}.
    double coherence_norm = 0.0;
    bool coherence_warning = false;
};

// p(n, m) = Tr{Q_m Phi[P_n rho0 P_n]} with P_n, Q_m the spectral projectors of O0
// and Ot (degenerate eigenvalues grouped into one projector). Outcomes closer than
// cluster_tol * max(1, spectral range) are merged.
OutcomeDistribution tpms_distribution(const DensityMatrix& rho0, const Superoperator& map_t,
                                      const HermitianOperator& O0, const HermitianOperator& Ot,
                                      double cluster_tol = 1e-9);

double exp_average(const OutcomeDistribution& dist, double beta);
double moment(const OutcomeDistribution& dist, int k);

struct LambdaU {
    double direct;         // Tr{rho_G(t) Phi[I]}
    double adjoint;        // Tr{Phi^dag[rho_G(t)]}
    double mixed_overlap;  // d Tr{rho_G(t) Phi[I/d]}
    double bound;          // lambda_max(Phi[I])
};

// Internal-energy correction factor with the instantaneous Gibbs state of K_t.
LambdaU lambda_u(const Superoperator& map_t, const HermitianOperator& K_t, double beta);

struct FactorWithBound {
    double value;
    double bound;
};

// Tr{e^{-beta O_w} Phi[I]} / Tr{e^{-beta K_t}} and e^{beta lambda_max(P)} lambda_max(Phi[I]).
FactorWithBound lambda_w(const Superoperator& map_t, const HermitianOperator& Ow_t, const HermitianOperator& K_t,
                         const HermitianOperator& P_t, double beta);

// Tr{e^{-beta P} Phi[rho0]} and e^{-beta lambda_min(P)}.
FactorWithBound heat_fluctuation(const DensityMatrix& rho0, const Superoperator& map_t, const HermitianOperator& P_t,
                                 double beta);

struct FreeEnergies {
    double log_Z0;
    double log_Zt;
    double delta_F_bar;  // -(1/beta) ln(Zt / Z0)
};

FreeEnergies free_energies(const HermitianOperator& K_t, const HermitianOperator& K_0, double beta);

// Tr{K rho} - S(rho)/beta with 0 ln 0 = 0.
double noneq_free_energy(const DensityMatrix& rho, const HermitianOperator& K, double beta);

// Lower bound on <w> - dF: -lambda_max(P) - (1/beta) ln lambda_max(Phi[I]).
double dissipated_work_bound(const HermitianOperator& P_t, const Superoperator& map_t, double beta);

struct FluctuationReport {
    double t = 0.0;
    double beta = 0.0;
    double lambda_u = 1.0;
    double lambda_w = 1.0;
    double lambda_w_bound = 1.0;
    double exp_avg_w = 1.0;
    double exp_avg_q = 1.0;
    double delta_F_bar = 0.0;
    double mean_w = 0.0;
    double dissipated_bound = 0.0;
};

// Report for an initial Gibbs state of K_0 at the same beta, with the
// two-point-energy-first work observable O_w = K_t - P_t.
FluctuationReport fluctuation_report(double t, double beta, const Superoperator& map_t, const HermitianOperator& K_0,
                                     const HermitianOperator& K_t, const HermitianOperator& P_t);

std::string report_csv_header();
std::string report_csv_row(const FluctuationReport& r);

} // namespace tpf::tpms
