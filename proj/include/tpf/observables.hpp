// observables.hpp: path operator, work/heat observables, observable shifts and
// the coherent-initial-state construction

#pragma once

#include <optional>
#include <span>
#include <vector>

#include "tpf/dynamics.hpp"
#include "tpf/linalg.hpp"

namespace tpf::thermo {

enum class SeriesLabel { internal_energy, work, heat, custom };

// O_x(t_i) on the grid together with the initial observable paired with each target
// time. The pairing is per target time because the single-measure-initial
// convention fixes O_x(0) from the final time.
struct ObservableSeries {
    SeriesLabel label = SeriesLabel::custom;
    std::vector<double> times;
    std::vector<HermitianOperator> ops;
    std::vector<HermitianOperator> initial;

    std::size_t size() const { return ops.size(); }
};

struct PathOptions {
    double condition_threshold = kDefaultConditionThreshold;
    dyn::Stencil stencil = dyn::Stencil::central4;
};

// Everything the thermodynamic pipeline needs from a trajectory, evaluated on the
// grid prefix [0, n_valid). When a map exceeds the condition threshold the prefix
// stops there and singular_time records where; nothing is interpolated across it.
struct PathAnalysis {
    std::vector<double> times;
    std::size_t n_valid = 0;
    std::optional<double> singular_time;
    std::optional<double> singular_condition;

    std::vector<double> condition;                // cond(Phi_t)
    std::vector<Superoperator> generators;        // L_t
    std::vector<Superoperator> dissipators;       // D_t = L_t + i[K_t, .]
    std::vector<Superoperator> inverse_adjoint;   // (Phi_t^{-1})^dag
    std::vector<HermitianOperator> K;             // energy observable (effective Hamiltonian)
    std::vector<HermitianOperator> path;          // path operator P(t)
};

// K_t from the minimal-dissipation split of the extracted generator.
PathAnalysis analyze_path(const dyn::MapTrajectory& traj, const PathOptions& options = {});

// Caller-supplied energy observable per grid point; the dissipator is then
// L_t + i[K_t, .] with that K_t.
PathAnalysis analyze_path(const dyn::MapTrajectory& traj, std::span<const HermitianOperator> K_series,
                          const PathOptions& options = {});

// P(t_i) = int_0^{t_i} Phi_{tau,t}^dag D_tau^dag [K(tau)] dtau. Throws SingularMap if
// any map on [0, t_i] exceeds the threshold.
HermitianOperator path_operator(const dyn::MapTrajectory& traj, const ObservableSeries& K_series, std::size_t i_t,
                                const PathOptions& options = {});

enum class Convention { two_point_energy_first, single_measure_final, single_measure_initial };

struct WorkHeat {
    ObservableSeries work;
    ObservableSeries heat;
};

// two_point_energy_first: O_w(t) = K(t) - P(t), O_w(0) = K(0); O_q(t) = P(t), O_q(0) = 0.
// single_measure_final:   O_w(0) = O_q(0) = 0 with the compensating shift at t.
// single_measure_initial: O_w(t) = O_q(t) = 0 with the initial observables fixed
//                         by the final time, O_x(0) -> O_x(0) - Phi_t^dag[O_x(t)].
WorkHeat work_heat_observables(const dyn::MapTrajectory& traj, const PathAnalysis& analysis,
                               Convention convention = Convention::two_point_energy_first);

// O'_x(t) = O_x(t) - (Phi_t^{-1})^dag [O_x(0) - O'_x(0)] with O'_x(0) = new_initial.
ObservableSeries shifted_observable(const ObservableSeries& series, const dyn::MapTrajectory& traj,
                                    const HermitianOperator& new_initial,
                                    double condition_threshold = kDefaultConditionThreshold);

// Delta X(t_i) = Tr{O_x(t_i) Phi_{t_i}[rho0]} - Tr{O_x(0) rho0}.
double mean_change(const ObservableSeries& series, const dyn::MapTrajectory& traj, std::size_t i,
                   const DensityMatrix& rho0);

// --- coherent initial states -------------------------------------------------

struct CoherentInitialData {
    double beta;
    HermitianOperator H_star;  // -(1/beta) ln rho0 - (1/beta) ln Z0
    HermitianOperator xi;      // H_star - H0
    double lambda_min_xi;
    double relative_entropy;   // S(rho0 || Gibbs(H0, beta)), diagnostic only
};

// Picks beta by matching Tr{H0 rho0} to the Gibbs energy (bisection in log beta on
// [1e-6, 1e6]). Throws NoMatchingBeta when no such beta exists.
CoherentInitialData coherent_initial_construction(const DensityMatrix& rho0, const HermitianOperator& H0);

struct CoherentWorkReport {
    double value;             // Tr{e^{-beta (H_t + U xi U^dag)}} / Z0
    double golden_thompson;   // Tr{e^{-beta H_t} e^{-beta U xi U^dag}} / Z0
    double chain_bound;       // (Z_t / Z0) e^{-beta lambda_min(xi)}
    double jarzynski_factor;  // Z_t / Z0 = e^{-beta dF}
    double delta_F_bar;
};

// Closed evolution supplied as the conjugation superoperator X -> U X U^dag.
CoherentWorkReport coherent_work_fluctuation(const CoherentInitialData& data, const Superoperator& unitary,
                                             const HermitianOperator& H_t);

// Work observables of the one-point scheme for a coherent initial state:
// O_w(0) = -(1/beta) ln rho0, O_w(t) = H_t - U (H0 - O_w(0)) U^dag.
struct CoherentObservables {
    HermitianOperator initial;
    HermitianOperator final;
};

CoherentObservables coherent_work_observables(const CoherentInitialData& data, const DensityMatrix& rho0,
                                              const HermitianOperator& H0, const Superoperator& unitary,
                                              const HermitianOperator& H_t);

} // namespace tpf::thermo
