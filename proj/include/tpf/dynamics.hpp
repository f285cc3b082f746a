// dynamics.hpp: dynamical-map trajectories, time-local generators and the
// minimal-dissipation split into effective Hamiltonian plus dissipator

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "tpf/linalg.hpp"
#include "tpf/quadrature.hpp"

namespace tpf::dyn {

enum class DerivativeSource { analytic, finite_difference };

// central2: second-order central differences, second-order one-sided at the ends.
// central4: fourth-order five-point stencils (interior and ends).
enum class Stencil { central2, central4 };

struct GeneratorOptions {
    double condition_threshold = kDefaultConditionThreshold;
    Stencil stencil = Stencil::central4;
};

// Dynamical maps Phi_t on a uniform grid starting at t = 0. maps[0] must be the
// identity (factorized initial conditions) and every map trace preserving.
class MapTrajectory {
public:
    MapTrajectory(UniformGrid grid, std::vector<Superoperator> maps);
    // derivatives[i] = d/dt Phi_t at t_i, supplied by the caller.
    MapTrajectory(UniformGrid grid, std::vector<Superoperator> maps, std::vector<Superoperator> derivatives);

    const UniformGrid& grid() const { return grid_; }
    int dim() const { return maps_.front().dim(); }
    std::size_t size() const { return maps_.size(); }
    double time(std::size_t i) const { return grid_.time(i); }

    const Superoperator& map(std::size_t i) const { return maps_.at(i); }
    std::span<const Superoperator> maps() const { return maps_; }

    DerivativeSource derivative_source() const
    {
        return derivatives_.empty() ? DerivativeSource::finite_difference : DerivativeSource::analytic;
    }
    const Superoperator& analytic_derivative(std::size_t i) const { return derivatives_.at(i); }

    // Same maps, derivatives left to finite differences.
    MapTrajectory without_derivatives() const { return MapTrajectory(grid_, maps_); }

private:
    void validate() const;

    UniformGrid grid_;
    std::vector<Superoperator> maps_;
    std::vector<Superoperator> derivatives_;
};

// d/dt Phi_t at grid index i: analytic when available, finite differences otherwise.
Superoperator map_derivative(const MapTrajectory& traj, std::size_t i, Stencil stencil = Stencil::central4);

// L_t = (d/dt Phi_t) o Phi_t^{-1}. Throws SingularMap or BoundaryStencil.
Superoperator generator_at(const MapTrajectory& traj, std::size_t i, const GeneratorOptions& options = {});

struct GeneratorSplit {
    HermitianOperator K;        // effective Hamiltonian, traceless
    Superoperator dissipator;   // D_t = L_t + i[K, .]
    double time;
};

// K = (1/2id) sum_jk [|j><k|, L(|k><j|)] in the computational basis. The input must be
// trace annihilating and Hermiticity preserving to 1e-8 (relative); otherwise
// InvalidOperator is thrown.
GeneratorSplit minimal_dissipation_split(const Superoperator& generator, double time = 0.0);

// Same sum evaluated in the orthonormal basis given by the columns of basis.
HermitianOperator effective_hamiltonian(const Superoperator& generator, const Matrix& basis);

// Diagnostic only: D = sum_k rate_k (L_k . L_k^dag - {L_k^dag L_k, .}/2) with
// traceless, Hilbert-Schmidt normalized L_k. Rates may be negative.
struct LindbladDecomposition {
    std::vector<double> rates;
    std::vector<Matrix> operators;
};

LindbladDecomposition lindblad_decomposition(const Superoperator& dissipator);

// Phi_{tau,t} = Phi_tau o Phi_t^{-1}, requires i_tau <= i_t.
Superoperator inverse_propagator(const MapTrajectory& traj, std::size_t i_tau, std::size_t i_t,
                                 double condition_threshold = kDefaultConditionThreshold);

struct InvertibilityOptions {
    double condition_threshold = kDefaultConditionThreshold;
    // A grid point is a spike when it is a local maximum of the condition number
    // exceeding spike_ratio times the condition number at both edges of a
    // +/- spike_window neighbourhood.
    double spike_ratio = 10.0;
    std::size_t spike_window = 0;  // 0: max(2, n / 50)
};

struct InvertibilityRow {
    double time;
    double condition_number;
    bool singular;
    bool spike;
};

std::vector<InvertibilityRow> invertibility_report(const MapTrajectory& traj,
                                                   const InvertibilityOptions& options = {});

// Index of the first grid point whose map exceeds the threshold, if any.
std::optional<std::size_t> first_singular_index(const MapTrajectory& traj,
                                                double condition_threshold = kDefaultConditionThreshold);

} // namespace tpf::dyn
