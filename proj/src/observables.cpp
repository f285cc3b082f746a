// observables.cpp: path operator, work/heat observables and coherent-state constructions

#include "tpf/observables.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tpf/errors.hpp"
#include "tpf/quadrature.hpp"

namespace tpf::thermo {

namespace {

Matrix hermitian_part(const Matrix& m)
{
    return 0.5 * (m + m.adjoint());
}

// Back-propagated operators lose Hermiticity at the level of eps * cond.
double back_propagation_tol(double cond)
{
    return std::max(1e-9, 1e-14 * cond);
}

std::size_t valid_prefix(const dyn::MapTrajectory& traj, const PathOptions& options, PathAnalysis& out)
{
    out.times = traj.grid().times();
    out.condition.resize(traj.size());
    std::size_t n_valid = traj.size();
    for (std::size_t i = 0; i < traj.size(); ++i) {
        out.condition[i] = condition_number(traj.map(i));
        if (n_valid == traj.size() && !(out.condition[i] <= options.condition_threshold)) {
            n_valid = i;
            out.singular_time = traj.time(i);
            out.singular_condition = out.condition[i];
        }
    }
    return n_valid;
}

PathAnalysis analyze(const dyn::MapTrajectory& traj, std::span<const HermitianOperator> K_series,
                     const PathOptions& options)
{
    PathAnalysis out;
    const std::size_t n = valid_prefix(traj, options, out);
    out.n_valid = n;
    const bool supplied = !K_series.empty();
    if (supplied && K_series.size() < n) throw std::invalid_argument("energy series shorter than the grid");

    std::vector<Matrix> integrand;
    integrand.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto inv = invert(traj.map(i), options.condition_threshold, traj.time(i));
        const Superoperator gen = compose(dyn::map_derivative(traj, i, options.stencil), inv.inverse);
        if (supplied) {
            out.K.push_back(K_series[i]);
            out.dissipators.push_back(gen - hamiltonian_superop(K_series[i].matrix()));
        } else {
            auto split = dyn::minimal_dissipation_split(gen, traj.time(i));
            out.K.push_back(split.K);
            out.dissipators.push_back(std::move(split.dissipator));
        }
        out.generators.push_back(gen);
        out.inverse_adjoint.push_back(hs_adjoint(inv.inverse));

        // Phi_tau^dag D_tau^dag [K(tau)]; the common (Phi_t^{-1})^dag is applied after integration.
        const Matrix flow = tpf::apply(hs_adjoint(out.dissipators.back()), out.K.back().matrix());
        integrand.push_back(hermitian_part(tpf::apply(hs_adjoint(traj.map(i)), flow)));
    }
    if (n == 0) return out;

    const std::vector<Matrix> cumulative = cumulative_simpson<Matrix>(std::span<const Matrix>(integrand), traj.grid().dt());
    out.path.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const HermitianOperator g(hermitian_part(cumulative[i]));
        out.path.push_back(apply_hermitian(out.inverse_adjoint[i], g, back_propagation_tol(out.condition[i])));
    }
    return out;
}

ObservableSeries make_series(SeriesLabel label, const PathAnalysis& a)
{
    ObservableSeries s;
    s.label = label;
    s.times.assign(a.times.begin(), a.times.begin() + static_cast<std::ptrdiff_t>(a.n_valid));
    return s;
}

} // namespace

PathAnalysis analyze_path(const dyn::MapTrajectory& traj, const PathOptions& options)
{
    return analyze(traj, {}, options);
}

PathAnalysis analyze_path(const dyn::MapTrajectory& traj, std::span<const HermitianOperator> K_series,
                          const PathOptions& options)
{
    if (K_series.size() != traj.size()) throw std::invalid_argument("energy series must cover the grid");
    return analyze(traj, K_series, options);
}

HermitianOperator path_operator(const dyn::MapTrajectory& traj, const ObservableSeries& K_series, std::size_t i_t,
                                const PathOptions& options)
{
    if (i_t >= traj.size()) throw std::out_of_range("target index outside the grid");
    const PathAnalysis a = K_series.ops.empty() ? analyze_path(traj, options) : analyze_path(traj, K_series.ops, options);
    if (i_t >= a.n_valid) {
        std::ostringstream msg;
        msg << "integration window [0, " << traj.time(i_t) << "] contains a singular map at t = " << *a.singular_time;
        throw SingularMap(*a.singular_condition, a.singular_time, msg.str());
    }
    return a.path[i_t];
}

WorkHeat work_heat_observables(const dyn::MapTrajectory& traj, const PathAnalysis& a, Convention convention)
{
    WorkHeat out{make_series(SeriesLabel::work, a), make_series(SeriesLabel::heat, a)};
    if (a.n_valid == 0) return out;
    const int d = traj.dim();
    const HermitianOperator zero = HermitianOperator::zero(d);
    const HermitianOperator& k0 = a.K.front();

    for (std::size_t i = 0; i < a.n_valid; ++i) {
        const HermitianOperator w = a.K[i] - a.path[i];
        const HermitianOperator& q = a.path[i];
        const double tol = back_propagation_tol(a.condition[i]);
        switch (convention) {
        case Convention::two_point_energy_first:
            out.work.ops.push_back(w);
            out.work.initial.push_back(k0);
            out.heat.ops.push_back(q);
            out.heat.initial.push_back(zero);
            break;
        case Convention::single_measure_final:
            out.work.ops.push_back(w - apply_hermitian(a.inverse_adjoint[i], k0, tol));
            out.work.initial.push_back(zero);
            out.heat.ops.push_back(q);
            out.heat.initial.push_back(zero);
            break;
        case Convention::single_measure_initial: {
            const Superoperator adj = hs_adjoint(traj.map(i));
            out.work.ops.push_back(zero);
            out.work.initial.push_back(k0 - apply_hermitian(adj, w, 1e-9));
            out.heat.ops.push_back(zero);
            out.heat.initial.push_back(zero - apply_hermitian(adj, q, 1e-9));
            break;
        }
        }
    }
    return out;
}

ObservableSeries shifted_observable(const ObservableSeries& series, const dyn::MapTrajectory& traj,
                                    const HermitianOperator& new_initial, double condition_threshold)
{
    ObservableSeries out;
    out.label = series.label;
    out.times = series.times;
    for (std::size_t i = 0; i < series.size(); ++i) {
        const auto inv = invert(traj.map(i), condition_threshold, traj.time(i));
        const HermitianOperator delta = series.initial[i] - new_initial;
        out.ops.push_back(series.ops[i] - apply_hermitian(hs_adjoint(inv.inverse), delta,
                                                          back_propagation_tol(inv.condition_number)));
        out.initial.push_back(new_initial);
    }
    return out;
}

double mean_change(const ObservableSeries& series, const dyn::MapTrajectory& traj, std::size_t i,
                   const DensityMatrix& rho0)
{
    const Matrix rho_t = tpf::apply(traj.map(i), rho0.matrix());
    return series.ops.at(i).expectation(rho_t) - series.initial.at(i).expectation(rho0.matrix());
}

// --- coherent initial states -------------------------------------------------

namespace {

double gibbs_energy(const EigenDecomposition& eig, double beta)
{
    const double lo = eig.values.minCoeff();
    double z = 0.0, e = 0.0;
    for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
        const double w = std::exp(-beta * (eig.values(i) - lo));
        z += w;
        e += w * eig.values(i);
    }
    return e / z;
}

} // namespace

CoherentInitialData coherent_initial_construction(const DensityMatrix& rho0, const HermitianOperator& H0)
{
    constexpr double lo_bracket = 1e-6;
    constexpr double hi_bracket = 1e6;
    const int d = H0.dim();
    const auto eig = eig_hermitian(H0);
    const double energy = H0.expectation(rho0.matrix());
    const double e_inf = H0.trace() / d;
    const double e_min = eig.values.minCoeff();
    const double scale = std::max(1.0, eig.values.cwiseAbs().maxCoeff());

    if (!(energy < e_inf - 1e-14 * scale) || !(energy > e_min + 1e-14 * scale)) {
        std::ostringstream msg;
        msg << "state energy " << energy << " is outside the open interval (" << e_min << ", " << e_inf
            << ") reachable by Gibbs states with beta > 0";
        throw NoMatchingBeta(lo_bracket, hi_bracket, msg.str());
    }
    if (gibbs_energy(eig, lo_bracket) < energy || gibbs_energy(eig, hi_bracket) > energy) {
        std::ostringstream msg;
        msg << "energy-matching beta lies outside [" << lo_bracket << ", " << hi_bracket << "]";
        throw NoMatchingBeta(lo_bracket, hi_bracket, msg.str());
    }

    double lo = lo_bracket, hi = hi_bracket;
    while (hi / lo - 1.0 > 1e-10) {
        const double mid = std::sqrt(lo * hi);
        if (gibbs_energy(eig, mid) > energy) lo = mid;
        else hi = mid;
    }
    const double beta = std::sqrt(lo * hi);

    const double log_z0 = log_partition(H0, beta);
    const HermitianOperator log_rho = log_hermitian(rho0.as_operator());
    const HermitianOperator h_star = (log_rho + HermitianOperator::identity(d) * log_z0) * (-1.0 / beta);
    const HermitianOperator xi = h_star - H0;

    const double s_rho = log_rho.expectation(rho0.matrix());
    const double rel = s_rho + beta * energy + log_z0;

    return {beta, h_star, xi, lambda_min(xi), rel};
}

CoherentWorkReport coherent_work_fluctuation(const CoherentInitialData& data, const Superoperator& unitary,
                                             const HermitianOperator& H_t)
{
    const double beta = data.beta;
    const HermitianOperator xi_t = apply_hermitian(unitary, data.xi, 1e-9);
    // Tr{e^{-beta H_star}} = Z0 by construction.
    const double log_z0 = log_partition(data.H_star, beta);
    const double log_zt = log_partition(H_t, beta);

    const double value = std::exp(log_partition(H_t + xi_t, beta) - log_z0);
    const Matrix a = exp_hermitian(H_t, -beta).matrix();
    const Matrix b = exp_hermitian(xi_t, -beta).matrix();
    const double gt = (a * b).trace().real() / std::exp(log_z0);
    const double jf = std::exp(log_zt - log_z0);
    const double chain = jf * std::exp(-beta * data.lambda_min_xi);
    return {value, gt, chain, jf, -(log_zt - log_z0) / beta};
}

CoherentObservables coherent_work_observables(const CoherentInitialData& data, const DensityMatrix& rho0,
                                              const HermitianOperator& H0, const Superoperator& unitary,
                                              const HermitianOperator& H_t)
{
    const HermitianOperator initial = log_hermitian(rho0.as_operator()) * (-1.0 / data.beta);
    const HermitianOperator final = H_t - apply_hermitian(unitary, H0 - initial, 1e-9);
    return {initial, final};
}

} // namespace tpf::thermo
