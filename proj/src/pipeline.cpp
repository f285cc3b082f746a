// pipeline.cpp: trajectory-level thermodynamic reports and consistency checks

#include "tpf/pipeline.hpp"

#include <algorithm>
#include <cmath>

namespace tpf::pipeline {

std::vector<tpms::FluctuationReport> lambda_series(const dyn::MapTrajectory& traj, const thermo::PathAnalysis& a,
                                                   double beta)
{
    std::vector<tpms::FluctuationReport> rows;
    rows.reserve(a.n_valid);
    for (std::size_t i = 0; i < a.n_valid; ++i) {
        rows.push_back(tpms::fluctuation_report(traj.time(i), beta, traj.map(i), a.K.front(), a.K[i], a.path[i]));
    }
    return rows;
}

double balance_residual(const thermo::WorkHeat& wh, const thermo::PathAnalysis& a)
{
    double worst = 0.0;
    for (std::size_t i = 0; i < wh.work.size(); ++i) {
        const Matrix lhs = wh.work.ops[i].matrix() + wh.heat.ops[i].matrix() - wh.work.initial[i].matrix()
                           - wh.heat.initial[i].matrix();
        const Matrix rhs = a.K[i].matrix() - a.K.front().matrix();
        worst = std::max(worst, max_abs(lhs - rhs));
    }
    return worst;
}

double gauge_spread(const dyn::MapTrajectory& traj, const thermo::ObservableSeries& series,
                    const std::vector<HermitianOperator>& shifts, const std::vector<DensityMatrix>& states)
{
    std::vector<thermo::ObservableSeries> shifted;
    for (const auto& s : shifts) shifted.push_back(thermo::shifted_observable(series, traj, s));
    double worst = 0.0;
    for (std::size_t i = 0; i < series.size(); ++i) {
        for (const auto& rho : states) {
            const double ref = thermo::mean_change(series, traj, i, rho);
            for (const auto& sh : shifted) worst = std::max(worst, std::abs(thermo::mean_change(sh, traj, i, rho) - ref));
        }
    }
    return worst;
}

} // namespace tpf::pipeline
