// pipeline.hpp: trajectory-level thermodynamic reports and consistency checks

#pragma once

#include <vector>

#include "tpf/dynamics.hpp"
#include "tpf/observables.hpp"
#include "tpf/tpms.hpp"

namespace tpf::pipeline {

// One report per evaluated grid point (the valid prefix of the analysis), initial
// state Gibbs in K(0) at beta.
std::vector<tpms::FluctuationReport> lambda_series(const dyn::MapTrajectory& traj, const thermo::PathAnalysis& analysis,
                                                   double beta);

// max_i || O_w(t_i) + O_q(t_i) - O_w(0) - O_q(0) - (K(t_i) - K(0)) ||_max
double balance_residual(const thermo::WorkHeat& wh, const thermo::PathAnalysis& analysis);

// Largest change of Delta X(t_i) over all grid points, states and shifts when the
// series is re-gauged to each of the given initial observables.
double gauge_spread(const dyn::MapTrajectory& traj, const thermo::ObservableSeries& series,
                    const std::vector<HermitianOperator>& shifts, const std::vector<DensityMatrix>& states);

} // namespace tpf::pipeline
