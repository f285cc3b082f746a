// io.hpp: text formats for map trajectories and observable series
//
// Map trajectory CSV:
//   # tpflux-map-trajectory v1
//   # dim=<d>
//   # convention=column-stacking
//   # n_times=<N+1>
//   t,re_0,im_0,re_1,im_1,...
//   <one row per grid time>
// Entry k is S(k mod d^2, k div d^2) of the d^2 x d^2 superoperator, i.e. the
// matrix flattened column-major. Times must form a uniform grid starting at 0.

#pragma once

#include <iosfwd>
#include <string>

#include "tpf/dynamics.hpp"
#include "tpf/observables.hpp"

namespace tpf::io {

// 17 significant digits, round-trip exact.
std::string format_number(double x);

void write_map_trajectory(std::ostream& os, const dyn::MapTrajectory& traj);
dyn::MapTrajectory read_map_trajectory(std::istream& is);
dyn::MapTrajectory read_map_trajectory_file(const std::string& path);

// Columns: t, eig_0 .. eig_{d-1}, then re/im of every entry (column-major).
void write_observable_series(std::ostream& os, const thermo::ObservableSeries& series);

} // namespace tpf::io
