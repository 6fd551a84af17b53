#ifndef BIVIRUS_CSV_HPP
#define BIVIRUS_CSV_HPP

#include <ostream>
#include <string>

#include "bivirus/dynamics.hpp"

namespace bivirus {

/// Shortest representation that round-trips the value, capped at 12
/// significant digits. All CSV output goes through this formatter so that
/// identical runs produce byte-identical files.
std::string format_double(double x);

/// Header "t,x1_1..x1_n,x2_1..x2_n" plus one row per stored sample.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj, int n);

} // namespace bivirus

#endif
