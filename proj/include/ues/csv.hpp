#pragma once

// Trajectory CSV emission. Schema (fixed per major version):
//   t, x_1..x_{Nd}, eta_1..eta_N, z_1..z_{Nd}, xstar_1..xstar_d, err_1..err_N
// Floating point is written with 17 significant digits for a lossless
// round-trip.

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

#include "ues/costs.hpp"
#include "ues/integrate.hpp"
#include "ues/metrics.hpp"

namespace ues {

inline std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string csv_header(int n_agents, int dim) {
    std::string h = "t";
    for (int i = 1; i <= n_agents * dim; ++i) h += ",x_" + std::to_string(i);
    for (int i = 1; i <= n_agents; ++i) h += ",eta_" + std::to_string(i);
    for (int i = 1; i <= n_agents * dim; ++i) h += ",z_" + std::to_string(i);
    for (int i = 1; i <= dim; ++i) h += ",xstar_" + std::to_string(i);
    for (int i = 1; i <= n_agents; ++i) h += ",err_" + std::to_string(i);
    return h;
}

inline void write_trajectory_csv(const std::string& path, const SwarmTrajectory& traj,
                                 const CostModel& cost, const RunReport& report) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot open for writing: " + path);
    }
    out << csv_header(traj.n_agents, traj.dim) << "\n";
    for (std::size_t s = 0; s < traj.size(); ++s) {
        const SwarmState& st = traj.states[s];
        const Eigen::VectorXd xstar = cost.optimum(st.t);
        std::string line = format_g17(st.t);
        for (Eigen::Index i = 0; i < st.x.size(); ++i) line += "," + format_g17(st.x(i));
        for (Eigen::Index i = 0; i < st.eta.size(); ++i) line += "," + format_g17(st.eta(i));
        for (Eigen::Index i = 0; i < st.z.size(); ++i) line += "," + format_g17(st.z(i));
        for (Eigen::Index i = 0; i < xstar.size(); ++i) line += "," + format_g17(xstar(i));
        const Eigen::VectorXd& err = report.agent_errors[s];
        for (Eigen::Index i = 0; i < err.size(); ++i) line += "," + format_g17(err(i));
        out << line << "\n";
    }
}

}  // namespace ues
