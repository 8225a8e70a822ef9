#pragma once

#include <string>
#include <vector>

#include "druc/ambiguity.hpp"
#include "druc/lp.hpp"

namespace druc {

struct ThermalUnit {
    std::string name;
    double p_min = 0.0;         // MW
    double p_max = 0.0;         // MW
    int t_up = 1;               // minimum uptime, hours
    int t_down = 1;             // minimum downtime, hours
    double ramp_up = 0.0;       // MW/h while on
    double ramp_down = 0.0;     // MW/h while on
    double startup_ramp = 0.0;  // MW limit in the start-up hour
    double shutdown_ramp = 0.0; // MW limit in the shut-down hour
    double cost_linear = 0.0;   // $/MWh
    double cost_fixed = 0.0;    // $/h committed
    double cost_startup = 0.0;  // $ per start
    bool initial_on = false;
};

struct SystemConfig {
    std::vector<ThermalUnit> units;
    double curtailment_cost = 1000.0;  // $/MWh, must exceed every cost_linear
    int horizon = kHoursPerDay;
    // Restores the printed form of the shutdown-hour ramp limit (start-up
    // limit reused in the ramp-down constraint) instead of the standard one.
    bool ramp_down_uses_startup_limit = false;

    void validate() const;
    int num_units() const { return static_cast<int>(units.size()); }
};

struct CommitmentSchedule {
    std::vector<std::vector<int>> u;  // unit x hour, 0/1
    std::vector<std::vector<int>> v;  // unit x hour, 0/1
};

struct DispatchSolution {
    std::vector<std::vector<double>> p;  // unit x hour, MW
    std::vector<double> p_curtail;       // hour, MW
    std::vector<double> p_spill;         // hour, MW
    double cost = 0.0;
};

// First-stage feasible set over (u, v) binaries plus the commitment cost
// vector, as a MILP fragment the master problem extends.
struct FirstStageModel {
    lp::LinearProgram lp;
    int num_units = 0;
    int horizon = 0;
    int u_index(int g, int h) const { return g * horizon + h; }
    int v_index(int g, int h) const { return num_units * horizon + g * horizon + h; }
};

FirstStageModel build_first_stage(const SystemConfig& cfg);

// Commitment/start-up cost c.x of a schedule.
double first_stage_cost(const SystemConfig& cfg, const CommitmentSchedule& x);

// Minimum up/down-time feasibility of a u matrix.
bool schedule_feasible(const SystemConfig& cfg, const std::vector<std::vector<int>>& u);

// Start-up indicators implied by a u matrix.
CommitmentSchedule derive_schedule(const SystemConfig& cfg,
                                   const std::vector<std::vector<int>>& u);

// Second-stage dispatch LP with the commitment fixed (u enters bounds/rhs).
lp::LinearProgram build_second_stage(const SystemConfig& cfg, const CommitmentSchedule& x,
                                     const std::vector<double>& xi);

// Second-stage LP with a relaxed copy of the commitment vector, pinned to
// x_u by equality rows whose duals give d(cost)/d(x_u).
struct SecondStageCopyModel {
    lp::LinearProgram lp;
    std::vector<int> copy_rows;  // row of the pin for each (g, h), g-major
};
SecondStageCopyModel build_second_stage_copy(const SystemConfig& cfg,
                                             const std::vector<double>& x_u,
                                             const std::vector<double>& xi);

// Q(x, xi): optimal dispatch + curtailment cost for a fixed schedule.
double second_stage_cost(const SystemConfig& cfg, const CommitmentSchedule& x,
                         const std::vector<double>& xi);
DispatchSolution solve_dispatch(const SystemConfig& cfg, const CommitmentSchedule& x,
                                const std::vector<double>& xi);

struct OracleResult {
    CommitmentSchedule schedule;
    double total_cost = 0.0;
};

// Brute-force enumeration of all feasible commitments on tiny instances
// (<= 2 units, <= 6 hours, <= 3 scenarios). Ties go to the
// lexicographically smallest u.
OracleResult extensive_form_oracle(const SystemConfig& cfg, const AmbiguitySet& amb);

// Fleet config JSON (units array + curtailment_cost).
SystemConfig load_fleet_json(const std::string& path);
void save_fleet_json(const SystemConfig& cfg, const std::string& path);

// Built-in 3-unit fleet with 1083 MW aggregate capacity. The individual
// parameters are placeholders chosen for plausibility, not published data.
SystemConfig default_fleet();

}  // namespace druc
