#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "druc/ambiguity.hpp"
#include "druc/uc_model.hpp"

namespace druc {

// One aggregated optimality cut, tangent to R at the generating iterate.
struct BendersCut {
    std::vector<double> x;      // relaxed (u, v) iterate, u-major then v-major
    double mu = 0.0;
    double zeta = 0.0;
    std::vector<double> alpha;  // gradient w.r.t. x (zero on the v block)
    double beta = 0.0;          // gradient w.r.t. zeta
    double gamma = 0.0;         // gradient w.r.t. mu
    double value = 0.0;         // R(x, zeta, mu)
};

struct BendersOptions {
    double tol = 1e-4;          // relative UB/LB gap
    int max_iters = 500;
    double k_max = 50.0;        // guard: Q_max - mu <= k_max * zeta
    int jobs = 1;               // parallel scenario subproblem solves
    // Restore the published variants of the cut formulas for side-by-side
    // comparison; both default to the internally consistent forms.
    bool printed_alpha = false;    // multiply the x-gradient by zeta_f
    bool printed_pairing = false;  // pair beta with (mu - mu_j) and vice versa
    // Anchor cuts at the master's raw (mu, zeta) iterate instead of the
    // subproblem-side dual optimum. At corner iterates the raw anchoring
    // emits e^{K-1} coefficients near the exponent cap, which double
    // precision LP solves cannot digest; off by default.
    bool cut_at_mp_iterate = false;
    std::string dump_dir;          // write LP-format model dumps when non-empty
};

struct TraceRow {
    int iter = 0;
    double lb = 0.0;
    double ub = 0.0;
    double gap = 0.0;
    double zeta = 0.0;
    double mu = 0.0;
};

struct BendersResult {
    CommitmentSchedule schedule;  // incumbent attaining the best upper bound
    double total_cost = 0.0;
    double gap = 0.0;
    int iterations = 0;
    bool converged = false;
    std::vector<TraceRow> trace;
    std::vector<BendersCut> cuts;
    double q_max = 0.0;
    std::vector<double> q_at_solution;  // per-scenario recourse at the incumbent
};

// Iteration-cap exhaustion, with the partial run attached for diagnosis.
struct ConvergenceError : std::runtime_error {
    BendersResult partial;
    ConvergenceError(const std::string& what, BendersResult r)
        : std::runtime_error(what), partial(std::move(r)) {}
};

// R(x, zeta, mu) = sum_w pi_w * zeta * e^{(Q_w - mu)/zeta - 1} given the
// per-scenario recourse values Q_w.
double eval_R(const std::vector<double>& q, const std::vector<double>& probs, double mu,
              double zeta);

// Evaluate a cut's affine minorant at a point.
double eval_cut(const BendersCut& cut, const std::vector<double>& x, double mu, double zeta,
                bool printed_pairing = false);

// Per-scenario recourse values of a schedule across the ambiguity support.
std::vector<double> scenario_costs(const SystemConfig& cfg, const CommitmentSchedule& x,
                                   const NominalDistribution& nom, int jobs = 1);

BendersResult run_benders(const SystemConfig& cfg, const AmbiguitySet& amb,
                          const BendersOptions& opts = {});

void write_trace_csv(const std::vector<TraceRow>& trace, const std::string& path);

}  // namespace druc
