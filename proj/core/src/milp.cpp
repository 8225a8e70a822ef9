#include "druc/lp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <queue>
#include <stdexcept>
#include <vector>

// Branch and bound over LP relaxations: most-fractional branching,
// best-bound node selection, optional incumbent seeding.

namespace druc::lp {

namespace {

constexpr double kIntTol = 1e-6;

struct Node {
    double bound;
    std::vector<double> lo, up;  // bounds for integral variables only
    bool operator<(const Node& o) const { return bound > o.bound; }  // min-heap
};

// Solve the LP with integral variables confined to the node's bounds.
SolveResult solve_node(const LinearProgram& base, const std::vector<int>& int_vars,
                       const std::vector<double>& lo, const std::vector<double>& up) {
    LinearProgram lp = base;
    for (size_t k = 0; k < int_vars.size(); ++k) {
        lp.vars[int_vars[k]].lower = lo[k];
        lp.vars[int_vars[k]].upper = up[k];
        lp.vars[int_vars[k]].integral = false;
    }
    for (auto& v : lp.vars) v.integral = false;
    return solve_lp(lp);
}

int most_fractional(const std::vector<int>& int_vars, const std::vector<double>& x) {
    int best = -1;
    double best_frac = kIntTol;
    for (size_t k = 0; k < int_vars.size(); ++k) {
        double v = x[int_vars[k]];
        double frac = std::abs(v - std::round(v));  // distance from nearest integer
        if (frac > best_frac) {
            best_frac = frac;
            best = static_cast<int>(k);
        }
    }
    return best;
}

// Evaluate an integral assignment: fix integral vars and solve the rest.
bool try_incumbent(const LinearProgram& base, const std::vector<int>& int_vars,
                   const std::vector<double>& int_vals, SolveResult& out) {
    LinearProgram lp = base;
    for (size_t k = 0; k < int_vars.size(); ++k) {
        double v = std::round(int_vals[k]);
        int j = int_vars[k];
        if (v < lp.vars[j].lower - kIntTol || v > lp.vars[j].upper + kIntTol) return false;
        lp.vars[j].lower = v;
        lp.vars[j].upper = v;
        lp.vars[j].integral = false;
    }
    for (auto& v : lp.vars) v.integral = false;
    SolveResult r = solve_lp(lp);
    if (r.status != SolveStatus::Optimal) return false;
    out = std::move(r);
    return true;
}

}  // namespace

SolveResult solve_milp(const LinearProgram& lp) { return solve_milp(lp, MilpOptions{}); }

SolveResult solve_milp(const LinearProgram& lp, const MilpOptions& opts) {
    std::vector<int> int_vars;
    for (int j = 0; j < lp.num_vars(); ++j)
        if (lp.vars[j].integral) int_vars.push_back(j);
    if (int_vars.empty()) return solve_lp(lp);

    SolveResult incumbent;
    incumbent.status = SolveStatus::Infeasible;
    double best_obj = opts.cutoff;
    bool have_incumbent = false;
    if (!opts.hint.empty()) {
        std::vector<double> vals(int_vars.size());
        for (size_t k = 0; k < int_vars.size(); ++k) vals[k] = opts.hint[int_vars[k]];
        SolveResult r;
        if (try_incumbent(lp, int_vars, vals, r) && r.objective < best_obj) {
            best_obj = r.objective;
            incumbent = std::move(r);
            have_incumbent = true;
        }
    }

    Node root;
    root.lo.resize(int_vars.size());
    root.up.resize(int_vars.size());
    for (size_t k = 0; k < int_vars.size(); ++k) {
        root.lo[k] = lp.vars[int_vars[k]].lower;
        root.up[k] = lp.vars[int_vars[k]].upper;
    }
    {
        SolveResult r = solve_node(lp, int_vars, root.lo, root.up);
        if (r.status == SolveStatus::Infeasible) {
            if (have_incumbent) {
                incumbent.status = SolveStatus::Optimal;
                incumbent.bound = incumbent.objective;
                incumbent.duals.clear();
                return incumbent;
            }
            return r;
        }
        if (r.status == SolveStatus::Unbounded) return r;
        if (r.status == SolveStatus::IterationLimit) {
            SolveResult lim = have_incumbent ? incumbent : r;
            lim.status = SolveStatus::IterationLimit;
            lim.bound = -kInf;
            return lim;
        }
        root.bound = r.objective;
        int br = most_fractional(int_vars, r.x);
        if (br < 0) {
            r.duals.clear();
            return r;  // relaxation already integral
        }
        // Rounding heuristic at the root.
        SolveResult h;
        std::vector<double> vals(int_vars.size());
        for (size_t k = 0; k < int_vars.size(); ++k) vals[k] = std::round(r.x[int_vars[k]]);
        if (try_incumbent(lp, int_vars, vals, h) && h.objective < best_obj) {
            best_obj = h.objective;
            incumbent = std::move(h);
            have_incumbent = true;
        }
    }

    std::priority_queue<Node> open;
    open.push(std::move(root));
    long nodes = 0;
    bool hit_limit = false;
    const double prune_eps = 1e-9;

    double lowest_pruned = kInf;
    auto prune_cutoff = [&] {
        return best_obj - std::max(prune_eps, opts.rel_gap * std::abs(best_obj));
    };
    while (!open.empty()) {
        Node node = open.top();
        open.pop();
        if (have_incumbent && node.bound >= prune_cutoff()) {
            lowest_pruned = std::min(lowest_pruned, node.bound);
            continue;
        }
        if (++nodes > opts.node_limit) {
            hit_limit = true;
            lowest_pruned = std::min(lowest_pruned, node.bound);
            break;
        }
        SolveResult r = solve_node(lp, int_vars, node.lo, node.up);
        if (r.status != SolveStatus::Optimal) {
            // A node LP that stalls out gets dropped like an infeasible one,
            // but its subtree is only explored down to the parent bound, so
            // fold that into the proven bound.
            if (r.status == SolveStatus::IterationLimit)
                lowest_pruned = std::min(lowest_pruned, node.bound);
            continue;
        }
        if (have_incumbent && r.objective >= prune_cutoff()) {
            lowest_pruned = std::min(lowest_pruned, r.objective);
            continue;
        }
        int br = most_fractional(int_vars, r.x);
        if (br < 0) {
            if (!have_incumbent || r.objective < best_obj) {
                best_obj = r.objective;
                incumbent = std::move(r);
                have_incumbent = true;
            }
            continue;
        }
        if (nodes % 16 == 0) {
            SolveResult h;
            std::vector<double> vals(int_vars.size());
            for (size_t k = 0; k < int_vars.size(); ++k) vals[k] = std::round(r.x[int_vars[k]]);
            if (try_incumbent(lp, int_vars, vals, h) && h.objective < best_obj) {
                best_obj = h.objective;
                incumbent = std::move(h);
                have_incumbent = true;
            }
        }
        // Split at f with lo <= f < up so both children strictly shrink even
        // when solver noise pushes v marginally past an integer or a bound.
        double v = std::clamp(r.x[int_vars[br]], node.lo[br], node.up[br]);
        double f = std::clamp(std::floor(v), node.lo[br], node.up[br] - 1.0);
        Node down = node, up_node = node;
        down.up[br] = f;
        up_node.lo[br] = f + 1.0;
        down.bound = r.objective;
        up_node.bound = r.objective;
        open.push(std::move(down));
        open.push(std::move(up_node));
    }

    while (!open.empty()) {
        lowest_pruned = std::min(lowest_pruned, open.top().bound);
        open.pop();
    }
    if (!have_incumbent) {
        SolveResult r;
        r.status = hit_limit ? SolveStatus::IterationLimit : SolveStatus::Infeasible;
        return r;
    }
    incumbent.duals.clear();
    incumbent.status = hit_limit ? SolveStatus::IterationLimit : SolveStatus::Optimal;
    incumbent.bound = std::min(best_obj, lowest_pruned);
    if (std::getenv("DRUC_TIMING"))
        std::fprintf(stderr, "  milp: %ld nodes, obj %.6g bound %.6g\n", nodes, incumbent.objective,
                     incumbent.bound);
    return incumbent;
}

}  // namespace druc::lp
