#pragma once

#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace druc::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Sense { LE, EQ, GE };

enum class SolveStatus { Optimal, Infeasible, Unbounded, IterationLimit };

struct Variable {
    double lower = 0.0;
    double upper = kInf;
    double objective = 0.0;
    bool integral = false;
    std::string name;
};

struct Constraint {
    std::vector<std::pair<int, double>> terms;  // (variable index, coefficient)
    Sense sense = Sense::LE;
    double rhs = 0.0;
    std::string name;
};

// Minimization problem over bounded variables.
struct LinearProgram {
    std::vector<Variable> vars;
    std::vector<Constraint> rows;

    int add_var(double lower, double upper, double objective, bool integral = false,
                std::string name = {}) {
        vars.push_back({lower, upper, objective, integral, std::move(name)});
        return static_cast<int>(vars.size()) - 1;
    }

    int add_row(std::vector<std::pair<int, double>> terms, Sense sense, double rhs,
                std::string name = {}) {
        rows.push_back({std::move(terms), sense, rhs, std::move(name)});
        return static_cast<int>(rows.size()) - 1;
    }

    int num_vars() const { return static_cast<int>(vars.size()); }
    int num_rows() const { return static_cast<int>(rows.size()); }
    bool has_integers() const {
        for (const auto& v : vars)
            if (v.integral) return true;
        return false;
    }
};

struct SolveResult {
    SolveStatus status = SolveStatus::Infeasible;
    std::vector<double> x;
    double objective = 0.0;
    // Proven lower bound on the optimum. Equals objective for LP solves and
    // exact MILP solves; trails it by at most the gap tolerance otherwise.
    double bound = 0.0;
    // Per-row duals, sign convention dual = d(objective)/d(rhs). LP only.
    std::vector<double> duals;
};

// Primal simplex (bounded variables, two-phase). Ignores integrality flags
// unless the caller asserts there are none; solve_lp throws on integral vars.
SolveResult solve_lp(const LinearProgram& lp);

struct MilpOptions {
    // Known feasible objective value; nodes with bound >= cutoff are pruned.
    double cutoff = kInf;
    // Integral assignment to seed the incumbent (values for every variable,
    // only the integral entries are used). Ignored when empty or infeasible.
    std::vector<double> hint;
    long node_limit = 200000;
    // Accept incumbents within this relative optimality gap; 0 = exact.
    // The proven bound is reported in SolveResult::bound either way.
    double rel_gap = 0.0;
};

SolveResult solve_milp(const LinearProgram& lp);
SolveResult solve_milp(const LinearProgram& lp, const MilpOptions& opts);

// CPLEX LP-format text dump, for cross-checking against external solvers.
std::string to_lp_format(const LinearProgram& lp);

}  // namespace druc::lp
