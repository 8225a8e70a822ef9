#include "druc/uc_model.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace druc {

namespace {

std::string var_name(const char* stem, int g, int h) {
    std::ostringstream os;
    os << stem << g << "_" << h;
    return os.str();
}

}  // namespace

void SystemConfig::validate() const {
    if (units.empty()) throw std::invalid_argument("config: at least one unit required");
    if (horizon < 1) throw std::invalid_argument("config: horizon must be >= 1");
    double max_linear = 0.0;
    for (const auto& g : units) {
        if (g.p_min < 0 || g.p_min > g.p_max)
            throw std::invalid_argument("unit " + g.name + ": need 0 <= p_min <= p_max");
        if (g.t_up < 1 || g.t_down < 1)
            throw std::invalid_argument("unit " + g.name + ": min up/down times must be >= 1");
        if (g.ramp_up < 0 || g.ramp_down < 0 || g.startup_ramp < 0 || g.shutdown_ramp < 0)
            throw std::invalid_argument("unit " + g.name + ": ramps must be nonnegative");
        if (g.startup_ramp < g.p_min)
            throw std::invalid_argument("unit " + g.name +
                                        ": startup_ramp < p_min makes starting infeasible");
        if (g.shutdown_ramp < g.p_min)
            throw std::invalid_argument("unit " + g.name +
                                        ": shutdown_ramp < p_min makes stopping infeasible");
        if (g.cost_linear < 0 || g.cost_fixed < 0 || g.cost_startup < 0)
            throw std::invalid_argument("unit " + g.name + ": costs must be nonnegative");
        max_linear = std::max(max_linear, g.cost_linear);
    }
    if (curtailment_cost <= max_linear)
        throw std::invalid_argument("curtailment_cost must exceed every unit's cost_linear");
}

FirstStageModel build_first_stage(const SystemConfig& cfg) {
    cfg.validate();
    const int G = cfg.num_units();
    const int H = cfg.horizon;
    FirstStageModel m;
    m.num_units = G;
    m.horizon = H;
    for (int g = 0; g < G; ++g)
        for (int h = 0; h < H; ++h)
            m.lp.add_var(0.0, 1.0, cfg.units[g].cost_fixed, true, var_name("u", g, h));
    for (int g = 0; g < G; ++g)
        for (int h = 0; h < H; ++h)
            // Startup indicators relax cleanly: v >= u_h - u_{h-1} with
            // nonnegative startup cost is 0/1 at any vertex once u is binary.
            m.lp.add_var(0.0, 1.0, cfg.units[g].cost_startup, false, var_name("v", g, h));

    for (int g = 0; g < G; ++g) {
        const auto& unit = cfg.units[g];
        const double u0 = unit.initial_on ? 1.0 : 0.0;
        for (int h = 0; h < H; ++h) {
            // v[h] >= u[h] - u[h-1]
            std::vector<std::pair<int, double>> link{{m.u_index(g, h), 1.0},
                                                     {m.v_index(g, h), -1.0}};
            double rhs = 0.0;
            if (h == 0)
                rhs = u0;
            else
                link.push_back({m.u_index(g, h - 1), -1.0});
            m.lp.add_row(std::move(link), lp::Sense::LE, rhs, var_name("start", g, h));

            // Min uptime: u[h] - u[h-1] <= u[tau]. tau = h is vacuous.
            for (int tau = h + 1; tau <= std::min(h + unit.t_up - 1, H - 1); ++tau) {
                std::vector<std::pair<int, double>> row{{m.u_index(g, h), 1.0},
                                                        {m.u_index(g, tau), -1.0}};
                double r = 0.0;
                if (h == 0)
                    r = u0;
                else
                    row.push_back({m.u_index(g, h - 1), -1.0});
                m.lp.add_row(std::move(row), lp::Sense::LE, r, var_name("upt", g, h));
            }
            // Min downtime: u[h-1] - u[h] <= 1 - u[tau]. tau = h is vacuous.
            for (int tau = h + 1; tau <= std::min(h + unit.t_down - 1, H - 1); ++tau) {
                std::vector<std::pair<int, double>> row{{m.u_index(g, h), -1.0},
                                                        {m.u_index(g, tau), 1.0}};
                double r = 1.0;
                if (h == 0)
                    r = 1.0 - u0;
                else
                    row.push_back({m.u_index(g, h - 1), 1.0});
                m.lp.add_row(std::move(row), lp::Sense::LE, r, var_name("dwt", g, h));
            }
        }
    }
    return m;
}

double first_stage_cost(const SystemConfig& cfg, const CommitmentSchedule& x) {
    double c = 0.0;
    for (int g = 0; g < cfg.num_units(); ++g)
        for (int h = 0; h < cfg.horizon; ++h)
            c += cfg.units[g].cost_fixed * x.u[g][h] + cfg.units[g].cost_startup * x.v[g][h];
    return c;
}

bool schedule_feasible(const SystemConfig& cfg, const std::vector<std::vector<int>>& u) {
    const int H = cfg.horizon;
    for (int g = 0; g < cfg.num_units(); ++g) {
        const auto& unit = cfg.units[g];
        int prev = unit.initial_on ? 1 : 0;
        for (int h = 0; h < H; ++h) {
            if (u[g][h] - prev > 0)
                for (int tau = h; tau <= std::min(h + unit.t_up - 1, H - 1); ++tau)
                    if (u[g][tau] != 1) return false;
            if (prev - u[g][h] > 0)
                for (int tau = h; tau <= std::min(h + unit.t_down - 1, H - 1); ++tau)
                    if (u[g][tau] != 0) return false;
            prev = u[g][h];
        }
    }
    return true;
}

CommitmentSchedule derive_schedule(const SystemConfig& cfg,
                                   const std::vector<std::vector<int>>& u) {
    CommitmentSchedule x;
    x.u = u;
    x.v.assign(u.size(), std::vector<int>(cfg.horizon, 0));
    for (int g = 0; g < cfg.num_units(); ++g) {
        int prev = cfg.units[g].initial_on ? 1 : 0;
        for (int h = 0; h < cfg.horizon; ++h) {
            x.v[g][h] = std::max(0, u[g][h] - prev);
            prev = u[g][h];
        }
    }
    return x;
}

namespace {

// Shared builder for the fixed and relaxed-copy dispatch LPs. When x_u is
// non-null the commitment enters through continuous copy variables pinned by
// equality rows; otherwise it is folded into bounds and right-hand sides.
struct SecondStageBuilder {
    const SystemConfig& cfg;
    const std::vector<double>& xi;
    lp::LinearProgram lp;
    std::vector<int> copy_rows;
    int G, H;
    std::vector<int> p_of, c_of, s_of, xu_of;

    SecondStageBuilder(const SystemConfig& c, const std::vector<double>& load)
        : cfg(c), xi(load), G(c.num_units()), H(c.horizon) {}

    int p(int g, int h) const { return p_of[g * H + h]; }

    void build(const CommitmentSchedule* sched, const std::vector<double>* x_u) {
        p_of.resize(G * H);
        for (int g = 0; g < G; ++g)
            for (int h = 0; h < H; ++h) {
                double lo = 0.0, hi = lp::kInf;
                if (sched) {
                    lo = sched->u[g][h] * cfg.units[g].p_min;
                    hi = sched->u[g][h] * cfg.units[g].p_max;
                }
                p_of[g * H + h] =
                    lp.add_var(lo, hi, cfg.units[g].cost_linear, false, var_name("p", g, h));
            }
        c_of.resize(H);
        s_of.resize(H);
        for (int h = 0; h < H; ++h) {
            c_of[h] = lp.add_var(0.0, lp::kInf, cfg.curtailment_cost, false, var_name("pc", 0, h));
            s_of[h] = lp.add_var(0.0, lp::kInf, 0.0, false, var_name("ps", 0, h));
        }
        if (x_u) {
            xu_of.resize(G * H);
            for (int g = 0; g < G; ++g)
                for (int h = 0; h < H; ++h)
                    xu_of[g * H + h] = lp.add_var(0.0, 1.0, 0.0, false, var_name("xu", g, h));
            // Output limits with the relaxed commitment.
            for (int g = 0; g < G; ++g)
                for (int h = 0; h < H; ++h) {
                    lp.add_row({{p(g, h), 1.0}, {xu_of[g * H + h], -cfg.units[g].p_min}},
                               lp::Sense::GE, 0.0);
                    lp.add_row({{p(g, h), 1.0}, {xu_of[g * H + h], -cfg.units[g].p_max}},
                               lp::Sense::LE, 0.0);
                }
        }

        for (int g = 0; g < G; ++g) {
            const auto& unit = cfg.units[g];
            const double u0 = unit.initial_on ? 1.0 : 0.0;
            const double p0 = unit.p_min * u0;
            const double dn_bar =
                cfg.ramp_down_uses_startup_limit ? unit.startup_ramp : unit.shutdown_ramp;
            for (int h = 0; h < H; ++h) {
                // p[h] - p[h-1] <= ramp_up u[h-1] + startup_ramp (1 - u[h-1])
                {
                    std::vector<std::pair<int, double>> row{{p(g, h), 1.0}};
                    double rhs = unit.startup_ramp;
                    if (h == 0) {
                        rhs += p0 + (unit.ramp_up - unit.startup_ramp) * u0;
                    } else {
                        row.push_back({p(g, h - 1), -1.0});
                        if (x_u)
                            row.push_back(
                                {xu_of[g * H + h - 1], unit.startup_ramp - unit.ramp_up});
                        else
                            rhs += (unit.ramp_up - unit.startup_ramp) * sched->u[g][h - 1];
                    }
                    lp.add_row(std::move(row), lp::Sense::LE, rhs, var_name("ru", g, h));
                }
                // p[h-1] - p[h] <= ramp_down u[h] + shutdown_ramp (1 - u[h])
                {
                    std::vector<std::pair<int, double>> row{{p(g, h), -1.0}};
                    double rhs = dn_bar;
                    if (h == 0)
                        rhs += -p0;
                    else
                        row.push_back({p(g, h - 1), 1.0});
                    if (x_u)
                        row.push_back({xu_of[g * H + h], dn_bar - unit.ramp_down});
                    else
                        rhs += (unit.ramp_down - dn_bar) * sched->u[g][h];
                    lp.add_row(std::move(row), lp::Sense::LE, rhs, var_name("rd", g, h));
                }
            }
        }

        for (int h = 0; h < H; ++h) {
            std::vector<std::pair<int, double>> row;
            for (int g = 0; g < G; ++g) row.push_back({p(g, h), 1.0});
            row.push_back({c_of[h], 1.0});
            row.push_back({s_of[h], -1.0});
            lp.add_row(std::move(row), lp::Sense::EQ, xi[h], var_name("bal", 0, h));
        }

        if (x_u) {
            copy_rows.resize(G * H);
            for (int g = 0; g < G; ++g)
                for (int h = 0; h < H; ++h)
                    copy_rows[g * H + h] = lp.add_row({{xu_of[g * H + h], 1.0}}, lp::Sense::EQ,
                                                      (*x_u)[g * H + h], var_name("copy", g, h));
        }
    }

};

SecondStageBuilder make_builder(const SystemConfig& cfg, const std::vector<double>& xi) {
    if (static_cast<int>(xi.size()) < cfg.horizon)
        throw std::invalid_argument("net load vector shorter than the horizon");
    return SecondStageBuilder(cfg, xi);
}

}  // namespace

lp::LinearProgram build_second_stage(const SystemConfig& cfg, const CommitmentSchedule& x,
                                     const std::vector<double>& xi) {
    auto b = make_builder(cfg, xi);
    b.build(&x, nullptr);
    return std::move(b.lp);
}

SecondStageCopyModel build_second_stage_copy(const SystemConfig& cfg,
                                             const std::vector<double>& x_u,
                                             const std::vector<double>& xi) {
    if (static_cast<int>(x_u.size()) != cfg.num_units() * cfg.horizon)
        throw std::invalid_argument("relaxed commitment vector has the wrong size");
    auto b = make_builder(cfg, xi);
    b.build(nullptr, &x_u);
    SecondStageCopyModel m;
    m.lp = std::move(b.lp);
    m.copy_rows = std::move(b.copy_rows);
    return m;
}

DispatchSolution solve_dispatch(const SystemConfig& cfg, const CommitmentSchedule& x,
                                const std::vector<double>& xi) {
    auto prog = build_second_stage(cfg, x, xi);
    auto res = lp::solve_lp(prog);
    if (res.status != lp::SolveStatus::Optimal)
        throw std::runtime_error("dispatch LP did not solve to optimality");
    const int G = cfg.num_units(), H = cfg.horizon;
    DispatchSolution d;
    d.p.assign(G, std::vector<double>(H));
    d.p_curtail.resize(H);
    d.p_spill.resize(H);
    for (int g = 0; g < G; ++g)
        for (int h = 0; h < H; ++h) d.p[g][h] = res.x[g * H + h];
    for (int h = 0; h < H; ++h) {
        d.p_curtail[h] = res.x[G * H + 2 * h];
        d.p_spill[h] = res.x[G * H + 2 * h + 1];
    }
    d.cost = res.objective;
    return d;
}

double second_stage_cost(const SystemConfig& cfg, const CommitmentSchedule& x,
                         const std::vector<double>& xi) {
    auto prog = build_second_stage(cfg, x, xi);
    auto res = lp::solve_lp(prog);
    if (res.status != lp::SolveStatus::Optimal)
        throw std::runtime_error("dispatch LP did not solve to optimality");
    return res.objective;
}

OracleResult extensive_form_oracle(const SystemConfig& cfg, const AmbiguitySet& amb) {
    cfg.validate();
    const int G = cfg.num_units();
    const int H = cfg.horizon;
    const int S = amb.nominal.size();
    if (G > 2 || H > 6 || S > 3)
        throw std::invalid_argument("oracle budget exceeded (need <= 2 units, 6 hours, 3 scenarios)");

    std::vector<std::vector<double>> loads(S, std::vector<double>(H));
    for (int w = 0; w < S; ++w)
        for (int h = 0; h < H; ++h) loads[w][h] = amb.nominal.support[w][h];

    const int bits = G * H;
    OracleResult best;
    best.total_cost = std::numeric_limits<double>::infinity();
    std::vector<std::vector<int>> u(G, std::vector<int>(H));
    for (long code = 0; code < (1L << bits); ++code) {
        // Most significant bit is (g=0, h=0) so the scan order is
        // lexicographic over the flattened u matrix.
        for (int b = 0; b < bits; ++b) u[b / H][b % H] = int((code >> (bits - 1 - b)) & 1);
        if (!schedule_feasible(cfg, u)) continue;
        auto x = derive_schedule(cfg, u);
        std::vector<double> q(S);
        for (int w = 0; w < S; ++w) q[w] = second_stage_cost(cfg, x, loads[w]);
        double total = first_stage_cost(cfg, x) + worst_case_expectation(q, amb).value;
        if (total < best.total_cost - 1e-9) {
            best.total_cost = total;
            best.schedule = x;
        }
    }
    return best;
}

SystemConfig load_fleet_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open fleet config: " + path);
    nlohmann::json j;
    in >> j;
    SystemConfig cfg;
    cfg.curtailment_cost = j.value("curtailment_cost", 1000.0);
    cfg.horizon = j.value("horizon", int(kHoursPerDay));
    cfg.ramp_down_uses_startup_limit = j.value("ramp_down_uses_startup_limit", false);
    for (const auto& ju : j.at("units")) {
        ThermalUnit u;
        u.name = ju.value("name", "");
        u.p_min = ju.at("p_min").get<double>();
        u.p_max = ju.at("p_max").get<double>();
        u.t_up = ju.at("t_up").get<int>();
        u.t_down = ju.at("t_down").get<int>();
        u.ramp_up = ju.at("ramp_up").get<double>();
        u.ramp_down = ju.at("ramp_down").get<double>();
        u.startup_ramp = ju.at("startup_ramp").get<double>();
        u.shutdown_ramp = ju.at("shutdown_ramp").get<double>();
        u.cost_linear = ju.at("cost_linear").get<double>();
        u.cost_fixed = ju.at("cost_fixed").get<double>();
        u.cost_startup = ju.at("cost_startup").get<double>();
        u.initial_on = ju.value("initial_on", false);
        cfg.units.push_back(u);
    }
    cfg.validate();
    return cfg;
}

void save_fleet_json(const SystemConfig& cfg, const std::string& path) {
    nlohmann::json j;
    j["curtailment_cost"] = cfg.curtailment_cost;
    j["horizon"] = cfg.horizon;
    j["ramp_down_uses_startup_limit"] = cfg.ramp_down_uses_startup_limit;
    j["units"] = nlohmann::json::array();
    for (const auto& u : cfg.units) {
        nlohmann::json ju;
        ju["name"] = u.name;
        ju["p_min"] = u.p_min;
        ju["p_max"] = u.p_max;
        ju["t_up"] = u.t_up;
        ju["t_down"] = u.t_down;
        ju["ramp_up"] = u.ramp_up;
        ju["ramp_down"] = u.ramp_down;
        ju["startup_ramp"] = u.startup_ramp;
        ju["shutdown_ramp"] = u.shutdown_ramp;
        ju["cost_linear"] = u.cost_linear;
        ju["cost_fixed"] = u.cost_fixed;
        ju["cost_startup"] = u.cost_startup;
        ju["initial_on"] = u.initial_on;
        j["units"].push_back(ju);
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write fleet config: " + path);
    out << j.dump(2) << "\n";
}

SystemConfig default_fleet() {
    SystemConfig cfg;
    cfg.curtailment_cost = 1000.0;
    cfg.units = {
        {"base", 150.0, 600.0, 3, 3, 300.0, 300.0, 300.0, 300.0, 12.0, 300.0, 1500.0, true},
        {"mid", 80.0, 333.0, 2, 2, 200.0, 200.0, 200.0, 200.0, 25.0, 200.0, 800.0, false},
        {"peak", 20.0, 150.0, 1, 1, 150.0, 150.0, 150.0, 150.0, 45.0, 80.0, 250.0, false},
    };
    return cfg;
}

}  // namespace druc
