#include "druc/benders.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace druc {

namespace {

constexpr double kZetaMin = 1e-8;

// Run fn(w) for w in [0, n) on up to `jobs` threads. Results must be written
// to preallocated slots so the reduction order stays deterministic.
void parallel_for(int n, int jobs, const std::function<void(int)>& fn) {
    if (jobs <= 1 || n <= 1) {
        for (int w = 0; w < n; ++w) fn(w);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr err;
    std::mutex err_mu;
    auto worker = [&] {
        try {
            for (int w = next.fetch_add(1); w < n; w = next.fetch_add(1)) fn(w);
        } catch (...) {
            std::lock_guard<std::mutex> lock(err_mu);
            if (!err) err = std::current_exception();
        }
    };
    std::vector<std::thread> pool;
    int threads = std::min(jobs, n);
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

std::vector<double> scenario_load(const NominalDistribution& nom, int w, int horizon) {
    std::vector<double> xi(horizon);
    for (int h = 0; h < horizon; ++h) xi[h] = nom.support[w][h];
    return xi;
}

void dump_model(const std::string& dir, const std::string& stem, const lp::LinearProgram& prog) {
    if (dir.empty()) return;
    std::filesystem::create_directories(dir);
    std::ofstream out(dir + "/" + stem + ".lp");
    out << lp::to_lp_format(prog);
}

CommitmentSchedule round_schedule(const std::vector<double>& x, int G, int H) {
    CommitmentSchedule s;
    s.u.assign(G, std::vector<int>(H));
    s.v.assign(G, std::vector<int>(H));
    for (int g = 0; g < G; ++g)
        for (int h = 0; h < H; ++h) {
            s.u[g][h] = x[g * H + h] > 0.5 ? 1 : 0;
            s.v[g][h] = x[G * H + g * H + h] > 0.5 ? 1 : 0;
        }
    return s;
}

// Worst-case distribution on the KL sphere. Along the exponential path
// p(zeta)_w ~ pi_w e^{q_w / zeta} the divergence KL(p(zeta) || pi) decreases
// monotonically in zeta, so the binding constraint KL = rho has a unique root
// and p(zeta*) maximizes p.q over the ball. The matching dual anchor is
// mu* = q_max + zeta (log Z - 1), where pi_w e^{(q_w - mu*)/zeta - 1} = p_w
// exactly, hence gamma = -1 at the anchor by construction.
struct KlWorstCase {
    std::vector<double> p;
    double value = 0.0;  // sum_w p_w q_w, the exact worst-case expectation
    double mu = 0.0;
    double zeta = 0.0;
};

KlWorstCase kl_worst_case(const std::vector<double>& q, const std::vector<double>& pi,
                          double rho) {
    const int S = static_cast<int>(q.size());
    const double qmax = *std::max_element(q.begin(), q.end());
    const double qmin = *std::min_element(q.begin(), q.end());
    const double scale = std::max(1.0, std::abs(qmax));

    KlWorstCase out;
    out.p.resize(S);
    // KL - rho at a given zeta, filling `out` as a side effect.
    auto eval = [&](double zeta) {
        double z = 0.0, pq = 0.0;
        for (int w = 0; w < S; ++w) {
            out.p[w] = pi[w] * std::exp((q[w] - qmax) / zeta);
            z += out.p[w];
        }
        for (int w = 0; w < S; ++w) {
            out.p[w] /= z;
            pq += out.p[w] * q[w];
        }
        out.value = pq;
        out.zeta = zeta;
        out.mu = qmax + zeta * (std::log(z) - 1.0);
        return (pq - qmax) / zeta - std::log(z) - rho;
    };

    // If the point mass on the top scenarios is inside the ball the maximum
    // is just the largest recourse value and the constraint never binds.
    double tie_mass = 0.0;
    for (int w = 0; w < S; ++w)
        if (q[w] >= qmax - 1e-12 * scale) tie_mass += pi[w];
    if (std::log(1.0 / tie_mass) <= rho) {
        for (int w = 0; w < S; ++w)
            out.p[w] = q[w] >= qmax - 1e-12 * scale ? pi[w] / tie_mass : 0.0;
        out.value = qmax;
        out.zeta = kZetaMin;
        out.mu = qmax;
        return out;
    }

    double hi = std::max(1.0, qmax - qmin);
    while (eval(hi) > 0.0) hi *= 2.0;
    double lo = hi;
    do lo *= 0.5;
    while (eval(lo) < 0.0);
    for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
        double mid = 0.5 * (lo + hi);
        (eval(mid) > 0.0 ? lo : hi) = mid;
    }
    eval(hi);  // leave `out` at the feasible endpoint (KL <= rho)
    return out;
}

}  // namespace

double eval_R(const std::vector<double>& q, const std::vector<double>& probs, double mu,
              double zeta) {
    double r = 0.0;
    for (size_t w = 0; w < q.size(); ++w)
        r += probs[w] * zeta * safe_exp((q[w] - mu) / zeta - 1.0);
    return r;
}

double eval_cut(const BendersCut& cut, const std::vector<double>& x, double mu, double zeta,
                bool printed_pairing) {
    double v = cut.value;
    for (size_t i = 0; i < x.size(); ++i) v += cut.alpha[i] * (x[i] - cut.x[i]);
    if (printed_pairing) {
        v += cut.beta * (mu - cut.mu) + cut.gamma * (zeta - cut.zeta);
    } else {
        v += cut.beta * (zeta - cut.zeta) + cut.gamma * (mu - cut.mu);
    }
    return v;
}

std::vector<double> scenario_costs(const SystemConfig& cfg, const CommitmentSchedule& x,
                                   const NominalDistribution& nom, int jobs) {
    std::vector<double> q(nom.size());
    parallel_for(nom.size(), jobs, [&](int w) {
        q[w] = second_stage_cost(cfg, x, scenario_load(nom, w, cfg.horizon));
    });
    return q;
}

BendersResult run_benders(const SystemConfig& cfg, const AmbiguitySet& amb,
                          const BendersOptions& opts) {
    cfg.validate();
    amb.nominal.validate();
    if (opts.tol <= 0.0) throw std::invalid_argument("tol must be positive");
    const int G = cfg.num_units();
    const int H = cfg.horizon;
    const int S = amb.nominal.size();
    const int nx = 2 * G * H;
    const bool robust = amb.rho > 0.0;
    // Default master: the worst-case recourse is modelled with (mu, zeta)
    // projected out, as max over worst-case distributions of the expected
    // recourse. Per-scenario epigraph variables th_w collect ordinary Benders
    // cuts th_w >= Q_w(x_j) + phi_w . (x - x_j), and each iterate's exact
    // worst-case distribution p*_j adds one row t >= sum_w p*_jw th_w. Both
    // layers underestimate, so t minorizes the worst case at every x, and the
    // scenario cuts are shared across all distribution rows. The explicit
    // (mu, zeta) master survives behind cut_at_mp_iterate.
    struct ScenarioCuts {
        std::vector<double> x;
        std::vector<double> q;
        std::vector<std::vector<double>> phi;
        int iter_created = 0;
        int last_active = 0;  // last iteration any of the S rows was binding
    };
    std::vector<ScenarioCuts> scen_cuts;
    std::vector<std::vector<double>> dists;  // worst-case distribution rows
    const bool projected = !opts.cut_at_mp_iterate;

    BendersResult res;

    // Initialize at x = 0: nothing committed, every scenario fully curtailed.
    CommitmentSchedule x0;
    x0.u.assign(G, std::vector<int>(H, 0));
    x0.v.assign(G, std::vector<int>(H, 0));
    std::vector<double> q0 = scenario_costs(cfg, x0, amb.nominal, opts.jobs);
    double q_max = *std::max_element(q0.begin(), q0.end());
    double q_min = *std::min_element(q0.begin(), q0.end());
    double zeta_max = std::max(1.0, 1000.0 * (q_max - q_min));

    // Finite ceilings for the epigraph columns: recourse can never beat full
    // curtailment plus the cost of running and dumping every unit flat out.
    // Finite bounds let the LP start them high, where no cut row is violated.
    double cap_extra = 1.0;
    for (const auto& un : cfg.units)
        cap_extra += (un.cost_linear + cfg.curtailment_cost) * un.p_max * H;
    std::vector<double> th_cap(S);
    for (int w = 0; w < S; ++w) th_cap[w] = q0[w] + cap_extra;
    double t_cap = *std::max_element(th_cap.begin(), th_cap.end());

    double lb = -lp::kInf;
    double ub = lp::kInf;
    int incumbent_iter = -1;
    bool relax_master = projected;
    double last_rel_obj = -lp::kInf;
    int rel_stall = 0;
    std::vector<double> mp_hint;
    bool warned_clamp = false;
    bool logged_lb_form = false;

    for (int iter = 1; iter <= opts.max_iters; ++iter) {
        // ---- Master problem ----
        auto fs = build_first_stage(cfg);
        lp::LinearProgram mp = fs.lp;
        int mu_col = -1, zeta_col = -1, theta_col = -1, t_col = -1;
        std::vector<int> th_cols;
        if (robust && !projected) {
            double mu_lo = -10.0 * std::max(1.0, std::abs(q_max));
            mu_col = mp.add_var(mu_lo, q_max, 1.0, false, "mu");
            zeta_col = mp.add_var(kZetaMin, zeta_max, amb.rho, false, "zeta");
            theta_col = mp.add_var(0.0, lp::kInf, 1.0, false, "theta");
            // Exponent guard q_max - mu <= k_max * zeta. Only sound together
            // with iterate-anchored cuts: with q_max taken at x = 0 it can
            // exclude the true dual optimum, so the default mode relies on
            // subproblem-side anchoring instead and keeps the box bounds only.
            if (opts.cut_at_mp_iterate)
                mp.add_row({{mu_col, 1.0}, {zeta_col, opts.k_max}}, lp::Sense::GE, q_max,
                           "guard");
        } else if (projected) {
            for (int w = 0; w < S; ++w)
                th_cols.push_back(
                    mp.add_var(0.0, th_cap[w], 0.0, false, "th" + std::to_string(w)));
            t_col = mp.add_var(0.0, t_cap, 1.0, false, "t");
        } else {
            theta_col = mp.add_var(0.0, lp::kInf, 1.0, false, "theta");
        }
        // Equilibrate cut rows to unit magnitude: recourse gradients run a few
        // orders above the commitment rows and unscaled mixes stall the
        // simplex on degenerate vertices.
        std::vector<std::pair<int, int>> scen_rows;  // (scen_cuts index, mp row)
        auto add_scaled_cut = [&mp](std::vector<std::pair<int, double>> row, double rhs) {
            double s = 0.0;
            for (const auto& [j, c] : row) s = std::max(s, std::abs(c));
            if (s > 1.0) {
                for (auto& [j, c] : row) c /= s;
                rhs /= s;
            }
            mp.add_row(std::move(row), lp::Sense::GE, rhs, "cut");
        };
        if (projected) {
            for (const auto& p : dists) {
                std::vector<std::pair<int, double>> row{{t_col, 1.0}};
                for (int w = 0; w < S; ++w)
                    if (p[w] != 0.0) row.push_back({th_cols[w], -p[w]});
                mp.add_row(std::move(row), lp::Sense::GE, 0.0, "dist");
            }
            for (size_t j = 0; j < scen_cuts.size(); ++j) {
                const auto& jc = scen_cuts[j];
                for (int w = 0; w < S; ++w) {
                    std::vector<std::pair<int, double>> row{{th_cols[w], 1.0}};
                    double rhs = jc.q[w];
                    double pmax = 0.0;
                    for (int i = 0; i < G * H; ++i) pmax = std::max(pmax, std::abs(jc.phi[w][i]));
                    for (int i = 0; i < G * H; ++i) {
                        // Dual roundoff noise only poisons the row scaling.
                        if (std::abs(jc.phi[w][i]) <= 1e-12 * pmax) continue;
                        row.push_back({i, -jc.phi[w][i]});
                        rhs -= jc.phi[w][i] * jc.x[i];
                    }
                    scen_rows.push_back({static_cast<int>(j), mp.num_rows()});
                    add_scaled_cut(std::move(row), rhs);
                }
            }
        } else {
            for (const auto& cut : res.cuts) {
                std::vector<std::pair<int, double>> row{{theta_col, 1.0}};
                double rhs = cut.value;
                for (int i = 0; i < nx; ++i) {
                    if (cut.alpha[i] == 0.0) continue;
                    row.push_back({i, -cut.alpha[i]});
                    rhs -= cut.alpha[i] * cut.x[i];
                }
                if (robust) {
                    double coef_zeta = opts.printed_pairing ? cut.gamma : cut.beta;
                    double coef_mu = opts.printed_pairing ? cut.beta : cut.gamma;
                    row.push_back({zeta_col, -coef_zeta});
                    row.push_back({mu_col, -coef_mu});
                    rhs -= coef_zeta * cut.zeta + coef_mu * cut.mu;
                }
                add_scaled_cut(std::move(row), rhs);
            }
        }
        dump_model(opts.dump_dir, "mp_" + std::to_string(iter), mp);

        auto t_mp = std::chrono::steady_clock::now();
        lp::SolveResult mr;
        bool relaxed_iter = relax_master;
        if (relax_master) {
            // Relaxed phase: cuts generated at fractional iterates are valid
            // through the commitment-copy subproblem, and the LP master
            // solves orders of magnitude faster than the integer one. Switch
            // to integer masters once the relaxed objective stalls.
            lp::LinearProgram rel = mp;
            for (auto& v : rel.vars) v.integral = false;
            mr = lp::solve_lp(rel);
            if (mr.status == lp::SolveStatus::Optimal) {
                double scale = std::max(1.0, std::abs(mr.objective));
                if (mr.objective - last_rel_obj < 1e-7 * scale) {
                    if (++rel_stall >= 2) relax_master = false;
                } else {
                    rel_stall = 0;
                }
                last_rel_obj = std::max(last_rel_obj, mr.objective);
            } else {
                // A stalled LP master is not fatal: branch and bound copes
                // with hard node LPs, so hand over to the integer phase now.
                relax_master = false;
                relaxed_iter = false;
            }
            if (2 * iter >= opts.max_iters) relax_master = false;
        }
        if (!relaxed_iter) {
            lp::MilpOptions mopts;
            // Solve the master inexactly while far from convergence: the
            // proven branch-and-bound bound keeps the lower bound valid, and
            // any integer iterate yields valid cuts, so early masters only
            // need a rough gap. Tighten toward tol/10 so the final gap check
            // can succeed.
            double want = res.trace.empty() ? 0.05 : 0.15 * res.trace.back().gap;
            mopts.rel_gap = std::clamp(want, 0.1 * opts.tol, 0.05);
            // Any master solution worse than the global upper bound is
            // useless: it cannot become the incumbent, and the subtree bound
            // still feeds the proven lower bound. Leave slack for the
            // master's own gap.
            if (std::isfinite(ub)) mopts.cutoff = ub * (1.0 + mopts.rel_gap) + 1.0;
            if (!mp_hint.empty()) {
                mopts.hint = mp_hint;
                mopts.hint.resize(mp.num_vars(), 0.0);
            }
            mr = lp::solve_milp(mp, mopts);
        }
        if (std::getenv("DRUC_TIMING"))
            std::fprintf(stderr, "iter %d: mp%s %.2fs (%d rows)\n", iter,
                         relaxed_iter ? " (lp)" : "",
                         std::chrono::duration<double>(std::chrono::steady_clock::now() - t_mp)
                             .count(),
                         mp.num_rows());
        // An iteration-limited integer master that still carries an incumbent
        // is usable: its iterate prices valid cuts, and its (possibly -inf)
        // proven bound simply leaves lb where it was.
        bool usable = mr.status == lp::SolveStatus::Optimal ||
                      (!relaxed_iter && mr.status == lp::SolveStatus::IterationLimit &&
                       !mr.x.empty());
        if (!usable) {
            std::ostringstream os;
            os << "master problem failed at iteration " << iter << " (status "
               << int(mr.status) << ")";
            throw std::runtime_error(os.str());
        }
        mp_hint = mr.x;
        // Refresh cut activity: a scenario bundle stays in the pool while any
        // of its rows binds at a master solution; stale bundles are dropped
        // below to keep the master from growing without bound.
        for (const auto& [j, ri] : scen_rows) {
            const auto& row = mp.rows[ri];
            double lhs = 0.0;
            for (const auto& [col, c] : row.terms) lhs += c * mr.x[col];
            if (lhs - row.rhs < 1e-6 * std::max(1.0, std::abs(row.rhs)))
                scen_cuts[j].last_active = iter;
        }
        if (!logged_lb_form) {
            std::fprintf(stderr,
                         "benders: lower bound tracks the full master objective "
                         "(commitment cost plus the recourse model theta)\n");
            logged_lb_form = true;
        }
        lb = std::max(lb, mr.bound);

        std::vector<double> xf(mr.x.begin(), mr.x.begin() + nx);
        // Perturbed-retry LP solutions can stick out of the box by ~1e-9,
        // which the equality-pinned commitment copy cannot absorb.
        for (double& v : xf) v = std::clamp(v, 0.0, 1.0);
        auto sched = round_schedule(mr.x, G, H);
        double mu_f = (robust && !projected) ? mr.x[mu_col] : 0.0;
        double zeta_f = (robust && !projected) ? mr.x[zeta_col] : 0.0;
        double cx = first_stage_cost(cfg, sched);

        // ---- Scenario subproblems with the relaxed commitment copy ----
        std::vector<double> xu(xf.begin(), xf.begin() + G * H);
        std::vector<double> q(S);
        std::vector<std::vector<double>> phi(S);
        parallel_for(S, opts.jobs, [&](int w) {
            auto model = build_second_stage_copy(cfg, xu, scenario_load(amb.nominal, w, H));
            dump_model(opts.dump_dir, "sp_" + std::to_string(iter) + "_" + std::to_string(w),
                       model.lp);
            auto sr = lp::solve_lp(model.lp);
            if (sr.status != lp::SolveStatus::Optimal)
                throw std::runtime_error("scenario subproblem failed");
            q[w] = sr.objective;
            phi[w].resize(G * H);
            for (int i = 0; i < G * H; ++i) phi[w][i] = sr.duals[model.copy_rows[i]];
        });
        q_max = std::max(q_max, *std::max_element(q.begin(), q.end()));
        if (projected && std::getenv("DRUC_TIMING")) {
            // Soundness probe: at the master optimum every theta sits on its
            // cut envelope, which must underestimate the true scenario cost.
            for (int w = 0; w < S; ++w) {
                double over = mr.x[th_cols[w]] - q[w];
                if (over > 1.0)
                    std::fprintf(stderr, "  check: th[%d]=%.8g exceeds true q=%.8g by %.3g\n", w,
                                 mr.x[th_cols[w]], q[w], over);
            }
        }

        // ---- Cut assembly and upper bound ----
        // Anchor the tangent plane at the dual-optimal (mu, zeta) for the
        // current schedule rather than the master's raw iterate: at the dual
        // optimum sum_w pi_w e^{K_w - 1} = 1, so gamma = -1 and all cut
        // coefficients stay within a few orders of magnitude of the duals,
        // while the plane both supports R globally and certifies this x.
        KlWorstCase kw;
        if (projected && robust) {
            kw = kl_worst_case(q, amb.nominal.probs, amb.rho);
            mu_f = kw.mu;
            zeta_f = std::max(kw.zeta, kZetaMin);
        }
        if (projected) scen_cuts.push_back({xf, q, phi, iter, iter});
        double ub_cand;
        if (robust) {
            auto make_cut = [&](double mu_a, double zeta_a) {
                BendersCut cut;
                cut.x = xf;
                cut.mu = mu_a;
                cut.zeta = zeta_a;
                cut.alpha.assign(nx, 0.0);
                double r_val = 0.0;
                for (int w = 0; w < S; ++w) {
                    double k = (q[w] - mu_a) / zeta_a;
                    if (k - 1.0 > 700.0 && !warned_clamp) {
                        std::fprintf(stderr, "benders: cut exponent clamped at iteration %d\n",
                                     iter);
                        warned_clamp = true;
                    }
                    double e = safe_exp(k - 1.0);
                    double pi = amb.nominal.probs[w];
                    double xscale = opts.printed_alpha ? zeta_a * e : e;
                    for (int i = 0; i < G * H; ++i) cut.alpha[i] += pi * xscale * phi[w][i];
                    cut.beta += pi * e * (1.0 - k);
                    cut.gamma += pi * -e;
                    r_val += pi * zeta_a * e;
                }
                cut.value = r_val;
                return cut;
            };
            auto base = make_cut(mu_f, zeta_f);
            if (projected) {
                ub_cand = cx + kw.value;
                bool dup = false;
                for (const auto& p : dists) {
                    double d = 0.0;
                    for (int w = 0; w < S; ++w) d = std::max(d, std::abs(p[w] - kw.p[w]));
                    if (d < 1e-9) {
                        dup = true;
                        break;
                    }
                }
                if (!dup) dists.push_back(kw.p);
            } else {
                ub_cand = cx + mu_f + amb.rho * zeta_f + base.value;
            }
            res.cuts.push_back(std::move(base));
        } else {
            BendersCut cut;
            cut.x = xf;
            cut.alpha.assign(nx, 0.0);
            double expect = 0.0;
            for (int w = 0; w < S; ++w) {
                double pi = amb.nominal.probs[w];
                expect += pi * q[w];
                for (int i = 0; i < G * H; ++i) cut.alpha[i] += pi * phi[w][i];
            }
            cut.value = expect;
            ub_cand = cx + expect;
            if (projected && dists.empty()) dists.push_back(amb.nominal.probs);
            res.cuts.push_back(std::move(cut));
        }

        std::vector<double> q_inc = q;
        if (relaxed_iter) {
            // The fractional iterate priced the cuts; a feasible upper bound
            // needs a real schedule, so evaluate the rounding if it satisfies
            // the up/down-time rules.
            ub_cand = lp::kInf;
            if (schedule_feasible(cfg, sched.u)) {
                sched = derive_schedule(cfg, sched.u);
                q_inc = scenario_costs(cfg, sched, amb.nominal, opts.jobs);
                double recourse;
                if (robust) {
                    recourse = kl_worst_case(q_inc, amb.nominal.probs, amb.rho).value;
                } else {
                    recourse = 0.0;
                    for (int w = 0; w < S; ++w) recourse += amb.nominal.probs[w] * q_inc[w];
                }
                ub_cand = first_stage_cost(cfg, sched) + recourse;
            }
        }
        if (ub_cand < ub) {
            ub = ub_cand;
            res.schedule = sched;
            res.total_cost = ub;
            res.q_at_solution = q_inc;
            incumbent_iter = iter;
        }
        if (projected && std::getenv("DRUC_TIMING") && incumbent_iter > 0) {
            // Soundness probe: every stored cut must underestimate the true
            // scenario cost at the incumbent schedule.
            std::vector<double> u_inc(G * H);
            for (int g = 0; g < G; ++g)
                for (int h = 0; h < H; ++h) u_inc[g * H + h] = res.schedule.u[g][h];
            for (size_t j = 0; j < scen_cuts.size(); ++j) {
                const auto& jc = scen_cuts[j];
                for (int w = 0; w < S; ++w) {
                    double val = jc.q[w];
                    for (int i = 0; i < G * H; ++i) val += jc.phi[w][i] * (u_inc[i] - jc.x[i]);
                    if (val > res.q_at_solution[w] + 1.0)
                        std::fprintf(stderr,
                                     "  check: cut (iter %d, w=%d) at incumbent %.8g > true %.8g\n",
                                     jc.iter_created, w, val, res.q_at_solution[w]);
                }
            }
        }
        if (projected)
            std::erase_if(scen_cuts, [&](const ScenarioCuts& c) {
                return iter - c.last_active >= 8 && c.iter_created != incumbent_iter;
            });

        double gap = (ub - lb) / std::max(1.0, std::abs(ub));
        if (std::getenv("DRUC_TIMING"))
            std::fprintf(stderr, "iter %d: lb %.1f ub %.1f gap %.3g\n", iter, lb, ub, gap);
        res.trace.push_back({iter, lb, ub, gap, zeta_f, mu_f});
        res.iterations = iter;
        res.gap = gap;
        if (gap < opts.tol) {
            res.converged = true;
            break;
        }
    }
    res.q_max = q_max;
    if (!res.converged) {
        std::ostringstream os;
        os << "no convergence in " << opts.max_iters << " iterations (gap " << res.gap << ")";
        throw ConvergenceError(os.str(), std::move(res));
    }
    return res;
}

void write_trace_csv(const std::vector<TraceRow>& trace, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write trace: " + path);
    out << "iter,lb,ub,gap,zeta,mu\n";
    char buf[256];
    for (const auto& r : trace) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.iter, r.lb, r.ub,
                      r.gap, r.zeta, r.mu);
        out << buf;
    }
}

}  // namespace druc
