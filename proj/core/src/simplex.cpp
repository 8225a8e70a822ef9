#include "druc/lp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>
#include <vector>

// Dense two-phase primal simplex with bounded variables. Every row gets a
// slack (bounded by sense) so the system is Ax + s = b; rows whose slack
// cannot absorb the initial residual get a phase-1 artificial. Nonbasic
// variables rest at one of their finite bounds (free variables at 0).

namespace druc::lp {

namespace {

constexpr double kPivTol = 1e-9;
constexpr double kFeasTol = 1e-7;
constexpr double kCostTol = 1e-9;
// Pivot budget scales with problem size; hitting it triggers the perturbed
// retry in solve_lp, so it should trip fast rather than grind.
inline long pivot_budget(int rows, int cols) { return 10000 + 20L * (rows + cols); }
constexpr int kBlandTrigger = 1000;  // consecutive degenerate pivots

enum class VStat { Basic, AtLower, AtUpper, FreeZero };

class Tableau {
  public:
    explicit Tableau(const LinearProgram& lp) : lp_(lp), m_(lp.num_rows()), n_(lp.num_vars()) {
        build();
    }

    SolveResult solve() {
        SolveResult res;
        if (need_phase1_) {
            set_costs(/*phase1=*/true);
            IterOutcome out = run_phase(/*phase1=*/true);
            if (out == IterOutcome::Limit) {
                if (std::getenv("DRUC_TIMING"))
                    std::fprintf(stderr, "  simplex: phase-1 pivot limit (m=%d)\n", m_);
                return limit_result();
            }
            double infeas = 0.0;
            for (size_t k = 0; k < artificials_.size(); ++k) {
                double scale = std::max(1.0, std::abs(lp_.rows[art_row_[k]].rhs));
                infeas = std::max(infeas, std::abs(xval_[artificials_[k]]) / scale);
            }
            if (infeas > kFeasTol * 10) {
                res.status = SolveStatus::Infeasible;
                return res;
            }
            // Pin artificials at zero for phase 2.
            for (int j : artificials_) {
                lo_[j] = 0.0;
                up_[j] = 0.0;
                xval_[j] = 0.0;
                if (stat_[j] != VStat::Basic) stat_[j] = VStat::AtLower;
            }
        }
        long p1_pivots = pivots_;
        set_costs(/*phase1=*/false);
        IterOutcome out = run_phase(/*phase1=*/false);
        if (std::getenv("DRUC_TIMING") && pivots_ > 3000)
            std::fprintf(stderr, "  simplex: %ld phase-1 + %ld phase-2 pivots (m=%d)\n", p1_pivots,
                         pivots_ - p1_pivots, m_);
        if (out == IterOutcome::Limit) {
            if (std::getenv("DRUC_TIMING"))
                std::fprintf(stderr, "  simplex: phase-2 pivot limit (m=%d)\n", m_);
            return limit_result();
        }
        if (out == IterOutcome::Unbounded) {
            res.status = SolveStatus::Unbounded;
            return res;
        }
        res.status = SolveStatus::Optimal;
        res.x.assign(xval_.begin(), xval_.begin() + n_);
        res.objective = 0.0;
        for (int j = 0; j < n_; ++j) res.objective += lp_.vars[j].objective * xval_[j];
        res.bound = res.objective;
        res.duals.resize(m_);
        for (int i = 0; i < m_; ++i) res.duals[i] = -zrow_[slack_of_[i]];
        return res;
    }

  private:
    enum class IterOutcome { Optimal, Unbounded, Limit };

    const LinearProgram& lp_;
    int m_, n_;
    int ncols_ = 0;
    std::vector<double> tab_;   // m_ x ncols_, row-major: B^{-1} * A_full
    std::vector<double> beta_;  // B^{-1} b
    std::vector<double> zrow_;  // reduced costs for current phase
    std::vector<double> cost_;  // current phase costs
    std::vector<double> lo_, up_, xval_;
    std::vector<VStat> stat_;
    std::vector<int> basis_;     // row -> variable
    std::vector<int> slack_of_;  // row -> slack column
    std::vector<int> artificials_;
    std::vector<int> art_row_;     // artificial k -> row
    std::vector<double> art_sgn_;  // artificial k -> original coefficient
    bool need_phase1_ = false;
    long pivots_ = 0;
    long last_refactor_ = -1000;
    int degen_streak_ = 0;
    bool bland_ = false;
    std::vector<double> gamma_;  // pricing workspace

    double& T(int r, int c) { return tab_[static_cast<size_t>(r) * ncols_ + c]; }

    void build() {
        // Column layout: [structural | slacks | artificials].
        int nslack = m_;
        ncols_ = n_ + nslack;  // artificials appended later
        lo_.resize(ncols_);
        up_.resize(ncols_);
        for (int j = 0; j < n_; ++j) {
            lo_[j] = lp_.vars[j].lower;
            up_[j] = lp_.vars[j].upper;
            if (lo_[j] > up_[j] + 1e-12) throw std::invalid_argument("variable bounds crossed");
        }
        slack_of_.resize(m_);
        for (int i = 0; i < m_; ++i) {
            slack_of_[i] = n_ + i;
            switch (lp_.rows[i].sense) {
                case Sense::LE: lo_[n_ + i] = 0.0; up_[n_ + i] = kInf; break;
                case Sense::GE: lo_[n_ + i] = -kInf; up_[n_ + i] = 0.0; break;
                case Sense::EQ: lo_[n_ + i] = 0.0; up_[n_ + i] = 0.0; break;
            }
        }
        // Nonbasic start values for structural variables.
        xval_.assign(ncols_, 0.0);
        stat_.assign(ncols_, VStat::AtLower);
        for (int j = 0; j < n_; ++j) {
            if (std::isfinite(lo_[j])) {
                xval_[j] = lo_[j];
                stat_[j] = VStat::AtLower;
            } else if (std::isfinite(up_[j])) {
                xval_[j] = up_[j];
                stat_[j] = VStat::AtUpper;
            } else {
                xval_[j] = 0.0;
                stat_[j] = VStat::FreeZero;
            }
        }
        // Greedy crash: flip nonbasic rest bounds where that cuts the initial
        // infeasibility phase 1 would otherwise have to repair. Epigraph
        // columns sitting at zero under a pile of violated cut rows are the
        // expensive case this removes.
        {
            std::vector<double> resid(m_);
            for (int i = 0; i < m_; ++i) {
                double r = lp_.rows[i].rhs;
                for (const auto& [j, a] : lp_.rows[i].terms) r -= a * xval_[j];
                resid[i] = r;
            }
            auto viol = [&](int i, double r) {
                switch (lp_.rows[i].sense) {
                    case Sense::LE: return std::max(0.0, -r);
                    case Sense::GE: return std::max(0.0, r);
                    default: return std::abs(r);
                }
            };
            std::vector<std::vector<std::pair<int, double>>> cols(n_);
            for (int i = 0; i < m_; ++i)
                for (const auto& [j, a] : lp_.rows[i].terms) cols[j].push_back({i, a});
            for (int pass = 0; pass < 2; ++pass) {
                bool changed = false;
                for (int j = 0; j < n_; ++j) {
                    if (!std::isfinite(lo_[j]) || !std::isfinite(up_[j]) || lo_[j] == up_[j])
                        continue;
                    double alt = stat_[j] == VStat::AtLower ? up_[j] : lo_[j];
                    double delta = alt - xval_[j];
                    double dv = 0.0;
                    for (const auto& [i, a] : cols[j])
                        dv += viol(i, resid[i] - a * delta) - viol(i, resid[i]);
                    if (dv < -1e-9) {
                        for (const auto& [i, a] : cols[j]) resid[i] -= a * delta;
                        xval_[j] = alt;
                        stat_[j] = stat_[j] == VStat::AtLower ? VStat::AtUpper : VStat::AtLower;
                        changed = true;
                    }
                }
                if (!changed) break;
            }
        }
        // Residuals decide slack vs artificial basis per row.
        std::vector<double> resid(m_);
        for (int i = 0; i < m_; ++i) {
            double r = lp_.rows[i].rhs;
            for (const auto& [j, a] : lp_.rows[i].terms) r -= a * xval_[j];
            resid[i] = r;
        }
        std::vector<int> art_rows;
        for (int i = 0; i < m_; ++i) {
            int s = slack_of_[i];
            if (resid[i] >= lo_[s] - kFeasTol && resid[i] <= up_[s] + kFeasTol) continue;
            art_rows.push_back(i);
        }
        int nart = static_cast<int>(art_rows.size());
        need_phase1_ = nart > 0;
        int total = ncols_ + nart;
        tab_.assign(static_cast<size_t>(m_) * total, 0.0);
        int old_ncols = ncols_;
        ncols_ = total;
        lo_.resize(ncols_, 0.0);
        up_.resize(ncols_, kInf);
        xval_.resize(ncols_, 0.0);
        stat_.resize(ncols_, VStat::AtLower);
        for (int i = 0; i < m_; ++i) {
            for (const auto& [j, a] : lp_.rows[i].terms) T(i, j) += a;
            T(i, slack_of_[i]) = 1.0;
        }
        basis_.resize(m_);
        beta_.resize(m_);
        for (int i = 0; i < m_; ++i) {
            basis_[i] = slack_of_[i];
            stat_[slack_of_[i]] = VStat::Basic;
            beta_[i] = lp_.rows[i].rhs;
        }
        for (int k = 0; k < nart; ++k) {
            int i = art_rows[k];
            int col = old_ncols + k;
            double sgn = resid[i] >= 0 ? 1.0 : -1.0;
            if (sgn < 0) {
                // Keep the tableau in B^{-1}A form: the artificial's basis
                // column must be +e_i, so negate the whole row.
                double* row = &tab_[static_cast<size_t>(i) * ncols_];
                for (int c = 0; c < ncols_; ++c) row[c] = -row[c];
                beta_[i] = -beta_[i];
            }
            T(i, col) = 1.0;
            artificials_.push_back(col);
            art_row_.push_back(i);
            art_sgn_.push_back(sgn);
            // Slack moves nonbasic to the bound nearest the residual.
            int s = slack_of_[i];
            double sv = std::clamp(resid[i], lo_[s], up_[s]);
            if (!std::isfinite(sv)) sv = 0.0;
            xval_[s] = sv;
            stat_[s] = (sv == up_[s] && std::isfinite(up_[s])) ? VStat::AtUpper : VStat::AtLower;
            basis_[i] = col;
            stat_[col] = VStat::Basic;
            xval_[col] = (resid[i] - sv) * sgn;
        }
        refresh_basics();
    }

    void set_costs(bool phase1) {
        cost_.assign(ncols_, 0.0);
        if (phase1) {
            for (int j : artificials_) cost_[j] = 1.0;
        } else {
            for (int j = 0; j < n_; ++j) cost_[j] = lp_.vars[j].objective;
        }
        // zrow = c - c_B^T T
        zrow_.assign(ncols_, 0.0);
        for (int j = 0; j < ncols_; ++j) zrow_[j] = cost_[j];
        for (int i = 0; i < m_; ++i) {
            double cb = cost_[basis_[i]];
            if (cb == 0.0) continue;
            const double* row = &tab_[static_cast<size_t>(i) * ncols_];
            for (int j = 0; j < ncols_; ++j) zrow_[j] -= cb * row[j];
        }
        for (int i = 0; i < m_; ++i) zrow_[basis_[i]] = 0.0;
    }

    // Recompute basic values from beta and nonbasic rest points.
    void refresh_basics() {
        for (int i = 0; i < m_; ++i) {
            double v = beta_[i];
            const double* row = &tab_[static_cast<size_t>(i) * ncols_];
            for (int j = 0; j < ncols_; ++j) {
                if (stat_[j] == VStat::Basic) continue;
                if (xval_[j] != 0.0) v -= row[j] * xval_[j];
            }
            xval_[basis_[i]] = v;
        }
    }

    // Rebuild the tableau as B^{-1}[A I] from the original data by
    // Gauss-Jordan on the current basis columns, wiping accumulated pivot
    // roundoff. Returns false on a numerically singular basis.
    bool refactorize(bool phase1) {
        std::vector<double> nt(static_cast<size_t>(m_) * ncols_, 0.0);
        std::vector<double> nb(m_);
        for (int i = 0; i < m_; ++i) {
            double* row = &nt[static_cast<size_t>(i) * ncols_];
            for (const auto& [j, a] : lp_.rows[i].terms) row[j] += a;
            row[slack_of_[i]] = 1.0;
            nb[i] = lp_.rows[i].rhs;
        }
        for (size_t k = 0; k < artificials_.size(); ++k)
            nt[static_cast<size_t>(art_row_[k]) * ncols_ + artificials_[k]] = art_sgn_[k];
        std::vector<char> done(m_, 0);
        for (int step = 0; step < m_; ++step) {
            // Largest available pivot first keeps the elimination stable.
            int bi = -1;
            double bp = 0.0;
            for (int i = 0; i < m_; ++i) {
                if (done[i]) continue;
                double v = std::abs(nt[static_cast<size_t>(i) * ncols_ + basis_[i]]);
                if (v > bp) {
                    bp = v;
                    bi = i;
                }
            }
            if (bp < 1e-11) return false;
            done[bi] = 1;
            double* prow = &nt[static_cast<size_t>(bi) * ncols_];
            double inv = 1.0 / prow[basis_[bi]];
            for (int c = 0; c < ncols_; ++c) prow[c] *= inv;
            prow[basis_[bi]] = 1.0;
            nb[bi] *= inv;
            for (int i = 0; i < m_; ++i) {
                if (i == bi) continue;
                double* row = &nt[static_cast<size_t>(i) * ncols_];
                double f = row[basis_[bi]];
                if (f == 0.0) continue;
                for (int c = 0; c < ncols_; ++c) row[c] -= f * prow[c];
                row[basis_[bi]] = 0.0;
                nb[i] -= f * nb[bi];
            }
        }
        tab_ = std::move(nt);
        beta_ = std::move(nb);
        set_costs(phase1);
        refresh_basics();
        return true;
    }

    // Max violation of the current point against the original rows/bounds.
    double self_violation() const {
        double viol = 0.0;
        for (int j = 0; j < ncols_; ++j) {
            if (std::isfinite(lo_[j])) viol = std::max(viol, lo_[j] - xval_[j]);
            if (std::isfinite(up_[j])) viol = std::max(viol, xval_[j] - up_[j]);
        }
        for (int i = 0; i < m_; ++i) {
            double lhs = -lp_.rows[i].rhs + xval_[slack_of_[i]];
            for (const auto& [j, a] : lp_.rows[i].terms) lhs += a * xval_[j];
            for (size_t k = 0; k < artificials_.size(); ++k)
                if (art_row_[k] == i) lhs += art_sgn_[k] * xval_[artificials_[k]];
            viol = std::max(viol, std::abs(lhs) / std::max(1.0, std::abs(lp_.rows[i].rhs)));
        }
        return viol;
    }

    SolveResult limit_result() {
        SolveResult res;
        res.status = SolveStatus::IterationLimit;
        return res;
    }

    double improvement(int j) const {
        double d = zrow_[j];
        switch (stat_[j]) {
            case VStat::AtLower: return -d;
            case VStat::AtUpper: return d;
            case VStat::FreeZero: return std::abs(d);
            default: return 0.0;
        }
    }

    int price() {
        if (bland_) {
            for (int j = 0; j < ncols_; ++j) {
                if (stat_[j] == VStat::Basic || lo_[j] == up_[j]) continue;
                if (improvement(j) > kCostTol) return j;
            }
            return -1;
        }
        // Steepest-edge pricing on the explicit tableau: reduced cost scaled
        // by the column norm. Dantzig's most-negative rule zigzags badly on
        // the degenerate masters this solver exists for.
        gamma_.assign(ncols_, 1.0);
        for (int r = 0; r < m_; ++r) {
            const double* row = &tab_[static_cast<size_t>(r) * ncols_];
            for (int j = 0; j < ncols_; ++j) gamma_[j] += row[j] * row[j];
        }
        int best = -1;
        double best_score = 0.0;
        for (int j = 0; j < ncols_; ++j) {
            if (stat_[j] == VStat::Basic || lo_[j] == up_[j]) continue;
            double imp = improvement(j);
            if (imp <= kCostTol) continue;
            double score = imp * imp / gamma_[j];
            if (score > best_score) {
                best_score = score;
                best = j;
            }
        }
        return best;
    }

    // Iterate to optimality, then verify the point against the original data;
    // on drift, refactorize and resume. Claimed optima leave here checked.
    IterOutcome run_phase(bool phase1) {
        IterOutcome out;
        for (int attempt = 0;; ++attempt) {
            out = iterate(phase1);
            if (out != IterOutcome::Optimal) return out;
            refresh_basics();
            if (attempt >= 3 || self_violation() <= 1e-7) return out;
            if (std::getenv("DRUC_TIMING"))
                std::fprintf(stderr, "  simplex: refactorizing after drift (m=%d)\n", m_);
            if (!refactorize(phase1)) return out;
        }
    }

    IterOutcome iterate(bool phase1) {
        while (true) {
            if (++pivots_ > pivot_budget(m_, ncols_)) return IterOutcome::Limit;
            int j = price();
            if (j < 0) return IterOutcome::Optimal;
            double d = zrow_[j];
            double dir;
            if (stat_[j] == VStat::AtLower) dir = 1.0;
            else if (stat_[j] == VStat::AtUpper) dir = -1.0;
            else dir = d < 0 ? 1.0 : -1.0;

            // Ratio test: smallest of the entering variable's own bound span
            // and the basic-variable limits.
            double own_limit = kInf;
            if (dir > 0 && std::isfinite(up_[j])) own_limit = up_[j] - xval_[j];
            if (dir < 0 && std::isfinite(lo_[j])) own_limit = xval_[j] - lo_[j];
            double basic_limit = kInf;
            int leave_row = -1;
            double leave_piv = 0.0;
            bool leave_to_upper = false;
            // Two passes: find the tightest ratio, then pick the largest
            // pivot among rows whose limit overshoots it by at most
            // 1e-7/|a| -- overshooting a row by delta displaces its basic
            // variable by delta*|a|, so this caps the introduced error at
            // 1e-7 while steering away from near-tolerance pivots, whose
            // reciprocals have corrupted whole tableaus.
            for (int pass = 0; pass < 2; ++pass) {
                for (int r = 0; r < m_; ++r) {
                    double a = T(r, j);
                    if (std::abs(a) < kPivTol) continue;
                    int b = basis_[r];
                    double g = -dir * a;  // rate of change of x_b per unit step
                    double limit;
                    bool to_upper;
                    if (g < 0) {
                        if (!std::isfinite(lo_[b])) continue;
                        limit = (xval_[b] - lo_[b]) / (-g);
                        to_upper = false;
                    } else {
                        if (!std::isfinite(up_[b])) continue;
                        limit = (up_[b] - xval_[b]) / g;
                        to_upper = true;
                    }
                    if (limit < 0) limit = 0.0;
                    if (pass == 0) {
                        basic_limit = std::min(basic_limit, limit);
                        continue;
                    }
                    if (limit > basic_limit + 1e-7 / std::abs(a)) continue;
                    bool better;
                    if (leave_row < 0) {
                        better = true;
                    } else if (bland_) {
                        better = b < basis_[leave_row];
                    } else {
                        better = std::abs(a) > std::abs(leave_piv);
                    }
                    if (better) {
                        leave_row = r;
                        leave_piv = a;
                        leave_to_upper = to_upper;
                    }
                }
                if (!std::isfinite(basic_limit)) break;
            }
            // A near-tolerance winning pivot is usually drift noise, and
            // dividing by it shreds the tableau. Re-derive it from clean
            // data before committing; if it survives, it is real.
            if (leave_row >= 0 && basic_limit <= own_limit && std::abs(leave_piv) < 1e-6 &&
                pivots_ - last_refactor_ > 32) {
                last_refactor_ = pivots_;
                if (refactorize(phase1)) continue;
            }
            double t = std::min(own_limit, basic_limit);
            if (!std::isfinite(t)) {
                if (phase1) {
                    // Phase 1 is bounded below, so an unblocked ray is tableau
                    // drift. Rebuild from the original data; only a ray that
                    // survives a fresh factorization gets its column dropped
                    // from pricing.
                    if (pivots_ - last_refactor_ > 0 && refactorize(/*phase1=*/true)) {
                        last_refactor_ = pivots_;
                    } else {
                        zrow_[j] = 0.0;
                    }
                    continue;
                }
                return IterOutcome::Unbounded;
            }
            if (t < 1e-11) {
                ++degen_streak_;
            } else {
                // A real step rules out a cycle through this basis; drop back
                // to Dantzig pricing, which moves far faster than Bland.
                degen_streak_ = 0;
                bland_ = false;
            }
            if (degen_streak_ > kBlandTrigger) bland_ = true;

            if (t > 0) {
                xval_[j] += dir * t;
                for (int r = 0; r < m_; ++r) {
                    double a = T(r, j);
                    if (a != 0.0) xval_[basis_[r]] -= dir * a * t;
                }
            }
            if (own_limit <= basic_limit) {
                // Bound flip, basis unchanged.
                stat_[j] = dir > 0 ? VStat::AtUpper : VStat::AtLower;
            } else {
                pivot(leave_row, j, leave_to_upper);
                if (pivots_ % 4096 == 0) {
                    last_refactor_ = pivots_;
                    refactorize(phase1);
                } else if (pivots_ % 512 == 0) {
                    refresh_basics();
                }
            }
        }
    }

    void pivot(int r, int j, bool leaving_to_upper) {
        int leaving = basis_[r];
        double piv = T(r, j);
        double* prow = &tab_[static_cast<size_t>(r) * ncols_];
        double inv = 1.0 / piv;
        for (int c = 0; c < ncols_; ++c) prow[c] *= inv;
        beta_[r] *= inv;
        for (int i = 0; i < m_; ++i) {
            if (i == r) continue;
            double f = T(i, j);
            if (f == 0.0) continue;
            double* row = &tab_[static_cast<size_t>(i) * ncols_];
            for (int c = 0; c < ncols_; ++c) row[c] -= f * prow[c];
            beta_[i] -= f * beta_[r];
        }
        double zf = zrow_[j];
        if (zf != 0.0) {
            for (int c = 0; c < ncols_; ++c) zrow_[c] -= zf * prow[c];
        }
        zrow_[j] = 0.0;
        basis_[r] = j;
        stat_[j] = VStat::Basic;
        stat_[leaving] = leaving_to_upper ? VStat::AtUpper : VStat::AtLower;
        xval_[leaving] = leaving_to_upper ? up_[leaving] : lo_[leaving];
        if (!std::isfinite(xval_[leaving])) xval_[leaving] = 0.0;
    }
};

}  // namespace

namespace {

struct Scaling {
    std::vector<double> row, col;
};

// Geometric-mean equilibration, scales rounded to powers of two so they are
// exact in binary. Mixed-magnitude models (unit commitment columns next to
// epigraph columns in the 1e6 range) otherwise push the tableau's condition
// number past what dense pivoting survives.
Scaling equilibrate(LinearProgram& lp) {
    int m = lp.num_rows(), n = lp.num_vars();
    Scaling s{std::vector<double>(m, 1.0), std::vector<double>(n, 1.0)};
    auto pow2 = [](double v) { return std::exp2(std::round(std::log2(v))); };
    // Entries many orders below their row/column peak are noise (e.g. dual
    // roundoff in cut rows); letting them into the geometric mean produces
    // absurd scales, so they are ignored.
    constexpr double kNegligible = 1e-8;
    for (int round = 0; round < 3; ++round) {
        for (int i = 0; i < m; ++i) {
            double hi = 0.0, lo = kInf;
            for (const auto& [j, a] : lp.rows[i].terms)
                hi = std::max(hi, std::abs(a) * s.row[i] * s.col[j]);
            for (const auto& [j, a] : lp.rows[i].terms) {
                double v = std::abs(a) * s.row[i] * s.col[j];
                if (v >= hi * kNegligible) lo = std::min(lo, v);
            }
            if (hi > 0.0) s.row[i] = pow2(s.row[i] / std::sqrt(hi * lo));
        }
        std::vector<double> hi(n, 0.0), lo(n, kInf);
        for (int i = 0; i < m; ++i)
            for (const auto& [j, a] : lp.rows[i].terms)
                hi[j] = std::max(hi[j], std::abs(a) * s.row[i] * s.col[j]);
        for (int i = 0; i < m; ++i)
            for (const auto& [j, a] : lp.rows[i].terms) {
                double v = std::abs(a) * s.row[i] * s.col[j];
                if (v >= hi[j] * kNegligible) lo[j] = std::min(lo[j], v);
            }
        for (int j = 0; j < n; ++j)
            if (hi[j] > 0.0) s.col[j] = pow2(s.col[j] / std::sqrt(hi[j] * lo[j]));
    }
    for (int i = 0; i < m; ++i) {
        for (auto& [j, a] : lp.rows[i].terms) a *= s.row[i] * s.col[j];
        lp.rows[i].rhs *= s.row[i];
    }
    for (int j = 0; j < n; ++j) {
        auto& v = lp.vars[j];
        v.objective *= s.col[j];
        if (std::isfinite(v.lower)) v.lower /= s.col[j];
        if (std::isfinite(v.upper)) v.upper /= s.col[j];
    }
    return s;
}

// Map a solution of the scaled problem back to original units.
void unscale(const Scaling& s, SolveResult& r) {
    for (size_t j = 0; j < r.x.size(); ++j) r.x[j] *= s.col[j];
    for (size_t i = 0; i < r.duals.size(); ++i) r.duals[i] *= s.row[i];
}

// Max constraint violation of x against the original problem data.
double primal_violation(const LinearProgram& lp, const std::vector<double>& x) {
    double viol = 0.0;
    for (int j = 0; j < lp.num_vars(); ++j) {
        const auto& v = lp.vars[j];
        if (std::isfinite(v.lower)) viol = std::max(viol, v.lower - x[j]);
        if (std::isfinite(v.upper)) viol = std::max(viol, x[j] - v.upper);
    }
    for (const auto& row : lp.rows) {
        double lhs = 0.0;
        for (const auto& [j, a] : row.terms) lhs += a * x[j];
        double r = lhs - row.rhs;
        double scale = std::max(1.0, std::abs(row.rhs));
        if (row.sense == Sense::LE) viol = std::max(viol, r / scale);
        else if (row.sense == Sense::GE) viol = std::max(viol, -r / scale);
        else viol = std::max(viol, std::abs(r) / scale);
    }
    return viol;
}

}  // namespace

SolveResult solve_lp(const LinearProgram& lp) {
    for (const auto& v : lp.vars)
        if (v.integral) throw std::invalid_argument("solve_lp: integral variable present");
    LinearProgram scaled = lp;
    Scaling sc = equilibrate(scaled);
    Tableau t(scaled);
    SolveResult r = t.solve();
    if (r.status == SolveStatus::Optimal) {
        unscale(sc, r);
        if (primal_violation(lp, r.x) > 1e-6) {
            // Corrupted tableau: the claimed optimum is not even feasible.
            // Fall through to the perturbed retry and its fresh pivot path.
            if (std::getenv("DRUC_TIMING"))
                std::fprintf(stderr, "  simplex: claimed optimum violates rows by %.3g (m=%d)\n",
                             primal_violation(lp, r.x), lp.num_rows());
            r.status = SolveStatus::IterationLimit;
            r.x.clear();
            r.duals.clear();
        }
    }
    if (r.status != SolveStatus::IterationLimit) return r;
    // Stalled on degenerate pivoting. Retry with deterministic perturbations:
    // costs against dual ties, and bounds/inequality rhs pushed outward a
    // relative 1e-9 against primal degeneracy (zero-length steps). The
    // perturbed optimum sits within that slack of the true one; restate the
    // objective in the original costs.
    double cmax = 0.0;
    for (const auto& v : scaled.vars) cmax = std::max(cmax, std::abs(v.objective));
    auto tie = [](unsigned k) {
        unsigned h = k * 2654435761u;
        return (h % 1024u) / 1024.0 + 0.5;
    };
    LinearProgram pert = scaled;
    for (int j = 0; j < pert.num_vars(); ++j) {
        auto& v = pert.vars[j];
        v.objective += 1e-9 * (std::abs(v.objective) + cmax) * tie(j);
        if (std::isfinite(v.lower)) v.lower -= 1e-9 * (1.0 + std::abs(v.lower)) * tie(j + 1);
        if (std::isfinite(v.upper)) v.upper += 1e-9 * (1.0 + std::abs(v.upper)) * tie(j + 2);
    }
    for (int i = 0; i < pert.num_rows(); ++i) {
        auto& row = pert.rows[i];
        double eps = 1e-9 * (1.0 + std::abs(row.rhs)) * tie(i + 3);
        if (row.sense == Sense::LE) row.rhs += eps;
        if (row.sense == Sense::GE) row.rhs -= eps;
    }
    Tableau t2(pert);
    SolveResult r2 = t2.solve();
    if (r2.status != SolveStatus::Optimal || primal_violation(pert, r2.x) > 1e-6) return r;
    unscale(sc, r2);
    r2.objective = 0.0;
    for (int j = 0; j < lp.num_vars(); ++j) r2.objective += lp.vars[j].objective * r2.x[j];
    r2.bound = r2.objective;
    return r2;
}

std::string to_lp_format(const LinearProgram& lp) {
    std::string out = "Minimize\n obj:";
    auto vname = [&](int j) {
        return lp.vars[j].name.empty() ? "x" + std::to_string(j) : lp.vars[j].name;
    };
    char buf[64];
    for (int j = 0; j < lp.num_vars(); ++j) {
        double c = lp.vars[j].objective;
        if (c == 0.0) continue;
        std::snprintf(buf, sizeof buf, " %+.17g ", c);
        out += buf;
        out += vname(j);
    }
    out += "\nSubject To\n";
    for (int i = 0; i < lp.num_rows(); ++i) {
        const auto& row = lp.rows[i];
        out += " c" + std::to_string(i) + ":";
        for (const auto& [j, a] : row.terms) {
            std::snprintf(buf, sizeof buf, " %+.17g ", a);
            out += buf;
            out += vname(j);
        }
        const char* rel = row.sense == Sense::LE ? " <= " : (row.sense == Sense::EQ ? " = " : " >= ");
        std::snprintf(buf, sizeof buf, "%s%.17g\n", rel, row.rhs);
        out += buf;
    }
    out += "Bounds\n";
    for (int j = 0; j < lp.num_vars(); ++j) {
        const auto& v = lp.vars[j];
        std::snprintf(buf, sizeof buf, " %.17g <= ", v.lower);
        if (std::isfinite(v.lower)) out += buf;
        else out += " -inf <= ";
        out += vname(j);
        if (std::isfinite(v.upper)) {
            std::snprintf(buf, sizeof buf, " <= %.17g\n", v.upper);
            out += buf;
        } else {
            out += "\n";
        }
    }
    bool any_int = false;
    for (const auto& v : lp.vars) any_int |= v.integral;
    if (any_int) {
        out += "Binaries\n";
        for (int j = 0; j < lp.num_vars(); ++j)
            if (lp.vars[j].integral) out += " " + vname(j);
        out += "\n";
    }
    out += "End\n";
    return out;
}

}  // namespace druc::lp
