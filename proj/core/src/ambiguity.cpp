#include "druc/ambiguity.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace druc {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

void NominalDistribution::validate() const {
    if (probs.empty() || support.size() != probs.size())
        throw std::invalid_argument("nominal distribution: support/probs size mismatch");
    double sum = 0.0;
    for (double p : probs) {
        if (!(p > 0)) throw std::invalid_argument("nominal distribution: nonpositive probability");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("nominal distribution: probabilities do not sum to 1");
}

NominalDistribution build_nominal(const Clustering& c, int N) {
    int S = static_cast<int>(c.centroids.size());
    int total = 0;
    for (int s = 0; s < S; ++s) {
        if (c.counts[s] == 0) throw std::invalid_argument("empty cluster has probability zero");
        total += c.counts[s];
    }
    if (total != N) throw std::invalid_argument("N does not match assigned point count");
    NominalDistribution out;
    out.support = c.centroids;
    out.probs.resize(S);
    for (int s = 0; s < S; ++s) out.probs[s] = static_cast<double>(c.counts[s]) / N;
    return out;
}

double kl_divergence(const std::vector<double>& p, const std::vector<double>& q) {
    if (p.size() != q.size()) throw std::invalid_argument("kl_divergence: size mismatch");
    double s = 0.0;
    for (size_t i = 0; i < p.size(); ++i) {
        if (!(q[i] > 0)) throw std::invalid_argument("kl_divergence: reference has zero mass");
        if (p[i] > 0) s += p[i] * std::log(p[i] / q[i]);
    }
    return std::max(s, 0.0);
}

// Incomplete gamma by series (x < a+1) or continued fraction (Lentz).
double regularized_gamma_p(double a, double x) {
    if (x < 0 || a <= 0) throw std::invalid_argument("regularized_gamma_p domain");
    if (x == 0) return 0.0;
    double lg = std::lgamma(a);
    if (x < a + 1.0) {
        double ap = a, sum = 1.0 / a, del = sum;
        for (int n = 0; n < 500; ++n) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::abs(del) < std::abs(sum) * 1e-16) break;
        }
        return sum * std::exp(-x + a * std::log(x) - lg);
    }
    double tiny = 1e-300;
    double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
    for (int i = 1; i <= 500; ++i) {
        double an = -static_cast<double>(i) * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    double q = std::exp(-x + a * std::log(x) - lg) * h;
    return 1.0 - q;
}

double chi_square_quantile(int df, double prob) {
    if (df < 1) throw std::invalid_argument("chi_square_quantile: df must be >= 1");
    if (!(prob > 0 && prob < 1)) throw std::invalid_argument("chi_square_quantile: prob in (0,1)");
    double a = df / 2.0;
    auto cdf = [&](double x) { return regularized_gamma_p(a, x / 2.0); };
    double lo = 0.0, hi = 1.0;
    while (cdf(hi) < prob) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (cdf(mid) < prob) lo = mid;
        else hi = mid;
        if (hi - lo < 1e-10) break;
    }
    return 0.5 * (lo + hi);
}

double asymptotic_rho(long N, int S, double eta) {
    if (N < 1) throw std::invalid_argument("asymptotic_rho: N must be >= 1");
    if (S < 2) throw std::invalid_argument("asymptotic_rho: S must be >= 2");
    if (!(eta > 0 && eta < 1)) throw std::invalid_argument("asymptotic_rho: eta in (0,1)");
    return chi_square_quantile(S - 1, 1.0 - eta) / (2.0 * static_cast<double>(N));
}

namespace {

// Golden-section minimization of a convex function on [lo, hi].
double golden_min(const std::function<double(double)>& f, double lo, double hi, int iters) {
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo, b = hi;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int i = 0; i < iters; ++i) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = f(x2);
        }
    }
    return 0.5 * (a + b);
}


double dual_objective(const std::vector<double>& q, const std::vector<double>& pi, double rho,
                      double mu, double zeta) {
    double s = 0.0;
    for (size_t i = 0; i < q.size(); ++i) s += pi[i] * safe_exp((q[i] - mu) / zeta - 1.0);
    return mu + rho * zeta + zeta * s;
}

}  // namespace

WorstCase worst_case_expectation(const std::vector<double>& q, const AmbiguitySet& amb) {
    amb.nominal.validate();
    const auto& pi = amb.nominal.probs;
    if (q.size() != pi.size()) throw std::invalid_argument("q size mismatch");
    const double rho = amb.rho;
    if (rho < 0) throw std::invalid_argument("rho must be >= 0");
    WorstCase out;
    out.probs = pi;
    if (rho == 0.0) {
        double v = 0.0;
        for (size_t i = 0; i < q.size(); ++i) v += pi[i] * q[i];
        out.value = v;
        out.mu = v;
        out.zeta = 0.0;
        return out;
    }
    double qmin = *std::min_element(q.begin(), q.end());
    double qmax = *std::max_element(q.begin(), q.end());
    if (qmax - qmin < 1e-300) {
        out.value = qmax;
        out.mu = qmax;
        out.zeta = 0.0;
        return out;
    }
    const double zeta_lo = 1e-8;
    double zeta_hi = std::max(1.0, 10.0 * (qmax - qmin));

    auto inner_mu = [&](double zeta) {
        // Optimal mu for fixed zeta, by golden section; bracket wide enough
        // that the exponential dominates outside it.
        double lo = qmin - zeta * 60.0, hi = qmax + zeta;
        double mu = golden_min([&](double m) { return dual_objective(q, pi, rho, m, zeta); },
                               lo, hi, 120);
        return mu;
    };
    auto outer = [&](double zeta) {
        return dual_objective(q, pi, rho, inner_mu(zeta), zeta);
    };

    // Expand the zeta bracket while the boundary keeps winning (small rho
    // pushes the optimum toward large zeta).
    double zeta = golden_min(outer, zeta_lo, zeta_hi, 120);
    int expand = 0;
    while (zeta > 0.95 * zeta_hi && expand < 40) {
        zeta_hi *= 4.0;
        zeta = golden_min(outer, zeta_lo, zeta_hi, 120);
        ++expand;
    }
    double mu = inner_mu(zeta);
    out.mu = mu;
    out.zeta = zeta;
    out.value = dual_objective(q, pi, rho, mu, zeta);
    // Recover the maximizing distribution.
    out.probs.resize(q.size());
    double norm = 0.0;
    double emax = -kInf;
    for (size_t i = 0; i < q.size(); ++i) emax = std::max(emax, (q[i] - mu) / zeta);
    for (size_t i = 0; i < q.size(); ++i) {
        out.probs[i] = pi[i] * std::exp((q[i] - mu) / zeta - emax);
        norm += out.probs[i];
    }
    for (auto& p : out.probs) p /= norm;
    // Degenerate tiny-zeta regime: mass on the worst scenario.
    if (!std::isfinite(norm) || norm <= 0) {
        out.probs.assign(q.size(), 0.0);
        size_t arg = std::max_element(q.begin(), q.end()) - q.begin();
        out.probs[arg] = 1.0;
        out.value = qmax;
    }
    return out;
}

}  // namespace druc
