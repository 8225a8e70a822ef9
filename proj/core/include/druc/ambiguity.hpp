#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "druc/cluster.hpp"

namespace druc {

// Finite-support empirical distribution over centroid scenarios.
struct NominalDistribution {
    std::vector<Trajectory> support;
    std::vector<double> probs;  // sum to 1, all > 0

    int size() const { return static_cast<int>(probs.size()); }
    void validate() const;
};

struct AmbiguitySet {
    NominalDistribution nominal;
    double rho = 0.0;  // KL divergence tolerance, >= 0
};

NominalDistribution build_nominal(const Clustering& c, int N);

// sum p log(p/q); 0 log(0/q) = 0. Throws when q has a zero entry.
double kl_divergence(const std::vector<double>& p, const std::vector<double>& q);

// Lower regularized incomplete gamma P(a, x).
double regularized_gamma_p(double a, double x);

// 1-eta quantile of chi-square with df degrees of freedom, by bisection on
// the regularized incomplete gamma CDF.
double chi_square_quantile(int df, double prob);

// rho = chi2_{S-1, 1-eta} / (2N).
double asymptotic_rho(long N, int S, double eta);

// exp with a first-order linear extension above the overflow threshold,
// preserving monotonicity and convexity for line searches on the dual.
inline double safe_exp(double e) {
    if (e <= 700.0) return std::exp(e);
    return std::exp(700.0) * (1.0 + (e - 700.0));
}

struct WorstCase {
    double value = 0.0;
    std::vector<double> probs;
    double mu = 0.0;    // dual multiplier of the normalization constraint
    double zeta = 0.0;  // dual multiplier of the KL constraint
};

// max_{KL(p||nominal) <= rho} sum p_i q_i via the 2-variable dual
// min_{mu, zeta >= 0} mu + rho zeta + zeta sum pi_o e^{(q-mu)/zeta - 1},
// solved by nested golden-section search. Serves as the solver-independent
// oracle for the decomposition loop.
WorstCase worst_case_expectation(const std::vector<double>& q_values, const AmbiguitySet& amb);

}  // namespace druc
