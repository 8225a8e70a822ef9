#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <string>
#include <vector>

// Shared helpers for the test suites. The KL oracle here is deliberately
// independent of the dual-based implementation: it walks the exponential
// tilt curve p(t) ~ pi * e^{t q} and bisects t on the KL constraint.

namespace testutil {

inline double kl(const std::vector<double>& p, const std::vector<double>& q) {
    double s = 0.0;
    for (size_t i = 0; i < p.size(); ++i)
        if (p[i] > 0) s += p[i] * std::log(p[i] / q[i]);
    return s;
}

inline std::vector<double> tilt(const std::vector<double>& pi, const std::vector<double>& q,
                                double t) {
    double qmax = *std::max_element(q.begin(), q.end());
    std::vector<double> p(pi.size());
    double z = 0.0;
    for (size_t i = 0; i < pi.size(); ++i) {
        p[i] = pi[i] * std::exp(t * (q[i] - qmax));
        z += p[i];
    }
    for (auto& v : p) v /= z;
    return p;
}

// max p.q subject to KL(p||pi) <= rho over the simplex.
inline double kl_worst_case_oracle(const std::vector<double>& q, const std::vector<double>& pi,
                                   double rho, std::vector<double>* arg = nullptr) {
    auto dot = [&](const std::vector<double>& p) {
        double s = 0.0;
        for (size_t i = 0; i < p.size(); ++i) s += p[i] * q[i];
        return s;
    };
    if (rho <= 0) {
        if (arg) *arg = pi;
        return dot(pi);
    }
    // KL along the tilt curve is nondecreasing in t; find the largest t whose
    // tilt stays inside the ball (or the curve's KL supremum if below rho).
    double t_hi = 1.0;
    double spread = *std::max_element(q.begin(), q.end()) - *std::min_element(q.begin(), q.end());
    if (spread <= 0) {
        if (arg) *arg = pi;
        return dot(pi);
    }
    t_hi = 1.0 / spread;
    while (kl(tilt(pi, q, t_hi), pi) < rho && t_hi < 1e12 / spread) t_hi *= 2.0;
    if (kl(tilt(pi, q, t_hi), pi) < rho) {
        auto p = tilt(pi, q, t_hi);
        if (arg) *arg = p;
        return dot(p);
    }
    double lo = 0.0, hi = t_hi;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (kl(tilt(pi, q, mid), pi) < rho) lo = mid;
        else hi = mid;
    }
    auto p = tilt(pi, q, lo);
    if (arg) *arg = p;
    return dot(p);
}

inline std::vector<double> random_simplex(std::mt19937_64& rng, int n) {
    std::exponential_distribution<double> E(1.0);
    std::vector<double> p(n);
    double s = 0.0;
    for (auto& v : p) {
        v = E(rng) + 1e-3;
        s += v;
    }
    for (auto& v : p) v /= s;
    return p;
}

// Write a raw net-load CSV covering `days` consecutive days from `start_date`
// (ISO date), `per_hour` samples per hour, value = f(day, hour).
template <typename F>
void write_csv(const std::string& path, const std::string& start_date, int days, int per_hour,
               F f) {
    std::ofstream out(path);
    out << "timestamp,net_load_mw\n";
    int y, m, d;
    std::sscanf(start_date.c_str(), "%d-%d-%d", &y, &m, &d);
    auto days_in_month = [](int yy, int mm) {
        static const int t[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
        if (mm == 2 && ((yy % 4 == 0 && yy % 100 != 0) || yy % 400 == 0)) return 29;
        return t[mm - 1];
    };
    int minutes = 60 / per_hour;
    char buf[64];
    for (int day = 0; day < days; ++day) {
        for (int h = 0; h < 24; ++h) {
            for (int k = 0; k < per_hour; ++k) {
                std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:00,%.6f\n", y, m, d, h,
                              k * minutes, f(day, h));
                out << buf;
            }
        }
        if (++d > days_in_month(y, m)) {
            d = 1;
            if (++m > 12) {
                m = 1;
                ++y;
            }
        }
    }
}

// Synthetic duck-curve-ish daily net load with seasonal and noise terms.
inline double synthetic_netload(int day, int hour, unsigned seed = 42) {
    double base = 1400.0 + 350.0 * std::sin(2.0 * M_PI * (day % 365) / 365.0);
    double shape = 1.0 + 0.45 * std::sin(2.0 * M_PI * (hour - 17.0) / 24.0) -
                   0.35 * std::exp(-0.5 * std::pow((hour - 12.5) / 2.5, 2));
    std::mt19937 rng(seed + 977u * day + 31u * hour);
    std::normal_distribution<double> N(0.0, 60.0);
    return base * shape + N(rng);
}

}  // namespace testutil
