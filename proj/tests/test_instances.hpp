#pragma once

#include <random>

#include "druc/ambiguity.hpp"
#include "druc/uc_model.hpp"
#include "test_util.hpp"

// Random tiny DRUC instances that fit the extensive-form enumeration budget.

namespace testutil {

inline druc::SystemConfig random_tiny_config(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    druc::SystemConfig cfg;
    cfg.horizon = 4 + int(rng() % 3);  // 4..6 hours
    int units = 1 + int(rng() % 2);
    for (int g = 0; g < units; ++g) {
        druc::ThermalUnit u;
        u.name = "g" + std::to_string(g);
        u.p_max = 80.0 + 150.0 * U(rng);
        u.p_min = u.p_max * (0.1 + 0.3 * U(rng));
        u.t_up = 1 + int(rng() % 3);
        u.t_down = 1 + int(rng() % 3);
        u.ramp_up = u.p_max * (0.4 + 0.6 * U(rng));
        u.ramp_down = u.p_max * (0.4 + 0.6 * U(rng));
        u.startup_ramp = std::max(u.p_min, u.p_max * (0.3 + 0.7 * U(rng)));
        u.shutdown_ramp = std::max(u.p_min, u.p_max * (0.3 + 0.7 * U(rng)));
        u.cost_linear = 8.0 + 40.0 * U(rng);
        u.cost_fixed = 50.0 + 250.0 * U(rng);
        u.cost_startup = 100.0 + 900.0 * U(rng);
        u.initial_on = rng() % 2 == 0;
        cfg.units.push_back(u);
    }
    cfg.curtailment_cost = 500.0;
    return cfg;
}

inline druc::AmbiguitySet random_tiny_amb(std::mt19937_64& rng, const druc::SystemConfig& cfg,
                                          double rho) {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    double cap = 0.0;
    for (const auto& u : cfg.units) cap += u.p_max;
    druc::AmbiguitySet amb;
    amb.rho = rho;
    int S = 2 + int(rng() % 2);
    amb.nominal.probs = random_simplex(rng, S);
    for (int w = 0; w < S; ++w) {
        druc::Trajectory xi{};
        for (int h = 0; h < cfg.horizon; ++h) xi[h] = cap * (-0.1 + 1.3 * U(rng));
        amb.nominal.support.push_back(xi);
    }
    return amb;
}

}  // namespace testutil
