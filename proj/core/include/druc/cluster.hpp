#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "druc/netload.hpp"

namespace druc {

enum class DistanceKind { ED, DTW, SDTW };

struct DistanceMeasure {
    DistanceKind kind = DistanceKind::ED;
    double sdtw_gamma = 1.0;  // SDTW only, > 0
};

using Trajectory = std::array<double, kHoursPerDay>;

// ED: Euclidean norm. DTW: sqrt of the minimal cumulative squared-difference
// cost over monotone warping paths (full matrix, no band). SDTW: soft-min
// relaxation of the same cumulative cost; may be negative, not a metric.
double distance(const Trajectory& a, const Trajectory& b, const DistanceMeasure& m);

// The measure's squared/cumulative cost, used for inertia and assignment:
// ED^2, the DTW cumulative cost, or the SDTW value itself.
double squared_distance(const Trajectory& a, const Trajectory& b, const DistanceMeasure& m);

// Gradient of the soft-DTW cost w.r.t. the second argument.
Trajectory sdtw_gradient(const Trajectory& a, const Trajectory& b, double gamma);

struct Clustering {
    std::vector<int> assignments;         // series index -> cluster id 0..S-1
    std::vector<Trajectory> centroids;    // S centroids
    std::vector<int> counts;              // members per cluster, all > 0
    double inertia = 0.0;                 // sum of squared distances to own centroid
    double variance_captured = 0.0;       // 1 - inertia / total dispersion
    std::vector<double> lloyd_inertia;    // inertia after each assignment step
};

Clustering kmeans(const Dataset& d, int S, const DistanceMeasure& m, uint64_t seed);

std::vector<std::pair<int, double>> elbow_scan(const Dataset& d, int S_min, int S_max,
                                               const DistanceMeasure& m, uint64_t seed);

DistanceMeasure parse_distance(const std::string& name, double sdtw_gamma = 1.0);
std::string distance_name(DistanceKind k);

}  // namespace druc
