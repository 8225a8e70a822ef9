#include "druc/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace druc {

namespace {

constexpr int kN = kHoursPerDay;
constexpr int kMaxLloyd = 100;
constexpr int kDbaIters = 10;
constexpr int kSdtwSteps = 30;
constexpr double kSdtwStep = 0.01;

double sq(double x) { return x * x; }

double ed_squared(const Trajectory& a, const Trajectory& b) {
    double s = 0.0;
    for (int i = 0; i < kN; ++i) s += sq(a[i] - b[i]);
    return s;
}

// Minimal cumulative squared-difference cost over monotone warping paths.
double dtw_cost(const Trajectory& a, const Trajectory& b) {
    double row[kN];
    row[0] = sq(a[0] - b[0]);
    for (int j = 1; j < kN; ++j) row[j] = row[j - 1] + sq(a[0] - b[j]);
    for (int i = 1; i < kN; ++i) {
        double diag = row[0];  // D[i-1][j-1] for j below
        row[0] += sq(a[i] - b[0]);
        for (int j = 1; j < kN; ++j) {
            double best = std::min({row[j], row[j - 1], diag});
            diag = row[j];
            row[j] = best + sq(a[i] - b[j]);
        }
    }
    return row[kN - 1];
}

double soft_min3(double x, double y, double z, double gamma) {
    double m = std::min({x, y, z});
    double s = std::exp(-(x - m) / gamma) + std::exp(-(y - m) / gamma) + std::exp(-(z - m) / gamma);
    return m - gamma * std::log(s);
}

double sdtw_cost(const Trajectory& a, const Trajectory& b, double gamma) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    double R[kN + 1][kN + 1];
    for (int i = 0; i <= kN; ++i)
        for (int j = 0; j <= kN; ++j) R[i][j] = inf;
    R[0][0] = 0.0;
    for (int i = 1; i <= kN; ++i) {
        for (int j = 1; j <= kN; ++j) {
            double d = sq(a[i - 1] - b[j - 1]);
            if (i == 1 && j == 1) R[i][j] = d;
            else R[i][j] = d + soft_min3(R[i - 1][j], R[i][j - 1], R[i - 1][j - 1], gamma);
        }
    }
    return R[kN][kN];
}

// Warping path of the (hard) DTW alignment, as (i, j) index pairs.
std::vector<std::pair<int, int>> dtw_path(const Trajectory& a, const Trajectory& b) {
    double D[kN][kN];
    D[0][0] = sq(a[0] - b[0]);
    for (int j = 1; j < kN; ++j) D[0][j] = D[0][j - 1] + sq(a[0] - b[j]);
    for (int i = 1; i < kN; ++i) {
        D[i][0] = D[i - 1][0] + sq(a[i] - b[0]);
        for (int j = 1; j < kN; ++j)
            D[i][j] = std::min({D[i - 1][j], D[i][j - 1], D[i - 1][j - 1]}) + sq(a[i] - b[j]);
    }
    std::vector<std::pair<int, int>> path;
    int i = kN - 1, j = kN - 1;
    path.push_back({i, j});
    while (i > 0 || j > 0) {
        if (i == 0) --j;
        else if (j == 0) --i;
        else {
            double du = D[i - 1][j], dl = D[i][j - 1], dd = D[i - 1][j - 1];
            if (dd <= du && dd <= dl) { --i; --j; }
            else if (du <= dl) --i;
            else --j;
        }
        path.push_back({i, j});
    }
    return path;
}

}  // namespace

double squared_distance(const Trajectory& a, const Trajectory& b, const DistanceMeasure& m) {
    switch (m.kind) {
        case DistanceKind::ED: return ed_squared(a, b);
        case DistanceKind::DTW: return dtw_cost(a, b);
        case DistanceKind::SDTW:
            if (!(m.sdtw_gamma > 0)) throw std::invalid_argument("sdtw_gamma must be > 0");
            return sdtw_cost(a, b, m.sdtw_gamma);
    }
    throw std::logic_error("unreachable");
}

double distance(const Trajectory& a, const Trajectory& b, const DistanceMeasure& m) {
    switch (m.kind) {
        case DistanceKind::ED: return std::sqrt(ed_squared(a, b));
        case DistanceKind::DTW: return std::sqrt(dtw_cost(a, b));
        case DistanceKind::SDTW: return squared_distance(a, b, m);
    }
    throw std::logic_error("unreachable");
}

Trajectory sdtw_gradient(const Trajectory& a, const Trajectory& b, double gamma) {
    // Forward pass.
    constexpr double inf = std::numeric_limits<double>::infinity();
    static thread_local std::vector<double> Rbuf, Ebuf;
    Rbuf.assign((kN + 2) * (kN + 2), inf);
    Ebuf.assign((kN + 2) * (kN + 2), 0.0);
    auto R = [&](int i, int j) -> double& { return Rbuf[i * (kN + 2) + j]; };
    auto E = [&](int i, int j) -> double& { return Ebuf[i * (kN + 2) + j]; };
    auto delta = [&](int i, int j) { return sq(a[i - 1] - b[j - 1]); };
    R(0, 0) = 0.0;
    for (int i = 1; i <= kN; ++i)
        for (int j = 1; j <= kN; ++j) {
            if (i == 1 && j == 1) R(i, j) = delta(i, j);
            else R(i, j) = delta(i, j) +
                           soft_min3(R(i - 1, j), R(i, j - 1), R(i - 1, j - 1), gamma);
        }
    // Backward pass (alignment-weight recursion).
    E(kN + 1, kN + 1) = 1.0;
    R(kN + 1, kN + 1) = R(kN, kN);
    for (int i = kN; i >= 1; --i)
        for (int j = kN; j >= 1; --j) {
            double e = 0.0;
            if (i + 1 <= kN && std::isfinite(R(i + 1, j)))
                e += E(i + 1, j) * std::exp((R(i + 1, j) - R(i, j) - delta(i + 1, j)) / gamma);
            if (j + 1 <= kN && std::isfinite(R(i, j + 1)))
                e += E(i, j + 1) * std::exp((R(i, j + 1) - R(i, j) - delta(i, j + 1)) / gamma);
            if (std::isfinite(R(i + 1, j + 1)) && i + 1 <= kN + 1 && j + 1 <= kN + 1) {
                double d = (i + 1 <= kN && j + 1 <= kN) ? delta(i + 1, j + 1) : 0.0;
                e += E(i + 1, j + 1) * std::exp((R(i + 1, j + 1) - R(i, j) - d) / gamma);
            }
            if (i == kN && j == kN) e = 1.0;
            E(i, j) = e;
        }
    Trajectory g{};
    for (int j = 1; j <= kN; ++j) {
        double s = 0.0;
        for (int i = 1; i <= kN; ++i) s += E(i, j) * 2.0 * (b[j - 1] - a[i - 1]);
        g[j - 1] = s;
    }
    return g;
}

namespace {

Trajectory mean_of(const std::vector<Trajectory>& pts, const std::vector<int>& members) {
    Trajectory c{};
    for (int idx : members)
        for (int h = 0; h < kN; ++h) c[h] += pts[idx][h];
    for (int h = 0; h < kN; ++h) c[h] /= static_cast<double>(members.size());
    return c;
}

// DTW barycenter averaging: align members to the current centroid, average
// the values warped onto each centroid position.
Trajectory dba_centroid(const std::vector<Trajectory>& pts, const std::vector<int>& members,
                        Trajectory init) {
    Trajectory c = init;
    for (int it = 0; it < kDbaIters; ++it) {
        std::array<double, kN> sum{};
        std::array<int, kN> cnt{};
        for (int idx : members) {
            auto path = dtw_path(pts[idx], c);
            for (auto [i, j] : path) {
                sum[j] += pts[idx][i];
                cnt[j] += 1;
            }
        }
        for (int h = 0; h < kN; ++h)
            if (cnt[h] > 0) c[h] = sum[h] / cnt[h];
    }
    return c;
}

Trajectory sdtw_centroid(const std::vector<Trajectory>& pts, const std::vector<int>& members,
                         Trajectory init, double gamma) {
    Trajectory c = init;
    for (int it = 0; it < kSdtwSteps; ++it) {
        Trajectory g{};
        for (int idx : members) {
            Trajectory gi = sdtw_gradient(pts[idx], c, gamma);
            for (int h = 0; h < kN; ++h) g[h] += gi[h];
        }
        for (int h = 0; h < kN; ++h) c[h] -= kSdtwStep * g[h] / static_cast<double>(members.size());
    }
    return c;
}

Trajectory update_centroid(const std::vector<Trajectory>& pts, const std::vector<int>& members,
                           const Trajectory& current, const DistanceMeasure& m) {
    switch (m.kind) {
        case DistanceKind::ED: return mean_of(pts, members);
        case DistanceKind::DTW: return dba_centroid(pts, members, mean_of(pts, members));
        case DistanceKind::SDTW:
            return sdtw_centroid(pts, members, mean_of(pts, members), m.sdtw_gamma);
    }
    throw std::logic_error("unreachable");
}

}  // namespace

Clustering kmeans(const Dataset& d, int S, const DistanceMeasure& m, uint64_t seed) {
    const int N = static_cast<int>(d.series.size());
    if (S < 1) throw std::invalid_argument("S must be >= 1");
    if (S > N) throw std::invalid_argument("S exceeds the number of series");

    std::vector<Trajectory> pts(N);
    for (int i = 0; i < N; ++i) pts[i] = d.series[i].values;

    std::mt19937_64 rng(seed);
    // k-means++ seeding under the active measure.
    std::vector<Trajectory> centroids;
    {
        std::uniform_int_distribution<int> pick(0, N - 1);
        centroids.push_back(pts[pick(rng)]);
        std::vector<double> d2(N);
        while (static_cast<int>(centroids.size()) < S) {
            double total = 0.0;
            for (int i = 0; i < N; ++i) {
                double best = std::numeric_limits<double>::infinity();
                for (const auto& c : centroids)
                    best = std::min(best, squared_distance(pts[i], c, m));
                d2[i] = std::max(best, 0.0);  // SDTW cost may be slightly negative
                total += d2[i];
            }
            if (total <= 0) {
                // All points coincide with a centroid; take the first unused point.
                int next = static_cast<int>(centroids.size());
                centroids.push_back(pts[std::min(next, N - 1)]);
                continue;
            }
            std::uniform_real_distribution<double> U(0.0, total);
            double r = U(rng), acc = 0.0;
            int chosen = N - 1;
            for (int i = 0; i < N; ++i) {
                acc += d2[i];
                if (acc >= r) {
                    chosen = i;
                    break;
                }
            }
            centroids.push_back(pts[chosen]);
        }
    }

    std::vector<int> assign(N, -1);
    std::vector<double> lloyd_trace;
    for (int iter = 0; iter < kMaxLloyd; ++iter) {
        bool changed = false;
        for (int i = 0; i < N; ++i) {
            int best = 0;
            double bestd = squared_distance(pts[i], centroids[0], m);
            for (int s = 1; s < S; ++s) {
                double v = squared_distance(pts[i], centroids[s], m);
                if (v < bestd) {
                    bestd = v;
                    best = s;
                }
            }
            if (assign[i] != best) {
                assign[i] = best;
                changed = true;
            }
        }
        // Empty clusters are reseeded from the globally farthest point.
        std::vector<std::vector<int>> members(S);
        for (int i = 0; i < N; ++i) members[assign[i]].push_back(i);
        for (int s = 0; s < S; ++s) {
            if (!members[s].empty()) continue;
            int far = 0;
            double fard = -std::numeric_limits<double>::infinity();
            for (int i = 0; i < N; ++i) {
                if (static_cast<int>(members[assign[i]].size()) <= 1) continue;
                double v = squared_distance(pts[i], centroids[assign[i]], m);
                if (v > fard) {
                    fard = v;
                    far = i;
                }
            }
            auto& old = members[assign[far]];
            old.erase(std::find(old.begin(), old.end(), far));
            assign[far] = s;
            members[s].push_back(far);
            centroids[s] = pts[far];
            changed = true;
        }
        {
            double in = 0.0;
            for (int i = 0; i < N; ++i)
                in += squared_distance(pts[i], centroids[assign[i]], m);
            lloyd_trace.push_back(in);
        }
        if (!changed && iter > 0) break;
        for (int s = 0; s < S; ++s) centroids[s] = update_centroid(pts, members[s], centroids[s], m);
    }

    Clustering out;
    out.assignments = assign;
    out.centroids = centroids;
    out.counts.assign(S, 0);
    for (int i = 0; i < N; ++i) out.counts[assign[i]] += 1;
    for (int i = 0; i < N; ++i) out.inertia += squared_distance(pts[i], centroids[assign[i]], m);
    Trajectory global = mean_of(pts, [&] {
        std::vector<int> all(N);
        for (int i = 0; i < N; ++i) all[i] = i;
        return all;
    }());
    double total = 0.0;
    for (int i = 0; i < N; ++i) total += squared_distance(pts[i], global, m);
    out.variance_captured = total > 0 ? 1.0 - out.inertia / total : 1.0;
    out.lloyd_inertia = std::move(lloyd_trace);
    return out;
}

std::vector<std::pair<int, double>> elbow_scan(const Dataset& d, int S_min, int S_max,
                                               const DistanceMeasure& m, uint64_t seed) {
    if (S_min < 1 || S_max < S_min) throw std::invalid_argument("bad S range");
    std::vector<std::pair<int, double>> out;
    for (int S = S_min; S <= S_max; ++S)
        out.push_back({S, kmeans(d, S, m, seed).variance_captured});
    return out;
}

DistanceMeasure parse_distance(const std::string& name, double sdtw_gamma) {
    DistanceMeasure m;
    m.sdtw_gamma = sdtw_gamma;
    if (name == "ed" || name == "ED") m.kind = DistanceKind::ED;
    else if (name == "dtw" || name == "DTW") m.kind = DistanceKind::DTW;
    else if (name == "sdtw" || name == "SDTW") m.kind = DistanceKind::SDTW;
    else throw std::invalid_argument("unknown distance measure: " + name);
    return m;
}

std::string distance_name(DistanceKind k) {
    switch (k) {
        case DistanceKind::ED: return "ed";
        case DistanceKind::DTW: return "dtw";
        case DistanceKind::SDTW: return "sdtw";
    }
    return "?";
}

}  // namespace druc
