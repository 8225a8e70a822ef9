#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <string>
#include <vector>

namespace druc {

inline constexpr int kHoursPerDay = 24;

// One day's hourly net-load trajectory (MW). Negative values are allowed:
// renewable generation may exceed load.
struct NetLoadSeries {
    std::chrono::year_month_day date;
    std::array<double, kHoursPerDay> values{};
};

struct Dataset {
    std::vector<NetLoadSeries> series;  // dates strictly increasing
    double peak_mw = 0.0;               // scaling target, > 0 once scaled

    size_t size() const { return series.size(); }
    double max_value() const;
};

struct IngestResult {
    Dataset dataset;
    int dropped_days = 0;  // incomplete days discarded
};

// Raw CSV with header `timestamp,net_load_mw`, ISO-8601 timestamps,
// `granularity_minutes` minutes between samples. Sub-hourly samples are
// averaged into hourly means; days with missing hours are dropped.
IngestResult ingest_csv(const std::string& path, int granularity_minutes = 60);

// Multiply every value by peak_mw / current maximum.
Dataset scale_to_peak(const Dataset& d, double peak_mw);

// Contiguous sub-dataset covering [start, start + months).
Dataset window(const Dataset& d, std::chrono::year_month_day start, int months);

std::chrono::year_month_day parse_date(const std::string& iso);
std::string format_date(std::chrono::year_month_day d);

}  // namespace druc
