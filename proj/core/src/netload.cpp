#include "druc/netload.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <stdexcept>

namespace druc {

namespace chrono = std::chrono;

double Dataset::max_value() const {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& s : series)
        for (double v : s.values) m = std::max(m, v);
    return m;
}

chrono::year_month_day parse_date(const std::string& iso) {
    int y, mo, da;
    if (std::sscanf(iso.c_str(), "%d-%d-%d", &y, &mo, &da) != 3)
        throw std::invalid_argument("unparsable date: " + iso);
    chrono::year_month_day ymd{chrono::year{y}, chrono::month{unsigned(mo)},
                               chrono::day{unsigned(da)}};
    if (!ymd.ok()) throw std::invalid_argument("invalid calendar date: " + iso);
    return ymd;
}

std::string format_date(chrono::year_month_day d) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", int(d.year()), unsigned(d.month()),
                  unsigned(d.day()));
    return buf;
}

namespace {

struct Stamp {
    chrono::year_month_day date;
    int hour;  // 0..23
};

// Accepts "YYYY-MM-DD HH:MM[:SS]" and "YYYY-MM-DDTHH:MM[:SS]".
Stamp parse_timestamp(const std::string& ts) {
    int y, mo, da, hh, mi = 0, ss = 0;
    char sep;
    int n = std::sscanf(ts.c_str(), "%d-%d-%d%c%d:%d:%d", &y, &mo, &da, &sep, &hh, &mi, &ss);
    if (n < 5 || (sep != 'T' && sep != ' ') || hh < 0 || hh > 23 || mi < 0 || mi > 59)
        throw std::invalid_argument("unparsable timestamp: " + ts);
    chrono::year_month_day ymd{chrono::year{y}, chrono::month{unsigned(mo)},
                               chrono::day{unsigned(da)}};
    if (!ymd.ok()) throw std::invalid_argument("invalid calendar date: " + ts);
    return {ymd, hh};
}

}  // namespace

IngestResult ingest_csv(const std::string& path, int granularity_minutes) {
    if (granularity_minutes < 1 || granularity_minutes > 60 || 60 % granularity_minutes != 0)
        throw std::invalid_argument("granularity must divide 60 minutes");
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    const int per_hour = 60 / granularity_minutes;

    struct DayAcc {
        std::array<double, kHoursPerDay> sum{};
        std::array<int, kHoursPerDay> count{};
    };
    std::map<chrono::sys_days, DayAcc> days;

    std::string line;
    int lineno = 0;
    bool header_checked = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (!header_checked) {
            header_checked = true;
            if (line.find("timestamp") != std::string::npos) continue;  // header row
        }
        auto comma = line.find(',');
        if (comma == std::string::npos)
            throw std::runtime_error("line " + std::to_string(lineno) + ": missing comma");
        Stamp st;
        try {
            st = parse_timestamp(line.substr(0, comma));
        } catch (const std::exception& e) {
            throw std::runtime_error("line " + std::to_string(lineno) + ": " + e.what());
        }
        char* end = nullptr;
        std::string valstr = line.substr(comma + 1);
        double v = std::strtod(valstr.c_str(), &end);
        if (end == valstr.c_str() || !std::isfinite(v))
            throw std::runtime_error("line " + std::to_string(lineno) + ": bad value '" +
                                     valstr + "'");
        auto& acc = days[chrono::sys_days{st.date}];
        acc.sum[st.hour] += v;
        acc.count[st.hour] += 1;
    }

    IngestResult out;
    for (const auto& [day, acc] : days) {
        bool complete = true;
        NetLoadSeries s;
        s.date = chrono::year_month_day{day};
        for (int h = 0; h < kHoursPerDay; ++h) {
            if (acc.count[h] != per_hour) {
                complete = false;
                break;
            }
            s.values[h] = acc.sum[h] / per_hour;
        }
        if (complete) out.dataset.series.push_back(s);
        else ++out.dropped_days;
    }
    if (out.dataset.series.empty()) throw std::runtime_error("no complete days in " + path);
    return out;
}

Dataset scale_to_peak(const Dataset& d, double peak_mw) {
    if (peak_mw <= 0) throw std::invalid_argument("peak_mw must be positive");
    double mx = d.max_value();
    if (!(mx > 0)) throw std::invalid_argument("dataset maximum must be positive to scale");
    double f = peak_mw / mx;
    Dataset out = d;
    out.peak_mw = peak_mw;
    for (auto& s : out.series)
        for (double& v : s.values) v *= f;
    return out;
}

Dataset window(const Dataset& d, chrono::year_month_day start, int months) {
    if (months < 1) throw std::invalid_argument("months must be >= 1");
    chrono::year_month_day stop_ymd = start + chrono::months{months};
    if (!stop_ymd.ok()) stop_ymd = chrono::year_month_day{stop_ymd.year(), stop_ymd.month(),
                                                          chrono::day{1}};
    chrono::sys_days lo{start}, hi{stop_ymd};
    Dataset out;
    out.peak_mw = d.peak_mw;
    for (const auto& s : d.series) {
        chrono::sys_days t{s.date};
        if (t >= lo && t < hi) out.series.push_back(s);
    }
    if (out.series.empty()) throw std::runtime_error("empty window");
    return out;
}

}  // namespace druc
