#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "druc/netload.hpp"
#include "test_util.hpp"

using namespace druc;

namespace {
std::string tmp_path(const char* name) { return std::string("/tmp/druc_test_") + name; }
}  // namespace

TEST_CASE("hourly rows aggregate as identity") {
    auto p = tmp_path("hourly.csv");
    testutil::write_csv(p, "2020-01-01", 1, 1, [](int, int) { return 100.0; });
    auto r = ingest_csv(p, 60);
    REQUIRE(r.dataset.size() == 1);
    CHECK(r.dropped_days == 0);
    for (double v : r.dataset.series[0].values) CHECK(v == doctest::Approx(100.0));
}

TEST_CASE("five-minute rows average to the hourly mean") {
    auto p = tmp_path("5min.csv");
    testutil::write_csv(p, "2020-03-01", 2, 12, [](int, int) { return 60.0; });
    auto r = ingest_csv(p, 5);
    REQUIRE(r.dataset.size() == 2);
    for (const auto& s : r.dataset.series)
        for (double v : s.values) CHECK(v == doctest::Approx(60.0));
}

TEST_CASE("malformed timestamp errors with the line number") {
    auto p = tmp_path("bad.csv");
    {
        std::ofstream out(p);
        out << "timestamp,net_load_mw\n";
        out << "2020-01-01T00:00:00,5\n";
        out << "not-a-time,7\n";
    }
    try {
        ingest_csv(p, 60);
        FAIL("expected error");
    } catch (const std::exception& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
}

TEST_CASE("incomplete days are dropped with a count") {
    auto p = tmp_path("incomplete.csv");
    {
        std::ofstream out(p);
        out << "timestamp,net_load_mw\n";
        for (int h = 0; h < 24; ++h) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "2020-01-01T%02d:00:00,50\n", h);
            out << buf;
        }
        out << "2020-01-02T00:00:00,60\n";  // only one hour
    }
    auto r = ingest_csv(p, 60);
    CHECK(r.dataset.size() == 1);
    CHECK(r.dropped_days == 1);
}

TEST_CASE("zero complete days is an error") {
    auto p = tmp_path("empty.csv");
    {
        std::ofstream out(p);
        out << "timestamp,net_load_mw\n";
        out << "2020-01-01T00:00:00,60\n";
    }
    CHECK_THROWS(ingest_csv(p, 60));
}

TEST_CASE("scale_to_peak halves when max is twice the target") {
    Dataset d;
    NetLoadSeries s;
    s.date = parse_date("2020-01-01");
    for (int h = 0; h < 24; ++h) s.values[h] = 100.0;
    s.values[5] = 2166.0;
    d.series.push_back(s);
    auto scaled = scale_to_peak(d, 1083.0);
    CHECK(scaled.series[0].values[5] == doctest::Approx(1083.0));
    CHECK(scaled.series[0].values[0] == doctest::Approx(50.0));
}

TEST_CASE("scaling is idempotent to the bit") {
    Dataset d;
    for (int day = 0; day < 3; ++day) {
        NetLoadSeries s;
        s.date = parse_date(day == 0 ? "2020-01-01" : (day == 1 ? "2020-01-02" : "2020-01-03"));
        for (int h = 0; h < 24; ++h) s.values[h] = 37.5 * (h + 1) + day;
        d.series.push_back(s);
    }
    auto once = scale_to_peak(d, 1083.0);
    auto twice = scale_to_peak(once, 1083.0);
    for (size_t i = 0; i < once.series.size(); ++i)
        for (int h = 0; h < 24; ++h) CHECK(once.series[i].values[h] == twice.series[i].values[h]);
}

TEST_CASE("non-positive maximum rejects scaling") {
    Dataset d;
    NetLoadSeries s;
    s.date = parse_date("2020-01-01");
    for (int h = 0; h < 24; ++h) s.values[h] = -5.0;
    d.series.push_back(s);
    CHECK_THROWS(scale_to_peak(d, 1083.0));
}

TEST_CASE("windowing restricts without altering series") {
    auto p = tmp_path("window.csv");
    // Jul 2018 through Jun 2019 inclusive: 365 days.
    testutil::write_csv(p, "2018-07-01", 730, 1,
                        [](int day, int h) { return testutil::synthetic_netload(day, h); });
    auto d = ingest_csv(p, 60).dataset;
    REQUIRE(d.size() == 730);

    auto one_month = window(d, parse_date("2018-07-01"), 1);
    CHECK(one_month.size() == 31);

    auto year = window(d, parse_date("2018-07-01"), 12);
    CHECK(year.size() == 365);

    auto all = window(d, parse_date("2018-07-01"), 24);
    CHECK(all.size() == d.size());

    // Every windowed series appears identically in the parent.
    for (const auto& s : year.series) {
        bool found = false;
        for (const auto& t : d.series)
            if (t.date == s.date) {
                found = true;
                for (int h = 0; h < 24; ++h) CHECK(t.values[h] == s.values[h]);
            }
        CHECK(found);
    }
}

TEST_CASE("empty window errors") {
    Dataset d;
    NetLoadSeries s;
    s.date = parse_date("2020-01-01");
    d.series.push_back(s);
    CHECK_THROWS(window(d, parse_date("2021-06-01"), 1));
}
