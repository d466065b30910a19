#include "ror/flow_series.hpp"

#include "ror/errors.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

namespace ror {

namespace {

std::string strip(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    auto e = s.find_last_not_of(" \t\r");
    if (b == std::string::npos) return {};
    return s.substr(b, e - b + 1);
}

double parse_flow(const std::string& field, const std::string& where) {
    const std::string f = strip(field);
    if (f.empty()) throw DataError(where + ": missing flow value");
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), value);
    if (ec != std::errc{} || ptr != f.data() + f.size())
        throw DataError(where + ": malformed flow value '" + f + "'");
    return value;
}

} // namespace

FlowSeries read_flow_csv(std::istream& in, const std::string& name) {
    FlowSeries series;
    std::string line;
    std::size_t lineno = 0;

    if (!std::getline(in, line))
        throw DataError(name + ": empty file");
    ++lineno;
    if (strip(line) != "date,flow")
        throw DataError(name + ": expected header 'date,flow', got '" + strip(line) + "'");

    while (std::getline(in, line)) {
        ++lineno;
        if (strip(line).empty()) continue;
        auto comma = line.find(',');
        const std::string where = name + ":" + std::to_string(lineno);
        if (comma == std::string::npos)
            throw DataError(where + ": expected 'date,flow' row");
        FlowRecord rec;
        rec.date = parse_iso_date(strip(line.substr(0, comma)));
        rec.flow = parse_flow(line.substr(comma + 1), where);
        series.records.push_back(rec);
    }
    return series;
}

FlowSeries read_flow_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open flow CSV '" + path + "'");
    return read_flow_csv(in, path);
}

void write_flow_csv(const FlowSeries& series, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write flow CSV '" + path + "'");
    out << "date,flow\n";
    out.precision(10);
    for (const auto& rec : series.records)
        out << rec.date.to_string() << "," << rec.flow << "\n";
}

FlowSeries clean_series(const FlowSeries& raw) {
    if (raw.empty()) throw DataError("flow series is empty");

    FlowSeries out;
    out.records.reserve(raw.size());
    for (const auto& rec : raw.records) {
        if (rec.date.is_leap_day()) continue;
        out.records.push_back(rec);
    }
    if (out.empty()) throw DataError("flow series is empty after removing leap days");

    std::stable_sort(out.records.begin(), out.records.end(),
                     [](const FlowRecord& a, const FlowRecord& b) { return a.date < b.date; });

    for (std::size_t i = 0; i < out.records.size(); ++i) {
        const auto& rec = out.records[i];
        if (!(rec.flow > 0.0))
            throw DataError("non-positive flow " + std::to_string(rec.flow) + " on " +
                            rec.date.to_string());
        if (i > 0) {
            const auto& prev = out.records[i - 1];
            if (prev.date == rec.date)
                throw DataError("duplicate date " + rec.date.to_string());
            if (prev.date.year == rec.date.year && prev.date.next_no_leap() != rec.date)
                throw DataError("gap in flow data between " + prev.date.to_string() +
                                " and " + rec.date.to_string());
        }
    }
    return out;
}

std::vector<double> year_flows(const FlowSeries& cleaned, int year) {
    std::vector<double> flows(365, 0.0);
    std::size_t found = 0;
    for (const auto& rec : cleaned.records) {
        if (rec.date.year != year) continue;
        flows[rec.date.day_of_year_365() - 1] = rec.flow;
        ++found;
    }
    if (found != 365)
        throw DataError("year " + std::to_string(year) + " has " + std::to_string(found) +
                        " records, expected 365");
    return flows;
}

std::vector<int> complete_years(const FlowSeries& cleaned) {
    std::map<int, int> counts;
    for (const auto& rec : cleaned.records) counts[rec.date.year]++;
    std::vector<int> years;
    for (const auto& [year, n] : counts)
        if (n == 365) years.push_back(year);
    return years;
}

} // namespace ror
