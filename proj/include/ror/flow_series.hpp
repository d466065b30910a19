#pragma once

#include "ror/dates.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace ror {

struct FlowRecord {
    Date date;
    double flow = 0.0; // m^3/s
};

/// Dated daily flow observations. After clean_series the records are
/// strictly increasing in date, strictly positive and free of leap days.
struct FlowSeries {
    std::vector<FlowRecord> records;

    bool empty() const { return records.empty(); }
    std::size_t size() const { return records.size(); }
};

/// Reads a `date,flow` CSV (ISO-8601 dates, flow in m^3/s). Rows are
/// returned as-is; validation belongs to clean_series. Throws DataError
/// with the offending line number on malformed input.
FlowSeries read_flow_csv(const std::string& path);
FlowSeries read_flow_csv(std::istream& in, const std::string& name);

void write_flow_csv(const FlowSeries& series, const std::string& path);

/// Drops leap-day records, sorts by date and validates: rejects empty
/// results, non-positive flows (named by date), duplicate dates, and
/// gaps within a year (dates must be contiguous on the 365-day calendar).
FlowSeries clean_series(const FlowSeries& raw);

/// Extracts one calendar year as 365 flows indexed by day-of-year - 1.
/// Throws DataError if the year is incomplete.
std::vector<double> year_flows(const FlowSeries& cleaned, int year);

/// Years fully covered (365 records) by the series, ascending.
std::vector<int> complete_years(const FlowSeries& cleaned);

} // namespace ror
