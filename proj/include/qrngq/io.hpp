#pragma once

#include <string>
#include <vector>

#include "qrngq/core.hpp"
#include "qrngq/phase_sim.hpp"
#include "qrngq/qualify.hpp"

namespace qrngq {

// Write-temp-then-rename in the destination directory.
void write_file_atomic(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

// Shortest round-trip decimal, '.' separator, no locale.
std::string format_number(double v);

std::string format_histogram_csv(const IntensityHistogram& hist);
IntensityHistogram parse_histogram_csv(const std::string& text, const std::string& origin = "<string>");

// One code per line, or CSV whose header contains a `code` column.
std::vector<int> parse_codes(const std::string& text, const std::string& origin = "<string>");
std::string format_codes(const SampleSequence& seq);

// Sampled waveform: a time_s column plus named value columns.
struct TraceTable {
  double sample_rate = 0.0;
  std::vector<std::string> columns;       // excluding time_s
  std::vector<std::vector<double>> data;  // per column

  // Index of `name`, or -1.
  int find(const std::string& name) const;
  // interfered_intensity when present, the first value column otherwise.
  const std::vector<double>& signal() const;
};

TraceTable to_trace_table(const PipelineTrace& trace);
std::string format_trace_csv(const TraceTable& table);
TraceTable parse_trace_csv(const std::string& text, const std::string& origin = "<string>");

std::string format_calibration_csv(const CalibrationGrid& grid);
std::string format_calibration_cells_csv(const CalibrationGrid& grid);
std::string format_sample_size_csv(const SampleSizeStudy& study);

std::string format_acceptance_csv(const SweepResult& result);

std::string report_to_json(const QualReport& report, const Boundaries& b);
// Reads the statistics back; flags are taken verbatim from the document.
QualReport report_from_json(const std::string& text, Boundaries* boundaries = nullptr);

}  // namespace qrngq
