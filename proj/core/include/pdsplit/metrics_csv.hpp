#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

#include "pdsplit/solvers.hpp"

namespace pdsplit {

inline constexpr const char* kMetricsHeader = "iter,time_s,objective,fixed_point_residual,isnr";

// Shortest decimal string that parses back to exactly `v`.
std::string format_shortest(double v);

struct CsvOptions {
  bool include_time = true;  // when false the time_s column is left empty
};

// One line without the trailing newline; missing metrics become empty fields.
std::string format_metrics_row(const TraceEntry& e, const CsvOptions& opt = {});

// Streams a trace as CSV, header first.
class MetricsCsvWriter {
 public:
  MetricsCsvWriter(std::ostream& out, CsvOptions opt = {});
  void write(const TraceEntry& e);

 private:
  std::ostream& out_;
  CsvOptions opt_;
};

std::string metrics_to_csv(const MetricsTrace& trace, const CsvOptions& opt = {});
void write_metrics_csv(const std::filesystem::path& path, const MetricsTrace& trace,
                       const CsvOptions& opt = {});

}  // namespace pdsplit
