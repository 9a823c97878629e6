#include "pdsplit/metrics_csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace pdsplit {

std::string format_shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string format_metrics_row(const TraceEntry& e, const CsvOptions& opt) {
  std::string row = std::to_string(e.iter);
  row += ',';
  if (opt.include_time) row += format_shortest(e.time_s);
  row += ',';
  if (e.objective) row += format_shortest(*e.objective);
  row += ',';
  row += format_shortest(e.residual);
  row += ',';
  if (e.isnr) row += format_shortest(*e.isnr);
  return row;
}

MetricsCsvWriter::MetricsCsvWriter(std::ostream& out, CsvOptions opt) : out_(out), opt_(opt) {
  out_ << kMetricsHeader << '\n';
}

void MetricsCsvWriter::write(const TraceEntry& e) { out_ << format_metrics_row(e, opt_) << '\n'; }

std::string metrics_to_csv(const MetricsTrace& trace, const CsvOptions& opt) {
  std::ostringstream ss;
  MetricsCsvWriter w(ss, opt);
  for (const auto& e : trace.entries) w.write(e);
  return ss.str();
}

void write_metrics_csv(const std::filesystem::path& path, const MetricsTrace& trace,
                       const CsvOptions& opt) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error("cannot open '" + path.string() + "' for writing");
  out << metrics_to_csv(trace, opt);
  if (!out) throw io_error("error writing '" + path.string() + "'");
}

}  // namespace pdsplit
