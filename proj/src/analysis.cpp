#include "stp/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

namespace stp {

double downscale_factor(int frame_w, int frame_h, int cnn_size) {
  if (cnn_size <= 0) throw std::invalid_argument("cnn_size must be positive");
  return std::max(1.0, double(std::max(frame_w, frame_h)) / double(cnn_size));
}

double resized_miss_rate(double base_miss_rate, double downscale, double exponent) {
  const double keep = (1.0 - base_miss_rate) * std::pow(std::max(downscale, 1.0), -exponent);
  return std::clamp(1.0 - keep, 0.0, 1.0);
}

std::vector<TradeoffRow> compare(std::span<const Report> reports, std::size_t baseline) {
  if (reports.size() < 2) throw ReportError("compare needs at least two reports");
  if (baseline >= reports.size()) throw ReportError("baseline index out of range");
  const Report& base = reports[baseline];
  for (const Report& r : reports) {
    if (r.scenario_fingerprint != base.scenario_fingerprint) {
      throw ReportError("report '" + r.label() + "' was produced from scenario '" +
                        r.scenario_name + "', not '" + base.scenario_name + "'");
    }
  }
  std::vector<TradeoffRow> rows;
  for (const Report& r : reports) {
    TradeoffRow row;
    row.label = r.label();
    row.tiles = r.grid.size();
    row.sen = r.summary.sen;
    row.apt = r.summary.apt;
    if (r.summary.sen && base.summary.sen) row.delta_sen = *r.summary.sen - *base.summary.sen;
    if (r.summary.apt && base.summary.apt && *base.summary.apt > 0.0) {
      row.apt_ratio = *r.summary.apt / *base.summary.apt;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_tradeoff_table(std::ostream& os, std::span<const TradeoffRow> rows) {
  auto cell = [](const std::optional<double>& v) {
    if (!v) return std::string("n/a");
    std::ostringstream o;
    o << std::setprecision(6) << *v;
    return o.str();
  };
  os << "config\ttiles\tsen\tapt\tdelta_sen\tapt_ratio\n";
  for (const TradeoffRow& r : rows) {
    os << r.label << '\t' << r.tiles << '\t' << cell(r.sen) << '\t' << cell(r.apt) << '\t'
       << cell(r.delta_sen) << '\t' << cell(r.apt_ratio) << '\n';
  }
}

}  // namespace stp
