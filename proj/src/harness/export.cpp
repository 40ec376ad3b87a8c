#include "twinlane/harness/export.hpp"

#include <fstream>
#include <limits>
#include <sstream>

#include "twinlane/text.hpp"

namespace twinlane::harness {

namespace {

void append_row(std::string& out, std::initializer_list<double> values) {
  bool first = true;
  for (double v : values) {
    if (!first) out += ',';
    out += format_double(v);
    first = false;
  }
  out += '\n';
}

}  // namespace

std::string format_csv(const RunLog& log) {
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  std::string out = std::string(kCsvHeader) + "\n";
  for (const TickRecord& t : log.ticks) {
    const bool valid = t.plan.valid;
    append_row(out, {t.time, t.state.x, t.state.y, t.state.heading, t.state.speed, t.inputs.steering, t.inputs.throttle,
                     t.inputs.braking, valid ? t.plan.target.x() : nan, valid ? t.plan.target.y() : nan,
                     static_cast<double>(t.detections.size())});
  }
  return out;
}

void export_csv(const RunLog& log, const std::filesystem::path& path) { write_text(path, format_csv(log)); }

CsvTable parse_csv(std::string_view text) {
  const auto lines = split_lines(text);
  if (lines.empty()) throw IoError("csv: missing header");
  CsvTable table;
  for (auto h : split(trim(lines[0]), ',')) table.header.emplace_back(h);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto cells = split(trim(lines[i]), ',');
    if (cells.size() != table.header.size()) {
      throw IoError("csv line " + std::to_string(i + 1) + ": expected " + std::to_string(table.header.size()) +
                    " columns, got " + std::to_string(cells.size()));
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (auto c : cells) {
      try {
        row.push_back(parse_double(c));
      } catch (const InvalidArgument& e) {
        throw IoError("csv line " + std::to_string(i + 1) + ": " + e.what());
      }
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

CsvTable read_csv(const std::filesystem::path& path) { return parse_csv(read_text(path)); }

void export_plan_csv(const RunLog& log, const std::filesystem::path& path) {
  std::string out = std::string(kPlanCsvHeader) + "\n";
  for (std::size_t k = 0; k < log.ticks.size(); ++k) {
    const TickRecord& t = log.ticks[k];
    const std::string target = t.plan.valid
                                   ? format_double(t.plan.target.x()) + "," + format_double(t.plan.target.y())
                                   : std::string("nan,nan");
    const std::string frame = std::to_string(k);
    bool any = false;
    for (const Detection& d : t.detections) {
      if (!d.position) continue;
      out += frame + "," + format_double(d.position->x()) + "," + format_double(d.position->y()) + "," +
             std::string(to_string(d.label)) + "," + target + "\n";
      any = true;
    }
    if (!any) out += frame + ",,,," + target + "\n";
  }
  write_text(path, out);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path.string() + "' for writing");
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
  f.close();
  if (!f) throw IoError("write failed for '" + path.string() + "'");
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void save_json(const Json& j, const std::filesystem::path& path) { write_text(path, j.dump(2) + "\n"); }

Json load_json(const std::filesystem::path& path) {
  const std::string text = read_text(path);
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

void save_run_log(const RunLog& log, const std::filesystem::path& path) { write_text(path, to_json(log).dump() + "\n"); }

RunLog load_run_log(const std::filesystem::path& path) { return run_log_from_json(load_json(path)); }

}  // namespace twinlane::harness
