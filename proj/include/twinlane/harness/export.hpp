#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "twinlane/harness/episode.hpp"

namespace twinlane::harness {

inline constexpr const char* kCsvHeader =
    "time,x,y,heading,speed,steering,throttle,braking,target_x,target_y,n_detections";
inline constexpr const char* kPlanCsvHeader = "frame,cone_x,cone_y,label,target_x,target_y";

/// One row per autonomy tick. Numbers use the shortest text that reads back
/// to the same double; an invalid plan writes `nan` targets.
void export_csv(const RunLog& log, const std::filesystem::path& path);
std::string format_csv(const RunLog& log);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

/// Numeric CSV reader (accepts `nan`); throws IoError on a ragged or non-numeric row.
CsvTable read_csv(const std::filesystem::path& path);
CsvTable parse_csv(std::string_view text);

/// Plan introspection: one row per detection with a position, plus one row
/// with empty cone columns for ticks that saw nothing.
void export_plan_csv(const RunLog& log, const std::filesystem::path& path);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

void save_json(const Json& j, const std::filesystem::path& path);
Json load_json(const std::filesystem::path& path);

void save_run_log(const RunLog& log, const std::filesystem::path& path);
RunLog load_run_log(const std::filesystem::path& path);

}  // namespace twinlane::harness
