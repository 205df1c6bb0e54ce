#pragma once

#include <cstdio>
#include <map>
#include <string>
#include <vector>

namespace dit::cli {

/// "start:stop:step" or a single value. Points are start + i step up to
/// stop (inclusive within 1e-9 step). Throws ValidationError naming `what`.
std::vector<double> parse_grid(const std::string& spec, const std::string& what);

/// "a:b" time window.
std::pair<double, double> parse_window(const std::string& spec, const std::string& what);

/// Flat key=value file; '#' starts a comment. Throws ValidationError with the
/// line number on malformed lines.
std::map<std::string, std::string> read_config(const std::string& path);

/// Rebuilds argv with config entries inserted after the subcommand name for
/// every key that is neither on the command line nor set in the environment
/// (DIT_<KEY>), so flags override environment overrides config overrides
/// defaults.
std::vector<std::string> merge_config(const std::vector<std::string>& args, const std::vector<std::string>& subcommands);

/// Environment variable for an option name: DIT_ + upper case, '-' -> '_'.
std::string env_name(const std::string& option);

/// Writes to a file, or stdout for "-". Fixed formatting: 17 significant
/// digits, ',' delimiter, LF line endings, independent of locale.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);
  ~CsvWriter();
  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;

  void row(const std::vector<double>& values);
  void row_text(const std::vector<std::string>& fields);

 private:
  std::FILE* f_;
  bool owned_;
};

std::string fmt_double(double v);

/// Sidecar with the resolved configuration, one key=value per line.
void write_meta(const std::string& path, const std::vector<std::pair<std::string, std::string>>& entries);

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string color;
};

/// Line plot; non-positive values are dropped when log_y is set.
void write_line_svg(const std::string& path, const std::string& title, const std::string& x_label,
                    const std::string& y_label, const std::vector<Series>& series, bool log_y);

/// Heat map of a row-major grid (rows along y).
void write_heatmap_svg(const std::string& path, const std::string& title, const std::vector<double>& xs,
                       const std::vector<double>& ys, const std::vector<double>& values);

}  // namespace dit::cli
