#include "cli_support.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <limits>

#include "dit/error.hpp"

namespace dit::cli {

namespace {

constexpr std::size_t kMaxGridPoints = 50'000'000;

double parse_number(const std::string& s, const std::string& what) {
  const char* begin = s.c_str();
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || errno == ERANGE || !std::isfinite(v)) {
    throw ValidationError(fmt::format("{}: '{}' is not a finite number", what, s));
  }
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string::npos) return out;
    start = pos + 1;
  }
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<double> parse_grid(const std::string& spec, const std::string& what) {
  const auto parts = split(spec, ':');
  if (parts.size() == 1) return {parse_number(parts[0], what)};
  if (parts.size() != 3) throw ValidationError(fmt::format("{}: expected start:stop:step, got '{}'", what, spec));
  const double start = parse_number(parts[0], what);
  const double stop = parse_number(parts[1], what);
  const double step = parse_number(parts[2], what);
  if (!(step > 0.0)) throw ValidationError(fmt::format("{}: step must be positive", what));
  if (stop < start) throw ValidationError(fmt::format("{}: empty grid (stop < start)", what));
  const double count = std::floor((stop - start) / step + 1e-9) + 1.0;
  if (count > static_cast<double>(kMaxGridPoints)) {
    throw ValidationError(fmt::format("{}: {} points exceeds the limit of {}", what, count, kMaxGridPoints));
  }
  std::vector<double> out(static_cast<std::size_t>(count));
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = start + static_cast<double>(i) * step;
  return out;
}

std::pair<double, double> parse_window(const std::string& spec, const std::string& what) {
  const auto parts = split(spec, ':');
  if (parts.size() != 2) throw ValidationError(fmt::format("{}: expected begin:end, got '{}'", what, spec));
  const double a = parse_number(parts[0], what);
  const double b = parse_number(parts[1], what);
  if (!(b > a)) throw ValidationError(fmt::format("{}: end must exceed begin", what));
  return {a, b};
}

std::map<std::string, std::string> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(fmt::format("config: cannot open '{}'", path));
  std::map<std::string, std::string> out;
  std::string line;
  for (int n = 1; std::getline(in, line); ++n) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ValidationError(fmt::format("config {} line {}: expected key=value", path, n));
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ValidationError(fmt::format("config {} line {}: empty key", path, n));
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

std::string env_name(const std::string& option) {
  std::string out = "DIT_";
  for (char c : option) out += c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

std::vector<std::string> merge_config(const std::vector<std::string>& args, const std::vector<std::string>& subcommands) {
  std::string path;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) {
    if (const char* env = std::getenv("DIT_CONFIG")) path = env;
  }
  if (path.empty()) return args;

  auto sub = std::find_if(args.begin() + 1, args.end(), [&](const std::string& a) {
    return std::find(subcommands.begin(), subcommands.end(), a) != subcommands.end();
  });
  const auto insert_at = sub == args.end() ? args.end() : sub + 1;
  std::vector<std::string> injected;
  for (const auto& [key, value] : read_config(path)) {
    const std::string flag = "--" + key;
    const bool on_command_line = std::any_of(args.begin() + 1, args.end(), [&](const std::string& a) {
      return a == flag || a.rfind(flag + "=", 0) == 0;
    });
    if (on_command_line || std::getenv(env_name(key).c_str()) != nullptr) continue;
    injected.push_back(flag + "=" + value);
  }
  std::vector<std::string> out(args.begin(), insert_at);
  out.insert(out.end(), injected.begin(), injected.end());
  out.insert(out.end(), insert_at, args.end());
  return out;
}

std::string fmt_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt::format("{:.17g}", v);
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : f_(path == "-" ? stdout : std::fopen(path.c_str(), "wb")), owned_(path != "-") {
  if (f_ == nullptr) throw ValidationError(fmt::format("cannot open output '{}': {}", path, std::strerror(errno)));
  row_text(header);
}

CsvWriter::~CsvWriter() {
  if (owned_) std::fclose(f_);
  else std::fflush(f_);
}

void CsvWriter::row(const std::vector<double>& values) {
  std::string line;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) line += ',';
    line += fmt_double(values[i]);
  }
  line += '\n';
  std::fwrite(line.data(), 1, line.size(), f_);
}

void CsvWriter::row_text(const std::vector<std::string>& fields) {
  std::string line;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) line += ',';
    line += fields[i];
  }
  line += '\n';
  std::fwrite(line.data(), 1, line.size(), f_);
}

void write_meta(const std::string& path, const std::vector<std::pair<std::string, std::string>>& entries) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (f == nullptr) throw ValidationError(fmt::format("cannot open metadata file '{}'", path));
  for (const auto& [k, v] : entries) fmt::print(f, "{}={}\n", k, v);
  std::fclose(f);
}

namespace {

constexpr double kW = 720.0, kH = 420.0, kLeft = 70.0, kRight = 20.0, kTop = 36.0, kBottom = 50.0;

struct Frame {
  double x0, x1, y0, y1;
  bool log_y;
  double px(double x) const { return kLeft + (x - x0) / (x1 - x0) * (kW - kLeft - kRight); }
  double py(double y) const {
    const double v = log_y ? std::log10(y) : y;
    return kH - kBottom - (v - y0) / (y1 - y0) * (kH - kTop - kBottom);
  }
};

std::FILE* open_svg(const std::string& path, const std::string& title) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (f == nullptr) throw ValidationError(fmt::format("cannot open plot file '{}'", path));
  fmt::print(f,
             "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" font-family=\"sans-serif\" "
             "font-size=\"12\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
             "<text x=\"{}\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n",
             kW, kH, kW / 2, title);
  return f;
}

void axes(std::FILE* f, const Frame& fr, const std::string& x_label, const std::string& y_label) {
  fmt::print(f, "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n", kLeft, kTop,
             kW - kLeft - kRight, kH - kTop - kBottom);
  for (int i = 0; i <= 4; ++i) {
    const double xv = fr.x0 + (fr.x1 - fr.x0) * i / 4.0;
    const double yv = fr.y0 + (fr.y1 - fr.y0) * i / 4.0;
    const double yy = kH - kBottom - (kH - kTop - kBottom) * i / 4.0;
    fmt::print(f, "<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{:.4g}</text>\n", fr.px(xv), kH - kBottom + 16,
               xv);
    fmt::print(f, "<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"end\">{}</text>\n", kLeft - 4, yy + 4,
               fr.log_y ? fmt::format("1e{:.1f}", yv) : fmt::format("{:.3g}", yv));
  }
  fmt::print(f, "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", kW / 2, kH - 12, x_label);
  fmt::print(f, "<text x=\"14\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 14 {})\">{}</text>\n", kH / 2,
             kH / 2, y_label);
}

}  // namespace

void write_line_svg(const std::string& path, const std::string& title, const std::string& x_label,
                    const std::string& y_label, const std::vector<Series>& series, bool log_y) {
  Frame fr{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
           std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(), log_y};
  auto usable = [&](double y) { return std::isfinite(y) && (!log_y || y > 0.0); };
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!usable(s.y[i]) || !std::isfinite(s.x[i])) continue;
      const double v = log_y ? std::log10(s.y[i]) : s.y[i];
      fr.x0 = std::min(fr.x0, s.x[i]);
      fr.x1 = std::max(fr.x1, s.x[i]);
      fr.y0 = std::min(fr.y0, v);
      fr.y1 = std::max(fr.y1, v);
    }
  }
  if (!(fr.x1 > fr.x0)) fr.x1 = fr.x0 + 1.0;
  if (!(fr.y1 > fr.y0)) fr.y1 = fr.y0 + 1.0;
  if (!std::isfinite(fr.x0) || !std::isfinite(fr.y0)) fr = {0.0, 1.0, 0.0, 1.0, log_y};

  std::FILE* f = open_svg(path, title);
  axes(f, fr, x_label, y_label);
  double legend_y = kTop + 16;
  for (const auto& s : series) {
    std::string points;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!usable(s.y[i])) continue;
      points += fmt::format("{:.2f},{:.2f} ", fr.px(s.x[i]), fr.py(s.y[i]));
    }
    fmt::print(f, "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.2\" points=\"{}\"/>\n", s.color, points);
    fmt::print(f, "<text x=\"{}\" y=\"{}\" fill=\"{}\" text-anchor=\"end\">{}</text>\n", kW - kRight - 8, legend_y,
               s.color, s.label);
    legend_y += 16;
  }
  fmt::print(f, "</svg>\n");
  std::fclose(f);
}

void write_heatmap_svg(const std::string& path, const std::string& title, const std::vector<double>& xs,
                       const std::vector<double>& ys, const std::vector<double>& values) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (double v : values) {
    if (!std::isfinite(v)) continue;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (!(hi > lo)) hi = lo + 1.0;
  std::FILE* f = open_svg(path, title);
  const double cw = (kW - kLeft - kRight) / static_cast<double>(std::max<std::size_t>(xs.size(), 1));
  const double ch = (kH - kTop - kBottom) / static_cast<double>(std::max<std::size_t>(ys.size(), 1));
  for (std::size_t r = 0; r < ys.size(); ++r) {
    for (std::size_t c = 0; c < xs.size(); ++c) {
      const double v = values[r * xs.size() + c];
      const int g = std::isfinite(v) ? static_cast<int>(255.0 * (1.0 - (v - lo) / (hi - lo))) : 255;
      fmt::print(f, "<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"rgb(255,{},{})\"/>\n",
                 kLeft + c * cw, kTop + r * ch, cw + 0.5, ch + 0.5, g, g);
    }
  }
  for (std::size_t c = 0; c < xs.size(); c += std::max<std::size_t>(1, xs.size() / 5)) {
    fmt::print(f, "<text x=\"{:.1f}\" y=\"{}\" text-anchor=\"middle\">{:.4g}</text>\n", kLeft + (c + 0.5) * cw,
               kH - kBottom + 16, xs[c]);
  }
  for (std::size_t r = 0; r < ys.size(); r += std::max<std::size_t>(1, ys.size() / 5)) {
    fmt::print(f, "<text x=\"{}\" y=\"{:.1f}\" text-anchor=\"end\">{:.4g}</text>\n", kLeft - 4, kTop + (r + 0.5) * ch + 4,
               ys[r]);
  }
  fmt::print(f, "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">x</text>\n", kW / 2, kH - 12);
  fmt::print(f, "<text x=\"14\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 14 {})\">k0I</text>\n", kH / 2,
             kH / 2);
  fmt::print(f, "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">max {:.4g}</text>\n", kW - kRight, kTop - 6, hi);
  fmt::print(f, "</svg>\n");
  std::fclose(f);
}

}  // namespace dit::cli
