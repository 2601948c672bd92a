#include "mfed/trace_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string_view>

#include "mfed/error.hpp"

namespace mfed {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = line.find(',', pos);
    out.push_back(trim(line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos)));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

double parse_number(std::string_view field, std::size_t line, const char* name) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size() || field.empty() || !std::isfinite(v)) {
    throw ParseError(std::string("bad ") + name + " value '" + std::string(field) + "'", line);
  }
  return v;
}

// Reads the header line and checks it. Returns false on an empty stream.
bool expect_header(std::istream& in, const std::string& expected) {
  std::string line;
  if (!std::getline(in, line)) return false;
  if (trim(line) != expected) {
    throw ParseError("expected header '" + expected + "', got '" + std::string(trim(line)) + "'", 1);
  }
  return true;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open '" + path + "'");
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write '" + path + "'");
  return out;
}

}  // namespace

long long to_ms(Seconds t) { return std::llround(t * 1000.0); }

AccelSeries read_trace(std::istream& in, double rate) {
  if (!(rate > 0) || !std::isfinite(rate)) throw ConfigError("rate must be positive");
  AccelSeries s;
  s.rate = rate;
  if (!expect_header(in, "t_ms,ax,ay,az")) throw ParseError("missing header 't_ms,ax,ay,az'", 1);

  std::string line;
  std::size_t lineno = 1;
  double prev_ms = 0.0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto f = split(line);
    if (f.size() != 4) throw ParseError("expected 4 fields, got " + std::to_string(f.size()), lineno);
    const double t_ms = parse_number(f[0], lineno, "t_ms");
    if (!s.samples.empty() && !(t_ms > prev_ms)) {
      throw NonMonotonicTimestamp("t_ms " + std::string(f[0]) + " does not increase", lineno);
    }
    prev_ms = t_ms;
    s.samples.push_back({t_ms / 1000.0, parse_number(f[1], lineno, "ax"), parse_number(f[2], lineno, "ay"),
                         parse_number(f[3], lineno, "az")});
  }
  return s;
}

AccelSeries load_trace(const std::string& path, double rate) {
  auto in = open_in(path);
  return read_trace(in, rate);
}

std::vector<Seconds> read_annotations(std::istream& in) {
  std::vector<Seconds> out;
  if (!expect_header(in, "t_ms")) return out;
  std::string line;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto f = split(line);
    if (f.size() != 1) throw ParseError("expected 1 field, got " + std::to_string(f.size()), lineno);
    const double t = parse_number(f[0], lineno, "t_ms") / 1000.0;
    if (!out.empty() && t < out.back()) {
      throw NonMonotonicTimestamp("annotation t_ms " + std::string(f[0]) + " is earlier than the previous one", lineno);
    }
    out.push_back(t);
  }
  return out;
}

std::vector<Seconds> load_annotations(const std::string& path) {
  auto in = open_in(path);
  return read_annotations(in);
}

void write_trace(std::ostream& out, const AccelSeries& series) {
  out << "t_ms,ax,ay,az\n" << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const auto& s : series.samples) out << to_ms(s.t) << ',' << s.ax << ',' << s.ay << ',' << s.az << '\n';
}

void save_trace(const std::string& path, const AccelSeries& series) {
  auto out = open_out(path);
  write_trace(out, series);
}

void write_annotations(std::ostream& out, const std::vector<Seconds>& times) {
  out << "t_ms\n";
  for (Seconds t : times) out << to_ms(t) << '\n';
}

void save_annotations(const std::string& path, const std::vector<Seconds>& times) {
  auto out = open_out(path);
  write_annotations(out, times);
}

}  // namespace mfed
