#pragma once

// CSV readers and writers for accelerometer traces (t_ms,ax,ay,az) and
// mouth-contact annotations (t_ms).

#include <iosfwd>
#include <string>
#include <vector>

#include "mfed/signal.hpp"

namespace mfed {

/// Trace timestamps must be strictly increasing. Sample times are t_ms / 1000.
/// Throws ParseError / NonMonotonicTimestamp with the 1-based file line, and
/// FormatError when the file cannot be opened.
AccelSeries load_trace(const std::string& path, double rate);
AccelSeries read_trace(std::istream& in, double rate);

/// Annotation times in seconds. Must be non-decreasing; an empty file (or a
/// header only) is a valid non-eating trace.
std::vector<Seconds> load_annotations(const std::string& path);
std::vector<Seconds> read_annotations(std::istream& in);

void write_trace(std::ostream& out, const AccelSeries& series);
void save_trace(const std::string& path, const AccelSeries& series);
void write_annotations(std::ostream& out, const std::vector<Seconds>& times);
void save_annotations(const std::string& path, const std::vector<Seconds>& times);

/// Integer milliseconds, rounded half away from zero.
long long to_ms(Seconds t);

}  // namespace mfed
