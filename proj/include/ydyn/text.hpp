// Small helpers shared by the text formats: number printing/parsing and
// the one-line space descriptor used in manifests and relation headers.
#ifndef YDYN_TEXT_HPP
#define YDYN_TEXT_HPP

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "ydyn/phase_space.hpp"

namespace ydyn::text {

/// Shortest representation that parses back to the same double.
std::string format_double(double x);
std::string join_doubles(const std::vector<double>& xs, char sep = ',');

/// Whole-string parses; FormatError naming `what` on failure.
double parse_double(std::string_view s, std::string_view what);
long parse_long(std::string_view s, std::string_view what);
std::uint64_t parse_u64(std::string_view s, std::string_view what);
std::vector<double> parse_doubles(std::string_view s, std::string_view what, char sep = ',');
std::vector<std::string> split(std::string_view s, char sep);

std::string_view trim(std::string_view s);

/// key=value pairs of a space, e.g. kind=torus lower=0 upper=1 labels=.
std::map<std::string, std::string> space_fields(const Space& space);
Space space_from_fields(const std::map<std::string, std::string>& fields);

/// Lines of "key=value"; '#' comments and blank lines skipped.
std::map<std::string, std::string> parse_key_values(std::string_view body);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

}  // namespace ydyn::text

#endif
