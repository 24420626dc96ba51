#include "ydyn/text.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "ydyn/errors.hpp"

namespace ydyn::text {

std::string format_double(double x) { return fmt::format("{}", x); }

std::string join_doubles(const std::vector<double>& xs, char sep) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += sep;
    out += format_double(xs[i]);
  }
  return out;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

namespace {

template <typename T>
T parse_number(std::string_view s, std::string_view what) {
  s = trim(s);
  T value{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
    throw FormatError(fmt::format("{}: cannot parse '{}'", what, s));
  return value;
}

}  // namespace

double parse_double(std::string_view s, std::string_view what) { return parse_number<double>(s, what); }
long parse_long(std::string_view s, std::string_view what) { return parse_number<long>(s, what); }
std::uint64_t parse_u64(std::string_view s, std::string_view what) {
  return parse_number<std::uint64_t>(s, what);
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  if (trim(s).empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.emplace_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<double> parse_doubles(std::string_view s, std::string_view what, char sep) {
  std::vector<double> out;
  for (const auto& part : split(s, sep)) out.push_back(parse_double(part, what));
  return out;
}

std::map<std::string, std::string> space_fields(const Space& space) {
  std::map<std::string, std::string> out;
  out["kind"] = std::string(to_string(space.kind()));
  if (space.kind() == SpaceKind::finite) {
    std::string labels;
    for (std::size_t i = 0; i < space.labels().size(); ++i) {
      const auto& l = space.labels()[i];
      if (l.find_first_of(", \t\r\n=#") != std::string::npos)
        throw FormatError(fmt::format("label '{}' cannot be written in a descriptor", l));
      if (i) labels += ',';
      labels += l;
    }
    out["labels"] = labels;
  } else {
    out["lower"] = join_doubles(space.lower());
    out["upper"] = join_doubles(space.upper());
  }
  return out;
}

Space space_from_fields(const std::map<std::string, std::string>& fields) {
  auto get = [&](const std::string& key) -> const std::string& {
    auto it = fields.find(key);
    if (it == fields.end()) throw FormatError(fmt::format("space descriptor lacks '{}'", key));
    return it->second;
  };
  const auto& kind = get("kind");
  if (kind == "finite") return Space::finite(split(get("labels"), ','));
  auto lower = parse_doubles(get("lower"), "lower");
  auto upper = parse_doubles(get("upper"), "upper");
  if (kind == "box") return Space::box(std::move(lower), std::move(upper));
  if (kind == "torus") return Space::torus(std::move(lower), std::move(upper));
  throw FormatError(fmt::format("unknown space kind '{}'", kind));
}

std::map<std::string, std::string> parse_key_values(std::string_view body) {
  std::map<std::string, std::string> out;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= body.size()) {
    const auto end = body.find('\n', start);
    std::string_view line = body.substr(start, end == std::string_view::npos ? end : end - start);
    start = end == std::string_view::npos ? body.size() + 1 : end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw FormatError(fmt::format("line {}: expected key=value", line_no));
    out[std::string(trim(line.substr(0, eq)))] = std::string(trim(line.substr(eq + 1)));
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(fmt::format("cannot open '{}'", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError(fmt::format("cannot write '{}'", path));
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw FormatError(fmt::format("write to '{}' failed", path));
}

}  // namespace ydyn::text
