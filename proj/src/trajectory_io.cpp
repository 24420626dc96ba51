#include "ydyn/trajectory_io.hpp"

#include <filesystem>

#include <fmt/format.h>

#include "ydyn/errors.hpp"
#include "ydyn/text.hpp"

namespace ydyn {

namespace fs = std::filesystem;

std::string trajectory_to_csv(const Trajectory& phi) {
  std::string out = "t";
  for (std::size_t d = 0; d < phi.space().dimension(); ++d) out += fmt::format(",x{}", d + 1);
  out += '\n';
  for (long k = phi.start_index(); k <= phi.end_index(); ++k) {
    out += text::format_double(static_cast<double>(k) * phi.step());
    for (double x : phi.at_index(k)) {
      out += ',';
      out += text::format_double(x);
    }
    out += '\n';
  }
  return out;
}

Trajectory trajectory_from_csv(std::string_view body, const Space& space, double step, WindowFlags flags) {
  std::vector<Point> samples;
  long start = 0;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool header = true;
  while (pos < body.size()) {
    auto end = body.find('\n', pos);
    if (end == std::string_view::npos) end = body.size();
    const auto line = text::trim(body.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty()) continue;
    const auto cells = text::split(line, ',');
    if (cells.size() != space.dimension() + 1)
      throw FormatError(fmt::format("line {}: expected {} columns, got {}", line_no, space.dimension() + 1,
                                    cells.size()));
    if (header) {
      if (cells[0] != "t") throw FormatError(fmt::format("line {}: header must start with 't'", line_no));
      header = false;
      continue;
    }
    const double t = text::parse_double(cells[0], fmt::format("line {} time", line_no));
    long k = 0;
    try {
      k = grid_index(t, step);
    } catch (const AlignmentError& e) {
      throw FormatError(fmt::format("line {}: {}", line_no, e.what()));
    }
    if (samples.empty()) start = k;
    else if (k != start + static_cast<long>(samples.size()))
      throw FormatError(fmt::format("line {}: time {} breaks the uniform grid", line_no, t));
    Point p;
    for (std::size_t d = 1; d < cells.size(); ++d)
      p.push_back(text::parse_double(cells[d], fmt::format("line {} coordinate", line_no)));
    samples.push_back(std::move(p));
  }
  if (samples.empty()) throw FormatError("trajectory CSV has no rows");
  return Trajectory(space, step, start, std::move(samples), flags);
}

std::string flags_to_string(const WindowFlags& f) {
  std::vector<std::string> parts;
  if (f.left_truncated) parts.emplace_back("left_truncated");
  if (f.right_truncated) parts.emplace_back("right_truncated");
  if (f.left_exited) parts.emplace_back("left_exited");
  if (f.right_exited) parts.emplace_back("right_exited");
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? "," : "") + parts[i];
  return out;
}

WindowFlags flags_from_string(std::string_view s) {
  WindowFlags f;
  for (const auto& part : text::split(s, ',')) {
    if (part == "left_truncated") f.left_truncated = true;
    else if (part == "right_truncated") f.right_truncated = true;
    else if (part == "left_exited") f.left_exited = true;
    else if (part == "right_exited") f.right_exited = true;
    else if (!part.empty()) throw FormatError(fmt::format("unknown window flag '{}'", part));
  }
  return f;
}

namespace {

std::string member_file(std::size_t i) { return fmt::format("member_{:05}.csv", i); }

}  // namespace

void write_bundle(const std::string& directory, const SolutionBundle& bundle) {
  fs::create_directories(directory);
  std::string manifest = "# ydyn solution bundle\nformat=bundle-1\n";
  manifest += fmt::format("step={}\n", text::format_double(bundle.step()));
  for (const auto& [k, v] : text::space_fields(bundle.space())) manifest += fmt::format("space.{}={}\n", k, v);
  const auto& p = bundle.provenance();
  manifest += fmt::format("solver={}\nseed={}\nt_minus={}\nt_plus={}\nnote={}\n", p.solver, p.seed,
                          text::format_double(p.t_minus), text::format_double(p.t_plus), p.note);
  manifest += fmt::format("members={}\n", bundle.size());
  for (std::size_t i = 0; i < bundle.size(); ++i) {
    manifest += fmt::format("member.{}.file={}\n", i, member_file(i));
    manifest += fmt::format("member.{}.flags={}\n", i, flags_to_string(bundle[i].flags()));
    text::write_file((fs::path(directory) / member_file(i)).string(), trajectory_to_csv(bundle[i]));
  }
  text::write_file((fs::path(directory) / "manifest.txt").string(), manifest);
}

SolutionBundle read_bundle(const std::string& directory) {
  const auto kv = text::parse_key_values(text::read_file((fs::path(directory) / "manifest.txt").string()));
  auto get = [&](const std::string& key) -> std::string {
    auto it = kv.find(key);
    if (it == kv.end()) throw FormatError(fmt::format("bundle manifest lacks '{}'", key));
    return it->second;
  };
  if (get("format") != "bundle-1") throw FormatError("unsupported bundle format");
  std::map<std::string, std::string> space_kv;
  for (const auto& [k, v] : kv)
    if (k.rfind("space.", 0) == 0) space_kv[k.substr(6)] = v;
  const Space space = text::space_from_fields(space_kv);
  const double step = text::parse_double(get("step"), "step");
  Provenance p;
  p.solver = get("solver");
  p.seed = text::parse_u64(get("seed"), "seed");
  p.t_minus = text::parse_double(get("t_minus"), "t_minus");
  p.t_plus = text::parse_double(get("t_plus"), "t_plus");
  p.note = kv.count("note") ? kv.at("note") : "";
  SolutionBundle bundle(space, step, {}, p);
  const auto count = text::parse_u64(get("members"), "members");
  for (std::size_t i = 0; i < count; ++i) {
    const auto file = get(fmt::format("member.{}.file", i));
    const auto flags = flags_from_string(get(fmt::format("member.{}.flags", i)));
    bundle.add(trajectory_from_csv(text::read_file((fs::path(directory) / file).string()), space, step, flags));
  }
  return bundle;
}

}  // namespace ydyn
