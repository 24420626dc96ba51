#include "ydyn/relation.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "ydyn/errors.hpp"

namespace ydyn {

Relation::Relation(std::size_t states, std::vector<Edge> edges) {
  *this = build(states, std::move(edges), false);
}

Relation Relation::deduplicated(std::size_t states, std::vector<Edge> edges) {
  return build(states, std::move(edges), true);
}

Relation Relation::build(std::size_t states, std::vector<Edge> edges, bool allow_duplicates) {
  if (states == 0) throw ConstructionError("relation needs at least one state");
  for (const auto& [i, j] : edges) {
    if (i >= states || j >= states)
      throw ConstructionError(fmt::format("edge {} -> {} outside {} states", i, j, states));
  }
  std::sort(edges.begin(), edges.end());
  const auto dup = std::adjacent_find(edges.begin(), edges.end());
  if (dup != edges.end()) {
    if (!allow_duplicates)
      throw ConstructionError(fmt::format("duplicate edge {} -> {}", dup->first, dup->second));
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  }

  Relation r;
  r.states_ = states;
  r.succ_offsets_.assign(states + 1, 0);
  r.pred_offsets_.assign(states + 1, 0);
  r.succ_targets_.resize(edges.size());
  r.pred_sources_.resize(edges.size());
  for (const auto& [i, j] : edges) {
    ++r.succ_offsets_[i + 1];
    ++r.pred_offsets_[j + 1];
  }
  for (std::size_t k = 0; k < states; ++k) {
    r.succ_offsets_[k + 1] += r.succ_offsets_[k];
    r.pred_offsets_[k + 1] += r.pred_offsets_[k];
  }
  std::vector<std::size_t> pred_fill(r.pred_offsets_.begin(), r.pred_offsets_.end() - 1);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    r.succ_targets_[e] = edges[e].second;
    // sources arrive in ascending order, so predecessor lists come out sorted
    r.pred_sources_[pred_fill[edges[e].second]++] = edges[e].first;
  }
  return r;
}

bool Relation::has_edge(std::size_t i, std::size_t j) const {
  if (i >= states_ || j >= states_) return false;
  const auto s = successors(i);
  return std::binary_search(s.begin(), s.end(), j);
}

std::vector<Edge> Relation::edges() const {
  std::vector<Edge> out;
  out.reserve(edge_count());
  for (std::size_t i = 0; i < states_; ++i)
    for (auto j : successors(i)) out.emplace_back(i, j);
  return out;
}

Bits Relation::image(const Bits& set) const {
  Bits out(states_);
  for (auto i = set.find_first(); i != Bits::npos; i = set.find_next(i))
    for (auto j : successors(i)) out.set(j);
  return out;
}

Bits Relation::preimage(const Bits& set) const {
  Bits out(states_);
  for (auto j = set.find_first(); j != Bits::npos; j = set.find_next(j))
    for (auto i : predecessors(j)) out.set(i);
  return out;
}

Relation Relation::restricted(const Bits& keep) const {
  std::vector<Edge> kept;
  for (std::size_t i = 0; i < states_; ++i) {
    if (!keep.test(i)) continue;
    for (auto j : successors(i))
      if (keep.test(j)) kept.emplace_back(i, j);
  }
  return Relation(states_, std::move(kept));
}

std::string to_text(const Relation& relation) {
  std::string out = fmt::format("states {}\n", relation.size());
  for (const auto& [i, j] : relation.edges()) out += fmt::format("{} -> {}\n", i, j);
  return out;
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool parse_index(std::string_view s, std::size_t& value) {
  s = trim(s);
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

Relation relation_from_text(std::string_view text) {
  std::size_t states = 0;
  bool have_states = false;
  std::vector<Edge> edges;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (!have_states) {
      if (line.substr(0, 6) != "states" || !parse_index(line.substr(6), states))
        throw FormatError(fmt::format("line {}: expected 'states N'", line_no));
      have_states = true;
      continue;
    }
    const auto arrow = line.find("->");
    Edge e;
    if (arrow == std::string_view::npos || !parse_index(line.substr(0, arrow), e.first) ||
        !parse_index(line.substr(arrow + 2), e.second))
      throw FormatError(fmt::format("line {}: expected 'i -> j'", line_no));
    if (e.first >= states || e.second >= states)
      throw FormatError(fmt::format("line {}: edge outside {} states", line_no, states));
    edges.push_back(e);
  }
  if (!have_states) throw FormatError("missing 'states N' line");
  try {
    return Relation(states, std::move(edges));
  } catch (const ConstructionError& e) {
    throw FormatError(e.what());
  }
}

Relation read_relation(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError(fmt::format("cannot open relation file '{}'", path));
  std::ostringstream buf;
  buf << in.rdbuf();
  return relation_from_text(buf.str());
}

void write_relation(const std::string& path, const Relation& relation) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError(fmt::format("cannot write '{}'", path));
  out << to_text(relation);
}

}  // namespace ydyn
