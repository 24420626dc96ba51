/**
 * @file relation.hpp
 * @brief Finite set-valued maps stored as compressed sparse rows.
 *
 * An edge (i, j) means j is a one-step successor of i. Successor and
 * predecessor lists are both kept sorted, so every traversal is
 * deterministic.
 *
 * Text format (round-trips bit-exactly through to_text):
 *
 *     # comment
 *     states 3
 *     0 -> 1
 *     1 -> 0
 *
 * Blank lines and anything after '#' are ignored on input.
 */
#ifndef YDYN_RELATION_HPP
#define YDYN_RELATION_HPP

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ydyn/phase_space.hpp"

namespace ydyn {

using Edge = std::pair<std::size_t, std::size_t>;

class Relation {
 public:
  Relation() = default;
  /// Throws ConstructionError on n == 0, out-of-range endpoints or duplicates.
  Relation(std::size_t states, std::vector<Edge> edges);
  /// Same as the constructor but silently drops duplicate edges.
  static Relation deduplicated(std::size_t states, std::vector<Edge> edges);

  std::size_t size() const { return states_; }
  std::size_t edge_count() const { return succ_targets_.size(); }

  std::span<const std::size_t> successors(std::size_t i) const {
    return {succ_targets_.data() + succ_offsets_[i], succ_targets_.data() + succ_offsets_[i + 1]};
  }
  std::span<const std::size_t> predecessors(std::size_t j) const {
    return {pred_sources_.data() + pred_offsets_[j], pred_sources_.data() + pred_offsets_[j + 1]};
  }

  bool has_edge(std::size_t i, std::size_t j) const;
  /// Edges sorted by (source, target).
  std::vector<Edge> edges() const;

  /// One-step image of a state set (no restriction).
  Bits image(const Bits& set) const;
  /// One-step preimage of a state set (no restriction).
  Bits preimage(const Bits& set) const;

  /// Relation restricted to edges with both endpoints in `keep`.
  Relation restricted(const Bits& keep) const;

  bool operator==(const Relation& other) const {
    return states_ == other.states_ && succ_offsets_ == other.succ_offsets_ &&
           succ_targets_ == other.succ_targets_;
  }

 private:
  static Relation build(std::size_t states, std::vector<Edge> edges, bool allow_duplicates);

  std::size_t states_ = 0;
  std::vector<std::size_t> succ_offsets_{0};
  std::vector<std::size_t> succ_targets_;
  std::vector<std::size_t> pred_offsets_{0};
  std::vector<std::size_t> pred_sources_;
};

std::string to_text(const Relation& relation);
/// Throws FormatError with the offending line number.
Relation relation_from_text(std::string_view text);

Relation read_relation(const std::string& path);
void write_relation(const std::string& path, const Relation& relation);

}  // namespace ydyn

#endif  // YDYN_RELATION_HPP
