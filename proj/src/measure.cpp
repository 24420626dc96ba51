#include "ydyn/measure.hpp"

#include <charconv>
#include <cmath>

#include <fmt/format.h>

#include "ydyn/errors.hpp"

namespace ydyn {

void CompensatedSum::add(double x) {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x)) {
    correction_ += (sum_ - t) + x;
  } else {
    correction_ += (x - t) + sum_;
  }
  sum_ = t;
}

DiscreteMeasure::DiscreteMeasure(std::vector<double> weights) : weights_(std::move(weights)) {
  if (weights_.empty()) throw ConstructionError("measure over an empty index set");
  CompensatedSum total;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    if (!(weights_[i] >= 0.0) || !std::isfinite(weights_[i]))
      throw ConstructionError(fmt::format("weight {} at index {} is not a nonnegative number",
                                          weights_[i], i));
    total.add(weights_[i]);
  }
  if (std::abs(total.value() - 1.0) > mass_tolerance)
    throw ConstructionError(fmt::format("total mass {} differs from 1", total.value()));
}

DiscreteMeasure DiscreteMeasure::normalized(std::vector<double> weights) {
  CompensatedSum total;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw ConstructionError("negative or non-finite weight");
    total.add(w);
  }
  if (!(total.value() > 0.0)) throw ConstructionError("cannot normalize zero total mass");
  const double t = total.value();
  for (double& w : weights) w /= t;
  return DiscreteMeasure(std::move(weights));
}

DiscreteMeasure DiscreteMeasure::uniform(std::size_t size) {
  return DiscreteMeasure(std::vector<double>(size, 1.0 / static_cast<double>(size)));
}

DiscreteMeasure DiscreteMeasure::uniform_on(const Bits& support) {
  const auto count = support.count();
  if (count == 0) throw ConstructionError("uniform measure on an empty set");
  std::vector<double> w(support.size(), 0.0);
  for (auto i = support.find_first(); i != Bits::npos; i = support.find_next(i))
    w[i] = 1.0 / static_cast<double>(count);
  return DiscreteMeasure(std::move(w));
}

DiscreteMeasure DiscreteMeasure::point_mass(std::size_t size, std::size_t at) {
  if (at >= size) throw DomainError(fmt::format("point mass at {} of {}", at, size));
  std::vector<double> w(size, 0.0);
  w[at] = 1.0;
  return DiscreteMeasure(std::move(w));
}

double DiscreteMeasure::mass(const Bits& set) const {
  if (set.size() != weights_.size())
    throw DomainError(fmt::format("set of size {} for a measure of size {}", set.size(), size()));
  CompensatedSum total;
  for (auto i = set.find_first(); i != Bits::npos; i = set.find_next(i)) total.add(weights_[i]);
  return total.value();
}

double DiscreteMeasure::total_mass() const {
  Bits all(weights_.size());
  all.set();
  return mass(all);
}

Bits DiscreteMeasure::support() const {
  Bits s(weights_.size());
  for (std::size_t i = 0; i < weights_.size(); ++i)
    if (weights_[i] > 0.0) s.set(i);
  return s;
}

double DiscreteMeasure::total_variation(const DiscreteMeasure& other) const {
  if (other.size() != size()) throw DomainError("measures of different size");
  CompensatedSum total;
  for (std::size_t i = 0; i < size(); ++i) total.add(std::abs(weights_[i] - other.weights_[i]));
  return 0.5 * total.value();
}

std::string measure_to_csv(const DiscreteMeasure& measure) {
  std::string out = "cell,weight\n";
  for (std::size_t i = 0; i < measure.size(); ++i) out += fmt::format("{},{}\n", i, measure.weight(i));
  return out;
}

DiscreteMeasure measure_from_csv(std::string_view text) {
  std::vector<double> weights;
  std::size_t line_no = 0;
  bool header = true;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    if (header) {
      if (line != "cell,weight") throw FormatError("measure CSV must start with 'cell,weight'");
      header = false;
      continue;
    }
    const auto comma = line.find(',');
    std::size_t cell = 0;
    double w = 0.0;
    if (comma == std::string_view::npos) throw FormatError(fmt::format("line {}: missing ','", line_no));
    auto r1 = std::from_chars(line.data(), line.data() + comma, cell);
    auto r2 = std::from_chars(line.data() + comma + 1, line.data() + line.size(), w);
    if (r1.ec != std::errc() || r2.ec != std::errc() || r2.ptr != line.data() + line.size())
      throw FormatError(fmt::format("line {}: malformed 'cell,weight' row", line_no));
    if (cell != weights.size())
      throw FormatError(fmt::format("line {}: expected cell {}, got {}", line_no, weights.size(), cell));
    weights.push_back(w);
  }
  if (header) throw FormatError("empty measure CSV");
  try {
    return DiscreteMeasure(std::move(weights));
  } catch (const ConstructionError& e) {
    throw FormatError(e.what());
  }
}

}  // namespace ydyn
