#include "ydyn/cli/svg.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <numbers>

#include <fmt/format.h>

#include "ydyn/cli/artifacts.hpp"
#include "ydyn/errors.hpp"
#include "ydyn/text.hpp"
#include "ydyn/trajectory_io.hpp"

namespace ydyn::cli {

namespace {

constexpr double width = 640.0;
constexpr double height = 480.0;
constexpr double margin = 48.0;

const char* const palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2"};

std::vector<std::size_t> projection(std::size_t dimension, const std::vector<std::size_t>& requested) {
  if (requested.empty()) {
    if (dimension > 2)
      throw PlotError(fmt::format("{}-dimensional artifact: pick one or two coordinates with --project i or --project i,j",
                                  dimension));
    std::vector<std::size_t> all(dimension);
    for (std::size_t d = 0; d < dimension; ++d) all[d] = d;
    return all;
  }
  if (requested.size() > 2) throw PlotError("--project takes one or two coordinates");
  for (auto d : requested)
    if (d >= dimension) throw PlotError(fmt::format("--project {}: the artifact has {} coordinates", d, dimension));
  if (requested.size() == 2 && requested[0] == requested[1]) throw PlotError("--project needs two distinct coordinates");
  return requested;
}

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string header(const std::string& title) {
  std::string out = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\">\n"
      "<rect x=\"0\" y=\"0\" width=\"{0}\" height=\"{1}\" fill=\"#ffffff\"/>\n",
      width, height);
  if (!title.empty())
    out += fmt::format("<text x=\"{}\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\">{}</text>\n",
                       width / 2, escape(title));
  return out;
}

struct Range {
  double lo;
  double hi;
};

Range coordinate_range(const Space& space, std::size_t d) {
  if (space.kind() == SpaceKind::finite) return {0.0, static_cast<double>(space.labels().size())};
  return {space.lower()[d], space.upper()[d]};
}

double to_px(double v, Range r, double p0, double p1) {
  const double span = r.hi - r.lo;
  return p0 + (span > 0 ? (v - r.lo) / span : 0.5) * (p1 - p0);
}

std::string frame() {
  return fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#444444\"/>\n", margin,
                     margin, width - 2 * margin, height - 2 * margin);
}

std::string axis_labels(Range x, Range y, std::string_view x_name, std::string_view y_name) {
  const auto n = [](double v) { return text::format_double(v); };
  return fmt::format(
      "<g font-family=\"sans-serif\" font-size=\"11\">\n"
      "<text x=\"{0}\" y=\"{2}\" text-anchor=\"start\">{4}</text>\n"
      "<text x=\"{1}\" y=\"{2}\" text-anchor=\"end\">{5}</text>\n"
      "<text x=\"{3}\" y=\"{6}\" text-anchor=\"end\">{7}</text>\n"
      "<text x=\"{3}\" y=\"{8}\" text-anchor=\"end\">{9}</text>\n"
      "<text x=\"{10}\" y=\"{2}\" text-anchor=\"middle\">{11}</text>\n"
      "<text x=\"{3}\" y=\"{12}\" text-anchor=\"end\">{13}</text>\n"
      "</g>\n",
      margin, width - margin, height - margin + 16, margin - 4, n(x.lo), n(x.hi), height - margin, n(y.lo), margin + 10,
      n(y.hi), width / 2, x_name, height / 2, y_name);
}

// Splits a sampled path wherever a torus coordinate wraps.
std::vector<std::vector<std::pair<double, double>>> polyline_pieces(const std::vector<Point>& pts,
                                                                    const std::vector<double>& times, const Space& space,
                                                                    const std::vector<std::size_t>& dims) {
  std::vector<std::vector<std::pair<double, double>>> pieces(1);
  for (std::size_t k = 0; k < pts.size(); ++k) {
    if (k > 0 && space.kind() == SpaceKind::torus) {
      bool jump = false;
      for (auto d : dims) jump = jump || std::abs(pts[k][d] - pts[k - 1][d]) > space.extent(d) / 2;
      if (jump) pieces.emplace_back();
    }
    const double shift = space.kind() == SpaceKind::finite ? 0.5 : 0.0;
    if (dims.size() == 1)
      pieces.back().emplace_back(times[k], pts[k][dims[0]] + shift);
    else
      pieces.back().emplace_back(pts[k][dims[0]] + shift, pts[k][dims[1]] + shift);
  }
  return pieces;
}

std::string fill_color(double intensity) {
  const double t = std::clamp(intensity, 0.0, 1.0);
  const auto mix = [&](int from, int to) { return static_cast<int>(std::lround(from + t * (to - from))); };
  return fmt::format("#{:02x}{:02x}{:02x}", mix(0xf7, 0x08), mix(0xfb, 0x30), mix(0xff, 0x6b));
}

}  // namespace

std::string bundle_svg(const SolutionBundle& bundle, const PlotOptions& options) {
  const auto& space = bundle.space();
  const auto dims = projection(space.dimension(), options.project);
  std::string out = header(options.title);
  Range xr{0, 1}, yr{0, 1};
  if (dims.size() == 1) {
    double t0 = 0, t1 = 0;
    bool first = true;
    for (const auto& phi : bundle.members()) {
      t0 = first ? phi.start_time() : std::min(t0, phi.start_time());
      t1 = first ? phi.end_time() : std::max(t1, phi.end_time());
      first = false;
    }
    xr = {t0, t1};
    yr = coordinate_range(space, dims[0]);
    out += axis_labels(xr, yr, "t", fmt::format("x{}", dims[0] + 1));
  } else {
    xr = coordinate_range(space, dims[0]);
    yr = coordinate_range(space, dims[1]);
    out += axis_labels(xr, yr, fmt::format("x{}", dims[0] + 1), fmt::format("x{}", dims[1] + 1));
  }
  out += frame();
  for (std::size_t i = 0; i < bundle.size(); ++i) {
    const auto& phi = bundle.members()[i];
    std::vector<double> times;
    for (long k = phi.start_index(); k <= phi.end_index(); ++k) times.push_back(static_cast<double>(k) * phi.step());
    for (const auto& piece : polyline_pieces(phi.samples(), times, space, dims)) {
      out += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1\" points=\"",
                         palette[i % std::size(palette)]);
      for (std::size_t k = 0; k < piece.size(); ++k)
        out += fmt::format("{}{:.2f},{:.2f}", k ? " " : "", to_px(piece[k].first, xr, margin, width - margin),
                           to_px(piece[k].second, yr, height - margin, margin));
      out += "\"/>\n";
    }
  }
  return out + "</svg>\n";
}

std::string cells_svg(const GridPtr& grid, const std::vector<double>& intensity, const PlotOptions& options) {
  if (intensity.size() != grid->cell_count()) throw PlotError("one intensity per cell is required");
  const auto& space = grid->space();
  const auto dims = projection(grid->dimension(), options.project);

  std::map<std::vector<std::size_t>, double> acc;
  for (std::size_t c = 0; c < grid->cell_count(); ++c) {
    if (intensity[c] <= 0.0) continue;
    const auto idx = grid->multi_index(c);
    std::vector<std::size_t> key;
    for (auto d : dims) key.push_back(idx[d]);
    acc[key] += intensity[c];
  }
  double top = 0.0;
  for (const auto& [k, v] : acc) top = std::max(top, v);

  std::string out = header(options.title);
  const auto res = [&](std::size_t d) {
    return space.kind() == SpaceKind::finite ? space.labels().size() : grid->resolution()[d];
  };

  if (dims.size() == 1 && space.kind() == SpaceKind::torus) {
    const double cx = width / 2, cy = height / 2 + 10, r_in = 140, r_out = 190;
    const std::size_t n = res(dims[0]);
    out += fmt::format("<circle cx=\"{0}\" cy=\"{1}\" r=\"{2}\" fill=\"none\" stroke=\"#444444\"/>\n"
                       "<circle cx=\"{0}\" cy=\"{1}\" r=\"{3}\" fill=\"none\" stroke=\"#444444\"/>\n",
                       cx, cy, r_in, r_out);
    for (const auto& [key, v] : acc) {
      const double a0 = 2 * std::numbers::pi * static_cast<double>(key[0]) / static_cast<double>(n);
      const double a1 = 2 * std::numbers::pi * static_cast<double>(key[0] + 1) / static_cast<double>(n);
      const auto at = [&](double r, double a) {
        return fmt::format("{:.2f},{:.2f}", cx + r * std::sin(a), cy - r * std::cos(a));
      };
      const int large = a1 - a0 > std::numbers::pi ? 1 : 0;
      out += fmt::format("<path d=\"M{} A{},{} 0 {} 1 {} L{} A{},{} 0 {} 0 {} Z\" fill=\"{}\" stroke=\"none\"/>\n",
                         at(r_out, a0), r_out, r_out, large, at(r_out, a1), at(r_in, a1), r_in, r_in, large,
                         at(r_in, a0), fill_color(v / top));
    }
    return out + "</svg>\n";
  }

  out += frame();
  if (dims.size() == 1) {
    const std::size_t n = res(dims[0]);
    const double w = (width - 2 * margin) / static_cast<double>(n);
    const double y0 = height / 2 - 30;
    for (const auto& [key, v] : acc)
      out += fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"60\" fill=\"{}\"/>\n",
                         margin + w * static_cast<double>(key[0]), y0, w, fill_color(v / top));
    out += axis_labels(coordinate_range(space, dims[0]), {0, 1}, fmt::format("x{}", dims[0] + 1), "");
  } else {
    const std::size_t nx = res(dims[0]), ny = res(dims[1]);
    const double w = (width - 2 * margin) / static_cast<double>(nx);
    const double h = (height - 2 * margin) / static_cast<double>(ny);
    for (const auto& [key, v] : acc)
      out += fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"{}\"/>\n",
                         margin + w * static_cast<double>(key[0]),
                         height - margin - h * static_cast<double>(key[1] + 1), w, h, fill_color(v / top));
    out += axis_labels(coordinate_range(space, dims[0]), coordinate_range(space, dims[1]),
                       fmt::format("x{}", dims[0] + 1), fmt::format("x{}", dims[1] + 1));
  }
  return out + "</svg>\n";
}

std::string plot_artifact(const std::string& path, const PlotOptions& options) {
  namespace fs = std::filesystem;
  if (fs::is_directory(path)) {
    if (!fs::exists(fs::path(path) / "manifest.txt")) throw PlotError(fmt::format("'{}' is not a bundle directory", path));
    return bundle_svg(read_bundle(path), options);
  }
  if (!fs::is_regular_file(path)) throw PlotError(fmt::format("artifact '{}' not found", path));
  const std::string body = text::read_file(path);
  const auto grid = grid_from_artifact(body);
  std::vector<double> intensity(grid->cell_count(), 0.0);
  switch (artifact_kind(body)) {
    case ArtifactKind::cells:
      for (auto c : cells_from_csv(body).cells()) intensity[c] = 1.0;
      break;
    case ArtifactKind::reach_tube:
      for (const auto& [k, set] : reach_from_csv(body))
        for (auto c : set.cells()) intensity[c] += 1.0;
      break;
    case ArtifactKind::measure: {
      const auto mu = measure_from_csv(body);
      if (mu.size() != grid->cell_count()) throw FormatError("measure size does not match its grid line");
      intensity = mu.weights();
      break;
    }
  }
  return cells_svg(grid, intensity, options);
}

}  // namespace ydyn::cli
