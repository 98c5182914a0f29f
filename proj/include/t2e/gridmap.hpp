// Copyright 2026 The T2E Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Occupancy-grid maps: the bounded free space robots move in.
//
// World frame: x grows with the column index, y grows with the row index.
// Cell (col, row) covers [col*res, (col+1)*res) x [row*res, (row+1)*res).
// Row 0 of a map file is the row at y in [0, res).

#ifndef T2E_GRIDMAP_HPP_
#define T2E_GRIDMAP_HPP_

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "t2e/errors.hpp"
#include "t2e/vec2.hpp"

namespace t2e {

struct Cell {
  int col = 0;
  int row = 0;
  friend constexpr bool operator==(Cell, Cell) = default;
};

enum class MapLevel { Small, Medium, Large };

inline const char* to_string(MapLevel level) {
  switch (level) {
    case MapLevel::Small:
      return "small";
    case MapLevel::Medium:
      return "medium";
    case MapLevel::Large:
      return "large";
  }
  return "unknown";
}

inline constexpr double kDefaultResolution = 0.1;
inline constexpr double kSmallLevelMaxArea = 40.0;
inline constexpr double kMediumLevelMaxArea = 60.0;

namespace detail {

// One pass of the Felzenszwalb-Huttenlocher squared distance transform.
inline void edt_1d(const std::vector<double>& f, std::vector<double>& d,
                   std::vector<int>& v, std::vector<double>& z) {
  const int n = static_cast<int>(f.size());
  constexpr double kInf = std::numeric_limits<double>::infinity();
  int k = -1;
  for (int q = 0; q < n; ++q) {
    if (f[q] == kInf) continue;
    if (k < 0) {
      k = 0;
      v[0] = q;
      z[0] = -kInf;
      z[1] = kInf;
      continue;
    }
    double s = 0.0;
    while (true) {
      const int p = v[k];
      s = ((f[q] + double(q) * q) - (f[p] + double(p) * p)) / (2.0 * (q - p));
      if (s <= z[k] && k > 0) {
        --k;
      } else {
        break;
      }
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = kInf;
  }
  if (k < 0) {
    std::fill(d.begin(), d.end(), kInf);
    return;
  }
  int j = 0;
  for (int q = 0; q < n; ++q) {
    while (z[j + 1] < q) ++j;
    const double dq = q - v[j];
    d[q] = dq * dq + f[v[j]];
  }
}

}  // namespace detail

/// Binary obstacle raster with a physical resolution. Immutable once built.
class OccupancyGrid {
 public:
  OccupancyGrid() = default;

  /// Builds and validates a grid. `cells` is row-major, true = obstacle.
  OccupancyGrid(int width, int height, double resolution,
                std::vector<std::uint8_t> cells, std::string name = {})
      : width_(width),
        height_(height),
        resolution_(resolution),
        cells_(std::move(cells)),
        name_(std::move(name)) {
    validate();
    compute_clearance();
  }

  int width() const { return width_; }
  int height() const { return height_; }
  double resolution() const { return resolution_; }
  const std::string& name() const { return name_; }
  const std::vector<std::uint8_t>& cells() const { return cells_; }

  double extent_x() const { return width_ * resolution_; }
  double extent_y() const { return height_ * resolution_; }

  std::size_t index(int col, int row) const {
    return static_cast<std::size_t>(row) * width_ + col;
  }
  std::size_t index(Cell c) const { return index(c.col, c.row); }
  std::size_t size() const { return cells_.size(); }

  bool in_bounds(int col, int row) const {
    return col >= 0 && row >= 0 && col < width_ && row < height_;
  }
  bool contains(Vec2 p) const {
    return p.x >= 0.0 && p.y >= 0.0 && p.x < extent_x() && p.y < extent_y();
  }

  /// Cells outside the raster count as occupied.
  bool occupied(int col, int row) const {
    return !in_bounds(col, row) || cells_[index(col, row)] != 0;
  }
  bool occupied(Cell c) const { return occupied(c.col, c.row); }

  Cell cell_of(Vec2 p) const {
    return {static_cast<int>(std::floor(p.x / resolution_)),
            static_cast<int>(std::floor(p.y / resolution_))};
  }
  bool occupied_at(Vec2 p) const { return occupied(cell_of(p)); }

  Vec2 center(Cell c) const {
    return {(c.col + 0.5) * resolution_, (c.row + 0.5) * resolution_};
  }
  Vec2 center(std::size_t idx) const {
    return center(Cell{static_cast<int>(idx % width_),
                       static_cast<int>(idx / width_)});
  }
  Cell cell(std::size_t idx) const {
    return {static_cast<int>(idx % width_), static_cast<int>(idx / width_)};
  }

  std::size_t free_cell_count() const {
    return static_cast<std::size_t>(
        std::count(cells_.begin(), cells_.end(), std::uint8_t{0}));
  }

  /// Clearance of a cell center (0 for occupied cells), cached at build time.
  double center_clearance(Cell c) const { return center_clearance_[index(c)]; }
  double center_clearance(std::size_t idx) const {
    return center_clearance_[idx];
  }

  friend bool operator==(const OccupancyGrid& a, const OccupancyGrid& b) {
    return a.width_ == b.width_ && a.height_ == b.height_ &&
           a.resolution_ == b.resolution_ && a.cells_ == b.cells_;
  }

 private:
  void validate() const {
    if (width_ < 8 || height_ < 8) {
      throw ValidationError("map must be at least 8x8 cells");
    }
    if (!(resolution_ > 0.0) || !std::isfinite(resolution_)) {
      throw ValidationError("map resolution must be positive");
    }
    if (cells_.size() != static_cast<std::size_t>(width_) * height_) {
      throw ValidationError("cell buffer does not match map size");
    }
    for (int c = 0; c < width_; ++c) {
      if (!cells_[index(c, 0)] || !cells_[index(c, height_ - 1)]) {
        throw ValidationError("map border is open");
      }
    }
    for (int r = 0; r < height_; ++r) {
      if (!cells_[index(0, r)] || !cells_[index(width_ - 1, r)]) {
        throw ValidationError("map border is open");
      }
    }
    if (free_cell_count() == 0) {
      throw ValidationError("map has no free cells");
    }
  }

  void compute_clearance() {
    constexpr double kInf = std::numeric_limits<double>::infinity();
    const int n = std::max(width_, height_);
    std::vector<double> f(n), d(n), z(n + 1);
    std::vector<int> v(n);
    std::vector<double> sq(cells_.size());
    for (std::size_t i = 0; i < cells_.size(); ++i) {
      sq[i] = cells_[i] ? 0.0 : kInf;
    }
    f.resize(width_);
    d.resize(width_);
    for (int r = 0; r < height_; ++r) {
      for (int c = 0; c < width_; ++c) f[c] = sq[index(c, r)];
      detail::edt_1d(f, d, v, z);
      for (int c = 0; c < width_; ++c) sq[index(c, r)] = d[c];
    }
    f.resize(height_);
    d.resize(height_);
    for (int c = 0; c < width_; ++c) {
      for (int r = 0; r < height_; ++r) f[r] = sq[index(c, r)];
      detail::edt_1d(f, d, v, z);
      for (int r = 0; r < height_; ++r) sq[index(c, r)] = d[r];
    }
    center_clearance_.resize(cells_.size());
    for (std::size_t i = 0; i < cells_.size(); ++i) {
      center_clearance_[i] =
          cells_[i] ? 0.0
                    : std::max(0.0, std::sqrt(sq[i]) * resolution_ -
                                        0.5 * resolution_);
    }
  }

  int width_ = 0;
  int height_ = 0;
  double resolution_ = kDefaultResolution;
  std::vector<std::uint8_t> cells_;
  std::string name_;
  std::vector<double> center_clearance_;
};

// ---------------------------------------------------------------------------
// File format

inline constexpr std::string_view kMapMagic = "T2E-MAP v1";
inline constexpr std::string_view kMapExtension = ".t2e.map";

/// Strips directory and the `.t2e.map` (or last) extension.
inline std::string map_name_from_path(const std::filesystem::path& path) {
  std::string file = path.filename().string();
  if (file.size() > kMapExtension.size() &&
      file.ends_with(kMapExtension)) {
    return file.substr(0, file.size() - kMapExtension.size());
  }
  return path.stem().string();
}

inline OccupancyGrid parse_map(std::string_view text, std::string name = {}) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) {
      lines.push_back(text.substr(pos));
      break;
    }
    lines.push_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  if (lines.size() < 3) throw ParseError("map header is truncated");
  for (const auto& l : lines) {
    if (l.find('\r') != std::string_view::npos) {
      throw ParseError("map must use LF line endings");
    }
  }
  if (lines[0] != kMapMagic) throw ParseError("bad map magic line");

  constexpr std::string_view kRes = "resolution ";
  if (!lines[1].starts_with(kRes)) throw ParseError("expected resolution line");
  const std::string_view res_text = lines[1].substr(kRes.size());
  double resolution = 0.0;
  {
    const auto [p, ec] = std::from_chars(
        res_text.data(), res_text.data() + res_text.size(), resolution);
    if (ec != std::errc{} || p != res_text.data() + res_text.size()) {
      throw ParseError("malformed resolution");
    }
  }

  constexpr std::string_view kSize = "size ";
  if (!lines[2].starts_with(kSize)) throw ParseError("expected size line");
  std::string_view size_text = lines[2].substr(kSize.size());
  const std::size_t sp = size_text.find(' ');
  if (sp == std::string_view::npos) throw ParseError("malformed size line");
  auto parse_int = [](std::string_view s) {
    int value = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || p != s.data() + s.size() || s.empty()) {
      throw ParseError("malformed size line");
    }
    return value;
  };
  const int width = parse_int(size_text.substr(0, sp));
  const int height = parse_int(size_text.substr(sp + 1));
  if (width <= 0 || height <= 0) throw ParseError("map size must be positive");

  if (lines.size() != static_cast<std::size_t>(height) + 3) {
    throw ParseError("expected " + std::to_string(height) + " map rows, got " +
                     std::to_string(lines.size() - 3));
  }
  std::vector<std::uint8_t> cells(static_cast<std::size_t>(width) * height);
  for (int r = 0; r < height; ++r) {
    const std::string_view row = lines[3 + r];
    if (row.size() != static_cast<std::size_t>(width)) {
      throw ParseError("row " + std::to_string(r) + " has length " +
                       std::to_string(row.size()) + ", expected " +
                       std::to_string(width));
    }
    for (int c = 0; c < width; ++c) {
      switch (row[c]) {
        case '#':
          cells[static_cast<std::size_t>(r) * width + c] = 1;
          break;
        case '.':
          break;
        default:
          throw ParseError("unexpected map character in row " +
                           std::to_string(r));
      }
    }
  }
  return OccupancyGrid(width, height, resolution, std::move(cells),
                       std::move(name));
}

inline std::string format_resolution(double resolution) {
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), resolution);
  return std::string(buf, p);
}

/// Serializes a grid in the `.t2e.map` format. Every line ends with LF.
inline std::string format_map(const OccupancyGrid& grid) {
  std::string out;
  out.reserve(static_cast<std::size_t>(grid.width() + 1) * grid.height() + 64);
  out += kMapMagic;
  out += '\n';
  out += "resolution ";
  out += format_resolution(grid.resolution());
  out += '\n';
  out += "size " + std::to_string(grid.width()) + " " +
         std::to_string(grid.height()) + "\n";
  for (int r = 0; r < grid.height(); ++r) {
    for (int c = 0; c < grid.width(); ++c) {
      out += grid.occupied(c, r) ? '#' : '.';
    }
    out += '\n';
  }
  return out;
}

inline OccupancyGrid load_map(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open map file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_map(ss.str(), map_name_from_path(path));
}

inline void save_map(const OccupancyGrid& grid,
                     const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write map file: " + path.string());
  out << format_map(grid);
}

/// FNV-1a 64 over the serialized map, rendered as 16 hex digits.
inline std::string map_hash(const OccupancyGrid& grid) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char ch : format_map(grid)) {
    h ^= static_cast<unsigned char>(ch);
    h *= 0x100000001b3ULL;
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = kHex[h & 0xF];
    h >>= 4;
  }
  return out;
}

/// Binary PGM (P5) rendering: obstacles black, free space white.
inline std::string export_pgm(const OccupancyGrid& grid) {
  std::string out = "P5\n" + std::to_string(grid.width()) + " " +
                    std::to_string(grid.height()) + "\n255\n";
  // Image rows run top-down, so the highest y row comes first.
  for (int r = grid.height() - 1; r >= 0; --r) {
    for (int c = 0; c < grid.width(); ++c) {
      out += static_cast<char>(grid.occupied(c, r) ? 0 : 255);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Area accounting

inline double traversable_area(const OccupancyGrid& grid) {
  return static_cast<double>(grid.free_cell_count()) * grid.resolution() *
         grid.resolution();
}

/// Small below 40 m2, Large above 60 m2, Medium on the closed interval.
inline MapLevel classify_level(double area_m2) {
  if (area_m2 < kSmallLevelMaxArea) return MapLevel::Small;
  if (area_m2 > kMediumLevelMaxArea) return MapLevel::Large;
  return MapLevel::Medium;
}

inline MapLevel classify_level(const OccupancyGrid& grid) {
  return classify_level(traversable_area(grid));
}

// ---------------------------------------------------------------------------
// Geometric queries

/// Distance from `point` to the nearest occupied cell center, minus half a
/// cell, floored at zero. Zero inside an occupied cell.
inline double clearance(const OccupancyGrid& grid, Vec2 point) {
  if (!grid.contains(point)) throw OutOfBounds("clearance query outside map");
  const Cell home = grid.cell_of(point);
  if (grid.occupied(home)) return 0.0;
  const double res = grid.resolution();
  // The nearest obstacle center to `home`'s center bounds the search radius.
  const double upper = grid.center_clearance(home) + 0.5 * res +
                       distance(point, grid.center(home));
  const int span = static_cast<int>(std::ceil(upper / res)) + 1;
  double best_sq = upper * upper;
  for (int r = std::max(0, home.row - span);
       r <= std::min(grid.height() - 1, home.row + span); ++r) {
    for (int c = std::max(0, home.col - span);
         c <= std::min(grid.width() - 1, home.col + span); ++c) {
      if (!grid.occupied(c, r)) continue;
      const Vec2 d = grid.center(Cell{c, r}) - point;
      best_sq = std::min(best_sq, dot(d, d));
    }
  }
  return std::max(0.0, std::sqrt(best_sq) - 0.5 * res);
}

inline constexpr double kMinRayDistance = 1e-9;

/// Cell-stepping traversal along a unit direction. Returns the distance at
/// which the ray enters the first occupied cell, or `max_range` if none is
/// hit first. A ray that passes exactly through a cell corner is blocked if
/// either of the two cells sharing that corner is occupied.
inline double cast_ray(const OccupancyGrid& grid, Vec2 origin, Vec2 dir,
                       double max_range) {
  if (!grid.contains(origin)) throw OutOfBounds("ray origin outside map");
  Cell cur = grid.cell_of(origin);
  if (grid.occupied(cur)) return 0.0;
  const double res = grid.resolution();
  constexpr double kInf = std::numeric_limits<double>::infinity();

  const int step_c = dir.x > 0.0 ? 1 : (dir.x < 0.0 ? -1 : 0);
  const int step_r = dir.y > 0.0 ? 1 : (dir.y < 0.0 ? -1 : 0);
  double t_max_x = kInf, t_max_y = kInf, t_dx = kInf, t_dy = kInf;
  if (step_c != 0) {
    const double boundary = (cur.col + (step_c > 0 ? 1 : 0)) * res;
    t_max_x = (boundary - origin.x) / dir.x;
    t_dx = res / std::abs(dir.x);
  }
  if (step_r != 0) {
    const double boundary = (cur.row + (step_r > 0 ? 1 : 0)) * res;
    t_max_y = (boundary - origin.y) / dir.y;
    t_dy = res / std::abs(dir.y);
  }

  while (true) {
    const double t = std::min(t_max_x, t_max_y);
    if (t >= max_range) return max_range;
    if (t_max_x == t_max_y) {
      if (grid.occupied(cur.col + step_c, cur.row) ||
          grid.occupied(cur.col, cur.row + step_r)) {
        return std::max(t, kMinRayDistance);
      }
      cur.col += step_c;
      cur.row += step_r;
      t_max_x += t_dx;
      t_max_y += t_dy;
    } else if (t_max_x < t_max_y) {
      cur.col += step_c;
      t_max_x += t_dx;
    } else {
      cur.row += step_r;
      t_max_y += t_dy;
    }
    if (grid.occupied(cur)) return std::max(t, kMinRayDistance);
  }
}

/// Distance to the first obstacle along `direction` (radians), capped at
/// `max_range`.
inline double raycast(const OccupancyGrid& grid, Vec2 origin, double direction,
                      double max_range) {
  return cast_ray(grid, origin, unit_from_angle(direction), max_range);
}

/// 4-connected component label per cell; -1 for occupied cells.
inline std::vector<int> connected_components(const OccupancyGrid& grid) {
  std::vector<int> label(grid.size(), -1);
  std::vector<std::size_t> stack;
  int next = 0;
  for (std::size_t seed = 0; seed < grid.size(); ++seed) {
    if (grid.cells()[seed] || label[seed] >= 0) continue;
    label[seed] = next;
    stack.push_back(seed);
    while (!stack.empty()) {
      const Cell c = grid.cell(stack.back());
      stack.pop_back();
      constexpr int kDc[4] = {1, -1, 0, 0};
      constexpr int kDr[4] = {0, 0, 1, -1};
      for (int k = 0; k < 4; ++k) {
        const int nc = c.col + kDc[k];
        const int nr = c.row + kDr[k];
        if (grid.occupied(nc, nr)) continue;
        const std::size_t ni = grid.index(nc, nr);
        if (label[ni] >= 0) continue;
        label[ni] = next;
        stack.push_back(ni);
      }
    }
    ++next;
  }
  return label;
}

}  // namespace t2e

#endif  // T2E_GRIDMAP_HPP_
