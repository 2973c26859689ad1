#pragma once

// Mask -> polygon extraction. Boundaries are traced along pixel cracks, so
// vertices live on integer pixel corners; a closing Douglas-Peucker pass with
// eps = 1 px snaps staircase jitter. Object pixels are 8-connected, holes
// (background) 4-connected.

#include <cstdint>
#include <deque>
#include <vector>

#include "shapegrasp/geometry.hpp"
#include "shapegrasp/image.hpp"

namespace shapegrasp {

struct MaskComponent {
  Polygon polygon;          // outer ring CCW, hole rings CW, pixel-corner coords
  std::vector<int> pixels;  // pixel indices (y * width + x), sorted ascending
  double area_px = 0.0;     // pixel count
};

namespace detail {

// Walks the crack boundary of a region keeping region cells on the right of
// the walking direction. At checkerboard corners it turns left, which keeps
// diagonally-touching region cells on a single boundary (8-connectivity).
template <typename InRegion>
inline Ring trace_crack_boundary(int start_x, int start_y, InRegion in_region) {
  enum Dir { E = 0, S = 1, W = 2, N = 3 };
  static constexpr int step_x[4] = {1, 0, -1, 0};
  static constexpr int step_y[4] = {0, 1, 0, -1};

  auto cell_right_front = [&](int cx, int cy, int d, int& outx, int& outy) {
    switch (d) {
      case E: outx = cx; outy = cy; break;
      case S: outx = cx - 1; outy = cy; break;
      case W: outx = cx - 1; outy = cy - 1; break;
      default: outx = cx; outy = cy - 1; break;
    }
  };
  auto cell_left_front = [&](int cx, int cy, int d, int& outx, int& outy) {
    switch (d) {
      case E: outx = cx; outy = cy - 1; break;
      case S: outx = cx; outy = cy; break;
      case W: outx = cx - 1; outy = cy; break;
      default: outx = cx - 1; outy = cy - 1; break;
    }
  };

  Ring ring;
  int x = start_x, y = start_y;
  int dir = E;
  const int x0 = x, y0 = y;
  do {
    int nx = x + step_x[dir];
    int ny = y + step_y[dir];
    int bx, by, dx_, dy_;
    cell_left_front(nx, ny, dir, bx, by);
    cell_right_front(nx, ny, dir, dx_, dy_);
    int new_dir;
    if (in_region(bx, by)) {
      new_dir = (dir + 3) % 4;  // left turn
    } else if (in_region(dx_, dy_)) {
      new_dir = dir;  // straight
    } else {
      new_dir = (dir + 1) % 4;  // right turn
    }
    if (new_dir != dir) ring.push_back({static_cast<double>(nx), static_cast<double>(ny)});
    x = nx;
    y = ny;
    dir = new_dir;
  } while (!(x == x0 && y == y0 && dir == E));
  return ring;
}

}  // namespace detail

// All 8-connected foreground components with their boundary polygons and
// pixel sets, sorted by area descending (ties by first pixel index).
inline std::vector<MaskComponent> extract_components(const MaskImage& mask, double snap_eps = 1.0) {
  const int w = mask.width, h = mask.height;
  std::vector<int> label(static_cast<std::size_t>(w) * h, 0);

  auto fg = [&](int x, int y) { return mask.in_bounds(x, y) && mask.at(x, y) != 0; };

  // 8-connected foreground labeling.
  int next_label = 0;
  std::vector<std::vector<int>> comp_pixels;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!fg(x, y) || label[y * w + x] != 0) continue;
      ++next_label;
      comp_pixels.emplace_back();
      std::deque<std::pair<int, int>> queue{{x, y}};
      label[y * w + x] = next_label;
      while (!queue.empty()) {
        auto [cx, cy] = queue.front();
        queue.pop_front();
        comp_pixels.back().push_back(cy * w + cx);
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            int nx = cx + dx, ny = cy + dy;
            if ((dx || dy) && fg(nx, ny) && label[ny * w + nx] == 0) {
              label[ny * w + nx] = next_label;
              queue.push_back({nx, ny});
            }
          }
      }
    }
  }

  // Background labeling: 0 = unvisited, -1 = exterior, -(k+1) = hole k.
  std::vector<int> bg(static_cast<std::size_t>(w) * h, 0);
  auto flood_bg = [&](int sx, int sy, int tag) {
    std::deque<std::pair<int, int>> queue{{sx, sy}};
    bg[sy * w + sx] = tag;
    std::vector<int> cells;
    while (!queue.empty()) {
      auto [cx, cy] = queue.front();
      queue.pop_front();
      cells.push_back(cy * w + cx);
      static constexpr int dx4[4] = {1, -1, 0, 0};
      static constexpr int dy4[4] = {0, 0, 1, -1};
      for (int k = 0; k < 4; ++k) {
        int nx = cx + dx4[k], ny = cy + dy4[k];
        if (mask.in_bounds(nx, ny) && !fg(nx, ny) && bg[ny * w + nx] == 0) {
          bg[ny * w + nx] = tag;
          queue.push_back({nx, ny});
        }
      }
    }
    return cells;
  };
  for (int x = 0; x < w; ++x) {
    if (!fg(x, 0) && bg[x] == 0) flood_bg(x, 0, -1);
    if (!fg(x, h - 1) && bg[(h - 1) * w + x] == 0) flood_bg(x, h - 1, -1);
  }
  for (int y = 0; y < h; ++y) {
    if (!fg(0, y) && bg[y * w] == 0) flood_bg(0, y, -1);
    if (!fg(w - 1, y) && bg[y * w + w - 1] == 0) flood_bg(w - 1, y, -1);
  }

  struct Hole {
    int owner_label;
    int start_x, start_y;
    int tag;
  };
  std::vector<Hole> holes;
  int hole_tag = -2;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (fg(x, y) || bg[y * w + x] != 0) continue;
      flood_bg(x, y, hole_tag);
      // The pixel above the topmost-leftmost hole pixel is foreground.
      holes.push_back({label[(y - 1) * w + x], x, y, hole_tag});
      --hole_tag;
    }
  }

  std::vector<MaskComponent> out(next_label);
  for (int li = 1; li <= next_label; ++li) {
    MaskComponent& comp = out[li - 1];
    comp.pixels = std::move(comp_pixels[li - 1]);
    std::sort(comp.pixels.begin(), comp.pixels.end());
    comp.area_px = static_cast<double>(comp.pixels.size());

    int sx = comp.pixels.front() % w, sy = comp.pixels.front() / w;
    Ring outer = detail::trace_crack_boundary(
        sx, sy, [&](int x, int y) { return mask.in_bounds(x, y) && label[y * w + x] == li; });
    if (outer.size() < 3) {
      // Single-pixel component: its crack boundary is the unit square.
      outer = {{double(sx), double(sy)}, {double(sx + 1), double(sy)},
               {double(sx + 1), double(sy + 1)}, {double(sx), double(sy + 1)}};
    }
    if (signed_area(outer) < 0) std::reverse(outer.begin(), outer.end());
    comp.polygon.rings.push_back(simplify_ring(outer, snap_eps));
  }

  for (const Hole& hole : holes) {
    if (hole.owner_label < 1 || hole.owner_label > next_label) continue;
    Ring ring = detail::trace_crack_boundary(
        hole.start_x, hole.start_y,
        [&](int x, int y) { return mask.in_bounds(x, y) && bg[y * w + x] == hole.tag; });
    if (ring.size() < 3) {
      int sx = hole.start_x, sy = hole.start_y;
      ring = {{double(sx), double(sy)}, {double(sx + 1), double(sy)},
              {double(sx + 1), double(sy + 1)}, {double(sx), double(sy + 1)}};
    }
    if (signed_area(ring) > 0) std::reverse(ring.begin(), ring.end());  // holes run CW
    out[hole.owner_label - 1].polygon.rings.push_back(simplify_ring(ring, snap_eps));
  }

  std::sort(out.begin(), out.end(), [](const MaskComponent& a, const MaskComponent& b) {
    if (a.area_px != b.area_px) return a.area_px > b.area_px;
    return a.pixels.front() < b.pixels.front();
  });
  return out;
}

// Polygon-only view of extract_components.
inline std::vector<Polygon> extract_contours(const MaskImage& mask) {
  std::vector<Polygon> polys;
  for (auto& comp : extract_components(mask)) polys.push_back(std::move(comp.polygon));
  return polys;
}

}  // namespace shapegrasp
