#include "iodeep/rt/contour.hpp"

#include <algorithm>
#include <array>
#include <deque>

#include "iodeep/error.hpp"
#include "iodeep/nn/preprocess.hpp"

namespace iodeep::rt {

namespace {

struct Grid {
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::vector<std::int32_t> label;  // -1 background

  std::int32_t at(long r, long c) const {
    if (r < 0 || c < 0 || r >= static_cast<long>(rows) || c >= static_cast<long>(cols)) return -1;
    return label[static_cast<std::size_t>(r) * cols + static_cast<std::size_t>(c)];
  }
};

struct Step {
  int dx;
  int dy;
  friend bool operator==(const Step&, const Step&) = default;
};

constexpr Step turn_right(Step h) { return {-h.dy, h.dx}; }
constexpr Step turn_left(Step h) { return {h.dy, -h.dx}; }

long floor_half(long v) { return v >= 0 ? v / 2 : -((-v + 1) / 2); }

/// Pixel on the given side of the unit edge starting at (x, y) along h.
std::pair<long, long> side_pixel(long x, long y, Step h, Step side) {
  const long col = floor_half(2 * x + h.dx + side.dx);
  const long row = floor_half(2 * y + h.dy + side.dy);
  return {row, col};
}

/// Walks the outer pixel-edge boundary with the component on the right,
/// treating diagonal contacts as separate (4-connectivity).
std::vector<Point> trace_outer(const Grid& g, std::int32_t id, long r0, long c0) {
  auto inside = [&](std::pair<long, long> rc) { return g.at(rc.first, rc.second) == id; };
  const Step start_h{1, 0};
  const long sx = c0;
  const long sy = r0;
  long x = sx;
  long y = sy;
  Step h = start_h;
  std::vector<Point> pts;
  do {
    x += h.dx;
    y += h.dy;
    const Step right = turn_right(h);
    const Step left = turn_left(h);
    const bool r_in = inside(side_pixel(x, y, h, right));
    const bool l_in = inside(side_pixel(x, y, h, left));
    Step next = h;
    if (!r_in) {
      next = right;
    } else if (l_in) {
      next = left;
    }
    if (!(next == h)) pts.push_back({static_cast<double>(x), static_cast<double>(y)});
    h = next;
  } while (!(x == sx && y == sy && h == start_h));
  // The start vertex is always a corner and was emitted last.
  std::rotate(pts.rbegin(), pts.rbegin() + 1, pts.rend());
  return pts;
}

}  // namespace

double signed_area(const std::vector<Point>& p) {
  double a = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto& u = p[i];
    const auto& v = p[(i + 1) % p.size()];
    a += u.x * v.y - v.x * u.y;
  }
  return a / 2;
}

std::vector<RoiPolyline> mask_to_polylines(const nn::Tensor& mask, const ContourOptions& opt) {
  if (!(opt.threshold > 0.0f && opt.threshold < 1.0f)) {
    throw Error(Errc::InvalidRequest, "threshold must lie in (0, 1)");
  }
  nn::Tensor m;
  if (mask.shape.rank() == 2) {
    m = nn::Tensor(nn::TensorShape{1, mask.shape[0], mask.shape[1]}, mask.data);
  } else if (mask.shape.rank() == 3 && mask.shape.channels() == 1) {
    m = mask;
  } else {
    throw Error(Errc::ShapeMismatch, "mask must be (H,W) or (1,H,W), got " + mask.shape.str());
  }
  const auto rows = opt.native_rows.value_or(m.shape.height());
  const auto cols = opt.native_columns.value_or(m.shape.width());
  if (rows != m.shape.height() || cols != m.shape.width()) m = nn::resize_nearest(m, rows, cols);

  Grid g{rows, cols, std::vector<std::int32_t>(std::size_t{rows} * cols, -1)};
  std::vector<std::uint8_t> fg(g.label.size());
  for (std::size_t i = 0; i < fg.size(); ++i) fg[i] = m.data[i] >= opt.threshold;

  struct Component {
    long r0, c0;
    std::size_t area;
  };
  std::vector<Component> comps;
  std::deque<std::pair<long, long>> queue;
  for (long r = 0; r < static_cast<long>(rows); ++r) {
    for (long c = 0; c < static_cast<long>(cols); ++c) {
      const auto idx = static_cast<std::size_t>(r) * cols + c;
      if (!fg[idx] || g.label[idx] >= 0) continue;
      const auto id = static_cast<std::int32_t>(comps.size());
      comps.push_back({r, c, 0});
      g.label[idx] = id;
      queue.emplace_back(r, c);
      while (!queue.empty()) {
        const auto [pr, pc] = queue.front();
        queue.pop_front();
        ++comps.back().area;
        constexpr std::array<std::pair<int, int>, 4> kNeighbours{{{-1, 0}, {1, 0}, {0, -1}, {0, 1}}};
        for (const auto& [dr, dc] : kNeighbours) {
          const long nr = pr + dr;
          const long nc = pc + dc;
          if (nr < 0 || nc < 0 || nr >= static_cast<long>(rows) || nc >= static_cast<long>(cols)) continue;
          const auto n = static_cast<std::size_t>(nr) * cols + nc;
          if (fg[n] && g.label[n] < 0) {
            g.label[n] = id;
            queue.emplace_back(nr, nc);
          }
        }
      }
    }
  }

  std::vector<RoiPolyline> out;
  for (std::size_t i = 0; i < comps.size(); ++i) {
    if (comps[i].area < opt.min_area) continue;
    RoiPolyline p;
    p.slice_ref_uid = opt.slice_ref_uid;
    p.points = trace_outer(g, static_cast<std::int32_t>(i), comps[i].r0, comps[i].c0);
    if (signed_area(p.points) < 0) std::reverse(p.points.begin(), p.points.end());
    p.label = opt.label_prefix + "_" + std::to_string(out.size() + 1);
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<std::uint8_t> rasterize(const std::vector<Point>& poly, std::uint32_t rows,
                                    std::uint32_t columns) {
  std::vector<std::uint8_t> out(std::size_t{rows} * columns, 0);
  if (poly.size() < 3) return out;
  std::vector<double> xs;
  for (std::uint32_t r = 0; r < rows; ++r) {
    const double yc = r + 0.5;
    xs.clear();
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const auto& a = poly[i];
      const auto& b = poly[(i + 1) % poly.size()];
      if ((a.y > yc) != (b.y > yc)) xs.push_back(a.x + (yc - a.y) * (b.x - a.x) / (b.y - a.y));
    }
    std::sort(xs.begin(), xs.end());
    for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
      for (std::uint32_t c = 0; c < columns; ++c) {
        const double xc = c + 0.5;
        if (xc >= xs[k] && xc < xs[k + 1]) out[std::size_t{r} * columns + c] = 1;
      }
    }
  }
  return out;
}

double mean_inside(const nn::Tensor& mask, const std::vector<Point>& polygon) {
  const auto rank = mask.shape.rank();
  const auto rows = rank == 2 ? mask.shape[0] : mask.shape[1];
  const auto cols = rank == 2 ? mask.shape[1] : mask.shape[2];
  const auto raster = rasterize(polygon, rows, cols);
  double sum = 0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < raster.size(); ++i) {
    if (raster[i]) {
      sum += mask.data[i];
      ++n;
    }
  }
  return n ? sum / n : 0.0;
}

}  // namespace iodeep::rt
