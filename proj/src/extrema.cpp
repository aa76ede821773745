#include "dre/extrema.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "dre/csv.hpp"

namespace dre {

namespace {

// Grid indices [i0, i1] inside the window; i1 < i0 + 2 means too few points.
std::pair<std::size_t, std::size_t> window_indices(const PotentialPath& path, Window w) {
  const double lo = std::max(w.lo, -path.left_extent());
  const double hi = std::min(w.hi, path.right_extent());
  if (hi < lo) return {1, 0};
  const double o = static_cast<double>(path.origin);
  const auto i0 = static_cast<std::size_t>(std::max(0.0, std::ceil(lo / path.grid_step + o - 1e-9)));
  const auto i1 = std::min(static_cast<std::size_t>(std::floor(hi / path.grid_step + o + 1e-9)),
                           path.values.size() - 1);
  return {i0, i1};
}

HExtremum make_extremum(const PotentialPath& p, std::size_t i, ExtremumKind k) {
  return {p.x_at(i), p.values[i], k, i};
}

}  // namespace

std::vector<HExtremum> find_h_extrema(const PotentialPath& path, double h, Window window) {
  std::vector<HExtremum> out;
  if (!(h > 0.0) || path.values.empty() || window.hi < window.lo) return out;
  const auto [i0, i1] = window_indices(path, window);
  if (i1 < i0 + 2) return out;
  const auto& f = path.values;

  enum class Mode { undecided, seek_max, seek_min } mode = Mode::undecided;
  std::size_t lo = i0, hi = i0;  // candidate minimum / maximum
  for (std::size_t i = i0 + 1; i <= i1; ++i) {
    const double v = f[i];
    switch (mode) {
      case Mode::undecided:
        if (v - f[lo] >= h) {
          // Rising by h from lo: lo is a turning point but has no h-excursion
          // on its left inside the window.
          mode = Mode::seek_max;
          hi = i;
          for (std::size_t j = lo; j <= i; ++j) {
            if (f[j] > f[hi] || (f[j] == f[hi] && j < hi)) hi = j;
          }
        } else if (f[hi] - v >= h) {
          mode = Mode::seek_min;
          lo = i;
          for (std::size_t j = hi; j <= i; ++j) {
            if (f[j] < f[lo] || (f[j] == f[lo] && j < lo)) lo = j;
          }
        } else {
          if (v < f[lo]) lo = i;
          if (v > f[hi]) hi = i;
        }
        break;
      case Mode::seek_max:
        if (v > f[hi]) {
          hi = i;
        } else if (f[hi] - v >= h) {
          out.push_back(make_extremum(path, hi, ExtremumKind::maximum));
          mode = Mode::seek_min;
          lo = i;
          for (std::size_t j = hi; j <= i; ++j) {
            if (f[j] < f[lo] || (f[j] == f[lo] && j < lo)) lo = j;
          }
        }
        break;
      case Mode::seek_min:
        if (v < f[lo]) {
          lo = i;
        } else if (v - f[lo] >= h) {
          out.push_back(make_extremum(path, lo, ExtremumKind::minimum));
          mode = Mode::seek_max;
          hi = i;
          for (std::size_t j = lo; j <= i; ++j) {
            if (f[j] > f[hi] || (f[j] == f[hi] && j < hi)) hi = j;
          }
        }
        break;
    }
  }
  return out;
}

std::vector<HExtremum> find_h_extrema(const PotentialPath& path, double h) {
  return find_h_extrema(path, h, {-path.left_extent(), path.right_extent()});
}

std::vector<HExtremum> find_h_extrema_brute_force(const PotentialPath& path, double h, Window window) {
  std::vector<HExtremum> out;
  if (!(h > 0.0) || path.values.empty() || window.hi < window.lo) return out;
  const auto [i0, i1] = window_indices(path, window);
  if (i1 < i0 + 2) return out;
  const auto& f = path.values;
  for (std::size_t i = i0; i <= i1; ++i) {
    // Minimum: going left, a point at least h higher must come before any
    // point at or below f[i]; going right, before any point strictly below.
    bool left = false, right = false;
    for (std::size_t j = i; j-- > i0;) {
      if (f[j] <= f[i]) break;
      if (f[j] >= f[i] + h) {
        left = true;
        break;
      }
    }
    for (std::size_t j = i + 1; left && j <= i1; ++j) {
      if (f[j] < f[i]) break;
      if (f[j] >= f[i] + h) {
        right = true;
        break;
      }
    }
    if (left && right) {
      out.push_back(make_extremum(path, i, ExtremumKind::minimum));
      continue;
    }
    left = right = false;
    for (std::size_t j = i; j-- > i0;) {
      if (f[j] >= f[i]) break;
      if (f[j] <= f[i] - h) {
        left = true;
        break;
      }
    }
    for (std::size_t j = i + 1; left && j <= i1; ++j) {
      if (f[j] > f[i]) break;
      if (f[j] <= f[i] - h) {
        right = true;
        break;
      }
    }
    if (left && right) out.push_back(make_extremum(path, i, ExtremumKind::maximum));
  }
  return out;
}

InsufficientExtent::InsufficientExtent(std::string coordinate, std::size_t valley, double right_extent)
    : std::runtime_error("path too short: coordinate " + coordinate + " of valley " +
                         std::to_string(valley) + " not reached within right extent " +
                         std::to_string(right_extent)),
      coordinate_(std::move(coordinate)),
      valley_(valley) {}

double default_delta(double kappa) { return std::min(0.1, (1.0 / kappa - 1.0) / 6.0); }

namespace {

// A point on the interpolant together with the grid segment [seg, seg+1]
// that contains it.
struct Point {
  double x = 0.0;
  double v = 0.0;
  std::size_t seg = 0;
  bool on_grid = false;
};

double cross(const PotentialPath& p, std::size_t k, double level) {
  const double a = p.values[k];
  const double b = p.values[k + 1];
  if (a == b) return p.x_at(k);
  return p.x_at(k) + (level - a) / (b - a) * p.grid_step;
}

// inf{x > start.x : W(x) <= level}, given W(start.x) > level.
Point first_at_or_below(const PotentialPath& p, const Point& start, double level, const char* name,
                        std::size_t valley) {
  const std::size_t last = p.values.size() - 1;
  for (std::size_t k = start.seg; k < last; ++k) {
    const double b = p.values[k + 1];
    if (b <= level) {
      const double x = std::min(std::max(cross(p, k, level), start.x), p.x_at(k + 1));
      const bool grid = (b == level && x == p.x_at(k + 1));
      return {x, level, grid ? k + 1 : k, grid};
    }
  }
  throw InsufficientExtent(name, valley, p.right_extent());
}

struct RiseResult {
  Point tau;
  Point bottom;
};

// First point after `start` where W rises h above its running minimum, and the
// leftmost point attaining that minimum.
RiseResult first_rise(const PotentialPath& p, const Point& start, double h, std::size_t valley) {
  const std::size_t last = p.values.size() - 1;
  Point bottom = start;
  double sv = start.v;
  for (std::size_t k = start.seg; k < last; ++k) {
    const double ev = p.values[k + 1];
    if (ev > sv && ev - bottom.v >= h) {
      const double level = bottom.v + h;
      const double x = std::min(std::max(cross(p, k, level), start.x), p.x_at(k + 1));
      return {{x, level, k, false}, bottom};
    }
    if (ev < bottom.v) bottom = {p.x_at(k + 1), ev, k + 1, true};
    sv = ev;
  }
  throw InsufficientExtent("tau", valley, p.right_extent());
}

// sup{s < bottom.x : W(s) >= level}, scanning left.
Point last_at_or_above_left(const PotentialPath& p, const Point& bottom, double level, std::size_t valley) {
  std::size_t i = bottom.on_grid ? bottom.seg : bottom.seg + 1;  // right end of the first segment to test
  while (i > 0) {
    const double a = p.values[i - 1];
    if (a >= level) {
      const double x = std::max(std::min(cross(p, i - 1, level), bottom.x), p.x_at(i - 1));
      return {x, level, i - 1, a == level && x == p.x_at(i - 1)};
    }
    --i;
  }
  throw InsufficientExtent("l_minus", valley, p.right_extent());
}

std::vector<ValleyRecord> build(const PotentialPath& path, double h_t, double delta, std::size_t n,
                                bool stop_quietly) {
  if (!(h_t > 0.0)) throw std::invalid_argument("build_valleys: h_t must be > 0");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("build_valleys: delta must lie in (0,1)");
  if (path.values.size() < 2) throw std::invalid_argument("build_valleys: path has fewer than two points");
  const double h_plus = ValleyParams{h_t, delta}.h_plus(path.kappa);
  std::vector<ValleyRecord> out;
  Point prev_end{0.0, path.values[path.origin], path.origin, true};
  if (path.origin == path.values.size() - 1) {
    if (stop_quietly) return out;
    throw InsufficientExtent("l_sharp", 1, path.right_extent());
  }
  for (std::size_t i = 1; stop_quietly || i <= n; ++i) {
    try {
      ValleyRecord r;
      r.index = i;
      const Point sharp = first_at_or_below(path, prev_end, prev_end.v - h_plus, "l_sharp", i);
      const RiseResult rise = first_rise(path, sharp, h_t, i);
      const double b = rise.bottom.v;
      const Point lp = first_at_or_below(path, rise.tau, b - h_plus, "l_plus", i);
      const Point ls = first_at_or_below(path, rise.tau, b + 0.75 * h_t, "l_star", i);
      const Point le = first_at_or_below(path, rise.tau, b + 0.5 * h_t, "l_exit", i);
      const Point lm = last_at_or_above_left(path, rise.bottom, b + h_plus, i);

      std::size_t j = rise.bottom.seg + 1;
      std::size_t top = j;
      for (; j < path.values.size() && path.x_at(j) < lp.x; ++j) {
        if (path.values[j] > path.values[top]) top = j;
      }
      r.l_sharp = sharp.x;
      r.bottom = rise.bottom.x;
      r.bottom_value = b;
      r.bottom_index = rise.bottom.on_grid ? rise.bottom.seg : rise.bottom.seg + 1;
      r.tau = rise.tau.x;
      r.l_plus = lp.x;
      r.top = path.x_at(top);
      r.top_value = path.values[top];
      r.l_star = ls.x;
      r.l_exit = le.x;
      r.l_minus = lm.x;
      out.push_back(r);
      prev_end = lp;
    } catch (const InsufficientExtent&) {
      if (stop_quietly) break;
      throw;
    }
  }
  return out;
}

}  // namespace

std::vector<ValleyRecord> build_valleys(const PotentialPath& path, double h_t, double delta, std::size_t n) {
  return build(path, h_t, delta, n, false);
}

std::vector<ValleyRecord> build_valleys_all(const PotentialPath& path, double h_t, double delta) {
  return build(path, h_t, delta, 0, true);
}

double ShiftedSegment::value_at(double pos) const {
  if (x.empty() || pos < x.front() || pos > x.back()) {
    throw OutOfExtent("ShiftedSegment::value_at: position outside the valley");
  }
  const auto it = std::upper_bound(x.begin(), x.end(), pos);
  if (it == x.end()) return v.back();
  const auto k = static_cast<std::size_t>(it - x.begin());
  if (k == 0) return v.front();
  const double w = (pos - x[k - 1]) / (x[k] - x[k - 1]);
  return v[k - 1] + w * (v[k] - v[k - 1]);
}

std::vector<ShiftedSegment> valley_shifted_potentials(const PotentialPath& path,
                                                      const std::vector<ValleyRecord>& valleys) {
  std::vector<ShiftedSegment> out;
  out.reserve(valleys.size());
  for (const auto& r : valleys) {
    ShiftedSegment s;
    s.index = r.index;
    const double plus_gap = path.value_at(r.l_minus) - r.bottom_value;
    s.x.push_back(r.l_minus);
    s.v.push_back(plus_gap);
    const auto first = static_cast<std::size_t>(std::floor(r.l_minus / path.grid_step + path.origin)) + 1;
    bool bottom_done = false;
    for (std::size_t j = first; j < path.values.size() && path.x_at(j) < r.l_exit; ++j) {
      const double xj = path.x_at(j);
      if (xj <= r.l_minus) continue;
      if (!bottom_done && r.bottom <= xj) {
        if (r.bottom < xj) {
          s.x.push_back(r.bottom);
          s.v.push_back(0.0);
        }
        bottom_done = true;
      }
      s.x.push_back(xj);
      s.v.push_back(path.values[j] - r.bottom_value);
    }
    s.x.push_back(r.l_exit);
    s.v.push_back(path.value_at(r.l_exit) - r.bottom_value);
    out.push_back(std::move(s));
  }
  return out;
}

double grid_tolerance(double grid_step) {
  return 3.0 * std::sqrt(grid_step * std::log(1.0 / grid_step));
}

std::string check_valley_invariants(const PotentialPath& path, const std::vector<ValleyRecord>& v,
                                    double h_t, double delta) {
  const double h_plus = ValleyParams{h_t, delta}.h_plus(path.kappa);
  const double tol = grid_tolerance(path.grid_step);
  double prev_plus = 0.0;
  for (const auto& r : v) {
    const std::string tag = "valley " + std::to_string(r.index) + ": ";
    if (!(prev_plus < r.l_sharp && r.l_sharp <= r.bottom && r.bottom < r.tau && r.tau < r.l_star &&
          r.l_star < r.l_exit && r.l_exit < r.l_plus)) {
      return tag + "ordering chain l_plus(prev) < l_sharp <= bottom < tau < l_star < l_exit < l_plus fails";
    }
    if (!(prev_plus <= r.l_minus && r.l_minus < r.bottom && r.bottom < r.tau && r.tau < r.top &&
          r.top < r.l_plus)) {
      return tag + "ordering chain l_plus(prev) <= l_minus < bottom < tau < top < l_plus fails";
    }
    const auto near = [&](double x, double target) { return std::fabs(path.value_at(x) - target) <= tol; };
    if (!near(r.bottom, r.bottom_value)) return tag + "W(bottom) differs from the recorded bottom value";
    if (!near(r.tau, r.bottom_value + h_t)) return tag + "W(tau) != bottom + h_t";
    if (!near(r.l_exit, r.bottom_value + 0.5 * h_t)) return tag + "W(l_exit) != bottom + h_t/2";
    if (!near(r.l_star, r.bottom_value + 0.75 * h_t)) return tag + "W(l_star) != bottom + 3h_t/4";
    if (!near(r.l_plus, r.bottom_value - h_plus)) return tag + "W(l_plus) != bottom - h_plus";
    if (!near(r.l_minus, r.bottom_value + h_plus)) return tag + "W(l_minus) != bottom + h_plus";
    prev_plus = r.l_plus;
  }
  return {};
}

void write_valleys_csv(const std::vector<ValleyRecord>& valleys, std::ostream& os) {
  CsvWriter w(os, {"index", "l_sharp", "bottom", "tau", "l_plus", "top", "l_star", "l_exit", "l_minus",
                   "bottom_value", "top_value"});
  for (const auto& r : valleys) {
    w << static_cast<std::uint64_t>(r.index) << r.l_sharp << r.bottom << r.tau << r.l_plus << r.top
      << r.l_star << r.l_exit << r.l_minus << r.bottom_value << r.top_value;
    w.end_row();
  }
}

}  // namespace dre
