#include "dre/environment.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "dre/csv.hpp"

namespace dre {

void ExtentPolicy::validate() const {
  if (!(stop_depth > 0.0)) throw std::invalid_argument("ExtentPolicy: stop_depth must be > 0");
  if (!(left_barrier > 0.0)) throw std::invalid_argument("ExtentPolicy: left_barrier must be > 0");
  if (!(min_right_extent >= 0.0)) {
    throw std::invalid_argument("ExtentPolicy: min_right_extent must be >= 0");
  }
  if (max_points < 3) throw std::invalid_argument("ExtentPolicy: max_points too small");
}

std::size_t PotentialPath::segment_of(double x) const {
  const double pos = x / grid_step + static_cast<double>(origin);
  if (pos <= 0.0) return 0;
  const auto i = static_cast<std::size_t>(std::floor(pos));
  return std::min(i, values.size() - 2);
}

double PotentialPath::value_at(double x) const {
  if (!contains(x)) throw OutOfExtent("value_at: x = " + std::to_string(x) + " outside extents");
  const std::size_t i = segment_of(x);
  const double w = (x - x_at(i)) / grid_step;
  return values[i] + w * (values[i + 1] - values[i]);
}

double PotentialPath::slope_at(double x) const {
  if (!contains(x)) throw OutOfExtent("slope_at: x = " + std::to_string(x) + " outside extents");
  const std::size_t i = segment_of(x);
  return (values[i + 1] - values[i]) / grid_step;
}

PotentialPath make_path(double kappa, double grid_step, std::size_t origin, std::vector<double> values) {
  if (values.size() < 2 || origin >= values.size()) {
    throw std::invalid_argument("make_path: need at least two values and origin inside the array");
  }
  if (!(grid_step > 0.0)) throw std::invalid_argument("make_path: grid_step must be > 0");
  PotentialPath p;
  p.kappa = kappa;
  p.grid_step = grid_step;
  p.origin = origin;
  p.values = std::move(values);
  return p;
}

PotentialGenerator::PotentialGenerator(double kappa, double grid_step, ExtentPolicy policy,
                                       RngStream stream)
    : kappa_(kappa),
      grid_step_(grid_step),
      policy_(policy),
      stream_(stream),
      right_(stream.child(0)),
      left_(stream.child(1)),
      sd_(std::sqrt(grid_step)) {
  if (!(kappa > 0.0 && kappa < 1.0)) throw std::invalid_argument("PotentialGenerator: kappa must lie in (0,1)");
  if (!(grid_step > 0.0)) throw std::invalid_argument("PotentialGenerator: grid_step must be > 0");
  policy_.validate();
}

// Increment of W_kappa over one step to the right: N(-(kappa/2) dx, dx).
double PotentialGenerator::right_step() { return -0.5 * kappa_ * grid_step_ + sd_ * right_.normal(); }

// Increment of W_kappa over one step to the left: the mirrored construction,
// N(+(kappa/2) dx, dx).
double PotentialGenerator::left_step() { return 0.5 * kappa_ * grid_step_ + sd_ * left_.normal(); }

PotentialPath PotentialGenerator::sample() {
  std::vector<double> right{0.0};
  double run_max = 0.0;
  const double min_x = policy_.min_right_extent;
  while (true) {
    const double v = right.back() + right_step();
    right.push_back(v);
    run_max = std::max(run_max, v);
    const double x = static_cast<double>(right.size() - 1) * grid_step_;
    if (x >= min_x && run_max - v >= policy_.stop_depth) break;
    if (right.size() > policy_.max_points) {
      throw ExtentOverflow("sample_potential: right half exceeded max_points before reaching stop_depth");
    }
  }
  std::vector<double> left;
  double v = 0.0;
  while (v < policy_.left_barrier) {
    v += left_step();
    left.push_back(v);
    if (left.size() + right.size() > policy_.max_points) {
      throw ExtentOverflow("sample_potential: left half exceeded max_points before reaching left_barrier");
    }
  }
  PotentialPath p;
  p.kappa = kappa_;
  p.grid_step = grid_step_;
  p.origin = left.size();
  p.stream = stream_;
  p.values.reserve(left.size() + right.size());
  p.values.assign(left.rbegin(), left.rend());
  p.values.insert(p.values.end(), right.begin(), right.end());
  return p;
}

PotentialPath PotentialGenerator::sample_fixed(double left_extent, double right_extent) {
  const auto n_right = static_cast<std::size_t>(std::ceil(right_extent / grid_step_ - 1e-9));
  const auto n_left = static_cast<std::size_t>(std::ceil(left_extent / grid_step_ - 1e-9));
  if (n_right + n_left + 1 > policy_.max_points) throw ExtentOverflow("sample_fixed: too many points");
  PotentialPath p;
  p.kappa = kappa_;
  p.grid_step = grid_step_;
  p.origin = n_left;
  p.stream = stream_;
  p.values.assign(n_left + n_right + 1, 0.0);
  for (std::size_t k = 0; k < n_left; ++k) p.values[n_left - 1 - k] = p.values[n_left - k] + left_step();
  for (std::size_t k = 0; k < n_right; ++k) p.values[n_left + k + 1] = p.values[n_left + k] + right_step();
  return p;
}

void PotentialGenerator::extend_right(PotentialPath& path, double new_right_extent) {
  if (path.grid_step != grid_step_ || path.kappa != kappa_) {
    throw std::invalid_argument("extend_right: path was not produced by this generator");
  }
  const auto target = static_cast<std::size_t>(std::ceil(new_right_extent / grid_step_ - 1e-9));
  const std::size_t have = path.values.size() - 1 - path.origin;
  if (target <= have) return;
  if (path.origin + target + 1 > policy_.max_points) throw ExtentOverflow("extend_right: too many points");
  path.values.reserve(path.origin + target + 1);
  for (std::size_t k = have; k < target; ++k) path.values.push_back(path.values.back() + right_step());
}

PotentialPath sample_potential(double kappa, double grid_step, const ExtentPolicy& policy,
                               const RngStream& stream) {
  PotentialGenerator gen(kappa, grid_step, policy, stream);
  return gen.sample();
}

PotentialPath refine(const PotentialPath& path, const RngStream& stream) {
  Rng rng(stream);
  const double sd = std::sqrt(path.grid_step / 4.0);
  PotentialPath out;
  out.kappa = path.kappa;
  out.grid_step = path.grid_step / 2.0;
  out.origin = 2 * path.origin;
  out.stream = path.stream;
  out.values.resize(2 * path.values.size() - 1);
  for (std::size_t i = 0; i + 1 < path.values.size(); ++i) {
    const double a = path.values[i];
    const double b = path.values[i + 1];
    out.values[2 * i] = a;
    out.values[2 * i + 1] = 0.5 * (a + b) + sd * rng.normal();
  }
  out.values.back() = path.values.back();
  return out;
}

namespace {

// int_u^w exp(f) for f linear between f(u) = fu and f(w) = fw.
double exp_linear_integral(double width, double fu, double fw) {
  const double d = fw - fu;
  if (std::fabs(d) < 1e-12) return width * std::exp(0.5 * (fu + fw));
  return width * std::exp(fu) * std::expm1(d) / d;
}

// int_0^r exp(W) for r >= 0.
double a_integral_right(const PotentialPath& p, double r) {
  double sum = 0.0;
  std::size_t i = p.origin;
  while (i + 1 < p.values.size() && p.x_at(i + 1) <= r) {
    sum += exp_linear_integral(p.grid_step, p.values[i], p.values[i + 1]);
    ++i;
  }
  const double x = p.x_at(i);
  if (r > x && i + 1 < p.values.size()) sum += exp_linear_integral(r - x, p.values[i], p.value_at(r));
  return sum;
}

// int_r^0 exp(W) for r <= 0.
double a_integral_left(const PotentialPath& p, double r) {
  double sum = 0.0;
  std::size_t i = p.origin;
  while (i > 0 && p.x_at(i - 1) >= r) {
    sum += exp_linear_integral(p.grid_step, p.values[i - 1], p.values[i]);
    --i;
  }
  const double x = p.x_at(i);
  if (r < x && i > 0) sum += exp_linear_integral(x - r, p.value_at(r), p.values[i]);
  return sum;
}

}  // namespace

double a_integral(const PotentialPath& path, double r) {
  if (!path.contains(r)) {
    throw OutOfExtent("a_integral: r = " + std::to_string(r) + " outside [" +
                      std::to_string(-path.left_extent()) + ", " + std::to_string(path.right_extent()) + "]");
  }
  if (r >= 0.0) return a_integral_right(path, r);
  return -a_integral_left(path, r);
}

AInfinity a_infinity(const PotentialPath& path, double stop_depth) {
  double run_max = 0.0;
  for (std::size_t i = path.origin; i < path.values.size(); ++i) run_max = std::max(run_max, path.values[i]);
  const double end = path.values.back();
  if (run_max - end < stop_depth) {
    throw ExtentOverflow("a_infinity: path ends only " + std::to_string(run_max - end) +
                         " below its running maximum (need " + std::to_string(stop_depth) +
                         "); A_inf is not resolved on this extent");
  }
  return {a_integral(path, path.right_extent()), std::exp(end)};
}

void write_path_csv(const PotentialPath& path, std::ostream& os) {
  {
    CsvWriter head(os, {"kappa", "grid_step", "left_extent", "right_extent", "seed", "stream"});
    head << path.kappa << path.grid_step << path.left_extent() << path.right_extent()
         << path.stream.base_seed << path.stream.stream_id;
    head.end_row();
  }
  CsvWriter body(os, {"value"});
  for (double v : path.values) {
    body << v;
    body.end_row();
  }
}

PotentialPath read_path_csv(std::istream& is) {
  std::vector<std::string> rec;
  if (!read_csv_record(is, rec) || rec.size() != 6 || rec[0] != "kappa") {
    throw CsvError("read_path_csv: bad header block");
  }
  if (!read_csv_record(is, rec) || rec.size() != 6) throw CsvError("read_path_csv: missing header row");
  PotentialPath p;
  p.kappa = parse_double(rec[0]);
  p.grid_step = parse_double(rec[1]);
  p.origin = static_cast<std::size_t>(std::llround(parse_double(rec[2]) / p.grid_step));
  p.stream.base_seed = std::stoull(rec[4]);
  p.stream.stream_id = std::stoull(rec[5]);
  if (!read_csv_record(is, rec) || rec.size() != 1 || rec[0] != "value") {
    throw CsvError("read_path_csv: missing value block");
  }
  while (read_csv_record(is, rec)) {
    if (rec.size() != 1) throw CsvError("read_path_csv: value rows must have one field");
    p.values.push_back(parse_double(rec[0]));
  }
  if (p.values.size() < 2 || p.origin >= p.values.size()) throw CsvError("read_path_csv: inconsistent extents");
  return p;
}

void write_path_binary(const PotentialPath& path, std::ostream& os) {
  const char magic[8] = {'D', 'R', 'E', 'P', 'O', 'T', '1', '\0'};
  os.write(magic, 8);
  const double head[4] = {path.kappa, path.grid_step, path.left_extent(), path.right_extent()};
  os.write(reinterpret_cast<const char*>(head), sizeof head);
  const std::uint64_t ids[4] = {path.stream.base_seed, path.stream.stream_id, path.origin,
                                path.values.size()};
  os.write(reinterpret_cast<const char*>(ids), sizeof ids);
  os.write(reinterpret_cast<const char*>(path.values.data()),
           static_cast<std::streamsize>(path.values.size() * sizeof(double)));
}

PotentialPath read_path_binary(std::istream& is) {
  char magic[8];
  is.read(magic, 8);
  if (!is || std::memcmp(magic, "DREPOT1", 8) != 0) throw CsvError("read_path_binary: bad magic");
  double head[4];
  std::uint64_t ids[4];
  is.read(reinterpret_cast<char*>(head), sizeof head);
  is.read(reinterpret_cast<char*>(ids), sizeof ids);
  if (!is) throw CsvError("read_path_binary: truncated header");
  PotentialPath p;
  p.kappa = head[0];
  p.grid_step = head[1];
  p.stream = {ids[0], ids[1]};
  p.origin = ids[2];
  p.values.resize(ids[3]);
  is.read(reinterpret_cast<char*>(p.values.data()), static_cast<std::streamsize>(ids[3] * sizeof(double)));
  if (!is) throw CsvError("read_path_binary: truncated value array");
  return p;
}

}  // namespace dre
