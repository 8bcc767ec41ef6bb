#include "mlab/grid.hpp"

#include "mlab/quadrature.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

namespace mlab {

namespace {

// Catmull-Rom weights for fractional offset t in [0,1].
inline void catmull_rom_w(double t, double w[4]) {
  double t2 = t * t, t3 = t2 * t;
  w[0] = 0.5 * (-t3 + 2.0 * t2 - t);
  w[1] = 0.5 * (3.0 * t3 - 5.0 * t2 + 2.0);
  w[2] = 0.5 * (-3.0 * t3 + 4.0 * t2 + t);
  w[3] = 0.5 * (t3 - t2);
}

inline std::int64_t clamp_idx(std::int64_t i, std::int64_t n) {
  return std::max<std::int64_t>(0, std::min(i, n - 1));
}

}  // namespace

GridFunction::GridFunction(Box box, std::vector<std::int64_t> resolution,
                           std::vector<double> values, double tail_mass_bound)
    : box_(std::move(box)), res_(std::move(resolution)), values_(std::move(values)),
      tail_(tail_mass_bound) {
  if (box_.dim() != static_cast<int>(res_.size()))
    throw std::invalid_argument("GridFunction: box/resolution dimension mismatch");
  std::int64_t total = 1;
  for (std::size_t a = 0; a < res_.size(); ++a) {
    if (res_[a] < 2) throw std::invalid_argument("GridFunction: resolution must be >= 2");
    total *= res_[a];
    step_.push_back((box_.hi[a] - box_.lo[a]) / static_cast<double>(res_[a] - 1));
  }
  if (total != static_cast<std::int64_t>(values_.size()))
    throw std::invalid_argument("GridFunction: sample count mismatch");
  for (double v : values_)
    if (!(v >= 0.0) || !std::isfinite(v))
      throw std::invalid_argument("GridFunction: samples must be finite and nonnegative");
}

double GridFunction::eval(const Vec& x) const {
  if (!box_.contains(x)) return 0.0;
  if (dim() == 1) {
    double u = (x[0] - box_.lo[0]) / step_[0];
    std::int64_t i = static_cast<std::int64_t>(std::floor(u));
    i = clamp_idx(i, res_[0] - 1);
    double t = u - static_cast<double>(i);
    double w[4];
    catmull_rom_w(t, w);
    double v = 0.0;
    for (int k = 0; k < 4; ++k) v += w[k] * values_[clamp_idx(i - 1 + k, res_[0])];
    return std::max(0.0, v);
  }
  double u0 = (x[0] - box_.lo[0]) / step_[0];
  double u1 = (x[1] - box_.lo[1]) / step_[1];
  std::int64_t i0 = clamp_idx(static_cast<std::int64_t>(std::floor(u0)), res_[0] - 1);
  std::int64_t i1 = clamp_idx(static_cast<std::int64_t>(std::floor(u1)), res_[1] - 1);
  double t0 = u0 - static_cast<double>(i0);
  double t1 = u1 - static_cast<double>(i1);
  double w0[4], w1[4];
  catmull_rom_w(t0, w0);
  catmull_rom_w(t1, w1);
  double v = 0.0;
  for (int a = 0; a < 4; ++a) {
    std::int64_t ia = clamp_idx(i0 - 1 + a, res_[0]);
    double row = 0.0;
    for (int b = 0; b < 4; ++b) row += w1[b] * at(ia, clamp_idx(i1 - 1 + b, res_[1]));
    v += w0[a] * row;
  }
  return std::max(0.0, v);
}

double GridFunction::max_value() const {
  return *std::max_element(values_.begin(), values_.end());
}

std::pair<double, double> GridFunction::mass_with_bound() const {
  auto simpson_1d = [&](std::int64_t stride_count, std::int64_t stride, std::int64_t offset,
                        double h) {
    std::vector<double> line(stride_count);
    for (std::int64_t i = 0; i < stride_count; ++i) line[i] = values_[offset + i * stride];
    return simpson_samples(line.data(), line.size(), h);
  };
  auto full = [&](int coarsen) -> double {
    // coarsen = 1: all nodes; 2: every other node (res must stay odd).
    if (dim() == 1) {
      std::vector<double> line;
      for (std::int64_t i = 0; i < res_[0]; i += coarsen) line.push_back(values_[i]);
      return simpson_samples(line.data(), line.size(), step_[0] * coarsen);
    }
    std::vector<double> rows;
    for (std::int64_t i = 0; i < res_[0]; i += coarsen) {
      std::vector<double> line;
      for (std::int64_t j = 0; j < res_[1]; j += coarsen) line.push_back(at(i, j));
      rows.push_back(simpson_samples(line.data(), line.size(), step_[1] * coarsen));
    }
    return simpson_samples(rows.data(), rows.size(), step_[0] * coarsen);
  };
  double fine = (dim() == 1) ? simpson_1d(res_[0], 1, 0, step_[0]) : full(1);
  bool can_coarsen = true;
  for (auto r : res_) can_coarsen = can_coarsen && ((r - 1) % 4 == 0);
  double bound;
  if (can_coarsen) {
    double coarse = full(2);
    bound = std::abs(fine - coarse) / 8.0 + 1e-14 * std::abs(fine);
  } else {
    bound = 1e-6 * std::abs(fine);
  }
  return {fine, bound + tail_};
}

void GridFunction::save_binary(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("GridFunction::save_binary: cannot open " + path);
  auto put_i64 = [&](std::int64_t v) { out.write(reinterpret_cast<const char*>(&v), 8); };
  auto put_f64 = [&](double v) { out.write(reinterpret_cast<const char*>(&v), 8); };
  put_i64(dim());
  for (int a = 0; a < dim(); ++a) {
    put_f64(box_.lo[a]);
    put_f64(box_.hi[a]);
  }
  for (int a = 0; a < dim(); ++a) put_i64(res_[a]);
  for (double v : values_) put_f64(v);
  if (!out) throw std::runtime_error("GridFunction::save_binary: write failed for " + path);
}

GridFunction GridFunction::load_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("GridFunction::load_binary: cannot open " + path);
  auto get_i64 = [&] {
    std::int64_t v;
    in.read(reinterpret_cast<char*>(&v), 8);
    return v;
  };
  auto get_f64 = [&] {
    double v;
    in.read(reinterpret_cast<char*>(&v), 8);
    return v;
  };
  std::int64_t d = get_i64();
  if (d != 1 && d != 2) throw std::runtime_error("GridFunction::load_binary: bad dimension");
  Box box;
  box.lo.resize(d);
  box.hi.resize(d);
  for (int a = 0; a < d; ++a) {
    box.lo[a] = get_f64();
    box.hi[a] = get_f64();
  }
  std::vector<std::int64_t> res(d);
  std::int64_t total = 1;
  for (int a = 0; a < d; ++a) {
    res[a] = get_i64();
    total *= res[a];
  }
  std::vector<double> values(total);
  for (auto& v : values) v = get_f64();
  if (!in) throw std::runtime_error("GridFunction::load_binary: truncated file " + path);
  return GridFunction(box, res, values);
}

std::string GridFunction::to_json() const {
  nlohmann::json j;
  j["dim"] = dim();
  j["lo"] = std::vector<double>(box_.lo.data(), box_.lo.data() + dim());
  j["hi"] = std::vector<double>(box_.hi.data(), box_.hi.data() + dim());
  j["resolution"] = res_;
  j["values"] = values_;
  return j.dump();
}

GridFunction GridFunction::from_json(const std::string& text) {
  auto j = nlohmann::json::parse(text);
  int d = j.at("dim").get<int>();
  Box box;
  box.lo.resize(d);
  box.hi.resize(d);
  auto lo = j.at("lo").get<std::vector<double>>();
  auto hi = j.at("hi").get<std::vector<double>>();
  for (int a = 0; a < d; ++a) {
    box.lo[a] = lo.at(a);
    box.hi[a] = hi.at(a);
  }
  return GridFunction(box, j.at("resolution").get<std::vector<std::int64_t>>(),
                      j.at("values").get<std::vector<double>>());
}

}  // namespace mlab
