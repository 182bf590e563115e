#include "jnlab/dyadic_core.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "jnlab/numeric.hpp"

namespace jnlab {

namespace {

constexpr int kMaxTotalBits = 30;

// Visits the lexicographic indices of the finest cells inside q, in lexicographic order.
template <class Fn>
void for_each_cell(const GridFunction& f, const DyadicCube& q, Fn&& fn) {
  const int n = f.dimension();
  const int shift = f.max_depth() - q.depth();
  const std::int64_t span = std::int64_t{1} << shift;
  const std::int64_t per_side = f.cells_per_side();
  std::vector<std::int64_t> lo(n);
  for (int d = 0; d < n; ++d) lo[d] = q.index()[d] * span;
  std::vector<std::int64_t> off(n, 0);
  while (true) {
    std::size_t lex = 0;
    for (int d = 0; d < n; ++d) lex = lex * static_cast<std::size_t>(per_side) + static_cast<std::size_t>(lo[d] + off[d]);
    fn(lex);
    int d = n - 1;
    while (d >= 0) {
      if (++off[d] < span) break;
      off[d] = 0;
      --d;
    }
    if (d < 0) break;
  }
}

}  // namespace

double RootGeometry::measure() const { return std::pow(side, dimension()); }

RootGeometry RootGeometry::unit(int dimension, double side) {
  return RootGeometry{std::vector<double>(static_cast<std::size_t>(dimension), 0.0), side};
}

DyadicCube::DyadicCube(RootGeometry root, int depth, std::vector<std::int64_t> index)
    : root_(std::move(root)), depth_(depth), index_(std::move(index)) {
  if (root_.dimension() < 1) throw std::invalid_argument("DyadicCube: dimension must be >= 1");
  if (!(root_.side > 0.0) || !std::isfinite(root_.side)) {
    throw std::invalid_argument("DyadicCube: root side must be positive and finite");
  }
  if (depth_ < 0 || depth_ * root_.dimension() > kMaxTotalBits + 32) {
    throw std::invalid_argument("DyadicCube: depth out of range");
  }
  if (static_cast<int>(index_.size()) != root_.dimension()) {
    throw std::invalid_argument("DyadicCube: index length differs from dimension");
  }
  const std::int64_t limit = std::int64_t{1} << depth_;
  for (std::int64_t i : index_) {
    if (i < 0 || i >= limit) throw std::invalid_argument("DyadicCube: index coordinate outside [0, 2^k)");
  }
}

DyadicCube DyadicCube::root_of(RootGeometry root) {
  const auto n = static_cast<std::size_t>(root.dimension());
  return DyadicCube(std::move(root), 0, std::vector<std::int64_t>(n, 0));
}

double DyadicCube::side() const { return std::ldexp(root_.side, -depth_); }

double DyadicCube::measure() const { return std::pow(side(), dimension()); }

std::vector<double> DyadicCube::lower_corner() const {
  std::vector<double> corner(index_.size());
  const double s = side();
  for (std::size_t d = 0; d < index_.size(); ++d) {
    corner[d] = root_.origin[d] + static_cast<double>(index_[d]) * s;
  }
  return corner;
}

bool DyadicCube::contains(const DyadicCube& other) const {
  if (!(root_ == other.root_) || other.depth_ < depth_) return false;
  const int shift = other.depth_ - depth_;
  for (std::size_t d = 0; d < index_.size(); ++d) {
    if ((other.index_[d] >> shift) != index_[d]) return false;
  }
  return true;
}

bool DyadicCube::interiors_disjoint(const DyadicCube& other) const {
  return !contains(other) && !other.contains(*this);
}

std::vector<DyadicCube> DyadicCube::children() const {
  const int n = dimension();
  std::vector<DyadicCube> out;
  out.reserve(std::size_t{1} << n);
  for (std::size_t j = 0; j < (std::size_t{1} << n); ++j) {
    std::vector<std::int64_t> idx(index_.size());
    for (int d = 0; d < n; ++d) {
      idx[d] = 2 * index_[d] + static_cast<std::int64_t>((j >> (n - 1 - d)) & 1U);
    }
    out.emplace_back(root_, depth_ + 1, std::move(idx));
  }
  return out;
}

std::string DyadicCube::describe() const {
  std::string s;
  const double w = side();
  const auto corner = lower_corner();
  for (std::size_t d = 0; d < corner.size(); ++d) {
    if (d > 0) s += "x";
    s += "[" + format_double(corner[d]) + "," + format_double(corner[d] + w) + ")";
  }
  return s;
}

double cube_measure(const DyadicCube& q) { return q.measure(); }

std::vector<DyadicCube> children(const DyadicCube& q) { return q.children(); }

GridFunction::GridFunction(RootGeometry root, int max_depth, std::vector<double> values)
    : root_(std::move(root)), max_depth_(max_depth), values_(std::move(values)) {
  const int n = root_.dimension();
  if (n < 1) throw std::invalid_argument("GridFunction: dimension must be >= 1");
  if (!(root_.side > 0.0) || !std::isfinite(root_.side)) {
    throw std::invalid_argument("GridFunction: root side must be positive and finite");
  }
  if (max_depth_ < 0 || n * max_depth_ > kMaxTotalBits) {
    throw std::invalid_argument("GridFunction: n*D must lie in [0, 30]");
  }
  const std::size_t expected = std::size_t{1} << (n * max_depth_);
  if (values_.size() != expected) {
    throw std::invalid_argument("GridFunction: expected " + std::to_string(expected) + " values, got " +
                                std::to_string(values_.size()));
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw std::invalid_argument("GridFunction: non-finite value at cell " + std::to_string(i));
    }
  }
}

GridFunction GridFunction::sample(RootGeometry root, int max_depth,
                                  const std::function<double(std::span<const double>)>& fn) {
  const int n = root.dimension();
  if (n < 1 || max_depth < 0 || n * max_depth > kMaxTotalBits) {
    throw std::invalid_argument("GridFunction::sample: bad dimension/depth");
  }
  const std::size_t count = std::size_t{1} << (n * max_depth);
  const std::int64_t per_side = std::int64_t{1} << max_depth;
  const double h = std::ldexp(root.side, -max_depth);
  std::vector<double> values(count);
  std::vector<double> mid(static_cast<std::size_t>(n));
  for (std::size_t lex = 0; lex < count; ++lex) {
    std::size_t rest = lex;
    for (int d = n - 1; d >= 0; --d) {
      const auto c = static_cast<std::int64_t>(rest % static_cast<std::size_t>(per_side));
      rest /= static_cast<std::size_t>(per_side);
      mid[d] = root.origin[d] + (static_cast<double>(c) + 0.5) * h;
    }
    values[lex] = fn(mid);
  }
  return GridFunction(std::move(root), max_depth, std::move(values));
}

double GridFunction::cell_measure() const { return std::pow(std::ldexp(root_.side, -max_depth_), dimension()); }

std::vector<std::int64_t> GridFunction::cell_coords(std::size_t lex) const {
  const int n = dimension();
  const auto per_side = static_cast<std::size_t>(cells_per_side());
  std::vector<std::int64_t> c(static_cast<std::size_t>(n));
  for (int d = n - 1; d >= 0; --d) {
    c[d] = static_cast<std::int64_t>(lex % per_side);
    lex /= per_side;
  }
  return c;
}

std::size_t GridFunction::cell_index(std::span<const std::int64_t> coords) const {
  const auto per_side = static_cast<std::size_t>(cells_per_side());
  std::size_t lex = 0;
  for (std::int64_t c : coords) lex = lex * per_side + static_cast<std::size_t>(c);
  return lex;
}

GridFunction GridFunction::restricted_to(const DyadicCube& q) const {
  require_cube_in_grid(*this, q);
  std::vector<double> vals;
  vals.reserve(std::size_t{1} << (dimension() * (max_depth_ - q.depth())));
  for_each_cell(*this, q, [&](std::size_t lex) { vals.push_back(values_[lex]); });
  RootGeometry sub{q.lower_corner(), q.side()};
  return GridFunction(std::move(sub), max_depth_ - q.depth(), std::move(vals));
}

GridFunction GridFunction::shifted(double c) const {
  std::vector<double> vals(values_);
  for (double& v : vals) v += c;
  return GridFunction(root_, max_depth_, std::move(vals));
}

GridFunction GridFunction::scaled(double c) const {
  std::vector<double> vals(values_);
  for (double& v : vals) v *= c;
  return GridFunction(root_, max_depth_, std::move(vals));
}

void require_cube_in_grid(const GridFunction& f, const DyadicCube& q) {
  if (!(q.root() == f.root())) throw std::invalid_argument("cube does not share the function's root cube");
  if (q.depth() > f.max_depth()) {
    throw std::invalid_argument("cube depth " + std::to_string(q.depth()) + " is finer than the grid depth " +
                                std::to_string(f.max_depth()));
  }
}

double average(const GridFunction& f, const DyadicCube& q) {
  require_cube_in_grid(f, q);
  NeumaierSum s;
  std::size_t count = 0;
  for_each_cell(f, q, [&](std::size_t lex) {
    s.add(f.values()[lex]);
    ++count;
  });
  return s.value() / static_cast<double>(count);
}

double abs_average(const GridFunction& f, const DyadicCube& q) {
  require_cube_in_grid(f, q);
  NeumaierSum s;
  std::size_t count = 0;
  for_each_cell(f, q, [&](std::size_t lex) {
    s.add(std::abs(f.values()[lex]));
    ++count;
  });
  return s.value() / static_cast<double>(count);
}

double mean_oscillation(const GridFunction& f, const DyadicCube& q) {
  const double mean = average(f, q);
  NeumaierSum s;
  std::size_t count = 0;
  for_each_cell(f, q, [&](std::size_t lex) {
    s.add(std::abs(f.values()[lex] - mean));
    ++count;
  });
  return s.value() / static_cast<double>(count);
}

CellSet CellSet::from_membership(RootGeometry root, int depth, std::vector<bool> membership) {
  const int n = root.dimension();
  if (membership.size() != (std::size_t{1} << (n * depth))) {
    throw std::invalid_argument("CellSet: membership size does not match depth");
  }
  CellSet s{std::move(root), depth, std::move(membership), 0.0};
  s.measure = s.root.measure() * std::ldexp(static_cast<double>(s.count()), -n * depth);
  return s;
}

std::size_t CellSet::count() const {
  std::size_t c = 0;
  for (bool b : membership) c += b ? 1 : 0;
  return c;
}

bool CellSet::subset_of(const CellSet& other) const {
  if (membership.size() != other.membership.size()) throw std::invalid_argument("CellSet: size mismatch");
  for (std::size_t i = 0; i < membership.size(); ++i) {
    if (membership[i] && !other.membership[i]) return false;
  }
  return true;
}

void write_grid_function_csv(std::ostream& out, const GridFunction& f) {
  out << f.dimension() << ',' << f.max_depth();
  for (double o : f.root().origin) out << ',' << format_double(o);
  out << ',' << format_double(f.root().side) << '\n';
  for (double v : f.values()) out << format_double(v) << '\n';
}

GridFunction read_grid_function_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& what) -> std::runtime_error {
    return std::runtime_error("grid function CSV, line " + std::to_string(line_no) + ": " + what);
  };
  if (!std::getline(in, line)) {
    line_no = 1;
    throw fail("missing header row 'n,D,origin...,side'");
  }
  ++line_no;
  std::vector<std::string> fields;
  {
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) fields.push_back(tok);
  }
  if (fields.size() < 4) throw fail("header needs n, D, n origin coordinates and side");
  int n = 0;
  int depth = 0;
  RootGeometry root;
  try {
    const double nd = parse_double(fields[0]);
    const double dd = parse_double(fields[1]);
    if (nd != std::floor(nd) || dd != std::floor(dd) || nd < 1 || dd < 0) throw std::invalid_argument("n and D must be integers");
    n = static_cast<int>(nd);
    depth = static_cast<int>(dd);
    if (fields.size() != static_cast<std::size_t>(n) + 3) throw std::invalid_argument("header has wrong field count for n");
    for (int d = 0; d < n; ++d) root.origin.push_back(parse_double(fields[2 + d]));
    root.side = parse_double(fields.back());
  } catch (const std::invalid_argument& e) {
    throw fail(e.what());
  }
  if (n * depth > kMaxTotalBits) throw fail("n*D exceeds 30");
  const std::size_t expected = std::size_t{1} << (n * depth);
  std::vector<double> values;
  values.reserve(expected);
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    try {
      values.push_back(parse_double(line));
    } catch (const std::invalid_argument& e) {
      throw fail(e.what());
    }
  }
  if (values.size() != expected) {
    throw fail("expected " + std::to_string(expected) + " values, found " + std::to_string(values.size()));
  }
  try {
    return GridFunction(std::move(root), depth, std::move(values));
  } catch (const std::invalid_argument& e) {
    throw fail(e.what());
  }
}

std::size_t morton_encode(std::span<const std::int64_t> coords, int bits) {
  const int n = static_cast<int>(coords.size());
  std::size_t code = 0;
  for (int b = bits - 1; b >= 0; --b) {
    for (int d = 0; d < n; ++d) {
      code = (code << 1) | static_cast<std::size_t>((coords[d] >> b) & 1);
    }
  }
  return code;
}

std::vector<std::int64_t> morton_decode(std::size_t code, int dimension, int bits) {
  std::vector<std::int64_t> c(static_cast<std::size_t>(dimension), 0);
  for (int b = 0; b < bits; ++b) {
    for (int d = dimension - 1; d >= 0; --d) {
      c[d] |= static_cast<std::int64_t>(code & 1U) << b;
      code >>= 1;
    }
  }
  return c;
}

DyadicTree::DyadicTree(const GridFunction& f, const DyadicCube& q0)
    : top_(q0), n_(f.dimension()), levels_(f.max_depth() - q0.depth()), cell_measure_(f.cell_measure()) {
  require_cube_in_grid(f, q0);
  const std::size_t count = cells_in(0);
  const std::int64_t span = std::int64_t{1} << levels_;
  values_.resize(count);
  morton_to_lex_.resize(count);
  const auto sub_side = static_cast<std::size_t>(span);
  const auto full_side = static_cast<std::size_t>(f.cells_per_side());
  const auto vals = f.values();

#pragma omp parallel for schedule(static)
  for (std::int64_t m = 0; m < static_cast<std::int64_t>(count); ++m) {
    const auto rel = morton_decode(static_cast<std::size_t>(m), n_, levels_);
    std::size_t rel_lex = 0;
    std::size_t glob_lex = 0;
    for (int d = 0; d < n_; ++d) {
      rel_lex = rel_lex * sub_side + static_cast<std::size_t>(rel[d]);
      glob_lex = glob_lex * full_side + static_cast<std::size_t>(q0.index()[d] * span + rel[d]);
    }
    morton_to_lex_[m] = rel_lex;
    values_[m] = vals[glob_lex];
  }

  sums_.resize(static_cast<std::size_t>(levels_) + 1);
  abs_sums_.resize(static_cast<std::size_t>(levels_) + 1);
  sums_[levels_] = values_;
  abs_sums_[levels_].resize(count);
  for (std::size_t i = 0; i < count; ++i) abs_sums_[levels_][i] = std::abs(values_[i]);
  const std::size_t fan = std::size_t{1} << n_;
  for (int l = levels_ - 1; l >= 0; --l) {
    const std::size_t cubes = cubes_at(l);
    sums_[l].resize(cubes);
    abs_sums_[l].resize(cubes);
    const auto& fine = sums_[l + 1];
    const auto& fine_abs = abs_sums_[l + 1];
#pragma omp parallel for schedule(static)
    for (std::int64_t c = 0; c < static_cast<std::int64_t>(cubes); ++c) {
      double s = 0.0;
      double a = 0.0;
      const std::size_t base = static_cast<std::size_t>(c) * fan;
      for (std::size_t j = 0; j < fan; ++j) {
        s += fine[base + j];
        a += fine_abs[base + j];
      }
      sums_[l][c] = s;
      abs_sums_[l][c] = a;
    }
  }
}

double DyadicTree::average(int level, std::size_t code) const {
  return sums_[level][code] / static_cast<double>(cells_in(level));
}

double DyadicTree::abs_average(int level, std::size_t code) const {
  return abs_sums_[level][code] / static_cast<double>(cells_in(level));
}

std::pair<std::size_t, std::size_t> DyadicTree::cell_range(int level, std::size_t code) const {
  const std::size_t w = cells_in(level);
  return {code * w, (code + 1) * w};
}

DyadicCube DyadicTree::cube(int level, std::size_t code) const {
  auto rel = morton_decode(code, n_, level);
  for (int d = 0; d < n_; ++d) rel[d] += top_.index()[d] << level;
  return DyadicCube(top_.root(), top_.depth() + level, std::move(rel));
}

std::size_t DyadicTree::code_of(const DyadicCube& q) const {
  if (!top_.contains(q) || q.depth() - top_.depth() > levels_) {
    throw std::invalid_argument("cube " + q.describe() + " is not a grid subcube of " + top_.describe());
  }
  const int level = q.depth() - top_.depth();
  std::vector<std::int64_t> rel(q.index());
  for (int d = 0; d < n_; ++d) rel[d] -= top_.index()[d] << level;
  return morton_encode(rel, level);
}

}  // namespace jnlab
