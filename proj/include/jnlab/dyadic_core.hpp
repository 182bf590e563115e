#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace jnlab {

/// Geometry of the root cube: lower corner and side length.
struct RootGeometry {
  std::vector<double> origin;
  double side = 1.0;

  [[nodiscard]] int dimension() const noexcept { return static_cast<int>(origin.size()); }
  [[nodiscard]] double measure() const;
  bool operator==(const RootGeometry&) const = default;

  static RootGeometry unit(int dimension, double side = 1.0);
};

/// A dyadic subcube of a root cube: depth k and an integer index in [0, 2^k)^n.
class DyadicCube {
 public:
  DyadicCube(RootGeometry root, int depth, std::vector<std::int64_t> index);

  static DyadicCube root_of(RootGeometry root);

  [[nodiscard]] const RootGeometry& root() const noexcept { return root_; }
  [[nodiscard]] int dimension() const noexcept { return root_.dimension(); }
  [[nodiscard]] int depth() const noexcept { return depth_; }
  [[nodiscard]] const std::vector<std::int64_t>& index() const noexcept { return index_; }

  [[nodiscard]] double side() const;
  [[nodiscard]] double measure() const;
  [[nodiscard]] std::vector<double> lower_corner() const;

  /// True when `other` is a (not necessarily proper) dyadic subcube of this cube.
  [[nodiscard]] bool contains(const DyadicCube& other) const;
  [[nodiscard]] bool interiors_disjoint(const DyadicCube& other) const;

  /// The 2^n children at depth k+1, lexicographic order (first coordinate most significant).
  [[nodiscard]] std::vector<DyadicCube> children() const;

  /// Half-open interval notation, e.g. "[0.5,1)x[0,0.5)".
  [[nodiscard]] std::string describe() const;

  bool operator==(const DyadicCube&) const = default;

 private:
  RootGeometry root_;
  int depth_;
  std::vector<std::int64_t> index_;
};

[[nodiscard]] double cube_measure(const DyadicCube& q);
[[nodiscard]] std::vector<DyadicCube> children(const DyadicCube& q);

/// Piecewise-constant function on the finest cells of a uniform dyadic grid.
/// Values are stored in lexicographic cell order.
class GridFunction {
 public:
  GridFunction(RootGeometry root, int max_depth, std::vector<double> values);

  /// Samples `fn` at the midpoint of every finest cell.
  static GridFunction sample(RootGeometry root, int max_depth,
                             const std::function<double(std::span<const double>)>& fn);

  [[nodiscard]] int dimension() const noexcept { return root_.dimension(); }
  [[nodiscard]] int max_depth() const noexcept { return max_depth_; }
  [[nodiscard]] const RootGeometry& root() const noexcept { return root_; }
  [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
  [[nodiscard]] std::size_t cell_count() const noexcept { return values_.size(); }
  [[nodiscard]] std::int64_t cells_per_side() const noexcept { return std::int64_t{1} << max_depth_; }
  [[nodiscard]] double cell_measure() const;
  [[nodiscard]] DyadicCube root_cube() const { return DyadicCube::root_of(root_); }

  [[nodiscard]] std::vector<std::int64_t> cell_coords(std::size_t lex) const;
  [[nodiscard]] std::size_t cell_index(std::span<const std::int64_t> coords) const;

  /// The function seen on `q` alone, with `q` as the new root cube.
  [[nodiscard]] GridFunction restricted_to(const DyadicCube& q) const;
  [[nodiscard]] GridFunction shifted(double c) const;
  [[nodiscard]] GridFunction scaled(double c) const;

 private:
  RootGeometry root_;
  int max_depth_;
  std::vector<double> values_;
};

/// Throws std::invalid_argument unless `q` lives on `f`'s root and is no finer than the grid.
void require_cube_in_grid(const GridFunction& f, const DyadicCube& q);

[[nodiscard]] double average(const GridFunction& f, const DyadicCube& q);
[[nodiscard]] double abs_average(const GridFunction& f, const DyadicCube& q);
[[nodiscard]] double mean_oscillation(const GridFunction& f, const DyadicCube& q);

/// Finite union of finest cells of a cube, with its exact measure.
struct CellSet {
  RootGeometry root;
  int depth = 0;
  std::vector<bool> membership;
  double measure = 0.0;

  static CellSet from_membership(RootGeometry root, int depth, std::vector<bool> membership);

  [[nodiscard]] std::size_t count() const;
  [[nodiscard]] bool subset_of(const CellSet& other) const;
};

void write_grid_function_csv(std::ostream& out, const GridFunction& f);
[[nodiscard]] GridFunction read_grid_function_csv(std::istream& in);

/// Morton-ordered view of f restricted to a cube, with per-level sums of f and |f|.
/// Every dyadic subcube is a contiguous range of the Morton-ordered cells.
class DyadicTree {
 public:
  DyadicTree(const GridFunction& f, const DyadicCube& q0);

  [[nodiscard]] int dimension() const noexcept { return n_; }
  /// Number of refinement levels below the top cube; level 0 is the top cube.
  [[nodiscard]] int levels() const noexcept { return levels_; }
  [[nodiscard]] const DyadicCube& top() const noexcept { return top_; }
  [[nodiscard]] std::size_t cubes_at(int level) const noexcept {
    return std::size_t{1} << (n_ * level);
  }
  [[nodiscard]] std::size_t cells_in(int level) const noexcept {
    return std::size_t{1} << (n_ * (levels_ - level));
  }
  [[nodiscard]] double cell_measure() const noexcept { return cell_measure_; }
  [[nodiscard]] double measure_at(int level) const noexcept {
    return cell_measure_ * static_cast<double>(cells_in(level));
  }

  [[nodiscard]] std::span<const double> morton_values() const noexcept { return values_; }
  [[nodiscard]] double sum(int level, std::size_t code) const { return sums_[level][code]; }
  [[nodiscard]] double abs_sum(int level, std::size_t code) const { return abs_sums_[level][code]; }
  [[nodiscard]] double average(int level, std::size_t code) const;
  [[nodiscard]] double abs_average(int level, std::size_t code) const;

  /// Range of Morton cell positions covered by the cube.
  [[nodiscard]] std::pair<std::size_t, std::size_t> cell_range(int level, std::size_t code) const;

  [[nodiscard]] DyadicCube cube(int level, std::size_t code) const;
  /// Morton code at `level` for a cube of the same root below `top()`.
  [[nodiscard]] std::size_t code_of(const DyadicCube& q) const;

  /// Morton position -> lexicographic position (relative to the top cube) of finest cells.
  [[nodiscard]] std::span<const std::size_t> morton_to_lex() const noexcept { return morton_to_lex_; }

 private:
  DyadicCube top_;
  int n_;
  int levels_;
  double cell_measure_;
  std::vector<double> values_;
  std::vector<std::vector<double>> sums_;
  std::vector<std::vector<double>> abs_sums_;
  std::vector<std::size_t> morton_to_lex_;
};

std::size_t morton_encode(std::span<const std::int64_t> coords, int bits);
std::vector<std::int64_t> morton_decode(std::size_t code, int dimension, int bits);

}  // namespace jnlab
