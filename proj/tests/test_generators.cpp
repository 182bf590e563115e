#include <cmath>
#include <set>
#include <stdexcept>

#include "doctest.h"
#include "jnlab/generators.hpp"

using namespace jnlab;

namespace {

bool on_grain(double v) { return v * 64.0 == std::round(v * 64.0); }

}  // namespace

TEST_CASE("rng is reproducible and in range") {
  Rng a(11);
  Rng b(11);
  for (int i = 0; i < 1000; ++i) {
    const double u = a.uniform();
    CHECK(u == b.uniform());
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    const auto k = a.integer(-3, 4);
    CHECK(k == b.integer(-3, 4));
    CHECK(k >= -3);
    CHECK(k <= 4);
  }
  std::set<std::int64_t> seen;
  Rng c(1);
  for (int i = 0; i < 400; ++i) seen.insert(c.integer(0, 9));
  CHECK(seen.size() == 10);
  CHECK_THROWS_AS((void)c.integer(2, 1), std::invalid_argument);
}

TEST_CASE("every grid generator is deterministic") {
  for (const auto& name : function_generator_names()) {
    CHECK(is_function_generator(name));
    const FunctionParams prm{2.0, 5, 2, 17};
    const auto f = generate_function(name, prm);
    const auto g = generate_function(name, prm);
    CHECK(std::equal(f.values().begin(), f.values().end(), g.values().begin(), g.values().end()));
    CHECK(f.max_depth() == 5);
    CHECK(f.dimension() == 2);
    for (double v : f.values()) CHECK(std::isfinite(v));
  }
  CHECK_FALSE(is_function_generator("gaussian"));
  CHECK_THROWS_AS((void)generate_function("gaussian", FunctionParams{}), std::invalid_argument);
}

TEST_CASE("step and constant") {
  const auto step = generate_function("step", FunctionParams{2.0, 2, 1, 0});
  CHECK(std::vector<double>(step.values().begin(), step.values().end()) == std::vector<double>{0, 0, 1, 1});
  const auto c = generate_function("constant", FunctionParams{2.0, 3, 3, 0});
  CHECK(c.cell_count() == 512);
  for (double v : c.values()) CHECK(v == 1.0);
}

TEST_CASE("random values are multiples of 1/64") {
  for (std::uint64_t s = 0; s < 5; ++s) {
    for (const char* name : {"random-uniform", "random-martingale"}) {
      const auto f = generate_function(name, FunctionParams{2.0, 6, 1 + static_cast<int>(s % 2), s});
      for (double v : f.values()) CHECK(on_grain(v));
    }
    const auto u = generate_function("random-uniform", FunctionParams{2.0, 6, 1, s});
    for (double v : u.values()) CHECK(std::abs(v) <= 1.0);
  }
  const auto a = generate_function("random-uniform", FunctionParams{2.0, 6, 1, 1});
  const auto b = generate_function("random-uniform", FunctionParams{2.0, 6, 1, 2});
  CHECK_FALSE(std::equal(a.values().begin(), a.values().end(), b.values().begin(), b.values().end()));
}

TEST_CASE("martingale: every cube's average is its parent's value split evenly") {
  for (std::uint64_t s = 0; s < 6; ++s) {
    const auto f = generate_function("random-martingale", FunctionParams{2.0, 5, 1 + static_cast<int>(s % 2), s});
    CHECK(average(f, f.root_cube()) == 0.0);
    // At each level the children's increments sum to zero: the level-1 averages differ from 0 only by
    // mean-zero increments, so the average of the children's averages is the parent's.
    const DyadicTree tree(f, f.root_cube());
    for (int l = 0; l < tree.levels(); ++l) {
      const std::size_t kids = std::size_t{1} << f.dimension();
      for (std::size_t code = 0; code < tree.cubes_at(l); ++code) {
        double mean = 0.0;
        for (std::size_t k = 0; k < kids; ++k) mean += tree.average(l + 1, code * kids + k);
        CHECK(mean / static_cast<double>(kids) == tree.average(l, code));
        CHECK(on_grain(tree.average(l, code)));
      }
    }
  }
}

TEST_CASE("singular generators") {
  const auto pw = generate_function("power-singularity", FunctionParams{2.0, 8, 1, 0});
  CHECK(pw.root().side == 2.0);
  CHECK(pw.values()[0] > pw.values()[1]);
  const auto lg = generate_function("log-singularity", FunctionParams{2.0, 8, 1, 0});
  CHECK(lg.values()[0] < lg.values()[1]);
  CHECK(lg.values()[0] < -5.0);
}

TEST_CASE("spaces") {
  for (const auto& kind : space_kinds()) {
    CHECK(is_space_kind(kind));
    const auto s = generate_space(kind, 17, 3);
    const auto t = generate_space(kind, 17, 3);
    CHECK(s.size() == 17);
    CHECK(std::equal(s.metric().begin(), s.metric().end(), t.metric().begin(), t.metric().end()));
    CHECK(std::equal(s.weights().begin(), s.weights().end(), t.weights().begin(), t.weights().end()));
  }
  const auto line = generate_space("line", 5, 0);
  CHECK(line.distance(0, 4) == 4.0);
  CHECK(line.total_measure() == 5.0);
  const auto grid = generate_space("grid2d", 9, 0);
  CHECK(grid.distance(0, 8) == 4.0);
  const auto tree = generate_space("tree-graph", 30, 5);
  for (std::size_t i = 0; i < 30; ++i) {
    for (std::size_t j = 0; j < 30; ++j) CHECK(tree.distance(i, j) == std::round(tree.distance(i, j)));
  }
  const auto cloud = generate_space("random-cloud", 30, 5);
  for (double w : cloud.weights()) {
    CHECK(w >= 0.5);
    CHECK(w < 1.5);
  }
  CHECK_FALSE(is_space_kind("torus"));
  CHECK_THROWS_AS((void)generate_space("torus", 4, 0), std::invalid_argument);
}

TEST_CASE("point functions") {
  const auto s = generate_space("random-cloud", 20, 2);
  for (const auto& name : point_function_names()) {
    const auto f = generate_point_function(name, s, 8);
    CHECK(f.size() == 20);
    CHECK(f == generate_point_function(name, s, 8));
    for (double v : f) CHECK(std::isfinite(v));
  }
  const auto step = generate_point_function("step", generate_space("line", 4, 0), 0);
  CHECK(step == std::vector<double>{0, 0, 1, 1});
  for (double v : generate_point_function("random-uniform", s, 1)) CHECK(on_grain(v));
  CHECK_THROWS_AS((void)generate_point_function("spike", s, 0), std::invalid_argument);
}
