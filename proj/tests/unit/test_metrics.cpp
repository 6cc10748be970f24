#include <doctest.h>

#include <nlohmann/json.hpp>

#include "gyrox/errors.hpp"
#include "gyrox/metrics.hpp"

using namespace gyrox;

TEST_CASE("MSE of one flipped voxel in a 32^3 grid") {
  const std::vector<DensityGrid> truth{DensityGrid(Resolution::cube(32), {}, 0.0)};
  std::vector<DensityGrid> pred = truth;
  pred[0][123] = 1.0;
  CHECK(mse(pred, truth) == 1.0 / 32768.0);
  CHECK(mse(truth, truth) == 0.0);
}

TEST_CASE("MSE averages over records") {
  std::vector<DensityGrid> truth{DensityGrid(Resolution::cube(2), {}, 0.0), DensityGrid(Resolution::cube(2), {}, 0.0)};
  std::vector<DensityGrid> pred{DensityGrid(Resolution::cube(2), {}, 0.5), DensityGrid(Resolution::cube(2), {}, 0.0)};
  CHECK(mse(pred, truth) == doctest::Approx(0.125));
}

TEST_CASE("Dice coefficient") {
  DensityGrid truth(Resolution::cube(2), {}, 0.0), pred(Resolution::cube(2), {}, 0.0);
  truth[0] = 1.0;
  pred[0] = 1.0;
  pred[1] = 1.0;
  CHECK(dice(pred, truth) == doctest::Approx(2.0 / 3.0));
  CHECK(dice(truth, truth) == 1.0);
  const DensityGrid empty(Resolution::cube(2), {}, 0.0);
  CHECK(dice(empty, empty) == 1.0);
  CHECK(dice(empty, truth) == 0.0);
  DensityGrid edge(Resolution::cube(2), {}, 0.0);
  edge[0] = 0.5;  // threshold is inclusive
  CHECK(dice(edge, truth) == 1.0);
  const std::vector<DensityGrid> p{pred, truth}, t{truth, truth};
  CHECK(dice(p, t) == doctest::Approx((2.0 / 3.0 + 1.0) / 2.0));
}

TEST_CASE("volume deviation and report") {
  std::vector<DensityGrid> truth{DensityGrid(Resolution::cube(2), {}, 0.5), DensityGrid(Resolution::cube(2), {}, 0.5)};
  std::vector<DensityGrid> pred{DensityGrid(Resolution::cube(2), {}, 0.5), DensityGrid(Resolution::cube(2), {}, 0.25)};
  const auto dev = volume_deviation(pred, truth);
  CHECK(dev.mean == doctest::Approx(12.5));
  CHECK(dev.max == doctest::Approx(25.0));
  CHECK(dev.argmax == 1u);
  const EvalReport r = evaluate(pred, truth);
  CHECK(r.records == 2u);
  CHECK(r.volume_deviation_max == doctest::Approx(25.0));
  const auto j = to_json(r);
  for (const char* key : {"records", "mse", "dsc", "volume_deviation_mean", "volume_deviation_max"})
    CHECK(j.contains(key));
}

TEST_CASE("metrics reject mismatched inputs") {
  const std::vector<DensityGrid> a{DensityGrid(Resolution::cube(2), {}, 0.0)};
  const std::vector<DensityGrid> b{DensityGrid(Resolution::cube(3), {}, 0.0)};
  const std::vector<DensityGrid> c{a[0], a[0]};
  CHECK_THROWS_AS(mse(a, b), ShapeMismatch);
  CHECK_THROWS_AS(mse(a, c), ShapeMismatch);
  CHECK_THROWS_AS(dice(a, c), ShapeMismatch);
  CHECK_THROWS_AS(evaluate(a, b), ShapeMismatch);
}
