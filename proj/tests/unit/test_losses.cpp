#include <doctest.h>

#include <cmath>

#include "ebt/losses.hpp"
#include "ebt/rng.hpp"
#include "oracles.hpp"

using ebt::BinaryMap;
using ebt::GradGrid;
using ebt::LossParams;
using ebt::LossValue;
using ebt::PixelGrid;

namespace {

const double kLog2 = std::log(2.0);

BinaryMap center_edge_3x3() {
  BinaryMap gt(3, 3);
  gt.set(1, 1, true);
  return gt;
}

PixelGrid as_probabilities(const BinaryMap& gt) {
  PixelGrid pred(gt.height(), gt.width(), 0.0);
  for (std::int64_t i = 0; i < gt.size(); ++i) pred[i] = gt.is_edge(i) ? 1.0 : 0.0;
  return pred;
}

}  // namespace

TEST_CASE("bce: perfect prediction costs at most the clamp") {
  const BinaryMap gt = testsupport::random_map(6, 7, 0.3, 11);
  const LossValue loss = ebt::bce_loss(as_probabilities(gt), gt, 1e-7);
  CHECK(loss.value >= 0.0);
  CHECK(loss.value <= 1.01e-7);
}

TEST_CASE("bce: uniform 0.5 prediction costs log 2") {
  const BinaryMap gt = testsupport::random_map(5, 5, 0.4, 12);
  const LossValue loss = ebt::bce_loss(PixelGrid(5, 5, 0.5), gt, 1e-7);
  CHECK(loss.value == doctest::Approx(kLog2).epsilon(1e-12));
}

TEST_CASE("bce matches the per-pixel extended-precision oracle") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const BinaryMap gt = testsupport::random_map(8, 8, 0.3, 100 + seed);
    const PixelGrid pred = testsupport::random_pred(8, 8, 200 + seed);
    const LossValue loss = ebt::bce_loss(pred, gt, 1e-7);
    CHECK(loss.value ==
          doctest::Approx(testsupport::bce_ref(pred, gt, 1e-7)).epsilon(1e-12));
    CHECK(loss.value ==
          doctest::Approx((loss.per_class[0] + loss.per_class[1] +
                           loss.per_class[2]) /
                          gt.size())
              .epsilon(1e-15));
  }
}

TEST_CASE("wbce: degenerate maps are free") {
  // All zeros: alpha = 1 kills the negative weight and Y+ is empty.
  CHECK(ebt::wbce_loss(testsupport::random_pred(4, 4, 5), BinaryMap(4, 4), 1.1,
                       1e-7)
            .value == 0.0);
  // All ones: alpha = 0 and Y- is empty.
  BinaryMap ones(3, 3);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) ones.set(r, c, true);
  CHECK(ebt::wbce_loss(PixelGrid(3, 3, 0.5), ones, 1.1, 1e-7).value == 0.0);
}

TEST_CASE("wbce: hand-evaluated single-edge case") {
  const double expected =
      ((8.0 / 9.0) * kLog2 + 1.1 * (1.0 / 9.0) * 8.0 * kLog2) / 9.0;
  const LossValue loss =
      ebt::wbce_loss(PixelGrid(3, 3, 0.5), center_edge_3x3(), 1.1, 1e-7);
  CHECK(loss.value == doctest::Approx(expected).epsilon(1e-12));
  CHECK(loss.value ==
        doctest::Approx(testsupport::wbce_ref(PixelGrid(3, 3, 0.5),
                                              center_edge_3x3(), 1.1, 1e-7))
            .epsilon(1e-12));
}

TEST_CASE("ebt: degenerate edge-free map is free") {
  CHECK(ebt::ebt_loss(testsupport::random_pred(5, 6, 9), BinaryMap(5, 6))
            .value == 0.0);
}

TEST_CASE("ebt: hand-evaluated center-edge case at r=1") {
  LossParams params;
  params.radius = 1;  // counts (1, 8, 0)
  const double expected = kLog2 * (8.0 / 9.0 + 8.0 * 0.8 * (1.0 / 9.0)) / 9.0;
  const LossValue loss =
      ebt::ebt_loss(PixelGrid(3, 3, 0.5), center_edge_3x3(), params);
  CHECK(loss.value == doctest::Approx(expected).epsilon(1e-12));
  CHECK(loss.value ==
        doctest::Approx(testsupport::ebt_ref(PixelGrid(3, 3, 0.5),
                                             center_edge_3x3(), 1.0, 0.8, 0.5,
                                             1, 1e-7))
            .epsilon(1e-12));
}

TEST_CASE("ebt matches the extended-precision oracle on random instances") {
  ebt::Rng rng(77);
  for (int trial = 0; trial < 10; ++trial) {
    const int h = rng.next_int(1, 12);
    const int w = rng.next_int(1, 12);
    const BinaryMap gt = testsupport::random_map(h, w, rng.next_unit(),
                                                 300 + trial);
    const PixelGrid pred = testsupport::random_pred(h, w, 400 + trial);
    LossParams params;
    params.radius = rng.next_int(0, 5);
    CHECK(ebt::ebt_loss(pred, gt, params).value ==
          doctest::Approx(testsupport::ebt_ref(pred, gt, params.b_e,
                                               params.b_b, params.b_t,
                                               params.radius, params.epsilon))
              .epsilon(1e-12));
  }
}

TEST_CASE("ebt collapses to wbce once the band swallows the image") {
  ebt::Rng rng(88);
  for (int trial = 0; trial < 40; ++trial) {
    const int h = rng.next_int(1, 16);
    const int w = rng.next_int(1, 16);
    const BinaryMap gt = testsupport::random_map(h, w, rng.next_unit(),
                                                 500 + trial);
    const PixelGrid pred = testsupport::random_pred(h, w, 600 + trial);
    LossParams params;
    params.radius = std::max(h, w) - 1;
    params.b_e = 1.0;
    params.b_b = params.lambda;          // lambda = 1.1
    params.b_t = rng.next_range(0.1, 3.0);  // immaterial: Y_T is empty
    const double ebt_value = ebt::ebt_loss(pred, gt, params).value;
    const double wbce_value =
        ebt::wbce_loss(pred, gt, params.lambda, params.epsilon).value;
    CHECK(std::fabs(ebt_value - wbce_value) <=
          1e-10 * std::max(1.0, wbce_value));
  }
}

TEST_CASE("gradients: degenerate maps have zero gradient") {
  const PixelGrid pred = testsupport::random_pred(4, 5, 21);
  const GradGrid ebt_g = ebt::ebt_loss_grad(pred, BinaryMap(4, 5));
  for (double g : ebt_g.cells()) CHECK(g == 0.0);
  const GradGrid wbce_g = ebt::wbce_loss_grad(pred, BinaryMap(4, 5), 1.1, 1e-7);
  for (double g : wbce_g.cells()) CHECK(g == 0.0);
  BinaryMap ones(4, 5);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 5; ++c) ones.set(r, c, true);
  const GradGrid ones_g = ebt::wbce_loss_grad(pred, ones, 1.1, 1e-7);
  for (double g : ones_g.cells()) CHECK(g == 0.0);
}

TEST_CASE("ebt gradient: closed form on the center-edge case") {
  LossParams params;
  params.radius = 1;
  const GradGrid grad =
      ebt::ebt_loss_grad(PixelGrid(3, 3, 0.5), center_edge_3x3(), params);
  CHECK(grad.at(1, 1) == doctest::Approx(-(8.0 / 9.0) / (0.5 * 9.0)).epsilon(1e-12));
  CHECK(grad.at(0, 0) ==
        doctest::Approx(0.8 * (1.0 / 9.0) / (0.5 * 9.0)).epsilon(1e-12));
  CHECK(grad.at(2, 1) == grad.at(0, 0));
}

TEST_CASE("gradients match central finite differences") {
  ebt::Rng rng(99);
  LossParams params;
  params.radius = 2;
  for (int trial = 0; trial < 6; ++trial) {
    const BinaryMap gt = testsupport::random_map(8, 8, 0.3, 700 + trial);
    const PixelGrid pred = testsupport::random_pred(8, 8, 800 + trial, 0.05, 0.95);
    const GradGrid ebt_grad = ebt::ebt_loss_grad(pred, gt, params);
    const GradGrid wbce_grad =
        ebt::wbce_loss_grad(pred, gt, params.lambda, params.epsilon);
    for (std::int64_t i = 0; i < pred.size(); ++i) {
      const double fd_ebt = testsupport::central_diff(
          [&](double v) {
            PixelGrid p = pred;
            p[i] = v;
            return ebt::ebt_loss(p, gt, params).value;
          },
          pred[i]);
      const double fd_wbce = testsupport::central_diff(
          [&](double v) {
            PixelGrid p = pred;
            p[i] = v;
            return ebt::wbce_loss(p, gt, params.lambda, params.epsilon).value;
          },
          pred[i]);
      if (!(std::fabs(fd_ebt) < 1e-9 && std::fabs(ebt_grad[i]) < 1e-9))
        CHECK(testsupport::rel_err(ebt_grad[i], fd_ebt) <= 1e-4);
      if (!(std::fabs(fd_wbce) < 1e-9 && std::fabs(wbce_grad[i]) < 1e-9))
        CHECK(testsupport::rel_err(wbce_grad[i], fd_wbce) <= 1e-4);
    }
  }
}

TEST_CASE("gradient signs and descent direction") {
  ebt::Rng rng(123);
  LossParams params;
  for (int trial = 0; trial < 10; ++trial) {
    const BinaryMap gt = testsupport::random_map(9, 9, 0.2, 900 + trial);
    if (gt.edge_count() == 0) continue;
    const PixelGrid pred = testsupport::random_pred(9, 9, 950 + trial, 0.1, 0.9);
    const ebt::TriClassMask mask = ebt::classify(gt, params.radius);
    const GradGrid grad = ebt::ebt_loss_grad(pred, gt, mask, params);

    double grad_norm = 0.0;
    for (std::int64_t i = 0; i < pred.size(); ++i) {
      if (mask.classes[i] == ebt::PixelClass::kEdge)
        CHECK(grad[i] <= 0.0);
      else
        CHECK(grad[i] >= 0.0);
      grad_norm += grad[i] * grad[i];
    }
    if (grad_norm == 0.0) continue;

    PixelGrid stepped = pred;
    for (std::int64_t i = 0; i < pred.size(); ++i) stepped[i] -= 1e-6 * grad[i];
    CHECK(ebt::ebt_loss(stepped, gt, mask, params).value <
          ebt::ebt_loss(pred, gt, mask, params).value);

    const GradGrid wgrad =
        ebt::wbce_loss_grad(pred, gt, params.lambda, params.epsilon);
    for (std::int64_t i = 0; i < pred.size(); ++i) {
      if (gt.is_edge(i))
        CHECK(wgrad[i] <= 0.0);
      else
        CHECK(wgrad[i] >= 0.0);
    }
  }
}

TEST_CASE("perfect prediction is a loss floor") {
  ebt::Rng rng(321);
  LossParams params;
  for (int trial = 0; trial < 10; ++trial) {
    const BinaryMap gt = testsupport::random_map(7, 7, 0.25, 1100 + trial);
    const PixelGrid best = as_probabilities(gt);
    const double floor_ebt = ebt::ebt_loss(best, gt, params).value;
    const double floor_wbce =
        ebt::wbce_loss(best, gt, params.lambda, params.epsilon).value;
    for (int k = 0; k < 5; ++k) {
      const PixelGrid other = testsupport::random_pred(7, 7, 1200 + 10 * trial + k);
      CHECK(ebt::ebt_loss(other, gt, params).value >= floor_ebt);
      CHECK(ebt::wbce_loss(other, gt, params.lambda, params.epsilon).value >=
            floor_wbce);
    }
  }
}

TEST_CASE("raising b_b raises the loss while boundary pixels are lit") {
  const BinaryMap gt = center_edge_3x3();
  const PixelGrid pred(3, 3, 0.4);
  LossParams low, high;
  low.radius = high.radius = 1;
  low.b_b = 0.8;
  high.b_b = 0.9;
  CHECK(ebt::ebt_loss(pred, gt, high).value > ebt::ebt_loss(pred, gt, low).value);
}

TEST_CASE("losses reject malformed inputs") {
  CHECK_THROWS_AS(ebt::bce_loss(PixelGrid(2, 2, 0.5), BinaryMap(2, 3), 1e-7),
                  ebt::ShapeError);
  CHECK_THROWS_AS(ebt::wbce_loss_grad(PixelGrid(2, 2, 0.5), BinaryMap(3, 2)),
                  ebt::ShapeError);
  CHECK_THROWS_AS(ebt::ebt_loss(PixelGrid(2, 2, 1.5), BinaryMap(2, 2)),
                  std::invalid_argument);
  LossParams bad;
  bad.epsilon = 0.7;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  CHECK_THROWS_AS(ebt::bce_loss(PixelGrid(2, 2, 0.5), BinaryMap(2, 2), 0.7),
                  std::invalid_argument);
  CHECK_THROWS_AS(ebt::wbce_loss(PixelGrid(2, 2, 0.5), BinaryMap(2, 2), -1.0),
                  std::invalid_argument);
}
