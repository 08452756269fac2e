#include <doctest.h>

#include <cmath>
#include <random>

#include "../oracles.hpp"
#include "dscv/error.hpp"
#include "dscv/metrics.hpp"

using namespace dscv;
using namespace dscv::metrics;

namespace {

ImageGrid row(std::initializer_list<float> values) {
  ImageGrid g(1, static_cast<int>(values.size()), 1);
  int x = 0;
  for (float v : values) g(0, x++) = v;
  return g;
}

}  // namespace

TEST_SUITE("metrics") {
  TEST_CASE("perfect prediction") {
    const auto gt = row({1.0f, 2.0f, 5.0f, 9.0f});
    const auto r = evaluate(gt, gt);
    CHECK(r.abs_rel == 0.0);
    CHECK(r.sq_rel == 0.0);
    CHECK(r.rmse == 0.0);
    CHECK(r.rmse_log == 0.0);
    CHECK(r.delta1 == 1.0);
    CHECK(r.delta2 == 1.0);
    CHECK(r.delta3 == 1.0);
    CHECK(r.n_valid == 4);
  }

  TEST_CASE("doubling the prediction fails every threshold") {
    const auto r = evaluate(row({2.0f}), row({1.0f}));
    CHECK(r.abs_rel == doctest::Approx(1.0));
    CHECK(r.sq_rel == doctest::Approx(1.0));
    CHECK(r.rmse == doctest::Approx(1.0));
    CHECK(r.rmse_log == doctest::Approx(std::log(2.0)));
    // 2 exceeds 1.25, 1.25^2 = 1.5625 and 1.25^3 = 1.953125.
    CHECK(r.delta1 == 0.0);
    CHECK(r.delta2 == 0.0);
    CHECK(r.delta3 == 0.0);
  }

  TEST_CASE("thresholds fall between the powers of 1.25") {
    const auto r = evaluate(row({1.2f, 1.5f, 1.9f, 3.0f}), row({1.0f, 1.0f, 1.0f, 1.0f}));
    CHECK(r.delta1 == doctest::Approx(0.25));
    CHECK(r.delta2 == doctest::Approx(0.5));
    CHECK(r.delta3 == doctest::Approx(0.75));
    const auto under = evaluate(row({1.0f}), row({1.5f}));
    CHECK(under.delta1 == 0.0);
    CHECK(under.delta2 == 1.0);
  }

  TEST_CASE("statistics agree with a direct computation") {
    std::mt19937_64 rng(11);
    const auto gt = oracle::random_grid(rng, 7, 9, 1, 1.0, 30.0);
    const auto pred = oracle::random_grid(rng, 7, 9, 1, 1.0, 30.0);
    double ar = 0, sr = 0, sq = 0, sl = 0;
    int d1 = 0, n = 0;
    for (std::size_t i = 0; i < gt.data().size(); ++i) {
      const double p = pred.data()[i], g = gt.data()[i];
      ar += std::fabs(p - g) / g;
      sr += (p - g) * (p - g) / g;
      sq += (p - g) * (p - g);
      sl += (std::log(p) - std::log(g)) * (std::log(p) - std::log(g));
      d1 += std::max(p / g, g / p) < 1.25;
      ++n;
    }
    const auto r = evaluate(pred, gt);
    CHECK(oracle::rel_err(r.abs_rel, ar / n) < 1e-12);
    CHECK(oracle::rel_err(r.sq_rel, sr / n) < 1e-12);
    CHECK(oracle::rel_err(r.rmse, std::sqrt(sq / n)) < 1e-12);
    CHECK(oracle::rel_err(r.rmse_log, std::sqrt(sl / n)) < 1e-12);
    CHECK(r.delta1 == doctest::Approx(double(d1) / n));
  }

  TEST_CASE("depth range, invalid pixels and region mask restrict the set") {
    auto gt = row({0.5f, 2.0f, 100.0f, 3.0f, 4.0f});
    const auto pred = row({9.0f, 2.0f, 9.0f, 9.0f, 8.0f});
    gt.set_valid(0, 3, false);
    EvalProtocol p;
    p.min_depth = 1.0;
    p.max_depth = 80.0;
    auto r = evaluate(pred, gt, p);
    CHECK(r.n_valid == 2);
    CHECK(r.abs_rel == doctest::Approx(0.5));
    Mask m(1, 5, true);
    m.set(0, 4, false);
    p.region_mask = m;
    r = evaluate(pred, gt, p);
    CHECK(r.n_valid == 1);
    CHECK(r.abs_rel == 0.0);
  }

  TEST_CASE("predictions are clamped to the depth range") {
    EvalProtocol p;
    p.max_depth = 10.0;
    const auto r = evaluate(row({1000.0f}), row({5.0f}), p);
    CHECK(r.abs_rel == doctest::Approx(1.0));
  }

  TEST_CASE("median scaling removes a global scale") {
    const auto gt = row({1.0f, 2.0f, 4.0f, 8.0f, 3.0f});
    ImageGrid pred = gt;
    for (float& v : pred.data()) v *= 3.0f;
    EvalProtocol p;
    CHECK(evaluate(pred, gt, p).abs_rel == doctest::Approx(2.0));
    p.median_scaling = true;
    const auto r = evaluate(pred, gt, p);
    CHECK(r.scale == doctest::Approx(1.0 / 3.0));
    CHECK(r.abs_rel == doctest::Approx(0.0).epsilon(1e-6));
    // Even count: median is the mean of the middle pair.
    const auto even = evaluate(row({1.0f, 2.0f, 3.0f, 10.0f}), row({2.0f, 2.0f, 2.0f, 2.0f}), p);
    CHECK(even.scale == doctest::Approx(2.0 / 2.5));
  }

  TEST_CASE("errors") {
    const auto gt = row({1.0f, 2.0f});
    CHECK_THROWS_AS(evaluate(row({1.0f}), gt), Error);
    EvalProtocol bad;
    bad.min_depth = 5.0;
    bad.max_depth = 1.0;
    CHECK_THROWS_AS(evaluate(gt, gt, bad), Error);
    EvalProtocol narrow;
    narrow.min_depth = 10.0;
    narrow.max_depth = 20.0;
    try {
      evaluate(gt, gt, narrow);
      FAIL("expected NoValidPixels");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NoValidPixels);
    }
  }

  TEST_CASE("histogram bins every evaluated pixel") {
    const auto gt = row({1.0f, 1.0f, 1.0f, 1.0f, 1.0f});
    const auto pred = row({1.0f, 1.05f, 1.15f, 1.95f, 5.0f});
    const auto h = error_histogram(pred, gt, {}, 4, 0.0, 1.0);
    REQUIRE(h.counts.size() == 4);
    CHECK(h.counts[0] == 3);
    CHECK(h.counts[1] == 0);
    CHECK(h.counts[2] == 0);
    CHECK(h.counts[3] == 2);
    CHECK(h.total() == evaluate(pred, gt).n_valid);
    CHECK(h.bin_lo(1) == doctest::Approx(0.25));
    CHECK(h.bin_hi(3) == doctest::Approx(1.0));
    CHECK_THROWS_AS(error_histogram(pred, gt, {}, 0, 0.0, 1.0), Error);
    CHECK_THROWS_AS(error_histogram(pred, gt, {}, 3, 1.0, 1.0), Error);
  }

  TEST_CASE("abs_rel map marks evaluated pixels") {
    auto gt = row({2.0f, 4.0f, 1.0f});
    gt.set_valid(0, 2, false);
    const auto m = abs_rel_map(row({3.0f, 4.0f, 7.0f}), gt);
    CHECK(m(0, 0) == doctest::Approx(0.5));
    CHECK(m(0, 1) == 0.0f);
    CHECK(m.valid(0, 0));
    CHECK_FALSE(m.valid(0, 2));
  }
}
