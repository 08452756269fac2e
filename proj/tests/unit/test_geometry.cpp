#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "dscv/error.hpp"
#include "dscv/geometry.hpp"
#include "dscv/synthetic.hpp"

using namespace dscv;
using namespace dscv::geometry;

namespace {

CameraIntrinsics k100() { return {100.0, 100.0, 50.0, 50.0, 101, 101}; }

double rel(const Eigen::Vector3d& a, const Eigen::Vector3d& b) { return (a - b).norm() / std::max(b.norm(), 1e-300); }

}  // namespace

TEST_SUITE("geometry") {
  TEST_CASE("project: principal axis and lateral point") {
    const auto p = project(Point3(0, 0, 2), k100());
    CHECK(p.pixel.x() == 50.0);
    CHECK(p.pixel.y() == 50.0);
    CHECK(p.depth == 2.0);
    const auto q = project(Point3(1, 0, 2), k100());
    CHECK(q.pixel.x() == doctest::Approx(100.0).epsilon(1e-15));
    CHECK(q.pixel.y() == doctest::Approx(50.0).epsilon(1e-15));
  }

  TEST_CASE("project rejects points at or behind the camera") {
    CHECK_THROWS_AS(project(Point3(0, 0, 0), k100()), Error);
    try {
      project(Point3(1, 1, -1), k100());
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NonPositiveDepth);
    }
  }

  TEST_CASE("backproject examples") {
    CHECK(rel(backproject(Pixel(50, 50), 3.0, k100()), Point3(0, 0, 3)) < 1e-15);
    CHECK(rel(backproject(Pixel(100, 50), 2.0, k100()), Point3(1, 0, 2)) < 1e-15);
    CHECK_THROWS_AS(backproject(Pixel(1, 1), 0.0, k100()), Error);
  }

  TEST_CASE("project and backproject round trip") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> xy(-5, 5), z(0.1, 50);
    const CameraIntrinsics k{312.5, 287.25, 61.5, 47.25, 128, 96};
    for (int i = 0; i < 100; ++i) {
      const Point3 x(xy(rng), xy(rng), z(rng));
      const auto p = project(x, k);
      CHECK(rel(backproject(p.pixel, p.depth, k), x) < 1e-12);
    }
  }

  TEST_CASE("reproject: identity, translation, rotation about the optical axis") {
    const auto id = reproject(Pixel(12.25, 40.5), 3.7, k100(), PoseSE3::identity());
    CHECK(id.valid);
    CHECK(std::abs(id.pixel.x() - 12.25) < 1e-9);
    CHECK(std::abs(id.pixel.y() - 40.5) < 1e-9);
    CHECK(std::abs(id.depth - 3.7) < 1e-9);

    const auto tz = reproject(Pixel(50, 50), 2.0, k100(), PoseSE3::from_translation({0, 0, -1}));
    CHECK(tz.valid);
    CHECK(std::abs(tz.pixel.x() - 50) < 1e-12);
    CHECK(std::abs(tz.pixel.y() - 50) < 1e-12);
    CHECK(std::abs(tz.depth - 1.0) < 1e-12);

    const auto rot = reproject(Pixel(60, 50), 4.0, k100(),
                               PoseSE3::from_axis_angle({0, 0, 1}, std::numbers::pi, Eigen::Vector3d::Zero()));
    CHECK(rot.valid);
    CHECK(std::abs(rot.pixel.x() - 40) < 1e-9);
    CHECK(std::abs(rot.pixel.y() - 50) < 1e-9);
  }

  TEST_CASE("reproject flags points that end up behind the camera") {
    const auto r = reproject(Pixel(50, 50), 2.0, k100(), PoseSE3::from_translation({0, 0, -3}));
    CHECK_FALSE(r.valid);
  }

  TEST_CASE("pose validation and composition") {
    Eigen::Matrix3d bad = Eigen::Matrix3d::Identity();
    bad(0, 0) = 1.01;
    CHECK_THROWS_AS(PoseSE3(bad, Eigen::Vector3d::Zero()), Error);
    const auto a = PoseSE3::from_axis_angle({0.3, -1, 0.2}, 0.4, {1, 2, 3});
    const auto b = PoseSE3::from_axis_angle({1, 0.1, 0}, -0.7, {-0.5, 0, 0.25});
    const Point3 x(0.3, -0.2, 4.0);
    CHECK(rel((a * b).apply(x), a.apply(b.apply(x))) < 1e-14);
    CHECK(rel(a.inverse().apply(a.apply(x)), x) < 1e-14);
    CHECK(PoseSE3::identity().is_identity());
    CHECK_FALSE(a.is_identity());
  }

  TEST_CASE("camera_flow: identity pose and lateral translation") {
    ImageGrid depth(6, 7, 1, 2.0f);
    const CameraIntrinsics k{100, 100, 3, 2.5, 7, 6};
    const auto zero = camera_flow(depth, k, PoseSE3::identity());
    for (int y = 0; y < 6; ++y) {
      for (int x = 0; x < 7; ++x) {
        CHECK(zero.u(y, x) == 0.0f);
        CHECK(zero.v(y, x) == 0.0f);
      }
    }
    const auto f = camera_flow(depth, k, PoseSE3::from_translation({0.1, 0, 0}));
    for (int y = 0; y < 6; ++y) {
      for (int x = 0; x < 7; ++x) {
        CHECK(f.u(y, x) == doctest::Approx(5.0).epsilon(1e-6));
        CHECK(std::abs(f.v(y, x)) < 1e-6);
        CHECK(f.valid(y, x));
      }
    }
  }

  TEST_CASE("camera_flow marks unusable depth invalid") {
    ImageGrid depth(2, 2, 1, 2.0f);
    depth(0, 0) = 0.0f;
    depth(0, 1) = NAN;
    depth.set_valid(1, 0, false);
    const auto f = camera_flow(depth, {100, 100, 0.5, 0.5, 2, 2}, PoseSE3::from_translation({0.1, 0, 0}));
    CHECK_FALSE(f.valid(0, 0));
    CHECK_FALSE(f.valid(0, 1));
    CHECK_FALSE(f.valid(1, 0));
    CHECK(f.valid(1, 1));
  }

  TEST_CASE("camera_flow matches the renderer's rigid flow on static scenes") {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      const auto pair = synthetic::render_pair(synthetic::scenarios::static_plane(seed), seed);
      const auto f = camera_flow(pair.depth_t, pair.intrinsics, pair.pose);
      double worst = 0.0;
      for (int y = 0; y < f.height(); ++y) {
        for (int x = 0; x < f.width(); ++x) {
          REQUIRE(f.valid(y, x));
          worst = std::max({worst, std::abs(double(f.u(y, x)) - pair.total_flow.u(y, x)),
                            std::abs(double(f.v(y, x)) - pair.total_flow.v(y, x))});
        }
      }
      CHECK(worst < 1e-5);
    }
  }

  TEST_CASE("compose_total_flow") {
    FlowField cam(3, 4), res(3, 4);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<float> u(-3, 3);
    for (float& v : cam.u_data()) v = u(rng);
    for (float& v : cam.v_data()) v = u(rng);
    for (float& v : res.u_data()) v = u(rng);
    for (float& v : res.v_data()) v = u(rng);
    CHECK(compose_total_flow(cam, FlowField(3, 4)) == cam);
    CHECK(compose_total_flow(FlowField(3, 4), res) == res);
    res.set_valid(1, 1, false);
    CHECK_FALSE(compose_total_flow(cam, res).valid(1, 1));
    CHECK_THROWS_AS(compose_total_flow(cam, FlowField(4, 3)), Error);
  }

  TEST_CASE("compose_total_flow equals the renderer's total flow on moving-object scenes") {
    const auto pair = synthetic::render_pair(synthetic::scenarios::moving_object(4), 4);
    const auto total = compose_total_flow(pair.camera_flow, pair.residual_flow);
    double worst = 0.0;
    for (int y = 0; y < total.height(); ++y) {
      for (int x = 0; x < total.width(); ++x) {
        worst = std::max({worst, std::abs(double(total.u(y, x)) - pair.total_flow.u(y, x)),
                          std::abs(double(total.v(y, x)) - pair.total_flow.v(y, x))});
      }
    }
    CHECK(worst < 1e-5);
  }

  TEST_CASE("scene flow: trivial and static-world cases") {
    const auto k = k100();
    const auto z = scene_flow_from_depths(Pixel(30, 70), Eigen::Vector2d::Zero(), 4.0, 4.0, PoseSE3::identity(),
                                          PoseSE3::identity(), k);
    CHECK(z.norm() == 0.0);

    // static point X seen from two camera positions
    const Point3 x(0.4, -0.3, 5.0);
    const auto pose0 = PoseSE3::from_translation({0.2, 0, 0});
    const auto pose1 = PoseSE3::from_axis_angle({0, 1, 0}, 0.05, {-0.1, 0.05, 0.3});
    const auto p0 = project(pose0.apply(x), k);
    const auto p1 = project(pose1.apply(x), k);
    const auto sf = scene_flow_from_depths(p0.pixel, p1.pixel - p0.pixel, p0.depth, p1.depth, pose0, pose1, k);
    CHECK(sf.norm() < 1e-9);
  }

  TEST_CASE("projected optical flow: trivial cases and consistency with camera_flow") {
    const auto k = k100();
    const Point3 x(0.4, -0.3, 5.0);
    CHECK(projected_optical_flow(x, SceneFlow::Zero(), PoseSE3::identity(), PoseSE3::identity(), k).norm() == 0.0);

    const auto pose1 = PoseSE3::from_translation({0.1, -0.05, 0.2});
    const auto flow = projected_optical_flow(x, SceneFlow::Zero(), PoseSE3::identity(), pose1, k);
    const auto p = project(x, k);
    const auto r = reproject(p.pixel, p.depth, k, pose1);
    CHECK((flow - (r.pixel - p.pixel)).norm() < 1e-9);
  }

  TEST_CASE("scene flow and projected optical flow invert each other") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1, 1);
    const auto k = k100();
    for (int i = 0; i < 100; ++i) {
      const Point3 x(u(rng), u(rng), 4 + u(rng));
      const SceneFlow s(0.3 * u(rng), 0.3 * u(rng), 0.3 * u(rng));
      const auto pose0 = PoseSE3::from_axis_angle({u(rng), u(rng), 1}, 0.1 * u(rng), {0.2 * u(rng), 0.2 * u(rng), 0.2 * u(rng)});
      const auto pose1 = PoseSE3::from_axis_angle({1, u(rng), u(rng)}, 0.1 * u(rng), {0.2 * u(rng), 0.2 * u(rng), 0.2 * u(rng)});
      const auto opt = projected_optical_flow(x, s, pose0, pose1, k);
      const auto p0 = project(pose0.apply(x), k);
      const double d1 = pose1.apply(x + s).z();
      const auto back = scene_flow_from_depths(p0.pixel, opt, p0.depth, d1, pose0, pose1, k);
      CHECK(rel(back, s) < 1e-6);
    }
  }

  TEST_CASE("scene flow recovered from a rendered moving object equals its motion") {
    const auto spec = synthetic::scenarios::moving_object(2);
    const auto pair = synthetic::render_pair(spec, 2);
    const auto& obj = spec.objects.front();
    int checked = 0;
    double worst = 0.0;
    for (int y = 0; y < pair.depth_t.height(); y += 3) {
      for (int x = 0; x < pair.depth_t.width(); x += 3) {
        if (!pair.object_mask(y, x) || pair.discontinuity_mask(y, x)) continue;
        // frame 0 = target time (world frame), frame 1 = source time
        const Point3 xt = backproject(Pixel(x, y), pair.depth_t(y, x), pair.intrinsics);
        const double d1 = pair.pose.apply(xt - obj.velocity).z();
        const Eigen::Vector2d opt(pair.total_flow.u(y, x), pair.total_flow.v(y, x));
        const auto sf = scene_flow_from_depths(Pixel(x, y), opt, pair.depth_t(y, x), d1, PoseSE3::identity(),
                                               pair.pose, pair.intrinsics);
        worst = std::max(worst, (sf + obj.velocity).norm());
        ++checked;
      }
    }
    CHECK(checked > 100);
    CHECK(worst < 1e-5);
  }

  TEST_CASE("intrinsics validation and corner-aligned scaling") {
    CHECK_THROWS_AS((CameraIntrinsics{0, 1, 0, 0, 4, 4}.validate()), Error);
    CHECK_THROWS_AS((CameraIntrinsics{1, 1, 0, 0, 1, 4}.validate()), Error);
    const CameraIntrinsics k{100, 80, 63.5, 47.5, 128, 96};
    const auto s = k.scaled(64, 48);
    // the last pixel centre maps onto the last pixel centre
    const Point3 edge = backproject(Pixel(127, 95), 2.0, k);
    const auto p = project(edge, s);
    CHECK(p.pixel.x() == doctest::Approx(63.0));
    CHECK(p.pixel.y() == doctest::Approx(47.0));
  }
}
