#include "dscv/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <random>

#include "dscv/error.hpp"
#include "dscv/sampler.hpp"

namespace dscv::synthetic {

using geometry::CameraIntrinsics;
using geometry::Pixel;
using geometry::PoseSE3;

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t mix_seeds(std::uint64_t a, std::uint64_t b) { return splitmix(splitmix(a) ^ (b + 0x632BE59BD9B4E019ull)); }

// Portable draws: the standard distributions are implementation-defined.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int integer(int lo, int hi) { return lo + static_cast<int>(uniform() * (hi - lo + 1) * (1.0 - 1e-15)); }

  double normal() {
    if (spare_) {
      const double v = *spare_;
      spare_.reset();
      return v;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
    return r * std::cos(2.0 * std::numbers::pi * u2);
  }

private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

class Texture {
public:
  Texture(const TextureSpec& spec, std::uint64_t seed) {
    Rng rng(mix_seeds(seed, spec.seed));
    double total = 0.0;
    for (int i = 0; i < spec.components; ++i) {
      const double wavelength = rng.uniform(spec.min_wavelength, spec.max_wavelength);
      const double angle = rng.uniform(0.0, std::numbers::pi);
      const double omega = 2.0 * std::numbers::pi / wavelength;
      Wave w{omega * std::cos(angle), omega * std::sin(angle), rng.uniform(0.0, 2.0 * std::numbers::pi),
             rng.uniform(0.5, 1.0)};
      total += w.amplitude;
      waves_.push_back(w);
    }
    for (Wave& w : waves_) w.amplitude *= spec.contrast / total;
  }

  double operator()(double s, double t) const {
    double v = 0.5;
    for (const Wave& w : waves_) v += w.amplitude * std::sin(w.kx * s + w.ky * t + w.phase);
    return v;
  }

private:
  struct Wave {
    double kx, ky, phase, amplitude;
  };
  std::vector<Wave> waves_;
};

struct Hit {
  int surface = -1;  // 0 = background, i + 1 = object i
  double depth = std::numeric_limits<double>::infinity();
  Eigen::Vector3d point = Eigen::Vector3d::Zero();
};

class Scene {
public:
  Scene(const SceneSpec& spec, std::uint64_t seed) : spec_(spec) {
    const auto& bg = spec.background;
    normal_ = bg.normal.normalized();
    anchor_ = Eigen::Vector3d(0.0, 0.0, bg.depth);
    Eigen::Vector3d helper = Eigen::Vector3d::UnitY().cross(normal_);
    if (helper.norm() < 1e-6) helper = normal_.cross(Eigen::Vector3d::UnitX());
    axis_u_ = helper.normalized();
    axis_v_ = normal_.cross(axis_u_).normalized();
    bg_scale_ = spec.intrinsics.fx / bg.depth;
    textures_.emplace_back(bg.texture, seed);
    for (const auto& obj : spec.objects) textures_.emplace_back(obj.texture, seed);
  }

  // frame 0 = target (time t), frame 1 = source (time t-1)
  Eigen::Vector3d object_center(std::size_t i, int frame) const {
    const auto& obj = spec_.objects[i];
    return frame == 0 ? obj.center : Eigen::Vector3d(obj.center - obj.velocity);
  }

  Hit cast(const Eigen::Vector3d& origin, const Eigen::Vector3d& dir, int frame) const {
    Hit best;
    const double denom = normal_.dot(dir);
    if (std::abs(denom) > 1e-12) {
      const double t = normal_.dot(anchor_ - origin) / denom;
      if (t > 0.0) best = {0, t, origin + t * dir};
    }
    for (std::size_t i = 0; i < spec_.objects.size(); ++i) {
      if (std::abs(dir.z()) < 1e-12) continue;
      const Eigen::Vector3d c = object_center(i, frame);
      const double t = (c.z() - origin.z()) / dir.z();
      if (!(t > 0.0) || !(t < best.depth)) continue;
      const Eigen::Vector3d p = origin + t * dir;
      const auto& size = spec_.objects[i].size;
      if (std::abs(p.x() - c.x()) <= 0.5 * size.x() && std::abs(p.y() - c.y()) <= 0.5 * size.y()) {
        best = {static_cast<int>(i) + 1, t, p};
      }
    }
    return best;
  }

  double shade(const Hit& hit, int frame) const {
    if (hit.surface == 0) {
      const Eigen::Vector3d rel = hit.point - anchor_;
      return textures_[0](rel.dot(axis_u_) * bg_scale_, rel.dot(axis_v_) * bg_scale_);
    }
    const std::size_t i = static_cast<std::size_t>(hit.surface - 1);
    const Eigen::Vector3d rel = hit.point - object_center(i, frame);
    const double scale = spec_.intrinsics.fx / spec_.objects[i].center.z();
    return textures_[static_cast<std::size_t>(hit.surface)](rel.x() * scale, rel.y() * scale);
  }

  // Ray through a (continuous) pixel of the given frame, in world (= target camera) coordinates.
  // The camera-z depth of a hit equals its ray parameter because the camera-space direction has z = 1.
  std::pair<Eigen::Vector3d, Eigen::Vector3d> ray(double x, double y, int frame) const {
    const auto& k = spec_.intrinsics;
    const Eigen::Vector3d d((x - k.cx) / k.fx, (y - k.cy) / k.fy, 1.0);
    if (frame == 0) return {Eigen::Vector3d::Zero(), d};
    const Eigen::Matrix3d rt = spec_.camera_motion.rotation().transpose();
    return {-(rt * spec_.camera_motion.translation()), rt * d};
  }

  Hit cast_pixel(double x, double y, int frame) const {
    const auto [origin, dir] = ray(x, y, frame);
    return cast(origin, dir, frame);
  }

private:
  const SceneSpec& spec_;
  Eigen::Vector3d normal_, anchor_, axis_u_, axis_v_;
  double bg_scale_ = 1.0;
  std::vector<Texture> textures_;
};

void validate_texture(const TextureSpec& t) {
  if (t.components < 1 || !(t.min_wavelength >= 4.0) || !(t.max_wavelength >= t.min_wavelength) ||
      !(t.contrast >= 0.0) || !(t.contrast <= 0.5)) {
    throw Error(ErrorCode::InvalidArgument,
                "texture needs >= 1 component, wavelengths >= 4 px and contrast in [0, 0.5]");
  }
}

bool in_bounds(double x, double y, int w, int h) {
  constexpr double tol = sampler::kBorderTolerance;
  return std::isfinite(x) && std::isfinite(y) && x >= -tol && y >= -tol && x <= (w - 1) + tol &&
         y <= (h - 1) + tol;
}

}  // namespace

void SceneSpec::validate() const {
  intrinsics.validate();
  if (!(background.depth > 0.0) || !background.normal.allFinite() || background.normal.norm() < 1e-9) {
    throw Error(ErrorCode::InvalidArgument, "background needs positive depth and a non-zero normal");
  }
  validate_texture(background.texture);
  if (!(noise_sigma >= 0.0)) throw Error(ErrorCode::InvalidArgument, "noise sigma must be >= 0");
  for (const auto& obj : objects) {
    validate_texture(obj.texture);
    if (!obj.center.allFinite() || !obj.velocity.allFinite() || !(obj.size.x() > 0.0) || !(obj.size.y() > 0.0)) {
      throw Error(ErrorCode::InvalidArgument, "object needs finite placement and positive size");
    }
    if (!(obj.center.z() > 0.0) || !(obj.center.z() - obj.velocity.z() > 0.0)) {
      throw Error(ErrorCode::InvalidArgument, "object depth must be positive in both frames");
    }
    for (double sx : {-0.5, 0.5}) {
      for (double sy : {-0.5, 0.5}) {
        const Eigen::Vector3d corner = obj.center + Eigen::Vector3d(sx * obj.size.x(), sy * obj.size.y(), 0.0);
        const auto p = geometry::project(corner, intrinsics);
        if (!in_bounds(p.pixel.x(), p.pixel.y(), intrinsics.width, intrinsics.height)) {
          throw Error(ErrorCode::InvalidArgument, "object rectangle leaves the target view");
        }
      }
    }
  }
}

RenderedPair render_pair(const SceneSpec& spec, std::uint64_t seed) {
  spec.validate();
  const Scene scene(spec, seed);
  const CameraIntrinsics& k = spec.intrinsics;
  const int w = k.width;
  const int h = k.height;
  const PoseSE3& pose = spec.camera_motion;

  RenderedPair out;
  out.intrinsics = k;
  out.pose = pose;
  out.image_t = ImageGrid(h, w, 1);
  out.image_src = ImageGrid(h, w, 1);
  out.depth_t = ImageGrid(h, w, 1);
  out.camera_flow = FlowField(h, w);
  out.residual_flow = FlowField(h, w);
  out.total_flow = FlowField(h, w);
  out.object_mask = Mask(h, w);
  out.occlusion_mask = Mask(h, w);
  out.discontinuity_mask = Mask(h, w);

  std::vector<Hit> hits_t(static_cast<std::size_t>(w) * h);
  std::vector<int> ids_src(hits_t.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      const Hit ht = scene.cast_pixel(x, y, 0);
      const Hit hs = scene.cast_pixel(x, y, 1);
      if (ht.surface < 0 || hs.surface < 0) {
        throw Error(ErrorCode::DegenerateScene, "a pixel sees no surface at positive depth");
      }
      hits_t[i] = ht;
      ids_src[i] = hs.surface;
      out.image_t(y, x) = static_cast<float>(scene.shade(ht, 0));
      out.image_src(y, x) = static_cast<float>(scene.shade(hs, 1));
      out.depth_t(y, x) = static_cast<float>(ht.depth);
      out.object_mask.set(y, x, ht.surface > 0);
    }
  }

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      const Hit& hit = hits_t[i];
      const Pixel p(x, y);

      bool edge = false;
      for (int dy = -1; dy <= 1 && !edge; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const int yy = y + dy, xx = x + dx;
          if (yy < 0 || yy >= h || xx < 0 || xx >= w) continue;
          if (hits_t[static_cast<std::size_t>(yy) * w + xx].surface != hit.surface) {
            edge = true;
            break;
          }
        }
      }

      Eigen::Vector3d source_world = hit.point;
      if (hit.surface > 0) source_world -= spec.objects[static_cast<std::size_t>(hit.surface - 1)].velocity;
      const Eigen::Vector3d moved = pose.apply(source_world);
      const Eigen::Vector3d rigid = pose.apply(hit.point);
      if (!(moved.z() > 0.0) || !(rigid.z() > 0.0)) {
        out.camera_flow.set_valid(y, x, false);
        out.residual_flow.set_valid(y, x, false);
        out.total_flow.set_valid(y, x, false);
        out.occlusion_mask.set(y, x, true);
        out.discontinuity_mask.set(y, x, edge);
        continue;
      }
      const Pixel q = geometry::project(moved, k).pixel;
      const Pixel q_rigid = geometry::project(rigid, k).pixel;
      const Eigen::Vector2d total = q - p;
      const Eigen::Vector2d cam = q_rigid - p;
      out.total_flow.u(y, x) = static_cast<float>(total.x());
      out.total_flow.v(y, x) = static_cast<float>(total.y());
      out.camera_flow.u(y, x) = static_cast<float>(cam.x());
      out.camera_flow.v(y, x) = static_cast<float>(cam.y());
      if (hit.surface > 0) {
        out.residual_flow.u(y, x) = static_cast<float>(total.x() - cam.x());
        out.residual_flow.v(y, x) = static_cast<float>(total.y() - cam.y());
      }

      bool occluded = !in_bounds(q.x(), q.y(), w, h);
      if (!occluded) {
        const Hit seen = scene.cast_pixel(q.x(), q.y(), 1);
        occluded = seen.depth < moved.z() * (1.0 - 1e-6);
        const int x0 = static_cast<int>(std::floor(q.x()));
        const int y0 = static_cast<int>(std::floor(q.y()));
        for (int yy = std::max(0, y0 - 1); yy <= std::min(h - 1, y0 + 2) && !edge; ++yy) {
          for (int xx = std::max(0, x0 - 1); xx <= std::min(w - 1, x0 + 2); ++xx) {
            if (ids_src[static_cast<std::size_t>(yy) * w + xx] != hit.surface) {
              edge = true;
              break;
            }
          }
        }
      }
      out.occlusion_mask.set(y, x, occluded);
      out.discontinuity_mask.set(y, x, edge);
    }
  }

  if (spec.noise_sigma > 0.0) {
    Rng rng(mix_seeds(seed, 0x6E6F697365ull));
    for (ImageGrid* img : {&out.image_t, &out.image_src}) {
      for (float& v : img->data()) {
        v = static_cast<float>(std::clamp(v + spec.noise_sigma * rng.normal(), 0.0, 1.0));
      }
    }
  }
  return out;
}

FlowField perturb_flow(const FlowField& flow, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw Error(ErrorCode::InvalidArgument, "sigma must be >= 0");
  if (sigma == 0.0) return flow;
  FlowField out = flow;
  Rng rng(mix_seeds(seed, 0x666C6F77ull));
  for (int y = 0; y < flow.height(); ++y) {
    for (int x = 0; x < flow.width(); ++x) {
      const double du = sigma * rng.normal();
      const double dv = sigma * rng.normal();
      if (!flow.valid(y, x)) continue;
      out.u(y, x) = static_cast<float>(flow.u(y, x) + du);
      out.v(y, x) = static_cast<float>(flow.v(y, x) + dv);
    }
  }
  return out;
}

namespace scenarios {

costvolume::DepthHypothesisSet hypotheses() { return costvolume::make_hypotheses(kMinDepth, kMaxDepth, kBins); }

namespace {

PoseSE3 random_translation(Rng& rng) {
  const double tx = rng.uniform(0.15, 0.3) * (rng.uniform() < 0.5 ? -1.0 : 1.0);
  const double ty = rng.uniform(-0.03, 0.03);
  const double tz = rng.uniform(-0.05, 0.05);
  return PoseSE3::from_translation(Eigen::Vector3d(tx, ty, tz));
}

}  // namespace

SceneSpec static_plane(std::uint64_t seed) {
  Rng rng(mix_seeds(seed, 0x706C616E65ull));
  const auto hyps = hypotheses();
  SceneSpec spec;
  spec.background.depth = hyps[static_cast<std::size_t>(rng.integer(6, 26))];
  spec.background.texture.seed = seed;
  spec.camera_motion = random_translation(rng);
  return spec;
}

SceneSpec moving_object(std::uint64_t seed) {
  Rng rng(mix_seeds(seed, 0x6F626A656374ull));
  const auto hyps = hypotheses();
  SceneSpec spec;
  spec.background.depth = hyps[static_cast<std::size_t>(rng.integer(26, 29))];
  spec.background.texture.seed = seed;
  spec.camera_motion = random_translation(rng);

  // twice the default resolution keeps the object's boundary band, where
  // windowed matching mixes surfaces, a small fraction of its pixels
  spec.intrinsics = geometry::CameraIntrinsics{200.0, 200.0, 127.5, 95.5, 256, 192};
  const auto& k = spec.intrinsics;
  ObjectSpec obj;
  const double z = hyps[static_cast<std::size_t>(rng.integer(14, 20))];
  const double w_px = rng.uniform(112.0, 136.0);
  const double h_px = rng.uniform(84.0, 100.0);
  const double margin = 24.0;
  const double u = rng.uniform(margin + w_px / 2, k.width - 1 - margin - w_px / 2);
  const double v = rng.uniform(margin + h_px / 2, k.height - 1 - margin - h_px / 2);
  obj.center = geometry::backproject(Pixel(u, v), z, k);
  obj.size = Eigen::Vector2d(w_px * z / k.fx, h_px * z / k.fy);
  const double shift_px = rng.uniform(8.0, 14.0);
  const double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
  obj.velocity = Eigen::Vector3d(shift_px * std::cos(angle) * z / k.fx, shift_px * std::sin(angle) * z / k.fy, 0.0);
  obj.texture.seed = seed + 1000;
  spec.objects.push_back(obj);
  return spec;
}

}  // namespace scenarios

}  // namespace dscv::synthetic
