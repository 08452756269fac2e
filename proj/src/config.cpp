#include "dscv/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "dscv/error.hpp"

namespace dscv::config {

namespace fs = std::filesystem;
using geometry::CameraIntrinsics;
using geometry::PoseSE3;

namespace {

[[noreturn]] void invalid(const std::string& message) { throw Error(ErrorCode::InvalidArgument, message); }

void reject_unknown(const Json& j, std::initializer_list<const char*> known, const std::string& where) {
  if (!j.is_object()) invalid(where + " must be a JSON object");
  const std::set<std::string> allowed(known.begin(), known.end());
  for (const auto& item : j.items()) {
    if (!allowed.count(item.key())) invalid("unknown key '" + item.key() + "' in " + where);
  }
}

double number(const Json& j, const char* key, const std::string& where) {
  const Json& v = j.at(key);
  if (!v.is_number()) invalid(where + "." + key + " must be a number");
  return v.get<double>();
}

int integer(const Json& j, const char* key, const std::string& where) {
  const Json& v = j.at(key);
  if (!v.is_number_integer()) invalid(where + "." + key + " must be an integer");
  return v.get<int>();
}

template <typename T>
void maybe(const Json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

Eigen::Vector3d vec3(const Json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3) invalid(where + " must be an array of 3 numbers");
  Eigen::Vector3d v;
  for (int i = 0; i < 3; ++i) {
    if (!j[static_cast<std::size_t>(i)].is_number()) invalid(where + " must be an array of 3 numbers");
    v[i] = j[static_cast<std::size_t>(i)].get<double>();
  }
  return v;
}

Json vec_json(const auto& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Json texture_json(const synthetic::TextureSpec& t) {
  return {{"seed", t.seed},
          {"components", t.components},
          {"min_wavelength", t.min_wavelength},
          {"max_wavelength", t.max_wavelength},
          {"contrast", t.contrast}};
}

synthetic::TextureSpec texture_from(const Json& j) {
  reject_unknown(j, {"seed", "components", "min_wavelength", "max_wavelength", "contrast"}, "texture");
  synthetic::TextureSpec t;
  maybe(j, "seed", t.seed);
  maybe(j, "components", t.components);
  maybe(j, "min_wavelength", t.min_wavelength);
  maybe(j, "max_wavelength", t.max_wavelength);
  maybe(j, "contrast", t.contrast);
  return t;
}

fs::path resolve(const fs::path& base, const Json& j, const char* key) {
  if (!j.contains(key)) return {};
  const Json& v = j.at(key);
  if (!v.is_string()) invalid(std::string(key) + " must be a path string");
  fs::path p = v.get<std::string>();
  return p.is_relative() ? base / p : p;
}

const char* spacing_name(costvolume::Spacing s) {
  switch (s) {
    case costvolume::Spacing::Linear:
      return "linear";
    case costvolume::Spacing::InverseLinear:
      return "inverse";
    case costvolume::Spacing::Explicit:
      return "explicit";
  }
  return "inverse";
}

}  // namespace

Json to_json(const CameraIntrinsics& intr) {
  return {{"fx", intr.fx}, {"fy", intr.fy}, {"cx", intr.cx},
          {"cy", intr.cy}, {"width", intr.width}, {"height", intr.height}};
}

CameraIntrinsics intrinsics_from_json(const Json& j) {
  reject_unknown(j, {"fx", "fy", "cx", "cy", "width", "height"}, "intrinsics");
  try {
    CameraIntrinsics intr{number(j, "fx", "intrinsics"), number(j, "fy", "intrinsics"),
                          number(j, "cx", "intrinsics"), number(j, "cy", "intrinsics"),
                          integer(j, "width", "intrinsics"), integer(j, "height", "intrinsics")};
    intr.validate();
    return intr;
  } catch (const Json::out_of_range& e) {
    invalid(std::string("intrinsics: ") + e.what());
  }
}

Json to_json(const PoseSE3& pose) {
  Json r = Json::array();
  for (int i = 0; i < 3; ++i) {
    for (int k = 0; k < 3; ++k) r.push_back(pose.rotation()(i, k));
  }
  return {{"rotation", r}, {"translation", vec_json(pose.translation())}};
}

PoseSE3 pose_from_json(const Json& j) {
  reject_unknown(j, {"rotation", "translation"}, "pose");
  Eigen::Matrix3d rot = Eigen::Matrix3d::Identity();
  if (j.contains("rotation")) {
    const Json& r = j.at("rotation");
    if (!r.is_array() || r.size() != 9) invalid("pose.rotation must be 9 numbers (row-major)");
    for (int i = 0; i < 9; ++i) {
      if (!r[static_cast<std::size_t>(i)].is_number()) invalid("pose.rotation must be 9 numbers (row-major)");
      rot(i / 3, i % 3) = r[static_cast<std::size_t>(i)].get<double>();
    }
  }
  Eigen::Vector3d t = Eigen::Vector3d::Zero();
  if (j.contains("translation")) t = vec3(j.at("translation"), "pose.translation");
  return {rot, t};
}

Json to_json(const synthetic::SceneSpec& spec) {
  Json objects = Json::array();
  for (const auto& o : spec.objects) {
    objects.push_back({{"center", vec_json(o.center)},
                       {"size", vec_json(o.size)},
                       {"velocity", vec_json(o.velocity)},
                       {"texture", texture_json(o.texture)}});
  }
  return {{"intrinsics", to_json(spec.intrinsics)},
          {"background",
           {{"depth", spec.background.depth},
            {"normal", vec_json(spec.background.normal)},
            {"texture", texture_json(spec.background.texture)}}},
          {"objects", objects},
          {"camera_motion", to_json(spec.camera_motion)},
          {"noise_sigma", spec.noise_sigma}};
}

synthetic::SceneSpec scene_from_json(const Json& j) {
  reject_unknown(j, {"intrinsics", "background", "objects", "camera_motion", "noise_sigma"}, "scene spec");
  synthetic::SceneSpec spec;
  try {
    if (j.contains("intrinsics")) spec.intrinsics = intrinsics_from_json(j.at("intrinsics"));
    if (j.contains("background")) {
      const Json& b = j.at("background");
      reject_unknown(b, {"depth", "normal", "texture"}, "background");
      maybe(b, "depth", spec.background.depth);
      if (b.contains("normal")) spec.background.normal = vec3(b.at("normal"), "background.normal");
      if (b.contains("texture")) spec.background.texture = texture_from(b.at("texture"));
    }
    if (j.contains("objects")) {
      if (!j.at("objects").is_array()) invalid("objects must be an array");
      for (const Json& o : j.at("objects")) {
        reject_unknown(o, {"center", "size", "velocity", "texture"}, "object");
        synthetic::ObjectSpec obj;
        if (o.contains("center")) obj.center = vec3(o.at("center"), "object.center");
        if (o.contains("size")) {
          const Json& s = o.at("size");
          if (!s.is_array() || s.size() != 2) invalid("object.size must be 2 numbers");
          obj.size = Eigen::Vector2d(s[0].get<double>(), s[1].get<double>());
        }
        if (o.contains("velocity")) obj.velocity = vec3(o.at("velocity"), "object.velocity");
        if (o.contains("texture")) obj.texture = texture_from(o.at("texture"));
        spec.objects.push_back(obj);
      }
    }
    if (j.contains("camera_motion")) spec.camera_motion = pose_from_json(j.at("camera_motion"));
    maybe(j, "noise_sigma", spec.noise_sigma);
  } catch (const Json::exception& e) {
    invalid(std::string("scene spec: ") + e.what());
  }
  spec.validate();
  return spec;
}

Json to_json(const metrics::EvalProtocol& protocol) {
  return {{"min_depth", protocol.min_depth},
          {"max_depth", protocol.max_depth},
          {"median_scaling", protocol.median_scaling}};
}

Json to_json(const metrics::DepthEvalReport& r) {
  return {{"abs_rel", r.abs_rel}, {"sq_rel", r.sq_rel}, {"rmse", r.rmse},     {"rmse_log", r.rmse_log},
          {"delta1", r.delta1},   {"delta2", r.delta2}, {"delta3", r.delta3}, {"n_valid", r.n_valid},
          {"scale", r.scale}};
}

void RunConfig::validate() const {
  loss.validate();
  protocol.validate();
  if (n < 2) throw Error(ErrorCode::InvalidRange, "n must be at least 2");
  if (!(d_min > 0.0) || !(d_max > d_min) || !std::isfinite(d_max)) {
    throw Error(ErrorCode::InvalidRange, "need 0 < d_min < d_max");
  }
  if (spacing == costvolume::Spacing::Explicit) invalid("spacing must be 'linear' or 'inverse'");
  if (threads < 1) invalid("threads must be at least 1");
}

void RunConfig::check_inputs_exist() const {
  std::vector<fs::path> inputs{target, source, flow, camera, synth, synth_static, synth_dynamic,
                               disparity, image, final_depth};
  inputs.insert(inputs.end(), scales.begin(), scales.end());
  for (const auto& p : inputs) {
    if (!p.empty() && !fs::exists(p)) throw Error(ErrorCode::IoError, "input '" + p.string() + "' does not exist");
  }
}

void RunConfig::resolve_camera() {
  if ((!intrinsics || !pose) && !camera.empty()) {
    const Json j = read_json(camera);
    if (!intrinsics && j.contains("intrinsics")) intrinsics = intrinsics_from_json(j.at("intrinsics"));
    if (!pose && j.contains("pose")) pose = pose_from_json(j.at("pose"));
  }
  if (!intrinsics) invalid("config provides no intrinsics (set 'intrinsics' or 'camera')");
  if (!pose) invalid("config provides no pose (set 'pose' or 'camera')");
}

costvolume::DepthHypothesisSet RunConfig::hypotheses() const {
  return costvolume::make_hypotheses(d_min, d_max, n, spacing);
}

Json to_json(const RunConfig& c) {
  auto path = [](const fs::path& p) { return p.empty() ? Json(nullptr) : Json(p.generic_string()); };
  Json scales = Json::array();
  for (const auto& s : c.scales) scales.push_back(s.generic_string());
  return {{"target", path(c.target)},
          {"source", path(c.source)},
          {"flow", path(c.flow)},
          {"camera", path(c.camera)},
          {"intrinsics", c.intrinsics ? to_json(*c.intrinsics) : Json(nullptr)},
          {"pose", c.pose ? to_json(*c.pose) : Json(nullptr)},
          {"synth", path(c.synth)},
          {"synth_static", path(c.synth_static)},
          {"synth_dynamic", path(c.synth_dynamic)},
          {"disparity", path(c.disparity)},
          {"image", path(c.image)},
          {"scales", scales},
          {"final", path(c.final_depth)},
          {"d_min", c.d_min},
          {"d_max", c.d_max},
          {"n", c.n},
          {"spacing", spacing_name(c.spacing)},
          {"alpha_cv", c.loss.alpha_cv},
          {"alpha_photo", c.loss.alpha_photo},
          {"q", c.loss.q},
          {"epsilon", c.loss.epsilon},
          {"protocol", to_json(c.protocol)}};
}

RunConfig run_config_from_json(const Json& j, const fs::path& base_dir) {
  reject_unknown(j,
                 {"target", "source", "flow", "camera", "intrinsics", "pose", "synth", "synth_static",
                  "synth_dynamic", "disparity", "image", "scales", "final", "d_min", "d_max", "n", "spacing",
                  "alpha_cv", "alpha_photo", "q", "epsilon", "protocol", "threads"},
                 "run config");
  RunConfig c;
  try {
    c.target = resolve(base_dir, j, "target");
    c.source = resolve(base_dir, j, "source");
    c.flow = resolve(base_dir, j, "flow");
    c.camera = resolve(base_dir, j, "camera");
    if (j.contains("intrinsics") && !j.at("intrinsics").is_null()) c.intrinsics = intrinsics_from_json(j.at("intrinsics"));
    if (j.contains("pose") && !j.at("pose").is_null()) c.pose = pose_from_json(j.at("pose"));
    c.synth = resolve(base_dir, j, "synth");
    c.synth_static = resolve(base_dir, j, "synth_static");
    c.synth_dynamic = resolve(base_dir, j, "synth_dynamic");
    c.disparity = resolve(base_dir, j, "disparity");
    c.image = resolve(base_dir, j, "image");
    c.final_depth = resolve(base_dir, j, "final");
    if (j.contains("scales")) {
      if (!j.at("scales").is_array()) invalid("scales must be an array of paths");
      for (const Json& s : j.at("scales")) {
        fs::path p = s.get<std::string>();
        c.scales.push_back(p.is_relative() ? base_dir / p : p);
      }
    }
    maybe(j, "d_min", c.d_min);
    maybe(j, "d_max", c.d_max);
    if (j.contains("n")) c.n = integer(j, "n", "run config");
    if (j.contains("spacing")) {
      const std::string s = j.at("spacing").get<std::string>();
      if (s == "linear") {
        c.spacing = costvolume::Spacing::Linear;
      } else if (s == "inverse") {
        c.spacing = costvolume::Spacing::InverseLinear;
      } else {
        invalid("spacing must be 'linear' or 'inverse', got '" + s + "'");
      }
    }
    maybe(j, "alpha_cv", c.loss.alpha_cv);
    maybe(j, "alpha_photo", c.loss.alpha_photo);
    maybe(j, "q", c.loss.q);
    maybe(j, "epsilon", c.loss.epsilon);
    if (j.contains("protocol")) {
      const Json& p = j.at("protocol");
      reject_unknown(p, {"min_depth", "max_depth", "median_scaling"}, "protocol");
      maybe(p, "min_depth", c.protocol.min_depth);
      maybe(p, "max_depth", c.protocol.max_depth);
      maybe(p, "median_scaling", c.protocol.median_scaling);
    }
    if (j.contains("threads")) c.threads = integer(j, "threads", "run config");
  } catch (const Json::exception& e) {
    invalid(std::string("run config: ") + e.what());
  }
  c.validate();
  return c;
}

Json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::IoError, "'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

void write_json(const fs::path& path, const Json& j) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "' for writing");
  out << j.dump(2) << '\n';
  if (!out) throw Error(ErrorCode::IoError, "short write to '" + path.string() + "'");
}

RunConfig load_run_config(const fs::path& path) {
  return run_config_from_json(read_json(path), path.parent_path());
}

}  // namespace dscv::config
