#include "dscv/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "dscv/config.hpp"
#include "dscv/costvolume.hpp"
#include "dscv/error.hpp"
#include "dscv/fusion.hpp"
#include "dscv/io.hpp"
#include "dscv/metrics.hpp"
#include "dscv/photometric.hpp"
#include "dscv/synthetic.hpp"

namespace dscv::cli {

namespace fs = std::filesystem;
using config::Json;
using config::RunConfig;

namespace {

struct Globals {
  std::optional<int> threads;
  std::uint64_t seed = 1;
  std::string config;
};

[[noreturn]] void invalid(const std::string& message) { throw Error(ErrorCode::InvalidArgument, message); }

void require_input(const std::string& path, const char* flag) {
  if (path.empty()) invalid(std::string(flag) + " is required");
  if (!fs::exists(path)) throw Error(ErrorCode::IoError, std::string(flag) + ": '" + path + "' does not exist");
}

// Input paths are echoed relative to the output's directory so sidecars do
// not depend on where a run happens to live.
std::string relative_to(const fs::path& p, const fs::path& out_dir) {
  if (p.empty()) return {};
  const fs::path abs = fs::absolute(p).lexically_normal();
  const fs::path base = fs::absolute(out_dir.empty() ? fs::path(".") : out_dir).lexically_normal();
  const fs::path rel = abs.lexically_relative(base);
  return (rel.empty() ? abs : rel).generic_string();
}

void relativise_paths(Json& j, const fs::path& out_dir) {
  for (const char* key : {"target", "source", "flow", "camera", "synth", "synth_static", "synth_dynamic",
                          "disparity", "image", "final"}) {
    if (j.contains(key) && j[key].is_string()) j[key] = relative_to(j[key].get<std::string>(), out_dir);
  }
  if (j.contains("scales")) {
    for (auto& s : j["scales"]) s = relative_to(s.get<std::string>(), out_dir);
  }
}

void write_sidecar(const fs::path& output, Json meta) {
  Json doc{{"tool", "dscv"}, {"output", output.filename().generic_string()}};
  doc.update(meta);
  config::write_json(fs::path(output.string() + ".json"), doc);
}

int resolve_threads(const Globals& g, int config_threads) {
  if (g.threads) {
    if (*g.threads < 1) invalid("--threads must be at least 1");
    return *g.threads;
  }
  if (const char* env = std::getenv("DSCV_THREADS"); env && *env) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1 || v > 1024) invalid("DSCV_THREADS must be a positive integer");
    return static_cast<int>(v);
  }
  return config_threads;
}

RunConfig load_config(const Globals& g, const char* command) {
  if (g.config.empty()) invalid(std::string(command) + ": --config is required");
  if (!fs::exists(g.config)) throw Error(ErrorCode::IoError, "--config: '" + g.config + "' does not exist");
  RunConfig cfg = config::load_run_config(g.config);
  cfg.threads = resolve_threads(g, cfg.threads);
  return cfg;
}

void ensure_parent(const fs::path& out) {
  const fs::path parent = out.parent_path();
  if (!parent.empty() && !fs::is_directory(parent)) {
    throw Error(ErrorCode::IoError, "output directory '" + parent.string() + "' does not exist");
  }
}

// synth ---------------------------------------------------------------------

struct SynthArgs {
  std::string spec;
  std::string scenario;
  std::string out;
};

int do_synth(const Globals& g, const SynthArgs& a) {
  if (a.out.empty()) invalid("synth: --out is required");
  if (a.spec.empty() == a.scenario.empty()) invalid("synth: give exactly one of --spec and --scenario");
  synthetic::SceneSpec spec;
  if (!a.spec.empty()) {
    require_input(a.spec, "--spec");
    spec = config::scene_from_json(config::read_json(a.spec));
  } else if (a.scenario == "static_plane") {
    spec = synthetic::scenarios::static_plane(g.seed);
  } else if (a.scenario == "moving_object") {
    spec = synthetic::scenarios::moving_object(g.seed);
  } else {
    invalid("synth: unknown --scenario '" + a.scenario + "' (static_plane|moving_object)");
  }
  const auto pair = synthetic::render_pair(spec, g.seed);

  const fs::path dir = a.out;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw Error(ErrorCode::IoError, "cannot create '" + dir.string() + "'");

  io::write_image_png(dir / "image_t.png", pair.image_t);
  io::write_image_png(dir / "image_src.png", pair.image_src);
  io::write_pfm(dir / "image_t.pfm", pair.image_t);
  io::write_pfm(dir / "image_src.pfm", pair.image_src);
  io::write_pfm(dir / "depth_t.pfm", pair.depth_t);
  io::write_flo(dir / "camera_flow.flo", pair.camera_flow);
  io::write_flo(dir / "residual_flow.flo", pair.residual_flow);
  io::write_flo(dir / "total_flow.flo", pair.total_flow);
  io::write_mask_png(dir / "object_mask.png", pair.object_mask);
  io::write_mask_png(dir / "occlusion_mask.png", pair.occlusion_mask);
  io::write_mask_png(dir / "discontinuity_mask.png", pair.discontinuity_mask);
  config::write_json(dir / "meta.json", Json{{"tool", "dscv"},
                                             {"command", "synth"},
                                             {"seed", g.seed},
                                             {"scenario", a.scenario.empty() ? Json(nullptr) : Json(a.scenario)},
                                             {"intrinsics", config::to_json(pair.intrinsics)},
                                             {"pose", config::to_json(pair.pose)},
                                             {"spec", config::to_json(spec)}});
  return kOk;
}

// costvol -------------------------------------------------------------------

struct CostvolArgs {
  std::string mode;
  std::string flow;
  std::string out;
};

int do_costvol(const Globals& g, const CostvolArgs& a) {
  if (a.mode != "static" && a.mode != "dynamic") invalid("costvol: --mode must be 'static' or 'dynamic'");
  if (a.out.empty()) invalid("costvol: --out is required");
  RunConfig cfg = load_config(g, "costvol");
  if (!a.flow.empty()) cfg.flow = a.flow;
  if (a.mode == "dynamic" && cfg.flow.empty()) {
    invalid("costvol: --flow is required in dynamic mode (or set \"flow\" in the config)");
  }
  if (cfg.target.empty() || cfg.source.empty()) invalid("costvol: config must name \"target\" and \"source\" images");
  cfg.check_inputs_exist();
  cfg.resolve_camera();
  ensure_parent(a.out);

  const ImageGrid target = io::read_image(cfg.target);
  const ImageGrid source = io::read_image(cfg.source);
  const auto hyps = cfg.hypotheses();
  costvolume::CostVolume cv;
  if (a.mode == "static") {
    cv = costvolume::build_static_cv(target, source, *cfg.intrinsics, *cfg.pose, hyps, cfg.loss.alpha_cv, cfg.threads);
  } else {
    const FlowField residual = io::read_flo(cfg.flow);
    cv = costvolume::build_dynamic_cv(target, source, *cfg.intrinsics, *cfg.pose, hyps, residual, cfg.loss.alpha_cv,
                                      cfg.threads);
  }
  io::write_dscv(a.out, cv);

  Json echoed = config::to_json(cfg);
  relativise_paths(echoed, fs::path(a.out).parent_path());
  if (a.mode == "static") echoed["flow"] = nullptr;
  write_sidecar(a.out, {{"command", "costvol"}, {"mode", a.mode}, {"config", echoed}});
  return kOk;
}

// fuse ----------------------------------------------------------------------

struct FuseArgs {
  std::string cv_static, cv_dynamic, occ_s, occ_d, weights, out;
};

int do_fuse(const FuseArgs& a) {
  if (a.out.empty()) invalid("fuse: --out is required");
  require_input(a.cv_static, "--static");
  require_input(a.cv_dynamic, "--dynamic");
  require_input(a.occ_s, "--occ-s");
  require_input(a.occ_d, "--occ-d");
  if (!a.weights.empty()) require_input(a.weights, "--weights");
  ensure_parent(a.out);

  const auto cv_s = io::read_dscv(a.cv_static);
  const auto cv_d = io::read_dscv(a.cv_dynamic);
  const auto occ_s = io::read_mask_png(a.occ_s);
  const auto occ_d = io::read_mask_png(a.occ_d);
  const auto weights = a.weights.empty() ? fusion::FusionWeights::averaging(cv_s.bins()) : io::read_dsfw(a.weights);
  const auto cv_com = fusion::complementary_fuse(cv_s, cv_d, occ_s, occ_d);
  const auto cv_cat = fusion::concat_fuse(cv_s, cv_d, weights);
  const auto fused = fusion::fuse(cv_com, cv_cat);
  io::write_dscv(a.out, fused);

  const fs::path dir = fs::path(a.out).parent_path();
  write_sidecar(a.out, {{"command", "fuse"},
                        {"static", relative_to(a.cv_static, dir)},
                        {"dynamic", relative_to(a.cv_dynamic, dir)},
                        {"occ_s", relative_to(a.occ_s, dir)},
                        {"occ_d", relative_to(a.occ_d, dir)},
                        {"weights", a.weights.empty() ? Json("averaging") : Json(relative_to(a.weights, dir))}});
  return kOk;
}

// depth ---------------------------------------------------------------------

int do_depth(const std::string& cv_path, const std::string& out) {
  if (out.empty()) invalid("depth: --out is required");
  require_input(cv_path, "--cv");
  ensure_parent(out);
  io::write_pfm(out, costvolume::argmin_depth(io::read_dscv(cv_path)));
  write_sidecar(out, {{"command", "depth"}, {"cv", relative_to(cv_path, fs::path(out).parent_path())}});
  return kOk;
}

// occlusion -----------------------------------------------------------------

struct OcclusionArgs {
  std::string depth, flow, out;
  double margin = costvolume::OcclusionParams{}.depth_margin;
};

int do_occlusion(const Globals& g, const OcclusionArgs& a) {
  if (a.out.empty()) invalid("occlusion: --out is required");
  if (!(a.margin >= 0.0)) invalid("occlusion: --margin must be non-negative");
  RunConfig cfg = load_config(g, "occlusion");
  require_input(a.depth, "--depth");
  if (!a.flow.empty()) require_input(a.flow, "--flow");
  cfg.resolve_camera();
  ensure_parent(a.out);

  const ImageGrid depth = io::read_pfm(a.depth);
  std::optional<FlowField> residual;
  if (!a.flow.empty()) residual = io::read_flo(a.flow);
  const auto mask = costvolume::occlusion_mask(*cfg.intrinsics, *cfg.pose, depth, residual ? &*residual : nullptr,
                                               costvolume::OcclusionParams{a.margin});
  io::write_mask_png(a.out, mask);
  const fs::path dir = fs::path(a.out).parent_path();
  write_sidecar(a.out, {{"command", "occlusion"},
                        {"depth", relative_to(a.depth, dir)},
                        {"flow", a.flow.empty() ? Json(nullptr) : Json(relative_to(a.flow, dir))},
                        {"depth_margin", a.margin},
                        {"intrinsics", config::to_json(*cfg.intrinsics)},
                        {"pose", config::to_json(*cfg.pose)}});
  return kOk;
}

// loss ----------------------------------------------------------------------

int do_loss(const Globals& g, const std::string& kind, std::ostream& out) {
  RunConfig cfg = load_config(g, "loss");
  cfg.check_inputs_exist();
  auto need = [](const fs::path& p, const char* key) {
    if (p.empty()) invalid(std::string("loss: config must name \"") + key + "\"");
    return io::read_image(p);
  };
  Json result{{"kind", kind}};
  if (kind == "photometric") {
    const auto target = need(cfg.target, "target");
    const auto synth = need(cfg.synth, "synth");
    result["alpha_photo"] = cfg.loss.alpha_photo;
    result["value"] = photometric::photometric_loss(target, synth, cfg.loss.alpha_photo);
  } else if (kind == "adaptive") {
    const auto target = need(cfg.target, "target");
    const auto s = need(cfg.synth_static, "synth_static");
    const auto d = need(cfg.synth_dynamic, "synth_dynamic");
    result["alpha_photo"] = cfg.loss.alpha_photo;
    result["value"] = photometric::adaptive_photometric_loss(target, s, d, cfg.loss.alpha_photo);
    result["static"] = photometric::photometric_loss(target, s, cfg.loss.alpha_photo);
    result["dynamic"] = photometric::photometric_loss(target, d, cfg.loss.alpha_photo);
  } else if (kind == "smooth") {
    const auto disp = need(cfg.disparity, "disparity");
    const auto image = need(cfg.image, "image");
    result["value"] = photometric::edge_aware_smoothness(disp, image);
  } else if (kind == "pyramid") {
    if (cfg.scales.empty()) invalid("loss: config must list \"scales\"");
    const auto fin = need(cfg.final_depth, "final");
    std::vector<ImageGrid> scales;
    for (const auto& p : cfg.scales) scales.push_back(io::read_image(p));
    result["q"] = cfg.loss.q;
    result["epsilon"] = cfg.loss.epsilon;
    result["n_scales"] = scales.size();
    result["value"] = photometric::pyramid_distillation_loss(scales, fin, cfg.loss.q, cfg.loss.epsilon);
  } else {
    invalid("loss: --kind must be photometric, adaptive, smooth or pyramid");
  }
  out << result.dump(2) << '\n';
  return kOk;
}

// eval ----------------------------------------------------------------------

struct EvalArgs {
  std::string pred, gt, mask, hist;
  bool median_scale = false;
  std::optional<double> min_depth, max_depth;
  int hist_bins = 20;
  double hist_max = 1.0;
};

int do_eval(const Globals& g, const EvalArgs& a, std::ostream& out) {
  metrics::EvalProtocol protocol;
  if (!g.config.empty()) protocol = load_config(g, "eval").protocol;
  require_input(a.pred, "--pred");
  require_input(a.gt, "--gt");
  if (!a.mask.empty()) require_input(a.mask, "--mask");
  if (a.hist_bins < 1) invalid("eval: --hist-bins must be positive");
  if (!(a.hist_max > 0.0)) invalid("eval: --hist-max must be positive");
  if (a.median_scale) protocol.median_scaling = true;
  if (a.min_depth) protocol.min_depth = *a.min_depth;
  if (a.max_depth) protocol.max_depth = *a.max_depth;
  if (!a.mask.empty()) protocol.region_mask = io::read_mask_png(a.mask);
  protocol.validate();
  if (!a.hist.empty()) ensure_parent(a.hist);

  const ImageGrid pred = io::read_pfm(a.pred);
  const ImageGrid gt = io::read_pfm(a.gt);
  const auto report = metrics::evaluate(pred, gt, protocol);
  Json j = config::to_json(report);
  j["protocol"] = config::to_json(protocol);
  j["protocol"]["region_mask"] = !a.mask.empty();
  out << j.dump(2) << '\n';

  if (!a.hist.empty()) {
    const auto h = metrics::error_histogram(pred, gt, protocol, a.hist_bins, 0.0, a.hist_max);
    std::ofstream csv(a.hist, std::ios::trunc);
    if (!csv) throw Error(ErrorCode::IoError, "cannot open '" + a.hist + "' for writing");
    csv << "bin_lo,bin_hi,count\n";
    csv.precision(17);
    for (std::size_t i = 0; i < h.counts.size(); ++i) csv << h.bin_lo(i) << ',' << h.bin_hi(i) << ',' << h.counts[i] << '\n';
    if (!csv) throw Error(ErrorCode::IoError, "short write to '" + a.hist + "'");
  }
  return kOk;
}

// flow-viz ------------------------------------------------------------------

int do_flow_viz(const std::string& flow, const std::string& out, double max_flow) {
  if (out.empty()) invalid("flow-viz: --out is required");
  require_input(flow, "--flow");
  ensure_parent(out);
  io::write_image_png(out, io::flow_to_color(io::read_flo(flow), max_flow));
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Plane-sweep cost volumes for multi-frame depth estimation", "dscv"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--threads", g.threads, "Worker threads (overrides DSCV_THREADS and the config)");
  app.add_option("--seed", g.seed, "Seed for scene generation and rendering")->capture_default_str();
  app.add_option("--config", g.config, "Run configuration (JSON)");

  SynthArgs synth;
  auto* c_synth = app.add_subcommand("synth", "Render a synthetic frame pair with ground truth");
  c_synth->add_option("--spec", synth.spec, "Scene spec (JSON)");
  c_synth->add_option("--scenario", synth.scenario, "Built-in seeded scene: static_plane or moving_object");
  c_synth->add_option("--out", synth.out, "Output directory");

  CostvolArgs costvol;
  auto* c_costvol = app.add_subcommand("costvol", "Build a static or dynamic cost volume");
  c_costvol->add_option("--mode", costvol.mode, "static or dynamic")->required();
  c_costvol->add_option("--flow", costvol.flow, "Residual flow (.flo); required in dynamic mode");
  c_costvol->add_option("--out", costvol.out, "Output .dscv");

  FuseArgs fuse;
  auto* c_fuse = app.add_subcommand("fuse", "Fuse a static and a dynamic volume");
  c_fuse->add_option("--static", fuse.cv_static, "Static volume (.dscv)");
  c_fuse->add_option("--dynamic", fuse.cv_dynamic, "Dynamic volume (.dscv)");
  c_fuse->add_option("--occ-s", fuse.occ_s, "Static-warp occlusion mask (PNG)");
  c_fuse->add_option("--occ-d", fuse.occ_d, "Dynamic-warp occlusion mask (PNG)");
  c_fuse->add_option("--weights", fuse.weights, "Mixing weights (.dsfw); averaging when omitted");
  c_fuse->add_option("--out", fuse.out, "Output .dscv");

  std::string depth_cv, depth_out;
  auto* c_depth = app.add_subcommand("depth", "Argmin depth of a cost volume");
  c_depth->add_option("--cv", depth_cv, "Cost volume (.dscv)");
  c_depth->add_option("--out", depth_out, "Output depth (.pfm)");

  OcclusionArgs occ;
  auto* c_occ = app.add_subcommand("occlusion", "Occlusion mask of the warp driven by a depth map");
  c_occ->add_option("--depth", occ.depth, "Depth used for the warp (.pfm)");
  c_occ->add_option("--flow", occ.flow, "Residual flow (.flo)");
  c_occ->add_option("--margin", occ.margin, "Relative depth margin of the splat test")->capture_default_str();
  c_occ->add_option("--out", occ.out, "Output mask (PNG)");

  std::string loss_kind;
  auto* c_loss = app.add_subcommand("loss", "Evaluate a loss from files and print JSON");
  c_loss->add_option("--kind", loss_kind, "photometric, adaptive, smooth or pyramid")->required();

  EvalArgs eval;
  auto* c_eval = app.add_subcommand("eval", "Depth metrics as JSON");
  c_eval->add_option("--pred", eval.pred, "Predicted depth (.pfm)");
  c_eval->add_option("--gt", eval.gt, "Ground-truth depth (.pfm)");
  c_eval->add_option("--mask", eval.mask, "Region mask (PNG)");
  c_eval->add_flag("--median-scale", eval.median_scale, "Per-image median scaling");
  c_eval->add_option("--min-depth", eval.min_depth, "Evaluation range lower bound");
  c_eval->add_option("--max-depth", eval.max_depth, "Evaluation range upper bound");
  c_eval->add_option("--hist", eval.hist, "Write an AbsRel histogram (CSV)");
  c_eval->add_option("--hist-bins", eval.hist_bins, "Histogram bins")->capture_default_str();
  c_eval->add_option("--hist-max", eval.hist_max, "Histogram upper edge")->capture_default_str();

  std::string viz_flow, viz_out;
  double viz_max = 0.0;
  auto* c_viz = app.add_subcommand("flow-viz", "Colour-wheel rendering of a flow field");
  c_viz->add_option("--flow", viz_flow, "Flow (.flo)");
  c_viz->add_option("--out", viz_out, "Output image (PNG)");
  c_viz->add_option("--max-flow", viz_max, "Magnitude mapped to full saturation; 0 = automatic");

  for (auto* sub : app.get_subcommands([](const CLI::App*) { return true; })) sub->fallthrough();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "dscv: " << e.what() << '\n';
    return kValidationError;
  }

  try {
    if (*c_synth) return do_synth(g, synth);
    if (*c_costvol) return do_costvol(g, costvol);
    if (*c_fuse) return do_fuse(fuse);
    if (*c_depth) return do_depth(depth_cv, depth_out);
    if (*c_occ) return do_occlusion(g, occ);
    if (*c_loss) return do_loss(g, loss_kind, out);
    if (*c_eval) return do_eval(g, eval, out);
    if (*c_viz) return do_flow_viz(viz_flow, viz_out, viz_max);
  } catch (const Error& e) {
    err << "dscv: " << e.what() << '\n';
    return is_io_error(e.code()) ? kIoError : kValidationError;
  } catch (const fs::filesystem_error& e) {
    err << "dscv: " << e.what() << '\n';
    return kIoError;
  } catch (const std::exception& e) {
    err << "dscv: " << e.what() << '\n';
    return kValidationError;
  }
  return kValidationError;
}

int run(const std::vector<std::string>& args) { return run(args, std::cout, std::cerr); }

}  // namespace dscv::cli
