// Command-line front door: scene generation, per-pixel eta optimization,
// self-distillation, gradient audits and metric evaluation, all through the
// PFM/PGM/JSON/CSV formats. Every run with a fixed --seed is byte-
// reproducible; a config echo lands next to every output for provenance.

#include "probdepth/formats.hpp"
#include "probdepth/metrics.hpp"
#include "probdepth/optimize.hpp"
#include "probdepth/rng.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace probdepth;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitValidation = 2;

void write_text(const fs::path& path, const std::string& body) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path.string() + ": unwritable path");
    out << body;
}

void write_config_echo(const fs::path& dir, const ordered_json& echo) {
    write_text(dir / "config.json", echo.dump(2) + "\n");
}

// ---------------------------------------------------------------- gen

struct GenFlags {
    std::string out;
    SceneSpec spec;
    std::string texture = "random-smooth";
    std::string profile = "fronto";
};

TextureKind texture_from_string(const std::string& s) {
    if (s == "checker") return TextureKind::checker;
    if (s == "random-smooth") return TextureKind::random_smooth;
    if (s == "constant") return TextureKind::constant;
    if (s == "mixed") return TextureKind::mixed;
    throw CLI::ValidationError("--texture", "unknown texture '" + s + "'");
}

DepthProfileKind profile_from_string(const std::string& s) {
    if (s == "fronto") return DepthProfileKind::fronto_parallel;
    if (s == "slanted") return DepthProfileKind::slanted_plane;
    if (s == "two-layer") return DepthProfileKind::two_layer;
    throw CLI::ValidationError("--profile", "unknown profile '" + s + "'");
}

ordered_json scene_spec_echo(const SceneSpec& spec, const std::string& texture,
                             const std::string& profile) {
    ordered_json j;
    j["width"] = spec.width;
    j["height"] = spec.height;
    j["texture"] = texture;
    j["profile"] = profile;
    j["depth"] = spec.depth;
    j["slant_gx"] = spec.slant_gx;
    j["slant_gy"] = spec.slant_gy;
    j["depth_near"] = spec.depth_near;
    j["depth_far"] = spec.depth_far;
    j["occ_x0"] = spec.occluder.x0;
    j["occ_y0"] = spec.occluder.y0;
    j["occ_w"] = spec.occluder.w;
    j["occ_h"] = spec.occluder.h;
    j["baseline"] = spec.baseline;
    j["focal"] = spec.focal;
    j["noise_std"] = spec.noise_std;
    j["seed"] = spec.seed;
    return j;
}

int run_gen(const GenFlags& flags) {
    SceneSpec spec = flags.spec;
    spec.texture = texture_from_string(flags.texture);
    spec.profile = profile_from_string(flags.profile);
    const Scene scene = gen_scene(spec);

    fs::create_directories(flags.out);
    const fs::path dir(flags.out);
    write_pfm((dir / "i_t.pfm").string(), pfm_from_image(scene.i_t));
    write_pfm((dir / "i_s.pfm").string(), pfm_from_image(scene.i_s));
    write_pfm((dir / "d_star.pfm").string(), pfm_from_depth(scene.d_star));
    write_pgm_mask((dir / "occlusion.pgm").string(), scene.occlusion);

    ordered_json echo = scene_spec_echo(spec, flags.texture, flags.profile);
    echo["fx"] = scene.rig.intrinsics.fx;
    echo["fy"] = scene.rig.intrinsics.fy;
    echo["cx"] = scene.rig.intrinsics.cx;
    echo["cy"] = scene.rig.intrinsics.cy;
    write_text(dir / "scene.json", echo.dump(2) + "\n");
    write_config_echo(dir, echo);
    return kExitOk;
}

// ---------------------------------------------------------------- scene IO

Scene load_scene(const std::string& dir_in) {
    const fs::path dir(dir_in);
    std::ifstream meta_in(dir / "scene.json");
    if (!meta_in) throw std::runtime_error((dir / "scene.json").string() + ": cannot open");
    const auto meta = nlohmann::json::parse(meta_in);

    Scene scene;
    scene.i_t = image_from_pfm(read_pfm((dir / "i_t.pfm").string())).image;
    scene.i_s = image_from_pfm(read_pfm((dir / "i_s.pfm").string())).image;
    const auto d = depth_from_pfm(read_pfm((dir / "d_star.pfm").string()));
    scene.d_star = d.depth;
    scene.occlusion = read_pgm_mask((dir / "occlusion.pgm").string());
    scene.rig.intrinsics = {meta.at("fx").get<double>(), meta.at("fy").get<double>(),
                            meta.at("cx").get<double>(), meta.at("cy").get<double>()};
    scene.rig.pose = RigidPose::translate(-meta.at("baseline").get<double>(), 0.0, 0.0);
    scene.rig.validate();
    return scene;
}

// ---------------------------------------------------------------- optimize

struct OptimizeFlags {
    std::string scene_dir, out;
    OptimizeConfig cfg;
    std::string family = "gauss";
    std::string loss = "l1";
    std::string mode = "alpha";
    std::string mask_policy = "and";
};

ErrorMode loss_from_string(const std::string& s) {
    if (s == "l1") return ErrorMode::l1;
    if (s == "ssim") return ErrorMode::ssim_l1;
    throw CLI::ValidationError("--loss", "unknown loss '" + s + "'");
}

MaskPolicy policy_from_string(const std::string& s) {
    if (s == "and") return MaskPolicy::all_in_bounds;
    if (s == "renorm") return MaskPolicy::renormalize;
    throw CLI::ValidationError("--mask-policy", "unknown policy '" + s + "'");
}

ordered_json frame_scores_json(const Scene& scene, const EtaMap& eta) {
    EvalFrame frame;
    frame.d_hat = DepthMap(eta.width, eta.height);
    frame.d_star = scene.d_star;
    frame.uncertainty.resize(eta.size());
    frame.mask = ValidMask(eta.width, eta.height, 1);
    for (std::size_t i = 0; i < eta.size(); ++i) {
        frame.d_hat.data[i] = eta.mu[i];
        frame.uncertainty[i] = eta.sigma_at(i);
        if (scene.occlusion.data[i]) frame.mask.data[i] = 0; // score visible pixels
    }
    const DepthMetrics m = depth_metrics(frame);
    const AbsoluteUncertainty u = aru_rmsu(frame);
    ordered_json j;
    j["abs_rel"] = m.abs_rel;
    j["rmse"] = m.rmse;
    j["delta1"] = m.delta1;
    j["aru"] = u.aru;
    j["rmsu"] = u.rmsu;
    return j;
}

int run_optimize(const OptimizeFlags& flags) {
    OptimizeConfig cfg = flags.cfg;
    cfg.family = family_from_string(flags.family);
    cfg.loss_mode = loss_from_string(flags.loss);
    cfg.mask_policy = policy_from_string(flags.mask_policy);
    if (flags.mode == "alpha")
        cfg.mode = SpreadMode::alpha;
    else if (flags.mode == "sigma")
        cfg.mode = SpreadMode::direct_sigma;
    else
        throw CLI::ValidationError("--mode", "unknown mode '" + flags.mode + "'");
    cfg.validate();

    const Scene scene = load_scene(flags.scene_dir);
    const OptimizeTrace trace = optimize_eta(scene, cfg);

    fs::create_directories(flags.out);
    const fs::path dir(flags.out);
    const EtaMap& eta = trace.final_eta;
    DepthMap mu(eta.width, eta.height), sigma(eta.width, eta.height);
    DepthMap spread(eta.width, eta.height);
    for (std::size_t i = 0; i < eta.size(); ++i) {
        mu.data[i] = eta.mu[i];
        spread.data[i] = eta.spread[i];
        sigma.data[i] = eta.sigma_at(i);
    }
    write_pfm((dir / "mu.pfm").string(), pfm_from_depth(mu));
    write_pfm((dir / (cfg.mode == SpreadMode::alpha ? "alpha.pfm" : "sigma_raw.pfm")).string(),
              pfm_from_depth(spread));
    write_pfm((dir / "sigma.pfm").string(), pfm_from_depth(sigma));
    write_trace_csv((dir / "trace.csv").string(), trace.loss, trace.grad_norm);
    write_text(dir / "final_metrics.json", frame_scores_json(scene, eta).dump(2) + "\n");

    ordered_json echo;
    echo["scene"] = flags.scene_dir;
    echo["steps"] = cfg.steps;
    echo["lr_mu"] = cfg.lr_mu;
    echo["lr_spread"] = cfg.lr_spread;
    echo["momentum"] = cfg.momentum;
    echo["init_mu"] = cfg.init_mu;
    echo["init_spread"] = cfg.init_spread;
    echo["n"] = cfg.n_samples;
    echo["family"] = flags.family;
    echo["loss"] = flags.loss;
    echo["mode"] = flags.mode;
    echo["mask_policy"] = flags.mask_policy;
    write_config_echo(dir, echo);
    std::cout << "final loss " << trace.loss.back() << ", scores in "
              << (dir / "final_metrics.json").string() << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------- distill

struct DistillFlags {
    std::string teacher_dir, out;
    DistillConfig cfg;
    std::string loss = "kl";
};

EtaMap load_teacher(const std::string& dir_in) {
    const fs::path dir(dir_in);
    const auto mu = depth_from_pfm(read_pfm((dir / "mu.pfm").string()));
    const auto sigma = depth_from_pfm(read_pfm((dir / "sigma.pfm").string()));
    EtaMap teacher(mu.depth.width, mu.depth.height, 1.0, 0.0, Family::gaussian,
                   SpreadMode::direct_sigma);
    for (std::size_t i = 0; i < teacher.size(); ++i) {
        teacher.mu[i] = mu.depth.data[i];
        teacher.spread[i] = sigma.depth.data[i];
    }
    teacher.validate();
    return teacher;
}

int run_distill(const DistillFlags& flags) {
    DistillConfig cfg = flags.cfg;
    if (flags.loss == "kl")
        cfg.mode = DistillMode::kl;
    else if (flags.loss == "nll")
        cfg.mode = DistillMode::nll;
    else
        throw CLI::ValidationError("--loss", "unknown distillation loss '" + flags.loss + "'");
    cfg.validate();

    const EtaMap teacher = load_teacher(flags.teacher_dir);
    const OptimizeTrace trace = distill_eta(teacher, cfg);

    fs::create_directories(flags.out);
    const fs::path dir(flags.out);
    DepthMap mu(teacher.width, teacher.height), sigma(teacher.width, teacher.height);
    for (std::size_t i = 0; i < teacher.size(); ++i) {
        mu.data[i] = trace.final_eta.mu[i];
        sigma.data[i] = trace.final_eta.spread[i];
    }
    write_pfm((dir / "mu.pfm").string(), pfm_from_depth(mu));
    write_pfm((dir / "sigma.pfm").string(), pfm_from_depth(sigma));
    write_trace_csv((dir / "trace.csv").string(), trace.loss, trace.grad_norm);

    ordered_json echo;
    echo["teacher"] = flags.teacher_dir;
    echo["loss"] = flags.loss;
    echo["steps"] = cfg.steps;
    echo["lr_mu"] = cfg.lr_mu;
    echo["lr_log_sigma"] = cfg.lr_log_sigma;
    echo["momentum"] = cfg.momentum;
    echo["sigma_floor"] = cfg.sigma_floor;
    echo["freeze_mu"] = cfg.freeze_mu;
    echo["seed"] = cfg.seed;
    write_config_echo(dir, echo);
    std::cout << "final loss " << trace.loss.back() << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------- eval

struct EvalFlags {
    std::vector<std::string> frames;
    std::string out;
    bool apply_median_scale = false;
};

EvalFrame load_frame(const std::string& dir_in) {
    const fs::path dir(dir_in);
    EvalFrame frame;
    const auto hat = depth_from_pfm(read_pfm((dir / "d_hat.pfm").string()));
    const auto star = depth_from_pfm(read_pfm((dir / "d_star.pfm").string()));
    const auto unc = read_pfm((dir / "u.pfm").string());
    frame.d_hat = hat.depth;
    frame.d_star = star.depth;
    frame.uncertainty.resize(frame.d_hat.data.size());
    if (unc.channels != 1 || unc.width != frame.d_hat.width ||
        unc.height != frame.d_hat.height)
        throw std::runtime_error(dir_in + ": u.pfm does not match d_hat.pfm");
    for (std::size_t i = 0; i < frame.uncertainty.size(); ++i) {
        const float v = unc.data[i];
        frame.uncertainty[i] = std::isnan(v) ? 0.0 : v;
    }
    // mask: GT validity, intersected with a PGM mask when present
    frame.mask = star.valid;
    if (fs::exists(dir / "mask.pgm"))
        frame.mask = mask_and(frame.mask, read_pgm_mask((dir / "mask.pgm").string()));
    return frame;
}

int run_eval(const EvalFlags& flags) {
    fs::create_directories(flags.out);
    const fs::path dir(flags.out);

    std::vector<FrameMetrics> all;
    for (std::size_t idx = 0; idx < flags.frames.size(); ++idx) {
        EvalFrame frame = load_frame(flags.frames[idx]);
        if (flags.apply_median_scale) median_scale(frame);
        all.push_back(evaluate_frame(frame));
        for (BaseMetric m : {BaseMetric::abs_rel, BaseMetric::rmse, BaseMetric::delta1}) {
            const auto s = sparsification(frame, m);
            write_curve_csv((dir / ("curve_" + std::to_string(idx) + "_" +
                                    base_metric_name(m) + ".csv"))
                                .string(),
                            s.curve);
        }
    }
    const MetricReport report = aggregate_frames(all);
    write_report((dir / "report.json").string(), report);

    ordered_json echo;
    echo["frames"] = flags.frames;
    echo["median_scale"] = flags.apply_median_scale;
    write_config_echo(dir, echo);
    std::cout << report_to_json(report);
    return kExitOk;
}

// ---------------------------------------------------------------- gradcheck

struct GradcheckFlags {
    std::string scene_dir;
    std::string out;
    OptimizeConfig cfg;
    std::string family = "gauss";
    std::string loss = "l1";
    double step_rel = 1e-4;
    int coords = 200;
    std::uint64_t seed = 0;
    double max_median_rel = 1e-5;
};

int run_gradcheck(const GradcheckFlags& flags) {
    OptimizeConfig cfg = flags.cfg;
    cfg.family = family_from_string(flags.family);
    cfg.loss_mode = loss_from_string(flags.loss);

    const Scene scene = load_scene(flags.scene_dir);
    Rng rng(flags.seed);
    EtaMap eta(scene.i_t.width, scene.i_t.height, 1.0, 0.0, cfg.family, cfg.mode);
    for (std::size_t i = 0; i < eta.size(); ++i) {
        eta.mu[i] = scene.d_star.data[i] * rng.uniform(0.8, 1.3);
        eta.spread[i] = rng.uniform(0.05, 0.3);
    }

    const GradCheckReport report =
        finite_diff_check(scene, eta, flags.step_rel, cfg, flags.coords, flags.seed);

    ordered_json j;
    j["coords"] = static_cast<int>(report.entries.size());
    j["median_rel"] = report.median_rel;
    j["max_rel"] = report.max_rel;
    j["median_rel_off_lattice"] = report.median_rel_off_lattice;
    j["max_rel_off_lattice"] = report.max_rel_off_lattice;
    j["lattice_crossings"] = static_cast<int>(report.n_lattice);
    j["bound"] = flags.max_median_rel;
    const std::string body = j.dump(2) + "\n";
    std::cout << body;
    if (!flags.out.empty()) {
        fs::create_directories(fs::path(flags.out).parent_path().empty()
                                   ? "."
                                   : fs::path(flags.out).parent_path().string());
        write_text(flags.out, body);
    }
    if (report.median_rel > flags.max_median_rel) {
        std::cerr << "gradcheck: median relative error " << report.median_rel
                  << " exceeds bound " << flags.max_median_rel << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"probdepth: probabilistic depth reconstruction laboratory"};
    app.require_subcommand(1);

    GenFlags gen;
    auto* cmd_gen = app.add_subcommand("gen", "generate a synthetic stereo scene");
    cmd_gen->add_option("--out", gen.out, "output directory")->required();
    cmd_gen->add_option("--width", gen.spec.width, "image width, pixels [artifact choice]");
    cmd_gen->add_option("--height", gen.spec.height, "image height, pixels [artifact choice]");
    cmd_gen->add_option("--texture", gen.texture,
                        "checker|random-smooth|constant|mixed [artifact choice]");
    cmd_gen->add_option("--profile", gen.profile,
                        "fronto|slanted|two-layer [artifact choice]");
    cmd_gen->add_option("--depth", gen.spec.depth, "plane depth, meters")
        ->check(CLI::PositiveNumber);
    cmd_gen->add_option("--slant-gx", gen.spec.slant_gx, "slanted plane: meters per pixel in x");
    cmd_gen->add_option("--slant-gy", gen.spec.slant_gy, "slanted plane: meters per pixel in y");
    cmd_gen->add_option("--depth-near", gen.spec.depth_near, "two-layer: occluder depth, meters")
        ->check(CLI::PositiveNumber);
    cmd_gen->add_option("--depth-far", gen.spec.depth_far, "two-layer: background depth, meters")
        ->check(CLI::PositiveNumber);
    cmd_gen->add_option("--occ-x0", gen.spec.occluder.x0, "occluder rect origin x, pixels");
    cmd_gen->add_option("--occ-y0", gen.spec.occluder.y0, "occluder rect origin y, pixels");
    cmd_gen->add_option("--occ-w", gen.spec.occluder.w, "occluder rect width, pixels");
    cmd_gen->add_option("--occ-h", gen.spec.occluder.h, "occluder rect height, pixels");
    cmd_gen->add_option("--baseline", gen.spec.baseline, "stereo baseline, meters")
        ->check(CLI::PositiveNumber);
    cmd_gen->add_option("--focal", gen.spec.focal, "focal length, pixels")
        ->check(CLI::PositiveNumber);
    cmd_gen->add_option("--noise-std", gen.spec.noise_std,
                        "photometric noise STD in [0,1] units [artifact choice]");
    cmd_gen->add_option("--seed", gen.spec.seed, "PRNG seed (mt19937_64 stream)");

    OptimizeFlags opt;
    auto* cmd_opt = app.add_subcommand(
        "optimize", "fit per-pixel depth-distribution parameters on a scene");
    cmd_opt->add_option("--scene", opt.scene_dir, "scene directory from gen")->required();
    cmd_opt->add_option("--out", opt.out, "output directory")->required();
    cmd_opt->add_option("--steps", opt.cfg.steps, "gradient steps [artifact choice]")
        ->check(CLI::PositiveNumber);
    cmd_opt->add_option("--lr-mu", opt.cfg.lr_mu, "learning rate for mu [artifact choice]")
        ->check(CLI::PositiveNumber);
    cmd_opt->add_option("--lr-spread", opt.cfg.lr_spread,
                        "learning rate for alpha (or sigma in --mode sigma) [artifact choice]");
    cmd_opt->add_option("--momentum", opt.cfg.momentum, "momentum [artifact choice]");
    cmd_opt->add_option("--init-mu", opt.cfg.init_mu, "initial mu, meters [artifact choice]")
        ->check(CLI::PositiveNumber);
    cmd_opt->add_option("--init-spread", opt.cfg.init_spread,
                        "initial alpha (or sigma, meters) [artifact choice]");
    cmd_opt->add_option("--n", opt.cfg.n_samples, "sample count, odd (paper default 9)");
    cmd_opt->add_option("--family", opt.family, "gauss|laplace (paper default gauss)");
    cmd_opt->add_option("--loss", opt.loss, "l1|ssim [artifact choice]");
    cmd_opt->add_option("--mode", opt.mode,
                        "alpha|sigma: spread parameterization (paper default alpha)");
    cmd_opt->add_option("--mask-policy", opt.mask_policy,
                        "and|renorm: out-of-bounds sample handling [artifact choice]");

    DistillFlags dis;
    auto* cmd_dis = app.add_subcommand("distill", "fit a student to a frozen teacher");
    cmd_dis->add_option("--teacher", dis.teacher_dir, "teacher directory (mu.pfm, sigma.pfm)")
        ->required();
    cmd_dis->add_option("--out", dis.out, "output directory")->required();
    cmd_dis->add_option("--loss", dis.loss, "kl|nll (paper default kl)");
    cmd_dis->add_option("--steps", dis.cfg.steps, "gradient steps [artifact choice]")
        ->check(CLI::PositiveNumber);
    cmd_dis->add_option("--lr-mu", dis.cfg.lr_mu, "learning rate for mu_s [artifact choice]");
    cmd_dis->add_option("--lr-log-sigma", dis.cfg.lr_log_sigma,
                        "learning rate for log sigma_s [artifact choice]");
    cmd_dis->add_option("--momentum", dis.cfg.momentum, "momentum [artifact choice]");
    cmd_dis->add_option("--sigma-floor", dis.cfg.sigma_floor,
                        "lower bound on sigma_s, meters [artifact choice]")
        ->check(CLI::PositiveNumber);
    cmd_dis->add_option("--seed", dis.cfg.seed, "student init seed");
    cmd_dis->add_flag("--freeze-mu", dis.cfg.freeze_mu, "optimize sigma only");

    EvalFlags ev;
    auto* cmd_eval = app.add_subcommand(
        "eval", "score prediction directories (d_hat.pfm, u.pfm, d_star.pfm[, mask.pgm])");
    cmd_eval->add_option("--frames", ev.frames, "one or more frame directories")
        ->required()
        ->expected(-1);
    cmd_eval->add_option("--out", ev.out, "output directory")->required();
    cmd_eval->add_flag("--median-scale", ev.apply_median_scale,
                       "per-frame median scaling before scoring [artifact choice]");

    GradcheckFlags gc;
    auto* cmd_gc = app.add_subcommand("gradcheck",
                                      "audit the loss gradient with finite differences");
    cmd_gc->add_option("--scene", gc.scene_dir, "scene directory from gen")->required();
    cmd_gc->add_option("--out", gc.out, "optional JSON report path");
    cmd_gc->add_option("--n", gc.cfg.n_samples, "sample count, odd (paper default 9)");
    cmd_gc->add_option("--family", gc.family, "gauss|laplace (paper default gauss)");
    cmd_gc->add_option("--loss", gc.loss, "l1|ssim [artifact choice]");
    cmd_gc->add_option("--step-rel", gc.step_rel, "relative step in [1e-6, 1e-2]");
    cmd_gc->add_option("--coords", gc.coords, "number of probed coordinates")
        ->check(CLI::PositiveNumber);
    cmd_gc->add_option("--seed", gc.seed, "probe seed");
    cmd_gc->add_option("--max-median-rel", gc.max_median_rel,
                       "failure bound on the median relative error");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        std::cerr << e.what() << "\n";
        return kExitValidation;
    }

    try {
        if (*cmd_gen) return run_gen(gen);
        if (*cmd_opt) return run_optimize(opt);
        if (*cmd_dis) return run_distill(dis);
        if (*cmd_eval) return run_eval(ev);
        if (*cmd_gc) return run_gradcheck(gc);
    } catch (const CLI::ValidationError& e) {
        std::cerr << e.what() << "\n";
        return kExitValidation;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid configuration: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::domain_error& e) {
        std::cerr << "invalid configuration: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitValidation;
}
