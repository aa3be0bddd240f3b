#include "probdepth/optimize.hpp"

#include "probdepth/distill.hpp"
#include "probdepth/rng.hpp"

#include <algorithm>
#include <cmath>

namespace probdepth {

namespace {

constexpr double kDivergeLoss = 1e6;

PhotometricConfig photo_config(ErrorMode mode) {
    PhotometricConfig cfg;
    cfg.mode = mode;
    return cfg;
}

double scaled_norm(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (double v : a) s += v * v;
    for (double v : b) s += v * v;
    return std::sqrt(s);
}

} // namespace

void OptimizeConfig::validate() const {
    if (steps <= 0) throw std::invalid_argument("OptimizeConfig: steps must be > 0");
    if (!(lr_mu > 0.0) || !(lr_spread >= 0.0))
        throw std::invalid_argument("OptimizeConfig: learning rates must be positive");
    if (momentum < 0.0 || momentum >= 1.0)
        throw std::invalid_argument("OptimizeConfig: momentum must be in [0,1)");
    if (!(init_mu > kDepthFloor))
        throw std::invalid_argument("OptimizeConfig: init_mu must exceed the depth floor");
    if (init_spread < 0.0 || (mode == SpreadMode::alpha && init_spread > 1.0))
        throw std::invalid_argument("OptimizeConfig: init_spread out of range");
    if (n_samples < 1 || n_samples % 2 == 0)
        throw std::invalid_argument("OptimizeConfig: n_samples must be odd and >= 1");
}

OptimizeTrace optimize_eta(const Scene& scene, const OptimizeConfig& cfg) {
    cfg.validate();
    const SampleSet set = make_sample_set(cfg.n_samples, cfg.family);
    const PhotometricConfig photo = photo_config(cfg.loss_mode);

    EtaMap eta(scene.i_t.width, scene.i_t.height, cfg.init_mu, cfg.init_spread,
               cfg.family, cfg.mode);

    OptimizeTrace trace;
    trace.loss.reserve(cfg.steps);
    trace.grad_norm.reserve(cfg.steps);

    std::vector<double> v_mu(eta.size(), 0.0), v_spread(eta.size(), 0.0);
    const int drop_step = (cfg.steps * 3) / 4;

    for (int step = 0; step < cfg.steps; ++step) {
        ReconsLossGrad lg =
            recons_loss_with_grad(eta, scene.i_t, scene.i_s, scene.rig.intrinsics,
                                  scene.rig.pose, set, photo, cfg.mask_policy);
        if (!std::isfinite(lg.loss.value) || lg.loss.value > kDivergeLoss)
            throw DivergedError(step, "optimize_eta: loss diverged");

        // per-pixel scaling: undo the 1/N of the mean loss
        const double n_valid = static_cast<double>(lg.loss.mask.count());
        for (double& g : lg.grad.d_mu) g *= n_valid;
        for (double& g : lg.grad.d_spread) g *= n_valid;

        trace.loss.push_back(lg.loss.value);
        trace.grad_norm.push_back(scaled_norm(lg.grad.d_mu, lg.grad.d_spread));

        const double decay = step >= drop_step ? 0.5 : 1.0;
        const double lr_m = cfg.lr_mu * decay;
        const double lr_s = cfg.lr_spread * decay;
        for (std::size_t i = 0; i < eta.size(); ++i) {
            v_mu[i] = cfg.momentum * v_mu[i] + lg.grad.d_mu[i];
            v_spread[i] = cfg.momentum * v_spread[i] + lg.grad.d_spread[i];
            eta.mu[i] = std::max(eta.mu[i] - lr_m * v_mu[i], kDepthFloor);
            double s = eta.spread[i] - lr_s * v_spread[i];
            s = std::max(s, 0.0);
            if (cfg.mode == SpreadMode::alpha) s = std::min(s, 1.0);
            eta.spread[i] = s;
        }
    }
    trace.final_eta = std::move(eta);
    return trace;
}

void DistillConfig::validate() const {
    if (steps <= 0) throw std::invalid_argument("DistillConfig: steps must be > 0");
    if (!(lr_mu >= 0.0) || !(lr_log_sigma > 0.0))
        throw std::invalid_argument("DistillConfig: learning rates must be positive");
    if (momentum < 0.0 || momentum >= 1.0)
        throw std::invalid_argument("DistillConfig: momentum must be in [0,1)");
    if (!(sigma_floor > 0.0))
        throw std::invalid_argument("DistillConfig: sigma_floor must be > 0");
}

OptimizeTrace distill_eta(const EtaMap& teacher, const DistillConfig& cfg) {
    cfg.validate();
    teacher.validate();
    const std::size_t n = teacher.size();

    GaussianPair pair;
    pair.width = teacher.width;
    pair.height = teacher.height;
    pair.mu_t.resize(n);
    pair.sigma_t.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        pair.mu_t[i] = teacher.mu[i];
        pair.sigma_t[i] = teacher.sigma_at(i);
        if (!(pair.sigma_t[i] > 0.0))
            throw std::domain_error("distill_eta: teacher sigma must be > 0");
    }

    // random student init around the teacher scale
    Rng rng(cfg.seed);
    pair.mu_s.resize(n);
    std::vector<double> rho(n); // log sigma_s
    const double rho_floor = std::log(cfg.sigma_floor);
    for (std::size_t i = 0; i < n; ++i) {
        if (cfg.init_at_teacher) {
            pair.mu_s[i] = pair.mu_t[i];
            rho[i] = std::log(pair.sigma_t[i]);
        } else {
            pair.mu_s[i] = pair.mu_t[i] * std::exp(rng.uniform(-0.7, 0.7));
            rho[i] = std::max(rng.uniform(std::log(0.05), std::log(2.0)), rho_floor);
        }
    }
    pair.sigma_s.resize(n);

    OptimizeTrace trace;
    trace.loss.reserve(cfg.steps);
    trace.grad_norm.reserve(cfg.steps);
    std::vector<double> v_mu(n, 0.0), v_rho(n, 0.0);
    const int drop_step = (cfg.steps * 3) / 4;

    for (int step = 0; step < cfg.steps; ++step) {
        for (std::size_t i = 0; i < n; ++i) pair.sigma_s[i] = std::exp(rho[i]);

        DistillLoss loss;
        DistillGrad grad;
        if (cfg.mode == DistillMode::kl) {
            loss = kl_loss(pair);
            grad = kl_loss_grad(pair);
        } else {
            loss = nll_loss(pair.mu_s, pair.sigma_s, pair.mu_t);
            grad = nll_loss_grad(pair.mu_s, pair.sigma_s, pair.mu_t);
        }
        if (!std::isfinite(loss.mean) || loss.mean > kDivergeLoss)
            throw DivergedError(step, "distill_eta: loss diverged");

        const double decay = step >= drop_step ? 0.5 : 1.0;
        double gnorm_sq = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            // curvature scale for the mu step
            const double precond = cfg.mode == DistillMode::kl
                                       ? pair.sigma_t[i] * pair.sigma_t[i]
                                       : pair.sigma_s[i] * pair.sigma_s[i];
            const double g_mu = grad.d_mu_s[i] * precond;
            const double g_rho = grad.d_sigma_s[i] * pair.sigma_s[i];
            gnorm_sq += g_mu * g_mu + g_rho * g_rho;
            if (!cfg.freeze_mu) {
                v_mu[i] = cfg.momentum * v_mu[i] + g_mu;
                pair.mu_s[i] =
                    std::max(pair.mu_s[i] - cfg.lr_mu * decay * v_mu[i], kDepthFloor);
            }
            v_rho[i] = cfg.momentum * v_rho[i] + g_rho;
            rho[i] = std::max(rho[i] - cfg.lr_log_sigma * decay * v_rho[i], rho_floor);
        }
        trace.loss.push_back(loss.mean);
        trace.grad_norm.push_back(std::sqrt(gnorm_sq));
    }

    EtaMap student(teacher.width, teacher.height, 1.0, 0.0, Family::gaussian,
                   SpreadMode::direct_sigma);
    for (std::size_t i = 0; i < n; ++i) {
        student.mu[i] = pair.mu_s[i];
        student.spread[i] = std::exp(rho[i]);
    }
    trace.final_eta = std::move(student);
    return trace;
}

namespace {

/// Local probes used for lattice-crossing detection: the warp state of every
/// sample at one pixel for a given eta value.
struct PixelWarpState {
    std::vector<long> cell_u, cell_v;
    std::vector<bool> clamped_u, clamped_v, behind, floored;
    std::vector<double> sign_a_minus_b; // per channel at the probed pixel
};

PixelWarpState probe_pixel(const Scene& scene, const EtaMap& eta, const SampleSet& set,
                           std::size_t pixel, const PhotometricConfig& photo,
                           MaskPolicy policy) {
    PixelWarpState st;
    const int w = eta.width;
    const int x = static_cast<int>(pixel % w);
    const int y = static_cast<int>(pixel / w);
    const auto& k = scene.rig.intrinsics;
    double wsum = 0.0;
    std::vector<double> vals(set.n, 0.0);
    std::vector<bool> ins(set.n, false);
    for (int s = 0; s < set.n; ++s) {
        const double scale = dgamma_dsigma(eta.family);
        const double raw = eta.mu[pixel] + scale * eta.sigma_at(pixel) * set.offsets[s];
        const bool floored = raw < kDepthFloor;
        const double d = floored ? kDepthFloor : raw;
        const Reprojection rp = reproject_pixel(x, y, d, k, scene.rig.pose);
        st.floored.push_back(floored);
        st.behind.push_back(!rp.valid);
        if (!rp.valid) {
            st.cell_u.push_back(0);
            st.cell_v.push_back(0);
            st.clamped_u.push_back(false);
            st.clamped_v.push_back(false);
            continue;
        }
        const double uc = std::clamp(rp.u, 0.0, scene.i_s.width - 1.0);
        const double vc = std::clamp(rp.v, 0.0, scene.i_s.height - 1.0);
        st.cell_u.push_back(static_cast<long>(std::floor(uc)));
        st.cell_v.push_back(static_cast<long>(std::floor(vc)));
        st.clamped_u.push_back(rp.u < 0.0 || rp.u > scene.i_s.width - 1.0);
        st.clamped_v.push_back(rp.v < 0.0 || rp.v > scene.i_s.height - 1.0);
        const BilinearSample bs = bilinear_sample(scene.i_s, rp.u, rp.v);
        ins[s] = bs.in_bounds;
        if (bs.in_bounds) wsum += set.weights[s];
        vals[s] = bs.values[0];
    }
    // expected value at this pixel (channel 0 suffices for sign probing)
    double acc = 0.0;
    for (int s = 0; s < set.n; ++s) {
        double wk = set.weights[s];
        if (policy == MaskPolicy::renormalize && wsum > 0.0) wk = ins[s] ? wk / wsum : 0.0;
        acc += wk * vals[s];
    }
    (void)photo;
    st.sign_a_minus_b.push_back(acc - scene.i_t.at(x, y, 0) > 0.0   ? 1.0
                                : acc - scene.i_t.at(x, y, 0) < 0.0 ? -1.0
                                                                    : 0.0);
    return st;
}

bool states_differ(const PixelWarpState& a, const PixelWarpState& b) {
    if (a.cell_u != b.cell_u || a.cell_v != b.cell_v) return true;
    if (a.clamped_u != b.clamped_u || a.clamped_v != b.clamped_v) return true;
    if (a.behind != b.behind || a.floored != b.floored) return true;
    if (a.sign_a_minus_b != b.sign_a_minus_b) return true;
    return false;
}

double median_of(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

} // namespace

GradCheckReport finite_diff_check(const Scene& scene, const EtaMap& eta,
                                  double step_rel, const OptimizeConfig& cfg,
                                  int n_coords, std::uint64_t seed) {
    if (step_rel < 1e-6 || step_rel > 1e-2)
        throw std::invalid_argument("finite_diff_check: step_rel out of [1e-6, 1e-2]");
    const SampleSet set = make_sample_set(cfg.n_samples, cfg.family);
    const PhotometricConfig photo = photo_config(cfg.loss_mode);

    const auto loss_at = [&](const EtaMap& e) {
        return recons_loss(e, scene.i_t, scene.i_s, scene.rig.intrinsics, scene.rig.pose,
                           set, photo, cfg.mask_policy)
            .value;
    };
    const EtaGradient analytic =
        recons_loss_grad(eta, scene.i_t, scene.i_s, scene.rig.intrinsics, scene.rig.pose,
                         set, photo, cfg.mask_policy);

    Rng rng(seed);
    GradCheckReport report;
    report.entries.reserve(n_coords);
    EtaMap probe = eta;
    for (int c = 0; c < n_coords; ++c) {
        const std::size_t pixel =
            static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(eta.size()) - 1));
        const bool is_mu = rng.uniform() < 0.5;
        double& slot = is_mu ? probe.mu[pixel] : probe.spread[pixel];
        const double base = slot;
        const double h = step_rel * (is_mu ? base : std::max(base, 0.1));

        slot = base + h;
        const double up = loss_at(probe);
        const PixelWarpState s_up = probe_pixel(scene, probe, set, pixel, photo,
                                                cfg.mask_policy);
        slot = base - h;
        const double down = loss_at(probe);
        const PixelWarpState s_down = probe_pixel(scene, probe, set, pixel, photo,
                                                  cfg.mask_policy);
        slot = base;

        GradCheckEntry e;
        e.pixel = pixel;
        e.is_mu = is_mu;
        e.analytic = is_mu ? analytic.d_mu[pixel] : analytic.d_spread[pixel];
        e.finite_diff = (up - down) / (2.0 * h);
        const double denom = std::max(std::abs(e.analytic), std::abs(e.finite_diff));
        e.rel_error = denom < 1e-14 ? 0.0 : std::abs(e.analytic - e.finite_diff) / denom;
        e.lattice_crossing = states_differ(s_up, s_down);
        report.entries.push_back(e);
    }

    std::vector<double> all, off;
    for (const auto& e : report.entries) {
        all.push_back(e.rel_error);
        if (e.lattice_crossing)
            ++report.n_lattice;
        else
            off.push_back(e.rel_error);
    }
    report.median_rel = median_of(all);
    report.max_rel = all.empty() ? 0.0 : *std::max_element(all.begin(), all.end());
    report.median_rel_off_lattice = median_of(off);
    report.max_rel_off_lattice = off.empty() ? 0.0 : *std::max_element(off.begin(), off.end());
    return report;
}

} // namespace probdepth
