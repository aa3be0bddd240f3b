#include "probdepth/scene.hpp"

#include "probdepth/distribution.hpp"
#include "probdepth/rng.hpp"
#include "probdepth/warp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace probdepth {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Continuous texture over source-space coordinates. random_smooth is a
/// fixed sum of low-frequency cosines with random direction, phase and
/// amplitude, normalized into [0.05, 0.95] without clipping.
class TextureFn {
public:
    TextureFn(TextureKind kind, std::uint64_t seed, double constant_level, int width)
        : kind_(kind), constant_level_(constant_level), half_width_(width / 2) {
        Rng rng(seed);
        double amp_sum = 0.0;
        for (int j = 0; j < kWaves; ++j) {
            const double f = rng.uniform(0.02, 0.09);
            const double angle = rng.uniform(0.0, kTwoPi);
            fu_[j] = f * std::cos(angle);
            fv_[j] = f * std::sin(angle);
            phase_[j] = rng.uniform(0.0, kTwoPi);
            amp_[j] = rng.uniform(0.5, 1.0);
            amp_sum += amp_[j];
        }
        for (int j = 0; j < kWaves; ++j) amp_[j] *= 0.45 / amp_sum;
    }

    double operator()(double u, double v) const {
        switch (kind_) {
            case TextureKind::constant:
                return constant_level_;
            case TextureKind::checker: {
                const long cu = static_cast<long>(std::floor(u / 8.0));
                const long cv = static_cast<long>(std::floor(v / 8.0));
                return ((cu + cv) & 1) ? 0.75 : 0.25;
            }
            case TextureKind::random_smooth:
                return smooth(u, v);
            case TextureKind::mixed:
                return u < half_width_ ? smooth(u, v) : constant_level_;
        }
        return constant_level_;
    }

private:
    double smooth(double u, double v) const {
        double s = 0.5;
        for (int j = 0; j < kWaves; ++j)
            s += amp_[j] * std::cos(kTwoPi * (fu_[j] * u + fv_[j] * v) + phase_[j]);
        return s;
    }

    static constexpr int kWaves = 6;
    TextureKind kind_;
    double constant_level_;
    double half_width_;
    double fu_[kWaves], fv_[kWaves], phase_[kWaves], amp_[kWaves];
};

double depth_at(const SceneSpec& spec, int x, int y) {
    switch (spec.profile) {
        case DepthProfileKind::fronto_parallel:
            return spec.depth;
        case DepthProfileKind::slanted_plane:
            return spec.depth + spec.slant_gx * x + spec.slant_gy * y;
        case DepthProfileKind::two_layer: {
            const auto& r = spec.occluder;
            const bool in = x >= r.x0 && x < r.x0 + r.w && y >= r.y0 && y < r.y0 + r.h;
            return in ? spec.depth_near : spec.depth_far;
        }
    }
    return spec.depth;
}

} // namespace

void SceneSpec::validate() const {
    if (width < 2 || height < 2)
        throw std::invalid_argument("SceneSpec: width/height must be >= 2");
    if (!(baseline > 0.0)) throw std::invalid_argument("SceneSpec: baseline must be > 0");
    if (!(focal > 0.0)) throw std::invalid_argument("SceneSpec: focal must be > 0");
    if (noise_std < 0.0) throw std::invalid_argument("SceneSpec: noise_std must be >= 0");
    switch (profile) {
        case DepthProfileKind::fronto_parallel:
            if (!(depth > kDepthFloor))
                throw std::invalid_argument("SceneSpec: depth must exceed the depth floor");
            break;
        case DepthProfileKind::slanted_plane: {
            // check plane positivity at the four grid corners
            for (int y : {0, height - 1})
                for (int x : {0, width - 1})
                    if (!(depth + slant_gx * x + slant_gy * y > kDepthFloor))
                        throw std::invalid_argument(
                            "SceneSpec: slanted plane dips below the depth floor");
            break;
        }
        case DepthProfileKind::two_layer: {
            if (!(depth_near > kDepthFloor) || !(depth_far > kDepthFloor))
                throw std::invalid_argument("SceneSpec: layer depths must exceed the floor");
            if (!(depth_near < depth_far))
                throw std::invalid_argument("SceneSpec: occluder must be nearer than background");
            if (occluder.w <= 0 || occluder.h <= 0)
                throw std::invalid_argument("SceneSpec: occluder rect is empty");
            if (occluder.x0 <= 0 && occluder.y0 <= 0 &&
                occluder.x0 + occluder.w >= width && occluder.y0 + occluder.h >= height)
                throw std::invalid_argument("SceneSpec: occluder covers the entire image");
            break;
        }
    }
}

Scene gen_scene(const SceneSpec& spec) {
    spec.validate();
    const int w = spec.width, h = spec.height;

    Scene scene;
    scene.rig.intrinsics = {spec.focal, spec.focal, (w - 1) / 2.0, (h - 1) / 2.0};
    scene.rig.pose = RigidPose::translate(-spec.baseline, 0.0, 0.0);

    scene.d_star = DepthMap(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) scene.d_star.at(x, y) = depth_at(spec, x, y);

    const TextureFn tex_bg(spec.texture, spec.seed, 0.5, w);
    const TextureFn tex_occ(spec.texture, spec.seed ^ 0x9e3779b97f4a7c15ull, 0.8, w);

    // Paint the source. For the two-layer profile the occluder is painted at
    // its source-space footprint (shifted by its own disparity).
    const bool layered = spec.profile == DepthProfileKind::two_layer;
    const double disp_near = layered ? spec.focal * spec.baseline / spec.depth_near : 0.0;
    std::vector<char> occ_src(static_cast<std::size_t>(w) * h, 0);
    scene.i_s = ImageBuffer(w, h, 1);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            bool occ = false;
            if (layered) {
                const double xt = x + disp_near; // where this source pixel lands in the target
                occ = xt >= spec.occluder.x0 && xt < spec.occluder.x0 + spec.occluder.w &&
                      y >= spec.occluder.y0 && y < spec.occluder.y0 + spec.occluder.h;
            }
            occ_src[static_cast<std::size_t>(y) * w + x] = occ ? 1 : 0;
            const double val = occ ? tex_occ(x, y) : tex_bg(x, y);
            scene.i_s.at(x, y) = std::clamp(val, 0.0, 1.0);
        }
    }

    // The target is the inverse warp of the source through the ground truth:
    // photometric consistency holds bit-wise by construction.
    const WarpResult warped =
        warp_image(scene.i_s, scene.d_star, scene.rig.intrinsics, scene.rig.pose);
    scene.i_t = warped.image;

    // Occlusion: background pixels whose source lookup falls on the painted
    // occluder see the background in the target camera, so overwrite them
    // with the analytic background appearance.
    if (layered) {
        const double disp_far = spec.focal * spec.baseline / spec.depth_far;
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                const auto& r = spec.occluder;
                const bool fg = x >= r.x0 && x < r.x0 + r.w && y >= r.y0 && y < r.y0 + r.h;
                if (fg) continue;
                // bilinear support of the background lookup, with the same
                // clamping as the sampler
                const double us = std::clamp(x - disp_far, 0.0, w - 1.0);
                const double vs = std::clamp(static_cast<double>(y), 0.0, h - 1.0);
                int x0 = std::min(static_cast<int>(std::floor(us)), w - 2);
                int y0 = std::min(static_cast<int>(std::floor(vs)), h - 2);
                bool hits_occluder = false;
                for (int dy = 0; dy <= 1 && !hits_occluder; ++dy)
                    for (int dx = 0; dx <= 1 && !hits_occluder; ++dx)
                        if (occ_src[static_cast<std::size_t>(y0 + dy) * w + (x0 + dx)])
                            hits_occluder = true;
                if (hits_occluder)
                    scene.i_t.at(x, y) =
                        std::clamp(tex_bg(x - disp_far, static_cast<double>(y)), 0.0, 1.0);
            }
        }
    }

    // The violated set is exactly where the overwrite changed the value.
    scene.occlusion = ValidMask(w, h, 0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            scene.occlusion.set(x, y, scene.i_t.at(x, y) != warped.image.at(x, y));

    if (spec.noise_std > 0.0) {
        Rng noise(spec.seed ^ 0xd1f4c2a396b5e87full);
        for (double& v : scene.i_t.data)
            v = std::clamp(v + spec.noise_std * noise.normal(), 0.0, 1.0);
        for (double& v : scene.i_s.data)
            v = std::clamp(v + spec.noise_std * noise.normal(), 0.0, 1.0);
    }
    return scene;
}

ValidMask texture_mask(const ImageBuffer& image, double threshold) {
    ValidMask out(image.width, image.height, 0);
    for (int y = 0; y < image.height; ++y) {
        for (int x = 0; x < image.width; ++x) {
            double lo = 1e300, hi = -1e300;
            for (int dy = -1; dy <= 1; ++dy) {
                const int yy = std::clamp(y + dy, 0, image.height - 1);
                for (int dx = -1; dx <= 1; ++dx) {
                    const int xx = std::clamp(x + dx, 0, image.width - 1);
                    double v = 0.0;
                    for (int ch = 0; ch < image.channels; ++ch) v += image.at(xx, yy, ch);
                    lo = std::min(lo, v);
                    hi = std::max(hi, v);
                }
            }
            out.set(x, y, (hi - lo) / image.channels > threshold);
        }
    }
    return out;
}

} // namespace probdepth
