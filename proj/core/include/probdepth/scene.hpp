#pragma once

#include "probdepth/camera.hpp"
#include "probdepth/raster.hpp"

#include <cstdint>

namespace probdepth {

enum class TextureKind { checker, random_smooth, constant, mixed };

enum class DepthProfileKind { fronto_parallel, slanted_plane, two_layer };

struct OccluderRect {
    int x0 = 0, y0 = 0, w = 0, h = 0;
};

/// Recipe for a synthetic stereo pair with exact ground truth. The source
/// camera sits at +baseline along x in the target frame, so the
/// target-to-source motion is a translation by (-baseline, 0, 0) and
/// disparity is focal*baseline/depth.
struct SceneSpec {
    int width = 64;
    int height = 64;
    TextureKind texture = TextureKind::random_smooth;
    DepthProfileKind profile = DepthProfileKind::fronto_parallel;
    double depth = 10.0;            // fronto-parallel plane depth
    double slant_gx = 0.0;          // slanted plane: d0 + gx*u + gy*v
    double slant_gy = 0.0;
    double depth_near = 5.0;        // two-layer occluder depth
    double depth_far = 10.0;        // two-layer background depth
    OccluderRect occluder;
    double baseline = 0.3;
    double focal = 100.0;
    double noise_std = 0.0;
    std::uint64_t seed = 0;

    void validate() const;
};

/// A generated pair: the warp of i_s through d_star reproduces i_t exactly
/// (bit-wise) outside the occlusion mask; occluded pixels carry the
/// physically-correct background appearance instead, so photometric
/// supervision is wrong precisely there. Noise, when requested, is added
/// after the mask is computed.
struct Scene {
    ImageBuffer i_t;
    ImageBuffer i_s;
    DepthMap d_star;
    CameraRig rig;
    ValidMask occlusion; // nonzero = occluded (supervision unreliable)
};

Scene gen_scene(const SceneSpec& spec);

/// Pixels with appreciable local contrast: 3x3 max-min of the target image
/// above the threshold. Used to separate textured from textureless regions
/// in assertions.
ValidMask texture_mask(const ImageBuffer& image, double threshold = 0.02);

} // namespace probdepth
