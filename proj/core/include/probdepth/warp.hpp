#pragma once

#include "probdepth/camera.hpp"
#include "probdepth/raster.hpp"

#include <array>

namespace probdepth {

/// Bilinear lookup at a continuous coordinate. Coordinates are clamped to
/// [0, W-1] x [0, H-1]; in_bounds reports whether the unclamped point was
/// inside that box.
struct BilinearSample {
    std::array<double, 3> values{0, 0, 0};
    bool in_bounds = false;
};

/// Value and spatial derivative of the bilinear kernel at a continuous
/// coordinate. The derivative along an axis is zero when the coordinate was
/// clamped on that axis; at lattice points the right-sided cell is used.
struct BilinearSampleGrad {
    std::array<double, 3> values{0, 0, 0};
    std::array<double, 3> du{0, 0, 0};
    std::array<double, 3> dv{0, 0, 0};
    bool in_bounds = false;
};

/// Throws std::domain_error on NaN coordinates, std::invalid_argument on an
/// empty image.
BilinearSample bilinear_sample(const ImageBuffer& image, double u, double v);
BilinearSampleGrad bilinear_sample_grad(const ImageBuffer& image, double u, double v);

struct WarpResult {
    ImageBuffer image;
    ValidMask in_bounds;
};

/// Origin of a tile inside the full target grid; lets a warp of a sub-tile
/// use the tile's true pixel coordinates so tiled evaluation is bit-identical
/// to the full evaluation.
struct TileOrigin {
    int x0 = 0;
    int y0 = 0;
};

/// Inverse warp: for every target pixel, reproject through (K, pose) at the
/// pixel's depth and bilinear-sample the source image. Strictly pixel-wise:
/// output pixel i depends only on depth[i]. Pixels behind the camera get
/// value 0 and an invalid mask entry.
WarpResult warp_image(const ImageBuffer& source, const DepthMap& depth,
                      const CameraIntrinsics& k, const RigidPose& pose,
                      TileOrigin origin = {});

/// Per-pixel, per-channel d(warped value)/d(depth): the reprojection depth
/// Jacobian chained through the bilinear kernel's spatial gradient. Zero on
/// clamped axes and at invalid pixels.
ImageBuffer warp_jacobian_depth(const ImageBuffer& source, const DepthMap& depth,
                                const CameraIntrinsics& k, const RigidPose& pose,
                                TileOrigin origin = {});

/// One pass producing both the warp and its depth Jacobian.
struct WarpWithJacobian {
    ImageBuffer image;
    ImageBuffer ddepth;
    ValidMask in_bounds;
};

WarpWithJacobian warp_image_with_jacobian(const ImageBuffer& source, const DepthMap& depth,
                                          const CameraIntrinsics& k, const RigidPose& pose,
                                          TileOrigin origin = {});

} // namespace probdepth
