#pragma once

#include "probdepth/raster.hpp"

namespace probdepth {

enum class ErrorMode { l1, ssim_l1 };

/// err(.,.) realization. l1 is the plain mean absolute difference; ssim_l1
/// is the 0.85/0.15 SSIM+L1 mix with a 3x3 window and C1 = 0.01^2,
/// C2 = 0.03^2, the standard reconstruction error of the stereo baseline.
struct PhotometricConfig {
    ErrorMode mode = ErrorMode::ssim_l1;
    double ssim_weight = 0.85;
    double c1 = 1e-4;
    double c2 = 9e-4;
};

/// A scalar loss with its per-pixel decomposition. value is the mean of
/// per_pixel over the mask.
struct LossValue {
    double value = 0.0;
    std::vector<double> per_pixel; // defined everywhere, counted on mask
    ValidMask mask;
};

/// Distance between two images over the masked pixels. Throws
/// std::invalid_argument on shape mismatch and std::runtime_error("no valid
/// pixels") on an empty mask.
LossValue photometric_error(const ImageBuffer& a, const ImageBuffer& b,
                            const PhotometricConfig& cfg, const ValidMask& mask);

/// photometric_error plus d(value)/d(a) as a per-pixel, per-channel buffer.
struct PhotometricGrad {
    LossValue loss;
    ImageBuffer d_first; // derivative of loss.value w.r.t. image a
};

PhotometricGrad photometric_error_grad(const ImageBuffer& a, const ImageBuffer& b,
                                       const PhotometricConfig& cfg,
                                       const ValidMask& mask);

/// Per-pixel SSIM (channel-averaged) with a 3x3 window and mirror padding
/// (reflect without edge repeat). Exposed for the oracle tests.
std::vector<double> ssim_map(const ImageBuffer& a, const ImageBuffer& b,
                             double c1, double c2);

} // namespace probdepth
