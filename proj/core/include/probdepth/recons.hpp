#pragma once

#include "probdepth/distribution.hpp"
#include "probdepth/photometric.hpp"
#include "probdepth/warp.hpp"

namespace probdepth {

/// How out-of-bounds sample warps enter the expectation. all_in_bounds
/// masks a pixel unless every sample's lookup stayed inside the source
/// (the default); renormalize keeps pixels with a partial sample stack and
/// rescales the surviving weights. Only the default claims fidelity to the
/// original training setup.
enum class MaskPolicy { all_in_bounds, renormalize };

/// Weighted mean of the n per-sample inverse warps: the tractable stand-in
/// for E[recons(D, I_s)]. The returned mask follows the policy.
WarpResult expected_reconstruction(const EtaMap& eta, const ImageBuffer& source,
                                   const CameraIntrinsics& k, const RigidPose& pose,
                                   const SampleSet& set,
                                   MaskPolicy policy = MaskPolicy::all_in_bounds,
                                   TileOrigin origin = {});

/// The probabilistic reconstruction loss: photometric error between the
/// expected reconstruction and the target. The additive normalization
/// constant of the underlying likelihood is omitted (it carries no
/// gradient).
LossValue recons_loss(const EtaMap& eta, const ImageBuffer& target,
                      const ImageBuffer& source, const CameraIntrinsics& k,
                      const RigidPose& pose, const SampleSet& set,
                      const PhotometricConfig& cfg,
                      MaskPolicy policy = MaskPolicy::all_in_bounds);

/// Per-pixel loss gradient with respect to the eta parameters. d_spread is
/// d/d alpha or d/d sigma according to the eta mode. The sample weights are
/// eta-independent and contribute no gradient.
struct EtaGradient {
    int width = 0;
    int height = 0;
    std::vector<double> d_mu;
    std::vector<double> d_spread;
};

struct ReconsLossGrad {
    LossValue loss;
    EtaGradient grad;
};

ReconsLossGrad recons_loss_with_grad(const EtaMap& eta, const ImageBuffer& target,
                                     const ImageBuffer& source, const CameraIntrinsics& k,
                                     const RigidPose& pose, const SampleSet& set,
                                     const PhotometricConfig& cfg,
                                     MaskPolicy policy = MaskPolicy::all_in_bounds);

EtaGradient recons_loss_grad(const EtaMap& eta, const ImageBuffer& target,
                             const ImageBuffer& source, const CameraIntrinsics& k,
                             const RigidPose& pose, const SampleSet& set,
                             const PhotometricConfig& cfg,
                             MaskPolicy policy = MaskPolicy::all_in_bounds);

} // namespace probdepth
