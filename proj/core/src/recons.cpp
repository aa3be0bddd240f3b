#include "probdepth/recons.hpp"

#include <cmath>
#include <stdexcept>

namespace probdepth {

namespace {

void check_dims(const EtaMap& eta, const ImageBuffer& target, const ImageBuffer& source) {
    if (!target.same_shape(source))
        throw std::invalid_argument("recons: target/source shape mismatch");
    if (eta.width != target.width || eta.height != target.height)
        throw std::invalid_argument("recons: eta dims do not match target dims");
}

// Per-pixel weight of sample s in the expectation. Must be used identically
// by the image build and the gradient so the two stay consistent. Pixels a
// policy masks out still get a deterministic value (they feed neighboring
// SSIM windows), built from the plain weights.
inline double effective_weight(MaskPolicy policy, double w_s, bool in, double wsum) {
    if (policy == MaskPolicy::all_in_bounds) return w_s;
    if (wsum > 0.0) return in ? w_s / wsum : 0.0;
    return w_s;
}

struct SampleStack {
    std::vector<WarpWithJacobian> warps; // one per sample, in sample order
    ValidMask mask;                      // per policy
    ImageBuffer expected;                // weighted mean image
    std::vector<double> weight_sum;      // surviving raw weight per pixel
};

SampleStack build_stack(const EtaMap& eta, const ImageBuffer& source,
                        const CameraIntrinsics& k, const RigidPose& pose,
                        const SampleSet& set, MaskPolicy policy, TileOrigin origin,
                        bool with_jacobian) {
    eta.validate();
    const std::vector<DepthMap> depths = sample_depths(eta, set);
    SampleStack st;
    st.warps.reserve(set.n);
    for (int s = 0; s < set.n; ++s) {
        if (with_jacobian) {
            st.warps.push_back(warp_image_with_jacobian(source, depths[s], k, pose, origin));
        } else {
            WarpResult w = warp_image(source, depths[s], k, pose, origin);
            st.warps.push_back({std::move(w.image), ImageBuffer{}, std::move(w.in_bounds)});
        }
    }

    const int w = eta.width, h = eta.height, c = source.channels;
    st.expected = ImageBuffer(w, h, c, 0.0);
    st.mask = ValidMask(w, h, 0);
    st.weight_sum.assign(static_cast<std::size_t>(w) * h, 0.0);

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * w + x;
            bool all_in = true;
            double wsum = 0.0;
            for (int s = 0; s < set.n; ++s) {
                const bool in = st.warps[s].in_bounds.at(x, y);
                all_in = all_in && in;
                if (in) wsum += set.weights[s];
            }
            st.weight_sum[i] = wsum;
            st.mask.data[i] =
                (policy == MaskPolicy::all_in_bounds ? all_in : wsum > 0.0) ? 1 : 0;
            for (int ch = 0; ch < c; ++ch) {
                double acc = 0.0;
                for (int s = 0; s < set.n; ++s) {
                    const bool in = st.warps[s].in_bounds.at(x, y);
                    acc += effective_weight(policy, set.weights[s], in, wsum) *
                           st.warps[s].image.at(x, y, ch);
                }
                st.expected.at(x, y, ch) = acc;
            }
        }
    }
    return st;
}

} // namespace

WarpResult expected_reconstruction(const EtaMap& eta, const ImageBuffer& source,
                                   const CameraIntrinsics& k, const RigidPose& pose,
                                   const SampleSet& set, MaskPolicy policy,
                                   TileOrigin origin) {
    SampleStack st = build_stack(eta, source, k, pose, set, policy, origin, false);
    return {std::move(st.expected), std::move(st.mask)};
}

LossValue recons_loss(const EtaMap& eta, const ImageBuffer& target,
                      const ImageBuffer& source, const CameraIntrinsics& k,
                      const RigidPose& pose, const SampleSet& set,
                      const PhotometricConfig& cfg, MaskPolicy policy) {
    check_dims(eta, target, source);
    const WarpResult rec = expected_reconstruction(eta, source, k, pose, set, policy);
    return photometric_error(rec.image, target, cfg, rec.in_bounds);
}

ReconsLossGrad recons_loss_with_grad(const EtaMap& eta, const ImageBuffer& target,
                                     const ImageBuffer& source, const CameraIntrinsics& k,
                                     const RigidPose& pose, const SampleSet& set,
                                     const PhotometricConfig& cfg, MaskPolicy policy) {
    check_dims(eta, target, source);
    SampleStack st = build_stack(eta, source, k, pose, set, policy, {}, true);
    PhotometricGrad pg = photometric_error_grad(st.expected, target, cfg, st.mask);

    ReconsLossGrad out;
    out.loss = std::move(pg.loss);
    out.grad.width = eta.width;
    out.grad.height = eta.height;
    out.grad.d_mu.assign(eta.size(), 0.0);
    out.grad.d_spread.assign(eta.size(), 0.0);

    // Every pixel can carry gradient: unmasked values still reach the loss
    // through neighboring SSIM windows, and d_first already accounts for
    // that. L1 mode leaves d_first zero off the mask, so those pixels cost
    // nothing.
    const int w = eta.width, h = eta.height, c = source.channels;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * w + x;
            double dl_has = 0.0;
            for (int ch = 0; ch < c; ++ch) dl_has += std::abs(pg.d_first.at(x, y, ch));
            if (dl_has == 0.0) continue;
            double g_mu = 0.0, g_spread = 0.0;
            for (int s = 0; s < set.n; ++s) {
                const bool in = st.warps[s].in_bounds.at(x, y);
                const double wk =
                    effective_weight(policy, set.weights[s], in, st.weight_sum[i]);
                if (wk == 0.0) continue;
                const SampleGrad sg = sample_depth_grad(eta, set, s, i);
                if (sg.d_mu == 0.0 && sg.d_spread == 0.0) continue;
                double dl_dd = 0.0; // d loss / d depth_s at this pixel
                for (int ch = 0; ch < c; ++ch)
                    dl_dd += pg.d_first.at(x, y, ch) * st.warps[s].ddepth.at(x, y, ch);
                g_mu += wk * dl_dd * sg.d_mu;
                g_spread += wk * dl_dd * sg.d_spread;
            }
            out.grad.d_mu[i] = g_mu;
            out.grad.d_spread[i] = g_spread;
        }
    }
    return out;
}

EtaGradient recons_loss_grad(const EtaMap& eta, const ImageBuffer& target,
                             const ImageBuffer& source, const CameraIntrinsics& k,
                             const RigidPose& pose, const SampleSet& set,
                             const PhotometricConfig& cfg, MaskPolicy policy) {
    return recons_loss_with_grad(eta, target, source, k, pose, set, cfg, policy).grad;
}

} // namespace probdepth
