#pragma once

#include <cstddef>
#include <vector>

namespace probdepth {

/// Frozen teacher and trainable student Gaussians, per pixel.
struct GaussianPair {
    int width = 0;
    int height = 0;
    std::vector<double> mu_t, sigma_t;
    std::vector<double> mu_s, sigma_s;

    std::size_t size() const { return mu_t.size(); }
    void validate() const;
};

struct DistillLoss {
    double mean = 0.0;
    std::vector<double> per_pixel;
};

struct DistillGrad {
    std::vector<double> d_mu_s;
    std::vector<double> d_sigma_s;
};

/// log(sigma_t/sigma_s) + (sigma_s^2 + (mu_s - mu_t)^2) / (2 sigma_t^2),
/// implemented verbatim. This is the closed-form Gaussian KL(student||teacher)
/// plus the constant 1/2; the offset is optimization-irrelevant and is kept
/// so the minimum sits at 0.5. Throws std::domain_error on non-positive
/// sigmas.
DistillLoss kl_loss(const GaussianPair& pair);
DistillGrad kl_loss_grad(const GaussianPair& pair);

/// (mu_s - mu_t)^2 / (2 sigma_s^2) + log(sigma_s): the scalar pseudo
/// ground-truth variant. Its stationary sigma_s at a fixed mean gap equals
/// |mu_s - mu_t|, and it diverges to -inf as sigma_s -> 0 when the gap is
/// zero, which is why optimization needs a sigma floor.
DistillLoss nll_loss(const std::vector<double>& mu_s, const std::vector<double>& sigma_s,
                     const std::vector<double>& mu_t);
DistillGrad nll_loss_grad(const std::vector<double>& mu_s,
                          const std::vector<double>& sigma_s,
                          const std::vector<double>& mu_t);

} // namespace probdepth
