#pragma once

#include "probdepth/raster.hpp"

#include <string>
#include <vector>

namespace probdepth {

/// Symmetric generalized normal family, density proportional to
/// exp(-(|x-mu|/gamma)^beta). Only the Laplace (beta=1) and Gaussian
/// (beta=2) members are supported.
enum class Family { laplace = 1, gaussian = 2 };

double family_beta(Family f);
/// Scale from standard deviation: gamma = sigma/sqrt(2) for Laplace,
/// gamma = sqrt(2)*sigma for Gaussian.
double gamma_from_sigma(Family f, double sigma);
/// d gamma / d sigma (constant per family).
double dgamma_dsigma(Family f);

Family family_from_string(const std::string& name);
std::string family_to_string(Family f);

/// Sampled depths are clamped below at this floor to stay positive; the
/// clamped branch carries zero gradient.
inline constexpr double kDepthFloor = 1e-3;

/// How the per-pixel spread channel is interpreted: alpha stores the
/// relative spread (sigma = alpha * mu); direct_sigma stores sigma itself
/// (the ablation mode that fails to train).
enum class SpreadMode { alpha, direct_sigma };

/// Per-pixel depth-distribution parameters; the optimization variable.
struct EtaMap {
    int width = 0;
    int height = 0;
    std::vector<double> mu;
    std::vector<double> spread; // alpha in [0,1] or sigma in meters, per mode
    Family family = Family::gaussian;
    SpreadMode mode = SpreadMode::alpha;

    EtaMap() = default;
    EtaMap(int w, int h, double mu_fill, double spread_fill,
           Family f = Family::gaussian, SpreadMode m = SpreadMode::alpha);

    std::size_t size() const { return mu.size(); }
    double sigma_at(std::size_t i) const {
        return mode == SpreadMode::alpha ? spread[i] * mu[i] : spread[i];
    }

    void validate() const;
};

/// The deterministic sample set: n signed offsets from mu in units of gamma
/// plus their fixed normalized weights. Both depend only on n (and the
/// offsets on beta), never on eta, so one set is shared across all pixels.
struct SampleSet {
    int n = 0;
    Family family = Family::gaussian;
    std::vector<double> offsets; // ascending, odd-symmetric, center 0
    std::vector<double> weights; // positive, symmetric, sum 1
};

/// Offsets o_i = +/- (-log(2i/(n+1)))^(1/beta) for i = 1..(n+1)/2, sorted
/// ascending. Throws std::invalid_argument for even or non-positive n.
std::vector<double> make_sample_offsets(int n, Family f);

/// Normalized sample weights: raw weight 2i/(n+1) per level (the density
/// ratio to the mode, which is what Eq.-style weighting reduces to after
/// the mode density cancels), normalized to sum 1. Independent of mu,
/// sigma and beta.
std::vector<double> normalized_weights(int n);

/// Density ratio f(s_i)/f(mu) = 2i/(n+1) for level i in [1, (n+1)/2].
double density_ratio(int level, int n);

SampleSet make_sample_set(int n, Family f);

/// The n depth maps mu + gamma(sigma) * o_k, clamped at kDepthFloor.
std::vector<DepthMap> sample_depths(const EtaMap& eta, const SampleSet& set);

/// Derivatives of sample k at pixel i with respect to the eta parameters;
/// zero where the depth floor clamps.
struct SampleGrad {
    double value = 0.0;
    double d_mu = 0.0;
    double d_spread = 0.0;
};

SampleGrad sample_depth_grad(const EtaMap& eta, const SampleSet& set,
                             int sample_index, std::size_t pixel);

} // namespace probdepth
