#pragma once

#include "probdepth/distribution.hpp"
#include "probdepth/recons.hpp"
#include "probdepth/scene.hpp"

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace probdepth {

/// Momentum gradient descent on the raw per-pixel EtaMap under the
/// probabilistic reconstruction loss. Learning rates are in per-pixel loss
/// units (the mean-loss gradient is rescaled by the valid-pixel count so
/// step sizes do not depend on image size). Constraints are enforced by
/// projection and the learning rate halves at 75% of the budget.
struct OptimizeConfig {
    int steps = 3000;
    double lr_mu = 50.0;
    double lr_spread = 1.0; // alpha units, or meters in direct-sigma mode
    double momentum = 0.9;
    double init_mu = 20.0;
    double init_spread = 0.1;
    int n_samples = 9;
    Family family = Family::gaussian;
    SpreadMode mode = SpreadMode::alpha;
    ErrorMode loss_mode = ErrorMode::l1;
    MaskPolicy mask_policy = MaskPolicy::all_in_bounds;

    void validate() const;
};

struct OptimizeTrace {
    std::vector<double> loss;      // pre-update loss at each step
    std::vector<double> grad_norm; // L2 norm of the per-pixel-scaled gradient
    EtaMap final_eta;
};

/// Loss blew past 1e6 or went non-finite; carries the offending step.
class DivergedError : public std::runtime_error {
public:
    DivergedError(int step, const std::string& what)
        : std::runtime_error(what), step_(step) {}
    int step() const { return step_; }

private:
    int step_;
};

OptimizeTrace optimize_eta(const Scene& scene, const OptimizeConfig& cfg);

enum class DistillMode { kl, nll };

/// Self-distillation against a frozen teacher. The student optimizes
/// (mu_s, log sigma_s); the exponential parameterization keeps sigma
/// positive and the floor blocks the NLL degeneracy at zero gap. The mu
/// step is preconditioned by the local curvature scale (sigma_t^2 for KL,
/// sigma_s^2 for NLL) so convergence speed does not depend on the teacher's
/// sigma scale.
struct DistillConfig {
    int steps = 2000;
    double lr_mu = 0.5;
    double lr_log_sigma = 0.3;
    double momentum = 0.9;
    double sigma_floor = 1e-4;
    DistillMode mode = DistillMode::kl;
    std::uint64_t seed = 0;
    bool freeze_mu = false;
    bool init_at_teacher = false; // degenerate start, for the fixed-point check

    void validate() const;
};

OptimizeTrace distill_eta(const EtaMap& teacher, const DistillConfig& cfg);

/// Central-difference audit of the reconstruction-loss gradient at random
/// (pixel, parameter) coordinates. Coordinates whose perturbation crosses a
/// bilinear cell boundary, flips an L1 sign, or toggles a clamp are flagged
/// as lattice crossings and reported separately.
struct GradCheckEntry {
    std::size_t pixel = 0;
    bool is_mu = true;
    double analytic = 0.0;
    double finite_diff = 0.0;
    double rel_error = 0.0;
    bool lattice_crossing = false;
};

struct GradCheckReport {
    std::vector<GradCheckEntry> entries;
    double median_rel = 0.0;
    double max_rel = 0.0;
    double median_rel_off_lattice = 0.0;
    double max_rel_off_lattice = 0.0;
    std::size_t n_lattice = 0;
};

GradCheckReport finite_diff_check(const Scene& scene, const EtaMap& eta,
                                  double step_rel, const OptimizeConfig& cfg,
                                  int n_coords = 200, std::uint64_t seed = 0);

} // namespace probdepth
