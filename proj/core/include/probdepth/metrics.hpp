#pragma once

#include "probdepth/raster.hpp"

#include <string>
#include <vector>

namespace probdepth {

/// One evaluation instance: prediction, ground truth, predicted uncertainty
/// (STD of the depth distribution, meters) and the ground-truth validity
/// mask.
struct EvalFrame {
    DepthMap d_hat;
    DepthMap d_star;
    std::vector<double> uncertainty;
    ValidMask mask;

    void validate() const;
};

struct DepthMetrics {
    double abs_rel = 0.0;
    double rmse = 0.0;
    double delta1 = 0.0;
};

/// abs_rel, rmse and the strict delta < 1.25 inlier ratio over the mask.
DepthMetrics depth_metrics(const EvalFrame& frame);

enum class BaseMetric { abs_rel, rmse, delta1 };

std::string base_metric_name(BaseMetric m);

/// Metric values over the pixels remaining after removing the highest-
/// uncertainty (pred) or highest-true-error (oracle) fraction. The delta
/// metric enters as 1-delta so all three curves are lower-is-better.
struct SparsificationCurve {
    std::vector<double> fractions; // 0.00, 0.02, ..., 0.98
    std::vector<double> pred;
    std::vector<double> oracle;
    double random_value = 0.0; // flat no-information reference
};

struct SparsificationResult {
    SparsificationCurve curve;
    double ause = 0.0;
    double aurg = 0.0;
};

/// 50 bins of 2%, rectangle rule, ceil(f*N) removals, ties broken by pixel
/// index (stable). Throws when fewer than 50 valid pixels are available.
SparsificationResult sparsification(const EvalFrame& frame, BaseMetric metric);

struct AbsoluteUncertainty {
    double aru = 0.0;
    double rmsu = 0.0;
};

/// ARU = mean(|U - |d_hat - d_star|| / d_star), RMSU = sqrt(mean((U -
/// |d_hat - d_star|)^2)), both over the valid-pixel count.
AbsoluteUncertainty aru_rmsu(const EvalFrame& frame);

/// All per-frame scores in one pass.
struct FrameMetrics {
    DepthMetrics depth;
    double ause_abs_rel = 0.0, aurg_abs_rel = 0.0;
    double ause_rmse = 0.0, aurg_rmse = 0.0;
    double ause_delta1 = 0.0, aurg_delta1 = 0.0;
    double aru = 0.0, rmsu = 0.0;
};

FrameMetrics evaluate_frame(const EvalFrame& frame);

/// Dataset-level report: uniform mean over frames.
struct MetricReport {
    double abs_rel = 0.0, rmse = 0.0, delta1 = 0.0;
    double ause_abs_rel = 0.0, aurg_abs_rel = 0.0;
    double ause_rmse = 0.0, aurg_rmse = 0.0;
    double ause_delta1 = 0.0, aurg_delta1 = 0.0;
    double aru = 0.0, rmsu = 0.0;
    int n_frames = 0;
};

MetricReport aggregate_frames(const std::vector<FrameMetrics>& frames);

/// Optional per-frame median scaling (multiplies d_hat and the uncertainty
/// by median(d_star)/median(d_hat) over the mask).
void median_scale(EvalFrame& frame);

} // namespace probdepth
