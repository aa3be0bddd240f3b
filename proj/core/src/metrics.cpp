#include "probdepth/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace probdepth {

namespace {

struct PixelSample {
    double d_hat;
    double d_star;
    double uncertainty;
};

std::vector<PixelSample> gather_valid(const EvalFrame& frame) {
    std::vector<PixelSample> px;
    px.reserve(frame.mask.count());
    for (std::size_t i = 0; i < frame.mask.data.size(); ++i)
        if (frame.mask.data[i])
            px.push_back({frame.d_hat.data[i], frame.d_star.data[i],
                          frame.uncertainty[i]});
    return px;
}

DepthMetrics metrics_over(const std::vector<PixelSample>& px) {
    double sum_rel = 0.0, sum_sq = 0.0;
    std::size_t inliers = 0;
    for (const auto& p : px) {
        const double err = p.d_hat - p.d_star;
        sum_rel += std::abs(err) / p.d_star;
        sum_sq += err * err;
        const double ratio = std::max(p.d_hat / p.d_star, p.d_star / p.d_hat);
        if (ratio < 1.25) ++inliers;
    }
    const double n = static_cast<double>(px.size());
    return {sum_rel / n, std::sqrt(sum_sq / n), inliers / n};
}

double base_metric_over(const std::vector<PixelSample>& px, BaseMetric m) {
    const DepthMetrics d = metrics_over(px);
    switch (m) {
        case BaseMetric::abs_rel: return d.abs_rel;
        case BaseMetric::rmse: return d.rmse;
        case BaseMetric::delta1: return 1.0 - d.delta1; // lower is better
    }
    return 0.0;
}

/// The oracle removal key is the metric's own per-pixel error.
double oracle_key(const PixelSample& p, BaseMetric m) {
    switch (m) {
        case BaseMetric::abs_rel: return std::abs(p.d_hat - p.d_star) / p.d_star;
        case BaseMetric::rmse: {
            const double e = p.d_hat - p.d_star;
            return e * e;
        }
        case BaseMetric::delta1: return std::max(p.d_hat / p.d_star, p.d_star / p.d_hat);
    }
    return 0.0;
}

/// Indices sorted by descending key, stable in pixel order for ties.
std::vector<std::size_t> descending_order(const std::vector<double>& keys) {
    std::vector<std::size_t> idx(keys.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return keys[a] > keys[b]; });
    return idx;
}

std::vector<double> curve_from_order(const std::vector<PixelSample>& px,
                                     const std::vector<std::size_t>& order,
                                     const std::vector<double>& fractions,
                                     BaseMetric m) {
    std::vector<double> values;
    values.reserve(fractions.size());
    for (double f : fractions) {
        const std::size_t drop =
            static_cast<std::size_t>(std::ceil(f * static_cast<double>(px.size())));
        std::vector<PixelSample> keep;
        keep.reserve(px.size() - drop);
        // order[0..drop) are removed; the remainder keeps pixel order
        std::vector<char> removed(px.size(), 0);
        for (std::size_t i = 0; i < drop; ++i) removed[order[i]] = 1;
        for (std::size_t i = 0; i < px.size(); ++i)
            if (!removed[i]) keep.push_back(px[i]);
        values.push_back(base_metric_over(keep, m));
    }
    return values;
}

} // namespace

void EvalFrame::validate() const {
    if (d_hat.width != d_star.width || d_hat.height != d_star.height ||
        mask.width != d_hat.width || mask.height != d_hat.height ||
        uncertainty.size() != d_hat.data.size())
        throw std::invalid_argument("EvalFrame: inconsistent dims");
    for (std::size_t i = 0; i < mask.data.size(); ++i) {
        if (!mask.data[i]) continue;
        if (!(d_star.data[i] > 0.0))
            throw std::invalid_argument("EvalFrame: ground truth must be > 0 on mask");
        if (uncertainty[i] < 0.0)
            throw std::invalid_argument("EvalFrame: uncertainty must be >= 0");
    }
}

DepthMetrics depth_metrics(const EvalFrame& frame) {
    frame.validate();
    const auto px = gather_valid(frame);
    if (px.empty()) throw std::runtime_error("depth_metrics: empty mask");
    return metrics_over(px);
}

std::string base_metric_name(BaseMetric m) {
    switch (m) {
        case BaseMetric::abs_rel: return "abs_rel";
        case BaseMetric::rmse: return "rmse";
        case BaseMetric::delta1: return "delta1";
    }
    return "?";
}

SparsificationResult sparsification(const EvalFrame& frame, BaseMetric metric) {
    frame.validate();
    const auto px = gather_valid(frame);
    if (px.empty()) throw std::runtime_error("sparsification: empty mask");
    if (px.size() < 50)
        throw std::runtime_error("sparsification: insufficient pixels for 2% bins");

    SparsificationResult out;
    for (int i = 0; i < 50; ++i) out.curve.fractions.push_back(i * 0.02);

    std::vector<double> pred_keys(px.size()), oracle_keys(px.size());
    for (std::size_t i = 0; i < px.size(); ++i) {
        pred_keys[i] = px[i].uncertainty;
        oracle_keys[i] = oracle_key(px[i], metric);
    }
    const auto pred_order = descending_order(pred_keys);
    const auto oracle_order = descending_order(oracle_keys);

    out.curve.pred = curve_from_order(px, pred_order, out.curve.fractions, metric);
    out.curve.oracle = curve_from_order(px, oracle_order, out.curve.fractions, metric);
    out.curve.random_value = base_metric_over(px, metric);

    double ause = 0.0, aurg = 0.0;
    for (std::size_t i = 0; i < out.curve.fractions.size(); ++i) {
        ause += out.curve.pred[i] - out.curve.oracle[i];
        aurg += out.curve.random_value - out.curve.pred[i];
    }
    out.ause = ause / static_cast<double>(out.curve.fractions.size());
    out.aurg = aurg / static_cast<double>(out.curve.fractions.size());
    return out;
}

AbsoluteUncertainty aru_rmsu(const EvalFrame& frame) {
    frame.validate();
    const auto px = gather_valid(frame);
    if (px.empty()) throw std::runtime_error("aru_rmsu: empty mask");
    double sum_rel = 0.0, sum_sq = 0.0;
    for (const auto& p : px) {
        const double diff = p.uncertainty - std::abs(p.d_hat - p.d_star);
        sum_rel += std::abs(diff) / p.d_star;
        sum_sq += diff * diff;
    }
    const double n = static_cast<double>(px.size());
    return {sum_rel / n, std::sqrt(sum_sq / n)};
}

FrameMetrics evaluate_frame(const EvalFrame& frame) {
    FrameMetrics out;
    out.depth = depth_metrics(frame);
    const auto s_rel = sparsification(frame, BaseMetric::abs_rel);
    const auto s_rmse = sparsification(frame, BaseMetric::rmse);
    const auto s_delta = sparsification(frame, BaseMetric::delta1);
    out.ause_abs_rel = s_rel.ause;
    out.aurg_abs_rel = s_rel.aurg;
    out.ause_rmse = s_rmse.ause;
    out.aurg_rmse = s_rmse.aurg;
    out.ause_delta1 = s_delta.ause;
    out.aurg_delta1 = s_delta.aurg;
    const auto abs_u = aru_rmsu(frame);
    out.aru = abs_u.aru;
    out.rmsu = abs_u.rmsu;
    return out;
}

MetricReport aggregate_frames(const std::vector<FrameMetrics>& frames) {
    if (frames.empty()) throw std::invalid_argument("aggregate_frames: no frames");
    MetricReport r;
    r.n_frames = static_cast<int>(frames.size());
    for (const auto& f : frames) {
        r.abs_rel += f.depth.abs_rel;
        r.rmse += f.depth.rmse;
        r.delta1 += f.depth.delta1;
        r.ause_abs_rel += f.ause_abs_rel;
        r.aurg_abs_rel += f.aurg_abs_rel;
        r.ause_rmse += f.ause_rmse;
        r.aurg_rmse += f.aurg_rmse;
        r.ause_delta1 += f.ause_delta1;
        r.aurg_delta1 += f.aurg_delta1;
        r.aru += f.aru;
        r.rmsu += f.rmsu;
    }
    const double n = static_cast<double>(frames.size());
    r.abs_rel /= n;
    r.rmse /= n;
    r.delta1 /= n;
    r.ause_abs_rel /= n;
    r.aurg_abs_rel /= n;
    r.ause_rmse /= n;
    r.aurg_rmse /= n;
    r.ause_delta1 /= n;
    r.aurg_delta1 /= n;
    r.aru /= n;
    r.rmsu /= n;
    return r;
}

void median_scale(EvalFrame& frame) {
    frame.validate();
    std::vector<double> hat, star;
    for (std::size_t i = 0; i < frame.mask.data.size(); ++i) {
        if (!frame.mask.data[i]) continue;
        hat.push_back(frame.d_hat.data[i]);
        star.push_back(frame.d_star.data[i]);
    }
    if (hat.empty()) throw std::runtime_error("median_scale: empty mask");
    auto median = [](std::vector<double>& v) {
        std::sort(v.begin(), v.end());
        const std::size_t m = v.size() / 2;
        return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
    };
    const double scale = median(star) / median(hat);
    for (std::size_t i = 0; i < frame.d_hat.data.size(); ++i) {
        frame.d_hat.data[i] *= scale;
        frame.uncertainty[i] *= scale;
    }
}

} // namespace probdepth
