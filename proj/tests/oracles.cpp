#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace probdepth::oracle {

Mat4 mat4_mul(const Mat4& a, const Mat4& b) {
    Mat4 out{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            double s = 0.0;
            for (int k = 0; k < 4; ++k) s += a[i * 4 + k] * b[k * 4 + j];
            out[i * 4 + j] = s;
        }
    return out;
}

Mat4 mat4_inverse(const Mat4& m) {
    // Gauss-Jordan with partial pivoting on an augmented 4x8 system.
    double aug[4][8];
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            aug[i][j] = m[i * 4 + j];
            aug[i][j + 4] = i == j ? 1.0 : 0.0;
        }
    for (int col = 0; col < 4; ++col) {
        int pivot = col;
        for (int r = col + 1; r < 4; ++r)
            if (std::abs(aug[r][col]) > std::abs(aug[pivot][col])) pivot = r;
        if (std::abs(aug[pivot][col]) < 1e-300)
            throw std::runtime_error("mat4_inverse: singular");
        if (pivot != col)
            for (int j = 0; j < 8; ++j) std::swap(aug[pivot][j], aug[col][j]);
        const double inv_p = 1.0 / aug[col][col];
        for (int j = 0; j < 8; ++j) aug[col][j] *= inv_p;
        for (int r = 0; r < 4; ++r) {
            if (r == col) continue;
            const double f = aug[r][col];
            for (int j = 0; j < 8; ++j) aug[r][j] -= f * aug[col][j];
        }
    }
    Mat4 out{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) out[i * 4 + j] = aug[i][j + 4];
    return out;
}

HomogeneousReprojection reproject_homogeneous(double u, double v, double depth,
                                              const CameraIntrinsics& k,
                                              const RigidPose& pose) {
    const Mat4 k4{k.fx, 0, k.cx, 0, 0, k.fy, k.cy, 0, 0, 0, 1, 0, 0, 0, 0, 1};
    Mat4 t4{};
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) t4[i * 4 + j] = pose.rotation[i * 3 + j];
        t4[i * 4 + 3] = pose.translation[i];
    }
    t4[15] = 1.0;
    const Mat4 k4_inv = mat4_inverse(k4);

    const std::array<double, 4> pix{u, v, 1.0, 1.0};
    std::array<double, 4> ray{};
    for (int i = 0; i < 4; ++i) {
        double s = 0.0;
        for (int j = 0; j < 4; ++j) s += k4_inv[i * 4 + j] * pix[j];
        ray[i] = s;
    }
    const std::array<double, 4> point{ray[0] * depth, ray[1] * depth, ray[2] * depth, 1.0};
    std::array<double, 4> moved{};
    for (int i = 0; i < 4; ++i) {
        double s = 0.0;
        for (int j = 0; j < 4; ++j) s += t4[i * 4 + j] * point[j];
        moved[i] = s;
    }
    std::array<double, 4> proj{};
    for (int i = 0; i < 4; ++i) {
        double s = 0.0;
        for (int j = 0; j < 4; ++j) s += k4[i * 4 + j] * moved[j];
        proj[i] = s;
    }
    return {proj[0] / proj[2], proj[1] / proj[2], moved[2]};
}

double gnormal_pdf(double x, double mu, double sigma, double beta) {
    const double gamma_scale =
        beta == 1.0 ? sigma / std::sqrt(2.0) : std::sqrt(2.0) * sigma;
    const double z = std::abs(x - mu) / gamma_scale;
    return beta / (2.0 * gamma_scale * std::tgamma(1.0 / beta)) *
           std::exp(-std::pow(z, beta));
}

std::vector<double> weights_by_density(int n, Family f, double mu, double sigma) {
    const double beta = family_beta(f);
    const SampleSet set = make_sample_set(n, f);
    const double g = gamma_from_sigma(f, sigma);
    std::vector<double> w(set.offsets.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        w[i] = gnormal_pdf(mu + g * set.offsets[i], mu, sigma, beta);
        sum += w[i];
    }
    for (double& x : w) x /= sum;
    return w;
}

double ssim_window(const std::array<double, 9>& a, const std::array<double, 9>& b,
                   double c1, double c2) {
    double ma = 0, mb = 0;
    for (int i = 0; i < 9; ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= 9.0;
    mb /= 9.0;
    double va = 0, vb = 0, cov = 0;
    for (int i = 0; i < 9; ++i) {
        va += (a[i] - ma) * (a[i] - ma);
        vb += (b[i] - mb) * (b[i] - mb);
        cov += (a[i] - ma) * (b[i] - mb);
    }
    va /= 9.0;
    vb /= 9.0;
    cov /= 9.0;
    return (2 * ma * mb + c1) * (2 * cov + c2) /
           ((ma * ma + mb * mb + c1) * (va + vb + c2));
}

double photometric_ssim_l1(const ImageBuffer& a, const ImageBuffer& b,
                           const ValidMask& mask, double weight, double c1, double c2) {
    const int w = a.width, h = a.height;
    const auto reflect = [](int i, int n) {
        if (i < 0) i = -i;
        if (i >= n) i = 2 * n - i - 2;
        return std::clamp(i, 0, n - 1);
    };
    double sum = 0.0;
    std::size_t count = 0;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            if (!mask.at(x, y)) continue;
            double per_pixel = 0.0;
            for (int ch = 0; ch < a.channels; ++ch) {
                std::array<double, 9> wa{}, wb{};
                int idx = 0;
                for (int dy = -1; dy <= 1; ++dy)
                    for (int dx = -1; dx <= 1; ++dx, ++idx) {
                        wa[idx] = a.at(reflect(x + dx, w), reflect(y + dy, h), ch);
                        wb[idx] = b.at(reflect(x + dx, w), reflect(y + dy, h), ch);
                    }
                const double s = ssim_window(wa, wb, c1, c2);
                const double l1 = std::abs(a.at(x, y, ch) - b.at(x, y, ch));
                per_pixel += weight * 0.5 * (1.0 - s) + (1.0 - weight) * l1;
            }
            sum += per_pixel / a.channels;
            ++count;
        }
    return sum / static_cast<double>(count);
}

double gaussian_kl(double mu_s, double sigma_s, double mu_t, double sigma_t) {
    const double dm = mu_s - mu_t;
    return std::log(sigma_t / sigma_s) +
           (sigma_s * sigma_s + dm * dm) / (2.0 * sigma_t * sigma_t) - 0.5;
}

namespace {

struct Px {
    double d_hat, d_star, u;
};

std::vector<Px> valid_pixels(const EvalFrame& frame) {
    std::vector<Px> out;
    for (std::size_t i = 0; i < frame.mask.data.size(); ++i)
        if (frame.mask.data[i])
            out.push_back(
                {frame.d_hat.data[i], frame.d_star.data[i], frame.uncertainty[i]});
    return out;
}

double metric_of(const std::vector<Px>& px, BaseMetric m) {
    double acc = 0.0;
    for (const auto& p : px) {
        switch (m) {
            case BaseMetric::abs_rel: acc += std::abs(p.d_hat - p.d_star) / p.d_star; break;
            case BaseMetric::rmse: acc += (p.d_hat - p.d_star) * (p.d_hat - p.d_star); break;
            case BaseMetric::delta1:
                acc += std::max(p.d_hat / p.d_star, p.d_star / p.d_hat) < 1.25 ? 0.0 : 1.0;
                break;
        }
    }
    const double n = static_cast<double>(px.size());
    if (m == BaseMetric::rmse) return std::sqrt(acc / n);
    return acc / n;
}

double error_key(const Px& p, BaseMetric m) {
    switch (m) {
        case BaseMetric::abs_rel: return std::abs(p.d_hat - p.d_star) / p.d_star;
        case BaseMetric::rmse: return (p.d_hat - p.d_star) * (p.d_hat - p.d_star);
        case BaseMetric::delta1: return std::max(p.d_hat / p.d_star, p.d_star / p.d_hat);
    }
    return 0.0;
}

// selection of the k removal victims: repeatedly take the strictly largest
// remaining key, first index on ties
std::vector<std::size_t> removal_order(const std::vector<double>& keys) {
    std::vector<std::size_t> order;
    std::vector<char> taken(keys.size(), 0);
    for (std::size_t round = 0; round < keys.size(); ++round) {
        std::size_t best = keys.size();
        for (std::size_t i = 0; i < keys.size(); ++i) {
            if (taken[i]) continue;
            if (best == keys.size() || keys[i] > keys[best]) best = i;
        }
        taken[best] = 1;
        order.push_back(best);
    }
    return order;
}

} // namespace

BruteSparsification sparsification_brute(const EvalFrame& frame, BaseMetric metric) {
    const auto px = valid_pixels(frame);
    std::vector<double> pred_keys, oracle_keys;
    for (const auto& p : px) {
        pred_keys.push_back(p.u);
        oracle_keys.push_back(error_key(p, metric));
    }
    const auto pred_order = removal_order(pred_keys);
    const auto oracle_order = removal_order(oracle_keys);

    BruteSparsification out;
    out.random_value = metric_of(px, metric);
    for (int bin = 0; bin < 50; ++bin) {
        const double f = bin * 0.02;
        const auto drop = static_cast<std::size_t>(
            std::ceil(f * static_cast<double>(px.size())));
        const auto subset = [&](const std::vector<std::size_t>& order) {
            std::vector<char> removed(px.size(), 0);
            for (std::size_t i = 0; i < drop; ++i) removed[order[i]] = 1;
            std::vector<Px> keep;
            for (std::size_t i = 0; i < px.size(); ++i)
                if (!removed[i]) keep.push_back(px[i]);
            return metric_of(keep, metric);
        };
        out.pred.push_back(subset(pred_order));
        out.oracle.push_back(subset(oracle_order));
    }
    double ause = 0.0, aurg = 0.0;
    for (int bin = 0; bin < 50; ++bin) {
        ause += out.pred[bin] - out.oracle[bin];
        aurg += out.random_value - out.pred[bin];
    }
    out.ause = ause / 50.0;
    out.aurg = aurg / 50.0;
    return out;
}

BruteAbsUncert aru_rmsu_brute(const EvalFrame& frame) {
    const auto px = valid_pixels(frame);
    double aru = 0.0, rmsu = 0.0;
    for (const auto& p : px) {
        const double diff = p.u - std::abs(p.d_hat - p.d_star);
        aru += std::abs(diff) / p.d_star;
        rmsu += diff * diff;
    }
    const double n = static_cast<double>(px.size());
    return {aru / n, std::sqrt(rmsu / n)};
}

} // namespace probdepth::oracle
