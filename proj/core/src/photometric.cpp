#include "probdepth/photometric.hpp"

#include <cmath>
#include <stdexcept>

namespace probdepth {

namespace {

// reflect-101 index: -1 -> 1, n -> n-2; window radius is 1 so one bounce.
inline int reflect(int i, int n) {
    if (i < 0) i = -i;
    if (i >= n) i = 2 * n - i - 2;
    if (i < 0) i = 0; // n == 1
    return i;
}

inline double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

struct WindowStats {
    double mu_a, mu_b, var_a, var_b, cov;
};

WindowStats window_stats(const ImageBuffer& a, const ImageBuffer& b,
                         int x, int y, int ch) {
    double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
    for (int dy = -1; dy <= 1; ++dy) {
        const int yy = reflect(y + dy, a.height);
        for (int dx = -1; dx <= 1; ++dx) {
            const int xx = reflect(x + dx, a.width);
            const double va = a.at(xx, yy, ch);
            const double vb = b.at(xx, yy, ch);
            sa += va;
            sb += vb;
            saa += va * va;
            sbb += vb * vb;
            sab += va * vb;
        }
    }
    WindowStats s{};
    s.mu_a = sa / 9.0;
    s.mu_b = sb / 9.0;
    s.var_a = saa / 9.0 - s.mu_a * s.mu_a;
    s.var_b = sbb / 9.0 - s.mu_b * s.mu_b;
    s.cov = sab / 9.0 - s.mu_a * s.mu_b;
    return s;
}

double ssim_from_stats(const WindowStats& s, double c1, double c2) {
    const double num = (2.0 * s.mu_a * s.mu_b + c1) * (2.0 * s.cov + c2);
    const double den = (s.mu_a * s.mu_a + s.mu_b * s.mu_b + c1) * (s.var_a + s.var_b + c2);
    return num / den;
}

void check_pair(const ImageBuffer& a, const ImageBuffer& b, const ValidMask& mask) {
    if (!a.same_shape(b))
        throw std::invalid_argument("photometric_error: image shape mismatch");
    if (mask.width != a.width || mask.height != a.height)
        throw std::invalid_argument("photometric_error: mask shape mismatch");
}

} // namespace

std::vector<double> ssim_map(const ImageBuffer& a, const ImageBuffer& b,
                             double c1, double c2) {
    std::vector<double> out(static_cast<std::size_t>(a.width) * a.height, 0.0);
    for (int y = 0; y < a.height; ++y) {
        for (int x = 0; x < a.width; ++x) {
            double s = 0.0;
            for (int ch = 0; ch < a.channels; ++ch)
                s += ssim_from_stats(window_stats(a, b, x, y, ch), c1, c2);
            out[static_cast<std::size_t>(y) * a.width + x] = s / a.channels;
        }
    }
    return out;
}

LossValue photometric_error(const ImageBuffer& a, const ImageBuffer& b,
                            const PhotometricConfig& cfg, const ValidMask& mask) {
    check_pair(a, b, mask);
    const std::size_t n_valid = mask.count();
    if (n_valid == 0) throw std::runtime_error("photometric_error: no valid pixels");

    LossValue out;
    out.mask = mask;
    out.per_pixel.assign(static_cast<std::size_t>(a.width) * a.height, 0.0);

    std::vector<double> ssim;
    if (cfg.mode == ErrorMode::ssim_l1) ssim = ssim_map(a, b, cfg.c1, cfg.c2);

    for (int y = 0; y < a.height; ++y) {
        for (int x = 0; x < a.width; ++x) {
            double l1 = 0.0;
            for (int ch = 0; ch < a.channels; ++ch)
                l1 += std::abs(a.at(x, y, ch) - b.at(x, y, ch));
            l1 /= a.channels;
            const std::size_t i = static_cast<std::size_t>(y) * a.width + x;
            if (cfg.mode == ErrorMode::l1) {
                out.per_pixel[i] = l1;
            } else {
                out.per_pixel[i] = cfg.ssim_weight * 0.5 * (1.0 - ssim[i]) +
                                   (1.0 - cfg.ssim_weight) * l1;
            }
        }
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < out.per_pixel.size(); ++i)
        if (mask.data[i]) sum += out.per_pixel[i];
    out.value = sum / static_cast<double>(n_valid);
    return out;
}

PhotometricGrad photometric_error_grad(const ImageBuffer& a, const ImageBuffer& b,
                                       const PhotometricConfig& cfg,
                                       const ValidMask& mask) {
    PhotometricGrad out;
    out.loss = photometric_error(a, b, cfg, mask);
    out.d_first = ImageBuffer(a.width, a.height, a.channels, 0.0);

    const double inv_n = 1.0 / static_cast<double>(out.loss.mask.count());
    const double inv_c = 1.0 / a.channels;

    // L1 term: d|a-b|/da at the pixel itself.
    const double l1_w = cfg.mode == ErrorMode::l1 ? 1.0 : (1.0 - cfg.ssim_weight);
    for (int y = 0; y < a.height; ++y)
        for (int x = 0; x < a.width; ++x) {
            if (!mask.at(x, y)) continue;
            for (int ch = 0; ch < a.channels; ++ch)
                out.d_first.at(x, y, ch) +=
                    l1_w * sign(a.at(x, y, ch) - b.at(x, y, ch)) * inv_c * inv_n;
        }

    if (cfg.mode == ErrorMode::l1) return out;

    // SSIM term: each masked window center spreads gradient over its 3x3
    // support through the window statistics; accumulate via the reflect map.
    const double ssim_w = -cfg.ssim_weight * 0.5 * inv_c * inv_n;
    for (int y = 0; y < a.height; ++y) {
        for (int x = 0; x < a.width; ++x) {
            if (!mask.at(x, y)) continue;
            for (int ch = 0; ch < a.channels; ++ch) {
                const WindowStats s = window_stats(a, b, x, y, ch);
                const double n1 = 2.0 * s.mu_a * s.mu_b + cfg.c1;
                const double n2 = 2.0 * s.cov + cfg.c2;
                const double d1 = s.mu_a * s.mu_a + s.mu_b * s.mu_b + cfg.c1;
                const double d2 = s.var_a + s.var_b + cfg.c2;
                const double inv_dd = 1.0 / (d1 * d2);
                // partials of SSIM w.r.t. the window statistics
                const double ds_dmua =
                    (2.0 * s.mu_b * n2) * inv_dd - n1 * n2 * inv_dd * (2.0 * s.mu_a / d1);
                const double ds_dvara = -n1 * n2 * inv_dd / d2;
                const double ds_dcov = 2.0 * n1 * inv_dd;
                for (int dy = -1; dy <= 1; ++dy) {
                    const int yy = reflect(y + dy, a.height);
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int xx = reflect(x + dx, a.width);
                        const double va = a.at(xx, yy, ch);
                        const double vb = b.at(xx, yy, ch);
                        const double dmua = 1.0 / 9.0;
                        const double dvara = (2.0 * va - 2.0 * s.mu_a) / 9.0;
                        const double dcov = (vb - s.mu_b) / 9.0;
                        out.d_first.at(xx, yy, ch) +=
                            ssim_w * (ds_dmua * dmua + ds_dvara * dvara + ds_dcov * dcov);
                    }
                }
            }
        }
    }
    return out;
}

} // namespace probdepth
