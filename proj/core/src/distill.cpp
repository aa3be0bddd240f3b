#include "probdepth/distill.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace probdepth {

namespace {
void check_sigmas(const std::vector<double>& sig, const char* what) {
    for (double s : sig)
        if (!(s > 0.0))
            throw std::domain_error(std::string(what) + ": sigma must be > 0");
}

double mean_of(const std::vector<double>& v) {
    double sum = 0.0;
    for (double x : v) sum += x;
    return sum / static_cast<double>(v.size());
}
} // namespace

void GaussianPair::validate() const {
    const std::size_t n = static_cast<std::size_t>(width) * height;
    if (n == 0 || mu_t.size() != n || sigma_t.size() != n || mu_s.size() != n ||
        sigma_s.size() != n)
        throw std::invalid_argument("GaussianPair: inconsistent dims");
    check_sigmas(sigma_t, "GaussianPair");
    check_sigmas(sigma_s, "GaussianPair");
}

DistillLoss kl_loss(const GaussianPair& pair) {
    pair.validate();
    DistillLoss out;
    out.per_pixel.resize(pair.size());
    for (std::size_t i = 0; i < pair.size(); ++i) {
        const double dm = pair.mu_s[i] - pair.mu_t[i];
        const double st2 = pair.sigma_t[i] * pair.sigma_t[i];
        out.per_pixel[i] = std::log(pair.sigma_t[i] / pair.sigma_s[i]) +
                           (pair.sigma_s[i] * pair.sigma_s[i] + dm * dm) / (2.0 * st2);
    }
    out.mean = mean_of(out.per_pixel);
    return out;
}

DistillGrad kl_loss_grad(const GaussianPair& pair) {
    pair.validate();
    DistillGrad out;
    out.d_mu_s.resize(pair.size());
    out.d_sigma_s.resize(pair.size());
    for (std::size_t i = 0; i < pair.size(); ++i) {
        const double st2 = pair.sigma_t[i] * pair.sigma_t[i];
        out.d_mu_s[i] = (pair.mu_s[i] - pair.mu_t[i]) / st2;
        out.d_sigma_s[i] = -1.0 / pair.sigma_s[i] + pair.sigma_s[i] / st2;
    }
    return out;
}

DistillLoss nll_loss(const std::vector<double>& mu_s, const std::vector<double>& sigma_s,
                     const std::vector<double>& mu_t) {
    if (mu_s.size() != sigma_s.size() || mu_s.size() != mu_t.size() || mu_s.empty())
        throw std::invalid_argument("nll_loss: inconsistent dims");
    check_sigmas(sigma_s, "nll_loss");
    DistillLoss out;
    out.per_pixel.resize(mu_s.size());
    for (std::size_t i = 0; i < mu_s.size(); ++i) {
        const double dm = mu_s[i] - mu_t[i];
        out.per_pixel[i] =
            dm * dm / (2.0 * sigma_s[i] * sigma_s[i]) + std::log(sigma_s[i]);
    }
    out.mean = mean_of(out.per_pixel);
    return out;
}

DistillGrad nll_loss_grad(const std::vector<double>& mu_s,
                          const std::vector<double>& sigma_s,
                          const std::vector<double>& mu_t) {
    if (mu_s.size() != sigma_s.size() || mu_s.size() != mu_t.size() || mu_s.empty())
        throw std::invalid_argument("nll_loss_grad: inconsistent dims");
    check_sigmas(sigma_s, "nll_loss_grad");
    DistillGrad out;
    out.d_mu_s.resize(mu_s.size());
    out.d_sigma_s.resize(mu_s.size());
    for (std::size_t i = 0; i < mu_s.size(); ++i) {
        const double dm = mu_s[i] - mu_t[i];
        const double s = sigma_s[i];
        out.d_mu_s[i] = dm / (s * s);
        out.d_sigma_s[i] = -dm * dm / (s * s * s) + 1.0 / s;
    }
    return out;
}

} // namespace probdepth
