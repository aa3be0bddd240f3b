#include "probdepth/distribution.hpp"

#include <cmath>
#include <stdexcept>

namespace probdepth {

namespace {
const double kSqrt2 = std::sqrt(2.0);

void check_n(int n) {
    if (n < 1 || n % 2 == 0)
        throw std::invalid_argument("sample count must be odd and >= 1");
}
} // namespace

double family_beta(Family f) {
    return f == Family::laplace ? 1.0 : 2.0;
}

double gamma_from_sigma(Family f, double sigma) {
    return f == Family::laplace ? sigma / kSqrt2 : kSqrt2 * sigma;
}

double dgamma_dsigma(Family f) {
    return f == Family::laplace ? 1.0 / kSqrt2 : kSqrt2;
}

Family family_from_string(const std::string& name) {
    if (name == "laplace") return Family::laplace;
    if (name == "gauss" || name == "gaussian" || name == "normal")
        return Family::gaussian;
    throw std::invalid_argument("unknown distribution family: " + name);
}

std::string family_to_string(Family f) {
    return f == Family::laplace ? "laplace" : "gauss";
}

EtaMap::EtaMap(int w, int h, double mu_fill, double spread_fill, Family f, SpreadMode m)
    : width(w), height(h), mu(static_cast<std::size_t>(w) * h, mu_fill),
      spread(static_cast<std::size_t>(w) * h, spread_fill), family(f), mode(m) {}

void EtaMap::validate() const {
    if (width <= 0 || height <= 0)
        throw std::invalid_argument("EtaMap: empty");
    const std::size_t n = static_cast<std::size_t>(width) * height;
    if (mu.size() != n || spread.size() != n)
        throw std::invalid_argument("EtaMap: data length does not match dims");
    for (std::size_t i = 0; i < n; ++i) {
        if (!(mu[i] > 0.0) || !std::isfinite(mu[i]))
            throw std::invalid_argument("EtaMap: mu must be positive and finite");
        if (!std::isfinite(spread[i]) || spread[i] < 0.0)
            throw std::invalid_argument("EtaMap: spread must be finite and >= 0");
        if (mode == SpreadMode::alpha && spread[i] > 1.0)
            throw std::invalid_argument("EtaMap: alpha must be <= 1");
    }
}

std::vector<double> make_sample_offsets(int n, Family f) {
    check_n(n);
    const double beta = family_beta(f);
    const int levels = (n + 1) / 2;
    std::vector<double> positive; // level i=1 (outermost) .. i=levels (center, 0)
    positive.reserve(levels);
    for (int i = 1; i <= levels; ++i) {
        const double ratio = density_ratio(i, n);
        positive.push_back(std::pow(-std::log(ratio), 1.0 / beta));
    }
    std::vector<double> offsets(n);
    for (int i = 0; i < levels; ++i) {
        offsets[i] = -positive[i];
        offsets[n - 1 - i] = positive[i]; // exact bitwise mirror
    }
    offsets[levels - 1] = 0.0; // -log(1) may round; pin the center
    return offsets;
}

std::vector<double> normalized_weights(int n) {
    check_n(n);
    const int levels = (n + 1) / 2;
    std::vector<double> raw(levels);
    double sum = 0.0;
    for (int i = 1; i <= levels; ++i) {
        raw[i - 1] = density_ratio(i, n);
        sum += (i == levels) ? raw[i - 1] : 2.0 * raw[i - 1];
    }
    std::vector<double> weights(n);
    for (int i = 0; i < levels; ++i) {
        const double w = raw[i] / sum;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    return weights;
}

double density_ratio(int level, int n) {
    check_n(n);
    if (level < 1 || level > (n + 1) / 2)
        throw std::invalid_argument("density_ratio: level out of range");
    return 2.0 * level / (n + 1.0);
}

SampleSet make_sample_set(int n, Family f) {
    SampleSet set;
    set.n = n;
    set.family = f;
    set.offsets = make_sample_offsets(n, f);
    set.weights = normalized_weights(n);
    return set;
}

std::vector<DepthMap> sample_depths(const EtaMap& eta, const SampleSet& set) {
    if (set.family != eta.family)
        throw std::invalid_argument("sample_depths: sample set built for another family");
    std::vector<DepthMap> maps;
    maps.reserve(set.n);
    const double scale = dgamma_dsigma(eta.family);
    for (int k = 0; k < set.n; ++k) {
        DepthMap m(eta.width, eta.height);
        for (std::size_t i = 0; i < eta.size(); ++i) {
            const double g = scale * eta.sigma_at(i);
            const double s = eta.mu[i] + g * set.offsets[k];
            m.data[i] = s < kDepthFloor ? kDepthFloor : s;
        }
        maps.push_back(std::move(m));
    }
    return maps;
}

SampleGrad sample_depth_grad(const EtaMap& eta, const SampleSet& set,
                             int sample_index, std::size_t pixel) {
    const double scale = dgamma_dsigma(eta.family);
    const double o = set.offsets[sample_index];
    const double g = scale * eta.sigma_at(pixel);
    const double s = eta.mu[pixel] + g * o;
    SampleGrad grad;
    if (s < kDepthFloor) {
        grad.value = kDepthFloor;
        return grad; // clamped: zero gradient
    }
    grad.value = s;
    if (eta.mode == SpreadMode::alpha) {
        grad.d_mu = 1.0 + scale * eta.spread[pixel] * o;
        grad.d_spread = scale * eta.mu[pixel] * o;
    } else {
        grad.d_mu = 1.0;
        grad.d_spread = scale * o;
    }
    return grad;
}

} // namespace probdepth
