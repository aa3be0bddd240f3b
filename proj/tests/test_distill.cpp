#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "probdepth/distill.hpp"
#include "probdepth/rng.hpp"

#include <cmath>

using namespace probdepth;

namespace {

GaussianPair single(double mu_t, double sigma_t, double mu_s, double sigma_s) {
    GaussianPair p;
    p.width = 1;
    p.height = 1;
    p.mu_t = {mu_t};
    p.sigma_t = {sigma_t};
    p.mu_s = {mu_s};
    p.sigma_s = {sigma_s};
    return p;
}

} // namespace

TEST_CASE("kl loss fixed points") {
    // matched distributions sit at the 0.5 floor (the verbatim form keeps
    // the +1/2 offset of the true KL)
    CHECK(kl_loss(single(10, 2, 10, 2)).mean == doctest::Approx(0.5).epsilon(1e-15));
    // one-sigma mean gap
    CHECK(kl_loss(single(10, 2, 12, 2)).mean == doctest::Approx(1.0).epsilon(1e-15));
    // mu_t=10 sigma_t=2 mu_s=11 sigma_s=1 -> log 2 + 2/8
    CHECK(kl_loss(single(10, 2, 11, 1)).mean ==
          doctest::Approx(std::log(2.0) + 0.25).epsilon(1e-14));
}

TEST_CASE("kl loss rejects non-positive sigmas") {
    CHECK_THROWS_AS(kl_loss(single(10, 0.0, 10, 1)), std::domain_error);
    CHECK_THROWS_AS(kl_loss(single(10, 1, 10, -2.0)), std::domain_error);
}

TEST_CASE("kl minus one half equals the closed-form Gaussian KL on random pairs") {
    Rng rng(101);
    for (int trial = 0; trial < 1000; ++trial) {
        const double mu_t = rng.uniform(0.5, 30.0), sigma_t = rng.uniform(0.05, 4.0);
        const double mu_s = rng.uniform(0.5, 30.0), sigma_s = rng.uniform(0.05, 4.0);
        const double lib = kl_loss(single(mu_t, sigma_t, mu_s, sigma_s)).mean;
        const double ref = oracle::gaussian_kl(mu_s, sigma_s, mu_t, sigma_t);
        CHECK(std::abs(lib - 0.5 - ref) < 1e-10);
    }
}

TEST_CASE("kl is uniquely minimized at the teacher parameters") {
    Rng rng(103);
    for (int trial = 0; trial < 200; ++trial) {
        const double mu_t = rng.uniform(1.0, 20.0), sigma_t = rng.uniform(0.1, 3.0);
        double mu_s = mu_t, sigma_s = sigma_t;
        switch (trial % 3) {
            case 0: mu_s += rng.uniform(0.01, 2.0); break;
            case 1: sigma_s *= rng.uniform(1.1, 3.0); break;
            case 2: sigma_s *= rng.uniform(0.2, 0.9); break;
        }
        CHECK(kl_loss(single(mu_t, sigma_t, mu_s, sigma_s)).mean > 0.5);
    }
}

TEST_CASE("nll loss values and stationary sigma") {
    std::vector<double> mu_t{10.0};
    CHECK(nll_loss({10.0}, {1.0}, mu_t).mean == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(nll_loss({11.0}, {1.0}, mu_t).mean == doctest::Approx(0.5).epsilon(1e-15));
    CHECK_THROWS_AS(nll_loss({10.0}, {0.0}, mu_t), std::domain_error);

    // 1-D minimization over sigma at fixed gap 0.3: scan confirms the
    // stationary point sits at sigma = 0.3
    const double gap = 0.3;
    double best_sigma = 0.0, best = 1e300;
    for (double s = 0.05; s < 1.0; s += 1e-4) {
        const double v = nll_loss({10.0 + gap}, {s}, mu_t).mean;
        if (v < best) {
            best = v;
            best_sigma = s;
        }
    }
    CHECK(best_sigma == doctest::Approx(gap).epsilon(1e-3));
    const auto g = nll_loss_grad({10.0 + gap}, {gap}, mu_t);
    CHECK(std::abs(g.d_sigma_s[0]) < 1e-12);
}

TEST_CASE("nll diverges to -inf as sigma -> 0 at zero gap") {
    std::vector<double> mu_t{5.0};
    double prev = 0.0;
    for (double s : {1e-2, 1e-4, 1e-6, 1e-8}) {
        const double v = nll_loss({5.0}, {s}, mu_t).mean;
        CHECK(v < prev);
        prev = v;
    }
}

TEST_CASE("both losses' gradients match finite differences") {
    Rng rng(107);
    for (int trial = 0; trial < 100; ++trial) {
        const double mu_t = rng.uniform(1.0, 20.0), sigma_t = rng.uniform(0.1, 3.0);
        const double mu_s = rng.uniform(1.0, 20.0), sigma_s = rng.uniform(0.1, 3.0);

        const auto kg = kl_loss_grad(single(mu_t, sigma_t, mu_s, sigma_s));
        const auto ng = nll_loss_grad({mu_s}, {sigma_s}, {mu_t});

        const double h = 1e-6;
        const auto fd = [&](auto&& f, double x) {
            return (f(x + h) - f(x - h)) / (2 * h);
        };
        const double kl_dmu = fd(
            [&](double m) { return kl_loss(single(mu_t, sigma_t, m, sigma_s)).mean; },
            mu_s);
        const double kl_dsig = fd(
            [&](double s) { return kl_loss(single(mu_t, sigma_t, mu_s, s)).mean; },
            sigma_s);
        const double nll_dmu =
            fd([&](double m) { return nll_loss({m}, {sigma_s}, {mu_t}).mean; }, mu_s);
        const double nll_dsig =
            fd([&](double s) { return nll_loss({mu_s}, {s}, {mu_t}).mean; }, sigma_s);

        const auto rel = [](double a, double b) {
            const double d = std::max(std::abs(a), std::abs(b));
            return d < 1e-12 ? 0.0 : std::abs(a - b) / d;
        };
        CHECK(rel(kg.d_mu_s[0], kl_dmu) < 1e-6);
        CHECK(rel(kg.d_sigma_s[0], kl_dsig) < 1e-6);
        CHECK(rel(ng.d_mu_s[0], nll_dmu) < 1e-6);
        CHECK(rel(ng.d_sigma_s[0], nll_dsig) < 1e-6);
    }
}

TEST_CASE("per-pixel maps: mean is the average of per_pixel") {
    Rng rng(109);
    GaussianPair p;
    p.width = 8;
    p.height = 4;
    for (int i = 0; i < 32; ++i) {
        p.mu_t.push_back(rng.uniform(1, 20));
        p.sigma_t.push_back(rng.uniform(0.1, 2));
        p.mu_s.push_back(rng.uniform(1, 20));
        p.sigma_s.push_back(rng.uniform(0.1, 2));
    }
    const auto loss = kl_loss(p);
    double sum = 0.0;
    for (double v : loss.per_pixel) sum += v;
    CHECK(loss.mean == doctest::Approx(sum / 32.0).epsilon(1e-14));
}
