#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "pimhem/poisson_ar1.hpp"
#include "pimhem/quadrature.hpp"
#include "pimhem/rng.hpp"

using namespace pimhem;

namespace {

/// Solve L z = x by forward substitution (L lower triangular, row-major).
std::vector<double> forward_solve(const std::vector<double>& L,
                                  const std::vector<double>& x) {
    const std::size_t n = x.size();
    std::vector<double> z(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = x[i];
        for (std::size_t k = 0; k < n && k < i; ++k) s -= L[i * n + k] * z[k];
        z[i] = s / L[i * n + i];
    }
    return z;
}

}  // namespace

TEST_CASE("stationary_cholesky reproduces the covariance") {
    const std::size_t n = 4;
    const double rho = 0.7, sigma2 = 1.3;
    auto L = stationary_cholesky(n, rho, sigma2);
    const double var = sigma2 / (1.0 - rho * rho);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < n; ++k) s += L[i * n + k] * L[j * n + k];
            const double expect =
                var * std::pow(rho, std::abs(static_cast<double>(i) -
                                             static_cast<double>(j)));
            CHECK(s == doctest::Approx(expect).epsilon(1e-12));
        }
    }
}

TEST_CASE("complete_loglik matches the dense multivariate-normal exponent") {
    RngStream rng(11);
    for (std::size_t n : {std::size_t{1}, std::size_t{2}, std::size_t{6}}) {
        Dataset data;
        for (std::size_t i = 0; i < n; ++i)
            data.y.push_back(static_cast<long>(5.0 * rng.uniform()));
        ModelParams params{0.7, 0.4, 1.2};
        auto L = stationary_cholesky(n, params.rho, params.sigma2);
        for (int rep = 0; rep < 100; ++rep) {
            std::vector<double> x(n);
            for (auto& v : x) v = 3.0 * rng.normal();
            double obs = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                obs += data.y[i] * (params.alpha + x[i]) -
                       std::exp(params.alpha + x[i]);
            auto z = forward_solve(L, x);
            double quad = 0.0;
            for (double v : z) quad += v * v;
            CHECK(complete_loglik(x, data, params) ==
                  doctest::Approx(obs - 0.5 * quad).epsilon(1e-8));
        }
    }
}

TEST_CASE("complete_loglik gradient agrees with finite differences") {
    Dataset data;
    data.y = {2, 0, 5, 1};
    ModelParams params{0.3, 0.5, 0.9};
    std::vector<double> x = {0.4, -0.2, 1.1, 0.0};
    const double r2 = params.rho * params.rho;
    const double h = 1e-6;
    for (std::size_t i = 0; i < 4; ++i) {
        // analytic: y_i - exp(alpha + x_i) - (Q x)_i with Q the AR(1) precision
        double qx = 0.0;
        if (i == 0)
            qx = x[0] - params.rho * x[1];
        else if (i == 3)
            qx = x[3] - params.rho * x[2];
        else
            qx = (1.0 + r2) * x[i] - params.rho * (x[i - 1] + x[i + 1]);
        const double grad = data.y[i] - std::exp(params.alpha + x[i]) -
                            qx / params.sigma2;
        auto xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        const double fd = (complete_loglik(xp, data, params) -
                           complete_loglik(xm, data, params)) /
                          (2.0 * h);
        CHECK(fd == doctest::Approx(grad).epsilon(1e-6));
    }
}

TEST_CASE("sufficient_stat: exact values and log-domain branch") {
    CHECK(sufficient_stat({0.0, 0.0, 0.0}) == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(sufficient_stat({std::log(2.0), std::log(3.0)}) ==
          doctest::Approx(5.0).epsilon(1e-14));
    RngStream rng(8);
    for (int rep = 0; rep < 50; ++rep) {
        std::vector<double> x(10);
        double naive = 0.0;
        for (auto& v : x) {
            v = 4.0 * rng.normal();
            naive += std::exp(v);
        }
        CHECK(sufficient_stat(x) == doctest::Approx(naive).epsilon(1e-12));
    }
    // above the switch point the two branches must agree
    std::vector<double> big = {35.0, 34.0, 33.0};
    double direct = std::exp(35.0) + std::exp(34.0) + std::exp(33.0);
    CHECK(sufficient_stat(big) == doctest::Approx(direct).epsilon(1e-12));
    CHECK_THROWS_AS(sufficient_stat({800.0}), std::runtime_error);
    CHECK_THROWS_AS(sufficient_stat({}), std::invalid_argument);
    CHECK_THROWS_AS(sufficient_stat({std::nan("")}), std::invalid_argument);
}

TEST_CASE("zeta_hat identities") {
    CHECK(zeta_hat(10.0, 10.0) == 0.0);
    const double theta = 3.7, yb = 42.0;
    CHECK(std::exp(zeta_hat(theta, yb)) * theta == doctest::Approx(yb));
    CHECK_THROWS_AS(zeta_hat(0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(zeta_hat(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("likelihood_lower_bound: closed form and dominance") {
    Dataset d0;
    d0.y = {0};
    ModelParams p0{0.0, 0.0, 1.0};
    CHECK(likelihood_lower_bound(d0, p0) ==
          doctest::Approx(-std::exp(0.5)).epsilon(1e-14));
    CHECK(likelihood_lower_bound(d0, p0) == doctest::Approx(-1.64872).epsilon(1e-5));

    QuadratureSpec quad{60, 3};
    RngStream rng(13);
    for (int rep = 0; rep < 5; ++rep) {
        Dataset d;
        const std::size_t n = 1 + rep % 3;
        for (std::size_t i = 0; i < n; ++i)
            d.y.push_back(static_cast<long>(4.0 * rng.uniform()));
        ModelParams p{rng.normal() * 0.5, 0.4, 1.0};
        const double exact = posterior_moments(d, p, quad).log_likelihood;
        CHECK(likelihood_lower_bound(d, p) <= exact + 1e-10);
    }
}

TEST_CASE("m_theta value and Monte Carlo agreement") {
    CHECK(m_theta(100, 0.4, 1.0) ==
          doctest::Approx(100.0 * std::exp(1.0 / 1.68)).epsilon(1e-14));
    CHECK(m_theta(100, 0.4, 1.0) == doctest::Approx(181.35).epsilon(1e-3));
    CHECK_THROWS_AS(m_theta(0, 0.4, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(m_theta(10, 1.0, 1.0), std::invalid_argument);

    ModelParams p{0.0, 0.4, 1.0};
    RngStream rng(99);
    const int reps = 20000;
    double acc = 0.0;
    for (int r = 0; r < reps; ++r) {
        auto d = simulate(p, 5, rng);
        acc += sufficient_stat(*d.true_x);
    }
    const double mc = acc / reps;
    CHECK(mc == doctest::Approx(m_theta(5, 0.4, 1.0)).epsilon(0.05));
}

TEST_CASE("drift_V and the q(V) closed-form bound") {
    PfOutput pf;
    pf.n = 1;
    pf.N = 2;
    pf.particles = {0.0, 0.0};
    CHECK(drift_V(pf) == 2.0);
    pf.particles = {1.0, -1.0};
    CHECK(drift_V(pf) == doctest::Approx(2.0 * std::exp(2.0)).epsilon(1e-14));
    pf.particles = {400.0, 0.0};
    CHECK_THROWS_AS(drift_V(pf), std::runtime_error);

    CHECK(qV_upper_bound(2, 3, 0.0, 1.0) ==
          doctest::Approx(36.0 * std::exp(2.0)).epsilon(1e-14));
    CHECK(qV_upper_bound(2, 3, 0.0, 1.0) == doctest::Approx(265.99).epsilon(1e-4));
}

TEST_CASE("pimh_epsilon_lower_bound closed form at theta = total count") {
    Dataset d;
    d.y = {1, 2};
    // alpha_hat = 0 here, so the bound collapses to c1 * exp(-c2)
    const double eps = pimh_epsilon_lower_bound(3.0, d, 0.0, 1.0);
    const double expect = 0.5 * std::exp(-2.0 * std::exp(0.5));
    CHECK(eps == doctest::Approx(expect).epsilon(1e-13));
    CHECK(eps > 0.0);
    CHECK(eps < 1.0);
}

TEST_CASE("simulate: determinism and moments") {
    ModelParams p{std::log(10.0), 0.0, 0.01};
    RngStream r1(7), r2(7);
    auto d1 = simulate(p, 200, r1);
    auto d2 = simulate(p, 200, r2);
    CHECK(d1.y == d2.y);
    REQUIRE(d1.true_x.has_value());
    CHECK(*d1.true_x == *d2.true_x);
    CHECK(d1.alpha_true == p.alpha);

    RngStream r3(15);
    auto big = simulate(p, 20000, r3);
    CHECK(big.y_bar() / 20000.0 ==
          doctest::Approx(10.0 * std::exp(0.005)).epsilon(0.02));

    // lag-1 autocorrelation of the latent chain
    ModelParams pc{0.0, 0.8, 1.0};
    RngStream r4(16);
    auto dc = simulate(pc, 20000, r4);
    const auto& x = *dc.true_x;
    double num = 0.0, den = 0.0;
    for (std::size_t k = 1; k < x.size(); ++k) num += x[k] * x[k - 1];
    for (double v : x) den += v * v;
    CHECK(num / den == doctest::Approx(0.8).epsilon(0.05));
}

TEST_CASE("poisson_log_pmf examples") {
    CHECK(poisson_log_pmf(3, std::log(2.0)) ==
          doctest::Approx(3.0 * std::log(2.0) - 2.0 - std::log(6.0)).epsilon(1e-14));
    CHECK(poisson_log_pmf(0, 0.0) == doctest::Approx(-1.0).epsilon(1e-15));
    // stable at extreme means: plain pmf would overflow computing y!
    CHECK(std::isfinite(poisson_log_pmf(100000, 11.5)));
}

TEST_CASE("PoissonAr1Model: weights and the stationary initial draw") {
    Dataset d;
    d.y = {4, 1, 0};
    ModelParams p{1.1, 0.5, 0.7};
    PoissonAr1Model model(d, p);
    CHECK(model.length() == 3);
    for (std::size_t t = 1; t <= 3; ++t)
        CHECK(model.log_weight(0.3, t) ==
              doctest::Approx(poisson_log_pmf(d.y[t - 1], 1.1 + 0.3)).epsilon(1e-14));

    // sample_initial must preserve the stationary law despite the extra
    // pre-observation propagation step
    RngStream rng(21);
    const int reps = 40000;
    double s1 = 0.0, s2 = 0.0;
    for (int r = 0; r < reps; ++r) {
        const double x = model.sample_initial(rng);
        s1 += x;
        s2 += x * x;
    }
    const double mean = s1 / reps;
    const double var = s2 / reps - mean * mean;
    CHECK(std::abs(mean) < 0.03);  // ~5 standard errors
    CHECK(var == doctest::Approx(p.stationary_variance()).epsilon(0.05));

    // alpha updates propagate into the weights
    model.set_alpha(2.0);
    CHECK(model.log_weight(0.3, 1) ==
          doctest::Approx(poisson_log_pmf(4, 2.3)).epsilon(1e-14));
}

TEST_CASE("gauss_hermite: moments of exp(-x^2) up to degree 2m-1") {
    const double sqrt_pi = std::sqrt(M_PI);
    auto rule = gauss_hermite(5);
    const std::vector<double> exact = {sqrt_pi, sqrt_pi / 2.0,
                                       3.0 * sqrt_pi / 4.0,
                                       15.0 * sqrt_pi / 8.0,
                                       105.0 * sqrt_pi / 16.0};
    for (std::size_t k = 0; k < exact.size(); ++k) {
        double s = 0.0;
        for (std::size_t j = 0; j < rule.nodes.size(); ++j)
            s += rule.weights[j] * std::pow(rule.nodes[j], 2.0 * k);
        CHECK(s == doctest::Approx(exact[k]).epsilon(1e-12));
    }
    // odd moments vanish by symmetry
    double odd = 0.0;
    for (std::size_t j = 0; j < rule.nodes.size(); ++j)
        odd += rule.weights[j] * std::pow(rule.nodes[j], 3.0);
    CHECK(odd == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));

    auto big = gauss_hermite(40);
    double w_sum = 0.0;
    for (std::size_t j = 0; j < 40; ++j) {
        CHECK(big.weights[j] > 0.0);
        CHECK(big.nodes[j] == doctest::Approx(-big.nodes[39 - j]).epsilon(1e-12));
        w_sum += big.weights[j];
    }
    CHECK(w_sum == doctest::Approx(sqrt_pi).epsilon(1e-13));
}

TEST_CASE("posterior_moments: n = 1 against a trapezoid oracle") {
    Dataset d;
    d.y = {3};
    ModelParams p{0.5, 0.3, 0.8};
    const double s2 = p.stationary_variance();
    const double s = std::sqrt(s2);

    const int grid = 40001;
    const double lo = -12.0 * s, hi = 12.0 * s;
    const double h = (hi - lo) / (grid - 1);
    double den = 0.0, num = 0.0;
    for (int i = 0; i < grid; ++i) {
        const double x = lo + i * h;
        const double lf = poisson_log_pmf(3, p.alpha + x) -
                          0.5 * x * x / s2 -
                          0.5 * std::log(2.0 * M_PI * s2);
        const double f = std::exp(lf);
        const double w = (i == 0 || i == grid - 1) ? 0.5 : 1.0;
        den += w * f;
        num += w * f * std::exp(x);
    }
    den *= h;
    num *= h;

    QuadratureSpec quad{40, 3};
    auto m = posterior_moments(d, p, quad);
    CHECK(m.log_likelihood == doctest::Approx(std::log(den)).epsilon(1e-6));
    CHECK(m.posterior_mean_t == doctest::Approx(num / den).epsilon(1e-6));
}

TEST_CASE("posterior_moments: refinement stability for n = 3") {
    Dataset d;
    d.y = {2, 4, 1};
    ModelParams p{0.4, 0.4, 1.0};
    auto coarse = posterior_moments(d, p, QuadratureSpec{40, 3});
    auto fine = posterior_moments(d, p, QuadratureSpec{80, 3});
    CHECK(coarse.log_likelihood ==
          doctest::Approx(fine.log_likelihood).epsilon(1e-6));
    CHECK(coarse.posterior_mean_t ==
          doctest::Approx(fine.posterior_mean_t).epsilon(1e-6));
    Dataset too_long;
    too_long.y = {1, 1, 1, 1};
    CHECK_THROWS_AS((posterior_moments(too_long, p, QuadratureSpec{40, 3})),
                    std::invalid_argument);
}

TEST_CASE("mean_field_oracle brackets its root") {
    Dataset d;
    d.y = {2, 4, 1};
    QuadratureSpec quad{40, 3};
    const double mt = m_theta(3, 0.4, 1.0);
    double lo = 0.01 * mt, hi = 100.0 * mt;
    const double h_lo = mean_field_oracle(lo, d, 0.4, 1.0, quad);
    const double h_hi = mean_field_oracle(hi, d, 0.4, 1.0, quad);
    CHECK(h_lo > 0.0);
    CHECK(h_hi < 0.0);
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (mean_field_oracle(mid, d, 0.4, 1.0, quad) > 0.0 ? lo : hi) = mid;
    }
    const double root = 0.5 * (lo + hi);
    CHECK(std::abs(mean_field_oracle(root, d, 0.4, 1.0, quad)) < 1e-6);
}
