#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "lrising/toy.hpp"

using namespace lrising;

TEST_SUITE("toy")
{
    TEST_CASE("toy weights")
    {
        auto w = toy_weights(0.0, 1.0);
        CHECK(w.w_plus == 0.5);
        CHECK(w.w_minus == 0.5);
        CHECK(toy_weights(std::log(2.0) / 2.0, 1.0).w_plus == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
        auto big = toy_weights(1e6, 1.0);
        CHECK(big.w_plus == 1.0);
        CHECK(big.w_minus == 0.0);
        CHECK_THROWS(toy_weights(1.0, 0.0));
        double prev = -1.0;
        for (double W = -400; W <= 400; W += 0.37) {
            auto t = toy_weights(W, 0.9);
            CHECK(std::fabs(t.w_plus + t.w_minus - 1.0) <= 1e-12);
            CHECK(t.w_plus >= prev);
            prev = t.w_plus;
        }
    }

    TEST_CASE("toy distances")
    {
        auto d = toy_distances(0.0, 1.0);
        CHECK(d.to_plus == doctest::Approx(1.0));
        CHECK(d.to_minus == doctest::Approx(1.0));
        CHECK(toy_distances(5.0, 1.0).to_plus == doctest::Approx(2.0 / (1.0 + std::exp(10.0))).epsilon(1e-12));

        CHECK_THROWS(smallball_radius(1.5, 1.3));
        for (double tau : {0.05, 0.2, 0.5, 0.9}) {
            double r = smallball_radius(tau, 1.3);
            for (double W : {0.999 * r, -0.999 * r}) {
                auto t = toy_distances(W, 1.3);
                CHECK(std::min(t.to_plus, t.to_minus) >= tau);
            }
            for (double W : {1.001 * r + 1e-9, -1.001 * r - 1e-9}) {
                auto t = toy_distances(W, 1.3);
                CHECK(std::min(t.to_plus, t.to_minus) < tau);
            }
        }
    }

    TEST_CASE("toy distances agree with explicit marginals")
    {
        std::vector<int> X = {-1, 0, 2};
        for (double W : {-3.0, -0.2, 0.0, 0.7, 4.0}) {
            auto w = toy_weights(W, 0.8);
            auto mu = toy_marginal(X, w);
            auto d = toy_distances(W, 0.8);
            CHECK(window_distance(mu, point_mass(X, 1)) == doctest::Approx(d.to_plus).epsilon(1e-10));
            CHECK(window_distance(mu, point_mass(X, -1)) == doctest::Approx(d.to_minus).epsilon(1e-10));
        }
    }

    TEST_CASE("characteristic function basics")
    {
        ModelParams p{0.75, 1.0, 1.0, 4, 64};
        CharacteristicFunction psi(p);
        CHECK(psi(0.0).value == 1.0);
        for (double t = 0.05; t < 3.0; t += 0.11) {
            CHECK(psi(t).value == psi(-t).value);
            CHECK(std::fabs(psi(t).value) <= 1.0);
        }
    }

    TEST_CASE("characteristic function matches sampled cos(tW)")
    {
        ModelParams p{0.75, 1.0, 1.0, 4, 64};
        const double t = 0.3;
        auto W = ToySampler(p).sample(17, 1000000);
        double m = 0.0, m2 = 0.0;
        for (double w : W) {
            double c = std::cos(t * w);
            m += c;
            m2 += c * c;
        }
        const double n = double(W.size());
        m /= n;
        double se = std::sqrt((m2 / n - m * m) / n);
        CHECK(std::fabs(m - characteristic_function(t, p).value) <= 3.0 * se);
    }

    TEST_CASE("sampler replays through make_boundary")
    {
        ModelParams p{0.6, 1.0, 1.0, 9, 150};
        auto W = ToySampler(p).sample(5, 40);
        for (std::size_t i = 0; i < W.size(); ++i) {
            auto eta = make_boundary(BcKind::random, p.N, p.Y, 5, toy_stream(p.N, i));
            CHECK(W[i] == doctest::Approx(boundary_energy(eta, p).W).epsilon(1e-10));
        }
    }

    TEST_CASE("cosine bound constant")
    {
        CHECK(verify_delta_cos(kDeltaCos));
    }

    TEST_CASE("wllt schedule")
    {
        CHECK_THROWS_AS(wllt_schedule(ModelParams{0.5, 1.0, 1.0, 16, 256}), std::domain_error);
        auto s = wllt_schedule(ModelParams{0.75, 1.0, 1.0, 64, 1024});
        CHECK(s.A_N <= std::sqrt(12.0) * std::pow(64.0, 0.25));
        CHECK(s.below_bound);
        auto s2 = wllt_schedule(ModelParams{0.75, 1.0, 1.0, 128, 2048});
        CHECK(s2.tau_N / s.tau_N == doctest::Approx(std::pow(2.0, 0.25)).epsilon(1e-12));
        CHECK(s.tau_N == doctest::Approx(1.5 * 0.25 / 1.25 * std::pow(64.0, 0.25)).epsilon(1e-12));

        std::vector<WlltSchedule> rows;
        for (int N : {16, 32, 64, 128, 256})
            rows.push_back(wllt_schedule(ModelParams{0.75, 1.0, 1.0, N, 16 * N}));
        CHECK(speed_condition_decreasing(rows));
    }

    TEST_CASE("A_N by direct summation")
    {
        const int N = 16, Y = 100000;
        const double a = 0.8;
        auto s = wllt_schedule(ModelParams{a, 1.0, 1.0, N, Y});
        long double acc = 0.0L;
        for (int y = 2 * N + 1; y <= Y; ++y) {
            long double S = 0.0L;
            for (int x = -N; x <= N; ++x) {
                int d = y - x;
                S += d == 1 ? 1.0L : std::pow(static_cast<long double>(d), a - 2.0L);
            }
            acc += 2.0L * S * S;
        }
        CHECK(s.A_N == doctest::Approx(double(std::sqrt(acc))).epsilon(1e-9));
        CHECK(s.A_N < s.A_bound);
    }

    TEST_CASE("wllt integral")
    {
        for (int N : {16, 64, 256}) {
            auto r = wllt_integral_check(ModelParams{0.75, 1.0, 1.0, N, 16 * N});
            CHECK(r.value > 0.0);
            CHECK(r.value <= 2.0 * M_PI * 1.05);
            CHECK(r.gaussian <= std::sqrt(2.0 * M_PI));
            CHECK(r.error < 1e-6);
        }
    }

    TEST_CASE("least squares recovers a line")
    {
        std::vector<double> x = {1, 2, 3, 4, 5}, y;
        for (double v : x)
            y.push_back(2.5 - 0.7 * v);
        auto f = least_squares(x, y);
        CHECK(f.slope == doctest::Approx(-0.7));
        CHECK(f.intercept == doctest::Approx(2.5));
        CHECK(f.slope_stderr == doctest::Approx(0.0).epsilon(1e-9));
    }

    TEST_CASE("small ball estimates")
    {
        CHECK_THROWS(smallball_scaling_experiment(0.75, 1.0, 1.0, {64}, 100, 1, 16, 0));
        auto r = smallball_scaling_experiment(0.75, 0.0, 1.0, {64, 128}, 10000, 1, 16, 0);
        for (const auto& row : r.rows) {
            CHECK(row.p <= 0.01);
            CHECK(row.quantiles.size() == 99);
        }
    }

    TEST_CASE("sampled variance matches the exact variance")
    {
        auto r = variance_scaling_experiment(0.6, {32, 256}, 40000, 3, 16, 0, 50);
        for (const auto& row : r.rows)
            CHECK(std::fabs(row.var - row.exact_var) <= 4.0 * row.boot_stderr);
    }

    TEST_CASE("toy histogram symmetry")
    {
        for (double a : {0.25, 0.75}) {
            auto h = toy_metastate_histogram(a, 1.0, 256, 20000, 9, 4096);
            double total = 0.0;
            for (double m : h.mass)
                total += m;
            CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(std::fabs(h.mean - 0.5) <= 3.0 * h.stderr_mean);
        }
    }
}
