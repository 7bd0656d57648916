#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "lrising/contour.hpp"
#include "lrising/gibbs.hpp"

using namespace lrising;

namespace {

// independent brute-force site-0 magnetization
double brute_m0(const ModelParams& p, const BoundaryCondition& eta)
{
    const int N = p.N;
    auto J = [&](int x, int y) {
        int d = std::abs(x - y);
        return d == 0 ? 0.0 : (d == 1 ? p.J : std::pow(double(d), p.alpha - 2.0));
    };
    std::vector<double> E;
    std::vector<int> s0;
    for (std::uint64_t code = 0; code < (1ULL << (2 * N + 1)); ++code) {
        auto s = [&](int x) { return ((code >> (x + N)) & 1) ? -1 : 1; };
        double H = 0.0;
        for (int x = -N; x <= N; ++x) {
            for (int y = x + 1; y <= N; ++y)
                H -= J(x, y) * s(x) * s(y);
            for (int y = N + 1; y <= eta.Y; ++y)
                H -= s(x) * (J(x, y) * eta.at(y) + J(x, -y) * eta.at(-y));
        }
        E.push_back(H);
        s0.push_back(s(0));
    }
    double Emin = *std::min_element(E.begin(), E.end());
    double Z = 0.0, M = 0.0;
    for (std::size_t i = 0; i < E.size(); ++i) {
        double w = std::exp(-p.beta * (E[i] - Emin));
        Z += w;
        M += w * s0[i];
    }
    return M / Z;
}

} // namespace

TEST_SUITE("gibbs")
{
    TEST_CASE("infinite temperature is uniform")
    {
        ModelParams p{0.5, 0.0, 1.0, 3, 20};
        auto ens = exact_measure(p, make_boundary(BcKind::random, 3, 20, 1, 1));
        for (double v : ens.marginal({-1, 0, 2}).probs)
            CHECK(v == doctest::Approx(0.125).epsilon(1e-12));
    }

    TEST_CASE("marginals flip with the boundary condition")
    {
        ModelParams p{0.6, 0.8, 1.0, 4, 30};
        auto eta = make_boundary(BcKind::random, 4, 30, 2, 0);
        auto a = exact_measure(p, eta).marginal({0, 1});
        auto b = exact_measure(p, eta.negated()).marginal({0, 1});
        auto bn = negate_patterns(b);
        for (std::size_t i = 0; i < a.probs.size(); ++i)
            CHECK(a.probs[i] == doctest::Approx(bn.probs[i]).epsilon(1e-12));
    }

    TEST_CASE("site-0 magnetization against brute force")
    {
        ModelParams p{0.4, 0.7, 1.0, 3, 24};
        auto eta = make_boundary(BcKind::random, 3, 24, 123, 9);
        CHECK(exact_measure(p, eta).magnetization()[3] == doctest::Approx(brute_m0(p, eta)).epsilon(1e-11));
    }

    TEST_CASE("restricted partition functions add up")
    {
        for (double beta : {0.0, 0.5, 3.0, 50.0}) {
            ModelParams p{0.75, beta, 1.0, 5, 40};
            auto ens = exact_measure(p, make_boundary(BcKind::random, 5, 40, 8, 8));
            CHECK(std::fabs(logsumexp(ens.logZ_plus, ens.logZ_minus) - ens.logZ) <= 1e-10);
        }
        CHECK_THROWS_AS(exact_measure(ModelParams{0.5, 1.0, 1.0, 12, 20},
                                      make_boundary(BcKind::free, 12, 20)),
                        std::length_error);
    }

    TEST_CASE("monte carlo agrees with enumeration")
    {
        ModelParams p{0.5, 0.4, 1.0, 4, 40};
        auto eta = make_boundary(BcKind::random, 4, 40, 3, 1);
        auto mc = mc_measure(p, eta, 40000, 1000, 5);
        double exact = exact_measure(p, eta).magnetization()[4];
        CHECK(mc.magnetization0.std_error > 0.0);
        CHECK(std::fabs(mc.magnetization0.value - exact) <= 3.0 * mc.magnetization0.std_error);
        CHECK_THROWS(mc_measure(p, eta, 10, 10, 1));
    }

    TEST_CASE("heat bath satisfies detailed balance")
    {
        ModelParams p{0.3, 0.9, 1.0, 3, 15};
        auto eta = make_boundary(BcKind::random, 3, 15, 6, 2);
        auto h = boundary_fields(eta, p);
        for (std::uint64_t code = 0; code < 128; code += 5)
            for (int x = -3; x <= 3; ++x) {
                auto s = SpinConfig::from_code(3, code);
                auto t = s;
                t.at(x) = -s.at(x);
                double L = h[x + 3];
                for (int y = -3; y <= 3; ++y)
                    if (y != x)
                        L += coupling(x, y, p) * s.at(y);
                double ps = std::exp(-p.beta * hamiltonian(s, eta, p));
                double pt = std::exp(-p.beta * hamiltonian(t, eta, p));
                double up = heat_bath_plus(L, p.beta);
                double to_t = s.at(x) > 0 ? 1.0 - up : up;
                double to_s = s.at(x) > 0 ? up : 1.0 - up;
                CHECK(ps * to_t == doctest::Approx(pt * to_s).epsilon(1e-12));
            }
    }

    TEST_CASE("monte carlo at infinite temperature is uniform")
    {
        ModelParams p{0.5, 0.0, 1.0, 4, 20};
        auto mc = mc_measure(p, make_boundary(BcKind::random, 4, 20, 1, 1), 20000, 100, 2, {0, 1});
        for (std::size_t i = 0; i < 4; ++i)
            CHECK(std::fabs(mc.marginal.probs[i] - 0.25) <= 3.0 * mc.marginal_std_error[i] + 1e-3);
    }

    TEST_CASE("free energy difference")
    {
        ModelParams p{0.75, 1.0, 1.0, 4, 64};
        CHECK(free_energy_difference(p, make_boundary(BcKind::free, 4, 64)).F == 0.0);
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            auto eta = make_boundary(BcKind::random, 4, 64, seed, 3);
            auto f = free_energy_difference(p, eta);
            CHECK(free_energy_difference(p, eta.negated()).F == -f.F);
            CHECK(f.F - f.W == doctest::Approx(f.xi_part));
        }
        auto eta = make_boundary(BcKind::random, 4, 64, 7, 3);
        double prev = 1e300;
        for (double beta : {5.0, 10.0, 20.0, 50.0}) {
            p.beta = beta;
            auto f = free_energy_difference(p, eta);
            double gap = std::fabs(f.F - f.W) / std::fabs(f.W);
            CHECK(gap <= std::max(prev, 1e-12));
            prev = gap;
            if (beta == 50.0)
                CHECK(gap < 1e-3);
        }
    }

    TEST_CASE("mixture weight and decomposition")
    {
        ModelParams p{0.6, 1.0, 1.0, 4, 50};
        CHECK(mixture_weight(p, make_boundary(BcKind::free, 4, 50)) == 0.5);
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            auto eta = make_boundary(BcKind::random, 4, 50, seed, 0);
            auto ens = exact_measure(p, eta);
            double lam = mixture_weight(ens);
            CHECK(lam >= 0.0);
            CHECK(lam <= 1.0);
            CHECK(mixture_weight(p, eta.negated()) == doctest::Approx(1.0 - lam).epsilon(1e-14));
            auto mu = ens.marginal({0, 1}), np = ens.marginal({0, 1}, 1), nm = ens.marginal({0, 1}, -1);
            for (std::size_t i = 0; i < 4; ++i)
                CHECK(std::fabs(mu.probs[i] - (lam * nm.probs[i] + (1 - lam) * np.probs[i])) <= 1e-12);
        }
        ModelParams cold{0.6, 10.0, 1.0, 4, 50};
        CHECK(mixture_weight(cold, make_boundary(BcKind::all_plus, 4, 50)) < 1e-6);
    }

    TEST_CASE("constrained measures")
    {
        ModelParams p{0.5, 20.0, 1.0, 5, 10};
        auto nu = constrained_measure(p, make_boundary(BcKind::free, 5, 10), 1, {0});
        CHECK(nu.probs[1] >= 0.999);

        ModelParams q{0.7, 0.9, 1.0, 4, 30};
        auto eta = make_boundary(BcKind::random, 4, 30, 4, 4);
        auto a = constrained_measure(q, eta, 1, {-1, 0, 3});
        auto b = negate_patterns(constrained_measure(q, eta.negated(), -1, {-1, 0, 3}));
        for (std::size_t i = 0; i < a.probs.size(); ++i)
            CHECK(a.probs[i] == doctest::Approx(b.probs[i]).epsilon(1e-12));

        // beta = 0: counting over Omega+
        ModelParams z{0.7, 0.0, 1.0, 3, 10};
        auto c = constrained_measure(z, make_boundary(BcKind::random, 3, 10, 1, 1), 1, {0, 1});
        std::vector<double> count(4, 0.0);
        double total = 0.0;
        for (std::uint64_t code = 0; code < 128; ++code) {
            auto s = SpinConfig::from_code(3, code);
            if (omega_sign(s) != 1)
                continue;
            count[(s.at(0) > 0 ? 2 : 0) + (s.at(1) > 0 ? 1 : 0)] += 1.0;
            total += 1.0;
        }
        for (std::size_t i = 0; i < 4; ++i)
            CHECK(c.probs[i] == doctest::Approx(count[i] / total).epsilon(1e-12));
    }

    TEST_CASE("plus reference")
    {
        ModelParams z{0.3, 0.0, 1.0, 3, 10};
        for (double v : plus_reference_marginal(z, {0, 1}).probs)
            CHECK(v == doctest::Approx(0.25).epsilon(1e-12));
        ModelParams p{0.3, 2.0, 1.0, 7, 112};
        CHECK(proxy_drift(p, {0}) < 0.05);

        ModelParams q{0.6, 1.1, 1.0, 4, 20};
        auto plus = plus_reference_marginal(q, {0, 2});
        auto minus = exact_measure(q, make_boundary(BcKind::all_minus, 4, 20)).marginal({0, 2});
        auto neg = negate_patterns(plus);
        for (std::size_t i = 0; i < 4; ++i)
            CHECK(minus.probs[i] == doctest::Approx(neg.probs[i]).epsilon(1e-12));
    }
}
