#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "lrising/contour.hpp"
#include "lrising/rng.hpp"

using namespace lrising;

namespace {

SpinConfig from_string(const std::string& s)
{
    int N = static_cast<int>(s.size()) / 2;
    SpinConfig c(N, 1);
    for (int i = 0; i < c.size(); ++i)
        c.s[i] = s[i] == '+' ? 1 : -1;
    return c;
}

double row_sum(int x0, int N, double alpha, double J)
{
    double s = 0.0;
    for (int x = -N; x <= N; ++x) {
        int d = std::abs(x - x0);
        if (d)
            s += d == 1 ? J : std::pow(double(d), alpha - 2.0);
    }
    return s;
}

SpinConfig minus_at(int N, std::initializer_list<int> sites)
{
    SpinConfig s(N, 1);
    for (int x : sites)
        s.at(x) = -1;
    return s;
}

} // namespace

TEST_SUITE("contour")
{
    TEST_CASE("growth examples")
    {
        CHECK(triangles_from_config(SpinConfig(3, 1)).triangles.empty());

        auto t = triangles_from_config(from_string("+-+"));
        REQUIRE(t.triangles.size() == 1);
        CHECK(t.triangles[0].lo == 0);
        CHECK(t.triangles[0].hi == 0);
        CHECK(t.triangles[0].mass() == 1);
        CHECK_FALSE(t.triangles[0].left_boundary);
        CHECK_FALSE(t.triangles[0].right_boundary);
        CHECK(t.ext_sign == 1);

        auto b = triangles_from_config(from_string("--+++"));
        REQUIRE(b.triangles.size() == 1);
        CHECK(b.triangles[0].lo == -2);
        CHECK(b.triangles[0].hi == -1);
        CHECK(b.triangles[0].mass() == 2);
        CHECK(b.triangles[0].left_boundary);
        CHECK(b.triangles[0].x_minus == -2.0);
    }

    TEST_CASE("omega sign")
    {
        CHECK(omega_sign(SpinConfig(4, -1)) == -1);
        CHECK(omega_sign(from_string("+-+")) == 1);
        int plus = 0;
        for (std::uint64_t code = 0; code < 128; ++code)
            plus += omega_sign(SpinConfig::from_code(3, code)) == 1;
        CHECK(plus == 64);
    }

    TEST_CASE("bijection, triangle condition and flip symmetry for N <= 5")
    {
        for (int N = 1; N <= 5; ++N)
            for (std::uint64_t code = 0; code < (1ULL << (2 * N + 1)); ++code) {
                auto s = SpinConfig::from_code(N, code);
                auto ts = triangles_from_config(s);
                REQUIRE(config_from_triangles(N, ts.triangles, ts.ext_sign) == s);
                const auto& T = ts.triangles;
                for (std::size_t i = 0; i < T.size(); ++i)
                    for (std::size_t j = i + 1; j < T.size(); ++j)
                        REQUIRE(triangle_distance(T[i], T[j]) >= std::min(T[i].mass(), T[j].mass()));
                auto tf = triangles_from_config(s.flipped());
                REQUIRE(tf.ext_sign == -ts.ext_sign);
                REQUIRE(tf.triangles == ts.triangles);
            }
    }

    TEST_CASE("minimal grouping constant")
    {
        double c = find_min_c();
        CHECK(c >= 8.0 * M_PI * M_PI / 6.0);
        CHECK(c <= 20.0);
        CHECK(c_series(c) <= 0.5);
        CHECK(c_series(c + 1.0) <= 0.5);
        CHECK(c_series(c - 0.002) > 0.5);
        CHECK(default_c() == static_cast<int>(std::ceil(c)));
    }

    TEST_CASE("grouping examples")
    {
        const double c = default_c();
        auto one = triangles_from_config(minus_at(30, {0})).triangles;
        CHECK(group_contours(one, c).contours.size() == 1);

        // flip points 0.5 and 15.5 are 15 > c apart
        auto far = triangles_from_config(minus_at(30, {0, 16})).triangles;
        REQUIRE(far.size() == 2);
        CHECK(triangle_distance(far[0], far[1]) > c);
        CHECK(group_contours(far, c).contours.size() == 2);

        auto near = triangles_from_config(minus_at(30, {0, 2})).triangles;
        REQUIRE(near.size() == 2);
        CHECK(triangle_distance(near[0], near[1]) == 1);
        CHECK(group_contours(near, c).contours.size() == 1);
    }

    TEST_CASE("grouping does not depend on merge order")
    {
        const double c = default_c();
        CounterRng rng(11, 0);
        for (int trial = 0; trial < 1000; ++trial) {
            int N = 3 + trial % 6;
            double q = 0.05 + 0.4 * rng.uniform();
            SpinConfig s(N, 1);
            for (int x = -N + 1; x <= N; ++x)
                s.at(x) = rng.uniform() < q ? -s.at(x - 1) : s.at(x - 1);
            auto T = triangles_from_config(s).triangles;
            auto base = group_contours(T, c);
            REQUIRE(contours_valid(T, base));
            std::vector<int> order(T.size());
            std::iota(order.begin(), order.end(), 0);
            for (std::size_t i = order.size(); i > 1; --i)
                std::swap(order[i - 1], order[rng.next_u64() % i]);
            CHECK(group_contours(T, c, &order).contours == base.contours);
        }
    }

    TEST_CASE("contour energy")
    {
        ModelParams p{0.4, 1.0, 1.0, 8, 9};
        auto single = triangles_from_config(minus_at(8, {0})).triangles;
        CHECK(contour_energy(single, p) == doctest::Approx(row_sum(0, 8, 0.4, 1.0)).epsilon(1e-13));

        auto g = triangles_from_config(minus_at(8, {1, 2, 5})).triangles;
        auto r = triangles_from_config(minus_at(8, {-1, -2, -5})).triangles;
        CHECK(contour_energy(g, p) == doctest::Approx(contour_energy(r, p)).epsilon(1e-13));

        for (int L = 1; L <= 4; ++L) {
            SpinConfig bnd(8, 1), inner(8, 1);
            for (int i = 0; i < L; ++i) {
                bnd.at(-8 + i) = -1;
                inner.at(i) = -1;
            }
            auto tb = triangles_from_config(bnd).triangles;
            auto ti = triangles_from_config(inner).triangles;
            REQUIRE(tb.size() == 1);
            REQUIRE(ti.size() == 1);
            CHECK(tb[0].left_boundary);
            CHECK(contour_energy(tb, p) < contour_energy(ti, p));
        }
    }

    TEST_CASE("contour norm")
    {
        auto unit = triangles_from_config(minus_at(5, {0})).triangles;
        CHECK(contour_norm(unit, 0.3) == doctest::Approx(1.0));
        CHECK(contour_norm(unit, 0.0) == doctest::Approx(4.0));
        CHECK(contour_norm_masses({2, 3}, 0.5) == doctest::Approx(std::sqrt(2.0) + std::sqrt(3.0)));
    }

    TEST_CASE("peierls ratios")
    {
        ModelParams p{0.2, 1.0, 1.0, 12, 13};
        auto r = peierls_check(0.2, 8, p, default_c());
        CHECK(r.min_ratio > 0.0);
        CHECK(r.min_ratio <= r.min_ratio_interior);
        CHECK(r.min_ratio_interior <= row_sum(0, 12, 0.2, 1.0) + 1e-12);
        CHECK(r.contours > 0);
        CHECK_THROWS_AS(peierls_check(0.7, 4, p, default_c()), std::domain_error);
    }

    TEST_CASE("census agrees with brute force up to mass 4")
    {
        const double c = default_c();
        ContourCensus census(4, c);
        // translation classes: leftmost minus site at 0, window wide enough for mass 4
        const int W = 160;
        std::map<std::vector<int>, double> brute;
        std::vector<int> sites = {0};
        auto visit = [&]() {
            std::vector<int> flips;
            std::vector<char> minus(W + 2, 0);
            for (int x : sites)
                minus[x] = 1;
            for (int f = -1; f < W; ++f)
                if (minus[f + 1] != (f >= 0 ? minus[f] : 0))
                    flips.push_back(f);
            auto T = grow_triangles(flips, 0, false);
            std::vector<int> masses;
            int total = 0;
            for (const auto& t : T) {
                masses.push_back(t.mass());
                total += t.mass();
            }
            if (total > 4 || group_contours(T, c).contours.size() != 1)
                return;
            std::sort(masses.begin(), masses.end());
            brute[masses] += 1.0;
        };
        visit();
        for (int a = 1; a < W; ++a) {
            sites.push_back(a);
            visit();
            for (int b = a + 1; b < W; ++b) {
                sites.push_back(b);
                visit();
                for (int d = b + 1; d < W; ++d) {
                    sites.push_back(d);
                    visit();
                    sites.pop_back();
                }
                sites.pop_back();
            }
            sites.pop_back();
        }
        auto cls = census.classes();
        for (const auto& [k, v] : brute)
            if (cls[k] != v) {
                std::string key;
                for (int m : k)
                    key += std::to_string(m) + ",";
                MESSAGE("shape " << key << " brute " << v << " census " << cls[k]);
            }
        CHECK(brute == census.classes());
    }

    TEST_CASE("entropy sums")
    {
        ContourCensus census(3, default_c());
        auto rows = census.evaluate(0.3, 5.0);
        CHECK(rows[0].lhs == doctest::Approx(std::exp(-5.0 * chi(1, 0.3))));
        auto rows10 = census.evaluate(0.3, 10.0);
        for (std::size_t i = 0; i < rows.size(); ++i)
            CHECK(rows10[i].lhs < rows[i].lhs);
    }

    TEST_CASE("quasi-additivity constants")
    {
        CHECK(K_c(0.3, 1e12) == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(K_c_minus(0.3, 1e12) == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(K_c(0.3, default_c()) < 1.0);
        auto r = quasi_additivity_check(0.3, default_c(), 500, 4);
        CHECK(r.violations_first == 0);
        CHECK(r.violations_second == 0);
        CHECK(r.min_ratio_first >= r.K);
        CHECK_THROWS(quasi_additivity_check(0.3, 5.0, 10, 1));
    }

    TEST_CASE("rho single contour term")
    {
        const double c = default_c(), beta = 5.0, a = 0.75;
        auto r = rho_truncated(beta, a, 0.5, 0.1, 12, 1, 1, c);
        CHECK(r.contours == 1);
        double K = K_c(a, c);
        double expect = std::exp(-(beta / 2.0) * (2.0 * K - 1.0) * row_sum(0, 12, a, 1.0) +
                                 2.0 * beta * field_cap(0, 12, 1, a, 0.1));
        CHECK(r.rho == doctest::Approx(expect).epsilon(1e-12));
        CHECK(field_cap(0, 12, 1, a, 0.1) == doctest::Approx(2.0 * std::pow(12.0, a - 1.5 + 0.1)));
        CHECK_THROWS_AS(rho_truncated(beta, 0.4, 0.5, 0.1, 12, 1, 1, c), std::domain_error);
        CHECK_THROWS_AS(rho_truncated(beta, a, 0.5, 0.3, 12, 1, 1, c), std::domain_error);
        CHECK_THROWS_AS(rho_truncated(beta, a, 0.5, 0.1, 12, 2, 1, c), std::domain_error);
    }

    TEST_CASE("dump format")
    {
        auto T = triangles_from_config(from_string("--+-+")).triangles;
        auto text = dump_triangles(T, group_contours(T, default_c()));
        CHECK(text.find_first_of("LR") != std::string::npos);
    }
}
