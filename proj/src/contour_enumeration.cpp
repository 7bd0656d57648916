#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "lrising/contour.hpp"
#include "lrising/rng.hpp"

namespace lrising {

namespace {

double binomial(int n, int k)
{
    double r = 1.0;
    for (int i = 1; i <= k; ++i)
        r = r * (n - k + i) / i;
    return r;
}

// Calls fn with sigma = -1 on every subset of at most k_max sites of [-N, N].
void for_each_sparse_config(int N, int k_max, const std::function<void(const SpinConfig&)>& fn)
{
    SpinConfig s(N, 1);
    const int n = 2 * N + 1;
    std::function<void(int, int)> rec = [&](int start, int left) {
        fn(s);
        if (left == 0)
            return;
        for (int i = start; i < n; ++i) {
            s.s[i] = -1;
            rec(i + 1, left - 1);
            s.s[i] = 1;
        }
    };
    rec(0, k_max);
}

double sparse_config_count(int N, int k_max)
{
    double total = 0.0;
    for (int k = 0; k <= k_max; ++k)
        total += binomial(2 * N + 1, k);
    return total;
}

} // namespace

PeierlsReport peierls_check(double alpha, int M_max, const ModelParams& p, double c)
{
    if (!(alpha >= 0.0 && alpha < alpha_plus()))
        throw std::domain_error("peierls_check needs 0 <= alpha < log3/log2 - 1");
    if (sparse_config_count(p.N, M_max) > 5e7)
        throw std::length_error("peierls_check: enumeration too large, lower M_max or N");
    ModelParams q = p;
    q.alpha = alpha;
    CouplingTable J(q, 2 * q.N);
    PeierlsReport r;
    const double inf = std::numeric_limits<double>::infinity();
    r.min_ratio_by_cutoff.assign(M_max + 1, inf);
    r.min_ratio = inf;
    r.min_ratio_interior = inf;
    for_each_sparse_config(q.N, M_max, [&](const SpinConfig& s) {
        ++r.configs_visited;
        TriangleSet ts = triangles_from_config(s);
        if (ts.triangles.empty() || ts.ext_sign != 1)
            return;
        int mass = 0;
        bool boundary = false;
        for (const auto& t : ts.triangles) {
            mass += t.mass();
            boundary = boundary || t.left_boundary || t.right_boundary;
        }
        if (mass > M_max)
            return;
        ContourSet cs = group_contours(ts.triangles, c);
        if (cs.contours.size() != 1)
            return;
        if (++r.contours > 10000000)
            throw std::length_error("peierls_check: more than 1e7 contours");
        double ratio = free_energy_indicator(s, J) / contour_norm(ts.triangles, alpha);
        for (int M = mass; M <= M_max; ++M)
            r.min_ratio_by_cutoff[M] = std::min(r.min_ratio_by_cutoff[M], ratio);
        if (ratio < r.min_ratio) {
            r.min_ratio = ratio;
            r.argmin = ts.triangles;
        }
        if (!boundary)
            r.min_ratio_interior = std::min(r.min_ratio_interior, ratio);
    });
    r.zeta_hat = 2.0 * r.min_ratio;
    r.zeta_hat_interior = 2.0 * r.min_ratio_interior;
    return r;
}

namespace {

struct Block
{
    int L = 0; // hull length, base of the outer triangle
    int mass = 0;
    std::vector<Triangle> tris; // hull starts at site 0
    std::vector<int> masses;
};

std::vector<Block> block_catalog(int m_max, double c)
{
    std::vector<Block> out;
    for (int L = 1; L <= m_max; ++L) {
        for (std::uint32_t code = 0; code < (1u << L); ++code) {
            if (!(code & 1u) || !((code >> (L - 1)) & 1u))
                continue;
            auto spin = [&](int x) { return (x >= 0 && x < L && ((code >> x) & 1u)) ? -1 : 1; };
            std::vector<int> flips;
            for (int f = -1; f < L; ++f)
                if (spin(f) != spin(f + 1))
                    flips.push_back(f);
            std::vector<Triangle> tris = grow_triangles(flips, 0, false);
            Block b;
            b.L = L;
            bool has_outer = false;
            for (const auto& t : tris) {
                b.mass += t.mass();
                b.masses.push_back(t.mass());
                has_outer = has_outer || (t.lo == 0 && t.hi == L - 1);
            }
            if (!has_outer || b.mass > m_max)
                continue;
            if (group_contours(tris, c).contours.size() != 1)
                continue;
            b.tris = tris;
            std::sort(b.masses.begin(), b.masses.end());
            out.push_back(b);
        }
    }
    return out;
}

class ShapeCounter
{
  public:
    ShapeCounter(const std::vector<const Block*>& blocks, double c) : b_(blocks), c_(c)
    {
        k_ = static_cast<int>(b_.size());
        pos_.assign(k_, 0);
    }

    // number of admissible gap vectors
    double count(double work_limit, double& work)
    {
        if (k_ == 1)
            return 1.0;
        const int G = k_ - 1;
        std::vector<long> U(G);
        int total = 0;
        for (const Block* b : b_)
            total += b->mass;
        int left = 0;
        for (int i = 0; i < G; ++i) {
            left += b_[i]->mass;
            double m = std::min(left, total - left);
            U[i] = static_cast<long>(std::floor(c_ * m * m * m));
        }
        int j = static_cast<int>(std::max_element(U.begin(), U.end()) - U.begin());
        double outer = 1.0;
        for (int i = 0; i < G; ++i)
            if (i != j)
                outer *= static_cast<double>(U[i]);
        work += outer;
        if (work > work_limit)
            throw std::length_error("entropy census exceeds its work limit; lower m_max");
        std::vector<long> g(G, 1);
        double result = 0.0;
        while (true) {
            result += count_inner(g, j, U[j]);
            int i = 0;
            for (; i < G; ++i) {
                if (i == j)
                    continue;
                if (g[i] < U[i]) {
                    ++g[i];
                    break;
                }
                g[i] = 1;
            }
            if (i == G)
                break;
        }
        return result;
    }

  private:
    void place(const std::vector<long>& g)
    {
        pos_[0] = 0;
        for (int i = 1; i < k_; ++i)
            pos_[i] = pos_[i - 1] + b_[i - 1]->L + g[i - 1];
    }

    // the blocks grow independently exactly when growing them together
    // reproduces their triangles
    bool compatible()
    {
        flips_.clear();
        want_.clear();
        for (int i = 0; i < k_; ++i)
            for (const auto& t : b_[i]->tris) {
                flips_.push_back(t.lo - 1 + pos_[i]);
                flips_.push_back(t.hi + pos_[i]);
                want_.push_back({t.lo + pos_[i], t.hi + pos_[i]});
            }
        std::sort(flips_.begin(), flips_.end());
        std::vector<Triangle> got = grow_triangles(flips_, 0, false);
        if (got.size() != want_.size())
            return false;
        std::sort(want_.begin(), want_.end(), [](const auto& x, const auto& y) {
            return x.first != y.first ? x.first < y.first : x.second > y.second;
        });
        for (std::size_t i = 0; i < got.size(); ++i)
            if (got[i].lo != want_[i].first || got[i].hi != want_[i].second)
                return false;
        return true;
    }

    bool single()
    {
        // blocks are disjoint intervals, so only the distance rule can merge
        std::vector<int> root(k_), mass(k_);
        for (int i = 0; i < k_; ++i) {
            root[i] = i;
            mass[i] = b_[i]->mass;
        }
        bool merged = true;
        int clusters = k_;
        while (merged && clusters > 1) {
            merged = false;
            for (int a = 0; a < k_ && !merged; ++a)
                for (int b = a + 1; b < k_ && !merged; ++b) {
                    if (root[a] == root[b] || root[a] != a || root[b] != b)
                        continue;
                    long d = std::numeric_limits<long>::max();
                    for (int x = 0; x < k_; ++x)
                        for (int y = 0; y < k_; ++y)
                            if (root[x] == a && root[y] == b) {
                                int lo = std::min(x, y), hi = std::max(x, y);
                                d = std::min(d, pos_[hi] - pos_[lo] - b_[lo]->L);
                            }
                    double m = std::min(mass[a], mass[b]);
                    if (static_cast<double>(d) <= c_ * m * m * m) {
                        for (int x = 0; x < k_; ++x)
                            if (root[x] == b)
                                root[x] = a;
                        mass[a] += mass[b];
                        --clusters;
                        merged = true;
                    }
                }
        }
        return clusters == 1;
    }

    double count_inner(std::vector<long>& g, int j, long Uj)
    {
        auto compat_at = [&](long v) {
            g[j] = v;
            place(g);
            return compatible();
        };
        auto single_at = [&](long v) {
            g[j] = v;
            place(g);
            return single();
        };
        if (!compat_at(Uj))
            return 0.0;
        long lo = 1, hi = Uj;
        while (lo < hi) {
            long mid = (lo + hi) / 2;
            if (compat_at(mid))
                hi = mid;
            else
                lo = mid + 1;
        }
        long first = lo;
        if (!single_at(first))
            return 0.0;
        lo = first;
        hi = Uj;
        while (lo < hi) {
            long mid = (lo + hi + 1) / 2;
            if (single_at(mid))
                lo = mid;
            else
                hi = mid - 1;
        }
        return static_cast<double>(lo - first + 1);
    }

    std::vector<const Block*> b_;
    double c_;
    int k_ = 0;
    std::vector<long> pos_;
    std::vector<int> flips_;
    std::vector<std::pair<long, long>> want_;
};

} // namespace

ContourCensus::ContourCensus(int m_max, double c, double work_limit)
{
    if (m_max < 1 || m_max > 8)
        throw std::invalid_argument("ContourCensus: m_max must lie in [1, 8]");
    std::vector<Block> cat = block_catalog(m_max, c);
    double work = 0.0;
    std::vector<const Block*> seq;
    std::function<void(int)> rec = [&](int budget) {
        if (!seq.empty()) {
            ShapeCounter sc(seq, c);
            double n = sc.count(work_limit, work);
            if (n > 0.0) {
                std::vector<int> masses;
                double width = 0.0;
                for (const Block* b : seq) {
                    masses.insert(masses.end(), b->masses.begin(), b->masses.end());
                    width += b->L;
                }
                std::sort(masses.begin(), masses.end());
                weighted_[masses] += n * width;
                classes_[masses] += n;
            }
        }
        for (const Block& b : cat)
            if (b.mass <= budget) {
                seq.push_back(&b);
                rec(budget - b.mass);
                seq.pop_back();
            }
    };
    rec(m_max);
}

std::vector<EntropyRow> ContourCensus::evaluate(double alpha, double b) const
{
    int m_max = 0;
    for (const auto& kv : weighted_) {
        int m = 0;
        for (int x : kv.first)
            m += x;
        m_max = std::max(m_max, m);
    }
    std::vector<EntropyRow> rows(m_max);
    for (int m = 1; m <= m_max; ++m) {
        rows[m - 1].m = m;
        rows[m - 1].rhs = 2.0 * m * std::exp(-b * chi(m, alpha));
    }
    for (const auto& kv : weighted_) {
        int m = 0;
        for (int x : kv.first)
            m += x;
        rows[m - 1].lhs += kv.second * std::exp(-b * contour_norm_masses(kv.first, alpha));
        rows[m - 1].classes += classes_.at(kv.first);
    }
    return rows;
}

EntropyReport entropy_bound_check(double alpha, double b, int m_max, double c)
{
    ContourCensus census(m_max, c);
    EntropyReport r;
    r.rows = census.evaluate(alpha, b);
    for (const auto& row : r.rows)
        if (!(row.lhs <= row.rhs))
            r.holds = false;
    return r;
}

QuasiAdditivityReport quasi_additivity_check(double alpha, double c, std::size_t trials,
                                             std::uint64_t seed, int N, double J)
{
    if (c < find_min_c())
        throw std::invalid_argument("quasi_additivity_check: c below the minimal constant");
    ModelParams p{alpha, 1.0, J, N, N + 1};
    CouplingTable Jt(p, 2 * N);
    QuasiAdditivityReport r;
    r.K = K_c(alpha, c);
    r.K_minus = K_c_minus(alpha, c);
    static const double densities[] = {0.04, 0.08, 0.15, 0.3, 0.5};
    auto energy = [&](const std::vector<Triangle>& tris) {
        return free_energy_indicator(family_config(N, tris), Jt);
    };
    for (std::size_t trial = 0; trial < trials; ++trial) {
        CounterRng rng(seed, substream(0x7161, trial));
        double q = densities[trial % 5];
        std::vector<int> flips;
        for (int f = -N; f < N; ++f)
            if (rng.uniform() < q)
                flips.push_back(f);
        std::vector<Triangle> tris = grow_triangles(flips, N, true);
        ++r.trials;
        if (tris.empty())
            continue;
        ContourSet cs = group_contours(tris, c);
        std::vector<Contour> gs = contours_of(tris, cs);
        if (gs.size() > 1)
            ++r.multi_contour_families;
        double H_all = energy(tris);
        double sum_single = 0.0;
        bool bad1 = false, bad1m = false;
        for (std::size_t k = 0; k < gs.size(); ++k) {
            double Hk = energy(gs[k]);
            sum_single += Hk;
            std::vector<Triangle> rest;
            for (std::size_t l = 0; l < gs.size(); ++l)
                if (l != k)
                    rest.insert(rest.end(), gs[l].begin(), gs[l].end());
            double diff = H_all - energy(rest);
            r.min_ratio_first = std::min(r.min_ratio_first, diff / Hk);
            if (diff < r.K * Hk)
                bad1 = true;
            if (diff < r.K_minus * Hk)
                bad1m = true;
        }
        r.min_ratio_second = std::min(r.min_ratio_second, H_all / sum_single);
        r.violations_first += bad1;
        r.violations_first_minus += bad1m;
        r.violations_second += H_all < r.K * sum_single;
        r.violations_second_minus += H_all < r.K_minus * sum_single;
    }
    return r;
}

double field_cap(int x, int N, int n, double alpha, double eps)
{
    if (x < -N + n || x > N - n)
        return 0.0;
    double e = alpha - 1.5 + eps;
    return std::pow(static_cast<double>(N + x), e) + std::pow(static_cast<double>(N - x), e);
}

std::vector<RhoResult> rho_scan(const std::vector<double>& betas, double alpha, double a, double eps,
                                int N, int n, int M_max, double c, double J, bool minus_variant)
{
    if (!(alpha > 0.5 && alpha < 1.0))
        throw std::domain_error("rho_truncated needs 1/2 < alpha < 1");
    if (!(eps > 0.0 && eps < 1.0 - alpha))
        throw std::domain_error("rho_truncated needs 0 < eps < 1 - alpha");
    if (!(n >= 1 && n < std::pow(static_cast<double>(N), (alpha - 0.5) / 2.0)))
        throw std::domain_error("rho_truncated needs 1 <= n < N^{(alpha-1/2)/2}");
    if (sparse_config_count(N, M_max) > 5e7)
        throw std::length_error("rho_truncated: enumeration too large");
    ModelParams p{alpha, 1.0, J, N, N + 1};
    CouplingTable Jt(p, 2 * N);
    std::vector<double> cap(2 * N + 1);
    for (int x = -N; x <= N; ++x)
        cap[x + N] = field_cap(x, N, n, alpha, eps);
    std::vector<std::pair<double, double>> terms; // (H, field sum)
    for_each_sparse_config(N, M_max, [&](const SpinConfig& s) {
        TriangleSet ts = triangles_from_config(s);
        if (ts.triangles.empty() || ts.ext_sign != 1)
            return;
        int mass = 0;
        bool has0 = false;
        double field = 0.0;
        for (const auto& t : ts.triangles) {
            mass += t.mass();
            has0 = has0 || (t.lo <= 0 && 0 <= t.hi);
            for (int x = t.lo; x <= t.hi; ++x)
                field += cap[x + N];
        }
        if (mass > M_max || !has0)
            return;
        if (group_contours(ts.triangles, c).contours.size() != 1)
            return;
        terms.emplace_back(free_energy_indicator(s, Jt), field);
    });
    const double K = minus_variant ? K_c_minus(alpha, c) : K_c(alpha, c);
    std::vector<RhoResult> out;
    for (double beta : betas) {
        RhoResult r;
        r.K = K;
        r.contours = terms.size();
        for (const auto& [H, f] : terms)
            r.rho += std::exp(-a * beta * (2.0 * K - 1.0) * H + 2.0 * beta * f);
        out.push_back(r);
    }
    return out;
}

RhoResult rho_truncated(double beta, double alpha, double a, double eps, int N, int n, int M_max,
                        double c, double J, bool minus_variant)
{
    return rho_scan({beta}, alpha, a, eps, N, n, M_max, c, J, minus_variant).front();
}

} // namespace lrising
