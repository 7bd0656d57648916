#include "lrising/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>

#include "lrising/contour.hpp"
#include "lrising/parallel.hpp"
#include "lrising/rng.hpp"

namespace lrising {

double logsumexp(double a, double b)
{
    if (a == -std::numeric_limits<double>::infinity())
        return b;
    if (b == -std::numeric_limits<double>::infinity())
        return a;
    double m = std::max(a, b);
    return m + std::log1p(std::exp(-std::fabs(a - b)));
}

namespace {

constexpr std::size_t kChunk = 1024;

double log_sum(const std::vector<double>& lw, const std::vector<std::int8_t>* omega, int sign)
{
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < lw.size(); ++i)
        if (!omega || (*omega)[i] == sign)
            m = std::max(m, lw[i]);
    if (m == -std::numeric_limits<double>::infinity())
        return m;
    long double acc = 0.0L;
    for (std::size_t i = 0; i < lw.size(); ++i)
        if (!omega || (*omega)[i] == sign)
            acc += std::exp(static_cast<long double>(lw[i] - m));
    return m + static_cast<double>(std::log(acc));
}

void check_window(const std::vector<int>& window, int N)
{
    if (window.empty() || window.size() > 20)
        throw std::invalid_argument("window must hold between 1 and 20 sites");
    for (std::size_t i = 0; i < window.size(); ++i) {
        if (window[i] < -N || window[i] > N)
            throw std::invalid_argument("window site outside the volume");
        if (i > 0 && window[i] <= window[i - 1])
            throw std::invalid_argument("window must be strictly increasing");
    }
}

std::size_t pattern_of(std::uint64_t code, const std::vector<int>& window, int N)
{
    std::size_t pat = 0;
    for (int x : window)
        pat = (pat << 1) | (((code >> (x + N)) & 1ULL) ? 0u : 1u);
    return pat;
}

} // namespace

const std::vector<std::int8_t>& omega_table(int N)
{
    static std::mutex mu;
    static std::map<int, std::vector<std::int8_t>> cache;
    if (N < 1 || N > kMaxExactN)
        throw std::length_error("omega_table: N outside the exact range");
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(N);
    if (it != cache.end())
        return it->second;
    const std::size_t n = std::size_t{1} << (2 * N + 1);
    std::vector<std::int8_t> tab(n);
    parallel_for(n, [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i)
            tab[i] = static_cast<std::int8_t>(omega_sign(SpinConfig::from_code(N, i)));
    });
    return cache.emplace(N, std::move(tab)).first->second;
}

namespace {

// An eta whose first nonzero exterior sign is +1, or the free condition.
bool canonical_sign(const BoundaryCondition& eta)
{
    for (const auto* v : {&eta.right, &eta.left})
        for (int e : *v)
            if (e != 0)
                return e > 0;
    return true;
}

std::vector<double> log_weights(const ModelParams& p, const BoundaryCondition& eta)
{
    const int N = p.N;
    const int n = 2 * N + 1;
    const std::size_t total = std::size_t{1} << n;
    CouplingTable J(p, 2 * N);
    std::vector<double> h = boundary_fields(eta, p);
    std::vector<double> lw(total);
    const std::size_t per = std::min(total, kChunk);
    const std::size_t chunks = total / per;
    // Gray-code walk inside each chunk; fields are rebuilt at chunk starts.
    parallel_for(chunks, [&](std::size_t cb, std::size_t ce) {
        std::vector<int> s(n);
        std::vector<double> L(n);
        for (std::size_t c = cb; c < ce; ++c) {
            std::size_t k0 = c * per;
            std::uint64_t g = k0 ^ (k0 >> 1);
            for (int i = 0; i < n; ++i)
                s[i] = ((g >> i) & 1ULL) ? -1 : 1;
            double E = 0.0;
            for (int i = 0; i < n; ++i) {
                double acc = h[i];
                for (int j = 0; j < n; ++j)
                    if (j != i)
                        acc += J(std::abs(i - j)) * s[j];
                L[i] = acc;
                E -= s[i] * (h[i] + 0.5 * (acc - h[i]));
            }
            lw[g] = -p.beta * E;
            for (std::size_t k = k0 + 1; k < k0 + per; ++k) {
                int i = __builtin_ctzll(k);
                E += 2.0 * s[i] * L[i];
                const double delta = -2.0 * s[i];
                for (int j = 0; j < n; ++j)
                    if (j != i)
                        L[j] += J(std::abs(i - j)) * delta;
                s[i] = -s[i];
                g ^= std::uint64_t{1} << i;
                lw[g] = -p.beta * E;
            }
        }
    });
    if (std::all_of(h.begin(), h.end(), [](double v) { return v == 0.0; })) {
        // free condition: make the flip symmetry exact
        const std::size_t mask = total - 1;
        for (std::size_t i = 0; i < total / 2; ++i)
            lw[i ^ mask] = lw[i];
    }
    return lw;
}

} // namespace

ExactEnsemble exact_measure(const ModelParams& p, const BoundaryCondition& eta)
{
    p.validate();
    if (p.N > kMaxExactN)
        throw std::length_error("exact_measure: N > 11 is beyond enumeration, use mc_measure");
    if (eta.N != p.N)
        throw std::invalid_argument("exact_measure: boundary condition volume mismatch");
    ExactEnsemble ens;
    ens.params = p;
    ens.eta = eta;
    const std::size_t mask = (std::size_t{1} << (2 * p.N + 1)) - 1;
    // Weights for eta and -eta are exact mirror images, so that F and lambda
    // are exactly antisymmetric.
    if (canonical_sign(eta)) {
        ens.log_weight = log_weights(p, eta);
    } else {
        std::vector<double> lw = log_weights(p, eta.negated());
        ens.log_weight.resize(lw.size());
        for (std::size_t i = 0; i < lw.size(); ++i)
            ens.log_weight[i] = lw[i ^ mask];
    }
    const auto& omega = omega_table(p.N);
    const auto& lw = ens.log_weight;
    // Both restricted sums run over Omega+ indices in the same order.
    auto restricted = [&](bool flip) {
        double m = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < lw.size(); ++i)
            if (omega[i] == 1)
                m = std::max(m, lw[flip ? i ^ mask : i]);
        long double acc = 0.0L;
        for (std::size_t i = 0; i < lw.size(); ++i)
            if (omega[i] == 1)
                acc += std::exp(static_cast<long double>(lw[flip ? i ^ mask : i] - m));
        return m + static_cast<double>(std::log(acc));
    };
    ens.logZ_plus = restricted(false);
    ens.logZ_minus = restricted(true);
    ens.logZ = log_sum(lw, nullptr, 0);
    return ens;
}

MeasureMarginal ExactEnsemble::marginal(const std::vector<int>& window, int sign) const
{
    const int N = params.N;
    check_window(window, N);
    const auto& omega = omega_table(N);
    const double lz = sign == 0 ? logZ : (sign > 0 ? logZ_plus : logZ_minus);
    std::vector<long double> acc(std::size_t{1} << window.size(), 0.0L);
    for (std::size_t i = 0; i < log_weight.size(); ++i) {
        if (sign != 0 && omega[i] != sign)
            continue;
        acc[pattern_of(i, window, N)] += std::exp(static_cast<long double>(log_weight[i] - lz));
    }
    MeasureMarginal m;
    m.window = window;
    m.probs.assign(acc.begin(), acc.end());
    return m;
}

std::vector<double> ExactEnsemble::magnetization(int sign) const
{
    const int N = params.N;
    const int n = 2 * N + 1;
    const auto& omega = omega_table(N);
    const double lz = sign == 0 ? logZ : (sign > 0 ? logZ_plus : logZ_minus);
    std::vector<long double> acc(n, 0.0L);
    for (std::size_t i = 0; i < log_weight.size(); ++i) {
        if (sign != 0 && omega[i] != sign)
            continue;
        long double w = std::exp(static_cast<long double>(log_weight[i] - lz));
        for (int x = 0; x < n; ++x)
            acc[x] += ((i >> x) & 1ULL) ? -w : w;
    }
    return std::vector<double>(acc.begin(), acc.end());
}

double heat_bath_plus(double local_field, double beta)
{
    // 1 / (1 + e^{-2 beta L}), written to stay finite at large |beta L|
    double z = 2.0 * beta * local_field;
    if (z >= 0)
        return 1.0 / (1.0 + std::exp(-z));
    double e = std::exp(z);
    return e / (1.0 + e);
}

McResult mc_measure(const ModelParams& p, const BoundaryCondition& eta, std::size_t sweeps,
                    std::size_t burn_in, std::uint64_t seed, const std::vector<int>& window)
{
    p.validate();
    if (!(sweeps > burn_in))
        throw std::invalid_argument("mc_measure: sweeps must exceed burn_in");
    const int N = p.N;
    const int n = 2 * N + 1;
    check_window(window, N);
    CouplingTable J(p, 2 * N);
    std::vector<double> h = boundary_fields(eta, p);
    CounterRng rng(seed, substream(0x6d63, N));
    std::vector<int> s(n);
    for (int i = 0; i < n; ++i)
        s[i] = rng.uniform() < 0.5 ? 1 : -1;
    std::vector<double> L(n);
    for (int i = 0; i < n; ++i) {
        double acc = h[i];
        for (int j = 0; j < n; ++j)
            if (j != i)
                acc += J(std::abs(i - j)) * s[j];
        L[i] = acc;
    }
    const std::size_t measured = sweeps - burn_in;
    const std::size_t P = std::size_t{1} << window.size();
    std::vector<double> pattern_count(P, 0.0);
    std::vector<double> mag(n, 0.0);
    std::vector<double> m0_series;
    std::vector<std::vector<double>> pattern_series;
    m0_series.reserve(measured);
    std::vector<std::size_t> pats;
    pats.reserve(measured);
    for (std::size_t sweep = 0; sweep < sweeps; ++sweep) {
        for (int i = 0; i < n; ++i) {
            int ns = rng.uniform() < heat_bath_plus(L[i], p.beta) ? 1 : -1;
            if (ns != s[i]) {
                const double delta = 2.0 * ns;
                for (int j = 0; j < n; ++j)
                    if (j != i)
                        L[j] += J(std::abs(i - j)) * delta;
                s[i] = ns;
            }
        }
        if (sweep < burn_in)
            continue;
        for (int i = 0; i < n; ++i)
            mag[i] += s[i];
        m0_series.push_back(s[N]);
        std::size_t pat = 0;
        for (int x : window)
            pat = (pat << 1) | (s[x + N] > 0 ? 1u : 0u);
        pattern_count[pat] += 1.0;
        pats.push_back(pat);
    }

    // batch means over 20 batches, or fewer when the run is short
    auto batch_se = [&](const std::function<double(std::size_t)>& obs) {
        std::size_t B = std::min<std::size_t>(20, measured);
        std::size_t len = measured / B;
        if (B < 2 || len == 0)
            return 0.0;
        std::vector<double> means(B, 0.0);
        for (std::size_t b = 0; b < B; ++b) {
            for (std::size_t t = b * len; t < (b + 1) * len; ++t)
                means[b] += obs(t);
            means[b] /= static_cast<double>(len);
        }
        double mu = 0.0;
        for (double v : means)
            mu += v;
        mu /= static_cast<double>(B);
        double var = 0.0;
        for (double v : means)
            var += (v - mu) * (v - mu);
        var /= static_cast<double>(B - 1);
        return std::sqrt(var / static_cast<double>(B));
    };

    McResult r;
    r.marginal.window = window;
    r.marginal.probs.resize(P);
    r.marginal_std_error.resize(P);
    for (std::size_t k = 0; k < P; ++k) {
        r.marginal.probs[k] = pattern_count[k] / static_cast<double>(measured);
        r.marginal_std_error[k] = batch_se([&](std::size_t t) { return pats[t] == k ? 1.0 : 0.0; });
    }
    r.magnetization.resize(n);
    for (int i = 0; i < n; ++i)
        r.magnetization[i] = mag[i] / static_cast<double>(measured);
    r.magnetization0.value = r.magnetization[N];
    r.magnetization0.std_error = batch_se([&](std::size_t t) { return m0_series[t]; });
    r.magnetization0.samples = measured;
    r.magnetization0.burn_in = burn_in;
    r.magnetization0.seed = seed;
    return r;
}

FreeEnergy free_energy_difference(const ExactEnsemble& ens)
{
    const auto& p = ens.params;
    if (!(p.beta > 0.0))
        throw std::domain_error("free_energy_difference needs beta > 0");
    FreeEnergy f;
    f.F = (ens.logZ_plus - ens.logZ_minus) / (2.0 * p.beta);
    f.W = ens.eta.kind == BcKind::free ? 0.0 : boundary_energy(ens.eta, p).W;
    f.xi_part = f.F - f.W;
    return f;
}

FreeEnergy free_energy_difference(const ModelParams& p, const BoundaryCondition& eta)
{
    return free_energy_difference(exact_measure(p, eta));
}

double mixture_weight(const ExactEnsemble& ens)
{
    // 1 / (1 + Z+/Z-)
    double d = ens.logZ_plus - ens.logZ_minus;
    if (d >= 0)
        return std::exp(-d) / (1.0 + std::exp(-d));
    return 1.0 / (1.0 + std::exp(d));
}

double mixture_weight(const ModelParams& p, const BoundaryCondition& eta)
{
    return mixture_weight(exact_measure(p, eta));
}

MeasureMarginal constrained_measure(const ModelParams& p, const BoundaryCondition& eta, int sign,
                                    const std::vector<int>& window)
{
    if (sign != 1 && sign != -1)
        throw std::invalid_argument("constrained_measure: sign must be +1 or -1");
    return exact_measure(p, eta).marginal(window, sign);
}

MeasureMarginal plus_reference_marginal(const ModelParams& p, const std::vector<int>& window)
{
    return exact_measure(p, make_boundary(BcKind::all_plus, p.N, p.Y)).marginal(window);
}

double proxy_drift(const ModelParams& p, const std::vector<int>& window)
{
    ModelParams q = p;
    q.N = p.N - 2;
    q.Y = p.Y - 2;
    return window_distance(plus_reference_marginal(p, window), plus_reference_marginal(q, window));
}

MeasureMarginal negate_patterns(const MeasureMarginal& m)
{
    MeasureMarginal r = m;
    const std::size_t P = m.probs.size();
    for (std::size_t i = 0; i < P; ++i)
        r.probs[P - 1 - i] = m.probs[i];
    return r;
}

} // namespace lrising
