#include "lrising/metastate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_sf_gamma.h>

#include "lrising/contour.hpp"
#include "lrising/gibbs.hpp"
#include "lrising/parallel.hpp"
#include "lrising/rng.hpp"

namespace lrising {

namespace {

constexpr long kMaxVolume = 2147483647L;

void check_epsilon(double alpha, double epsilon)
{
    if (!(epsilon > 0.0 && epsilon < 1.0 - alpha))
        throw std::domain_error("epsilon must lie in (0, 1 - alpha)");
}

int largest_n_below(double bound)
{
    // largest integer strictly below bound
    double c = std::ceil(bound);
    return static_cast<int>(c) - 1;
}

double mean_of(const std::vector<double>& v)
{
    double s = 0.0;
    for (double x : v)
        s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double stderr_of(const std::vector<double>& v)
{
    if (v.size() < 2)
        return 0.0;
    double m = mean_of(v), s2 = 0.0;
    for (double x : v)
        s2 += (x - m) * (x - m);
    return std::sqrt(s2 / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

} // namespace

double tail_sum_upper(long m, double epsilon)
{
    if (m < 1 || !(epsilon > 0.0 && epsilon < 1.0))
        throw std::invalid_argument("tail_sum_upper needs m >= 1 and 0 < epsilon < 1");
    constexpr long S = 2000;
    long double acc = 0.0L;
    for (long l = m; l < m + S; ++l)
        acc += std::exp(-std::pow(static_cast<long double>(l), static_cast<long double>(epsilon)));
    // sum_{l >= L} f(l) <= f(L) + int_L^inf e^{-t^eps} dt = f(L) + Gamma(1/eps, L^eps) / eps
    const double L = static_cast<double>(m + S);
    const double x = std::pow(L, epsilon);
    gsl_sf_result res;
    gsl_error_handler_t* old = gsl_set_error_handler_off();
    int status = gsl_sf_gamma_inc_e(1.0 / epsilon, x, &res);
    gsl_set_error_handler(old);
    double integral = status == GSL_SUCCESS ? res.val / epsilon : 0.0;
    if (status == GSL_EUNDRFLW)
        integral = 0.0;
    else if (status != GSL_SUCCESS)
        throw std::runtime_error("tail_sum_upper: incomplete gamma failed");
    return static_cast<double>(acc) + std::exp(-x) + integral;
}

long minimal_m(double epsilon, int k)
{
    if (k < 1)
        throw std::invalid_argument("minimal_m needs k >= 1");
    const double target = 1.0 / (static_cast<double>(k) * k);
    long lo = 1, hi = 1;
    while (!(tail_sum_upper(hi, epsilon) < target)) {
        if (hi > (std::numeric_limits<long>::max() >> 2))
            throw std::length_error("minimal_m: tail never drops below 1/k^2 in range");
        lo = hi + 1;
        hi *= 2;
    }
    while (lo < hi) {
        long mid = lo + (hi - lo) / 2;
        if (tail_sum_upper(mid, epsilon) < target)
            hi = mid;
        else
            lo = mid + 1;
    }
    return lo;
}

double volume_floor(double alpha, double a, int k, long m)
{
    const double g = alpha - 0.5;
    return std::max(std::pow(static_cast<double>(k), 1.0 / g + a),
                    std::pow(static_cast<double>(m), 2.0 / g));
}

SparseSchedule sparse_schedule(double alpha, double epsilon, double a, int k_max)
{
    check_epsilon(alpha, epsilon);
    if (!(a > 0.0) || k_max < 1)
        throw std::invalid_argument("sparse_schedule needs a > 0 and k_max >= 1");
    SparseSchedule s;
    s.alpha = alpha;
    s.epsilon = epsilon;
    s.a = a;
    for (int k = 1; k <= k_max; ++k) {
        long m = minimal_m(epsilon, k);
        double N;
        int n = 1;
        if (alpha > 0.5) {
            N = std::floor(volume_floor(alpha, a, k, m)) + 1.0;
            if (!s.N_k.empty())
                N = std::max(N, static_cast<double>(s.N_k.back() + 1));
            if (N <= static_cast<double>(kMaxVolume))
                n = largest_n_below(std::pow(N, (alpha - 0.5) / 2.0));
        } else {
            N = std::ldexp(1.0, k + 1);
        }
        if (N > static_cast<double>(kMaxVolume))
            throw std::length_error("sparse_schedule: N_" + std::to_string(k) +
                                    " exceeds 2^31; largest feasible k is " +
                                    std::to_string(k - 1));
        s.m_k.push_back(m);
        s.N_k.push_back(static_cast<long>(N));
        s.n_k.push_back(n);
    }
    // post hoc
    for (std::size_t i = 0; i < s.N_k.size(); ++i) {
        int k = static_cast<int>(i) + 1;
        if (!(tail_sum_upper(s.m_k[i], epsilon) < 1.0 / (double(k) * k)))
            throw std::logic_error("sparse_schedule: tail condition lost");
        if (alpha > 0.5) {
            if (!(static_cast<double>(s.N_k[i]) > volume_floor(alpha, a, k, s.m_k[i])))
                throw std::logic_error("sparse_schedule: volume condition lost");
            if (!(s.n_k[i] < std::pow(double(s.N_k[i]), (alpha - 0.5) / 2.0)))
                throw std::logic_error("sparse_schedule: n_k condition lost");
        }
    }
    return s;
}

SparseSchedule desk_schedule(double alpha, double epsilon, const std::vector<long>& volumes)
{
    check_epsilon(alpha, epsilon);
    SparseSchedule s;
    s.alpha = alpha;
    s.epsilon = epsilon;
    s.desk = true;
    for (long N : volumes) {
        if (N < 2 || (!s.N_k.empty() && N <= s.N_k.back()))
            throw std::invalid_argument("desk_schedule: volumes must increase from 2");
        s.N_k.push_back(N);
        int n = alpha > 0.5 ? largest_n_below(std::pow(double(N), (alpha - 0.5) / 2.0)) : 1;
        s.n_k.push_back(std::max(1, n));
    }
    return s;
}

GoodEtaReport good_eta_classifier(const BoundaryCondition& eta, const ModelParams& p, int n,
                                  double epsilon)
{
    check_epsilon(p.alpha, epsilon);
    if (n < 1 || n >= p.N)
        throw std::invalid_argument("good_eta_classifier needs 1 <= n < N");
    GoodEtaReport r;
    r.C = std::exp(1.0 / (3.0 - 2.0 * p.alpha));
    std::vector<double> h = boundary_fields(eta, p);
    for (int x = -p.N + n; x <= p.N - n; ++x)
        if (std::fabs(h[x + p.N]) > field_cap(x, p.N, n, p.alpha, epsilon)) {
            r.good = false;
            r.violations.push_back(x);
        }
    return r;
}

std::vector<GoodFractionRow> good_fraction_profile(const SparseSchedule& s, std::size_t samples,
                                                   std::uint64_t seed, int y_factor)
{
    std::vector<GoodFractionRow> rows;
    for (std::size_t i = 0; i < s.N_k.size(); ++i) {
        if (s.N_k[i] > 4096)
            throw std::length_error("good_fraction_profile: N_k above 4096");
        const int N = static_cast<int>(s.N_k[i]);
        ModelParams p{s.alpha, 1.0, 1.0, N, y_factor * N};
        std::vector<char> bad(samples, 0);
        parallel_for(samples, [&](std::size_t b, std::size_t e) {
            for (std::size_t j = b; j < e; ++j) {
                auto eta = make_boundary(BcKind::random, N, p.Y, seed, substream(0x676f6f64, i, j));
                bad[j] = !good_eta_classifier(eta, p, s.n_k[i], s.epsilon).good;
            }
        });
        GoodFractionRow row;
        row.k = static_cast<int>(i) + 1;
        row.N = N;
        row.n = s.n_k[i];
        row.bad_fraction =
            static_cast<double>(std::count(bad.begin(), bad.end(), 1)) / static_cast<double>(samples);
        row.bad_times_k2 = row.bad_fraction * row.k * row.k;
        rows.push_back(row);
    }
    return rows;
}

BoundaryCondition nested_boundary(int N, int Y, std::uint64_t seed, std::uint64_t stream)
{
    BoundaryCondition b = make_boundary(BcKind::all_plus, N, Y);
    b.kind = BcKind::random;
    b.seed = seed;
    b.stream = stream;
    for (int y = N + 1; y <= Y; ++y) {
        std::uint64_t j = 2 * static_cast<std::uint64_t>(y - 1);
        b.right[y - N - 1] = random_sign(seed, stream, j);
        b.left[y - N - 1] = random_sign(seed, stream, j + 1);
    }
    return b;
}

double decoupled_bound(double alpha, double beta, int N, int N_next)
{
    return std::expm1(12.0 * beta / (1.0 - alpha) * N / std::pow(double(N_next - N), 1.0 - alpha));
}

DecoupledGap decoupled_measure_gap(const ModelParams& p, const BoundaryCondition& eta, int N_next,
                                   const std::vector<int>& window)
{
    if (N_next <= p.N)
        throw std::invalid_argument("decoupled_measure_gap needs N_next > N");
    if (eta.Y != p.Y)
        throw std::invalid_argument("decoupled_measure_gap: eta truncation differs from Y");
    MeasureMarginal full = exact_measure(p, eta).marginal(window);
    MeasureMarginal dec = full;
    if (N_next < eta.Y) {
        ModelParams q = p;
        q.Y = N_next;
        dec = exact_measure(q, eta.truncated(N_next)).marginal(window);
    }
    DecoupledGap g;
    g.gap = window_distance(full, dec);
    g.bound = decoupled_bound(p.alpha, p.beta, p.N, N_next);
    g.holds = g.gap <= g.bound;
    return g;
}

MetastateHistogram empirical_metastate(double alpha, double beta, const SparseSchedule& schedule,
                                       double tau, const std::vector<int>& window,
                                       std::size_t eta_samples, std::uint64_t seed,
                                       MetastateMode mode, int y_factor)
{
    if (!(tau > 0.0 && tau < 1.0))
        throw std::invalid_argument("empirical_metastate needs 0 < tau < 1");
    if (schedule.N_k.empty() || eta_samples < 2)
        throw std::invalid_argument("empirical_metastate needs volumes and at least 2 samples");
    const std::size_t K = schedule.N_k.size();
    MetastateHistogram h;
    h.alpha = alpha;
    h.beta = beta;
    h.tau = tau;
    h.window = window;
    h.samples = eta_samples;
    h.seed = seed;
    // per-eta counts over volumes
    std::vector<double> cp(eta_samples, 0.0), cm(eta_samples, 0.0), cn(eta_samples, 0.0);
    std::vector<double> lambdas(eta_samples, 0.5);
    auto classify = [&](double dp, double dm, std::size_t i, BallRow& row) {
        if (dp < tau && dp <= dm) {
            cp[i] += 1.0;
            row.freq_plus += 1.0;
        } else if (dm < tau) {
            cm[i] += 1.0;
            row.freq_minus += 1.0;
        } else {
            cn[i] += 1.0;
            row.freq_neither += 1.0;
        }
    };
    for (std::size_t k = 0; k < K; ++k) {
        const long Nl = schedule.N_k[k];
        BallRow row;
        row.N = Nl;
        if (mode == MetastateMode::exact) {
            if (Nl > kMaxExactN)
                throw std::length_error("empirical_metastate: exact mode needs N_k <= 11");
            const int N = static_cast<int>(Nl);
            ModelParams p{alpha, beta, 1.0, N, y_factor * N};
            MeasureMarginal plus = plus_reference_marginal(p, window);
            MeasureMarginal minus = negate_patterns(plus);
            for (std::size_t i = 0; i < eta_samples; ++i) {
                ExactEnsemble ens = exact_measure(p, nested_boundary(N, p.Y, seed, i));
                MeasureMarginal m = ens.marginal(window);
                classify(window_distance(m, plus), window_distance(m, minus), i, row);
                if (k + 1 == K)
                    lambdas[i] = mixture_weight(ens);
            }
        } else {
            if (Nl > (1L << 20))
                throw std::length_error("empirical_metastate: toy mode needs N_k <= 2^20");
            const int N = static_cast<int>(Nl);
            ModelParams p{alpha, beta, 1.0, N, y_factor * N};
            std::vector<double> W = ToySampler(p).sample(seed, eta_samples);
            for (std::size_t i = 0; i < eta_samples; ++i) {
                ToyWeights w = toy_weights(W[i], beta);
                classify(2.0 * w.w_minus, 2.0 * w.w_plus, i, row);
                if (k + 1 == K)
                    lambdas[i] = w.w_plus;
            }
        }
        const double n = static_cast<double>(eta_samples);
        row.freq_plus /= n;
        row.freq_minus /= n;
        row.freq_neither /= n;
        h.rows.push_back(row);
    }
    for (std::size_t i = 0; i < eta_samples; ++i) {
        cp[i] /= double(K);
        cm[i] /= double(K);
        cn[i] /= double(K);
    }
    h.freq_plus = mean_of(cp);
    h.freq_minus = mean_of(cm);
    h.freq_neither = mean_of(cn);
    h.stderr_plus = stderr_of(cp);
    h.stderr_minus = stderr_of(cm);
    h.stderr_neither = stderr_of(cn);
    h.lambda = histogram_from_lambdas(lambdas);
    return h;
}

RecurrenceProfile null_recurrence_profile(double alpha, double beta, int N_max, double tau,
                                          std::uint64_t seed, std::uint64_t stream, int y_factor,
                                          double J, bool record_all)
{
    if (N_max < 1 || N_max > (1 << 14))
        throw std::invalid_argument("null_recurrence_profile needs 1 <= N_max <= 2^14");
    if (!(tau > 0.0 && tau < 0.5))
        throw std::invalid_argument("null_recurrence_profile needs 0 < tau < 1/2");
    if (!(beta > 0.0) || y_factor < 2)
        throw std::invalid_argument("null_recurrence_profile needs beta > 0 and y_factor >= 2");
    const int Y = y_factor * N_max;
    ModelParams p{alpha, beta, J, 1, 2};
    CouplingTable Jt(p, Y + N_max);
    std::vector<long double> P(Y + N_max + 1, 0.0L);
    for (int d = 1; d <= Y + N_max; ++d)
        P[d] = P[d - 1] + Jt(d);
    std::vector<int> pair(Y + 1, 0); // eta_y + eta_{-y}
    for (int y = 1; y <= Y; ++y) {
        std::uint64_t j = 2 * static_cast<std::uint64_t>(y - 1);
        pair[y] = random_sign(seed, stream, j) + random_sign(seed, stream, j + 1);
    }
    std::vector<double> W(N_max + 1, 0.0);
    parallel_for(N_max, [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            const int n = static_cast<int>(i) + 1;
            long double acc = 0.0L;
            for (int y = n + 1; y <= Y; ++y)
                if (pair[y] != 0)
                    acc += (P[y + n] - P[y - n - 1]) * pair[y];
            W[n] = static_cast<double>(acc);
        }
    });
    RecurrenceProfile r;
    r.Y = Y;
    double cp = 0.0, cm = 0.0, cx = 0.0;
    for (int n = 1; n <= N_max; ++n) {
        ToyWeights w = toy_weights(W[n], beta);
        if (2.0 * w.w_minus < tau)
            cp += 1.0;
        else if (2.0 * w.w_plus < tau)
            cm += 1.0;
        else if (2.0 * std::fabs(w.w_plus - 0.5) < tau)
            cx += 1.0;
        RecurrenceRow row{n, W[n], cp / n, cm / n, cx / n};
        if (record_all || (n & (n - 1)) == 0 || n == N_max)
            r.rows.push_back(row);
        if (n == N_max)
            r.endpoint = row;
    }
    return r;
}

std::vector<DichotomyRow> dichotomy_report(const std::vector<double>& alphas, double beta,
                                           const DichotomyConfig& cfg)
{
    for (double a : alphas)
        if (a >= 0.45 && a <= 0.55)
            throw std::domain_error("dichotomy_report: alpha in [0.45, 0.55] is excluded around "
                                    "the threshold 1/2");
    std::vector<DichotomyRow> rows;
    for (double a : alphas) {
        LambdaHistogram h =
            toy_metastate_histogram(a, beta, cfg.N, cfg.samples, cfg.seed, cfg.y_factor * cfg.N, cfg.J);
        VarianceResult v = variance_scaling_experiment(a, cfg.var_grid, cfg.var_samples, cfg.seed,
                                                       cfg.y_factor, 0, 50, cfg.J);
        DichotomyRow row;
        row.alpha = a;
        row.pure_mass = h.outside_mass;
        row.mixed_mass = 1.0 - h.outside_mass;
        row.mean_lambda = h.mean;
        row.stderr_lambda = h.stderr_mean;
        row.var_exponent = v.fit.slope;
        row.var_exponent_stderr = v.fit.slope_stderr;
        rows.push_back(row);
    }
    return rows;
}

} // namespace lrising
