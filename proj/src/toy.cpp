#include "lrising/toy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include "lrising/parallel.hpp"
#include "lrising/rng.hpp"

namespace lrising {

ToyWeights toy_weights(double W, double beta)
{
    if (!(beta > 0.0))
        throw std::invalid_argument("toy_weights: beta must be positive");
    ToyWeights w;
    w.W = W;
    w.beta = beta;
    const double x = 2.0 * beta * W;
    if (x > 700.0) {
        w.w_plus = 1.0;
        w.w_minus = 0.0;
    } else if (x < -700.0) {
        w.w_plus = 0.0;
        w.w_minus = 1.0;
    } else if (x >= 0.0) {
        w.w_minus = 1.0 / (1.0 + std::exp(x));
        w.w_plus = 1.0 - w.w_minus;
    } else {
        w.w_plus = 1.0 / (1.0 + std::exp(-x));
        w.w_minus = 1.0 - w.w_plus;
    }
    return w;
}

ToyDistances toy_distances(double W, double beta)
{
    ToyWeights w = toy_weights(W, beta);
    return {2.0 * w.w_minus, 2.0 * w.w_plus};
}

double smallball_radius(double tau, double beta)
{
    // both distances sum to 2, so tau > 1 is never reachable
    if (!(tau > 0.0 && tau <= 1.0))
        throw std::invalid_argument("smallball_radius: tau must lie in (0, 1]");
    return std::log((2.0 - tau) / tau) / (2.0 * beta);
}

MeasureMarginal toy_marginal(const std::vector<int>& window, const ToyWeights& w)
{
    MeasureMarginal m;
    m.window = window;
    m.probs.assign(std::size_t{1} << window.size(), 0.0);
    m.probs.front() += w.w_minus;
    m.probs.back() += w.w_plus;
    return m;
}

CharacteristicFunction::CharacteristicFunction(const ModelParams& p)
    : S_(profile_values(p)), tail_(truncation_tail_bound(p))
{
}

CharValue CharacteristicFunction::operator()(double t) const
{
    double prod = 1.0;
    for (double s : S_) {
        double c = std::cos(t * s);
        prod *= c * c; // y and -y share S_y
        if (prod == 0.0)
            break;
    }
    return {prod, std::exp(-0.5 * t * t * tail_)};
}

CharValue characteristic_function(double t, const ModelParams& p)
{
    return CharacteristicFunction(p)(t);
}

bool verify_delta_cos(double delta, int points)
{
    for (int i = 0; i <= points; ++i) {
        double u = delta * static_cast<double>(i) / points;
        if (std::cos(u) > std::exp(-0.5 * u * u))
            return false;
    }
    return true;
}

WlltSchedule wllt_schedule(const ModelParams& p, double delta_N)
{
    if (!(p.alpha > 0.5))
        throw std::domain_error("wllt_schedule needs alpha > 1/2");
    WlltSchedule s;
    s.N = p.N;
    std::vector<double> S = profile_values(p);
    double acc = 0.0;
    for (int y = 2 * p.N + 1; y <= p.Y; ++y) {
        double v = S[y - p.N - 1];
        acc += v * v;
    }
    s.A_N = std::sqrt(2.0 * acc);
    s.A_tail = truncation_tail_bound(p);
    s.A_bound = std::sqrt(18.0 / (3.0 - 2.0 * p.alpha)) * std::pow(p.N, p.alpha - 0.5);
    s.delta_N = delta_N;
    s.tau_N = s.delta_cos * (1.0 - p.alpha) / (2.0 - p.alpha) * std::pow(p.N, 1.0 - p.alpha);
    s.k = 1.0 + (p.alpha - 0.5) / (1.0 - p.alpha) + 0.5;
    s.speed_ratio = s.A_N / (std::pow(delta_N, s.k) * std::pow(s.tau_N, s.k - 1.0));
    // the exact A_N including the truncated tail must also stay below
    s.below_bound = std::sqrt(s.A_N * s.A_N + s.A_tail) < s.A_bound;
    return s;
}

bool speed_condition_decreasing(const std::vector<WlltSchedule>& rows)
{
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (!(rows[i].speed_ratio < rows[i - 1].speed_ratio))
            return false;
    return true;
}

WlltIntegral wllt_integral_check(const ModelParams& p)
{
    WlltIntegral out;
    out.schedule = wllt_schedule(p);
    CharacteristicFunction psi(p);
    const double tau = out.schedule.tau_N;
    const double A = out.schedule.A_N;
    auto f = [&](double t) { return std::abs(psi(t).value); };
    using Fn = decltype(f);
    gsl_function gf;
    gf.function = [](double t, void* ctx) { return (*static_cast<Fn*>(ctx))(t); };
    gf.params = &f;
    gsl_integration_workspace* ws = gsl_integration_workspace_alloc(2000);
    gsl_error_handler_t* old = gsl_set_error_handler_off();
    double half = 0.0, err = 0.0;
    int status = gsl_integration_qag(&gf, 0.0, tau, 0.0, 1e-10, 2000, GSL_INTEG_GAUSS61, ws,
                                     &half, &err);
    gsl_set_error_handler(old);
    gsl_integration_workspace_free(ws);
    out.value = 2.0 * A * half;
    out.error = 2.0 * A * err;
    if (status != 0 && !(err < 1e-8 * half))
        throw std::runtime_error("wllt_integral_check: quadrature stopped at relative error " +
                                 std::to_string(err / half));
    out.gaussian = std::sqrt(2.0 * M_PI) * std::erf(A * tau / std::sqrt(2.0));
    return out;
}

std::uint64_t toy_stream(int N, std::uint64_t i)
{
    return substream(0x746f79, static_cast<std::uint64_t>(N), i);
}

int truncation_for(int N, int y_factor, int Y_fixed)
{
    return y_factor > 0 ? y_factor * N : Y_fixed;
}

ToySampler::ToySampler(const ModelParams& p) : p_(p)
{
    p_.validate();
    std::vector<double> S = profile_values(p_);
    const std::size_t L = S.size();
    const std::size_t bits = 2 * L;
    words_ = (bits + 63) / 64;
    std::vector<double> c(words_ * 64, 0.0);
    for (std::size_t j = 0; j < L; ++j) {
        c[j] = S[j];
        c[L + j] = S[j];
    }
    const std::size_t groups = words_ * 8;
    table_.assign(groups * 256, 0.0);
    for (std::size_t g = 0; g < groups; ++g) {
        for (unsigned v = 0; v < 256; ++v) {
            double acc = 0.0;
            for (unsigned k = 0; k < 8; ++k) {
                double cj = c[8 * g + k];
                acc += ((v >> k) & 1u) ? cj : -cj;
            }
            table_[g * 256 + v] = acc;
        }
    }
}

std::vector<double> ToySampler::sample(std::uint64_t seed, std::size_t count) const
{
    std::vector<double> W(count, 0.0);
    std::vector<std::uint64_t> keys(count);
    for (std::size_t i = 0; i < count; ++i)
        keys[i] = stream_key(seed, toy_stream(p_.N, i));
    parallel_for(count, [&](std::size_t b, std::size_t e) {
        for (std::size_t w = 0; w < words_; ++w) {
            const double* t = table_.data() + w * 8 * 256;
            for (std::size_t i = b; i < e; ++i) {
                std::uint64_t u = keyed_word(keys[i], w);
                double s = t[u & 255] + t[256 + ((u >> 8) & 255)] + t[512 + ((u >> 16) & 255)] +
                           t[768 + ((u >> 24) & 255)] + t[1024 + ((u >> 32) & 255)] +
                           t[1280 + ((u >> 40) & 255)] + t[1536 + ((u >> 48) & 255)] +
                           t[1792 + (u >> 56)];
                W[i] += s;
            }
        }
    });
    return W;
}

LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y)
{
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("least_squares needs two or more points");
    const double n = static_cast<double>(x.size());
    double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    LinearFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    if (x.size() > 2) {
        double rss = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            double r = y[i] - f.intercept - f.slope * x[i];
            rss += r * r;
        }
        f.slope_stderr = std::sqrt(rss / (n - 2.0) / sxx);
    }
    return f;
}

double percentile_sorted(const std::vector<double>& sorted, double p)
{
    if (sorted.empty())
        return 0.0;
    double pos = p / 100.0 * static_cast<double>(sorted.size() - 1);
    std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

SmallBallResult smallball_scaling_experiment(double alpha, double K, double beta,
                                             const std::vector<int>& N_grid, std::size_t samples,
                                             std::uint64_t seed, int y_factor, int Y_fixed,
                                             double J)
{
    if (samples < 10000)
        throw std::invalid_argument("smallball_scaling_experiment needs at least 1e4 samples");
    SmallBallResult out;
    std::vector<double> lx, ly;
    for (int N : N_grid) {
        ModelParams p{alpha, beta, J, N, truncation_for(N, y_factor, Y_fixed)};
        ToySampler sampler(p);
        std::vector<double> W = sampler.sample(seed, samples);
        std::size_t hits = 0;
        for (double w : W)
            if (std::abs(w) <= K)
                ++hits;
        SmallBallRow row;
        row.N = N;
        row.Y = p.Y;
        row.p = static_cast<double>(hits) / static_cast<double>(samples);
        row.stderr_p = std::sqrt(row.p * (1.0 - row.p) / static_cast<double>(samples));
        row.scaled = std::pow(N, alpha - 0.5) * row.p;
        row.tail_variance_bound = truncation_tail_bound(p);
        std::sort(W.begin(), W.end());
        for (int q = 1; q <= 99; ++q)
            row.quantiles.push_back(percentile_sorted(W, q));
        if (row.p > 0.0) {
            lx.push_back(std::log(static_cast<double>(N)));
            ly.push_back(std::log(row.p));
        }
        out.rows.push_back(std::move(row));
    }
    if (lx.size() >= 2)
        out.fit = least_squares(lx, ly);
    for (std::size_t r = 1; r < out.rows.size(); ++r)
        for (std::size_t q = 0; q < 99; ++q)
            out.max_quantile_shift =
                std::max(out.max_quantile_shift,
                         std::abs(out.rows[r].quantiles[q] - out.rows[r - 1].quantiles[q]));
    return out;
}

namespace {

double sample_variance(const std::vector<double>& v)
{
    const double n = static_cast<double>(v.size());
    double m = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double s = 0.0;
    for (double x : v)
        s += (x - m) * (x - m);
    return s / (n - 1.0);
}

} // namespace

VarianceResult variance_scaling_experiment(double alpha, const std::vector<int>& N_grid,
                                           std::size_t samples, std::uint64_t seed, int y_factor,
                                           int Y_fixed, int bootstrap, double J)
{
    VarianceResult out;
    std::vector<double> lx, ly;
    for (int N : N_grid) {
        ModelParams p{alpha, 1.0, J, N, truncation_for(N, y_factor, Y_fixed)};
        ToySampler sampler(p);
        std::vector<double> W = sampler.sample(seed, samples);
        VarianceRow row;
        row.N = N;
        row.Y = p.Y;
        row.var = sample_variance(W);
        std::vector<double> S = profile_values(p);
        double ex = 0.0;
        for (double s : S)
            ex += s * s;
        row.exact_var = 2.0 * ex;
        std::vector<double> reps(bootstrap);
        std::vector<double> resample(samples);
        for (int b = 0; b < bootstrap; ++b) {
            CounterRng rng(seed, substream(0x626f6f74, static_cast<std::uint64_t>(N), b));
            for (std::size_t i = 0; i < samples; ++i)
                resample[i] = W[rng.next_u64() % samples];
            reps[b] = sample_variance(resample);
        }
        row.boot_stderr = std::sqrt(sample_variance(reps));
        lx.push_back(std::log(static_cast<double>(N)));
        ly.push_back(std::log(row.var));
        out.rows.push_back(row);
    }
    if (lx.size() >= 2)
        out.fit = least_squares(lx, ly);
    return out;
}

LambdaHistogram histogram_from_lambdas(const std::vector<double>& lambdas, int bins)
{
    LambdaHistogram h;
    h.mass.assign(bins, 0.0);
    h.samples = lambdas.size();
    if (lambdas.empty())
        return h;
    const double n = static_cast<double>(lambdas.size());
    double sum = 0.0;
    std::size_t outside = 0;
    for (double l : lambdas) {
        int b = std::min(bins - 1, static_cast<int>(std::floor(l * bins)));
        h.mass[std::max(0, b)] += 1.0;
        sum += l;
        if (l < 0.01 || l > 0.99)
            ++outside;
    }
    for (auto& m : h.mass)
        m /= n;
    h.mean = sum / n;
    double s2 = 0.0;
    for (double l : lambdas)
        s2 += (l - h.mean) * (l - h.mean);
    h.stderr_mean = std::sqrt(s2 / (n - 1.0) / n);
    h.outside_mass = static_cast<double>(outside) / n;
    return h;
}

LambdaHistogram toy_metastate_histogram(double alpha, double beta, int N, std::size_t samples,
                                        std::uint64_t seed, int Y, double J)
{
    ModelParams p{alpha, beta, J, N, Y};
    ToySampler sampler(p);
    std::vector<double> W = sampler.sample(seed, samples);
    std::vector<double> lambdas(W.size());
    for (std::size_t i = 0; i < W.size(); ++i)
        lambdas[i] = toy_weights(W[i], beta).w_plus;
    return histogram_from_lambdas(lambdas);
}

} // namespace lrising
