#pragma once

#include <cstdint>
#include <vector>

#include "lrising/lattice.hpp"

namespace lrising {

struct ToyWeights
{
    double w_plus = 0.5;
    double w_minus = 0.5;
    double W = 0.0;
    double beta = 1.0;
};

// w_plus = 1/(1+exp(-2 beta W)); saturates once |2 beta W| > 700.
ToyWeights toy_weights(double W, double beta);

struct ToyDistances
{
    double to_plus = 1.0;  // ||mu_bar - delta_+||
    double to_minus = 1.0; // ||mu_bar - delta_-||
};

ToyDistances toy_distances(double W, double beta);

// Largest |W| for which both distances stay >= tau.
double smallball_radius(double tau, double beta);

// Marginal of w_plus delta_+ + w_minus delta_- on a window.
MeasureMarginal toy_marginal(const std::vector<int>& window, const ToyWeights& w);

struct CharValue
{
    double value = 1.0;
    // exp(-t^2 tail / 2), the Gaussian factor lost by truncating at Y
    double tail_factor = 1.0;
};

// psi_N(t) = prod_{N<|y|<=Y} cos(t S_y)
class CharacteristicFunction
{
  public:
    explicit CharacteristicFunction(const ModelParams& p);
    CharValue operator()(double t) const;

  private:
    std::vector<double> S_;
    double tail_ = 0.0;
};

CharValue characteristic_function(double t, const ModelParams& p);

constexpr double kDeltaCos = 1.5;

// cos u <= exp(-u^2/2) on a dense grid of [0, delta].
bool verify_delta_cos(double delta, int points = 1000000);

struct WlltSchedule
{
    int N = 0;
    double A_N = 0.0;
    double A_tail = 0.0; // truncation bound on sum_{|y|>Y} S_y^2
    double A_bound = 0.0;
    double delta_N = 1.0;
    double tau_N = 0.0;
    double delta_cos = kDeltaCos;
    double k = 0.0;
    double speed_ratio = 0.0; // A_N / (delta_N^k tau_N^(k-1))
    bool below_bound = false;
};

// Throws std::domain_error for alpha <= 1/2.
WlltSchedule wllt_schedule(const ModelParams& p, double delta_N = 1.0);

// True when the speed ratio decreases along the (increasing) N grid.
bool speed_condition_decreasing(const std::vector<WlltSchedule>& rows);

struct WlltIntegral
{
    double value = 0.0;     // A_N * int |psi_N|
    double error = 0.0;     // quadrature error estimate of value
    double gaussian = 0.0;  // A_N * int exp(-A_N^2 t^2 / 2) on the same range
    WlltSchedule schedule;
};

WlltIntegral wllt_integral_check(const ModelParams& p);

/*!
 * Draws W_N for many independent eta at once. Sample i of volume N uses the
 * random boundary condition with stream toy_stream(N, i), so a single sample
 * can be replayed through make_boundary and boundary_energy.
 */
class ToySampler
{
  public:
    explicit ToySampler(const ModelParams& p);
    std::vector<double> sample(std::uint64_t seed, std::size_t count) const;
    const ModelParams& params() const { return p_; }

  private:
    ModelParams p_;
    std::size_t words_ = 0;
    std::vector<double> table_; // 256 entries per byte of the sign stream
};

std::uint64_t toy_stream(int N, std::uint64_t i);

// Y used for volume N: y_factor * N when y_factor > 0, else Y_fixed.
int truncation_for(int N, int y_factor, int Y_fixed);

struct LinearFit
{
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
};

LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y);

struct SmallBallRow
{
    int N = 0;
    int Y = 0;
    double p = 0.0;
    double stderr_p = 0.0;
    double scaled = 0.0; // N^{alpha-1/2} p
    double tail_variance_bound = 0.0;
    std::vector<double> quantiles; // 99 percentiles of W_N
};

struct SmallBallResult
{
    std::vector<SmallBallRow> rows;
    LinearFit fit; // log p vs log N, alpha > 1/2
    // largest percentile change between consecutive N, alpha < 1/2
    double max_quantile_shift = 0.0;
};

SmallBallResult smallball_scaling_experiment(double alpha, double K, double beta,
                                             const std::vector<int>& N_grid, std::size_t samples,
                                             std::uint64_t seed, int y_factor, int Y_fixed,
                                             double J = 1.0);

struct VarianceRow
{
    int N = 0;
    int Y = 0;
    double var = 0.0;
    double boot_stderr = 0.0;
    double exact_var = 0.0; // 2 sum S_y^2 over the truncated exterior
};

struct VarianceResult
{
    std::vector<VarianceRow> rows;
    LinearFit fit; // log Var vs log N
};

VarianceResult variance_scaling_experiment(double alpha, const std::vector<int>& N_grid,
                                           std::size_t samples, std::uint64_t seed, int y_factor,
                                           int Y_fixed, int bootstrap = 200, double J = 1.0);

// Percentile p (0..100) of already sorted data, linear interpolation.
double percentile_sorted(const std::vector<double>& sorted, double p);

struct LambdaHistogram
{
    std::vector<double> mass; // 100 bins on [0, 1]
    double mean = 0.0;
    double stderr_mean = 0.0;
    double outside_mass = 0.0; // lambda < 0.01 or > 0.99
    std::size_t samples = 0;
};

LambdaHistogram histogram_from_lambdas(const std::vector<double>& lambdas, int bins = 100);

LambdaHistogram toy_metastate_histogram(double alpha, double beta, int N, std::size_t samples,
                                        std::uint64_t seed, int Y, double J = 1.0);

} // namespace lrising
