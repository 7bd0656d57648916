#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lrising/lattice.hpp"
#include "lrising/toy.hpp"

namespace lrising {

struct SparseSchedule
{
    double alpha = 0.0;
    double epsilon = 0.0;
    double a = 0.0;
    std::vector<long> m_k;
    std::vector<long> N_k;
    std::vector<int> n_k;
    bool desk = false; // volumes given directly, growth conditions not imposed
};

// Upper bound on sum_{l >= m} exp(-l^eps): explicit terms, then an integral tail.
double tail_sum_upper(long m, double epsilon);

// Smallest m with tail_sum_upper(m) < 1/k^2.
long minimal_m(double epsilon, int k);

// max{k^{1/(alpha-1/2)+a}, m^{2/(alpha-1/2)}}; N_k must exceed it.
double volume_floor(double alpha, double a, int k, long m);

/*!
 * Throws std::length_error naming the largest feasible k when some N_k
 * passes 2^31. For alpha < 1/2, N_k = 2^{k+1} and n_k = 1.
 */
SparseSchedule sparse_schedule(double alpha, double epsilon, double a, int k_max);

// Volumes chosen by hand; n_k is the largest integer below N_k^{(alpha-1/2)/2}, at least 1.
SparseSchedule desk_schedule(double alpha, double epsilon, const std::vector<long>& volumes);

struct GoodEtaReport
{
    bool good = true;
    std::vector<int> violations;
    double C = 0.0; // exp(1/(3 - 2 alpha)), reported only
};

GoodEtaReport good_eta_classifier(const BoundaryCondition& eta, const ModelParams& p, int n,
                                  double epsilon);

struct GoodFractionRow
{
    int k = 0;
    long N = 0;
    int n = 0;
    double bad_fraction = 0.0;
    double bad_times_k2 = 0.0;
};

std::vector<GoodFractionRow> good_fraction_profile(const SparseSchedule& s, std::size_t samples,
                                                   std::uint64_t seed, int y_factor = 16);

/*!
 * Same eta across volumes: eta_y for |y| >= 1 comes from bit 2(|y|-1) + (y < 0)
 * of the (seed, stream) counter sequence. Sites inside [-N, N] are ignored.
 */
BoundaryCondition nested_boundary(int N, int Y, std::uint64_t seed, std::uint64_t stream);

struct DecoupledGap
{
    double gap = 0.0;
    double bound = 0.0;
    bool holds = true;
};

// exp(12 beta / (1-alpha) * N / (N_next - N)^{1-alpha}) - 1
double decoupled_bound(double alpha, double beta, int N, int N_next);

DecoupledGap decoupled_measure_gap(const ModelParams& p, const BoundaryCondition& eta, int N_next,
                                   const std::vector<int>& window = {0});

enum class MetastateMode { exact, toy };

struct BallRow
{
    long N = 0;
    double freq_plus = 0.0;
    double freq_minus = 0.0;
    double freq_neither = 0.0;
};

struct MetastateHistogram
{
    LambdaHistogram lambda; // at the largest volume
    double freq_plus = 0.0;
    double freq_minus = 0.0;
    double freq_neither = 0.0;
    double stderr_plus = 0.0;
    double stderr_minus = 0.0;
    double stderr_neither = 0.0;
    std::vector<BallRow> rows;
    double alpha = 0.0;
    double beta = 0.0;
    double tau = 0.0;
    std::vector<int> window;
    std::size_t samples = 0;
    std::uint64_t seed = 0;
};

/*!
 * Exact mode needs every N_k <= 11 and uses nested_boundary with Y = y_factor
 * * N_k. Toy mode draws independent eta per volume through ToySampler.
 * A measure is in the plus ball when its distance to the plus proxy is below
 * tau and not larger than its distance to the minus proxy.
 */
MetastateHistogram empirical_metastate(double alpha, double beta, const SparseSchedule& schedule,
                                       double tau, const std::vector<int>& window,
                                       std::size_t eta_samples, std::uint64_t seed,
                                       MetastateMode mode, int y_factor = 16);

struct RecurrenceRow
{
    long n = 0;
    double W = 0.0;
    double freq_plus = 0.0;
    double freq_minus = 0.0;
    double freq_mixed = 0.0;
};

struct RecurrenceProfile
{
    std::vector<RecurrenceRow> rows; // every n when record_all, else powers of two and N_max
    RecurrenceRow endpoint;
    int Y = 0;
};

/*!
 * Toy weights along n = 1..N_max for one nested eta with Y = y_factor * N_max.
 * The mixed ball is centered at the lambda = 1/2 mixture.
 */
RecurrenceProfile null_recurrence_profile(double alpha, double beta, int N_max, double tau,
                                          std::uint64_t seed, std::uint64_t stream = 0,
                                          int y_factor = 16, double J = 1.0,
                                          bool record_all = false);

struct DichotomyRow
{
    double alpha = 0.0;
    double pure_mass = 0.0;  // lambda outside [0.01, 0.99]
    double mixed_mass = 0.0;
    double mean_lambda = 0.0;
    double stderr_lambda = 0.0;
    double var_exponent = 0.0;
    double var_exponent_stderr = 0.0;
};

struct DichotomyConfig
{
    int N = 4096;
    std::size_t samples = 100000;
    std::vector<int> var_grid = {64, 128, 256, 512, 1024, 2048, 4096};
    std::size_t var_samples = 20000;
    std::uint64_t seed = 1;
    int y_factor = 16;
    double J = 1.0;
};

// Rejects any alpha in [0.45, 0.55].
std::vector<DichotomyRow> dichotomy_report(const std::vector<double>& alphas, double beta,
                                           const DichotomyConfig& cfg);

} // namespace lrising
