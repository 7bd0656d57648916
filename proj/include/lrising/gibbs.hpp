#pragma once

#include <cstdint>
#include <vector>

#include "lrising/lattice.hpp"

namespace lrising {

constexpr int kMaxExactN = 11;

double logsumexp(double a, double b);

/*!
 * Full enumeration of the finite-volume measure in the spin form. Entry i of
 * log_weight belongs to SpinConfig::from_code(N, i).
 */
struct ExactEnsemble
{
    ModelParams params;
    BoundaryCondition eta;
    std::vector<double> log_weight; // -beta H
    double logZ = 0.0;
    double logZ_plus = 0.0;
    double logZ_minus = 0.0;

    // sign 0 is the full measure, +1 / -1 the measure restricted to Omega+/-.
    MeasureMarginal marginal(const std::vector<int>& window, int sign = 0) const;
    std::vector<double> magnetization(int sign = 0) const;
};

// Throws std::length_error above kMaxExactN; use mc_measure there.
ExactEnsemble exact_measure(const ModelParams& p, const BoundaryCondition& eta);

// Omega sign per configuration code, computed once per N.
const std::vector<std::int8_t>& omega_table(int N);

struct McEstimate
{
    double value = 0.0;
    double std_error = 0.0; // batch means
    std::size_t samples = 0;
    std::size_t burn_in = 0;
    std::uint64_t seed = 0;
};

struct McResult
{
    MeasureMarginal marginal;
    McEstimate magnetization0;
    std::vector<double> magnetization;
    std::vector<double> marginal_std_error;
};

// P(s_x = +1) given the local field L_x.
double heat_bath_plus(double local_field, double beta);

/*!
 * Single-site heat bath, sequential sweeps. Measurements are taken after each
 * sweep past burn_in. Mixing is not checked; at beta > 1 treat the output as
 * a diagnostic only.
 */
McResult mc_measure(const ModelParams& p, const BoundaryCondition& eta, std::size_t sweeps,
                    std::size_t burn_in, std::uint64_t seed, const std::vector<int>& window = {0});

struct FreeEnergy
{
    double F = 0.0;
    double W = 0.0;
    double xi_part = 0.0; // (1/2beta)(log Xi^eta - log Xi^{-eta}) = F - W
};

FreeEnergy free_energy_difference(const ExactEnsemble& ens);
FreeEnergy free_energy_difference(const ModelParams& p, const BoundaryCondition& eta);

// Weight of the minus constrained measure: Z^- / Z.
double mixture_weight(const ExactEnsemble& ens);
double mixture_weight(const ModelParams& p, const BoundaryCondition& eta);

MeasureMarginal constrained_measure(const ModelParams& p, const BoundaryCondition& eta, int sign,
                                    const std::vector<int>& window);

// Plus boundary condition at the same volume, the stand-in for mu+.
MeasureMarginal plus_reference_marginal(const ModelParams& p, const std::vector<int>& window);

// Distance between the plus proxies at N and N-2.
double proxy_drift(const ModelParams& p, const std::vector<int>& window);

// Negates every pattern: index i maps to (2^|X| - 1) - i.
MeasureMarginal negate_patterns(const MeasureMarginal& m);

} // namespace lrising
