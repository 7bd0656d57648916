#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace lrising {

struct ModelParams
{
    double alpha = 0.75;
    double beta = 1.0;
    double J = 1.0;
    int N = 1;
    int Y = 2;

    // Throws std::invalid_argument on a bad combination.
    void validate() const;
};

// Spins on [-N, N]; s[i] is the spin at site i - N.
struct SpinConfig
{
    int N = 0;
    std::vector<int> s;

    SpinConfig() = default;
    SpinConfig(int n, int fill) : N(n), s(2 * n + 1, fill) {}

    int at(int x) const { return s[x + N]; }
    int& at(int x) { return s[x + N]; }
    int size() const { return static_cast<int>(s.size()); }

    // Bit i of code (i = site + N) set means spin -1.
    static SpinConfig from_code(int n, std::uint64_t code);
    std::uint64_t code() const;
    SpinConfig flipped() const;
    bool operator==(const SpinConfig& o) const { return N == o.N && s == o.s; }
};

enum class BcKind { random, all_plus, all_minus, dobrushin, free };

const char* to_string(BcKind k);
BcKind bc_kind_from_string(const std::string& name);

/*!
 * Exterior signs for N < |y| <= Y. right[k] is eta at N+1+k, left[k] at
 * -(N+1+k). Free boundary conditions store zeros.
 */
struct BoundaryCondition
{
    int N = 0;
    int Y = 0;
    BcKind kind = BcKind::free;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    std::vector<int> right;
    std::vector<int> left;

    int at(int y) const;
    BoundaryCondition negated() const;
    // Keep only N < |y| <= y_max (y_max <= Y), for the annulus measure.
    BoundaryCondition truncated(int y_max) const;
};

BoundaryCondition make_boundary(BcKind kind, int N, int Y, std::uint64_t seed = 0,
                                std::uint64_t stream = 0);

// Bit j of the (seed, stream) counter sequence drives site j in the order
// right sites N+1..Y, then left sites -(N+1)..-Y. Bit set means +1.
int random_sign(std::uint64_t seed, std::uint64_t stream, std::uint64_t j);

// Pattern probabilities on a sorted window. Pattern index reads the window
// left to right as binary digits, most significant first, + as 1.
struct MeasureMarginal
{
    std::vector<int> window;
    std::vector<double> probs;

    double total() const;
};

MeasureMarginal point_mass(const std::vector<int>& window, int spin);

// J_{xy}.
double coupling(int x, int y, const ModelParams& p);

// J as a function of distance, tabulated once.
class CouplingTable
{
  public:
    CouplingTable(const ModelParams& p, int d_max);
    double operator()(int d) const { return d == 0 ? 0.0 : tab_[d]; }
    int d_max() const { return static_cast<int>(tab_.size()) - 1; }

  private:
    std::vector<double> tab_;
};

enum class HamForm { spin_product, indicator };

/*!
 * spin_product: -sum_{x<y} J s_x s_y - sum_x s_x h(x).
 * indicator:    sum_{x<y} J 1{s_x != s_y} + sum_{x, y ext} J 1{s_x != eta_y}.
 * spin_product = 2 * indicator - const, so the Gibbs weight of the spin form
 * at beta equals the indicator weight at 2 beta.
 */
double hamiltonian(const SpinConfig& sigma, const BoundaryCondition& eta, const ModelParams& p,
                   HamForm form = HamForm::spin_product);

double boundary_field(int x, const BoundaryCondition& eta, const ModelParams& p);
std::vector<double> boundary_fields(const BoundaryCondition& eta, const ModelParams& p);

struct BoundaryEnergy
{
    double W = 0.0;
    // bound on sum_{|y|>Y} S_y(N)^2, the variance lost to truncation
    double tail_variance_bound = 0.0;
};

BoundaryEnergy boundary_energy(const BoundaryCondition& eta, const ModelParams& p);

// sum_{|y|>Y} S_y(N)^2 <= 2 (2N+1)^2 (Y-N)^{2 alpha - 3} / (3 - 2 alpha)
double truncation_tail_bound(const ModelParams& p);

struct CoefficientProfile
{
    // S[u-1] = S_{N+u}(N) for u = 1..Y-N; S_{-y} = S_y
    std::vector<double> S;
    // (2-alpha)/(1-alpha) (y-N)^{alpha-1}
    std::vector<double> bound;
    bool bound_holds_beyond_2N = true;
};

CoefficientProfile coefficient_profile(const ModelParams& p);

// Same S values without the bound array.
std::vector<double> profile_values(const ModelParams& p);

double window_distance(const MeasureMarginal& a, const MeasureMarginal& b);

} // namespace lrising
