#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "lrising/lattice.hpp"

namespace lrising {

/*!
 * Triangle with base [lo, hi] on the integer sites. Flip points are
 * half-integers; x_minus and x_plus are the roots, or the wall at -N / N for
 * boundary triangles.
 */
struct Triangle
{
    int lo = 0;
    int hi = 0;
    double x_minus = 0.0;
    double x_plus = 0.0;
    bool left_boundary = false;
    bool right_boundary = false;

    int mass() const { return hi - lo + 1; }
    bool operator==(const Triangle& o) const
    {
        return lo == o.lo && hi == o.hi && left_boundary == o.left_boundary &&
               right_boundary == o.right_boundary;
    }
};

// Distance between the spin-flip points of two triangles. A boundary
// triangle's wall side carries no flip point and is skipped.
int triangle_distance(const Triangle& a, const Triangle& b);

struct TriangleSet
{
    std::vector<Triangle> triangles;
    int ext_sign = 1;
    bool ext_empty = false; // sign then taken from the leftmost spin
};

// Flip point f stands for f + 1/2, between sites f and f+1.
// walls = false grows on the whole line; the flip count must then be even.
std::vector<Triangle> grow_triangles(const std::vector<int>& flips, int N, bool walls);

TriangleSet triangles_from_config(const SpinConfig& sigma);
SpinConfig config_from_triangles(int N, const std::vector<Triangle>& tris, int ext_sign);

int omega_sign(const SpinConfig& sigma);

double find_min_c();
// sum_{M<=M*} 4M/floor(c M^3) plus the tail bound (4/c)/M*
double c_series(double c, long M_star = 1000000);
int default_c();

struct ContourSet
{
    std::vector<std::vector<int>> contours; // triangle indices, sorted
    double c = 0.0;
};

ContourSet group_contours(const std::vector<Triangle>& tris, double c,
                          const std::vector<int>* order = nullptr);

// Pairwise conditions checked directly, for tests and post-conditions.
bool contours_valid(const std::vector<Triangle>& tris, const ContourSet& cs);

using Contour = std::vector<Triangle>;

std::vector<Contour> contours_of(const std::vector<Triangle>& tris, const ContourSet& cs);

int contour_mass(const Contour& g);

// Spins with exterior + flipped across every base of the family.
SpinConfig family_config(int N, const std::vector<Triangle>& tris);

// Indicator-form free energy sum_{x<y} J 1{s_x != s_y}.
double free_energy_indicator(const SpinConfig& sigma, const CouplingTable& J);

double contour_energy(const Contour& g, const ModelParams& p);

double chi(double m, double alpha);
double contour_norm(const Contour& g, double alpha);
double contour_norm_masses(const std::vector<int>& masses, double alpha);

double alpha_plus();

struct PeierlsReport
{
    double min_ratio = 0.0;
    double min_ratio_interior = 0.0; // boundary contours excluded
    double zeta_hat = 0.0;
    double zeta_hat_interior = 0.0;
    std::vector<double> min_ratio_by_cutoff; // index M = mass cutoff
    std::size_t contours = 0;
    std::size_t configs_visited = 0;
    Contour argmin;
};

PeierlsReport peierls_check(double alpha, int M_max, const ModelParams& p, double c);

struct EntropyRow
{
    int m = 0;
    double lhs = 0.0;
    double rhs = 0.0;
    double classes = 0.0; // translation classes of contours of mass m
};

/*!
 * Contours on the whole line counted by mass composition. Counts are of
 * translation classes; a class contributes |Delta(Gamma)| translates that
 * contain the origin.
 */
class ContourCensus
{
  public:
    ContourCensus(int m_max, double c, double work_limit = 2e9);
    std::vector<EntropyRow> evaluate(double alpha, double b) const;
    // weighted[masses] = sum over classes of |Delta|
    const std::map<std::vector<int>, double>& weighted() const { return weighted_; }
    const std::map<std::vector<int>, double>& classes() const { return classes_; }

  private:
    std::map<std::vector<int>, double> weighted_;
    std::map<std::vector<int>, double> classes_;
};

struct EntropyReport
{
    std::vector<EntropyRow> rows;
    bool holds = true;
};

EntropyReport entropy_bound_check(double alpha, double b, int m_max, double c);

// K_c(alpha) as printed, and with the sign of pi^2/(6c) reversed.
double K_c(double alpha, double c);
double K_c_minus(double alpha, double c);

struct QuasiAdditivityReport
{
    std::size_t trials = 0;
    std::size_t multi_contour_families = 0;
    std::size_t violations_first = 0;  // printed K_c
    std::size_t violations_second = 0; // printed K_c
    std::size_t violations_first_minus = 0;
    std::size_t violations_second_minus = 0;
    double K = 0.0;
    double K_minus = 0.0;
    double min_ratio_first = 1e300;  // (H[G0 u rest] - H[rest]) / H[G0]
    double min_ratio_second = 1e300; // H[all] / sum H[Gi]
};

QuasiAdditivityReport quasi_additivity_check(double alpha, double c, std::size_t trials,
                                             std::uint64_t seed, int N = 16, double J = 1.0);

// (N+x)^{alpha-3/2+eps} + (N-x)^{alpha-3/2+eps} on [-N+n, N-n], else 0.
double field_cap(int x, int N, int n, double alpha, double eps);

struct RhoResult
{
    double rho = 0.0;
    std::size_t contours = 0;
    double K = 0.0;
};

RhoResult rho_truncated(double beta, double alpha, double a, double eps, int N, int n, int M_max,
                        double c, double J = 1.0, bool minus_variant = false);

// Same sum on a beta grid, enumerating the contours once.
std::vector<RhoResult> rho_scan(const std::vector<double>& betas, double alpha, double a, double eps,
                                int N, int n, int M_max, double c, double J = 1.0,
                                bool minus_variant = false);

// One line per triangle "x_minus x_plus mass boundary_flag", then one line per
// contour listing triangle indices.
std::string dump_triangles(const std::vector<Triangle>& tris, const ContourSet& cs);

} // namespace lrising
