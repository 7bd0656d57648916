#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "lrising/contour.hpp"

namespace lrising {

double c_series(double c, long M_star)
{
    double s = 0.0;
    for (long M = 1; M <= M_star; ++M) {
        double m = static_cast<double>(M);
        double den = std::floor(c * m * m * m);
        if (den <= 0.0)
            return std::numeric_limits<double>::infinity();
        s += 4.0 * m / den;
    }
    return s + (4.0 / c) / static_cast<double>(M_star);
}

double find_min_c()
{
    double lo = 1.0, hi = 100.0;
    while (hi - lo > 1e-5) {
        double mid = 0.5 * (lo + hi);
        if (c_series(mid) <= 0.5)
            hi = mid;
        else
            lo = mid;
    }
    double c = std::ceil(hi * 1000.0) / 1000.0;
    while (c_series(c) > 0.5)
        c += 1e-3;
    return c;
}

int default_c()
{
    static const int c = static_cast<int>(std::ceil(find_min_c()));
    return c;
}

namespace {

bool overlaps(const Triangle& a, const Triangle& b)
{
    return a.lo <= b.hi && b.lo <= a.hi;
}

bool inside(const Triangle& a, const Triangle& b)
{
    return b.lo <= a.lo && a.hi <= b.hi;
}

struct Cluster
{
    std::vector<int> members;
    int mass = 0;
};

// Delta(A) within Delta(B), and every base of B either holds Delta(A) or misses it.
bool nested_ok(const std::vector<Triangle>& t, const Cluster& A, const Cluster& B)
{
    for (int i : A.members) {
        bool covered = false;
        for (int j : B.members)
            if (inside(t[i], t[j])) {
                covered = true;
                break;
            }
        if (!covered)
            return false;
    }
    for (int j : B.members) {
        bool all_in = true, none = true;
        for (int i : A.members) {
            if (!inside(t[i], t[j]))
                all_in = false;
            if (overlaps(t[i], t[j]))
                none = false;
        }
        if (!all_in && !none)
            return false;
    }
    return true;
}

bool separated(const std::vector<Triangle>& t, const Cluster& A, const Cluster& B, double c)
{
    int d = std::numeric_limits<int>::max();
    bool disjoint = true;
    for (int i : A.members)
        for (int j : B.members) {
            d = std::min(d, triangle_distance(t[i], t[j]));
            if (overlaps(t[i], t[j]))
                disjoint = false;
        }
    double m = std::min(A.mass, B.mass);
    if (!(static_cast<double>(d) > c * m * m * m))
        return false;
    if (disjoint)
        return true;
    return nested_ok(t, A, B) || nested_ok(t, B, A);
}

} // namespace

ContourSet group_contours(const std::vector<Triangle>& tris, double c, const std::vector<int>* order)
{
    std::vector<Cluster> cl;
    std::vector<int> idx(tris.size());
    std::iota(idx.begin(), idx.end(), 0);
    if (order)
        idx = *order;
    for (int i : idx)
        cl.push_back({{i}, tris[i].mass()});
    const std::size_t guard = tris.size() * tris.size() + 1;
    std::size_t iter = 0;
    bool merged = true;
    while (merged) {
        if (++iter > guard)
            throw std::logic_error("group_contours: merge loop did not terminate");
        merged = false;
        for (std::size_t i = 0; i < cl.size() && !merged; ++i)
            for (std::size_t j = i + 1; j < cl.size(); ++j)
                if (!separated(tris, cl[i], cl[j], c)) {
                    cl[i].members.insert(cl[i].members.end(), cl[j].members.begin(),
                                         cl[j].members.end());
                    cl[i].mass += cl[j].mass;
                    cl.erase(cl.begin() + j);
                    merged = true;
                    break;
                }
    }
    ContourSet cs;
    cs.c = c;
    for (auto& k : cl) {
        std::sort(k.members.begin(), k.members.end());
        cs.contours.push_back(k.members);
    }
    std::sort(cs.contours.begin(), cs.contours.end());
    return cs;
}

bool contours_valid(const std::vector<Triangle>& tris, const ContourSet& cs)
{
    std::vector<int> seen(tris.size(), 0);
    std::vector<Cluster> cl;
    for (const auto& g : cs.contours) {
        Cluster k;
        for (int i : g) {
            ++seen[i];
            k.members.push_back(i);
            k.mass += tris[i].mass();
        }
        cl.push_back(k);
    }
    for (int s : seen)
        if (s != 1)
            return false;
    for (std::size_t i = 0; i < cl.size(); ++i)
        for (std::size_t j = i + 1; j < cl.size(); ++j)
            if (!separated(tris, cl[i], cl[j], cs.c))
                return false;
    return true;
}

std::vector<Contour> contours_of(const std::vector<Triangle>& tris, const ContourSet& cs)
{
    std::vector<Contour> out;
    for (const auto& g : cs.contours) {
        Contour c;
        for (int i : g)
            c.push_back(tris[i]);
        out.push_back(c);
    }
    return out;
}

int contour_mass(const Contour& g)
{
    int m = 0;
    for (const auto& t : g)
        m += t.mass();
    return m;
}

double free_energy_indicator(const SpinConfig& sigma, const CouplingTable& J)
{
    const int n = sigma.size();
    double H = 0.0;
    for (int d = 1; d < n; ++d) {
        const double j = J(d);
        for (int i = 0; i + d < n; ++i)
            if (sigma.s[i] != sigma.s[i + d])
                H += j;
    }
    return H;
}

double contour_energy(const Contour& g, const ModelParams& p)
{
    for (const auto& t : g)
        if (t.lo < -p.N || t.hi > p.N)
            throw std::invalid_argument("contour_energy: contour leaves the volume");
    CouplingTable J(p, 2 * p.N);
    return free_energy_indicator(family_config(p.N, g), J);
}

double chi(double m, double alpha)
{
    return alpha > 0.0 ? std::pow(m, alpha) : std::log(m) + 4.0;
}

double contour_norm_masses(const std::vector<int>& masses, double alpha)
{
    double s = 0.0;
    for (int m : masses)
        s += alpha > 0.0 ? std::pow(static_cast<double>(m), alpha)
                         : 4.0 + std::log(static_cast<double>(m));
    return s;
}

double contour_norm(const Contour& g, double alpha)
{
    std::vector<int> masses;
    for (const auto& t : g)
        masses.push_back(t.mass());
    return contour_norm_masses(masses, alpha);
}

double alpha_plus()
{
    return std::log(3.0) / std::log(2.0) - 1.0;
}

double K_c(double alpha, double c)
{
    return 1.0 - (2.0 - alpha) / std::pow(c, 1.0 - alpha) + M_PI * M_PI / (6.0 * c);
}

double K_c_minus(double alpha, double c)
{
    return 1.0 - (2.0 - alpha) / std::pow(c, 1.0 - alpha) - M_PI * M_PI / (6.0 * c);
}

} // namespace lrising
