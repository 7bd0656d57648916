#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "lrising/contour.hpp"

namespace lrising {

namespace {

// Walls sit a little outside the outermost sites so that a pair of flip
// points beats a wall when the unperturbed heights tie.
constexpr double kWallSlack = 0.02;

// Pairs of equal height are resolved leftmost first, which keeps the
// construction translation invariant.
void grow_once(const std::vector<int>& flips, int N, bool walls, std::vector<Triangle>& out)
{
    out.clear();
    std::vector<int> act(flips.size());
    for (std::size_t i = 0; i < act.size(); ++i)
        act[i] = static_cast<int>(i);
    const double wall = N + kWallSlack;
    while (!act.empty()) {
        double best = std::numeric_limits<double>::infinity();
        int kind = 0; // 0 pair, 1 left wall, 2 right wall
        std::size_t at = 0;
        auto offer = [&](double h, int kd, std::size_t pos) {
            if (h < best) {
                best = h;
                kind = kd;
                at = pos;
            }
        };
        if (walls)
            offer(flips[act.front()] + 0.5 + wall, 1, 0);
        for (std::size_t i = 0; i + 1 < act.size(); ++i)
            offer(0.5 * (flips[act[i + 1]] - flips[act[i]]), 0, i);
        if (walls)
            offer(wall - flips[act.back()] - 0.5, 2, act.size() - 1);
        else if (act.size() == 1)
            throw std::invalid_argument("grow_triangles: odd number of flip points on the line");
        Triangle t;
        if (kind == 0) {
            int a = flips[act[at]], b = flips[act[at + 1]];
            t.lo = a + 1;
            t.hi = b;
            t.x_minus = a + 0.5;
            t.x_plus = b + 0.5;
            act.erase(act.begin() + at, act.begin() + at + 2);
        } else if (kind == 1) {
            int a = flips[act[at]];
            t.lo = -N;
            t.hi = a;
            t.x_minus = -N;
            t.x_plus = a + 0.5;
            t.left_boundary = true;
            act.erase(act.begin());
        } else {
            int a = flips[act[at]];
            t.lo = a + 1;
            t.hi = N;
            t.x_minus = a + 0.5;
            t.x_plus = N;
            t.right_boundary = true;
            act.pop_back();
        }
        out.push_back(t);
    }
    std::sort(out.begin(), out.end(), [](const Triangle& a, const Triangle& b) {
        return a.lo != b.lo ? a.lo < b.lo : a.hi > b.hi;
    });
}

} // namespace

int triangle_distance(const Triangle& a, const Triangle& b)
{
    // flip point f + 1/2 is stored as f
    int pa[2], pb[2];
    int na = 0, nb = 0;
    if (!a.left_boundary)
        pa[na++] = a.lo - 1;
    if (!a.right_boundary)
        pa[na++] = a.hi;
    if (!b.left_boundary)
        pb[nb++] = b.lo - 1;
    if (!b.right_boundary)
        pb[nb++] = b.hi;
    int d = std::numeric_limits<int>::max();
    for (int i = 0; i < na; ++i)
        for (int j = 0; j < nb; ++j)
            d = std::min(d, std::abs(pa[i] - pb[j]));
    return d;
}

std::vector<Triangle> grow_triangles(const std::vector<int>& flips, int N, bool walls)
{
    std::vector<Triangle> out;
    grow_once(flips, N, walls, out);
    return out;
}

namespace {

std::vector<int> coverage(int N, const std::vector<Triangle>& tris)
{
    std::vector<int> cov(2 * N + 1, 0);
    for (const auto& t : tris)
        for (int x = t.lo; x <= t.hi; ++x)
            ++cov[x + N];
    return cov;
}

} // namespace

TriangleSet triangles_from_config(const SpinConfig& sigma)
{
    const int N = sigma.N;
    std::vector<int> flips;
    for (int f = -N; f < N; ++f)
        if (sigma.at(f) != sigma.at(f + 1))
            flips.push_back(f);
    TriangleSet ts;
    ts.triangles = grow_triangles(flips, N, true);
    std::vector<int> cov = coverage(N, ts.triangles);
    int sign = 0;
    for (int x = -N; x <= N; ++x) {
        if (cov[x + N] != 0)
            continue;
        if (sign == 0)
            sign = sigma.at(x);
        else if (sign != sigma.at(x))
            throw std::logic_error("triangles_from_config: exterior is not constant");
    }
    if (sign == 0) {
        ts.ext_empty = true;
        sign = sigma.at(-N);
    }
    ts.ext_sign = sign;
    return ts;
}

SpinConfig config_from_triangles(int N, const std::vector<Triangle>& tris, int ext_sign)
{
    std::vector<int> cov = coverage(N, tris);
    // an empty exterior takes its sign from the leftmost spin
    int ref = -N;
    for (int x = -N; x <= N; ++x)
        if (cov[x + N] == 0) {
            ref = x;
            break;
        }
    SpinConfig s(N, 1);
    for (int x = -N; x <= N; ++x)
        s.at(x) = ((cov[x + N] + cov[ref + N]) % 2 == 0) ? ext_sign : -ext_sign;
    return s;
}

int omega_sign(const SpinConfig& sigma)
{
    return triangles_from_config(sigma).ext_sign;
}

SpinConfig family_config(int N, const std::vector<Triangle>& tris)
{
    std::vector<int> cov = coverage(N, tris);
    SpinConfig s(N, 1);
    for (int x = -N; x <= N; ++x)
        s.at(x) = (cov[x + N] % 2 == 0) ? 1 : -1;
    return s;
}

std::string dump_triangles(const std::vector<Triangle>& tris, const ContourSet& cs)
{
    std::ostringstream os;
    for (const auto& t : tris)
        os << t.x_minus << ' ' << t.x_plus << ' ' << t.mass() << ' '
           << (t.left_boundary ? "L" : (t.right_boundary ? "R" : "-")) << '\n';
    for (const auto& g : cs.contours) {
        for (std::size_t i = 0; i < g.size(); ++i)
            os << (i ? " " : "") << g[i];
        os << '\n';
    }
    return os.str();
}

} // namespace lrising
