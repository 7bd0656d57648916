#include "lrising/lattice.hpp"

#include <cmath>
#include <stdexcept>

#include "lrising/rng.hpp"

namespace lrising {

void ModelParams::validate() const
{
    if (!(alpha >= 0.0 && alpha < 1.0))
        throw std::invalid_argument("alpha must lie in [0, 1)");
    if (!(beta >= 0.0))
        throw std::invalid_argument("beta must be nonnegative");
    if (!(J >= 1.0))
        throw std::invalid_argument("J must be at least 1");
    if (N < 1)
        throw std::invalid_argument("N must be at least 1");
    if (Y <= N)
        throw std::invalid_argument("Y must exceed N");
}

SpinConfig SpinConfig::from_code(int n, std::uint64_t code)
{
    SpinConfig c(n, 1);
    for (int i = 0; i < c.size(); ++i)
        if ((code >> i) & 1ULL)
            c.s[i] = -1;
    return c;
}

std::uint64_t SpinConfig::code() const
{
    std::uint64_t c = 0;
    for (int i = 0; i < size(); ++i)
        if (s[i] < 0)
            c |= 1ULL << i;
    return c;
}

SpinConfig SpinConfig::flipped() const
{
    SpinConfig c = *this;
    for (auto& v : c.s)
        v = -v;
    return c;
}

const char* to_string(BcKind k)
{
    switch (k) {
    case BcKind::random: return "random";
    case BcKind::all_plus: return "plus";
    case BcKind::all_minus: return "minus";
    case BcKind::dobrushin: return "dobrushin";
    case BcKind::free: return "free";
    }
    return "?";
}

BcKind bc_kind_from_string(const std::string& name)
{
    if (name == "random") return BcKind::random;
    if (name == "plus") return BcKind::all_plus;
    if (name == "minus") return BcKind::all_minus;
    if (name == "dobrushin") return BcKind::dobrushin;
    if (name == "free") return BcKind::free;
    throw std::invalid_argument("unknown boundary kind: " + name);
}

int BoundaryCondition::at(int y) const
{
    if (y > N && y <= Y)
        return right[y - N - 1];
    if (y < -N && y >= -Y)
        return left[-y - N - 1];
    return 0;
}

BoundaryCondition BoundaryCondition::negated() const
{
    BoundaryCondition b = *this;
    for (auto& v : b.right)
        v = -v;
    for (auto& v : b.left)
        v = -v;
    if (kind == BcKind::all_plus)
        b.kind = BcKind::all_minus;
    else if (kind == BcKind::all_minus)
        b.kind = BcKind::all_plus;
    return b;
}

BoundaryCondition BoundaryCondition::truncated(int y_max) const
{
    if (y_max <= N || y_max > Y)
        throw std::invalid_argument("truncation radius must lie in (N, Y]");
    BoundaryCondition b = *this;
    b.Y = y_max;
    b.right.resize(y_max - N);
    b.left.resize(y_max - N);
    return b;
}

int random_sign(std::uint64_t seed, std::uint64_t stream, std::uint64_t j)
{
    std::uint64_t w = counter_word(seed, stream, j >> 6);
    return ((w >> (j & 63)) & 1ULL) ? 1 : -1;
}

BoundaryCondition make_boundary(BcKind kind, int N, int Y, std::uint64_t seed, std::uint64_t stream)
{
    if (N < 1 || Y <= N)
        throw std::invalid_argument("boundary condition needs 1 <= N < Y");
    BoundaryCondition b;
    b.N = N;
    b.Y = Y;
    b.kind = kind;
    b.seed = seed;
    b.stream = stream;
    std::size_t L = static_cast<std::size_t>(Y - N);
    b.right.assign(L, 0);
    b.left.assign(L, 0);
    switch (kind) {
    case BcKind::free:
        break;
    case BcKind::all_plus:
        b.right.assign(L, 1);
        b.left.assign(L, 1);
        break;
    case BcKind::all_minus:
        b.right.assign(L, -1);
        b.left.assign(L, -1);
        break;
    case BcKind::dobrushin:
        b.right.assign(L, 1);
        b.left.assign(L, -1);
        break;
    case BcKind::random: {
        std::uint64_t word = 0;
        for (std::size_t j = 0; j < 2 * L; ++j) {
            if ((j & 63) == 0)
                word = counter_word(seed, stream, j >> 6);
            int v = ((word >> (j & 63)) & 1ULL) ? 1 : -1;
            if (j < L)
                b.right[j] = v;
            else
                b.left[j - L] = v;
        }
        break;
    }
    }
    return b;
}

double MeasureMarginal::total() const
{
    double t = 0.0;
    for (double v : probs)
        t += v;
    return t;
}

MeasureMarginal point_mass(const std::vector<int>& window, int spin)
{
    MeasureMarginal m;
    m.window = window;
    m.probs.assign(std::size_t{1} << window.size(), 0.0);
    m.probs[spin > 0 ? m.probs.size() - 1 : 0] = 1.0;
    return m;
}

double coupling(int x, int y, const ModelParams& p)
{
    int d = std::abs(x - y);
    if (d == 0)
        return 0.0;
    if (d == 1)
        return p.J;
    return std::pow(static_cast<double>(d), p.alpha - 2.0);
}

CouplingTable::CouplingTable(const ModelParams& p, int d_max) : tab_(d_max + 1, 0.0)
{
    for (int d = 1; d <= d_max; ++d)
        tab_[d] = d == 1 ? p.J : std::pow(static_cast<double>(d), p.alpha - 2.0);
}

double hamiltonian(const SpinConfig& sigma, const BoundaryCondition& eta, const ModelParams& p,
                   HamForm form)
{
    const int N = p.N;
    if (sigma.N != N || eta.N != N || eta.Y != p.Y)
        throw std::invalid_argument("hamiltonian: volume mismatch");
    CouplingTable J(p, N + p.Y);
    double H = 0.0;
    for (int d = 1; d <= 2 * N; ++d) {
        const double j = J(d);
        for (int x = -N; x + d <= N; ++x) {
            int a = sigma.at(x), b = sigma.at(x + d);
            if (form == HamForm::spin_product)
                H -= j * a * b;
            else if (a != b)
                H += j;
        }
    }
    if (eta.kind == BcKind::free)
        return H;
    for (int d = 1; d <= N + p.Y; ++d) {
        const double j = J(d);
        for (int x = -N; x <= N; ++x) {
            const int s = sigma.at(x);
            for (int y : {x - d, x + d}) {
                int e = eta.at(y);
                if (e == 0)
                    continue;
                if (form == HamForm::spin_product)
                    H -= j * s * e;
                else if (s != e)
                    H += j;
            }
        }
    }
    return H;
}

double boundary_field(int x, const BoundaryCondition& eta, const ModelParams& p)
{
    if (x < -p.N || x > p.N)
        throw std::invalid_argument("boundary_field: site outside the volume");
    if (eta.kind == BcKind::free)
        return 0.0;
    double h = 0.0;
    for (int d = 1; d <= p.N + p.Y; ++d) {
        double j = 0.0;
        for (int y : {x - d, x + d}) {
            int e = eta.at(y);
            if (e == 0)
                continue;
            if (j == 0.0)
                j = coupling(x, y, p);
            h += j * e;
        }
    }
    return h;
}

std::vector<double> boundary_fields(const BoundaryCondition& eta, const ModelParams& p)
{
    std::vector<double> h(2 * p.N + 1, 0.0);
    if (eta.kind == BcKind::free)
        return h;
    CouplingTable J(p, p.N + p.Y);
    for (int x = -p.N; x <= p.N; ++x) {
        double acc = 0.0;
        for (int d = 1; d <= p.N + p.Y; ++d) {
            const double j = J(d);
            for (int y : {x - d, x + d}) {
                int e = eta.at(y);
                if (e != 0)
                    acc += j * e;
            }
        }
        h[x + p.N] = acc;
    }
    return h;
}

double truncation_tail_bound(const ModelParams& p)
{
    double twoN1 = 2.0 * p.N + 1.0;
    return 2.0 * twoN1 * twoN1 * std::pow(static_cast<double>(p.Y - p.N), 2.0 * p.alpha - 3.0) /
           (3.0 - 2.0 * p.alpha);
}

std::vector<double> profile_values(const ModelParams& p)
{
    // S_y = P(y+N) - P(y-N-1) with P the partial sums of J(d).
    const int N = p.N;
    const int top = p.Y + N;
    std::vector<long double> P(top + 1, 0.0L);
    for (int d = 1; d <= top; ++d) {
        long double j = d == 1 ? static_cast<long double>(p.J)
                               : std::pow(static_cast<long double>(d),
                                          static_cast<long double>(p.alpha) - 2.0L);
        P[d] = P[d - 1] + j;
    }
    std::vector<double> S(p.Y - N);
    for (int y = N + 1; y <= p.Y; ++y)
        S[y - N - 1] = static_cast<double>(P[y + N] - P[y - N - 1]);
    return S;
}

CoefficientProfile coefficient_profile(const ModelParams& p)
{
    CoefficientProfile out;
    out.S = profile_values(p);
    const double C = (2.0 - p.alpha) / (1.0 - p.alpha);
    out.bound.resize(out.S.size());
    for (int y = p.N + 1; y <= p.Y; ++y) {
        double b = C * std::pow(static_cast<double>(y - p.N), p.alpha - 1.0);
        out.bound[y - p.N - 1] = b;
        if (y > 2 * p.N && out.S[y - p.N - 1] > b)
            out.bound_holds_beyond_2N = false;
    }
    return out;
}

BoundaryEnergy boundary_energy(const BoundaryCondition& eta, const ModelParams& p)
{
    if (eta.N != p.N || eta.Y != p.Y)
        throw std::invalid_argument("boundary_energy: volume mismatch");
    BoundaryEnergy out;
    out.tail_variance_bound = truncation_tail_bound(p);
    if (eta.kind == BcKind::free)
        return out;
    std::vector<double> S = profile_values(p);
    double W = 0.0;
    for (std::size_t k = 0; k < S.size(); ++k)
        W += S[k] * (eta.right[k] + eta.left[k]);
    out.W = W;
    return out;
}

double window_distance(const MeasureMarginal& a, const MeasureMarginal& b)
{
    if (a.window != b.window || a.probs.size() != b.probs.size())
        throw std::invalid_argument("window_distance: marginals live on different windows");
    double d = 0.0;
    for (std::size_t i = 0; i < a.probs.size(); ++i)
        d += std::abs(a.probs[i] - b.probs[i]);
    return d;
}

} // namespace lrising
