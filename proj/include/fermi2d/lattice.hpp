#pragma once

// Integer lattice Z^2: Fermi balls, lunes, gap sets and annulus intersections.
// Every membership decision is made on exact integers; k_F^2 is a half-integer
// and is carried as twice its value.

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <cstdlib>
#include <vector>

#include "fermi2d/common.hpp"

namespace fermi2d {

struct LatticeVec {
    std::int64_t k1 = 0;
    std::int64_t k2 = 0;

    constexpr std::int64_t norm_sq() const noexcept { return k1 * k1 + k2 * k2; }
    double norm() const noexcept { return std::sqrt(static_cast<double>(norm_sq())); }
    constexpr bool is_zero() const noexcept { return k1 == 0 && k2 == 0; }

    friend constexpr LatticeVec operator+(LatticeVec a, LatticeVec b) noexcept { return {a.k1 + b.k1, a.k2 + b.k2}; }
    friend constexpr LatticeVec operator-(LatticeVec a, LatticeVec b) noexcept { return {a.k1 - b.k1, a.k2 - b.k2}; }
    friend constexpr LatticeVec operator-(LatticeVec a) noexcept { return {-a.k1, -a.k2}; }
    friend constexpr std::int64_t dot(LatticeVec a, LatticeVec b) noexcept { return a.k1 * b.k1 + a.k2 * b.k2; }
    // lexicographic in (k1, k2)
    friend constexpr auto operator<=>(const LatticeVec&, const LatticeVec&) = default;
};

inline std::int64_t isqrt(std::int64_t n)
{
    if (n < 0) return -1;
    auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(n)));
    while (r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r;
}

inline std::int64_t chebyshev(LatticeVec k) noexcept { return std::max(std::llabs(k.k1), std::llabs(k.k2)); }

/// Number of p in Z^2 with |p|^2 = n.
inline std::int64_t r2(std::int64_t n)
{
    if (n < 0) throw ValidationError("r2: n must be non-negative");
    std::int64_t count = 0;
    for (std::int64_t a = -isqrt(n); a * a <= n; ++a) {
        const std::int64_t rest = n - a * a;
        const std::int64_t b = isqrt(rest);
        if (b * b == rest) count += (b == 0) ? 1 : 2;
    }
    return count;
}

/// r2(n) for all 0 <= n <= nmax, by one pass over the disk.
inline std::vector<std::int64_t> r2_table(std::int64_t nmax)
{
    if (nmax < 0) throw ValidationError("r2_table: nmax must be non-negative");
    std::vector<std::int64_t> table(static_cast<std::size_t>(nmax) + 1, 0);
    for (std::int64_t a = 0; a * a <= nmax; ++a) {
        const std::int64_t bmax = isqrt(nmax - a * a);
        for (std::int64_t b = -bmax; b <= bmax; ++b)
            table[static_cast<std::size_t>(a * a + b * b)] += (a == 0) ? 1 : 2;
    }
    return table;
}

/// |{p : |p|^2 <= n}| by row counting.
inline std::int64_t disk_count(std::int64_t n)
{
    if (n < 0) return 0;
    std::int64_t count = 0;
    for (std::int64_t a = -isqrt(n); a * a <= n; ++a) count += 2 * isqrt(n - a * a) + 1;
    return count;
}

/// Filled-shell Fermi ball. `shell_max` is the largest occupied |k|^2 and is
/// always itself a representable shell.
struct FermiSystem {
    std::int64_t shell_max = 0;
    std::int64_t N = 1;
    std::int64_t kf_sq_twice = 1; // 2 k_F^2 = shell_max + next shell
    double hbar = 1.0;
    double kappa = 1.0 / std::sqrt(pi);

    double kf_sq() const noexcept { return 0.5 * static_cast<double>(kf_sq_twice); }
    double kf() const noexcept { return std::sqrt(kf_sq()); }
    std::int64_t next_shell() const noexcept { return kf_sq_twice - shell_max; }

    /// p in B_F, i.e. |p|^2 < k_F^2.
    bool occupied(LatticeVec p) const noexcept { return 2 * p.norm_sq() < kf_sq_twice; }

    /// e(p) = hbar^2 | |p|^2 - k_F^2 |
    double excitation_energy(LatticeVec p) const noexcept
    {
        return hbar * hbar * 0.5 * static_cast<double>(std::llabs(2 * p.norm_sq() - kf_sq_twice));
    }
};

/// Fills every lattice point with |k|^2 <= shell_max. A non-representable
/// shell_max is lowered to the largest representable shell below it, so that
/// k_F^2 is the midpoint between the last occupied and first empty shells.
inline FermiSystem build_fermi_system(std::int64_t shell_max)
{
    if (shell_max < 0) throw ValidationError("build_fermi_system: shell_max must be >= 0");
    std::int64_t last = shell_max;
    while (last > 0 && r2(last) == 0) --last;
    std::int64_t next = shell_max + 1;
    while (r2(next) == 0) ++next;

    FermiSystem sys;
    sys.shell_max = last;
    sys.N = disk_count(last);
    sys.kf_sq_twice = last + next;
    sys.hbar = 1.0 / std::sqrt(static_cast<double>(sys.N));
    return sys;
}

/// Lattice points of B_F in lexicographic order.
inline std::vector<LatticeVec> fermi_ball(const FermiSystem& sys)
{
    std::vector<LatticeVec> pts;
    pts.reserve(static_cast<std::size_t>(sys.N));
    const std::int64_t r = isqrt(sys.shell_max);
    for (std::int64_t a = -r; a <= r; ++a) {
        const std::int64_t b = isqrt(sys.shell_max - a * a);
        for (std::int64_t c = -b; c <= b; ++c) pts.push_back({a, c});
    }
    return pts;
}

struct LunePoint {
    LatticeVec p;
    double e_p = 0;         // e(p)
    double e_p_minus_k = 0; // e(p - k)
    double lambda_kp = 0;   // (hbar^2 / 2)(|p|^2 - |p-k|^2)
    std::int64_t energy_units = 0; // |p|^2 - |p-k|^2, an exact positive integer
};

/// L_k = B_F^c ∩ (B_F + k), lexicographically sorted.
inline std::vector<LunePoint> lune(const FermiSystem& sys, LatticeVec k)
{
    std::vector<LunePoint> out;
    if (k.is_zero()) return out;
    const double h2 = sys.hbar * sys.hbar;
    const std::int64_t box = static_cast<std::int64_t>(std::ceil(sys.kf())) + chebyshev(k);
    for (std::int64_t a = -box; a <= box; ++a) {
        for (std::int64_t b = -box; b <= box; ++b) {
            const LatticeVec p{a, b};
            const LatticeVec h = p - k;
            if (sys.occupied(p) || !sys.occupied(h)) continue;
            LunePoint lp;
            lp.p = p;
            lp.e_p = sys.excitation_energy(p);
            lp.e_p_minus_k = sys.excitation_energy(h);
            lp.energy_units = p.norm_sq() - h.norm_sq();
            lp.lambda_kp = 0.5 * h2 * static_cast<double>(lp.energy_units);
            out.push_back(lp);
        }
    }
    return out;
}

/// Gap set {p : e(p) <= hbar N^{-delta}}, i.e. ||p|^2 - k_F^2| <= N^{1/2 - delta}.
inline std::vector<LatticeVec> gap_set(const FermiSystem& sys, double delta)
{
    if (!(delta >= 0.0 && delta <= 0.5)) throw ValidationError("gap_set: delta must lie in [0, 1/2]");
    const double width = std::pow(static_cast<double>(sys.N), 0.5 - delta);
    const double twice_width = 2.0 * width;
    const auto outer = static_cast<std::int64_t>(std::floor(sys.kf_sq() + width)) + 1;
    const std::int64_t r = isqrt(outer);
    std::vector<LatticeVec> out;
    for (std::int64_t a = -r; a <= r; ++a) {
        for (std::int64_t b = -r; b <= r; ++b) {
            const LatticeVec p{a, b};
            const auto gap = static_cast<double>(std::llabs(2 * p.norm_sq() - sys.kf_sq_twice));
            if (gap <= twice_width) out.push_back(p);
        }
    }
    return out;
}

/// |A ∩ (A + k) ∩ Z^2| with A = {kf <= |p| < kf + width}.
inline std::int64_t annulus_intersection_count(double kf, double width, LatticeVec k)
{
    if (!(kf > 0.0)) throw ValidationError("annulus_intersection_count: kf must be positive");
    if (!(width > 0.0)) throw ValidationError("annulus_intersection_count: width must be positive");
    if (k.is_zero()) throw ValidationError("annulus_intersection_count: k must be nonzero");
    const double inner = kf * kf;
    const double outer = (kf + width) * (kf + width);
    auto in_annulus = [&](LatticeVec p) {
        const auto n = static_cast<double>(p.norm_sq());
        return n >= inner && n < outer;
    };
    const std::int64_t box = static_cast<std::int64_t>(std::ceil(kf + width));
    std::int64_t count = 0;
    // p ranges over the annulus itself; p - k must land in it too
    for (std::int64_t a = -box; a <= box; ++a)
        for (std::int64_t b = -box; b <= box; ++b) {
            const LatticeVec p{a, b};
            if (in_annulus(p) && in_annulus(p - k)) ++count;
        }
    return count;
}

} // namespace fermi2d
