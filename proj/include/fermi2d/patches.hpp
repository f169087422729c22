#pragma once

// Patch decomposition of the Fermi circle: M arcs of opening angle 2π/M,
// centered at θ_α = (α-1)·2π/M measured counterclockwise from e2, trimmed by
// corridors of angle 2R/k_F and thickened radially to k_F - R < |p| < k_F + R.
// Patch indices α are 1-based throughout.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "fermi2d/common.hpp"
#include "fermi2d/lattice.hpp"

namespace fermi2d {

struct ConstraintThresholds {
    double lo = 0.5;
    double hi = 0.5;
};

struct ConstraintReport {
    double ratio_lower = 0; // R N^δ / M
    double ratio_upper = 0; // M R^2 N^{δ-1/2}
    double trivial_R = 0;   // R / N^{1/2}
    double trivial_M = 0;   // M / N^{1/2}
    bool ok = false;
    std::vector<std::string> warnings;
};

struct Vec2 {
    double x = 0;
    double y = 0;
};

/// ω̂(θ): the unit vector at angle θ counterclockwise from e2.
inline Vec2 direction_from_e2(double theta) { return {-std::sin(theta), std::cos(theta)}; }

/// Angle of p counterclockwise from e2, in [0, 2π).
inline double angle_from_e2(double x, double y)
{
    double t = std::atan2(-x, y);
    if (t < 0.0) t += 2.0 * pi;
    if (t >= 2.0 * pi) t -= 2.0 * pi;
    return t;
}

struct PatchDecomposition {
    int M = 0;
    double R = 0;
    double delta = 0;
    double kf = 0;
    std::int64_t N = 0;
    std::vector<double> theta;
    std::vector<Vec2> omega_hat;
    double arc_angle = 0;      // Δθ = 2π/M
    double corridor_angle = 0; // 2R/k_F
    double patch_angle = 0;    // Δθ - corridor
    double belt = 0;           // N^{-δ}
    double band_inner_sq = 0;  // (k_F - R)^2, or -1 when k_F <= R
    double band_outer_sq = 0;  // (k_F + R)^2
    ConstraintReport constraints;

    const Vec2& omega(int alpha) const { return omega_hat.at(static_cast<std::size_t>(alpha - 1)); }
    double dot_omega(LatticeVec k, int alpha) const
    {
        const auto& w = omega(alpha);
        return static_cast<double>(k.k1) * w.x + static_cast<double>(k.k2) * w.y;
    }
    int reflect(int alpha) const { return (alpha - 1 + M / 2) % M + 1; }
};

inline ConstraintReport evaluate_constraints(std::int64_t N, int M, double R, double delta,
                                             const ConstraintThresholds& thr)
{
    const double n = static_cast<double>(N);
    ConstraintReport c;
    c.ratio_lower = R * std::pow(n, delta) / M;
    c.ratio_upper = M * R * R * std::pow(n, delta - 0.5);
    c.trivial_R = R / std::sqrt(n);
    c.trivial_M = M / std::sqrt(n);
    if (!(c.ratio_lower < thr.lo)) c.warnings.push_back("R N^delta / M not small");
    if (!(c.ratio_upper < thr.hi)) c.warnings.push_back("M R^2 N^(delta-1/2) not small");
    if (!(c.trivial_R < 1.0)) c.warnings.push_back("R >= N^(1/2)");
    if (!(c.trivial_M < 1.0)) c.warnings.push_back("M >= N^(1/2)");
    c.ok = c.warnings.empty();
    return c;
}

/// Builds the decomposition. Constraint violations are recorded as warnings;
/// only corridors that swallow the arcs are fatal.
inline PatchDecomposition build_patches(const FermiSystem& sys, int M, double R, double delta,
                                        const ConstraintThresholds& thr = {})
{
    if (M < 2 || M % 2 != 0) throw ValidationError("patches: M must be an even integer >= 2");
    if (!(R > 0.0)) throw ValidationError("patches: R must be positive");
    if (!(delta > 0.0)) throw ValidationError("patches: delta must be positive");

    PatchDecomposition d;
    d.M = M;
    d.R = R;
    d.delta = delta;
    d.kf = sys.kf();
    d.N = sys.N;
    d.arc_angle = 2.0 * pi / M;
    d.corridor_angle = 2.0 * R / d.kf;
    d.patch_angle = d.arc_angle - d.corridor_angle;
    if (!(d.patch_angle > 0.0))
        throw ValidationError("patches: corridor angle 2R/k_F >= 2pi/M leaves no room for patches");
    d.belt = std::pow(static_cast<double>(sys.N), -delta);
    d.band_inner_sq = d.kf > R ? (d.kf - R) * (d.kf - R) : -1.0;
    d.band_outer_sq = (d.kf + R) * (d.kf + R);
    for (int a = 0; a < M; ++a) {
        d.theta.push_back(a * d.arc_angle);
        d.omega_hat.push_back(direction_from_e2(a * d.arc_angle));
    }
    // exact reflection ω̂_{α+M/2} = -ω̂_α
    for (int a = 0; a < M / 2; ++a)
        d.omega_hat[static_cast<std::size_t>(a + M / 2)] = {-d.omega_hat[static_cast<std::size_t>(a)].x,
                                                             -d.omega_hat[static_cast<std::size_t>(a)].y};
    d.constraints = evaluate_constraints(sys.N, M, R, delta, thr);
    return d;
}

struct Corridor {};
struct OutsideBand {};
struct InPatch {
    int alpha;
};
using PointClass = std::variant<InPatch, Corridor, OutsideBand>;

/// Patch index (1-based) of p, 0 for corridor points, -1 outside the band.
inline int patch_of(const PatchDecomposition& d, LatticeVec p)
{
    const auto n = static_cast<double>(p.norm_sq());
    if (!(n > d.band_inner_sq && n < d.band_outer_sq)) return -1;
    const double theta = angle_from_e2(static_cast<double>(p.k1), static_cast<double>(p.k2));
    auto nearest = static_cast<int>(std::floor(theta / d.arc_angle + 0.5));
    const double offset = theta - nearest * d.arc_angle;
    nearest %= d.M;
    // half-open [θ_α - Δθ̃/2, θ_α + Δθ̃/2)
    if (offset >= -0.5 * d.patch_angle && offset < 0.5 * d.patch_angle) return nearest + 1;
    return 0;
}

/// Lattice points whose band or patch membership is decided within a relative
/// 1e-12 of a boundary (radial edges or patch edges).
inline std::int64_t guard_band_hits(const PatchDecomposition& d)
{
    constexpr double eps = 1e-12;
    std::int64_t hits = 0;
    const auto r = static_cast<std::int64_t>(std::ceil(d.kf + d.R)) + 1;
    for (std::int64_t a = -r; a <= r; ++a)
        for (std::int64_t b = -r; b <= r; ++b) {
            const auto n = static_cast<double>(a * a + b * b);
            if (std::fabs(n - d.band_outer_sq) <= eps * d.band_outer_sq ||
                (d.band_inner_sq > 0 && std::fabs(n - d.band_inner_sq) <= eps * d.band_inner_sq)) {
                ++hits;
                continue;
            }
            if (!(n > d.band_inner_sq && n < d.band_outer_sq)) continue;
            const double theta = angle_from_e2(static_cast<double>(a), static_cast<double>(b));
            const double offset = theta - std::floor(theta / d.arc_angle + 0.5) * d.arc_angle;
            if (std::fabs(std::fabs(offset) - 0.5 * d.patch_angle) <= eps * 2.0 * pi) ++hits;
        }
    return hits;
}

inline PointClass classify_point(const PatchDecomposition& d, LatticeVec p)
{
    const int a = patch_of(d, p);
    if (a < 0) return OutsideBand{};
    if (a == 0) return Corridor{};
    return InPatch{a};
}

struct IndexSets {
    std::vector<int> plus;  // k·ω̂_α >= N^{-δ}
    std::vector<int> minus; // k·ω̂_α <= -N^{-δ}
};

inline IndexSets index_sets(const PatchDecomposition& d, LatticeVec k)
{
    if (k.is_zero()) throw ValidationError("index_sets: k must be nonzero");
    if (!(k.norm() < d.R)) throw ValidationError("index_sets: |k| must be < R");
    IndexSets s;
    for (int a = 1; a <= d.M; ++a) {
        const double x = d.dot_omega(k, a);
        if (x >= d.belt)
            s.plus.push_back(a);
        else if (x <= -d.belt)
            s.minus.push_back(a);
    }
    return s;
}

struct PairCount {
    LatticeVec k;
    int alpha = 0;
    std::int64_t n_sq = 0;
    double predicted = 0; // (2π k_F / M) |k·ω̂_α|
    double rel_dev = 0;   // n_sq / predicted - 1
};

/// n_α(k)^2 for every α at once: pairs p ∈ B_F^c ∩ B_α with p - k ∈ B_F ∩ B_α.
inline std::vector<std::int64_t> pair_counts_all(const FermiSystem& sys, const PatchDecomposition& d, LatticeVec k)
{
    std::vector<std::int64_t> counts(static_cast<std::size_t>(d.M) + 1, 0);
    if (k.is_zero()) return counts;
    for (const auto& lp : lune(sys, k)) {
        const int a = patch_of(d, lp.p);
        if (a > 0 && patch_of(d, lp.p - k) == a) ++counts[static_cast<std::size_t>(a)];
    }
    return counts;
}

/// n_α(k)^2, using -k for α in I^-.
inline PairCount count_pairs(const FermiSystem& sys, const PatchDecomposition& d, LatticeVec k, int alpha)
{
    if (alpha < 1 || alpha > d.M) throw ValidationError("count_pairs: alpha out of range");
    const double proj = d.dot_omega(k, alpha);
    const LatticeVec transfer = proj < 0.0 ? -k : k;
    PairCount pc;
    pc.k = k;
    pc.alpha = alpha;
    pc.n_sq = pair_counts_all(sys, d, transfer)[static_cast<std::size_t>(alpha)];
    pc.predicted = 2.0 * pi * d.kf / d.M * std::fabs(proj);
    pc.rel_dev = pc.predicted > 0.0 ? static_cast<double>(pc.n_sq) / pc.predicted - 1.0 : 0.0;
    return pc;
}

/// All pair counts for α ∈ I^+(k) ∪ I^-(k), ordered I^+ then I^-.
inline std::vector<PairCount> count_pairs_indexed(const FermiSystem& sys, const PatchDecomposition& d, LatticeVec k)
{
    const auto sets = index_sets(d, k);
    std::vector<PairCount> out;
    const double scale = 2.0 * pi * d.kf / d.M;
    auto fill = [&](const std::vector<int>& alphas, LatticeVec transfer) {
        if (alphas.empty()) return;
        const auto counts = pair_counts_all(sys, d, transfer);
        for (int a : alphas) {
            PairCount pc;
            pc.k = k;
            pc.alpha = a;
            pc.n_sq = counts[static_cast<std::size_t>(a)];
            pc.predicted = scale * std::fabs(d.dot_omega(k, a));
            pc.rel_dev = static_cast<double>(pc.n_sq) / pc.predicted - 1.0;
            out.push_back(pc);
        }
    };
    fill(sets.plus, k);
    fill(sets.minus, -k);
    return out;
}

/// Γ^nor: nonzero k with |k| < R in the upper half-lattice, lexicographic.
inline std::vector<LatticeVec> gamma_nor(double R)
{
    std::vector<LatticeVec> out;
    const auto r = static_cast<std::int64_t>(std::ceil(R));
    for (std::int64_t a = -r; a <= r; ++a)
        for (std::int64_t b = 0; b <= r; ++b) {
            const LatticeVec k{a, b};
            if (!(b > 0 || a > 0)) continue;
            if (static_cast<double>(k.norm_sq()) < R * R) out.push_back(k);
        }
    return out;
}

inline std::vector<LatticeVec> gamma_nor(const PatchDecomposition& d) { return gamma_nor(d.R); }

/// Lattice points of the band k_F - R < |p| < k_F + R, lexicographic.
inline std::vector<LatticeVec> band_points(const PatchDecomposition& d)
{
    std::vector<LatticeVec> out;
    const auto r = static_cast<std::int64_t>(std::ceil(d.kf + d.R));
    for (std::int64_t a = -r; a <= r; ++a)
        for (std::int64_t b = -r; b <= r; ++b) {
            const auto n = static_cast<double>(LatticeVec{a, b}.norm_sq());
            if (n > d.band_inner_sq && n < d.band_outer_sq) out.push_back({a, b});
        }
    return out;
}

/// Largest Euclidean distance between two lattice points of each patch (index α-1).
inline std::vector<double> patch_diameters(const PatchDecomposition& d)
{
    std::vector<std::vector<LatticeVec>> members(static_cast<std::size_t>(d.M));
    for (auto p : band_points(d)) {
        const int a = patch_of(d, p);
        if (a > 0) members[static_cast<std::size_t>(a - 1)].push_back(p);
    }
    std::vector<double> diam(static_cast<std::size_t>(d.M), 0.0);
    for (std::size_t a = 0; a < members.size(); ++a) {
        std::int64_t best = 0;
        const auto& m = members[a];
        for (std::size_t i = 0; i < m.size(); ++i)
            for (std::size_t j = i + 1; j < m.size(); ++j) best = std::max(best, (m[i] - m[j]).norm_sq());
        diam[a] = std::sqrt(static_cast<double>(best));
    }
    return diam;
}

} // namespace fermi2d
