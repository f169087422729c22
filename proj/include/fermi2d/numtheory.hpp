#pragma once

// Brute-force checks of the lattice-sum inequalities. Each check reports the
// measured constant lhs / bound_shape; the constants in the inequalities are
// non-explicit, so nothing here asserts a particular value.

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fermi2d/common.hpp"
#include "fermi2d/lattice.hpp"

namespace fermi2d {

struct BoundReport {
    std::string label;
    double lhs = 0;
    double bound_shape = 1;
    double measured_constant = 0;
    std::map<std::string, double> parameters;
};

inline BoundReport make_report(std::string label, double lhs, double shape, std::map<std::string, double> params)
{
    BoundReport r;
    r.label = std::move(label);
    r.lhs = lhs;
    r.bound_shape = shape;
    r.measured_constant = (lhs == 0.0) ? 0.0 : lhs / shape;
    r.parameters = std::move(params);
    return r;
}

// log N, floored at 1 so that N = 1 (log N = 0) still yields a finite constant.
inline double log_n_shape(const FermiSystem& sys) { return std::max(1.0, std::log(static_cast<double>(sys.N))); }

/// hbar^2 sum_{p in L_k} 1/lambda_{k,p} against log N, summed directly over
/// the lune points in lexicographic order.
inline BoundReport lune_inverse_energy_sum(const FermiSystem& sys, LatticeVec k)
{
    CompensatedSum s;
    const double h2 = sys.hbar * sys.hbar;
    for (const auto& lp : lune(sys, k)) s.add(h2 / lp.lambda_kp);
    return make_report("lune_inverse_energy_sum", s.value(), log_n_shape(sys),
                       {{"N", double(sys.N)}, {"k1", double(k.k1)}, {"k2", double(k.k2)}});
}

/// Same sum, grouped by the integer |p|^2 - |p-k|^2: hbar^2 / lambda = 2 / m.
inline double lune_inverse_energy_sum_grouped(const FermiSystem& sys, LatticeVec k)
{
    std::map<std::int64_t, std::int64_t> histogram;
    for (const auto& lp : lune(sys, k)) ++histogram[lp.energy_units];
    CompensatedSum s;
    for (auto [m, count] : histogram) s.add(2.0 * static_cast<double>(count) / static_cast<double>(m));
    return s.value();
}

/// hbar^2 sum_{p in A} 1/e(p) for A the closed ball of radius factor * k_F,
/// evaluated shell by shell: sum_n r2(n) / |n - k_F^2|. The shape is N^epsilon.
inline BoundReport inverse_excitation_sum(const FermiSystem& sys, double radius_factor, double epsilon = 0.0)
{
    if (!(radius_factor > 0.0 && radius_factor <= 2.0))
        throw ValidationError("inverse_excitation_sum: radius factor must lie in (0, 2]");
    const auto nmax = static_cast<std::int64_t>(std::floor(radius_factor * radius_factor * sys.kf_sq()));
    const auto table = r2_table(nmax);
    CompensatedSum s;
    for (std::int64_t n = 0; n <= nmax; ++n) {
        const auto count = table[static_cast<std::size_t>(n)];
        if (count == 0) continue;
        const double gap = 0.5 * static_cast<double>(std::llabs(2 * n - sys.kf_sq_twice));
        s.add(static_cast<double>(count) / gap);
    }
    return make_report("inverse_excitation_sum", s.value(), std::pow(static_cast<double>(sys.N), epsilon),
                       {{"N", double(sys.N)}, {"radius_factor", radius_factor}, {"epsilon", epsilon}});
}

/// hbar^2 sum_{p in A} 1/e(p) for an arbitrary finite set A.
inline double inverse_excitation_sum_over(const FermiSystem& sys, std::span<const LatticeVec> points)
{
    CompensatedSum s;
    for (auto p : points) s.add(2.0 / static_cast<double>(std::llabs(2 * p.norm_sq() - sys.kf_sq_twice)));
    return s.value();
}

enum class KSampling { lexicographic, by_norm };

/// The first `count` nonzero lattice vectors with |k| <= radius, in the given order.
inline std::vector<LatticeVec> sample_k(double radius, std::size_t count, KSampling order)
{
    std::vector<LatticeVec> all;
    const auto r = static_cast<std::int64_t>(std::floor(radius));
    const double r_sq = radius * radius;
    for (std::int64_t a = -r; a <= r; ++a)
        for (std::int64_t b = -r; b <= r; ++b) {
            const LatticeVec k{a, b};
            if (!k.is_zero() && static_cast<double>(k.norm_sq()) <= r_sq) all.push_back(k);
        }
    if (order == KSampling::by_norm)
        std::stable_sort(all.begin(), all.end(),
                         [](LatticeVec x, LatticeVec y) { return x.norm_sq() < y.norm_sq(); });
    if (all.size() > count) all.resize(count);
    return all;
}

/// Deterministic spread of nonzero k over the disk |k| <= radius: radii evenly
/// spaced, directions stepped by the golden angle.
inline std::vector<LatticeVec> spread_k(double radius, std::size_t count)
{
    std::vector<LatticeVec> out;
    constexpr double golden_angle = 2.39996322972865332;
    for (std::size_t j = 0; j < count; ++j) {
        const double rad = radius * (static_cast<double>(j) + 0.5) / static_cast<double>(count);
        const double phi = golden_angle * static_cast<double>(j);
        LatticeVec k{std::llround(rad * std::cos(phi)), std::llround(rad * std::sin(phi))};
        if (k.is_zero()) k = {1, 0};
        out.push_back(k);
    }
    return out;
}

/// Annulus-intersection counts against N^{3/4 - 5 alpha/2} + N^{1/4 - alpha/2},
/// with thickness exactly N^{-alpha}.
inline std::vector<BoundReport> annulus_bound_report(double alpha, std::span<const std::int64_t> shells,
                                                     std::size_t k_samples,
                                                     KSampling order = KSampling::lexicographic)
{
    if (!(alpha > 0.0 && alpha < 0.5)) throw ValidationError("annulus_bound_report: alpha must lie in (0, 1/2)");
    if (shells.empty()) throw ValidationError("annulus_bound_report: shell sequence is empty");
    std::vector<BoundReport> out;
    for (auto shell : shells) {
        const auto sys = build_fermi_system(shell);
        const double n = static_cast<double>(sys.N);
        const double width = std::pow(n, -alpha);
        const double kf = sys.kf();
        const double shape = std::pow(n, 0.75 - 2.5 * alpha) + std::pow(n, 0.25 - 0.5 * alpha);
        for (auto k : sample_k(2.0 * kf + 2.0 * width, k_samples, order)) {
            const auto count = annulus_intersection_count(kf, width, k);
            out.push_back(make_report("annulus_intersection", static_cast<double>(count), shape,
                                      {{"N", n}, {"alpha", alpha}, {"width", width}, {"k1", double(k.k1)},
                                       {"k2", double(k.k2)}}));
        }
    }
    return out;
}

/// |G_delta| against N^{1/2 - delta}.
inline BoundReport gap_set_report(const FermiSystem& sys, double delta)
{
    const auto size = static_cast<double>(gap_set(sys, delta).size());
    return make_report("gap_set", size, std::pow(static_cast<double>(sys.N), 0.5 - delta),
                       {{"N", double(sys.N)}, {"delta", delta}});
}

struct DecadeMax {
    std::int64_t lo = 0;
    std::int64_t hi = 0; // exclusive
    double max_ratio = 0;
    std::int64_t argmax = 0;
};

struct R2GrowthReport {
    std::int64_t nmax = 0;
    double max_ratio = 0; // max over 2 <= n <= nmax of log r2(n) / log n
    std::int64_t argmax = 0;
    std::vector<DecadeMax> decades;
    bool decades_nonincreasing = true;
};

inline R2GrowthReport r2_growth(std::int64_t nmax)
{
    if (nmax < 2) throw ValidationError("r2_growth: nmax must be >= 2");
    const auto table = r2_table(nmax);
    R2GrowthReport rep;
    rep.nmax = nmax;
    for (std::int64_t lo = 1; lo <= nmax; lo *= 10) rep.decades.push_back({lo, lo * 10, 0.0, 0});
    for (std::int64_t n = 2; n <= nmax; ++n) {
        const auto r = table[static_cast<std::size_t>(n)];
        if (r == 0) continue;
        const double ratio = std::log(static_cast<double>(r)) / std::log(static_cast<double>(n));
        if (ratio > rep.max_ratio) {
            rep.max_ratio = ratio;
            rep.argmax = n;
        }
        std::size_t decade = 0;
        for (std::int64_t m = n; m >= 10; m /= 10) ++decade;
        auto& d = rep.decades[decade];
        if (ratio > d.max_ratio) {
            d.max_ratio = ratio;
            d.argmax = n;
        }
    }
    for (std::size_t i = 1; i < rep.decades.size(); ++i)
        if (rep.decades[i].max_ratio > rep.decades[i - 1].max_ratio) rep.decades_nonincreasing = false;
    return rep;
}

} // namespace fermi2d
