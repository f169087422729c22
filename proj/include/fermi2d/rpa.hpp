#pragma once

// Fermi-sea energy, the RPA correlation energy
//   E^RPA = ħκ Σ_{k∈Z^2} |k|/π ∫_0^∞ F( V̂(k)/(4π) (1 - λ/√(λ²+1)) ) dλ,  F(x) = log(1+x) - x,
// and the per-k traces Tr(E - D - W) of the patch blocks.

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fermi2d/common.hpp"
#include "fermi2d/lattice.hpp"
#include "fermi2d/patches.hpp"
#include "fermi2d/potential.hpp"
#include "fermi2d/quadrature.hpp"
#include "fermi2d/quasiboson.hpp"

namespace fermi2d {

inline double f_func(double x)
{
    if (!(x >= 0.0)) throw ValidationError("F(x): x must be >= 0");
    if (x < 1e-3) {
        // -x²/2 + x³/3 - x⁴/4 + x⁵/5 - x⁶/6 + x⁷/7
        double t = 1.0 / 7.0;
        for (int n = 6; n >= 2; --n) t = ((n % 2 == 0) ? -1.0 : 1.0) / n + x * t;
        return x * x * t;
    }
    return std::log1p(x) - x;
}

/// 1 - λ/√(1+λ²), written without cancellation.
inline double screening_factor(double lambda)
{
    const double r = std::sqrt(1.0 + lambda * lambda);
    return 1.0 / (r * (r + lambda));
}

struct HalfCircle {
    double numeric = 0;
    double closed_form = 0;
};

/// ∫_0^π cos²θ / (cos²θ + λ²) dθ and π(1 - λ/√(1+λ²)).
inline HalfCircle half_circle_integral(double lambda)
{
    if (!(lambda >= 0.0)) throw ValidationError("half_circle_integral: lambda must be >= 0");
    HalfCircle h;
    h.closed_form = pi * screening_factor(lambda);
    if (lambda == 0.0) {
        h.numeric = pi;
        return h;
    }
    QuadratureSpec q;
    q.abs_tol = 1e-15;
    q.rel_tol = 1e-13;
    q.max_intervals = 20000;
    const double l2 = lambda * lambda;
    auto f = [l2](double t) {
        const double c = std::cos(t);
        return c * c / (c * c + l2);
    };
    const auto r = integrate(f, 0.0, pi, q, {0.5 * pi});
    require_converged(r, "half_circle_integral");
    h.numeric = r.value;
    return h;
}

/// Q̃_k(λ) = 2π g(k) (1 - λ/√(λ²+1)) = V̂(k)/(4π) (1 - λ/√(λ²+1)).
inline double q_tilde(double vhat, double lambda) { return vhat / (4.0 * pi) * screening_factor(lambda); }

inline double q_tilde(const PotentialSpec& v, LatticeVec k, double lambda) { return q_tilde(v.eval(k), lambda); }

/// Q_k(λ) = 2g Σ_{α∈I^+} u_α² v_α² / (u_α⁴ + λ²).
inline double q_of_lambda(const KBlock& blk, double lambda)
{
    const double l2 = lambda * lambda;
    double s = 0.0;
    for (Eigen::Index i = 0; i < blk.u.size(); ++i) {
        const double u2 = blk.u(i) * blk.u(i);
        s += u2 * blk.v(i) * blk.v(i) / (u2 * u2 + l2);
    }
    return 2.0 * blk.g * s;
}

struct FIntegral {
    double value = 0;      // ∫_0^Λ F(Q̃) dλ
    double tail_bound = 0; // bound on |∫_Λ^∞ F(Q̃) dλ|
    double tail_value = 0; // ∫_Λ^∞ F(Q̃) dλ by quadrature
    double error = 0;
    int intervals = 0;

    double full() const { return value + tail_value; }
};

/// ∫_0^Λ F(Q̃_k(λ)) dλ for a given V̂(k), with the analytic tail bound
/// (2πg)²/(24Λ³) from |F(x)| ≤ x²/2 and 1 - λ/√(1+λ²) ≤ 1/(2λ²).
inline FIntegral f_integral(double vhat, const QuadratureSpec& quad)
{
    quad.validate();
    if (!(vhat >= 0.0)) throw ValidationError("f_integral: V(k) must be >= 0");
    FIntegral out;
    if (vhat == 0.0) return out;
    const double amp = vhat / (4.0 * pi);
    auto f = [amp](double lambda) { return f_func(amp * screening_factor(lambda)); };
    const double L = quad.lambda_split;
    const auto r = integrate(f, 0.0, L, quad, {1.0});
    require_converged(r, "f_integral");
    const auto t = integrate_to_infinity(f, L, quad);
    require_converged(t, "f_integral tail");
    out.value = r.value;
    out.error = r.error;
    out.intervals = r.intervals;
    out.tail_value = t.value;
    out.tail_bound = amp * amp / (24.0 * L * L * L);
    return out;
}

inline FIntegral f_integral(const PotentialSpec& v, LatticeVec k, const QuadratureSpec& quad)
{
    return f_integral(v.eval(k), quad);
}

/// ∫_0^∞ (1 - λ/√(1+λ²))² dλ
inline constexpr double screening_square_integral = 2.0 - pi / 2.0;

/// Lattice vectors with 0 < |k| ≤ kmax (or < kmax when strict), lexicographic.
inline std::vector<LatticeVec> lattice_ball(double kmax, bool strict = false)
{
    std::vector<LatticeVec> out;
    const auto r = static_cast<std::int64_t>(std::ceil(kmax));
    const double k2 = kmax * kmax;
    for (std::int64_t a = -r; a <= r; ++a)
        for (std::int64_t b = -r; b <= r; ++b) {
            const LatticeVec k{a, b};
            if (k.is_zero()) continue;
            const auto n = static_cast<double>(k.norm_sq());
            if (strict ? n < k2 : n <= k2) out.push_back(k);
        }
    return out;
}

/// f_integral for each distinct V̂ value among ks, evaluated in parallel.
inline std::map<double, FIntegral> f_integral_table(const PotentialSpec& v, const std::vector<LatticeVec>& ks,
                                                    const QuadratureSpec& quad, unsigned threads)
{
    std::map<double, FIntegral> table;
    for (auto k : ks) table.emplace(v.eval(k), FIntegral{});
    std::vector<double> keys;
    for (const auto& [key, _] : table) keys.push_back(key);
    const auto vals = parallel_map<FIntegral>(keys.size(), threads, [&](std::size_t i) { return f_integral(keys[i], quad); });
    for (std::size_t i = 0; i < keys.size(); ++i) table[keys[i]] = vals[i];
    return table;
}

struct PerK {
    LatticeVec k;
    double vhat = 0;
    double f_integral = 0;
    double contribution = 0;
    double trace_matrix = std::numeric_limits<double>::quiet_NaN();
    double trace_integral = std::numeric_limits<double>::quiet_NaN();
};

struct RpaSum {
    double e_rpa = 0;
    double tail_bound = 0;    // lattice tail plus λ-tails of the computed terms
    double lattice_tail = 0;
    double lambda_tail = 0;
    double kmax = 0;
    std::vector<PerK> per_k;
    std::vector<std::string> warnings;
};

/// ħκ Σ_{0<|k|≤kmax} |k|/π f_integral(k), lexicographic and compensated.
/// The tail bound adds ħκ/π · ½(2-π/2)/(16π²) · Σ_{|k|>kmax} |k| V̂(k)² and the
/// per-k λ-tail bounds.
inline RpaSum e_rpa(const FermiSystem& sys, const PotentialSpec& v, double kmax, const QuadratureSpec& quad,
                    unsigned threads = 1)
{
    if (!(kmax > 0.0)) throw ValidationError("e_rpa: kmax must be > 0");
    RpaSum out;
    out.kmax = kmax;
    const auto ks = lattice_ball(kmax);
    const auto table = f_integral_table(v, ks, quad, threads);
    const double pref = sys.hbar * sys.kappa / pi;
    CompensatedSum total, lam_tail;
    bool any = false;
    for (auto k : ks) {
        const double vh = v.eval(k);
        const auto& fi = table.at(vh);
        PerK row;
        row.k = k;
        row.vhat = vh;
        row.f_integral = fi.value;
        row.contribution = pref * k.norm() * fi.value;
        total.add(row.contribution);
        lam_tail.add(pref * k.norm() * fi.tail_bound);
        any = any || vh > 0.0;
        out.per_k.push_back(row);
    }
    if (!any && v.kind() != PotentialKind::zero)
        out.warnings.push_back("kmax includes no k with V(k) > 0; e_rpa set to 0");
    out.e_rpa = total.value();
    out.lambda_tail = lam_tail.value();
    out.lattice_tail =
        pref * 0.5 * screening_square_integral / (16.0 * pi * pi) * lattice_tail_bound(v, kmax, 1.0, 2);
    out.tail_bound = out.lattice_tail + out.lambda_tail;
    return out;
}

/// ħκ Σ_{0<|k|<R} |k|/π ∫_0^∞ F(Q̃_k) dλ (full λ-range), the comparison value for the patch trace.
inline double e_rpa_truncated(const FermiSystem& sys, const PotentialSpec& v, double R, const QuadratureSpec& quad,
                              unsigned threads = 1)
{
    const auto ks = lattice_ball(R, true);
    const auto table = f_integral_table(v, ks, quad, threads);
    const double pref = sys.hbar * sys.kappa / pi;
    CompensatedSum s;
    for (auto k : ks) s.add(pref * k.norm() * table.at(v.eval(k)).full());
    return s.value();
}

/// Smallest power-of-two kmax whose small-coupling tail proxy
/// Σ_{|k|>K}|k|V̂² / Σ_{|k|≤K}|k|V̂² is ≤ 1e-12; nullopt if the tail diverges
/// or K would exceed kmax_cap.
inline std::optional<double> auto_kmax(const PotentialSpec& v, double kmax_cap = 4096.0)
{
    switch (v.kind()) {
    case PotentialKind::zero: return 1.0;
    case PotentialKind::finite_table: return std::max(1.0, v.support_radius());
    case PotentialKind::constant:
        if (v.coupling() == 0.0) return 1.0;
        return std::nullopt;
    default: break;
    }
    if (v.coupling() == 0.0) return 1.0;
    for (double K = 4.0; K <= kmax_cap; K *= 2.0) {
        const double tail = lattice_tail_bound(v, K, 1.0, 2);
        if (!std::isfinite(tail)) continue;
        const double partial = lattice_partial_sum(v, K, 1.0, 2);
        if (tail <= 1e-12 * partial) return K;
    }
    return std::nullopt;
}

struct TraceRoutes {
    double matrix_route = 0;   // Tr(E - D - W)
    double integral_route = 0; // (2/π) ∫_0^∞ F(Q_k(λ)) dλ
    double error = 0;
};

/// 2(√(d(d+2b)) - d - b), the 1x1 value of Tr(E - D - W).
inline double scalar_trace(double d, double b) { return 2.0 * (std::sqrt(d * (d + 2.0 * b)) - d - b); }

inline TraceRoutes trace_edw(const KBlock& blk, const QuadratureSpec& quad)
{
    if (!blk.chain_done) throw ValidationError("trace_edw: chain not computed");
    TraceRoutes t;
    if (blk.g == 0.0) return t;
    t.matrix_route = (blk.E - blk.D - blk.W).trace();

    // Q has Lorentzian peaks of width u_α² at λ = 0
    std::vector<double> cuts;
    for (Eigen::Index i = 0; i < blk.u.size(); ++i) {
        const double u2 = blk.u(i) * blk.u(i);
        for (double s : {0.25, 1.0, 4.0}) cuts.push_back(s * u2);
    }
    const double L = std::max(quad.lambda_split, 4.0 * blk.u.cwiseAbs2().maxCoeff());
    auto f = [&](double lambda) { return f_func(q_of_lambda(blk, lambda)); };
    const auto head = integrate(f, 0.0, L, quad, cuts);
    require_converged(head, "trace_edw");
    const auto tail = integrate_to_infinity(f, L, quad);
    require_converged(tail, "trace_edw tail");
    t.integral_route = 2.0 / pi * (head.value + tail.value);
    t.error = 2.0 / pi * (head.error + tail.error);
    return t;
}

struct PatchTraceTerm {
    LatticeVec k;
    Eigen::Index dim = 0;
    double vhat = 0;
    TraceRoutes trace;
    double contribution = 0; // ħκ|k| Tr(E - D - W)
    ResidualReport residuals;
};

struct PatchTrace {
    double value = 0;
    std::vector<PatchTraceTerm> terms; // Γ^nor order; skipped k are absent
    std::vector<LatticeVec> skipped;
};

/// ħκ Σ_{k∈Γ^nor} |k| Tr(E(k) - D(k) - W(k)).
inline PatchTrace patch_trace_energy(const FermiSystem& sys, const PatchDecomposition& decomp,
                                     const PotentialSpec& v, const QuadratureSpec& quad, unsigned threads = 1)
{
    const auto ks = gamma_nor(decomp);
    const auto terms = parallel_map<std::optional<PatchTraceTerm>>(ks.size(), threads, [&](std::size_t i) {
        auto blk = assemble_block(sys, decomp, v, ks[i]);
        if (!blk) return std::optional<PatchTraceTerm>{};
        compute_chain(*blk);
        PatchTraceTerm term;
        term.k = ks[i];
        term.dim = blk->dim();
        term.vhat = blk->vhat;
        term.trace = trace_edw(*blk, quad);
        term.contribution = sys.hbar * sys.kappa * ks[i].norm() * term.trace.matrix_route;
        term.residuals = blk->residuals;
        return std::optional<PatchTraceTerm>{term};
    });
    PatchTrace out;
    CompensatedSum s;
    for (std::size_t i = 0; i < ks.size(); ++i) {
        if (!terms[i]) {
            out.skipped.push_back(ks[i]);
            continue;
        }
        s.add(terms[i]->contribution);
        out.terms.push_back(*terms[i]);
    }
    out.value = s.value();
    return out;
}

/// c(q) = #{(p, p') ∈ B_F² : p - p' = q} on the square |q1|, |q2| ≤ 2r.
struct DifferenceHistogram {
    std::int64_t r = 0;
    std::vector<std::int64_t> counts;

    std::int64_t side() const { return 4 * r + 1; }
    std::int64_t& at(std::int64_t q1, std::int64_t q2)
    {
        return counts[static_cast<std::size_t>((q1 + 2 * r) * side() + (q2 + 2 * r))];
    }
    std::int64_t at(std::int64_t q1, std::int64_t q2) const
    {
        return counts[static_cast<std::size_t>((q1 + 2 * r) * side() + (q2 + 2 * r))];
    }
};

/// Row-overlap construction: rows x = a and x = a' contribute the overlap of
/// [-h_a, h_a] and [q2 - h_{a'}, q2 + h_{a'}] to c(a - a', q2).
inline DifferenceHistogram difference_histogram(const FermiSystem& sys)
{
    DifferenceHistogram h;
    h.r = isqrt(sys.shell_max);
    h.counts.assign(static_cast<std::size_t>(h.side() * h.side()), 0);
    const std::int64_t r = h.r;
    std::vector<std::int64_t> half(static_cast<std::size_t>(2 * r + 1));
    for (std::int64_t a = -r; a <= r; ++a) half[static_cast<std::size_t>(a + r)] = isqrt(sys.shell_max - a * a);
    for (std::int64_t a = -r; a <= r; ++a)
        for (std::int64_t b = -r; b <= r; ++b) {
            const std::int64_t ha = half[static_cast<std::size_t>(a + r)];
            const std::int64_t hb = half[static_cast<std::size_t>(b + r)];
            for (std::int64_t q2 = -(ha + hb); q2 <= ha + hb; ++q2) {
                const std::int64_t lo = std::max(-ha, q2 - hb);
                const std::int64_t hi = std::min(ha, q2 + hb);
                if (hi >= lo) h.at(a - b, q2) += hi - lo + 1;
            }
        }
    return h;
}

inline DifferenceHistogram difference_histogram_naive(const FermiSystem& sys)
{
    DifferenceHistogram h;
    h.r = isqrt(sys.shell_max);
    h.counts.assign(static_cast<std::size_t>(h.side() * h.side()), 0);
    const auto ball = fermi_ball(sys);
    for (auto p : ball)
        for (auto q : ball) {
            const auto d = p - q;
            ++h.at(d.k1, d.k2);
        }
    return h;
}

inline double kinetic_energy(const FermiSystem& sys)
{
    CompensatedSum s;
    const double h2 = 1.0 / static_cast<double>(sys.N); // ħ²
    for (auto p : fermi_ball(sys)) s.add(h2 * static_cast<double>(p.norm_sq()));
    return s.value();
}

/// E_FS = Σ_{p∈B_F} ħ²|p|² - (8π²N)⁻¹ Σ_q c(q) (V̂(q) - V̂(0)).
inline double e_fs_from_histogram(const FermiSystem& sys, const PotentialSpec& v, const DifferenceHistogram& h)
{
    const double v0 = v.eval({0, 0});
    CompensatedSum ex;
    const std::int64_t m = 2 * h.r;
    for (std::int64_t a = -m; a <= m; ++a)
        for (std::int64_t b = -m; b <= m; ++b) {
            const auto c = h.at(a, b);
            if (c == 0) continue;
            ex.add(static_cast<double>(c) * (v.eval({a, b}) - v0));
        }
    return kinetic_energy(sys) - ex.value() / (8.0 * pi * pi * static_cast<double>(sys.N));
}

inline double e_fs(const FermiSystem& sys, const PotentialSpec& v)
{
    return e_fs_from_histogram(sys, v, difference_histogram(sys));
}

inline double e_fs_naive(const FermiSystem& sys, const PotentialSpec& v)
{
    return e_fs_from_histogram(sys, v, difference_histogram_naive(sys));
}

struct RpaReport {
    std::int64_t N = 0;
    double kf_sq = 0;
    double e_fs = 0;
    RpaSum rpa;
    std::optional<PatchTrace> patch_trace;
    std::optional<double> e_rpa_truncated;
    double e_rpa_times_sqrt_n = 0;
    std::optional<double> patch_over_truncated;
};

/// Full report. With a decomposition, the Γ^nor traces are attached to the
/// matching per-k rows and the patch-trace ratio is filled in.
inline RpaReport rpa_report(const FermiSystem& sys, const PotentialSpec& v, double kmax, const QuadratureSpec& quad,
                            const PatchDecomposition* decomp = nullptr, unsigned threads = 1)
{
    RpaReport rep;
    rep.N = sys.N;
    rep.kf_sq = sys.kf_sq();
    rep.e_fs = e_fs(sys, v);
    rep.rpa = e_rpa(sys, v, kmax, quad, threads);
    rep.e_rpa_times_sqrt_n = rep.rpa.e_rpa * std::sqrt(static_cast<double>(sys.N));
    if (decomp) {
        rep.patch_trace = patch_trace_energy(sys, *decomp, v, quad, threads);
        rep.e_rpa_truncated = e_rpa_truncated(sys, v, decomp->R, quad, threads);
        if (*rep.e_rpa_truncated != 0.0) rep.patch_over_truncated = rep.patch_trace->value / *rep.e_rpa_truncated;
        std::map<LatticeVec, const PatchTraceTerm*> by_k;
        for (const auto& t : rep.patch_trace->terms) by_k[t.k] = &t;
        for (auto& row : rep.rpa.per_k) {
            auto it = by_k.find(row.k);
            if (it == by_k.end()) continue;
            row.trace_matrix = it->second->trace.matrix_route;
            row.trace_integral = it->second->trace.integral_route;
        }
    }
    return rep;
}

} // namespace fermi2d
