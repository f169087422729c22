#pragma once

// Interaction potentials V̂(k) on Z^2 and their decay classification.

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "fermi2d/common.hpp"
#include "fermi2d/lattice.hpp"
#include "fermi2d/quadrature.hpp"

namespace fermi2d {

enum class PotentialKind { zero, constant, power_law, gaussian, finite_table };

inline std::string_view to_string(PotentialKind k)
{
    switch (k) {
    case PotentialKind::zero: return "zero";
    case PotentialKind::constant: return "constant";
    case PotentialKind::power_law: return "power_law";
    case PotentialKind::gaussian: return "gaussian";
    case PotentialKind::finite_table: return "finite_table";
    }
    return "?";
}

inline PotentialKind potential_kind_from_string(std::string_view s)
{
    if (s == "zero") return PotentialKind::zero;
    if (s == "constant") return PotentialKind::constant;
    if (s == "power_law") return PotentialKind::power_law;
    if (s == "gaussian") return PotentialKind::gaussian;
    if (s == "finite_table") return PotentialKind::finite_table;
    throw ValidationError("unknown potential kind '" + std::string(s) + "'");
}

/// Symmetric, non-negative Fourier potential.
///   constant:     V̂(k) = g
///   power_law:    V̂(k) = g |k|^{-s}, V̂(0) = g
///   gaussian:     V̂(k) = g exp(-|k|^2 / width^2)
///   finite_table: explicit values, zero elsewhere; entries are mirrored to -k
class PotentialSpec {
public:
    static PotentialSpec zero() { return PotentialSpec(PotentialKind::zero, 0.0); }
    static PotentialSpec constant(double g) { return PotentialSpec(PotentialKind::constant, g); }
    static PotentialSpec power_law(double g, double s)
    {
        if (!(s > 0.0)) throw ValidationError("power_law potential: exponent s must be positive");
        PotentialSpec p(PotentialKind::power_law, g);
        p.s_ = s;
        return p;
    }
    static PotentialSpec gaussian(double g, double width)
    {
        if (!(width > 0.0)) throw ValidationError("gaussian potential: width must be positive");
        PotentialSpec p(PotentialKind::gaussian, g);
        p.width_ = width;
        return p;
    }
    static PotentialSpec table(const std::vector<std::pair<LatticeVec, double>>& entries)
    {
        PotentialSpec p(PotentialKind::finite_table, 0.0);
        for (const auto& [k, v] : entries) {
            if (!(v >= 0.0) || !std::isfinite(v))
                throw ValidationError("finite_table potential: values must be finite and non-negative");
            for (const LatticeVec key : {k, -k}) {
                auto [it, inserted] = p.table_.emplace(key, v);
                if (!inserted && it->second != v)
                    throw ValidationError("finite_table potential: conflicting values for k and -k");
            }
        }
        return p;
    }

    PotentialKind kind() const noexcept { return kind_; }
    double coupling() const noexcept { return g_; }
    double exponent() const noexcept { return s_; }
    double width() const noexcept { return width_; }
    const std::map<LatticeVec, double>& entries() const noexcept { return table_; }

    double operator()(LatticeVec k) const { return eval(k); }

    double eval(LatticeVec k) const
    {
        switch (kind_) {
        case PotentialKind::zero: return 0.0;
        case PotentialKind::constant: return g_;
        case PotentialKind::power_law:
            return k.is_zero() ? g_ : g_ * std::pow(static_cast<double>(k.norm_sq()), -0.5 * s_);
        case PotentialKind::gaussian: return g_ * std::exp(-static_cast<double>(k.norm_sq()) / (width_ * width_));
        case PotentialKind::finite_table: {
            auto it = table_.find(k);
            return it == table_.end() ? 0.0 : it->second;
        }
        }
        return 0.0;
    }

    /// Largest |k| with V̂(k) > 0, or +inf if the support is unbounded.
    double support_radius() const
    {
        switch (kind_) {
        case PotentialKind::zero: return 0.0;
        case PotentialKind::finite_table: {
            double r = 0.0;
            for (const auto& [k, v] : table_)
                if (v > 0.0) r = std::max(r, k.norm());
            return r;
        }
        default: return g_ == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
        }
    }

private:
    PotentialSpec(PotentialKind kind, double g) : kind_(kind), g_(g)
    {
        if (!(g >= 0.0) || !std::isfinite(g)) throw ValidationError("potential coupling g must be finite and >= 0");
    }

    PotentialKind kind_;
    double g_ = 0.0;
    double s_ = 0.0;
    double width_ = 1.0;
    std::map<LatticeVec, double> table_;
};

/// Upper bound on sum_{|k| > K} |k|^a V̂(k)^m by comparison with a radial
/// integral. For f(|k|) = |k|^a V̂(k)^m non-increasing beyond K - sqrt(2),
/// each unit cell around k lies outside radius K - 1/sqrt(2), which gives
///   sum <= 2 pi \int_{K - sqrt 2}^inf (t + 1/sqrt 2) f(t) dt.
inline double lattice_tail_bound(const PotentialSpec& v, double K, double a, int m)
{
    constexpr double c = 0.70710678118654752440;
    const double T = K - 2.0 * c;
    switch (v.kind()) {
    case PotentialKind::zero: return 0.0;
    case PotentialKind::finite_table: {
        CompensatedSum s;
        for (const auto& [k, val] : v.entries())
            if (k.norm() > K) s.add(std::pow(k.norm(), a) * std::pow(val, m));
        return s.value();
    }
    case PotentialKind::constant:
        return v.coupling() == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    case PotentialKind::power_law: {
        if (v.coupling() == 0.0) return 0.0;
        const double p = m * v.exponent() - a; // f(t) = g^m t^{-p}
        if (p <= 2.0 || T <= 0.0) return std::numeric_limits<double>::infinity();
        const double gm = std::pow(v.coupling(), m);
        return 2.0 * pi * gm * (std::pow(T, 2.0 - p) / (p - 2.0) + c * std::pow(T, 1.0 - p) / (p - 1.0));
    }
    case PotentialKind::gaussian: {
        if (v.coupling() == 0.0) return 0.0;
        const double w2 = v.width() * v.width();
        const double gm = std::pow(v.coupling(), m);
        auto f = [&](double t) { return t <= 0.0 ? (a == 0.0 ? gm : 0.0) : gm * std::pow(t, a) * std::exp(-m * t * t / w2); };
        // f peaks at t* = width sqrt(a / 2m); below t* use the peak value
        const double t_peak = v.width() * std::sqrt(a / (2.0 * m));
        const double f_peak = f(t_peak);
        auto envelope = [&](double t) { return t < t_peak ? f_peak : f(t); };
        const double lo = std::max(T, 0.0);
        QuadratureSpec q;
        q.abs_tol = 1e-300;
        q.rel_tol = 1e-10;
        auto integrand = [&](double t) { return (t + c) * envelope(t); };
        CompensatedSum s;
        if (lo < t_peak) {
            auto r = integrate(integrand, lo, t_peak, q);
            s.add(r.value);
        }
        auto r = integrate_to_infinity(integrand, std::max(lo, t_peak), q);
        s.add(r.value);
        double total = 2.0 * pi * s.value();
        // below t = 0 the envelope stays at its peak; r = t + c >= 0 bounds the range
        const double t_min = std::max(T, -c);
        if (t_min < 0.0) total += 2.0 * pi * f_peak * (-0.5 * t_min * t_min - c * t_min);
        return total;
    }
    }
    return 0.0;
}

/// sum_{0 < |k| <= K} |k|^a V̂(k)^m, lexicographic and compensated.
inline double lattice_partial_sum(const PotentialSpec& v, double K, double a, int m)
{
    CompensatedSum s;
    const auto r = static_cast<std::int64_t>(std::floor(K));
    for (std::int64_t x = -r; x <= r; ++x)
        for (std::int64_t y = -r; y <= r; ++y) {
            const LatticeVec k{x, y};
            if (k.is_zero() || k.norm() > K) continue;
            s.add(std::pow(k.norm(), a) * std::pow(v.eval(k), m));
        }
    return s.value();
}

enum class DecayVerdict { ell1_class, sq_class_only, neither };

inline std::string_view to_string(DecayVerdict v)
{
    switch (v) {
    case DecayVerdict::ell1_class: return "ell1_class";
    case DecayVerdict::sq_class_only: return "sq_class_only";
    case DecayVerdict::neither: return "neither";
    }
    return "?";
}

struct DecayClassReport {
    double ell1_weighted_partial = 0; // sum_{|k| <= K} |k| V̂(k)
    double sq_weighted_partial = 0;   // sum_{|k| <= K} |k|^{2-b} V̂(k)^2
    double ell1_tail_estimate = 0;
    double sq_tail_estimate = 0;
    double b = 0;
    std::int64_t k_probe = 0;
    DecayVerdict verdict = DecayVerdict::neither;
};

/// ell1_class: sum |k| V̂ < inf. sq_class_only: only sum |k|^{2-b} V̂^2 < inf.
inline DecayClassReport classify(const PotentialSpec& v, double b, std::int64_t k_probe)
{
    if (!(b > 0.0 && b < 1.0)) throw ValidationError("classify: b must lie in (0, 1)");
    if (k_probe < 1) throw ValidationError("classify: K_probe must be >= 1");
    DecayClassReport rep;
    rep.b = b;
    rep.k_probe = k_probe;
    const double K = static_cast<double>(k_probe);
    rep.ell1_weighted_partial = lattice_partial_sum(v, K, 1.0, 1);
    rep.sq_weighted_partial = lattice_partial_sum(v, K, 2.0 - b, 2);
    rep.ell1_tail_estimate = lattice_tail_bound(v, K, 1.0, 1);
    rep.sq_tail_estimate = lattice_tail_bound(v, K, 2.0 - b, 2);

    const bool null = v.coupling() == 0.0 && v.kind() != PotentialKind::finite_table;
    switch (v.kind()) {
    case PotentialKind::zero:
    case PotentialKind::finite_table:
    case PotentialKind::gaussian: rep.verdict = DecayVerdict::ell1_class; break;
    case PotentialKind::constant: rep.verdict = null ? DecayVerdict::ell1_class : DecayVerdict::neither; break;
    case PotentialKind::power_law: {
        const double s = v.exponent();
        if (null || s > 3.0)
            rep.verdict = DecayVerdict::ell1_class;
        else if (2.0 * s > 4.0 - b)
            rep.verdict = DecayVerdict::sq_class_only;
        else
            rep.verdict = DecayVerdict::neither;
        break;
    }
    }
    return rep;
}

} // namespace fermi2d
