#pragma once

// Globally adaptive Gauss–Kronrod (7/15) quadrature. The interval with the
// largest error estimate is bisected until the summed estimate meets
// max(abs_tol, rel_tol * |value|). Pieces are summed in left-endpoint order,
// so results are bit-stable for a given integrand.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>
#include <vector>

#include "fermi2d/common.hpp"

namespace fermi2d {

struct QuadratureSpec {
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
    double lambda_split = 10.0; // finite part [0, lambda_split] of lambda-integrals
    int max_depth = 50;         // bisection depth limit per interval
    int max_intervals = 4000;

    void validate() const
    {
        if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) throw ValidationError("quadrature: tolerances must be positive");
        if (!(lambda_split > 1.0)) throw ValidationError("quadrature: lambda_split must exceed 1");
        if (max_depth < 1 || max_intervals < 1) throw ValidationError("quadrature: depth limits must be positive");
    }
};

struct QuadResult {
    double value = 0;
    double error = 0;
    int intervals = 0;
    bool converged = false;
};

namespace detail {

inline constexpr std::array<double, 8> gk15_nodes{
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> gk15_weights{
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss 7-point weights at nodes 1, 3, 5 and the center.
inline constexpr std::array<double, 4> g7_weights{
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Piece {
    double a, b, value, error;
    int depth;
};

template <class F>
Piece gk15(F& f, double a, double b, int depth)
{
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double kronrod = fc * gk15_weights[7];
    double gauss = fc * g7_weights[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * gk15_nodes[j];
        const double pair = f(center - dx) + f(center + dx);
        kronrod += gk15_weights[j] * pair;
        if (j % 2 == 1) gauss += g7_weights[j / 2] * pair;
    }
    return {a, b, kronrod * half, std::fabs((kronrod - gauss) * half), depth};
}

struct ByError {
    bool operator()(const Piece& x, const Piece& y) const
    {
        if (x.error != y.error) return x.error < y.error;
        return x.a > y.a;
    }
};

} // namespace detail

/// Integrates f over [a, b], first splitting at the given interior breakpoints.
template <class F>
QuadResult integrate(F&& f, double a, double b, const QuadratureSpec& spec, std::vector<double> breakpoints = {})
{
    QuadResult res;
    if (a == b) {
        res.converged = true;
        return res;
    }
    std::vector<double> cuts{a};
    std::sort(breakpoints.begin(), breakpoints.end());
    for (double x : breakpoints)
        if (x > cuts.back() && x < b) cuts.push_back(x);
    cuts.push_back(b);

    std::priority_queue<detail::Piece, std::vector<detail::Piece>, detail::ByError> heap;
    std::vector<detail::Piece> frozen; // pieces at the depth limit
    // running sums drive the stopping rule; the final value is re-summed in order
    double value = 0, error = 0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const auto piece = detail::gk15(f, cuts[i], cuts[i + 1], 0);
        value += piece.value;
        error += piece.error;
        heap.push(piece);
    }
    while (error > std::max(spec.abs_tol, spec.rel_tol * std::fabs(value))) {
        if (heap.empty() || static_cast<int>(heap.size() + frozen.size()) >= spec.max_intervals) break;
        const auto worst = heap.top();
        heap.pop();
        if (worst.depth >= spec.max_depth) {
            frozen.push_back(worst);
            continue;
        }
        const double mid = 0.5 * (worst.a + worst.b);
        const auto left = detail::gk15(f, worst.a, mid, worst.depth + 1);
        const auto right = detail::gk15(f, mid, worst.b, worst.depth + 1);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }

    std::vector<detail::Piece> all = frozen;
    while (!heap.empty()) {
        all.push_back(heap.top());
        heap.pop();
    }
    std::sort(all.begin(), all.end(), [](const auto& x, const auto& y) { return x.a < y.a; });
    CompensatedSum v, e;
    for (const auto& p : all) {
        v.add(p.value);
        e.add(p.error);
    }
    res.value = v.value();
    res.error = e.value();
    res.intervals = static_cast<int>(all.size());
    res.converged = res.error <= std::max(spec.abs_tol, spec.rel_tol * std::fabs(res.value));
    return res;
}

/// Integrates f over [a, inf) through x = a + t/(1-t). f must decay faster than 1/x^2.
template <class F>
QuadResult integrate_to_infinity(F&& f, double a, const QuadratureSpec& spec)
{
    auto mapped = [&](double t) {
        if (t >= 1.0) return 0.0;
        const double s = 1.0 - t;
        return f(a + t / s) / (s * s);
    };
    return integrate(mapped, 0.0, 1.0, spec);
}

inline void require_converged(const QuadResult& r, const char* what)
{
    if (r.converged) return;
    std::ostringstream msg;
    msg.precision(17);
    msg << what << ": quadrature did not converge (estimate " << r.value << ", error " << r.error << ", "
        << r.intervals << " intervals)";
    throw NumericError(msg.str());
}

} // namespace fermi2d
