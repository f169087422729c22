#pragma once

// Per-k quasi-bosonic matrix data and its Bogoliubov diagonalization chain.
//
// For a transfer momentum k the block carries
//   g = V̂(k) / (2 (2π)^2),  u_α = |k̂·ω̂_α|^{1/2},  v_α = k_F^{-1/2} |k|^{-1/2} n_α(k)
//   d = diag(u_α^2),  b = g v vᵀ
//   D = diag(d, d),  W = diag(b, b),  W̃ = [[0, b], [b, 0]]
// over I_k = I^+ followed by I^- (the reflections of I^+, in the same order).

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <sstream>
#include <vector>

#include "fermi2d/common.hpp"
#include "fermi2d/lattice.hpp"
#include "fermi2d/matfun.hpp"
#include "fermi2d/patches.hpp"
#include "fermi2d/potential.hpp"

namespace fermi2d {

struct ResidualReport {
    double diag_residual = 0;   // cosh/sinh block diagonalization, relative Frobenius
    double ueu_residual = 0;    // UᵀEU vs diag((XᵀX)^{1/2}, (XXᵀ)^{1/2}), relative to ‖E‖
    double e_poly_residual = 0; // E^2 vs (D+W-W̃)^{1/2}(D+W+W̃)(D+W-W̃)^{1/2}, relative to ‖E‖^2
    double otilde_residual = 0; // E vs Õ P̃ Õᵀ, relative to ‖E‖
    double ptilde_minus_d_min_eig = 0;
    double o_orthogonality = 0;
    double otilde_orthogonality = 0;
    double k_symmetry = 0;   // ‖K - Kᵀ‖
    double k_hs_ratio = 0;   // ‖K‖_HS / V̂(k)
    double k_entry_ratio = 0; // max |K_αβ| M / V̂(k)
};

struct KBlock {
    LatticeVec k;
    int M = 0;
    std::vector<int> i_plus;
    std::vector<int> i_minus;
    double vhat = 0;
    double g = 0;
    Vector u, v;
    Matrix d, b;
    Matrix D, W, Wt;

    bool chain_done = false;
    Matrix E, S1, K, O, Otilde, A, P, Ptilde, L;
    ResidualReport residuals;

    Eigen::Index half_dim() const { return u.size(); }
    Eigen::Index dim() const { return 2 * u.size(); }
};

inline double coupling_g(double vhat) { return vhat / (2.0 * (2.0 * pi) * (2.0 * pi)); }

/// Builds D, W, W̃ from raw (g, u, v).
inline KBlock make_block(LatticeVec k, int M, double g, const Vector& u, const Vector& v)
{
    if (u.size() == 0 || u.size() != v.size()) throw ValidationError("make_block: u and v must be nonempty and equal length");
    if (!(g >= 0.0)) throw ValidationError("make_block: g must be non-negative");
    for (Eigen::Index i = 0; i < u.size(); ++i)
        if (!(u(i) > 0.0)) throw ValidationError("make_block: u must be positive");
    KBlock blk;
    blk.k = k;
    blk.M = M;
    blk.g = g;
    blk.vhat = g * 2.0 * (2.0 * pi) * (2.0 * pi);
    blk.u = u;
    blk.v = v;
    const Eigen::Index n = u.size();
    blk.d = u.array().square().matrix().asDiagonal();
    blk.b = g * v * v.transpose();
    blk.D = Matrix::Zero(2 * n, 2 * n);
    blk.W = Matrix::Zero(2 * n, 2 * n);
    blk.Wt = Matrix::Zero(2 * n, 2 * n);
    blk.D.topLeftCorner(n, n) = blk.d;
    blk.D.bottomRightCorner(n, n) = blk.d;
    blk.W.topLeftCorner(n, n) = blk.b;
    blk.W.bottomRightCorner(n, n) = blk.b;
    blk.Wt.topRightCorner(n, n) = blk.b;
    blk.Wt.bottomLeftCorner(n, n) = blk.b;
    return blk;
}

/// Block for k ∈ Γ^nor; std::nullopt when I^+(k) is empty (no block for this k).
inline std::optional<KBlock> assemble_block(const FermiSystem& sys, const PatchDecomposition& decomp,
                                            const PotentialSpec& pot, LatticeVec k)
{
    const auto sets = index_sets(decomp, k);
    if (sets.plus.empty()) return std::nullopt;
    const auto counts = pair_counts_all(sys, decomp, k);
    const Eigen::Index n = static_cast<Eigen::Index>(sets.plus.size());
    Vector u(n), v(n);
    const double knorm = k.norm();
    const double vscale = 1.0 / std::sqrt(decomp.kf * knorm);
    for (Eigen::Index i = 0; i < n; ++i) {
        const int a = sets.plus[static_cast<std::size_t>(i)];
        u(i) = std::sqrt(std::fabs(decomp.dot_omega(k, a)) / knorm);
        v(i) = vscale * std::sqrt(static_cast<double>(counts[static_cast<std::size_t>(a)]));
    }
    const double vhat = pot.eval(k);
    auto blk = make_block(k, decomp.M, coupling_g(vhat), u, v);
    blk.vhat = vhat;
    blk.i_plus = sets.plus;
    for (int a : sets.plus) blk.i_minus.push_back(decomp.reflect(a));
    return blk;
}

/// U = (1/√2) [[1, 1], [1, -1]] in n x n blocks.
inline Matrix block_hadamard(Eigen::Index n)
{
    const double s = 1.0 / std::sqrt(2.0);
    Matrix u(2 * n, 2 * n);
    const Matrix id = Matrix::Identity(n, n);
    u << s * id, s * id, s * id, -s * id;
    return u;
}

inline Matrix block_diag(const Matrix& a, const Matrix& b)
{
    Matrix m = Matrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
    m.topLeftCorner(a.rows(), a.cols()) = a;
    m.bottomRightCorner(b.rows(), b.cols()) = b;
    return m;
}

/// [[cosh K, -sinh K], [-sinh K, cosh K]] · diag(O, O): the factor S with
/// [[D+W, W̃], [W̃, D+W]] = S diag(E, E) Sᵀ for K = log|S₁ᵀ| and S₁ = O|S₁|.
inline Matrix bogoliubov_factor(const Matrix& K, const Matrix& O, double sinh_sign = -1.0)
{
    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(K));
    const Vector& ev = es.eigenvalues();
    const Matrix& V = es.eigenvectors();
    const Matrix ch = V * ev.array().cosh().matrix().asDiagonal() * V.transpose();
    const Matrix sh = V * ev.array().sinh().matrix().asDiagonal() * V.transpose();
    const Eigen::Index n = K.rows();
    Matrix c(2 * n, 2 * n);
    c << ch, sinh_sign * sh, sinh_sign * sh, ch;
    return c * block_diag(O, O);
}

inline Matrix quadratic_form_matrix(const KBlock& blk)
{
    const Matrix dw = blk.D + blk.W;
    Matrix t(2 * dw.rows(), 2 * dw.cols());
    t << dw, blk.Wt, blk.Wt, dw;
    return t;
}

/// Computes E, S₁, K, O, Õ, A, P, P̃, L and the residual diagnostics.
inline void compute_chain(KBlock& blk)
{
    const Eigen::Index n = blk.half_dim();
    const Eigen::Index m = 2 * n;
    const Matrix minus = blk.D + blk.W - blk.Wt;
    const Matrix plus = blk.D + blk.W + blk.Wt;

    const double lowest = min_eigenvalue(minus);
    if (!(lowest > 1e-12 * minus.norm())) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "compute_chain: D + W - W~ is not positive definite (eigenvalue " << lowest << ") at k = (" << blk.k.k1
            << ", " << blk.k.k2 << ")";
        throw NumericError(msg.str());
    }
    const Matrix minus_half = matfun(minus, MatFun::sqrt);
    const Matrix e_sq = symmetrize(minus_half * plus * minus_half);
    // E = |C| for C = (D+W+W̃)^{1/2}(D+W-W̃)^{1/2}, since CᵀC = E²; the SVD
    // avoids squaring the condition number
    {
        const Matrix c = matfun(plus, MatFun::sqrt) * minus_half;
        Eigen::JacobiSVD<Matrix> svd(c, Eigen::ComputeFullV);
        const Vector& sv = svd.singularValues();
        if (!(sv(sv.size() - 1) > 1e-12 * sv(0))) {
            std::ostringstream msg;
            msg.precision(17);
            msg << "compute_chain: E is singular (eigenvalue " << sv(sv.size() - 1) << ")";
            throw NumericError(msg.str());
        }
        const Matrix& vv = svd.matrixV();
        blk.E = symmetrize(vv * sv.asDiagonal() * vv.transpose());
        const Matrix e_invhalf = symmetrize(vv * sv.array().rsqrt().matrix().asDiagonal() * vv.transpose());
        blk.S1 = minus_half * e_invhalf;
    }

    const auto pol = polar(blk.S1);
    blk.O = pol.orthogonal;

    // K = log |S₁ᵀ| = U log(Σ) Uᵀ from S₁ = U Σ Vᵀ
    Eigen::JacobiSVD<Matrix> svd(blk.S1, Eigen::ComputeFullU);
    const Matrix& us = svd.matrixU();
    blk.K = us * svd.singularValues().array().log().matrix().asDiagonal() * us.transpose();
    const double k_defect = symmetric_defect(blk.K);
    blk.K = symmetrize(blk.K);

    const Matrix d_half = matfun(blk.d, MatFun::sqrt);
    const Matrix db_half = matfun(blk.d + 2.0 * blk.b, MatFun::sqrt);
    const Matrix x = db_half * d_half;
    const auto xpol = polar(x);
    blk.A = xpol.orthogonal;
    blk.P = xpol.modulus;
    const Matrix u = block_hadamard(n);
    blk.Otilde = u * block_diag(Matrix::Identity(n, n), blk.A) * u.transpose();
    blk.Ptilde = block_diag(blk.P, blk.P);
    blk.L = orthogonal_log(blk.O * blk.Otilde);

    auto& r = blk.residuals;
    const Matrix t = quadratic_form_matrix(blk);
    const Matrix s = bogoliubov_factor(blk.K, blk.O);
    const Matrix e2 = block_diag(blk.E, blk.E);
    r.diag_residual = (t - s * e2 * s.transpose()).norm() / t.norm();

    const double e_norm = blk.E.norm();
    const Matrix ueu = u.transpose() * blk.E * u;
    // (XᵀX)^{1/2} = P and (XXᵀ)^{1/2} = A P Aᵀ
    const Matrix expected = block_diag(blk.P, symmetrize(blk.A * blk.P * blk.A.transpose()));
    r.ueu_residual = (ueu - expected).norm() / e_norm;
    r.e_poly_residual = (blk.E * blk.E - e_sq).norm() / (e_norm * e_norm);
    r.otilde_residual = (blk.E - blk.Otilde * blk.Ptilde * blk.Otilde.transpose()).norm() / e_norm;
    r.ptilde_minus_d_min_eig = min_eigenvalue(blk.Ptilde - blk.D);
    r.o_orthogonality = (blk.O.transpose() * blk.O - Matrix::Identity(m, m)).norm();
    r.otilde_orthogonality = (blk.Otilde.transpose() * blk.Otilde - Matrix::Identity(m, m)).norm();
    r.k_symmetry = k_defect;
    if (blk.vhat > 0.0) {
        r.k_hs_ratio = blk.K.norm() / blk.vhat;
        r.k_entry_ratio = blk.K.cwiseAbs().maxCoeff() * blk.M / blk.vhat;
    }
    blk.chain_done = true;
}

struct RandomBlockParams {
    Eigen::Index min_half_dim = 1;
    Eigen::Index max_half_dim = 32;
    double g_max = 2.0;
    double u_max = 1.0;
    double v_max = 2.0;
};

/// Seeded random block: half-dimension uniform in [min, max], g ∈ [0, g_max],
/// u ∈ (0, u_max], v ∈ (0, v_max].
inline KBlock random_block(std::mt19937_64& rng, const RandomBlockParams& p = {})
{
    auto unit = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }; // [0, 1)
    const auto span = static_cast<std::uint64_t>(p.max_half_dim - p.min_half_dim + 1);
    const Eigen::Index n = p.min_half_dim + static_cast<Eigen::Index>(rng() % span);
    const double g = p.g_max * unit();
    Vector u(n), v(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        u(i) = p.u_max * (1.0 - unit());
        v(i) = p.v_max * (1.0 - unit());
    }
    return make_block({0, 0}, static_cast<int>(2 * n), g, u, v);
}

} // namespace fermi2d
