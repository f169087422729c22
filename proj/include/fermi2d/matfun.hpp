#pragma once

// Spectral functions of symmetric matrices, polar decomposition and the
// principal logarithm of a rotation.

#include <cmath>
#include <sstream>
#include <string>

#include <Eigen/Dense>

#include "fermi2d/common.hpp"

namespace fermi2d {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class MatFun { sqrt, invsqrt, log };

inline double symmetric_defect(const Matrix& a) { return (a - a.transpose()).norm(); }

inline Matrix symmetrize(const Matrix& a) { return 0.5 * (a + a.transpose()); }

/// f(A) = V f(Λ) Vᵀ for symmetric A. Eigenvalues within 1e-12·‖A‖ of zero are
/// clamped to zero for sqrt; invsqrt and log need every eigenvalue above that floor.
inline Matrix matfun(const Matrix& a, MatFun which)
{
    if (a.rows() != a.cols()) throw ValidationError("matfun: matrix is not square");
    if (a.size() == 0) return a;
    const double scale = a.norm();
    if (symmetric_defect(a) > 1e-10 * std::max(scale, 1e-300))
        throw ValidationError("matfun: matrix is not symmetric");
    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(a));
    if (es.info() != Eigen::Success) throw NumericError("matfun: eigendecomposition failed");
    const Vector& ev = es.eigenvalues();
    const double op_norm = ev.cwiseAbs().maxCoeff();
    const double floor = 1e-12 * op_norm;
    Vector mapped(ev.size());
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        const double x = ev(i);
        switch (which) {
        case MatFun::sqrt:
            if (x < -floor) {
                std::ostringstream m;
                m.precision(17);
                m << "matfun(sqrt): negative eigenvalue " << x;
                throw NumericError(m.str());
            }
            mapped(i) = x <= floor ? 0.0 : std::sqrt(x);
            break;
        case MatFun::invsqrt:
        case MatFun::log:
            if (!(x > floor)) {
                std::ostringstream m;
                m.precision(17);
                m << "matfun: singular or indefinite matrix (eigenvalue " << x << ")";
                throw NumericError(m.str());
            }
            mapped(i) = which == MatFun::log ? std::log(x) : 1.0 / std::sqrt(x);
            break;
        }
    }
    const Matrix& v = es.eigenvectors();
    return symmetrize(v * mapped.asDiagonal() * v.transpose());
}

inline double min_eigenvalue(const Matrix& a)
{
    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(a), Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

struct Polar {
    Matrix orthogonal; // O
    Matrix modulus;    // |S| = (SᵀS)^{1/2}
};

/// S = O |S| via the SVD S = U Σ Vᵀ: O = U Vᵀ, |S| = V Σ Vᵀ.
inline Polar polar(const Matrix& s)
{
    if (s.rows() != s.cols()) throw ValidationError("polar: matrix is not square");
    Eigen::JacobiSVD<Matrix> svd(s, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Vector& sv = svd.singularValues();
    if (sv.size() > 0 && !(sv(sv.size() - 1) > 1e-12 * sv(0)))
        throw NumericError("polar: matrix is rank deficient");
    Polar p;
    p.orthogonal = svd.matrixU() * svd.matrixV().transpose();
    p.modulus = symmetrize(svd.matrixV() * sv.asDiagonal() * svd.matrixV().transpose());
    if ((s - p.orthogonal * p.modulus).norm() > 1e-10 * std::max(s.norm(), 1e-300))
        throw NumericError("polar: reconstruction residual too large");
    return p;
}

/// Principal logarithm of an orthogonal matrix with determinant +1, read off
/// the 2x2 rotation blocks of its real Schur form. A rotation by π has no
/// real principal logarithm and is rejected.
inline Matrix orthogonal_log(const Matrix& q)
{
    const Eigen::Index n = q.rows();
    if (n == 0) return q;
    if ((q.transpose() * q - Matrix::Identity(n, n)).norm() > 1e-8)
        throw ValidationError("orthogonal_log: matrix is not orthogonal");
    Eigen::RealSchur<Matrix> schur(q);
    const Matrix& t = schur.matrixT();
    const Matrix& z = schur.matrixU();
    Matrix log_t = Matrix::Zero(n, n);
    constexpr double branch_tol = 1e-10;
    for (Eigen::Index i = 0; i < n;) {
        const bool block = i + 1 < n && std::fabs(t(i + 1, i)) > 1e-14;
        if (!block) {
            if (t(i, i) < 0.0) throw NumericError("orthogonal_log: log branch undefined (eigenvalue -1)");
            ++i;
            continue;
        }
        const double c = 0.5 * (t(i, i) + t(i + 1, i + 1));
        const double s = 0.5 * (t(i + 1, i) - t(i, i + 1));
        const double phi = std::atan2(s, c);
        if (pi - std::fabs(phi) < branch_tol) throw NumericError("orthogonal_log: log branch undefined (rotation by pi)");
        log_t(i, i + 1) = -phi;
        log_t(i + 1, i) = phi;
        i += 2;
    }
    Matrix l = z * log_t * z.transpose();
    return 0.5 * (l - l.transpose());
}

} // namespace fermi2d
