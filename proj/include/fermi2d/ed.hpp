#pragma once

// Exact diagonalization of the momentum-space Hamiltonian
//   H = Σ_p ħ²|p|² n_p + (2(2π)²N)⁻¹ Σ_{k,p,q} V̂(k) a†_{p+k} a†_{q-k} a_q a_p
// on the truncated mode set {k : |k|² ≤ Λ_m}. Terms are kept only when all
// four modes lie in the set. States are occupation bitsets over the modes in
// lexicographic order; the fermionic sign of a_i counts occupied modes below i.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "fermi2d/common.hpp"
#include "fermi2d/lattice.hpp"
#include "fermi2d/potential.hpp"
#include "fermi2d/rpa.hpp"

namespace fermi2d {

using State = std::uint64_t;

struct EdModel {
    std::int64_t mode_cutoff = 1; // Λ_m
    int n_particles = 1;
    PotentialSpec potential = PotentialSpec::zero();
    LatticeVec total_momentum{0, 0};
    std::size_t max_dense = 4000;
    std::size_t max_sparse = 200000;

    double hbar() const { return 1.0 / std::sqrt(static_cast<double>(n_particles)); }
};

class ModeSet {
public:
    explicit ModeSet(std::int64_t cutoff)
    {
        if (cutoff < 0) throw ValidationError("ed: mode cutoff must be >= 0");
        r_ = isqrt(cutoff);
        index_.assign(static_cast<std::size_t>((2 * r_ + 1) * (2 * r_ + 1)), -1);
        for (std::int64_t a = -r_; a <= r_; ++a)
            for (std::int64_t b = -r_; b <= r_; ++b)
                if (a * a + b * b <= cutoff) {
                    index_[slot({a, b})] = static_cast<int>(modes_.size());
                    modes_.push_back({a, b});
                }
        if (modes_.size() > 64) throw ValidationError("ed: more than 64 modes; lower the mode cutoff");
    }

    std::size_t size() const { return modes_.size(); }
    const std::vector<LatticeVec>& modes() const { return modes_; }
    LatticeVec operator[](int i) const { return modes_[static_cast<std::size_t>(i)]; }

    /// Mode index of k, or -1 if k is not a mode.
    int find(LatticeVec k) const
    {
        if (std::llabs(k.k1) > r_ || std::llabs(k.k2) > r_) return -1;
        return index_[slot(k)];
    }

private:
    std::size_t slot(LatticeVec k) const { return static_cast<std::size_t>((k.k1 + r_) * (2 * r_ + 1) + (k.k2 + r_)); }

    std::int64_t r_ = 0;
    std::vector<LatticeVec> modes_;
    std::vector<int> index_;
};

/// a_i |s⟩: nullopt if mode i is empty, else (state, sign).
inline std::optional<std::pair<State, int>> annihilate(State s, int i)
{
    const State bit = State{1} << i;
    if (!(s & bit)) return std::nullopt;
    const int sign = (std::popcount(s & (bit - 1)) % 2) ? -1 : 1;
    return std::pair{s & ~bit, sign};
}

/// a†_i |s⟩: nullopt if mode i is occupied, else (state, sign).
inline std::optional<std::pair<State, int>> create(State s, int i)
{
    const State bit = State{1} << i;
    if (s & bit) return std::nullopt;
    const int sign = (std::popcount(s & (bit - 1)) % 2) ? -1 : 1;
    return std::pair{s | bit, sign};
}

/// a†_{i1} a†_{i2} a_{j2} a_{j1} |s⟩ (rightmost acts first), or nullopt if it vanishes.
inline std::optional<std::pair<State, int>> apply_pair_term(State s, int i1, int i2, int j2, int j1)
{
    int sign = 1;
    for (auto [op, idx] : {std::pair{0, j1}, {0, j2}, {1, i2}, {1, i1}}) {
        auto r = op == 0 ? annihilate(s, idx) : create(s, idx);
        if (!r) return std::nullopt;
        s = r->first;
        sign *= r->second;
    }
    return std::pair{s, sign};
}

inline LatticeVec state_momentum(const ModeSet& ms, State s)
{
    LatticeVec p{0, 0};
    for (int i = 0; i < static_cast<int>(ms.size()); ++i)
        if (s >> i & 1) p = p + ms[i];
    return p;
}

/// All n-subsets of the modes with the given total momentum, numerically sorted.
inline std::vector<State> build_basis(const ModeSet& ms, int n, LatticeVec sector)
{
    if (n < 1 || static_cast<std::size_t>(n) > ms.size())
        throw ValidationError("ed: n_particles must lie in [1, number of modes]");
    const int m = static_cast<int>(ms.size());
    std::int64_t reach = 0;
    for (auto k : ms.modes()) reach = std::max(reach, chebyshev(k));
    std::vector<State> out;
    // depth-first over modes with a momentum reachability bound
    auto rec = [&](auto&& self, int i, int left, State s, LatticeVec p) -> void {
        if (left == 0) {
            if (p == sector) out.push_back(s);
            return;
        }
        if (m - i < left) return;
        const LatticeVec gap = sector - p;
        if (std::llabs(gap.k1) > left * reach || std::llabs(gap.k2) > left * reach) return;
        self(self, i + 1, left - 1, s | State{1} << i, p + ms[i]);
        self(self, i + 1, left, s, p);
    };
    rec(rec, 0, n, State{0}, LatticeVec{0, 0});
    std::sort(out.begin(), out.end());
    return out;
}

inline std::vector<State> build_basis(const EdModel& model)
{
    const ModeSet ms(model.mode_cutoff);
    auto basis = build_basis(ms, model.n_particles, model.total_momentum);
    if (basis.empty()) throw ValidationError("ed: empty momentum sector");
    return basis;
}

/// Total momenta reachable by n particles, lexicographic.
inline std::vector<LatticeVec> reachable_sectors(const ModeSet& ms, int n)
{
    std::vector<std::set<LatticeVec>> reach(static_cast<std::size_t>(n) + 1);
    reach[0].insert({0, 0});
    for (auto k : ms.modes())
        for (int c = n; c >= 1; --c)
            for (auto p : reach[static_cast<std::size_t>(c - 1)]) reach[static_cast<std::size_t>(c)].insert(p + k);
    const auto& last = reach[static_cast<std::size_t>(n)];
    return {last.begin(), last.end()};
}

/// H|s⟩ as a list of (state, amplitude), unmerged; the diagonal kinetic term comes first.
inline std::vector<std::pair<State, double>> apply_h(const EdModel& model, const ModeSet& ms, State s)
{
    std::vector<std::pair<State, double>> out;
    // ħ² Σ|p|² with one rounding
    std::int64_t p_sq = 0;
    std::vector<int> occ;
    for (int i = 0; i < static_cast<int>(ms.size()); ++i)
        if (s >> i & 1) {
            occ.push_back(i);
            p_sq += ms[i].norm_sq();
        }
    out.emplace_back(s, static_cast<double>(p_sq) / model.n_particles);
    const double pref = 1.0 / (8.0 * pi * pi * model.n_particles);
    for (int ip : occ)
        for (int iq : occ) {
            if (ip == iq) continue;
            const LatticeVec p = ms[ip], q = ms[iq];
            for (int ia = 0; ia < static_cast<int>(ms.size()); ++ia) {
                const LatticeVec k = ms[ia] - p; // p + k = mode ia
                const int ib = ms.find(q - k);
                if (ib < 0) continue;
                const double vk = model.potential.eval(k);
                if (vk == 0.0) continue;
                auto r = apply_pair_term(s, ia, ib, iq, ip);
                if (!r) continue;
                out.emplace_back(r->first, pref * vk * r->second);
            }
        }
    return out;
}

struct SparseHamiltonian {
    std::vector<std::size_t> row_ptr;
    std::vector<std::size_t> col;
    std::vector<double> val;
    std::size_t dim = 0;
    bool diagonal_only = true;

    double diag(std::size_t i) const
    {
        for (std::size_t j = row_ptr[i]; j < row_ptr[i + 1]; ++j)
            if (col[j] == i) return val[j];
        return 0.0;
    }

    void multiply(const Eigen::VectorXd& x, Eigen::VectorXd& y, unsigned threads = 1) const
    {
        y.resize(static_cast<Eigen::Index>(dim));
        auto rows = [&](std::size_t lo, std::size_t hi) {
            for (std::size_t i = lo; i < hi; ++i) {
                double s = 0.0;
                for (std::size_t j = row_ptr[i]; j < row_ptr[i + 1]; ++j) s += val[j] * x(static_cast<Eigen::Index>(col[j]));
                y(static_cast<Eigen::Index>(i)) = s;
            }
        };
        if (threads <= 1 || dim < 1024) {
            rows(0, dim);
            return;
        }
        const std::size_t chunk = (dim + threads - 1) / threads;
        parallel_map<int>(threads, threads, [&](std::size_t t) {
            rows(std::min(dim, t * chunk), std::min(dim, (t + 1) * chunk));
            return 0;
        });
    }

    Eigen::MatrixXd dense() const
    {
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
        for (std::size_t i = 0; i < dim; ++i)
            for (std::size_t j = row_ptr[i]; j < row_ptr[i + 1]; ++j)
                m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(col[j])) += val[j];
        return m;
    }
};

/// CSR matrix of H on the basis. Generated states outside the basis mean the
/// sector is not invariant and raise NumericError.
inline SparseHamiltonian build_hamiltonian(const EdModel& model, const std::vector<State>& basis, unsigned threads = 1)
{
    const ModeSet ms(model.mode_cutoff);
    using Row = std::vector<std::pair<std::size_t, double>>;
    const auto rows = parallel_map<Row>(basis.size(), threads, [&](std::size_t i) {
        auto terms = apply_h(model, ms, basis[i]);
        Row row;
        row.reserve(terms.size());
        for (const auto& [t, amp] : terms) {
            auto it = std::lower_bound(basis.begin(), basis.end(), t);
            if (it == basis.end() || *it != t) throw NumericError("ed: Hamiltonian leaves the momentum sector");
            row.emplace_back(static_cast<std::size_t>(it - basis.begin()), amp);
        }
        std::stable_sort(row.begin(), row.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        Row merged;
        for (const auto& e : row) {
            if (!merged.empty() && merged.back().first == e.first)
                merged.back().second += e.second;
            else
                merged.push_back(e);
        }
        return merged;
    });
    SparseHamiltonian h;
    h.dim = basis.size();
    h.row_ptr.push_back(0);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (const auto& [c, v] : rows[i]) {
            if (c != i && v != 0.0) h.diagonal_only = false;
            h.col.push_back(c);
            h.val.push_back(v);
        }
        h.row_ptr.push_back(h.col.size());
    }
    return h;
}

/// Filled-shell Fermi sea on the modes, or nullopt if n_particles is not a
/// filled-shell count or B_F does not fit in the mode set.
inline std::optional<State> fermi_sea_state(const EdModel& model, const ModeSet& ms)
{
    std::int64_t shell = 0;
    while (disk_count(shell) < model.n_particles) ++shell;
    if (disk_count(shell) != model.n_particles || shell > model.mode_cutoff) return std::nullopt;
    State s = 0;
    for (int i = 0; i < static_cast<int>(ms.size()); ++i)
        if (ms[i].norm_sq() <= shell) s |= State{1} << i;
    return s;
}

/// ⟨FS|H|FS⟩ from the same term generator as the matrix.
inline double fermi_sea_expectation(const EdModel& model)
{
    const ModeSet ms(model.mode_cutoff);
    const auto fs = fermi_sea_state(model, ms);
    if (!fs) throw ValidationError("ed: n_particles is not a filled shell contained in the mode set");
    CompensatedSum e;
    for (const auto& [t, amp] : apply_h(model, ms, *fs))
        if (t == *fs) e.add(amp);
    return e.value();
}

struct EdResult {
    std::size_t dim = 0;
    double e0 = 0;
    double fs_expectation = std::numeric_limits<double>::quiet_NaN();
    double e_fs_formula = std::numeric_limits<double>::quiet_NaN();
    double residual = 0;
    int lanczos_iters = 0;
    std::string method;
};

struct LanczosOptions {
    int krylov_dim = 120;
    int max_restarts = 40;
    double tol = 1e-10;
    std::uint64_t seed = 12345;
};

/// Lowest eigenpair by restarted Lanczos with full reorthogonalization.
inline std::pair<double, Eigen::VectorXd> lanczos_lowest(const SparseHamiltonian& h, Eigen::VectorXd start,
                                                        const LanczosOptions& opt, int& iters, unsigned threads = 1)
{
    const auto n = static_cast<Eigen::Index>(h.dim);
    const int m = static_cast<int>(std::min<Eigen::Index>(opt.krylov_dim, n));
    Eigen::VectorXd w(n), hx(n);
    iters = 0;
    double best = std::numeric_limits<double>::infinity();
    for (int restart = 0; restart <= opt.max_restarts; ++restart) {
        Eigen::MatrixXd V(n, m);
        std::vector<double> alpha, beta;
        V.col(0) = start.normalized();
        int used = 0;
        for (int j = 0; j < m; ++j) {
            h.multiply(V.col(j), w, threads);
            ++iters;
            const double a = V.col(j).dot(w);
            alpha.push_back(a);
            used = j + 1;
            // full reorthogonalization, applied twice
            for (int pass = 0; pass < 2; ++pass) w -= V.leftCols(j + 1) * (V.leftCols(j + 1).transpose() * w);
            const double b = w.norm();
            if (j + 1 == m || b < 1e-13) break;
            beta.push_back(b);
            V.col(j + 1) = w / b;
        }
        Eigen::MatrixXd T = Eigen::MatrixXd::Zero(used, used);
        for (int j = 0; j < used; ++j) {
            T(j, j) = alpha[static_cast<std::size_t>(j)];
            if (j + 1 < used) T(j, j + 1) = T(j + 1, j) = beta[static_cast<std::size_t>(j)];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
        const double theta = es.eigenvalues()(0);
        Eigen::VectorXd x = V.leftCols(used) * es.eigenvectors().col(0);
        x.normalize();
        h.multiply(x, hx, threads);
        const double res = (hx - theta * x).norm();
        best = std::min(best, theta);
        if (res <= opt.tol * (1.0 + std::fabs(theta))) return {theta, x};
        start = x;
    }
    std::ostringstream msg;
    msg.precision(17);
    msg << "ed: Lanczos did not converge (best estimate " << best << ")";
    throw NumericError(msg.str());
}

inline EdResult ground_energy(const EdModel& model, unsigned threads = 1, const LanczosOptions& opt = {})
{
    const ModeSet ms(model.mode_cutoff);
    const auto basis = build_basis(model);
    if (basis.size() > model.max_sparse) throw ValidationError("ed: sector dimension exceeds the configured maximum");
    const auto h = build_hamiltonian(model, basis, threads);

    EdResult r;
    r.dim = basis.size();
    const auto fs = fermi_sea_state(model, ms);
    if (fs) {
        r.fs_expectation = fermi_sea_expectation(model);
        std::int64_t shell = 0;
        while (disk_count(shell) < model.n_particles) ++shell;
        r.e_fs_formula = e_fs(build_fermi_system(shell), model.potential);
    }

    if (h.diagonal_only) {
        r.method = "diagonal";
        r.e0 = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < h.dim; ++i) r.e0 = std::min(r.e0, h.diag(i));
        r.residual = 0.0;
        return r;
    }

    const auto n = static_cast<Eigen::Index>(h.dim);
    Eigen::VectorXd psi;
    if (h.dim <= model.max_dense) {
        r.method = "dense";
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.dense());
        if (es.info() != Eigen::Success) throw NumericError("ed: dense eigensolver failed");
        r.e0 = es.eigenvalues()(0);
        psi = es.eigenvectors().col(0);
    } else {
        r.method = "lanczos";
        std::mt19937_64 rng(opt.seed);
        std::normal_distribution<double> gauss;
        Eigen::VectorXd start(n);
        for (Eigen::Index i = 0; i < n; ++i) start(i) = gauss(rng);
        if (fs) {
            auto it = std::lower_bound(basis.begin(), basis.end(), *fs);
            if (it != basis.end() && *it == *fs) {
                start *= 1e-3 / start.norm();
                start(it - basis.begin()) += 1.0;
            }
        }
        auto [e, x] = lanczos_lowest(h, start, opt, r.lanczos_iters, threads);
        r.e0 = e;
        psi = x;
    }
    Eigen::VectorXd hpsi;
    h.multiply(psi, hpsi, threads);
    r.residual = (hpsi - r.e0 * psi).norm() / psi.norm();
    return r;
}

/// Lowest ground energy over every reachable momentum sector.
inline std::pair<LatticeVec, EdResult> ground_energy_all_sectors(EdModel model, unsigned threads = 1,
                                                                 const LanczosOptions& opt = {})
{
    const ModeSet ms(model.mode_cutoff);
    std::optional<std::pair<LatticeVec, EdResult>> best;
    for (auto sector : reachable_sectors(ms, model.n_particles)) {
        model.total_momentum = sector;
        auto r = ground_energy(model, threads, opt);
        if (!best || r.e0 < best->second.e0) best = std::pair{sector, r};
    }
    return *best;
}

} // namespace fermi2d
