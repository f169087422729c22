#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "fermi2d/matfun.hpp"
#include "fermi2d/quasiboson.hpp"
#include "fermi2d/rpa.hpp"

using namespace fermi2d;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// composite Simpson in long double after λ = sinh t, on [0, t_max]
template <class F>
long double sinh_simpson(F f, long double t_max = 40.0L, int n = 400000)
{
    const long double h = t_max / n;
    auto g = [&](long double t) { return f(std::sinh(t)) * std::cosh(t); };
    long double s = g(0.0L) + g(t_max);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0L : 2.0L) * g(h * i);
    return s * h / 3.0L;
}

long double f_long(long double x) { return std::log1p(x) - x; }

long double screening_long(long double l) { return 1.0L - l / std::sqrt(1.0L + l * l); }

Matrix random_spd(std::mt19937_64& rng, int n)
{
    std::normal_distribution<double> g;
    Matrix a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = g(rng);
    return a * a.transpose() + 0.1 * Matrix::Identity(n, n);
}

} // namespace

// ---------------------------------------------------------------- matfun

TEST_CASE("matrix functions of diagonal matrices", "[matfun]")
{
    const Matrix id = Matrix::Identity(3, 3);
    CHECK((matfun(id, MatFun::sqrt) - id).norm() < 1e-15);
    Matrix d = Vector::Map(std::vector<double>{4.0, 9.0}.data(), 2).asDiagonal();
    Matrix r = matfun(d, MatFun::sqrt);
    CHECK_THAT(r(0, 0), WithinAbs(2.0, 1e-15));
    CHECK_THAT(r(1, 1), WithinAbs(3.0, 1e-15));
    CHECK_THAT(r(0, 1), WithinAbs(0.0, 1e-15));
    Matrix e = Matrix::Zero(2, 2);
    e(0, 0) = std::exp(2.0);
    e(1, 1) = 1.0;
    Matrix l = matfun(e, MatFun::log);
    CHECK_THAT(l(0, 0), WithinAbs(2.0, 1e-14));
    CHECK_THAT(l(1, 1), WithinAbs(0.0, 1e-15));
    Matrix inv = matfun(d, MatFun::invsqrt);
    CHECK_THAT(inv(1, 1), WithinRel(1.0 / 3.0, 1e-15));
}

TEST_CASE("matrix functions reject bad input", "[matfun]")
{
    Matrix a(2, 2);
    a << 1.0, 0.0, 0.0, -1.0;
    CHECK_THROWS_AS(matfun(a, MatFun::sqrt), NumericError);
    CHECK_THROWS_AS(matfun(a, MatFun::log), NumericError);
    Matrix s(2, 2);
    s << 1.0, 2.0, 0.0, 1.0;
    CHECK_THROWS_AS(matfun(s, MatFun::sqrt), ValidationError);
}

TEST_CASE("square root of random SPD matrices", "[matfun]")
{
    std::mt19937_64 rng(5);
    for (int n : {1, 3, 10, 40}) {
        const Matrix a = random_spd(rng, n);
        const Matrix r = matfun(a, MatFun::sqrt);
        CHECK((r * r - a).norm() <= 1e-12 * a.norm());
        const Matrix ir = matfun(a, MatFun::invsqrt);
        CHECK((ir * r - Matrix::Identity(n, n)).norm() <= 1e-10);
    }
}

TEST_CASE("polar decomposition", "[matfun]")
{
    const double c = std::cos(0.3), s = std::sin(0.3);
    Matrix q(2, 2);
    q << c, -s, s, c;
    auto p = polar(q);
    CHECK((p.orthogonal - q).norm() < 1e-14);
    CHECK((p.modulus - Matrix::Identity(2, 2)).norm() < 1e-14);

    std::mt19937_64 rng(9);
    const Matrix spd = random_spd(rng, 4);
    p = polar(spd);
    CHECK((p.orthogonal - Matrix::Identity(4, 4)).norm() < 1e-12);
    CHECK((p.modulus - spd).norm() < 1e-12 * spd.norm());

    Matrix d = Matrix::Zero(2, 2);
    d(0, 0) = 2.0;
    d(1, 1) = -3.0;
    p = polar(d);
    CHECK_THAT(p.orthogonal(0, 0), WithinAbs(1.0, 1e-15));
    CHECK_THAT(p.orthogonal(1, 1), WithinAbs(-1.0, 1e-15));
    CHECK_THAT(p.modulus(0, 0), WithinAbs(2.0, 1e-15));
    CHECK_THAT(p.modulus(1, 1), WithinAbs(3.0, 1e-15));

    CHECK_THROWS_AS(polar(Matrix::Zero(2, 2)), NumericError);
}

TEST_CASE("rotation logarithm", "[matfun]")
{
    std::mt19937_64 rng(21);
    std::normal_distribution<double> g;
    for (int n : {2, 3, 6, 9}) {
        Matrix x(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) x(i, j) = 0.4 * g(rng);
        const Matrix skew = 0.5 * (x - x.transpose());
        const Matrix q = skew.exp();
        const Matrix l = orthogonal_log(q);
        CHECK((l + l.transpose()).norm() < 1e-12);
        CHECK((l.exp() - q).norm() < 1e-12);
    }
    CHECK(orthogonal_log(Matrix::Identity(4, 4)).norm() < 1e-15);
}

// ---------------------------------------------------------------- quasiboson

TEST_CASE("zero coupling block", "[quasiboson]")
{
    Vector u(3), v(3);
    u << 0.5, 0.8, 1.0;
    v << 1.0, 0.3, 2.0;
    auto blk = make_block({1, 0}, 6, 0.0, u, v);
    CHECK(blk.W.norm() == 0.0);
    CHECK(blk.Wt.norm() == 0.0);
    for (int i = 0; i < 3; ++i) {
        CHECK(blk.D(i, i) == u(i) * u(i));
        CHECK(blk.D(i + 3, i + 3) == u(i) * u(i));
    }
    compute_chain(blk);
    CHECK((blk.E - blk.D).norm() < 1e-14);
    CHECK(blk.K.norm() < 1e-14);
    CHECK(blk.L.norm() < 1e-14);
}

TEST_CASE("block validation", "[quasiboson]")
{
    Vector u(2), v(2), w(3);
    u << 0.5, 0.0;
    v << 1.0, 1.0;
    w << 1.0, 1.0, 1.0;
    CHECK_THROWS_AS(make_block({1, 0}, 4, 1.0, u, v), ValidationError);
    u(1) = 0.3;
    CHECK_THROWS_AS(make_block({1, 0}, 4, -1.0, u, v), ValidationError);
    CHECK_THROWS_AS(make_block({1, 0}, 4, 1.0, u, w), ValidationError);
}

TEST_CASE("scalar block closed form", "[quasiboson]")
{
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> uni(0.05, 1.0);
    for (int i = 0; i < 50; ++i) {
        Vector u(1), v(1);
        u << uni(rng);
        v << 2.0 * uni(rng);
        const double g = 2.0 * uni(rng);
        auto blk = make_block({1, 0}, 2, g, u, v);
        compute_chain(blk);
        const double d = u(0) * u(0), b = g * v(0) * v(0);
        const double expect = std::sqrt(d * (d + 2.0 * b));
        const Matrix ueu = block_hadamard(1).transpose() * blk.E * block_hadamard(1);
        CHECK_THAT(ueu(0, 0), WithinRel(expect, 1e-12));
        CHECK_THAT(ueu(1, 1), WithinRel(expect, 1e-12));
    }
}

TEST_CASE("diagonalization of random blocks", "[quasiboson]")
{
    std::mt19937_64 rng(2024);
    for (int i = 0; i < 60; ++i) {
        auto blk = random_block(rng);
        compute_chain(blk);
        const auto& r = blk.residuals;
        CHECK(r.diag_residual <= 1e-8);
        CHECK(r.ueu_residual <= 1e-8);
        CHECK(r.otilde_residual <= 1e-8);
        CHECK(r.e_poly_residual <= 1e-9);
        CHECK(r.ptilde_minus_d_min_eig >= -1e-8);
        CHECK(r.o_orthogonality <= 1e-10);
        CHECK(r.otilde_orthogonality <= 1e-10);
        CHECK(r.k_symmetry <= 1e-10);
        CHECK((blk.L + blk.L.transpose()).norm() <= 1e-10);
    }
}

TEST_CASE("literal sinh sign does not diagonalize", "[quasiboson]")
{
    std::mt19937_64 rng(3);
    RandomBlockParams p;
    p.min_half_dim = 4;
    p.g_max = 1.0;
    auto blk = random_block(rng, p);
    blk.g = 1.0;
    blk = make_block(blk.k, blk.M, 1.0, blk.u, blk.v);
    compute_chain(blk);
    const Matrix t = quadratic_form_matrix(blk);
    const Matrix e2 = block_diag(blk.E, blk.E);
    const Matrix good = bogoliubov_factor(blk.K, blk.O, -1.0);
    const Matrix bad = bogoliubov_factor(blk.K, blk.O, 1.0);
    CHECK((t - good * e2 * good.transpose()).norm() <= 1e-10 * t.norm());
    CHECK((t - bad * e2 * bad.transpose()).norm() > 1e-3 * t.norm());
}

TEST_CASE("ill-conditioned block", "[quasiboson]")
{
    Vector u(3), v(3);
    u << 4e-4, 0.7, 1.0;
    v << 1.9, 0.2, 1.5;
    auto blk = make_block({1, 0}, 6, 1.3, u, v);
    REQUIRE_NOTHROW(compute_chain(blk));
    CHECK(blk.residuals.diag_residual <= 1e-8);
    CHECK(blk.residuals.ueu_residual <= 1e-8);
}

TEST_CASE("assembled blocks from a patch decomposition", "[quasiboson]")
{
    const auto sys = build_fermi_system(2500);
    const auto d = build_patches(sys, 12, 1.5, 0.02);
    const auto v = PotentialSpec::gaussian(1.0, 2.0);
    for (auto k : gamma_nor(d)) {
        auto blk = assemble_block(sys, d, v, k);
        REQUIRE(blk.has_value());
        CHECK(blk->i_plus.size() == blk->i_minus.size());
        CHECK_THAT(blk->g, WithinRel(v(k) / (8.0 * pi * pi), 1e-14));
        const auto counts = pair_counts_all(sys, d, k);
        for (std::size_t i = 0; i < blk->i_plus.size(); ++i) {
            const int a = blk->i_plus[i];
            CHECK(blk->i_minus[i] == d.reflect(a));
            const double n_sq = double(counts[static_cast<std::size_t>(a)]);
            CHECK_THAT(blk->v(Eigen::Index(i)), WithinAbs(std::sqrt(n_sq / (d.kf * k.norm())), 1e-14));
            CHECK_THAT(blk->u(Eigen::Index(i)) * blk->u(Eigen::Index(i)),
                       WithinAbs(std::fabs(d.dot_omega(k, a)) / k.norm(), 1e-14));
        }
        compute_chain(*blk);
        CHECK(blk->residuals.diag_residual <= 1e-8);
    }
    // M = 6: k = (1,0) sits between centers, max k·ω̂ = cos(π/6) < belt
    CHECK_FALSE(assemble_block(sys, build_patches(sys, 6, 1.5, 0.001), v, {1, 0}).has_value());
}

// ---------------------------------------------------------------- rpa

TEST_CASE("F function", "[rpa]")
{
    CHECK(f_func(0.0) == 0.0);
    CHECK_THAT(f_func(1.0), WithinRel(std::log(2.0) - 1.0, 1e-15));
    CHECK_THAT(f_func(1e-10), WithinRel(-0.5e-20, 1e-9));
    CHECK_THAT(f_func(5e-4), WithinRel(double(f_long(5e-4L)), 1e-13));
    CHECK_THROWS_AS(f_func(-0.1), ValidationError);
    for (double x = 1e-12; x <= 1e-4; x *= 3.0) CHECK(std::fabs(f_func(x) + 0.5 * x * x) <= x * x * x);
    for (double x : {1e-6, 0.01, 1.0, 100.0}) {
        CHECK(f_func(x) <= 0.0);
        CHECK(std::fabs(f_func(x)) <= 0.5 * x * x);
    }
}

TEST_CASE("half-circle integral", "[rpa]")
{
    CHECK(half_circle_integral(0.0).numeric == pi);
    const auto one = half_circle_integral(1.0);
    CHECK_THAT(one.numeric, WithinRel(pi * (1.0 - 1.0 / std::sqrt(2.0)), 1e-12));
    CHECK_THAT(one.closed_form, WithinRel(pi * (1.0 - 1.0 / std::sqrt(2.0)), 1e-15));
    const double big = 1e3;
    CHECK(half_circle_integral(big).numeric <= pi / (2.0 * big * big) * (1.0 + 1e-3));
    CHECK_THROWS_AS(half_circle_integral(-1.0), ValidationError);
}

TEST_CASE("Q functions", "[rpa]")
{
    CHECK(q_tilde(0.0, 0.7) == 0.0);
    CHECK_THAT(q_tilde(3.0, 0.0), WithinRel(3.0 / (4.0 * pi), 1e-15));
    const auto v = PotentialSpec::gaussian(2.0, 1.0);
    CHECK_THAT(q_tilde(v, {1, 0}, 0.0), WithinRel(v({1, 0}) / (4.0 * pi), 1e-15));
    Vector u(1), w(1);
    u << 1.0;
    w << 1.0;
    const auto blk = make_block({1, 0}, 2, 0.37, u, w);
    CHECK_THAT(q_of_lambda(blk, 0.0), WithinRel(2.0 * 0.37, 1e-15));
    CHECK(q_of_lambda(make_block({1, 0}, 2, 0.0, u, w), 2.0) == 0.0);
}

TEST_CASE("screening square integral constant", "[rpa]")
{
    const long double ref = sinh_simpson([](long double l) {
        const long double s = screening_long(l);
        return s * s;
    });
    CHECK_THAT(double(ref), WithinRel(screening_square_integral, 1e-12));
    QuadratureSpec q;
    auto r = integrate_to_infinity(
        [](double l) {
            const double s = 1.0 - l / std::sqrt(1.0 + l * l);
            return s * s;
        },
        0.0, q);
    CHECK_THAT(r.value, WithinRel(2.0 - pi / 2.0, 1e-10));
}

TEST_CASE("F integral", "[rpa]")
{
    QuadratureSpec q;
    const auto z = f_integral(0.0, q);
    CHECK(z.value == 0.0);
    CHECK(z.tail_bound == 0.0);
    const double eps = 1e-3;
    const double pred = -0.5 * std::pow(eps / (4.0 * pi), 2) * (2.0 - pi / 2.0);
    const auto s = f_integral(eps, q);
    CHECK(std::fabs(s.full() / pred - 1.0) <= 1e-3);
    CHECK(std::fabs(s.tail_value) <= s.tail_bound);
    for (double vh : {0.1, 1.0, 10.0, 100.0}) {
        const long double amp = vh / (4.0L * 3.14159265358979323846264338327950288L);
        const long double ref = sinh_simpson([amp](long double l) { return f_long(amp * screening_long(l)); });
        CHECK_THAT(f_integral(vh, q).full(), WithinRel(double(ref), 1e-9));
    }
    CHECK_THROWS_AS(f_integral(-1.0, q), ValidationError);
}

TEST_CASE("RPA energy", "[rpa]")
{
    QuadratureSpec q;
    const auto sys = build_fermi_system(25);
    CHECK(e_rpa(sys, PotentialSpec::zero(), 4.0, q).e_rpa == 0.0);
    CHECK(e_rpa(sys, PotentialSpec::gaussian(1.0, 2.0), 16.0, q).e_rpa < 0.0);
    CHECK(e_rpa(sys, PotentialSpec::power_law(1.0, 4.0), 16.0, q).e_rpa < 0.0);
    CHECK_THROWS_AS(e_rpa(sys, PotentialSpec::zero(), 0.0, q), ValidationError);
}

TEST_CASE("RPA energy scales exactly with N", "[rpa]")
{
    QuadratureSpec q;
    const auto v = PotentialSpec::gaussian(1.0, 2.0);
    const auto a = build_fermi_system(9), b = build_fermi_system(400);
    const double ea = e_rpa(a, v, 16.0, q).e_rpa * std::sqrt(double(a.N));
    const double eb = e_rpa(b, v, 16.0, q).e_rpa * std::sqrt(double(b.N));
    CHECK_THAT(ea, WithinRel(eb, 1e-12));
}

TEST_CASE("RPA energy of a finite table", "[rpa]")
{
    QuadratureSpec q;
    const auto sys = build_fermi_system(100);
    const auto v = PotentialSpec::table({{{1, 0}, 1.0}, {{0, 1}, 1.0}, {{1, 1}, 1.0}, {{1, -1}, 1.0}});
    const long double amp = 1.0L / (4.0L * 3.14159265358979323846264338327950288L);
    const double ref_i = double(sinh_simpson([amp](long double l) { return f_long(amp * screening_long(l)); }));
    const double pref = sys.hbar * sys.kappa / pi;
    const double expect = pref * (4.0 * ref_i + 4.0 * std::sqrt(2.0) * ref_i);
    const auto fi = f_integral(1.0, q);
    CHECK_THAT(fi.full(), WithinRel(ref_i, 1e-9));
    const auto r = e_rpa(sys, v, 3.0, q);
    CHECK_THAT(r.e_rpa, WithinRel(pref * (4.0 + 4.0 * std::sqrt(2.0)) * fi.value, 1e-13));
    CHECK(r.lattice_tail == 0.0);
    // only the λ-tail beyond the split is missing, and it is bounded
    CHECK(std::fabs(r.e_rpa - expect) <= r.tail_bound);
    CHECK(e_rpa(sys, v, auto_kmax(v).value(), q).e_rpa == r.e_rpa);
}

TEST_CASE("F integral split independence", "[rpa]")
{
    QuadratureSpec a, b;
    b.lambda_split = 20.0;
    for (double vh : {0.5, 5.0, 50.0}) {
        const auto fa = f_integral(vh, a), fb = f_integral(vh, b);
        CHECK(std::fabs(fa.value - fb.value) <= fa.tail_bound + fb.tail_bound);
        CHECK_THAT(fa.full(), WithinRel(fb.full(), 1e-10));
        CHECK(fa.value <= 0.0);
    }
}

TEST_CASE("automatic momentum cutoff", "[rpa]")
{
    CHECK(auto_kmax(PotentialSpec::gaussian(1.0, 2.0)).value() == 16.0);
    CHECK_FALSE(auto_kmax(PotentialSpec::constant(1.0)).has_value());
    CHECK(auto_kmax(PotentialSpec::zero()).value() == 1.0);
}

TEST_CASE("trace routes", "[rpa]")
{
    QuadratureSpec q;
    Vector u(2), v(2);
    u << 0.4, 0.9;
    v << 1.0, 0.5;
    auto z = make_block({1, 0}, 4, 0.0, u, v);
    compute_chain(z);
    const auto tz = trace_edw(z, q);
    CHECK(tz.matrix_route == 0.0);
    CHECK(tz.integral_route == 0.0);

    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> uni(0.01, 1.0);
    for (int i = 0; i < 30; ++i) {
        Vector a(1), b(1);
        a << uni(rng);
        b << 2.0 * uni(rng);
        const double g = 2.0 * uni(rng);
        auto blk = make_block({1, 0}, 2, g, a, b);
        compute_chain(blk);
        const auto t = trace_edw(blk, q);
        const double closed = scalar_trace(a(0) * a(0), g * b(0) * b(0));
        CHECK_THAT(t.matrix_route, WithinAbs(closed, 1e-12 * (1.0 + std::fabs(closed))));
        CHECK_THAT(t.integral_route, WithinAbs(closed, 1e-8 * (1.0 + std::fabs(closed))));
    }
    auto fresh = make_block({1, 0}, 4, 1.0, u, v);
    CHECK_THROWS_AS(trace_edw(fresh, q), ValidationError);
}

TEST_CASE("patch trace energy", "[rpa]")
{
    QuadratureSpec q;
    const auto sys = build_fermi_system(900);
    const auto d = build_patches(sys, 10, 1.5, 0.02);
    CHECK(patch_trace_energy(sys, d, PotentialSpec::zero(), q).value == 0.0);
    const auto v = PotentialSpec::gaussian(1.0, 2.0);
    const auto pt = patch_trace_energy(sys, d, v, q, 2);
    CHECK(pt.value < 0.0);
    const auto tr = e_rpa_truncated(sys, v, d.R, q);
    CHECK(pt.value / tr > 0.0);
    CHECK(pt.value / tr < 1.0);
    CHECK(patch_trace_energy(sys, d, v, q, 1).value == pt.value);

    // R just above 1: Γ^nor = {(0,1), (1,0)}
    const auto small = build_patches(sys, 10, 1.01, 0.02);
    REQUIRE(gamma_nor(small).size() == 2);
    double hand = 0.0;
    for (auto k : gamma_nor(small)) {
        auto blk = assemble_block(sys, small, v, k);
        REQUIRE(blk.has_value());
        compute_chain(*blk);
        hand += sys.hbar * sys.kappa * k.norm() * trace_edw(*blk, q).matrix_route;
    }
    CHECK_THAT(patch_trace_energy(sys, small, v, q).value, WithinRel(hand, 1e-14));
}

TEST_CASE("Fermi sea energy", "[rpa]")
{
    const auto sys = build_fermi_system(2);
    CHECK_THAT(e_fs(sys, PotentialSpec::zero()), WithinRel(4.0 / 3.0, 1e-15));
    CHECK_THAT(e_fs(sys, PotentialSpec::constant(3.7)), WithinRel(4.0 / 3.0, 1e-15));

    std::vector<std::pair<LatticeVec, double>> entries;
    for (std::int64_t a = -1; a <= 1; ++a)
        for (std::int64_t b = -1; b <= 1; ++b) entries.push_back({{a, b}, 1.0});
    const auto v = PotentialSpec::table(entries);
    const auto ball = fermi_ball(sys);
    std::int64_t close_pairs = 0;
    for (auto p : ball)
        for (auto p2 : ball)
            if ((p - p2).norm_sq() <= 2) ++close_pairs;
    const double n = double(sys.N);
    const double expect = 4.0 / 3.0 + (n * n - double(close_pairs)) / (8.0 * pi * pi * n);
    CHECK_THAT(e_fs(sys, v), WithinRel(expect, 1e-14));
}

TEST_CASE("difference histogram matches the double loop", "[rpa]")
{
    for (std::int64_t shell : {0, 1, 2, 5, 10, 25, 50}) {
        const auto sys = build_fermi_system(shell);
        REQUIRE(sys.N <= 200);
        CHECK(difference_histogram(sys).counts == difference_histogram_naive(sys).counts);
        const auto v = PotentialSpec::gaussian(1.7, 1.3);
        CHECK(e_fs(sys, v) == e_fs_naive(sys, v));
    }
}

TEST_CASE("RPA report", "[rpa]")
{
    QuadratureSpec q;
    const auto sys = build_fermi_system(400);
    const auto d = build_patches(sys, 8, 1.5, 0.02);
    const auto rep = rpa_report(sys, PotentialSpec::gaussian(1.0, 2.0), 16.0, q, &d);
    REQUIRE(rep.patch_trace.has_value());
    REQUIRE(rep.patch_over_truncated.has_value());
    CHECK(rep.N == sys.N);
    int filled = 0;
    for (const auto& row : rep.rpa.per_k)
        if (!std::isnan(row.trace_matrix)) ++filled;
    CHECK(filled == static_cast<int>(rep.patch_trace->terms.size()));
    CHECK_THAT(rep.e_rpa_times_sqrt_n, WithinRel(rep.rpa.e_rpa * std::sqrt(double(sys.N)), 1e-15));
}
