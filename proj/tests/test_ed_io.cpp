#include <catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "fermi2d/cli.hpp"
#include "fermi2d/ed.hpp"
#include "fermi2d/io.hpp"

using namespace fermi2d;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name)
{
    auto p = fs::temp_directory_path() / ("fermi2d_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

int run_cli(std::vector<std::string> args)
{
    args.insert(args.begin(), "fermi2d");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    return cli::run(static_cast<int>(argv.size()), argv.data());
}

// composes a_i / a†_i one at a time; nullopt when the result vanishes
std::optional<std::pair<State, int>> chain(State s, std::initializer_list<std::pair<bool, int>> ops)
{
    int sign = 1;
    for (auto it = std::rbegin(ops); it != std::rend(ops); ++it) {
        auto r = it->first ? create(s, it->second) : annihilate(s, it->second);
        if (!r) return std::nullopt;
        s = r->first;
        sign *= r->second;
    }
    return std::pair{s, sign};
}

double dot_sparse(const SparseHamiltonian& h, const Eigen::VectorXd& x, const Eigen::VectorXd& y)
{
    Eigen::VectorXd hy;
    h.multiply(y, hy);
    return x.dot(hy);
}

} // namespace

// ---------------------------------------------------------------- ed

TEST_CASE("mode set", "[ed]")
{
    ModeSet ms(1);
    CHECK(ms.size() == 5);
    CHECK(ms.find({0, 0}) >= 0);
    CHECK(ms.find({1, 1}) == -1);
    CHECK(ms.find({5, 0}) == -1);
    CHECK(ModeSet(16).size() == 49);
    CHECK_THROWS_AS(ModeSet(25), ValidationError);
    CHECK_THROWS_AS(ModeSet(-1), ValidationError);
}

TEST_CASE("canonical anticommutation", "[ed]")
{
    std::mt19937_64 rng(4);
    for (int t = 0; t < 200; ++t) {
        const State s = rng() & 0xFFF;
        const int i = static_cast<int>(rng() % 12), j = static_cast<int>(rng() % 12);
        if (i != j) {
            auto a = chain(s, {{false, i}, {false, j}});
            auto b = chain(s, {{false, j}, {false, i}});
            REQUIRE(a.has_value() == b.has_value());
            if (a) {
                CHECK(a->first == b->first);
                CHECK(a->second == -b->second);
            }
            auto c = chain(s, {{true, i}, {false, j}});
            auto d = chain(s, {{false, j}, {true, i}});
            REQUIRE(c.has_value() == d.has_value());
            if (c) CHECK(c->second == -d->second);
        } else {
            // a†_i a_i + a_i a†_i = 1
            const int n = static_cast<int>(chain(s, {{true, i}, {false, i}}).has_value()) +
                          static_cast<int>(chain(s, {{false, i}, {true, i}}).has_value());
            CHECK(n == 1);
        }
    }
    CHECK_FALSE(annihilate(0b10, 0).has_value());
    CHECK_FALSE(create(0b10, 1).has_value());
    CHECK(annihilate(0b11, 1)->second == -1);
}

TEST_CASE("pair term equals composed operators", "[ed]")
{
    std::mt19937_64 rng(6);
    for (int t = 0; t < 300; ++t) {
        const State s = rng() & 0x3FF;
        const int i1 = int(rng() % 10), i2 = int(rng() % 10), j2 = int(rng() % 10), j1 = int(rng() % 10);
        const auto direct = apply_pair_term(s, i1, i2, j2, j1);
        const auto composed = chain(s, {{true, i1}, {true, i2}, {false, j2}, {false, j1}});
        REQUIRE(direct.has_value() == composed.has_value());
        if (direct) CHECK(*direct == *composed);
    }
}

TEST_CASE("basis of small sectors", "[ed]")
{
    ModeSet ms(1);
    CHECK(build_basis(ms, 2, {0, 0}).size() == 2);
    CHECK(build_basis(ms, 1, {1, 0}).size() == 1);
    EdModel m;
    m.mode_cutoff = 1;
    m.n_particles = 1;
    m.total_momentum = {2, 0};
    CHECK_THROWS_AS(build_basis(m), ValidationError);
    // brute force over all subsets
    ModeSet ms2(2);
    for (int n : {2, 3, 4}) {
        std::size_t brute = 0;
        for (State s = 0; s < (State{1} << ms2.size()); ++s)
            if (std::popcount(s) == n && state_momentum(ms2, s) == LatticeVec{1, 0}) ++brute;
        CHECK(build_basis(ms2, n, {1, 0}).size() == brute);
    }
}

TEST_CASE("free ground energies", "[ed]")
{
    EdModel m;
    m.mode_cutoff = 1;
    m.n_particles = 2;
    const auto r = ground_energy(m);
    CHECK(r.dim == 2);
    CHECK(r.e0 == 1.0);
    CHECK(r.method == "diagonal");

    EdModel m5;
    m5.mode_cutoff = 5;
    m5.n_particles = 5;
    const auto basis = build_basis(m5);
    const ModeSet ms(5);
    double lowest = std::numeric_limits<double>::infinity();
    for (State s : basis) {
        std::int64_t p_sq = 0;
        for (int i = 0; i < int(ms.size()); ++i)
            if (s >> i & 1) p_sq += ms[i].norm_sq();
        lowest = std::min(lowest, double(p_sq) / 5.0);
    }
    CHECK(ground_energy(m5).e0 == lowest);
}

TEST_CASE("Fermi sea expectation", "[ed]")
{
    EdModel m;
    m.mode_cutoff = 5;
    m.n_particles = 9;
    CHECK_THAT(fermi_sea_expectation(m), WithinRel(4.0 / 3.0, 1e-15));
    m.potential = PotentialSpec::constant(2.0);
    CHECK_THAT(fermi_sea_expectation(m), WithinRel(4.0 / 3.0, 1e-14));
    for (const auto& v : {PotentialSpec::gaussian(3.0, 1.5), PotentialSpec::power_law(2.0, 3.0)}) {
        m.potential = v;
        CHECK_THAT(fermi_sea_expectation(m), WithinAbs(e_fs(build_fermi_system(2), v), 1e-12));
    }
    m.n_particles = 6;
    CHECK_THROWS_AS(fermi_sea_expectation(m), ValidationError);
}

TEST_CASE("Hamiltonian is symmetric", "[ed]")
{
    EdModel m;
    m.mode_cutoff = 4;
    m.n_particles = 5;
    m.potential = PotentialSpec::gaussian(4.0, 1.5);
    const auto basis = build_basis(m);
    const auto h = build_hamiltonian(m, basis);
    const auto n = static_cast<Eigen::Index>(h.dim);
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g;
    for (int t = 0; t < 5; ++t) {
        Eigen::VectorXd x(n), y(n);
        for (Eigen::Index i = 0; i < n; ++i) x(i) = g(rng), y(i) = g(rng);
        CHECK_THAT(dot_sparse(h, x, y), WithinAbs(dot_sparse(h, y, x), 1e-12 * x.norm() * y.norm()));
    }
    const Eigen::MatrixXd dense = h.dense();
    CHECK((dense - dense.transpose()).norm() <= 1e-12 * dense.norm());
}

TEST_CASE("Lanczos agrees with the dense solver", "[ed]")
{
    EdModel m;
    m.mode_cutoff = 5;
    m.n_particles = 5;
    m.potential = PotentialSpec::gaussian(5.0, 1.5);
    const auto dense = ground_energy(m);
    CHECK(dense.method == "dense");
    m.max_dense = 0;
    const auto lz = ground_energy(m);
    CHECK(lz.method == "lanczos");
    CHECK_THAT(lz.e0, WithinAbs(dense.e0, 1e-10 * (1.0 + std::fabs(dense.e0))));
    CHECK(lz.residual <= 1e-8 * (1.0 + std::fabs(lz.e0)));
    CHECK(lz.e0 <= lz.fs_expectation);
}

TEST_CASE("all sectors", "[ed]")
{
    EdModel m;
    m.mode_cutoff = 2;
    m.n_particles = 5;
    m.potential = PotentialSpec::gaussian(2.0, 1.0);
    const auto [sector, r] = ground_energy_all_sectors(m);
    m.total_momentum = sector;
    CHECK(ground_energy(m).e0 == r.e0);
    for (auto s : reachable_sectors(ModeSet(2), 5)) {
        m.total_momentum = s;
        CHECK(ground_energy(m).e0 >= r.e0);
    }
}

// ---------------------------------------------------------------- io

TEST_CASE("number formatting round-trips", "[io]")
{
    for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, std::nextafter(1.0, 2.0)})
        CHECK(std::strtod(format_double(x).c_str(), nullptr) == x);
    CHECK(format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
    CHECK(num(std::numeric_limits<double>::infinity()).is_null());
}

TEST_CASE("potential JSON", "[io]")
{
    const auto v = potential_from_json(json::parse(R"({"kind":"gaussian","g":2,"width":1.5})"));
    CHECK(v.kind() == PotentialKind::gaussian);
    CHECK(v.width() == 1.5);
    const auto t = potential_from_json(json::parse(R"({"kind":"finite_table","table":[[1,0,0.5],[0,2,1.0]]})"));
    CHECK(t({-1, 0}) == 0.5);
    const auto back = potential_from_json(to_json(t));
    CHECK(back.entries() == t.entries());
    CHECK_THROWS_AS(potential_from_json(json::parse(R"({"kind":"gaussian","g":2,"widht":1.5})")), ValidationError);
    CHECK_THROWS_AS(potential_from_json(json::parse(R"({"kind":"yukawa"})")), ValidationError);
    CHECK_THROWS_AS(potential_from_json(json::parse(R"({"kind":"power_law"})")), ValidationError);
}

TEST_CASE("CSV helpers", "[io]")
{
    CsvWriter w({"a", "b", "c"});
    w.cell(1).cell(0.5).cell(std::string("x"));
    w.end_row();
    const auto t = parse_csv(w.str());
    CHECK(t.header == std::vector<std::string>{"a", "b", "c"});
    CHECK(t.rows.size() == 1);
    CHECK(parse_cell(t.rows[0][1]).value() == 0.5);
    CHECK_FALSE(parse_cell("x").has_value());
    CHECK_THROWS_AS(parse_csv("a,b\n1\n"), ValidationError);
    CHECK_THROWS_AS(t.column("z"), ValidationError);
    w.cell(1);
    CHECK_THROWS(w.end_row());
}

TEST_CASE("per-k CSV header", "[io]")
{
    QuadratureSpec q;
    RpaReport rep;
    rep.rpa = e_rpa(build_fermi_system(9), PotentialSpec::gaussian(1.0, 2.0), 2.0, q);
    const auto text = per_k_csv(rep);
    CHECK(text.substr(0, text.find('\n')) == "k1,k2,abs_k,vhat,f_integral,trace_matrix,trace_integral,contribution");
    CHECK(parse_csv(text).rows.size() == rep.rpa.per_k.size());
}

TEST_CASE("SVG output", "[io]")
{
    const std::vector<Series> s{{"one", {{0, 1}, {1, 2}}}, {"two", {{0, 0}, {1, -1}, {2, 3}}}};
    const auto svg = render_svg("x", s);
    std::size_t count = 0;
    for (auto pos = svg.find("<polyline"); pos != std::string::npos; pos = svg.find("<polyline", pos + 1)) ++count;
    CHECK(count == 2);
    CHECK(svg.rfind("</svg>") != std::string::npos);
    CHECK(svg.find("data-series=\"two\"") != std::string::npos);
}

// ---------------------------------------------------------------- cli

TEST_CASE("rpa command with zero potential", "[cli]")
{
    const auto dir = scratch_dir("rpa");
    const auto cfg = dir / "c.json";
    write_file(cfg.string(), R"({"potential":{"kind":"zero"},"shell":2,"kmax":3})");
    REQUIRE(run_cli({"rpa", "--config", cfg.string(), "--out", dir.string()}) == 0);
    const auto j = json::parse(read_file((dir / "report.json").string()));
    CHECK(j["e_rpa"].get<double>() == 0.0);
    CHECK_THAT(j["e_fs"].get<double>(), WithinRel(4.0 / 3.0, 1e-15));
    CHECK(fs::exists(dir / "per_k.csv"));
}

TEST_CASE("sweep command", "[cli]")
{
    const auto dir = scratch_dir("sweep");
    const auto cfg = dir / "c.json";
    write_file(cfg.string(), R"({"potential":{"kind":"gaussian","g":1,"width":2}})");
    REQUIRE(run_cli({"sweep", "--shells", "2,9,25,100", "--config", cfg.string(), "--out", dir.string()}) == 0);
    const auto t = parse_csv(read_file((dir / "sweep.csv").string()));
    REQUIRE(t.rows.size() == 4);
    const auto col = t.column("e_rpa_times_sqrtN");
    const double first = parse_cell(t.rows[0][col]).value();
    for (const auto& row : t.rows) CHECK_THAT(parse_cell(row[col]).value(), WithinRel(first, 1e-12));
}

TEST_CASE("plot command", "[cli]")
{
    const auto dir = scratch_dir("plot");
    write_file((dir / "in.csv").string(), "x,y,z\n0,1,2\n1,3,1\n2,2,0\n");
    REQUIRE(run_cli({"plot", "--input", (dir / "in.csv").string(), "--out", (dir / "p.svg").string()}) == 0);
    const auto svg = read_file((dir / "p.svg").string());
    std::size_t count = 0;
    for (auto pos = svg.find("<polyline"); pos != std::string::npos; pos = svg.find("<polyline", pos + 1)) ++count;
    CHECK(count == 2);
}

TEST_CASE("other commands", "[cli]")
{
    const auto dir = scratch_dir("misc");
    const auto cfg = dir / "c.json";
    write_file(cfg.string(),
               R"({"potential":{"kind":"gaussian","g":1,"width":2},"shell":400,"M":8,"R":1.5,)"
               R"("ed":{"mode_cutoff":2,"n_particles":5},"trace_check":{"blocks":10},)"
               R"("oracle":{"k_samples":3,"r2_nmax":1000}})");
    const auto c = cfg.string(), o = dir.string();
    CHECK(run_cli({"patches", "--config", c, "--out", o}) == 0);
    CHECK(fs::exists(dir / "patches.json"));
    CHECK(fs::exists(dir / "pair_counts.csv"));
    CHECK(run_cli({"trace-check", "--config", c, "--out", o}) == 0);
    CHECK(fs::exists(dir / "trace_check.csv"));
    CHECK(run_cli({"oracle", "--config", c, "--out", o, "--shells", "9,25"}) == 0);
    CHECK(fs::exists(dir / "oracle.json"));
    CHECK(run_cli({"ed", "--config", c, "--out", o}) == 0);
    const auto ed = json::parse(read_file((dir / "ed.json").string()));
    CHECK(ed["label"] == "qualitative");
    CHECK(ed["e0"].get<double>() <= ed["fs_expectation"].get<double>());
}

TEST_CASE("CLI errors", "[cli]")
{
    const auto dir = scratch_dir("err");
    const auto cfg = dir / "c.json";
    write_file(cfg.string(), R"({"potential":{"kind":"zero"},"shell":2,"bogus":1})");
    CHECK(run_cli({"rpa", "--config", cfg.string(), "--out", dir.string()}) == 2);
    write_file(cfg.string(), R"({"potential":{"kind":"zero"},"shell":2})");
    CHECK(run_cli({"rpa", "--config", cfg.string(), "--out", (dir / "missing").string()}) == 2);
    CHECK(run_cli({"rpa", "--config", (dir / "nope.json").string(), "--out", dir.string()}) == 2);
    write_file(cfg.string(), "{not json");
    CHECK(run_cli({"rpa", "--config", cfg.string(), "--out", dir.string()}) == 2);
    CHECK(run_cli({"frobnicate"}) == 2);
    write_file(cfg.string(), R"({"potential":{"kind":"constant","g":1},"shell":2})");
    CHECK(run_cli({"rpa", "--config", cfg.string(), "--out", dir.string()}) == 2);
}

TEST_CASE("thread count does not change results", "[cli]")
{
    const auto dir = scratch_dir("threads");
    const auto cfg = dir / "c.json";
    write_file(cfg.string(), R"({"potential":{"kind":"gaussian","g":1,"width":2},"shell":400,"M":8,"R":1.5})");
    fs::create_directories(dir / "a");
    fs::create_directories(dir / "b");
    REQUIRE(run_cli({"rpa", "--config", cfg.string(), "--out", (dir / "a").string(), "--threads", "1"}) == 0);
    REQUIRE(run_cli({"rpa", "--config", cfg.string(), "--out", (dir / "b").string(), "--threads", "3"}) == 0);
    CHECK(read_file((dir / "a" / "report.json").string()) == read_file((dir / "b" / "report.json").string()));
    CHECK(read_file((dir / "a" / "per_k.csv").string()) == read_file((dir / "b" / "per_k.csv").string()));
}
