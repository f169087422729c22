#pragma once

// Command-line driver: rpa, sweep, patches, trace-check, oracle, ed, plot.
// Exit codes: 0 success, 2 invalid input, 3 numeric failure, 1 anything else.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fermi2d/ed.hpp"
#include "fermi2d/io.hpp"
#include "fermi2d/numtheory.hpp"
#include "fermi2d/patches.hpp"
#include "fermi2d/quasiboson.hpp"
#include "fermi2d/rpa.hpp"

namespace fermi2d::cli {

struct Flags {
    std::optional<std::string> config;
    std::string out = ".";
    std::optional<unsigned> threads;
    std::optional<std::uint64_t> seed;
    std::vector<std::int64_t> shells;
    std::optional<int> M;
    std::optional<double> R;
    std::optional<double> delta;
    std::optional<double> kmax;
    // plot
    std::string input;
    std::string x_column;
    std::vector<std::string> y_columns;
};

/// Validated run configuration; flags override the config file.
struct RunConfig {
    PotentialSpec potential = PotentialSpec::zero();
    std::vector<std::int64_t> shells;
    std::optional<int> M;     // nullopt: no patch decomposition
    bool M_auto = false;      // 2 round(N^{1/4}), even
    std::optional<double> R;
    bool R_auto = false;      // max(1.5, N^{1/10})
    double delta = 0.02;
    std::optional<double> kmax; // nullopt: derived from the potential
    QuadratureSpec quad;
    ConstraintThresholds thresholds;
    unsigned threads = 1;
    std::uint64_t seed = 12345;
    json ed = json::object();
    json oracle = json::object();
    json trace_check = json::object();

    bool has_patches() const { return (M || M_auto) && (R || R_auto); }
    int patch_M(const FermiSystem& sys) const
    {
        if (M) return *M;
        const int m = 2 * static_cast<int>(std::lround(std::pow(static_cast<double>(sys.N), 0.25)));
        return std::max(2, m);
    }
    double patch_R(const FermiSystem& sys) const
    {
        return R ? *R : std::max(1.5, std::pow(static_cast<double>(sys.N), 0.1));
    }
};

inline RunConfig load_config(const Flags& f)
{
    RunConfig c;
    json j = json::object();
    if (f.config) {
        try {
            j = json::parse(read_file(*f.config));
        } catch (const json::parse_error& e) {
            throw ValidationError("config: " + std::string(e.what()));
        }
    }
    const std::string where = "config";
    check_keys(j,
               {"potential", "shell", "shells", "M", "R", "delta", "kmax", "quad", "thresholds", "threads", "seed", "ed",
                "oracle", "trace_check"},
               where);
    try {
        if (j.contains("potential")) c.potential = potential_from_json(j["potential"]);
        if (j.contains("shell")) c.shells = {j["shell"].get<std::int64_t>()};
        if (j.contains("shells")) c.shells = j["shells"].get<std::vector<std::int64_t>>();
        if (j.contains("M")) {
            if (j["M"] == "auto")
                c.M_auto = true;
            else
                c.M = j["M"].get<int>();
        }
        if (j.contains("R")) {
            if (j["R"] == "auto")
                c.R_auto = true;
            else
                c.R = get_number(j, "R", where);
        }
        if (j.contains("delta")) c.delta = get_number(j, "delta", where);
        if (j.contains("kmax") && j["kmax"] != "auto") c.kmax = get_number(j, "kmax", where);
        if (j.contains("quad")) c.quad = quadrature_from_json(j["quad"]);
        if (j.contains("thresholds")) {
            check_keys(j["thresholds"], {"lo", "hi"}, "thresholds");
            if (j["thresholds"].contains("lo")) c.thresholds.lo = get_number(j["thresholds"], "lo", "thresholds");
            if (j["thresholds"].contains("hi")) c.thresholds.hi = get_number(j["thresholds"], "hi", "thresholds");
        }
        if (j.contains("threads")) c.threads = j["threads"].get<unsigned>();
        if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("ed")) c.ed = j["ed"];
        if (j.contains("oracle")) c.oracle = j["oracle"];
        if (j.contains("trace_check")) c.trace_check = j["trace_check"];
    } catch (const json::exception& e) {
        throw ValidationError("config: " + std::string(e.what()));
    }

    if (const char* env = std::getenv("FERMI2D_THREADS"); env && *env) {
        try {
            c.threads = static_cast<unsigned>(std::stoul(env));
        } catch (const std::exception&) {
            throw ValidationError("FERMI2D_THREADS must be a non-negative integer");
        }
    }
    if (f.threads) c.threads = *f.threads;
    if (c.threads == 0) c.threads = 1;
    if (f.seed) c.seed = *f.seed;
    if (!f.shells.empty()) c.shells = f.shells;
    if (f.M) {
        c.M = *f.M;
        c.M_auto = false;
    }
    if (f.R) {
        c.R = *f.R;
        c.R_auto = false;
    }
    if (f.delta) c.delta = *f.delta;
    if (f.kmax) c.kmax = *f.kmax;
    for (auto s : c.shells)
        if (s < 0) throw ValidationError("config: shells must be >= 0");
    return c;
}

inline std::int64_t single_shell(const RunConfig& c)
{
    if (c.shells.size() != 1) throw ValidationError("exactly one shell is required (config 'shell' or --shells N)");
    return c.shells.front();
}

inline double resolve_kmax(const RunConfig& c)
{
    if (c.kmax) return *c.kmax;
    const auto k = auto_kmax(c.potential);
    if (!k) throw ValidationError("kmax must be given for this potential (no finite automatic cutoff)");
    return *k;
}

inline std::string out_path(const Flags& f, const std::string& name)
{
    return (std::filesystem::path(f.out) / name).string();
}

inline void require_out_dir(const Flags& f)
{
    if (!std::filesystem::is_directory(f.out)) throw ValidationError("output directory '" + f.out + "' does not exist");
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

inline int cmd_rpa(const Flags& f, const RunConfig& c)
{
    require_out_dir(f);
    const auto sys = build_fermi_system(single_shell(c));
    const double kmax = resolve_kmax(c);
    std::optional<PatchDecomposition> decomp;
    if (c.has_patches()) decomp = build_patches(sys, c.patch_M(sys), c.patch_R(sys), c.delta, c.thresholds);
    const auto rep = rpa_report(sys, c.potential, kmax, c.quad, decomp ? &*decomp : nullptr, c.threads);
    json j = to_json(rep);
    j["potential"] = to_json(c.potential);
    j["quad"] = to_json(c.quad);
    if (decomp) j["patches"] = to_json(*decomp);
    write_file(out_path(f, "report.json"), dump(j));
    write_file(out_path(f, "per_k.csv"), per_k_csv(rep));
    std::cout << "rpa: N=" << rep.N << " e_fs=" << format_double(rep.e_fs) << " e_rpa=" << format_double(rep.rpa.e_rpa)
              << " tail_bound=" << format_double(rep.rpa.tail_bound);
    if (rep.patch_trace) std::cout << " patch_trace=" << format_double(rep.patch_trace->value);
    std::cout << "\n";
    return 0;
}

inline int cmd_sweep(const Flags& f, const RunConfig& c)
{
    require_out_dir(f);
    if (c.shells.empty()) throw ValidationError("sweep needs a shell sequence (config 'shells' or --shells)");
    const double kmax = resolve_kmax(c);
    CsvWriter w({"shell", "N", "kf_sq", "e_fs", "e_rpa", "e_rpa_tail_bound", "e_rpa_times_sqrtN", "M", "R",
                 "patch_trace", "e_rpa_truncated", "patch_ratio"});
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (auto shell : c.shells) {
        const auto sys = build_fermi_system(shell);
        std::optional<PatchDecomposition> decomp;
        if (c.has_patches()) decomp = build_patches(sys, c.patch_M(sys), c.patch_R(sys), c.delta, c.thresholds);
        const auto rep = rpa_report(sys, c.potential, kmax, c.quad, decomp ? &*decomp : nullptr, c.threads);
        const double nan = std::numeric_limits<double>::quiet_NaN();
        w.cell(sys.shell_max).cell(sys.N).cell(sys.kf_sq()).cell(rep.e_fs).cell(rep.rpa.e_rpa).cell(rep.rpa.tail_bound);
        w.cell(rep.e_rpa_times_sqrt_n);
        w.cell(decomp ? double(decomp->M) : nan).cell(decomp ? decomp->R : nan);
        w.cell(rep.patch_trace ? rep.patch_trace->value : nan);
        w.cell(rep.e_rpa_truncated ? *rep.e_rpa_truncated : nan);
        w.cell(rep.patch_over_truncated ? *rep.patch_over_truncated : nan);
        w.end_row();
        lo = std::min(lo, rep.e_rpa_times_sqrt_n);
        hi = std::max(hi, rep.e_rpa_times_sqrt_n);
    }
    write_file(out_path(f, "sweep.csv"), w.str());
    const double spread = (hi - lo) / std::max(std::fabs(hi), std::fabs(lo));
    std::cout << "sweep: " << c.shells.size() << " systems, e_rpa*sqrt(N) relative spread "
              << format_double(std::isfinite(spread) ? spread : 0.0) << "\n";
    return 0;
}

inline int cmd_patches(const Flags& f, const RunConfig& c)
{
    require_out_dir(f);
    const auto sys = build_fermi_system(single_shell(c));
    if (!c.has_patches()) throw ValidationError("patches needs M and R (config or --M/--R)");
    const auto d = build_patches(sys, c.patch_M(sys), c.patch_R(sys), c.delta, c.thresholds);
    const auto ks = gamma_nor(d);
    CsvWriter w({"k1", "k2", "alpha", "set", "n_sq", "predicted", "rel_dev"});
    json blocks = json::array();
    const auto results = parallel_map<std::optional<KBlock>>(ks.size(), c.threads, [&](std::size_t i) {
        auto blk = assemble_block(sys, d, c.potential, ks[i]);
        if (blk) compute_chain(*blk);
        return blk;
    });
    double worst = 0.0;
    for (std::size_t i = 0; i < ks.size(); ++i) {
        const auto sets = index_sets(d, ks[i]);
        for (const auto& pc : count_pairs_indexed(sys, d, ks[i])) {
            const bool plus = std::find(sets.plus.begin(), sets.plus.end(), pc.alpha) != sets.plus.end();
            w.cell(pc.k.k1).cell(pc.k.k2).cell(pc.alpha).cell(std::string(plus ? "plus" : "minus"));
            w.cell(pc.n_sq).cell(pc.predicted).cell(pc.rel_dev);
            w.end_row();
            worst = std::max(worst, std::fabs(pc.rel_dev));
        }
        if (results[i])
            blocks.push_back(block_debug_json(*results[i]));
        else
            blocks.push_back({{"k", to_json(ks[i])}, {"skipped", true}});
    }
    json j{{"N", sys.N}, {"kf_sq", sys.kf_sq()}, {"decomposition", to_json(d)}, {"blocks", blocks},
           {"guard_band_hits", guard_band_hits(d)},
           {"potential", to_json(c.potential)}};
    write_file(out_path(f, "patches.json"), dump(j));
    write_file(out_path(f, "pair_counts.csv"), w.str());
    std::cout << "patches: N=" << sys.N << " M=" << d.M << " R=" << format_double(d.R) << " |Gamma_nor|=" << ks.size()
              << " max|n^2/pred-1|=" << format_double(worst) << (d.constraints.ok ? "" : " (constraint warnings)")
              << "\n";
    return 0;
}

inline int cmd_trace_check(const Flags& f, const RunConfig& c)
{
    require_out_dir(f);
    const auto& t = c.trace_check;
    check_keys(t, {"blocks", "min_half_dim", "max_half_dim", "g_max", "u_max", "v_max"}, "trace_check");
    RandomBlockParams p;
    int count = 100;
    try {
        if (t.contains("blocks")) count = t["blocks"].get<int>();
        if (t.contains("min_half_dim")) p.min_half_dim = t["min_half_dim"].get<int>();
        if (t.contains("max_half_dim")) p.max_half_dim = t["max_half_dim"].get<int>();
        if (t.contains("g_max")) p.g_max = t["g_max"].get<double>();
        if (t.contains("u_max")) p.u_max = t["u_max"].get<double>();
        if (t.contains("v_max")) p.v_max = t["v_max"].get<double>();
    } catch (const json::exception& e) {
        throw ValidationError("trace_check: " + std::string(e.what()));
    }
    if (count < 1 || p.min_half_dim < 1 || p.max_half_dim < p.min_half_dim)
        throw ValidationError("trace_check: invalid block counts or dimensions");

    std::mt19937_64 rng(c.seed);
    std::vector<KBlock> blocks;
    for (int i = 0; i < count; ++i) blocks.push_back(random_block(rng, p));
    const auto traces = parallel_map<TraceRoutes>(blocks.size(), c.threads, [&](std::size_t i) {
        compute_chain(blocks[i]);
        return trace_edw(blocks[i], c.quad);
    });
    CsvWriter w({"block", "dim", "g", "matrix_route", "integral_route", "rel_diff", "diag_residual", "ueu_residual",
                 "otilde_residual", "e_poly_residual", "ptilde_minus_d_min_eig"});
    double worst_trace = 0, worst_diag = 0, worst_ueu = 0, worst_otilde = 0, min_eig = 0;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        const auto& b = blocks[i];
        const auto& r = b.residuals;
        const double diff =
            std::fabs(traces[i].matrix_route - traces[i].integral_route) / (1.0 + std::fabs(traces[i].matrix_route));
        w.cell(i).cell(static_cast<std::int64_t>(b.dim())).cell(b.g).cell(traces[i].matrix_route);
        w.cell(traces[i].integral_route).cell(diff).cell(r.diag_residual).cell(r.ueu_residual);
        w.cell(r.otilde_residual).cell(r.e_poly_residual).cell(r.ptilde_minus_d_min_eig);
        w.end_row();
        worst_trace = std::max(worst_trace, diff);
        worst_diag = std::max(worst_diag, r.diag_residual);
        worst_ueu = std::max(worst_ueu, r.ueu_residual);
        worst_otilde = std::max(worst_otilde, r.otilde_residual);
        min_eig = std::min(min_eig, r.ptilde_minus_d_min_eig);
    }
    json j{{"blocks", count},
           {"seed", c.seed},
           {"max_trace_rel_diff", num(worst_trace)},
           {"max_diag_residual", num(worst_diag)},
           {"max_ueu_residual", num(worst_ueu)},
           {"max_otilde_residual", num(worst_otilde)},
           {"min_ptilde_minus_d_eig", num(min_eig)}};
    write_file(out_path(f, "trace_check.csv"), w.str());
    write_file(out_path(f, "trace_check.json"), dump(j));
    std::cout << "trace-check: " << count << " blocks, max route difference " << format_double(worst_trace)
              << ", max diag residual " << format_double(worst_diag) << "\n";
    return 0;
}

inline int cmd_oracle(const Flags& f, const RunConfig& c)
{
    require_out_dir(f);
    const auto& o = c.oracle;
    check_keys(o, {"k_samples", "r2_nmax", "alphas", "deltas", "radius_factor"}, "oracle");
    std::size_t k_samples = 20;
    std::int64_t r2_nmax = 100000;
    std::vector<double> alphas{0.1, 0.25, 0.4}, deltas{0.1, 0.25, 0.5};
    double radius_factor = std::sqrt(2.0);
    try {
        if (o.contains("k_samples")) k_samples = o["k_samples"].get<std::size_t>();
        if (o.contains("r2_nmax")) r2_nmax = o["r2_nmax"].get<std::int64_t>();
        if (o.contains("alphas")) alphas = o["alphas"].get<std::vector<double>>();
        if (o.contains("deltas")) deltas = o["deltas"].get<std::vector<double>>();
        if (o.contains("radius_factor")) radius_factor = o["radius_factor"].get<double>();
    } catch (const json::exception& e) {
        throw ValidationError("oracle: " + std::string(e.what()));
    }
    if (c.shells.empty()) throw ValidationError("oracle needs a shell sequence (config 'shells' or --shells)");

    json lune = json::array(), excit = json::array(), gaps = json::array(), annulus = json::array();
    for (auto shell : c.shells) {
        const auto sys = build_fermi_system(shell);
        for (auto k : spread_k(sys.kf(), k_samples)) lune.push_back(to_json(lune_inverse_energy_sum(sys, k)));
        excit.push_back(to_json(inverse_excitation_sum(sys, radius_factor)));
        for (double d : deltas) gaps.push_back(to_json(gap_set_report(sys, d)));
    }
    for (double a : alphas)
        for (const auto& r : annulus_bound_report(a, c.shells, k_samples)) annulus.push_back(to_json(r));
    const auto growth = r2_growth(r2_nmax);
    json decades = json::array();
    for (const auto& d : growth.decades)
        decades.push_back({{"lo", d.lo}, {"hi", d.hi}, {"max_ratio", num(d.max_ratio)}, {"argmax", d.argmax}});
    json j{{"lune_inverse_energy_sum", lune},
           {"inverse_excitation_sum", excit},
           {"gap_set", gaps},
           {"annulus_intersection", annulus},
           {"r2_growth",
            {{"nmax", growth.nmax},
             {"max_ratio", num(growth.max_ratio)},
             {"argmax", growth.argmax},
             {"decades", decades},
             {"decades_nonincreasing", growth.decades_nonincreasing}}}};
    write_file(out_path(f, "oracle.json"), dump(j));
    std::cout << "oracle: " << c.shells.size() << " systems, " << lune.size() << " lune sums, r2 max ratio "
              << format_double(growth.max_ratio) << " at n=" << growth.argmax << "\n";
    return 0;
}

inline int cmd_ed(const Flags& f, const RunConfig& c)
{
    require_out_dir(f);
    const auto& e = c.ed;
    check_keys(e, {"mode_cutoff", "n_particles", "sector", "all_sectors", "max_dense", "max_sparse"}, "ed");
    EdModel m;
    bool all = false;
    try {
        m.mode_cutoff = e.value("mode_cutoff", std::int64_t{2});
        m.n_particles = e.value("n_particles", 5);
        if (e.contains("sector")) {
            const auto s = e["sector"].get<std::vector<std::int64_t>>();
            if (s.size() != 2) throw ValidationError("ed: sector must be [k1, k2]");
            m.total_momentum = {s[0], s[1]};
        }
        all = e.value("all_sectors", false);
        m.max_dense = e.value("max_dense", m.max_dense);
        m.max_sparse = e.value("max_sparse", m.max_sparse);
    } catch (const json::exception& ex) {
        throw ValidationError("ed: " + std::string(ex.what()));
    }
    m.potential = c.potential;
    LanczosOptions opt;
    opt.seed = c.seed;
    LatticeVec sector = m.total_momentum;
    EdResult r;
    if (all)
        std::tie(sector, r) = ground_energy_all_sectors(m, c.threads, opt);
    else
        r = ground_energy(m, c.threads, opt);
    json j{{"label", "qualitative"},
           {"mode_cutoff", m.mode_cutoff},
           {"n_particles", m.n_particles},
           {"sector", to_json(sector)},
           {"potential", to_json(m.potential)},
           {"dim", r.dim},
           {"e0", num(r.e0)},
           {"fs_expectation", num(r.fs_expectation)},
           {"e_fs_formula", num(r.e_fs_formula)},
           {"residual", num(r.residual)},
           {"lanczos_iters", r.lanczos_iters},
           {"method", r.method}};
    if (std::isfinite(r.fs_expectation)) j["e0_minus_fs"] = num(r.e0 - r.fs_expectation);
    write_file(out_path(f, "ed.json"), dump(j));
    std::cout << "ed: dim=" << r.dim << " e0=" << format_double(r.e0) << " fs=" << format_double(r.fs_expectation)
              << " (" << r.method << ", qualitative)\n";
    return 0;
}

inline int cmd_plot(const Flags& f)
{
    if (f.input.empty()) throw ValidationError("plot needs --input CSV");
    const auto table = parse_csv(read_file(f.input));
    const std::size_t xc = f.x_column.empty() ? 0 : table.column(f.x_column);
    std::vector<std::size_t> ycols;
    if (!f.y_columns.empty()) {
        for (const auto& name : f.y_columns) ycols.push_back(table.column(name));
    } else {
        for (std::size_t i = 0; i < table.header.size(); ++i) {
            if (i == xc) continue;
            bool numeric = false;
            for (const auto& row : table.rows)
                if (auto v = parse_cell(row[i]); v && std::isfinite(*v)) numeric = true;
            if (numeric) ycols.push_back(i);
        }
    }
    std::vector<Series> series;
    for (auto yc : ycols) {
        Series s{table.header[yc], {}};
        for (const auto& row : table.rows) {
            const auto x = parse_cell(row[xc]);
            const auto y = parse_cell(row[yc]);
            if (x && y && std::isfinite(*x) && std::isfinite(*y)) s.points.emplace_back(*x, *y);
        }
        series.push_back(std::move(s));
    }
    const auto parent = std::filesystem::path(f.out).parent_path();
    if (!parent.empty() && !std::filesystem::is_directory(parent))
        throw ValidationError("output directory '" + parent.string() + "' does not exist");
    write_file(f.out, render_svg(table.header[xc], series));
    std::cout << "plot: " << series.size() << " series from " << table.rows.size() << " rows -> " << f.out << "\n";
    return 0;
}

inline int run(int argc, char** argv)
{
    CLI::App app{"fermi2d: RPA correlation energy and patch bosonization of the 2D mean-field Fermi gas"};
    app.require_subcommand(1);
    Flags f;
    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", f.config, "JSON configuration file");
        sub->add_option("--out", f.out, "output directory (must exist)")->capture_default_str();
        sub->add_option("--threads", f.threads, "worker threads (fallback: FERMI2D_THREADS, then config, then 1)");
        sub->add_option("--seed", f.seed, "random seed (default 12345)");
        sub->add_option("--shells", f.shells, "filled shells |k|^2 <= n, comma separated")->delimiter(',');
        sub->add_option("--M", f.M, "number of patches (even)");
        sub->add_option("--R", f.R, "patch cutoff radius");
        sub->add_option("--delta", f.delta, "belt exponent delta (default 0.02)");
        sub->add_option("--kmax", f.kmax, "lattice cutoff of the k-sum (default: derived from the potential)");
    };
    std::vector<std::pair<std::string, CLI::App*>> subs;
    for (const char* name : {"rpa", "sweep", "patches", "trace-check", "oracle", "ed"}) {
        auto* sub = app.add_subcommand(name);
        common(sub);
        subs.emplace_back(name, sub);
    }
    subs[0].second->description("E_FS, E_RPA with tail bound, per-k table; patch trace when M and R are set");
    subs[1].second->description("RPA quantities along a shell sequence");
    subs[2].second->description("patch decomposition, pair counts and block diagnostics");
    subs[3].second->description("matrix vs integral route of Tr(E-D-W) on seeded random blocks");
    subs[4].second->description("brute-force lattice counting oracles");
    subs[5].second->description("exact diagonalization on a truncated mode set (qualitative)");
    auto* plot = app.add_subcommand("plot", "SVG line plot of a CSV file, one polyline per column");
    plot->add_option("--input", f.input, "input CSV")->required();
    plot->add_option("--out", f.out, "output SVG path")->required();
    plot->add_option("--x", f.x_column, "x column (default: first column)");
    plot->add_option("--y", f.y_columns, "y columns (default: all numeric columns)")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (plot->parsed()) return cmd_plot(f);
        const RunConfig c = load_config(f);
        for (const auto& [name, sub] : subs) {
            if (!sub->parsed()) continue;
            if (name == "rpa") return cmd_rpa(f, c);
            if (name == "sweep") return cmd_sweep(f, c);
            if (name == "patches") return cmd_patches(f, c);
            if (name == "trace-check") return cmd_trace_check(f, c);
            if (name == "oracle") return cmd_oracle(f, c);
            if (name == "ed") return cmd_ed(f, c);
        }
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

} // namespace fermi2d::cli
