#pragma once

// JSON/CSV/SVG serialization. Doubles in CSV are written with 17 significant
// digits; JSON uses the shortest representation that round-trips. Non-finite
// values become "nan"/"inf" in CSV and null in JSON.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fermi2d/common.hpp"
#include "fermi2d/lattice.hpp"
#include "fermi2d/numtheory.hpp"
#include "fermi2d/patches.hpp"
#include "fermi2d/potential.hpp"
#include "fermi2d/quadrature.hpp"
#include "fermi2d/quasiboson.hpp"
#include "fermi2d/rpa.hpp"

namespace fermi2d {

using json = nlohmann::json;

inline std::string format_double(double x)
{
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

/// Rejects keys of `obj` outside `allowed`.
inline void check_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where)
{
    if (!obj.is_object()) throw ValidationError(where + ": expected an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, _] : obj.items())
        if (!ok.count(key)) throw ValidationError(where + ": unknown key '" + key + "'");
}

inline double get_number(const json& obj, const char* key, const std::string& where)
{
    const auto& v = obj.at(key);
    if (!v.is_number()) throw ValidationError(where + ": '" + key + "' must be a number");
    return v.get<double>();
}

inline PotentialSpec potential_from_json(const json& j)
{
    const std::string where = "potential";
    check_keys(j, {"kind", "g", "s", "width", "table"}, where);
    if (!j.contains("kind") || !j["kind"].is_string()) throw ValidationError(where + ": 'kind' is required");
    const auto kind = potential_kind_from_string(j["kind"].get<std::string>());
    auto g = [&] { return j.contains("g") ? get_number(j, "g", where) : 1.0; };
    switch (kind) {
    case PotentialKind::zero: return PotentialSpec::zero();
    case PotentialKind::constant: return PotentialSpec::constant(g());
    case PotentialKind::power_law:
        if (!j.contains("s")) throw ValidationError(where + ": power_law needs 's'");
        return PotentialSpec::power_law(g(), get_number(j, "s", where));
    case PotentialKind::gaussian:
        if (!j.contains("width")) throw ValidationError(where + ": gaussian needs 'width'");
        return PotentialSpec::gaussian(g(), get_number(j, "width", where));
    case PotentialKind::finite_table: {
        if (!j.contains("table") || !j["table"].is_array()) throw ValidationError(where + ": finite_table needs 'table'");
        std::vector<std::pair<LatticeVec, double>> entries;
        for (const auto& row : j["table"]) {
            if (!row.is_array() || row.size() != 3 || !row[0].is_number_integer() || !row[1].is_number_integer() ||
                !row[2].is_number())
                throw ValidationError(where + ": table rows must be [k1, k2, value]");
            entries.push_back({{row[0].get<std::int64_t>(), row[1].get<std::int64_t>()}, row[2].get<double>()});
        }
        return PotentialSpec::table(entries);
    }
    }
    throw ValidationError(where + ": unsupported kind");
}

inline json to_json(const PotentialSpec& v)
{
    json j;
    j["kind"] = std::string(to_string(v.kind()));
    switch (v.kind()) {
    case PotentialKind::zero: break;
    case PotentialKind::constant: j["g"] = v.coupling(); break;
    case PotentialKind::power_law:
        j["g"] = v.coupling();
        j["s"] = v.exponent();
        break;
    case PotentialKind::gaussian:
        j["g"] = v.coupling();
        j["width"] = v.width();
        break;
    case PotentialKind::finite_table: {
        json rows = json::array();
        for (const auto& [k, val] : v.entries()) rows.push_back({k.k1, k.k2, val});
        j["table"] = rows;
        break;
    }
    }
    return j;
}

inline QuadratureSpec quadrature_from_json(const json& j)
{
    const std::string where = "quad";
    check_keys(j, {"abs_tol", "rel_tol", "lambda_split", "max_depth", "max_intervals"}, where);
    QuadratureSpec q;
    if (j.contains("abs_tol")) q.abs_tol = get_number(j, "abs_tol", where);
    if (j.contains("rel_tol")) q.rel_tol = get_number(j, "rel_tol", where);
    if (j.contains("lambda_split")) q.lambda_split = get_number(j, "lambda_split", where);
    if (j.contains("max_depth")) q.max_depth = j.at("max_depth").get<int>();
    if (j.contains("max_intervals")) q.max_intervals = j.at("max_intervals").get<int>();
    q.validate();
    return q;
}

inline json to_json(const QuadratureSpec& q)
{
    return {{"abs_tol", q.abs_tol},
            {"rel_tol", q.rel_tol},
            {"lambda_split", q.lambda_split},
            {"max_depth", q.max_depth},
            {"max_intervals", q.max_intervals}};
}

inline json to_json(LatticeVec k) { return json::array({k.k1, k.k2}); }

inline json to_json(const BoundReport& r)
{
    json p = json::object();
    for (const auto& [key, val] : r.parameters) p[key] = num(val);
    return {{"label", r.label},
            {"lhs", num(r.lhs)},
            {"bound_shape", num(r.bound_shape)},
            {"measured_constant", num(r.measured_constant)},
            {"parameters", p}};
}

inline json to_json(const ResidualReport& r)
{
    return {{"diag_residual", num(r.diag_residual)},
            {"ueu_residual", num(r.ueu_residual)},
            {"e_poly_residual", num(r.e_poly_residual)},
            {"otilde_residual", num(r.otilde_residual)},
            {"ptilde_minus_d_min_eig", num(r.ptilde_minus_d_min_eig)},
            {"o_orthogonality", num(r.o_orthogonality)},
            {"otilde_orthogonality", num(r.otilde_orthogonality)},
            {"k_symmetry", num(r.k_symmetry)},
            {"k_hs_ratio", num(r.k_hs_ratio)},
            {"k_entry_ratio", num(r.k_entry_ratio)}};
}

/// Debug dump of a block: k, dimensions, index sets and residuals.
inline json block_debug_json(const KBlock& blk)
{
    json j{{"k", to_json(blk.k)},
           {"dim", blk.dim()},
           {"i_plus", blk.i_plus},
           {"i_minus", blk.i_minus},
           {"vhat", num(blk.vhat)},
           {"g", num(blk.g)}};
    if (blk.chain_done) j["residuals"] = to_json(blk.residuals);
    return j;
}

inline json to_json(const ConstraintReport& c)
{
    return {{"ratio_lower", num(c.ratio_lower)}, {"ratio_upper", num(c.ratio_upper)}, {"trivial_R", num(c.trivial_R)},
            {"trivial_M", num(c.trivial_M)},     {"ok", c.ok},                         {"warnings", c.warnings}};
}

inline json to_json(const PatchDecomposition& d)
{
    return {{"M", d.M},
            {"R", d.R},
            {"delta", d.delta},
            {"kf", d.kf},
            {"N", d.N},
            {"arc_angle", d.arc_angle},
            {"corridor_angle", d.corridor_angle},
            {"patch_angle", d.patch_angle},
            {"belt", d.belt},
            {"constraints", to_json(d.constraints)}};
}

inline json to_json(const RpaReport& r)
{
    json j{{"N", r.N},
           {"kf_sq", r.kf_sq},
           {"e_fs", num(r.e_fs)},
           {"e_rpa", num(r.rpa.e_rpa)},
           {"e_rpa_tail_bound", num(r.rpa.tail_bound)},
           {"e_rpa_lattice_tail_bound", num(r.rpa.lattice_tail)},
           {"e_rpa_lambda_tail_bound", num(r.rpa.lambda_tail)},
           {"kmax", r.rpa.kmax},
           {"per_k_count", r.rpa.per_k.size()},
           {"warnings", r.rpa.warnings}};
    json ratios{{"e_rpa_times_sqrtN", num(r.e_rpa_times_sqrt_n)}};
    if (r.patch_trace) {
        j["patch_trace"] = num(r.patch_trace->value);
        j["patch_trace_blocks"] = r.patch_trace->terms.size();
        json skipped = json::array();
        for (auto k : r.patch_trace->skipped) skipped.push_back(to_json(k));
        j["patch_trace_skipped"] = skipped;
    }
    if (r.e_rpa_truncated) j["e_rpa_truncated"] = num(*r.e_rpa_truncated);
    if (r.patch_over_truncated) ratios["patch_trace_over_e_rpa_truncated"] = num(*r.patch_over_truncated);
    j["ratios"] = ratios;
    return j;
}

/// Minimal CSV writer with an exact header.
class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header) : width_(header.size())
    {
        write_row(header);
    }

    CsvWriter& cell(double x) { return raw(format_double(x)); }
    CsvWriter& cell(std::int64_t x) { return raw(std::to_string(x)); }
    CsvWriter& cell(int x) { return raw(std::to_string(x)); }
    CsvWriter& cell(std::size_t x) { return raw(std::to_string(x)); }
    CsvWriter& cell(const std::string& s) { return raw(s); }

    void end_row()
    {
        if (row_.size() != width_) throw std::logic_error("CsvWriter: row width does not match header");
        write_row(row_);
        row_.clear();
    }

    std::string str() const { return out_.str(); }

private:
    CsvWriter& raw(std::string s)
    {
        row_.push_back(std::move(s));
        return *this;
    }
    void write_row(const std::vector<std::string>& cells)
    {
        for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
        out_ << '\n';
    }

    std::size_t width_;
    std::vector<std::string> row_;
    std::ostringstream out_;
};

inline std::string per_k_csv(const RpaReport& r)
{
    CsvWriter w({"k1", "k2", "abs_k", "vhat", "f_integral", "trace_matrix", "trace_integral", "contribution"});
    for (const auto& row : r.rpa.per_k) {
        w.cell(row.k.k1).cell(row.k.k2).cell(row.k.norm()).cell(row.vhat).cell(row.f_integral);
        w.cell(row.trace_matrix).cell(row.trace_integral).cell(row.contribution);
        w.end_row();
    }
    return w.str();
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(const std::string& name) const
    {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) throw ValidationError("csv: no column '" + name + "'");
        return static_cast<std::size_t>(it - header.begin());
    }
};

inline std::vector<std::string> split_csv_line(const std::string& line)
{
    std::vector<std::string> cells;
    std::string cur;
    std::istringstream in(line);
    while (std::getline(in, cur, ',')) cells.push_back(cur);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

inline CsvTable parse_csv(const std::string& text)
{
    CsvTable t;
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw ValidationError("csv: empty input");
    t.header = split_csv_line(line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto cells = split_csv_line(line);
        if (cells.size() != t.header.size()) throw ValidationError("csv: ragged row");
        t.rows.push_back(std::move(cells));
    }
    return t;
}

/// Parses a CSV cell as a double; nullopt for empty or non-numeric cells.
inline std::optional<double> parse_cell(const std::string& s)
{
    if (s.empty()) return std::nullopt;
    char* end = nullptr;
    const double x = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size()) return std::nullopt;
    return x;
}

struct Series {
    std::string name;
    std::vector<std::pair<double, double>> points;
};

/// Line plot: one polyline per series, linear axes, fixed palette.
inline std::string render_svg(const std::string& x_label, const std::vector<Series>& series)
{
    constexpr double W = 640, H = 400, L = 70, Rm = 150, T = 20, B = 50;
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
    for (const auto& s : series)
        for (auto [x, y] : s.points) {
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
    if (!std::isfinite(xmin)) xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    if (xmax == xmin) xmax = xmin + 1;
    if (ymax == ymin) ymax = ymin + 1;
    auto sx = [&](double x) { return L + (x - xmin) / (xmax - xmin) * (W - L - Rm); };
    auto sy = [&](double y) { return H - B - (y - ymin) / (ymax - ymin) * (H - T - B); };
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

    std::ostringstream o;
    o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
      << ' ' << H << "\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - Rm << "\" y2=\"" << H - B
      << "\" stroke=\"black\"/>\n";
    o << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
    o << "<text x=\"" << (L + W - Rm) / 2 << "\" y=\"" << H - 10 << "\" text-anchor=\"middle\" font-size=\"12\">"
      << x_label << "</text>\n";
    o << "<text x=\"" << L << "\" y=\"" << H - B + 16 << "\" font-size=\"10\">" << format_double(xmin) << "</text>\n";
    o << "<text x=\"" << W - Rm << "\" y=\"" << H - B + 16 << "\" text-anchor=\"end\" font-size=\"10\">"
      << format_double(xmax) << "</text>\n";
    o << "<text x=\"" << L - 4 << "\" y=\"" << H - B << "\" text-anchor=\"end\" font-size=\"10\">"
      << format_double(ymin) << "</text>\n";
    o << "<text x=\"" << L - 4 << "\" y=\"" << T + 10 << "\" text-anchor=\"end\" font-size=\"10\">"
      << format_double(ymax) << "</text>\n";
    char buf[64];
    for (std::size_t i = 0; i < series.size(); ++i) {
        const char* color = palette[i % 8];
        o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" data-series=\"" << series[i].name
          << "\" points=\"";
        for (std::size_t j = 0; j < series[i].points.size(); ++j) {
            std::snprintf(buf, sizeof buf, "%.3f,%.3f", sx(series[i].points[j].first), sy(series[i].points[j].second));
            o << (j ? " " : "") << buf;
        }
        o << "\"/>\n";
        o << "<text x=\"" << W - Rm + 10 << "\" y=\"" << T + 14 * (i + 1) << "\" font-size=\"11\" fill=\"" << color
          << "\">" << series[i].name << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

inline std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot read '" + path + "'");
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

inline void write_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write '" + path + "'");
    out << text;
}

} // namespace fermi2d
