#pragma once

// Command-line front end. Everything lives in this header so the test suite
// can drive run() in-process; tools/main.cpp only forwards argv.
//
// Exit codes: 0 success, 2 malformed input or arguments, 3 non-realisable
// necklace, 4 verification failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "necklace/chebyshev.hpp"
#include "necklace/critical.hpp"
#include "necklace/morse.hpp"
#include "necklace/search.hpp"

namespace necklace::cli {

using nlohmann::json;

enum ExitCode : int { ok = 0, malformed = 2, not_realisable = 3, verification_failed = 4 };

/// Raised for schema violations and missing files; maps to exit code 2.
struct MalformedInput : Error {
    using Error::Error;
};

struct Tolerances {
    double cyclic = 1e-8;
    double root = 1e-13;
    double right_angle = 1e-9;
    double bifurcation = 1e-9;
    double dedup = 1e-9;
    double zero = 1e-7;
    double stationary = 1e-7;
    double cluster = 1e-6;

    SolverOptions solver(std::optional<int> max_winding) const {
        SolverOptions o;
        o.root_tol = root;
        o.right_angle_tol = right_angle;
        o.bifurcation_tol = bifurcation;
        o.dedup_tol = dedup;
        o.max_winding = max_winding;
        return o;
    }
};

// ---------------------------------------------------------------- instances

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw MalformedInput("cannot open " + path);
    }
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw MalformedInput(path + ": " + e.what());
    }
}

inline void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        if (std::ranges::none_of(allowed, [&](const char* a) { return key == a; })) {
            throw MalformedInput("unknown key '" + key + "' in " + where);
        }
    }
}

/// Strict {"pieces": [{"beads": int, "length": number}, ...]}.
inline Necklace parse_instance(const json& doc) {
    if (!doc.is_object()) {
        throw MalformedInput("instance must be a JSON object");
    }
    reject_unknown_keys(doc, {"pieces"}, "instance");
    if (!doc.contains("pieces") || !doc["pieces"].is_array()) {
        throw MalformedInput("instance needs a 'pieces' array");
    }
    std::vector<Piece> pieces;
    for (const json& p : doc["pieces"]) {
        if (!p.is_object()) {
            throw MalformedInput("each piece must be an object");
        }
        reject_unknown_keys(p, {"beads", "length"}, "piece");
        if (!p.contains("beads") || !p["beads"].is_number_integer()) {
            throw MalformedInput("piece needs an integer 'beads'");
        }
        if (!p.contains("length") || !p["length"].is_number()) {
            throw MalformedInput("piece needs a numeric 'length'");
        }
        pieces.push_back({p["beads"].get<int>(), p["length"].get<double>()});
    }
    return Necklace(std::move(pieces));
}

inline json to_json(const Necklace& N) {
    json pieces = json::array();
    for (const Piece& p : N.pieces()) {
        pieces.push_back({{"beads", p.beads}, {"length", p.length}});
    }
    return {{"pieces", pieces}};
}

inline Polygon parse_polygon(const json& doc) {
    if (!doc.is_object()) {
        throw MalformedInput("polygon must be a JSON object");
    }
    reject_unknown_keys(doc, {"vertices"}, "polygon");
    if (!doc.contains("vertices") || !doc["vertices"].is_array()) {
        throw MalformedInput("polygon needs a 'vertices' array");
    }
    std::vector<Point> pts;
    for (const json& v : doc["vertices"]) {
        if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
            throw MalformedInput("each vertex must be [x, y]");
        }
        pts.emplace_back(v[0].get<double>(), v[1].get<double>());
    }
    return Polygon(std::move(pts));
}

// ------------------------------------------------------------------ records

inline json to_json(const MorseReport& m) {
    return {{"formula_index", m.formula_index ? json(*m.formula_index) : json(nullptr)},
            {"signature", {m.signature.negative, m.signature.zero, m.signature.positive}},
            {"agree", m.agree}};
}

inline json to_json(const CriticalConfig& c, const std::optional<MorseReport>& morse = std::nullopt) {
    json vertices = json::array();
    for (const Point& p : c.polygon.vertices()) {
        vertices.push_back({p.x(), p.y()});
    }
    return {{"signs", c.signs},
            {"winding", c.winding},
            {"radius", c.radius},
            {"half_angles", c.half_angles},
            {"multipliers", c.multipliers},
            {"vertices", vertices},
            {"area", c.area},
            {"admissible", c.admissible},
            {"bifurcating", c.bifurcating},
            {"morse", morse ? to_json(*morse) : json(nullptr)}};
}

/// Inverse of to_json for the configuration part of a record.
inline CriticalConfig record_from_json(const json& r) {
    try {
        CriticalConfig c;
        c.signs = r.at("signs").get<std::vector<int>>();
        c.winding = r.at("winding").get<int>();
        c.radius = r.at("radius").get<double>();
        c.half_angles = r.at("half_angles").get<std::vector<double>>();
        c.multipliers = r.at("multipliers").get<std::vector<double>>();
        std::vector<Point> pts;
        for (const json& v : r.at("vertices")) {
            pts.emplace_back(v.at(0).get<double>(), v.at(1).get<double>());
        }
        c.polygon = Polygon(std::move(pts));
        c.area = r.at("area").get<double>();
        c.admissible = r.at("admissible").get<bool>();
        c.bifurcating = r.at("bifurcating").get<bool>();
        return c;
    } catch (const json::exception& e) {
        throw MalformedInput(std::string("bad critical-point record: ") + e.what());
    }
}

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

template <class T, class F>
std::string join(const std::vector<T>& xs, F&& fmt) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i > 0) {
            s += ';';
        }
        s += fmt(xs[i]);
    }
    return s;
}

inline const char* csv_header() {
    return "signs,winding,radius,half_angles,multipliers,vertices,area,admissible,bifurcating,"
           "formula_index,num_negative,num_zero,num_positive,agree";
}

/// One CSV row; list-valued columns are ';'-separated, vertices as x:y.
inline std::string csv_row(const CriticalConfig& c, const std::optional<MorseReport>& m) {
    std::ostringstream os;
    os << join(c.signs, [](int e) { return std::to_string(e); }) << ',' << c.winding << ','
       << format_double(c.radius) << ',' << join(c.half_angles, format_double) << ','
       << join(c.multipliers, format_double) << ','
       << join(c.polygon.vertices(),
               [](const Point& p) { return format_double(p.x()) + ":" + format_double(p.y()); })
       << ',' << format_double(c.area) << ',' << (c.admissible ? "true" : "false") << ','
       << (c.bifurcating ? "true" : "false") << ',';
    if (m) {
        os << (m->formula_index ? std::to_string(*m->formula_index) : "") << ',' << m->signature.negative << ','
           << m->signature.zero << ',' << m->signature.positive << ',' << (m->agree ? "true" : "false");
    } else {
        os << ",,,,";
    }
    return os.str();
}

// ------------------------------------------------------------------- render

inline std::string fixed3(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    std::string s = buf;
    return s == "-0.000" ? "0.000" : s;
}

/// Static SVG of a configuration: path, p_i labels (1-based), fixed beads in
/// red, and the circumscribed circle with its centre when the polygon is cyclic.
inline std::string render_svg(const CriticalConfig& c, const Necklace& N, int size = 400, bool circle = true,
                              double cyclic_tol = 1e-8) {
    const Polygon& P = c.polygon;
    std::optional<CyclicData> cyc;
    if (circle) {
        try {
            CircleFitTolerances t;
            t.cyclic = cyclic_tol;
            cyc = fit_circumcircle(P, t);
        } catch (const DegenerateInputError&) {
        }
    }
    double xmin = P.vertices()[0].x(), xmax = xmin, ymin = P.vertices()[0].y(), ymax = ymin;
    for (const Point& p : P.vertices()) {
        xmin = std::min(xmin, p.x());
        xmax = std::max(xmax, p.x());
        ymin = std::min(ymin, p.y());
        ymax = std::max(ymax, p.y());
    }
    if (cyc) {
        xmin = std::min(xmin, cyc->center.x() - cyc->radius);
        xmax = std::max(xmax, cyc->center.x() + cyc->radius);
        ymin = std::min(ymin, cyc->center.y() - cyc->radius);
        ymax = std::max(ymax, cyc->center.y() + cyc->radius);
    }
    const double span = std::max({xmax - xmin, ymax - ymin, 1e-12});
    const double margin = 0.1 * size;
    const double scale = (size - 2.0 * margin) / span;
    const double cx = 0.5 * (xmin + xmax);
    const double cy = 0.5 * (ymin + ymax);
    auto X = [&](double x) { return fixed3(0.5 * size + scale * (x - cx)); };
    auto Y = [&](double y) { return fixed3(0.5 * size - scale * (y - cy)); };  // SVG y points down

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size
       << "\" viewBox=\"0 0 " << size << ' ' << size << "\">\n";
    os << "<rect width=\"" << size << "\" height=\"" << size << "\" fill=\"white\"/>\n";
    if (cyc) {
        os << "<circle cx=\"" << X(cyc->center.x()) << "\" cy=\"" << Y(cyc->center.y()) << "\" r=\""
           << fixed3(scale * cyc->radius) << "\" fill=\"none\" stroke=\"#888888\" stroke-dasharray=\"4 3\"/>\n";
        os << "<circle cx=\"" << X(cyc->center.x()) << "\" cy=\"" << Y(cyc->center.y())
           << "\" r=\"2.500\" fill=\"#888888\"/>\n";
    }
    os << "<path d=\"";
    for (std::size_t i = 0; i < P.size(); ++i) {
        os << (i == 0 ? "M " : " L ") << X(P.vertices()[i].x()) << ' ' << Y(P.vertices()[i].y());
    }
    os << " Z\" fill=\"#4682b4\" fill-opacity=\"0.15\" fill-rule=\"nonzero\" stroke=\"#1f3b57\" stroke-width=\"1.5\"/>\n";
    // Fixed beads last so that coinciding free beads cannot hide them.
    for (const bool fixed_pass : {false, true}) {
        for (std::size_t i = 0; i < P.size(); ++i) {
            const bool fixed = !N.is_inner(i);
            if (fixed != fixed_pass) {
                continue;
            }
            const Point& p = P.vertices()[i];
            os << "<circle cx=\"" << X(p.x()) << "\" cy=\"" << Y(p.y()) << "\" r=\""
               << (fixed ? "5.000" : "3.000") << "\" fill=\"" << (fixed ? "#c0392b" : "#1f3b57") << "\"/>\n";
        }
    }
    for (std::size_t i = 0; i < P.size(); ++i) {
        const Point& p = P.vertices()[i];
        os << "<text x=\"" << X(p.x()) << "\" y=\"" << Y(p.y()) << "\" dx=\"6\" dy=\"-6\" font-family=\"sans-serif\" "
           << "font-size=\"12\">p<tspan baseline-shift=\"sub\" font-size=\"9\">" << (i + 1) << "</tspan></text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

// ---------------------------------------------------------------- pipelines

struct Output {
    std::optional<std::string> path;
    std::string format = "json";
};

inline void emit(const Output& o, const std::string& text, std::ostream& out) {
    if (o.path) {
        std::ofstream f(*o.path, std::ios::binary);
        if (!f) {
            throw MalformedInput("cannot write " + *o.path);
        }
        f << text;
    } else {
        out << text;
    }
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

inline json critical_document(const Necklace& N, const CriticalSet& set, const std::vector<std::optional<MorseReport>>& reports) {
    json pts = json::array();
    for (std::size_t i = 0; i < set.interior.size(); ++i) {
        pts.push_back(to_json(set.interior[i], reports.empty() ? std::nullopt : reports[i]));
    }
    json boundary = json::array();
    for (const CriticalConfig& c : set.boundary) {
        boundary.push_back(to_json(c));
    }
    return {{"necklace", to_json(N)},
            {"dimension", manifold_dimension(N)},
            {"critical_points", pts},
            {"boundary_points", boundary},
            {"constant_families", set.constant_families}};
}

inline std::string critical_csv(const CriticalSet& set, const std::vector<std::optional<MorseReport>>& reports) {
    std::string s = std::string(csv_header()) + "\n";
    for (std::size_t i = 0; i < set.interior.size(); ++i) {
        s += csv_row(set.interior[i], reports.empty() ? std::nullopt : reports[i]) + "\n";
    }
    return s;
}

inline int run_critical(const Necklace& N, const Tolerances& tol, std::optional<int> wmax, const Output& o,
                        std::ostream& out) {
    const CriticalSet set = enumerate_critical(N, tol.solver(wmax));
    emit(o, o.format == "csv" ? critical_csv(set, {}) : dump(critical_document(N, set, {})), out);
    return ok;
}

inline int run_morse(const Necklace& N, const Tolerances& tol, std::optional<int> wmax, const Output& o,
                     std::ostream& out, std::ostream& err) {
    const CriticalSet set = enumerate_critical(N, tol.solver(wmax));
    std::vector<std::optional<MorseReport>> reports;
    int checked = 0;
    int agreeing = 0;
    for (const CriticalConfig& c : set.interior) {
        MorseReport m = morse_report(c, N, tol.zero);
        if (c.admissible && !c.bifurcating) {
            ++checked;
            agreeing += m.agree ? 1 : 0;
        }
        reports.emplace_back(std::move(m));
    }
    if (o.format == "csv") {
        emit(o, critical_csv(set, reports), out);
    } else {
        json doc = critical_document(N, set, reports);
        doc["summary"] = {{"records", set.interior.size()}, {"checked", checked}, {"agreeing", agreeing}};
        emit(o, dump(doc), out);
    }
    err << "morse: " << agreeing << "/" << checked << " admissible non-bifurcating records agree\n";
    return agreeing == checked ? ok : verification_failed;
}

inline int run_two_bead(int n, double L, double l, const Tolerances& tol, const Output& o, std::ostream& out,
                        std::ostream& err) {
    const Necklace N = two_bead_necklace(n, L, l);
    const std::vector<TwoBeadSolution> sols = solve_two_bead(n, L, l, tol.solver(std::nullopt));
    const std::vector<std::optional<int>> rank = two_bead_rank_indices(n, sols);
    bool all_agree = true;
    json rows = json::array();
    std::string csv = std::string("x,rank_index,") + csv_header() + "\n";
    for (std::size_t s = 0; s < sols.size(); ++s) {
        const CriticalConfig& c = sols[s].config;
        std::optional<MorseReport> m;
        if (c.admissible) {
            m = morse_report(c, N, tol.zero);
        }
        if (c.admissible && !c.bifurcating) {
            all_agree = all_agree && m->agree && rank[s] && *rank[s] == *m->formula_index;
        }
        rows.push_back({{"x", sols[s].x},
                        {"rank_index", rank[s] ? json(*rank[s]) : json(nullptr)},
                        {"critical_point", to_json(c, m)}});
        csv += format_double(sols[s].x) + "," + (rank[s] ? std::to_string(*rank[s]) : "") + "," + csv_row(c, m) + "\n";
    }
    const json doc = {{"necklace", to_json(N)}, {"n", n}, {"L", L}, {"l", l}, {"solutions", rows}};
    emit(o, o.format == "csv" ? csv : dump(doc), out);
    if (!all_agree) {
        err << "two-bead: rank-rule and formula indices disagree\n";
    }
    return all_agree ? ok : verification_failed;
}

inline int run_singular_check(const Necklace& N, const Polygon& P, const Output& o, std::ostream& out) {
    if (P.size() != N.bead_count()) {
        throw MalformedInput("polygon vertex count does not match the necklace bead count");
    }
    const SingularityVerdict v = is_singular(P, N);
    const bool deficient = constraint_rank_deficient(P, N);
    const json doc = {{"singular", v.singular},
                      {"reason", to_string(v.reason)},
                      {"rank_deficient", deficient},
                      {"configuration", is_configuration(P, N)},
                      {"piece_lengths", piece_lengths(P, N)}};
    if (o.format == "csv") {
        emit(o, "singular,reason,rank_deficient\n" + std::string(v.singular ? "true" : "false") + "," +
                    to_string(v.reason) + "," + (deficient ? "true" : "false") + "\n",
             out);
    } else {
        emit(o, dump(doc), out);
    }
    return ok;
}

/// Full pipeline check on one instance: stationarity, index agreement,
/// orthogonality, mirror duality, and completeness against the search oracle.
inline int run_verify(const Necklace& N, const Tolerances& tol, std::optional<int> wmax, std::uint64_t seed,
                      int starts, const Output& o, std::ostream& out, std::ostream& err) {
    const CriticalSet set = enumerate_critical(N, tol.solver(wmax));
    const double L = N.total_length();
    const int dim = manifold_dimension(N);
    json failures = json::array();
    auto fail = [&](std::size_t i, const std::string& what) { failures.push_back({{"record", i}, {"check", what}}); };

    std::vector<std::optional<int>> idx(set.interior.size());
    for (std::size_t i = 0; i < set.interior.size(); ++i) {
        const CriticalConfig& c = set.interior[i];
        if (projected_gradient_residual(c.polygon, N) > 1e-9 * L) {
            fail(i, "stationarity");
        }
        if (!c.admissible || c.bifurcating) {
            continue;
        }
        const MorseReport m = morse_report(c, N, tol.zero);
        idx[i] = m.signature.negative;
        if (!m.agree) {
            fail(i, "morse-index");
        }
        const OrthogonalityReport r = orthogonality_report(c, N);
        bool dims = r.dim_edge == static_cast<int>(N.bead_count()) - 3 &&
                    r.dim_cyclic == static_cast<int>(N.bead_count() - N.piece_count());
        for (std::size_t j = 0; j < N.piece_count(); ++j) {
            dims = dims && r.dim_pieces[j] == N.piece(j).beads - 1;
        }
        if (!dims) {
            fail(i, "orthogonality-dimensions");
        }
        if (std::max(r.edge_cyclic_sum_residual, r.piece_sum_residual) > 1e-8) {
            fail(i, "direct-sum-residual");
        }
        if (std::max(r.max_cross_edge_cyclic, r.max_cross_pieces) > 1e-7) {
            fail(i, "hessian-cross-block");
        }
    }
    for (std::size_t i = 0; i < set.interior.size(); ++i) {
        const CriticalConfig m = mirror(set.interior[i]);
        const auto it = std::ranges::find_if(set.interior, [&](const CriticalConfig& c) {
            return detail::rigid_distance(c.polygon, m.polygon) <= 1e-9 * L;
        });
        if (it == set.interior.end()) {
            fail(i, "mirror-closure");
        } else if (idx[i]) {
            const auto jm = static_cast<std::size_t>(it - set.interior.begin());
            if (!idx[jm] || *idx[i] + *idx[jm] != dim) {
                fail(i, "mirror-duality");
            }
        }
    }

    SearchOptions so;
    so.seed = seed;
    so.starts = starts;
    so.stationary_tol = tol.stationary;
    so.cluster_tol = tol.cluster;
    const CompletenessReport comp = check_completeness(N, set, so);
    if (!comp.unmatched.empty()) {
        failures.push_back({{"check", "completeness"}, {"unmatched", comp.unmatched.size()}});
    }

    const json doc = {{"necklace", to_json(N)},
                      {"dimension", dim},
                      {"records", set.interior.size()},
                      {"boundary_records", set.boundary.size()},
                      {"search", {{"seed", seed},
                                  {"starts", comp.search.starts},
                                  {"converged", comp.search.converged},
                                  {"distinct", comp.search.stationary.size()},
                                  {"unmatched", comp.unmatched.size()}}},
                      {"failures", failures},
                      {"passed", failures.empty()}};
    if (o.format == "csv") {
        emit(o, "records,failures,search_distinct,search_unmatched,passed\n" + std::to_string(set.interior.size()) +
                    "," + std::to_string(failures.size()) + "," + std::to_string(comp.search.stationary.size()) + "," +
                    std::to_string(comp.unmatched.size()) + "," + (failures.empty() ? "true" : "false") + "\n",
             out);
    } else {
        emit(o, dump(doc), out);
    }
    if (!failures.empty()) {
        err << "verify: " << failures.size() << " check(s) failed\n";
    }
    return failures.empty() ? ok : verification_failed;
}

/// Writes cp_000.svg, cp_001.svg, ... for the critical points of a result file.
inline int run_render(const json& results, const std::string& dir, int size, bool circle, const Tolerances& tol,
                      std::ostream& err) {
    if (!results.is_object() || !results.contains("necklace") || !results.contains("critical_points")) {
        throw MalformedInput("render input must be a critical-point result file");
    }
    const Necklace N = parse_instance(results["necklace"]);
    std::filesystem::create_directories(dir);
    std::size_t i = 0;
    for (const json& r : results["critical_points"]) {
        const CriticalConfig c = record_from_json(r);
        if (c.polygon.size() != N.bead_count()) {
            throw MalformedInput("record vertex count does not match the necklace");
        }
        char name[32];
        std::snprintf(name, sizeof name, "cp_%03zu.svg", i++);
        std::ofstream f(std::filesystem::path(dir) / name, std::ios::binary);
        if (!f) {
            throw MalformedInput("cannot write into " + dir);
        }
        f << render_svg(c, N, size, circle, tol.cyclic);
    }
    err << "render: wrote " << i << " SVG file(s) to " << dir << "\n";
    return ok;
}

// --------------------------------------------------------------------- main

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Critical configurations and Morse indices of oriented area on planar necklace spaces", "necklace"};
    app.require_subcommand(1);

    Tolerances tol;
    Output o;
    std::string instance;
    std::optional<int> max_winding;
    auto add_common = [&](CLI::App* sub, bool needs_instance) {
        auto* opt = sub->add_option("--instance", instance, "necklace instance JSON")->check(CLI::ExistingFile);
        if (needs_instance) {
            opt->required();
        }
        sub->add_option("--out", o.path, "output file (default: standard output)");
        sub->add_option("--format", o.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
        sub->add_option("--max-winding", max_winding, "largest |w| to scan (default ceil(n/2))")
            ->check(CLI::NonNegativeNumber);
        sub->add_option("--tol.cyclic", tol.cyclic, "circle-fit residual, relative to R")->check(CLI::PositiveNumber);
        sub->add_option("--tol.root", tol.root, "closure residual at accepted roots")->check(CLI::PositiveNumber);
        sub->add_option("--tol.right-angle", tol.right_angle, "distance of A_j from pi/2 for a diameter side")
            ->check(CLI::PositiveNumber);
        sub->add_option("--tol.bifurcation", tol.bifurcation, "|sum n_j E_j tan A_j| counted as zero")
            ->check(CLI::PositiveNumber);
        sub->add_option("--tol.dedup", tol.dedup, "duplicate-configuration distance, relative to L")
            ->check(CLI::PositiveNumber);
        sub->add_option("--tol.zero", tol.zero, "zero-eigenvalue threshold, relative to the Hessian norm")
            ->check(CLI::PositiveNumber);
        sub->add_option("--tol.stationary", tol.stationary, "search stationarity residual, relative to L")
            ->check(CLI::PositiveNumber);
        sub->add_option("--tol.cluster", tol.cluster, "search matching distance, relative to L")
            ->check(CLI::PositiveNumber);
    };

    auto* critical = app.add_subcommand("critical", "enumerate critical configurations");
    add_common(critical, true);
    auto* morse = app.add_subcommand("morse", "critical configurations with formula and eigenvalue indices");
    add_common(morse, true);

    auto* two_bead = app.add_subcommand("two-bead", "two consecutive fixed beads: ((n, L), (1, l))");
    add_common(two_bead, false);
    int tb_n = 0;
    double tb_L = 0.0;
    double tb_l = 0.0;
    two_bead->add_option("--n", tb_n, "beads on the long piece")->required();
    two_bead->add_option("--L", tb_L, "length of the long piece")->required();
    two_bead->add_option("--l", tb_l, "distance between the fixed beads")->required();

    auto* singular = app.add_subcommand("singular-check", "classify a polygon as singular or not");
    add_common(singular, true);
    std::string polygon_path;
    singular->add_option("--polygon", polygon_path, "polygon JSON {\"vertices\": [[x, y], ...]}")
        ->required()
        ->check(CLI::ExistingFile);

    auto* verify = app.add_subcommand("verify", "cross-check enumeration, indices and lemmas on one instance");
    add_common(verify, true);
    std::uint64_t seed = 1;
    int starts = 200;
    verify->add_option("--seed", seed, "seed for the randomised completeness search");
    verify->add_option("--starts", starts, "random starts for the completeness search")->check(CLI::PositiveNumber);

    auto* render = app.add_subcommand("render", "SVG figures of critical configurations");
    add_common(render, false);
    std::string input;
    std::string render_dir;
    int size = 400;
    bool no_circle = false;
    render->add_option("--input", input, "critical-point result file (else computed from --instance)");
    render->add_option("--render-dir", render_dir, "output directory")->required();
    render->add_option("--size", size, "image width and height in pixels")->check(CLI::PositiveNumber);
    render->add_flag("--no-circle", no_circle, "omit the circumscribed circle");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return malformed;
    }

    try {
        if (critical->parsed()) {
            return run_critical(parse_instance(read_json_file(instance)), tol, max_winding, o, out);
        }
        if (morse->parsed()) {
            return run_morse(parse_instance(read_json_file(instance)), tol, max_winding, o, out, err);
        }
        if (two_bead->parsed()) {
            return run_two_bead(tb_n, tb_L, tb_l, tol, o, out, err);
        }
        if (singular->parsed()) {
            return run_singular_check(parse_instance(read_json_file(instance)), parse_polygon(read_json_file(polygon_path)),
                                      o, out);
        }
        if (verify->parsed()) {
            return run_verify(parse_instance(read_json_file(instance)), tol, max_winding, seed, starts, o, out, err);
        }
        if (render->parsed()) {
            json results;
            if (!input.empty()) {
                results = read_json_file(input);
            } else if (!instance.empty()) {
                const Necklace N = parse_instance(read_json_file(instance));
                results = critical_document(N, enumerate_critical(N, tol.solver(max_winding)), {});
            } else {
                throw MalformedInput("render needs --input or --instance");
            }
            return run_render(results, render_dir, size, !no_circle, tol, err);
        }
    } catch (const NotRealisableError& e) {
        err << "error: " << e.what() << "\n";
        return not_realisable;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return malformed;
    }
    return malformed;
}

}  // namespace necklace::cli
