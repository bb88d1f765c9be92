#include "gew/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gew/bloch.hpp"
#include "gew/criteria.hpp"
#include "gew/parallel.hpp"
#include "gew/simplex3.hpp"
#include "gew/witness.hpp"

namespace gew::cli {
namespace {

using nlohmann::json;
namespace s3 = gew::simplex3;

// Exit 1: unreadable input, malformed files, bad flags.
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Exit 2: the input parses but does not describe a usable state or operator.
struct StateError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    std::optional<double> alpha, beta, gamma, horodecki_b;
    std::string matrix;
    std::optional<double> to_alpha, to_beta, to_gamma, to_horodecki_b;
    std::string to_matrix;
    std::optional<std::size_t> grid;
    std::vector<double> box{-1.0, 1.0};
    std::string out;
    std::string format = "csv";
    std::uint64_t seed = 42;
    std::size_t restarts = 32;
    double tol = 1e-6;
    std::size_t jobs = 1;
    std::string mode;
    std::string face;
};

struct LoadedMatrix {
    CMat mat;
    Dims dims;
};

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

json point_json(const s3::FamilyPoint& p) {
    const auto e = s3::to_euclid(p);
    return {{"alpha", p.alpha}, {"beta", p.beta}, {"gamma", p.gamma}, {"a", e.a}, {"b", e.b}, {"c", e.c}};
}

LoadedMatrix load_matrix(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot read " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw InputError(path + ": " + e.what());
    }
    try {
        const auto rows = j.at("rows").get<std::size_t>();
        const auto cols = j.at("cols").get<std::size_t>();
        const auto re = j.at("re").get<std::vector<double>>();
        const auto im = j.contains("im") ? j.at("im").get<std::vector<double>>() : std::vector<double>(re.size());
        if (re.size() != rows * cols || im.size() != rows * cols)
            throw InputError(path + ": re/im must have rows*cols entries");
        std::vector<cplx> entries(rows * cols);
        for (std::size_t k = 0; k < entries.size(); ++k) entries[k] = {re[k], im[k]};
        Dims dims;
        if (j.contains("dims")) {
            const auto d = j.at("dims").get<std::vector<std::size_t>>();
            if (d.size() != 2) throw InputError(path + ": dims must have two entries");
            dims = {d[0], d[1]};
        } else {
            std::size_t d = 1;
            while (d * d < rows) ++d;
            if (d * d != rows) throw InputError(path + ": cannot infer subsystem dims; add \"dims\"");
            dims = {d, d};
        }
        if (rows != cols || dims.total() != rows) throw StateError(path + ": matrix shape does not match dims");
        return {CMat(rows, cols, std::move(entries)), dims};
    } catch (const json::exception& e) {
        throw InputError(path + ": " + e.what());
    }
}

struct StateSource {
    CMat mat;
    Dims dims;
    std::optional<s3::FamilyPoint> point;
};

std::optional<StateSource> read_source(const std::optional<double>& alpha, const std::optional<double>& beta,
                                       const std::optional<double>& gamma, const std::optional<double>& b,
                                       const std::string& matrix) {
    const bool has_point = alpha || beta || gamma;
    const int sources = int(has_point) + int(b.has_value()) + int(!matrix.empty());
    if (sources > 1) throw InputError("give one of a family point, --horodecki-b, or --matrix");
    if (sources == 0) return std::nullopt;
    if (!matrix.empty()) {
        auto m = load_matrix(matrix);
        return StateSource{std::move(m.mat), m.dims, std::nullopt};
    }
    s3::FamilyPoint p;
    if (b) {
        if (!(*b >= 0.0 && *b <= 5.0)) throw StateError("horodecki parameter b must lie in [0, 5]");
        p = s3::horodecki_point(*b);
    } else {
        p = {alpha.value_or(0.0), beta.value_or(0.0), gamma.value_or(0.0)};
    }
    return StateSource{s3::family_matrix(p), s3::kDims, p};
}

StateSource require_source(const Options& o) {
    auto s = read_source(o.alpha, o.beta, o.gamma, o.horodecki_b, o.matrix);
    if (!s) throw InputError("no input state: give --alpha/--beta/--gamma, --horodecki-b, or --matrix");
    return *s;
}

std::optional<s3::GRe> try_g_re(const s3::FamilyPoint& p) {
    try {
        return s3::g_re(p.beta, p.gamma);
    } catch (const std::domain_error&) {
        return std::nullopt;
    }
}

SeeSawOptions seesaw(const Options& o) {
    SeeSawOptions s;
    s.restarts = o.restarts;
    s.seed = o.seed;
    s.jobs = o.jobs;
    return s;
}

void check_format(const Options& o) {
    if (o.format != "csv" && o.format != "json") throw InputError("--format must be csv or json");
}

int cmd_classify(const Options& o, std::ostream& out) {
    const auto src = require_source(o);
    std::vector<CMat> witnesses;
    std::optional<s3::GRe> g;
    if (src.point && (g = try_g_re(*src.point))) witnesses.push_back(g->op);
    const Verdict v = classify(src.mat, src.dims, witnesses);
    json j = to_json(v);
    if (src.point) {
        j["point"] = point_json(*src.point);
        if (g) j["g_re_tangent"] = point_json(g->tangent);
    }
    out << j.dump(2) << '\n';
    return v.label == Label::invalid_state ? kExitInvalidState : kExitOk;
}

void write_scan(const std::vector<s3::ScanRow>& rows, const Options& o, std::ostream& out) {
    if (o.format == "csv") {
        out << "alpha,beta,gamma,a,b,c,pos_margin,ppt_margin,realign_sum,label\n";
        for (const auto& r : rows)
            out << fmt(r.p.alpha) << ',' << fmt(r.p.beta) << ',' << fmt(r.p.gamma) << ',' << fmt(r.e.a) << ','
                << fmt(r.e.b) << ',' << fmt(r.e.c) << ',' << fmt(r.pos_margin) << ',' << fmt(r.ppt_margin) << ','
                << fmt(r.realign_sum) << ',' << to_string(r.label) << '\n';
        return;
    }
    json arr = json::array();
    for (const auto& r : rows) {
        json j = point_json(r.p);
        j["pos_margin"] = r.pos_margin;
        j["ppt_margin"] = r.ppt_margin;
        j["realign_sum"] = r.realign_sum;
        j["label"] = to_string(r.label);
        j["closed_form_agrees"] = r.closed_form_agrees;
        arr.push_back(std::move(j));
    }
    out << arr.dump(2) << '\n';
}

int cmd_scan(const Options& o, std::ostream& out) {
    check_format(o);
    const std::size_t n = o.grid.value_or(21);
    if (n < 2) throw InputError("--grid must be at least 2");
    if (o.box.size() != 2 || !(o.box[0] < o.box[1])) throw InputError("--box must be a nonempty interval lo,hi");
    const auto rows = o.gamma ? s3::scan_slice(n, o.box[0], o.box[1], *o.gamma, o.jobs)
                              : s3::scan(n, o.box[0], o.box[1], o.jobs);
    write_scan(rows, o, out);
    return kExitOk;
}

int cmd_horodecki(const Options& o, std::ostream& out) {
    check_format(o);
    const std::size_t n = o.grid.value_or(21);
    if (n < 2) throw InputError("--grid must be at least 2");
    struct Row {
        double b;
        s3::FamilyPoint p;
        Verdict v;
    };
    std::vector<Row> rows(n);
    parallel_for(n, o.jobs, [&](std::size_t k) {
        const double b = 5.0 * static_cast<double>(k) / static_cast<double>(n - 1);
        const auto p = s3::horodecki_point(b);
        std::vector<CMat> w;
        if (auto g = try_g_re(p)) w.push_back(g->op);
        rows[k] = {b, p, classify(s3::family_matrix(p), s3::kDims, w)};
    });

    // PPT boundaries refined between neighbouring grid points whose PPT status differs.
    auto is_ppt = [](double b) { return ppt_check(s3::horodecki(b)) >= -kCriterionTol; };
    std::vector<double> boundaries;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        double lo = rows[k].b, hi = rows[k + 1].b;
        const bool lo_ppt = rows[k].v.ppt_margin >= -kCriterionTol;
        if (lo_ppt == (rows[k + 1].v.ppt_margin >= -kCriterionTol)) continue;
        while (hi - lo > 1e-10) {
            const double mid = 0.5 * (lo + hi);
            (is_ppt(mid) == lo_ppt ? lo : hi) = mid;
        }
        boundaries.push_back(0.5 * (lo + hi));
    }

    if (o.format == "csv") {
        out << "b,alpha,beta,gamma,ppt_margin,realign_sum,g_re_value,label\n";
        for (const auto& r : rows)
            out << fmt(r.b) << ',' << fmt(r.p.alpha) << ',' << fmt(r.p.beta) << ',' << fmt(r.p.gamma) << ','
                << fmt(r.v.ppt_margin) << ',' << fmt(r.v.realignment_sum) << ','
                << (r.v.witness_values.empty() ? std::string() : fmt(r.v.witness_values[0])) << ','
                << to_string(r.v.label) << '\n';
        return kExitOk;
    }
    json arr = json::array();
    for (const auto& r : rows) {
        json j = to_json(r.v);
        j["b"] = r.b;
        j["point"] = point_json(r.p);
        arr.push_back(std::move(j));
    }
    out << json{{"rows", arr}, {"ppt_boundaries", boundaries}}.dump(2) << '\n';
    return kExitOk;
}

int cmd_witness_check(const Options& o, std::ostream& out) {
    CMat op;
    Dims dims;
    json j;
    if (!o.matrix.empty()) {
        if (o.alpha || o.beta || o.gamma || o.horodecki_b) throw InputError("give either --matrix or --beta/--gamma");
        auto m = load_matrix(o.matrix);
        op = std::move(m.mat);
        dims = m.dims;
    } else if (o.beta || o.gamma) {
        const auto g = s3::g_re(o.beta.value_or(0.0), o.gamma.value_or(0.0));
        op = g.op;
        dims = s3::kDims;
        j["g_re"] = {{"tangent", point_json(g.tangent)}, {"a", g.a}, {"c", {g.c.real(), g.c.imag()}}};
    } else {
        throw InputError("witness-check needs --matrix or --beta/--gamma");
    }
    if (!is_hermitian(op)) throw StateError("operator is not Hermitian");

    const auto rep = is_witness(op, dims, seesaw(o));
    j["witness"] = rep.witness;
    j["detecting"] = rep.detecting;
    j["optimal"] = rep.optimal;
    j["min_eigenvalue"] = rep.min_eigenvalue;
    j["spectral_norm"] = rep.spectral_norm;
    j["product_minimum"] = rep.optimum.value;
    j["s_min"] = rep.optimum.s_min ? json(*rep.optimum.s_min) : json(nullptr);
    j["restarts"] = rep.optimum.restarts_used;
    j["converged"] = rep.optimum.converged;

    if (dims.a == dims.b && dims.a >= 2) {
        const auto basis = weyl_basis(dims.a);
        try {
            const auto form = witness_form(decompose_op(op, basis, basis));
            const auto f = witness_svo(form);
            j["singular_values"] = f.s;
            j["delta"] = form.delta;
            try {
                j["all_singular_values_at_most_one"] = lemma1_check(f);
            } catch (const std::invalid_argument&) {
                // local parts present: the singular-value test does not apply
            }
        } catch (const std::invalid_argument&) {
            // identity coefficient vanishes or is not real
        }
    }
    out << j.dump(2) << '\n';
    return kExitOk;
}

std::optional<s3::PolygonOp> face_op(const std::string& name) {
    if (name.empty()) return std::nullopt;
    for (auto& op : s3::polygon_ops())
        if (op.name == "G^" + name || op.name == name) return op;
    throw InputError("unknown face '" + name + "' (expected u+, u-, d+ or d-)");
}

json crossing_json(const CrossingReport& c) {
    json probes = json::array();
    for (const auto& p : c.probes)
        probes.push_back({{"lambda", p.lambda}, {"min_value", p.min_value}, {"witness", p.witness}});
    json j{{"mode", to_string(c.mode)},
           {"lambda_star", c.lambda_star},
           {"bracket", {c.lower, c.upper}},
           {"iterations", c.iterations},
           {"witness_above", c.witness_above},
           {"min_value", c.optimum.value},
           {"probes", probes}};
    j["s_min"] = c.optimum.s_min ? json(*c.optimum.s_min) : json(nullptr);
    return j;
}

int cmd_shift(const Options& o, std::ostream& out) {
    std::optional<ShiftMode> mode;
    if (o.mode == "outside-in") mode = ShiftMode::outside_in;
    else if (o.mode == "inside-out") mode = ShiftMode::inside_out;
    else if (!o.mode.empty()) throw InputError("--mode must be outside-in or inside-out");

    if (const auto face = face_op(o.face)) {
        if (mode == ShiftMode::outside_in) throw InputError("--face implies --mode inside-out");
        const auto rep = s3::inside_out_tangency(*face, o.tol, seesaw(o));
        json j = crossing_json(rep.crossing);
        j["face"] = rep.name;
        j["tangent"] = point_json(rep.tangent);
        j["ppt_margin"] = rep.ppt_margin;
        j["realign_sum"] = rep.realign_sum;
        j["boundary_distance"] = rep.boundary_distance;
        out << j.dump(2) << '\n';
        return kExitOk;
    }

    const auto start = require_source(o);
    auto target = read_source(o.to_alpha, o.to_beta, o.to_gamma, o.to_horodecki_b, o.to_matrix);
    if (!target) {
        const auto d = start.dims.total();
        std::optional<s3::FamilyPoint> mixed;
        if (start.dims == s3::kDims) mixed = s3::FamilyPoint{};
        target = StateSource{CMat::identity(d) * cplx(1.0 / static_cast<double>(d)), start.dims, mixed};
    }
    for (const StateSource* s : {&start, static_cast<const StateSource*>(&*target)}) {
        const auto defect = DensityMatrix::defect(s->mat, s->dims);
        if (!defect.empty()) throw StateError("shift endpoint is not a state: " + defect);
    }
    const ShiftFamily family(DensityMatrix(start.mat, start.dims), DensityMatrix(target->mat, target->dims));
    const auto rep = find_witness_crossing(family, mode.value_or(ShiftMode::outside_in), o.tol, seesaw(o));
    json j = crossing_json(rep);
    if (rep.mode == ShiftMode::outside_in) j["entangled_segment"] = {rep.lambda_star, 1.0};
    if (start.point && target->point) {
        const double l = rep.lambda_star;
        const s3::FamilyPoint p{l * start.point->alpha + (1 - l) * target->point->alpha,
                                l * start.point->beta + (1 - l) * target->point->beta,
                                l * start.point->gamma + (1 - l) * target->point->gamma};
        j["crossing"] = point_json(p);
    }
    out << j.dump(2) << '\n';
    return kExitOk;
}

int cmd_mesh(const Options& o, std::ostream& out) {
    const std::size_t n = o.grid.value_or(41);
    if (n < 2) throw InputError("--grid must be at least 2");
    s3::write_obj(out, n);
    return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Entanglement classification with geometric witnesses", "gew"};
    app.require_subcommand(1);
    app.fallthrough();
    Options o;

    app.add_option("--alpha", o.alpha, "family parameter alpha");
    app.add_option("--beta", o.beta, "family parameter beta");
    app.add_option("--gamma", o.gamma, "family parameter gamma (for scan: the gamma slice)");
    app.add_option("--horodecki-b", o.horodecki_b, "Horodecki parameter b in [0, 5]");
    app.add_option("--matrix", o.matrix, "JSON matrix file {rows, cols, re, im[, dims]}");
    app.add_option("--to-alpha", o.to_alpha, "shift target alpha");
    app.add_option("--to-beta", o.to_beta, "shift target beta");
    app.add_option("--to-gamma", o.to_gamma, "shift target gamma");
    app.add_option("--to-horodecki-b", o.to_horodecki_b, "shift target Horodecki b");
    app.add_option("--to-matrix", o.to_matrix, "shift target matrix file");
    app.add_option("--grid", o.grid, "grid points per axis");
    app.add_option("--box", o.box, "parameter box lo,hi")->delimiter(',')->expected(2);
    app.add_option("--out", o.out, "output file (default stdout)");
    app.add_option("--format", o.format, "csv or json")->capture_default_str();
    app.add_option("--seed", o.seed, "see-saw seed")->capture_default_str();
    app.add_option("--restarts", o.restarts, "see-saw restarts")->capture_default_str();
    app.add_option("--tol", o.tol, "crossing tolerance")->capture_default_str();
    app.add_option("--jobs", o.jobs, "worker threads, 0 for all cores (GEW_JOBS overrides)")->capture_default_str();
    app.add_option("--mode", o.mode, "shift mode: outside-in or inside-out");
    app.add_option("--face", o.face, "inside-out shift on a polygon face: u+, u-, d+, d-");

    auto* classify_cmd = app.add_subcommand("classify", "classify a state");
    auto* scan_cmd = app.add_subcommand("scan", "grid scan of the three-parameter family");
    auto* horodecki_cmd = app.add_subcommand("horodecki", "sweep of the Horodecki line b in [0, 5]");
    auto* witness_cmd = app.add_subcommand("witness-check", "check an operator for the witness property");
    auto* shift_cmd = app.add_subcommand("shift", "witness crossing along a shift family");
    auto* mesh_cmd = app.add_subcommand("mesh", "OBJ surfaces of the constraint regions");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitIo;
    }

    if (const char* env = std::getenv("GEW_JOBS"); env && *env) {
        try {
            std::size_t used = 0;
            o.jobs = std::stoul(env, &used);
            if (env[used] != '\0') throw std::invalid_argument(env);
        } catch (const std::exception&) {
            err << "gew: invalid GEW_JOBS value '" << env << "'\n";
            return kExitIo;
        }
    }
    if (o.restarts == 0) {
        err << "gew: --restarts must be positive\n";
        return kExitIo;
    }
    if (!(o.tol > 0.0 && o.tol < 0.5)) {
        err << "gew: --tol must lie in (0, 0.5)\n";
        return kExitIo;
    }

    std::ostringstream buffer;
    int code = kExitOk;
    try {
        if (classify_cmd->parsed()) code = cmd_classify(o, buffer);
        else if (scan_cmd->parsed()) code = cmd_scan(o, buffer);
        else if (horodecki_cmd->parsed()) code = cmd_horodecki(o, buffer);
        else if (witness_cmd->parsed()) code = cmd_witness_check(o, buffer);
        else if (shift_cmd->parsed()) code = cmd_shift(o, buffer);
        else if (mesh_cmd->parsed()) code = cmd_mesh(o, buffer);
    } catch (const InputError& e) {
        err << "gew: " << e.what() << '\n';
        return kExitIo;
    } catch (const NoBracketError& e) {
        err << "gew: no bracketing: " << e.what() << '\n';
        return kExitInvalidState;
    } catch (const StateError& e) {
        err << "gew: " << e.what() << '\n';
        return kExitInvalidState;
    } catch (const std::invalid_argument& e) {
        err << "gew: " << e.what() << '\n';
        return kExitInvalidState;
    } catch (const std::domain_error& e) {
        err << "gew: " << e.what() << '\n';
        return kExitInvalidState;
    }

    if (o.out.empty()) {
        out << buffer.str();
    } else {
        std::ofstream file(o.out, std::ios::binary);
        if (!(file << buffer.str()) || !file.flush()) {
            err << "gew: cannot write " << o.out << '\n';
            return kExitIo;
        }
    }
    return code;
}

}  // namespace gew::cli
