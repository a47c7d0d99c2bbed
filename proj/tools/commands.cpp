#include "commands.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <optional>

#include "moments/core.hpp"
#include "moments/curve_psi.hpp"
#include "moments/errors.hpp"
#include "moments/fixtures.hpp"
#include "moments/formats.hpp"
#include "moments/quadratic.hpp"
#include "moments/quartic.hpp"
#include "moments/verdict.hpp"

namespace moments::cli {

namespace {

namespace fs = std::filesystem;

constexpr const char* kScope =
    "out of implemented scope; supported: k <= 1 (any n); k = 2 without constraint (any n); "
    "k = 2 with a quadratic constraint (any n); n = 1 with even k; n = 2 with k = 3 or k = 4; cubic-curve files";

class OutOfScope : public InvalidInput {
public:
    OutOfScope() : InvalidInput(kScope) {}
};

struct Options {
    ToleranceConfig cfg;
    std::uint64_t seed = kDefaultSeed;
    bool exact = false;
    std::string mode = "equality";
    std::string out;
    std::vector<std::string> eps;
    std::vector<long> mlist;

    ConstraintMode constraint_mode() const {
        return mode == "inequality" ? ConstraintMode::Inequality : ConstraintMode::Equality;
    }
};

// "fixture:<name>" reads a shipped fixture; anything else is a path.
struct Input {
    std::string stem;
    std::string text;
};

Input load_input(const std::string& spec) {
    constexpr std::string_view prefix = "fixture:";
    if (spec.rfind(prefix, 0) == 0) {
        const std::string name = spec.substr(prefix.size());
        return {name, load_fixture(name).text};
    }
    return {fs::path(spec).stem().string(), read_text_file(spec)};
}

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

enum class Route { Degree1, Unconstrained, Quadratic, Univariate, Cubic, Quartic };

const char* route_name(Route r) {
    switch (r) {
        case Route::Degree1: return "degree1";
        case Route::Unconstrained: return "unconstrained";
        case Route::Quadratic: return "quadratic";
        case Route::Univariate: return "univariate";
        case Route::Cubic: return "cubic";
        case Route::Quartic: return "quartic";
    }
    return "?";
}

Route route_for(const ProblemFile& p) {
    if (p.has_constraint) {
        const auto q = p.constraint_polynomial();
        if (p.k != 2 || q->degree() > 2) throw OutOfScope();
        return Route::Quadratic;
    }
    if (p.k <= 1) return Route::Degree1;
    if (p.k == 2) return Route::Unconstrained;
    if (p.n == 1 && p.k % 2 == 0) return Route::Univariate;
    if (p.n == 2 && p.k == 3) return Route::Cubic;
    if (p.n == 2 && p.k == 4) return Route::Quartic;
    throw OutOfScope();
}

Verdict decide_problem(const ProblemFile& p, Route route, const Options& o) {
    const MomentSequence y = p.sequence();
    Verdict v;
    switch (route) {
        case Route::Degree1:
            v.measure = solve_degree1(y);
            v.status = Status::MeasureConstructed;
            v.approximable = true;
            v.because("degree-1 data with positive mass: one atom at the mean");
            return v;
        case Route::Unconstrained:
            try {
                v.measure = solve_unconstrained(y, o.cfg);
                v.status = Status::MeasureConstructed;
                v.approximable = true;
                v.because("M1(y) is positive semidefinite: rank-many atoms reproduce the moments");
            } catch (const NoMeasureError& e) {
                v.status = Status::NoMeasure;
                v.because(e.what());
            }
            return v;
        case Route::Quadratic:
            return decide_noncompact(y, split_quadratic(*p.constraint_polynomial()), o.constraint_mode(), o.cfg);
        case Route::Univariate: return decide_univariate(y, o.cfg);
        case Route::Cubic: return cubic_solve(y, o.cfg, o.seed);
        case Route::Quartic: return decide_quartic(y, o.cfg, o.seed);
    }
    throw OutOfScope();
}

int exit_code(Status s) {
    switch (s) {
        case Status::MeasureConstructed:
        case Status::ExistsNonConstructive: return kExitOk;
        case Status::NoMeasure: return kExitNoMeasure;
        case Status::ApproximableOnly: return kExitApproximable;
    }
    return kExitInconclusive;
}

void print_measure(const AtomicMeasure& mu, std::ostream& out) {
    out << "atoms: " << mu.size() << "\n";
    for (std::size_t i = 0; i < mu.size(); ++i) {
        out << "atom: weight=" << num(mu.weights[i]) << " at=(";
        for (std::size_t j = 0; j < mu.atoms[i].size(); ++j) out << (j ? ", " : "") << num(mu.atoms[i][j]);
        out << ")\n";
    }
}

void print_verdict(const Verdict& v, std::ostream& out) {
    out << "status: " << to_string(v.status) << "\n";
    out << "approximable: " << (v.approximable ? "yes" : "no") << "\n";
    for (const auto& [k, val] : v.diagnostics) out << k << ": " << val << "\n";
    for (const auto& r : v.certificate) out << "reason: " << r << "\n";
    if (v.measure) print_measure(*v.measure, out);
}

int curve_exit(CurveVerdict v) {
    switch (v) {
        case CurveVerdict::HasMeasure: return kExitOk;
        case CurveVerdict::NoMeasure: return kExitNoMeasure;
        case CurveVerdict::Boundary: return kExitApproximable;
    }
    return kExitInconclusive;
}

int cmd_psi(const Input& in, const Options& o, std::ostream& out) {
    const CubicCurveMoments m = parse_curve(in.text);
    const CurveHypotheses h = check_hypotheses(m, o.cfg, true);
    out << "relation_x2_eq_x1^3: " << (h.relation ? "yes" : "no") << "\n";
    out << "J_positive_definite: " << (h.j_positive_definite ? "yes" : "no") << "\n";
    out << "rank: " << h.rank << "\n";
    if (!h.ok()) throw PreconditionError("psi needs PSD M with rank 9 and X2 = X1^3 (J positive definite)");
    const CurveTest t = curve_measure_test(m, o.cfg, o.exact);
    out << "psi: " << format_double(psi(m, o.cfg)) << "\n";
    out << "psi_exact: " << to_string(t.psi_exact ? *t.psi_exact : psi_exact(m)) << "\n";
    out << "s: " << format_value(m['s']) << "\n";
    out << "mode: " << (o.exact ? "exact" : "float") << "\n";
    out << "verdict: " << to_string(t.verdict) << "\n";
    return curve_exit(t.verdict);
}

int cmd_decide(const Input& in, const Options& o, std::ostream& out) {
    if (document_kind(in.text) == "cubic-curve") return cmd_psi(in, o, out);
    const ProblemFile p = parse_problem(in.text);
    const Route r = route_for(p);
    out << "route: " << route_name(r) << "\n";
    const Verdict v = decide_problem(p, r, o);
    print_verdict(v, out);
    return exit_code(v.status);
}

fs::path output_dir(const Options& o) { return o.out.empty() ? fs::path(".") : fs::path(o.out); }

int cmd_solve(const Input& in, const Options& o, std::ostream& out, std::ostream& err) {
    if (o.out.empty()) throw InvalidInput("solve needs --out <measure-file>");
    const ProblemFile p = parse_problem(in.text);
    const Route r = route_for(p);
    out << "route: " << route_name(r) << "\n";
    const Verdict v = decide_problem(p, r, o);
    print_verdict(v, out);
    if (!v.measure) {
        err << "no measure constructed; nothing written\n";
        return v.status == Status::ExistsNonConstructive ? kExitInconclusive : exit_code(v.status);
    }
    const VerifyReport rep = verify_measure(p.sequence(), *v.measure, o.cfg);
    out << "max_abs_deviation: " << num(rep.max_abs_deviation) << "\n";
    if (!rep.pass) {
        err << "constructed measure failed re-verification; nothing written\n";
        return kExitInconclusive;
    }
    write_text_file(o.out, format_measure(*v.measure));
    out << "measure_file: " << o.out << "\n";
    return kExitOk;
}

int cmd_verify(const Input& in, const std::string& measure_path, const Options& o, std::ostream& out) {
    const ProblemFile p = parse_problem(in.text);
    const AtomicMeasure mu = parse_measure(read_text_file(measure_path));
    if (mu.n() != p.n) throw InvalidInput("measure dimension differs from the problem's n");
    const MomentSequence y = p.sequence();
    const VerifyReport rep = verify_measure(y, mu, o.cfg);
    out << "atoms: " << mu.size() << "\n";
    out << "max_abs_deviation: " << num(rep.max_abs_deviation) << "\n";
    out << "tolerance: " << num(o.cfg.moment_threshold(y)) << "\n";
    out << "result: " << (rep.pass ? "pass" : "fail") << "\n";
    return rep.pass ? kExitOk : kExitNoMeasure;
}

int approx_curve(const Input& in, const Options& o, std::ostream& out) {
    if (o.mlist.empty()) throw InvalidInput("approx on a curve file needs --m-list");
    const CubicCurveMoments m = parse_curve(in.text);
    const auto items = curve_approx_sequence(m, o.mlist, o.cfg);
    const fs::path dir = output_dir(o);
    bool all = true;
    for (std::size_t j = 0; j < items.size(); ++j) {
        const auto& it = items[j];
        const fs::path file = dir / (in.stem + ".m" + std::to_string(it.m) + ".txt");
        write_text_file(file, format_curve(it.moments));
        out << "step " << j + 1 << ": m=" << it.m << " deviation=" << to_string(it.deviation)
            << " within_window=" << (it.within_window ? "yes" : "no") << " verdict=" << to_string(it.verdict)
            << " instance=" << file.string() << "\n";
        all = all && it.within_window && it.verdict == CurveVerdict::HasMeasure;
    }
    return all ? kExitOk : kExitInconclusive;
}

int approx_problem(const Input& in, const Options& o, std::ostream& out, std::ostream& err) {
    const ProblemFile p = parse_problem(in.text);
    const Route r = route_for(p);
    const MomentSequence y = p.sequence();
    const Verdict v = decide_problem(p, r, o);
    out << "route: " << route_name(r) << "\n";
    out << "status: " << to_string(v.status) << "\n";
    const fs::path dir = output_dir(o);
    const auto constraint = p.constraint_polynomial();

    if (v.measure) {
        const fs::path inst = dir / (in.stem + ".exact.txt");
        const fs::path wit = dir / (in.stem + ".exact.measure.txt");
        write_text_file(inst, format_problem(p));
        write_text_file(wit, format_measure(*v.measure));
        out << "step 0: eps=0 deviation=0 witness_residual="
            << num(verify_measure(y, *v.measure, o.cfg).max_abs_deviation) << " instance=" << inst.string()
            << " witness=" << wit.string() << "\n";
        return kExitOk;
    }
    if (!v.approximable || (r != Route::Quadratic && r != Route::Quartic)) {
        err << "instance is not approximable under the implemented theory\n";
        return kExitInconclusive;
    }
    if (o.eps.empty()) throw InvalidInput("approx needs --eps");

    int code = kExitOk;
    double last = std::numeric_limits<double>::infinity();
    bool decreasing = true;
    for (std::size_t j = 0; j < o.eps.size(); ++j) {
        const double eps = to_double(parse_rational(o.eps[j]));
        if (!(eps > 0.0 && eps < 1.0)) throw InvalidInput("eps must lie in (0, 1): " + o.eps[j]);
        std::optional<MomentSequence> inst;
        std::optional<AtomicMeasure> wit;
        double dev = 0.0;
        if (r == Route::Quadratic) {
            const ApproxResult a = approx_sequence(y, split_quadratic(*constraint), o.constraint_mode(), eps, o.cfg);
            inst = a.perturbed;
            wit = a.witness;
            dev = a.deviation;
        } else if (auto a = quartic_approx(y, eps, o.cfg, o.seed)) {
            inst = a->perturbed;
            wit = a->witness;
            dev = a->deviation;
        }
        out << "step " << j + 1 << ": eps=" << o.eps[j];
        if (!inst) {
            out << " witness=none\n";
            code = kExitInconclusive;
            continue;
        }
        const fs::path ip = dir / (in.stem + ".eps" + std::to_string(j + 1) + ".txt");
        const fs::path wp = dir / (in.stem + ".eps" + std::to_string(j + 1) + ".measure.txt");
        write_text_file(ip, format_problem(ProblemFile::from_sequence(*inst, constraint)));
        write_text_file(wp, format_measure(*wit));
        const VerifyReport rep = verify_measure(*inst, *wit, o.cfg);
        out << " deviation=" << num(dev) << " witness_residual=" << num(rep.max_abs_deviation)
            << " instance=" << ip.string() << " witness=" << wp.string() << "\n";
        if (!rep.pass) code = kExitInconclusive;
        decreasing = decreasing && dev < last;
        last = dev;
    }
    out << "deviations_decreasing: " << (decreasing ? "yes" : "no") << "\n";
    return code;
}

int cmd_approx(const Input& in, const Options& o, std::ostream& out, std::ostream& err) {
    std::error_code ec;
    fs::create_directories(output_dir(o), ec);
    if (ec) throw InvalidInput("cannot create " + output_dir(o).string() + ": " + ec.message());
    if (document_kind(in.text) == "cubic-curve") return approx_curve(in, o, out);
    return approx_problem(in, o, out, err);
}

int cmd_fixture(const std::string& name, std::ostream& out) {
    if (name.empty()) {
        for (const auto& n : fixture_names()) out << n << ": " << load_fixture(n).provenance << "\n";
        return kExitOk;
    }
    out << load_fixture(name).text;
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Truncated moment problems: decide, construct and approximate representing measures", "moments"};
    app.require_subcommand(1);
    Options o;
    app.add_option("--tol-psd", o.cfg.psd_tol, "relative tolerance for PSD and rank decisions");
    app.add_option("--tol-moment", o.cfg.moment_tol, "relative tolerance for moment matching");
    app.add_option("--seed", o.seed, "seed for randomized searches");
    app.add_flag("--exact", o.exact, "exact rational arithmetic where supported (curve files)");
    app.add_option("--mode", o.mode, "constraint mode")->check(CLI::IsMember({"equality", "inequality"}));

    std::string input, measure, fixture_name;
    auto* decide = app.add_subcommand("decide", "decide whether a representing measure exists");
    decide->add_option("input", input, "problem or curve file, or fixture:<name>")->required();
    auto* solve = app.add_subcommand("solve", "construct a measure and write it after re-verification");
    solve->add_option("input", input)->required();
    solve->add_option("--out", o.out, "measure file to write")->required();
    auto* approx = app.add_subcommand("approx", "emit approximating instances with exact witnesses");
    approx->add_option("input", input)->required();
    approx->add_option("--eps", o.eps, "eps values, decimals or p/q")->delimiter(',');
    approx->add_option("--m-list", o.mlist, "m values for curve data")->delimiter(',');
    approx->add_option("--out", o.out, "directory for emitted files");
    auto* psi_cmd = app.add_subcommand("psi", "psi(y) and the s-versus-psi verdict for curve data");
    psi_cmd->add_option("input", input)->required();
    auto* verify = app.add_subcommand("verify", "check a measure file against a problem file");
    verify->add_option("input", input)->required();
    verify->add_option("measure", measure)->required();
    auto* fixture = app.add_subcommand("fixture", "list shipped fixtures or print one");
    fixture->add_option("name", fixture_name);
    for (auto* s : {decide, solve, approx, psi_cmd, verify, fixture}) s->fallthrough();

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        o.cfg.rank_tol = o.cfg.psd_tol;
        o.cfg.validate();
        if (*fixture) return cmd_fixture(fixture_name, out);
        const Input in = load_input(input);
        if (*decide) return cmd_decide(in, o, out);
        if (*solve) return cmd_solve(in, o, out, err);
        if (*approx) return cmd_approx(in, o, out, err);
        if (*psi_cmd) return cmd_psi(in, o, out);
        if (*verify) return cmd_verify(in, measure, o, out);
    } catch (const NoMeasureError& e) {
        out << "status: NoMeasure\nreason: " << e.what() << "\n";
        return kExitNoMeasure;
    } catch (const InvalidInput& e) {
        err << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const PreconditionError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << "\n";
        return kExitInconclusive;
    }
    return kExitInput;
}

}  // namespace moments::cli
