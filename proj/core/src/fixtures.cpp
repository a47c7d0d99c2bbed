#include "moments/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "moments/errors.hpp"
#include "moments/symlin.hpp"

#ifndef MOMENTS_FIXTURE_DIR
#define MOMENTS_FIXTURE_DIR "fixtures"
#endif

namespace moments {

std::filesystem::path default_fixture_dir() { return MOMENTS_FIXTURE_DIR; }

std::vector<std::string> fixture_names() {
    return {"ex2_5_base", "ex2_5_variant", "ex2_10_robinson", "sec1_univariate", "ex3_1",
            "ex3_6",      "ex3_7",         "ex4_9",           "sec4_1_counterexample"};
}

namespace {

std::pair<std::string, std::string> split_kv(const std::string& s) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw InvalidInput("fixture directive needs key=value: " + s);
    return {s.substr(0, eq), s.substr(eq + 1)};
}

void read_directives(Fixture& f) {
    std::istringstream in(f.text);
    for (std::string line; std::getline(in, line);) {
        const auto at = line.find("# @");
        if (at != 0) continue;
        std::istringstream ls(line.substr(3));
        std::string kind;
        ls >> kind;
        std::string rest;
        std::getline(ls, rest);
        if (const auto p = rest.find_first_not_of(' '); p != std::string::npos) rest = rest.substr(p);
        if (kind == "provenance") {
            f.provenance = rest;
        } else if (kind == "expect") {
            f.expected.insert(split_kv(rest));
        } else if (kind == "meta") {
            f.metadata.insert(split_kv(rest));
        } else if (kind == "term") {
            std::istringstream ts(rest);
            std::string name;
            ts >> name;
            std::vector<std::string> tok;
            for (std::string t; ts >> t;) tok.push_back(t);
            if (tok.size() < 2) throw InvalidInput("bad @term directive: " + line);
            std::vector<int> e;
            for (std::size_t i = 0; i + 1 < tok.size(); ++i) e.push_back(std::stoi(tok[i]));
            auto it = f.polynomials.try_emplace(name, Polynomial(static_cast<int>(e.size()))).first;
            it->second.add_term(MultiIndex(e), to_double(parse_rational(tok.back())));
        } else {
            throw InvalidInput("unknown fixture directive @" + kind);
        }
    }
}

}  // namespace

std::map<std::string, std::string> classify_fixture(const Fixture& f, const ToleranceConfig& cfg) {
    std::map<std::string, std::string> out;
    if (f.curve) {
        const auto h = check_hypotheses(*f.curve, cfg, true);
        out["rank"] = std::to_string(h.rank);
        out["psd"] = h.ok() ? to_string(PsdClass::PositiveSemidefiniteSingular) : to_string(PsdClass::Indefinite);
        return out;
    }
    const MomentSequence y = f.problem->sequence();
    if (y.k() < 2) return out;
    const PsdStatus st = psd_status(moment_matrix(y, y.k() / 2).entries, cfg);
    out["rank"] = std::to_string(st.rank);
    out["psd"] = to_string(st.kind);
    return out;
}

Fixture load_fixture(const std::string& name) { return load_fixture(name, default_fixture_dir()); }

Fixture load_fixture(const std::string& name, const std::filesystem::path& dir) {
    const auto names = fixture_names();
    if (std::find(names.begin(), names.end(), name) == names.end()) throw InvalidInput("unknown fixture '" + name + "'");
    Fixture f;
    f.name = name;
    f.text = read_text_file(dir / (name + ".txt"));
    read_directives(f);
    if (document_kind(f.text) == "cubic-curve")
        f.curve = parse_curve(f.text);
    else
        f.problem = parse_problem(f.text);

    const auto got = classify_fixture(f, ToleranceConfig{});
    for (const char* key : {"rank", "psd"}) {
        const auto e = f.expected.find(key);
        if (e == f.expected.end()) continue;
        const auto g = got.find(key);
        if (g == got.end() || g->second != e->second)
            throw NumericalError("fixture " + name + ": stored " + key + " " + e->second + " not reproduced (got " +
                                 (g == got.end() ? "nothing" : g->second) + ")");
    }
    return f;
}

MomentSequence ones_twos_sequence(double eps) {
    MomentSequence y(2, 4);
    const double e1 = std::pow(eps, 0.75), e2 = std::sqrt(eps), e3 = std::pow(eps, 0.25);
    for (const auto& a : monomial_basis(2, 4)) {
        switch (a.degree()) {
            case 0: y[a] = 1.0; break;
            case 1: y[a] = 1.0 + e1 - eps; break;
            case 2: y[a] = 1.0 + e2 - eps; break;
            case 3: y[a] = 1.0 + e3 - eps; break;
            default: y[a] = 2.0 - eps; break;
        }
    }
    return y;
}

AtomicMeasure ones_twos_witness(double eps) {
    AtomicMeasure mu;
    mu.add({1.0, 1.0}, 1.0 - eps);
    const double r = std::pow(eps, -0.25);
    mu.add({r, r}, eps);
    return mu;
}

MomentSequence quartic_ab_sequence(double a, double b) {
    MomentSequence y(2, 4);
    y[MultiIndex({0, 0})] = 8;
    y[MultiIndex({2, 0})] = 4;
    y[MultiIndex({0, 2})] = 4;
    y[MultiIndex({3, 0})] = 2;
    y[MultiIndex({1, 2})] = -2;
    y[MultiIndex({4, 0})] = 11;
    y[MultiIndex({2, 2})] = a;
    y[MultiIndex({0, 4})] = b;
    return y;
}

MomentSequence quartic_perturbed_sequence(long m) {
    const double md = static_cast<double>(m);
    return quartic_ab_sequence(1.0 + 1.0 / md, 3.0 + 1.0 / (4.0 * md * md));
}

MomentSequence parabola_sequence(double eps) {
    MomentSequence y(2, 2);
    y[MultiIndex({0, 0})] = 1.0;
    y[MultiIndex({1, 0})] = 1.0 - eps + std::pow(eps, 0.75);
    y[MultiIndex({0, 1})] = 1.0 + std::sqrt(eps) - eps;
    y[MultiIndex({2, 0})] = 1.0 + std::sqrt(eps) - eps;
    y[MultiIndex({1, 1})] = 1.0 + std::pow(eps, 0.25) - eps;
    y[MultiIndex({0, 2})] = 2.0 - eps;
    return y;
}

AtomicMeasure parabola_witness(double eps) {
    AtomicMeasure mu;
    mu.add({1.0, 1.0}, 1.0 - eps);
    mu.add({std::pow(eps, -0.25), std::pow(eps, -0.5)}, eps);
    return mu;
}

}  // namespace moments
