#include "moments/formats.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "moments/errors.hpp"

namespace moments {

namespace {

struct Line {
    std::size_t number;
    std::vector<std::string> tokens;
};

std::vector<Line> tokenize(std::string_view text) {
    std::vector<Line> out;
    std::size_t number = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t end = std::min(text.find('\n', pos), text.size());
        std::string_view raw = text.substr(pos, end - pos);
        ++number;
        pos = end + 1;
        if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
        std::istringstream is{std::string(raw)};
        Line line{number, {}};
        for (std::string tok; is >> tok;) line.tokens.push_back(tok);
        if (!line.tokens.empty()) out.push_back(std::move(line));
        if (end == text.size()) break;
    }
    return out;
}

[[noreturn]] void fail_at(std::size_t line, const std::string& msg) {
    throw InvalidInput("line " + std::to_string(line) + ": " + msg);
}

int parse_int(const std::string& tok, std::size_t line, const char* what) {
    std::size_t used = 0;
    int v = 0;
    try {
        v = std::stoi(tok, &used);
    } catch (const std::exception&) {
        fail_at(line, std::string("expected integer ") + what + ", got '" + tok + "'");
    }
    if (used != tok.size()) fail_at(line, std::string("expected integer ") + what + ", got '" + tok + "'");
    return v;
}

Rational parse_value(const std::string& tok, std::size_t line) {
    try {
        return parse_rational(tok);
    } catch (const InvalidInput& e) {
        fail_at(line, e.what());
    }
}

MultiIndex parse_exponents(const Line& l, int n) {
    if (static_cast<int>(l.tokens.size()) != n + 1)
        fail_at(l.number, "expected " + std::to_string(n) + " exponents and a value");
    std::vector<int> e;
    for (int i = 0; i < n; ++i) {
        const int v = parse_int(l.tokens[static_cast<std::size_t>(i)], l.number, "exponent");
        if (v < 0) fail_at(l.number, "negative exponent");
        e.push_back(v);
    }
    return MultiIndex(std::move(e));
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string format_value(const Rational& r) {
    const auto den = boost::multiprecision::denominator(r);
    if (den == 1) return boost::multiprecision::numerator(r).str();
    if ((den & (den - 1)) == 0) {
        const double d = to_double(r);
        if (Rational(d) == r) return format_double(d);
    }
    return to_string(r);
}

MomentSequence ProblemFile::sequence() const {
    Vector v;
    v.reserve(values.size());
    for (const auto& r : values) v.push_back(to_double(r));
    return MomentSequence(n, k, std::move(v));
}

std::optional<Polynomial> ProblemFile::constraint_polynomial() const {
    if (!has_constraint) return std::nullopt;
    Polynomial p(n);
    for (const auto& [a, c] : constraint) p.add_term(a, to_double(c));
    return p;
}

ProblemFile ProblemFile::from_sequence(const MomentSequence& y, const std::optional<Polynomial>& constraint) {
    ProblemFile p;
    p.n = y.n();
    p.k = y.k();
    for (double v : y.values()) p.values.emplace_back(v);
    if (constraint) {
        p.has_constraint = true;
        for (const auto& [a, c] : constraint->terms()) p.constraint.emplace_back(a, Rational(c));
    }
    return p;
}

ProblemFile parse_problem(std::string_view text) {
    const auto lines = tokenize(text);
    if (lines.empty()) throw InvalidInput("empty problem file");
    const Line& h = lines.front();
    if (h.tokens.size() != 3 || h.tokens[0] != "moments" || h.tokens[1].rfind("n=", 0) != 0 ||
        h.tokens[2].rfind("k=", 0) != 0)
        fail_at(h.number, "expected header 'moments n=<n> k=<k>'");
    ProblemFile p;
    p.n = parse_int(h.tokens[1].substr(2), h.number, "n");
    p.k = parse_int(h.tokens[2].substr(2), h.number, "k");
    if (p.n < 1 || p.n > 16 || p.k < 0 || p.k > 32) fail_at(h.number, "n or k out of range");

    const std::size_t size = basis_size(p.n, p.k);
    p.values.assign(size, Rational(0));
    std::vector<std::size_t> seen_at(size, 0);
    std::set<MultiIndex> cseen;
    bool in_constraint = false;
    std::size_t last = h.number;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const Line& l = lines[i];
        last = l.number;
        if (l.tokens.size() == 1 && l.tokens[0] == "constraint") {
            if (in_constraint) fail_at(l.number, "duplicate constraint section");
            in_constraint = true;
            p.has_constraint = true;
            continue;
        }
        const MultiIndex a = parse_exponents(l, p.n);
        const Rational v = parse_value(l.tokens.back(), l.number);
        if (in_constraint) {
            if (!cseen.insert(a).second) fail_at(l.number, "duplicate constraint term " + a.to_string());
            p.constraint.emplace_back(a, v);
            continue;
        }
        if (a.degree() > p.k) fail_at(l.number, "moment " + a.to_string() + " exceeds degree k");
        const std::size_t idx = basis_index(a);
        if (seen_at[idx]) {
            fail_at(l.number, "duplicate moment " + a.to_string() + " (first on line " + std::to_string(seen_at[idx]) + ")");
        }
        seen_at[idx] = l.number;
        p.values[idx] = v;
    }
    const auto basis = monomial_basis(p.n, p.k);
    for (std::size_t i = 0; i < size; ++i)
        if (!seen_at[i]) fail_at(last, "missing moment " + basis[i].to_string());
    return p;
}

std::string format_problem(const ProblemFile& p) {
    std::ostringstream os;
    os << "moments n=" << p.n << " k=" << p.k << "\n";
    const auto basis = monomial_basis(p.n, p.k);
    for (std::size_t i = 0; i < basis.size(); ++i) {
        for (int e : basis[i].exponents()) os << e << ' ';
        os << format_value(p.values[i]) << "\n";
    }
    if (p.has_constraint) {
        os << "constraint\n";
        for (const auto& [a, c] : p.constraint) {
            for (int e : a.exponents()) os << e << ' ';
            os << format_value(c) << "\n";
        }
    }
    return os.str();
}

AtomicMeasure parse_measure(std::string_view text) {
    AtomicMeasure mu;
    std::size_t dim = 0;
    for (const Line& l : tokenize(text)) {
        if (l.tokens.size() < 2) fail_at(l.number, "expected a weight and at least one coordinate");
        if (dim == 0) dim = l.tokens.size() - 1;
        if (l.tokens.size() - 1 != dim) fail_at(l.number, "atom dimension differs from earlier lines");
        const double w = to_double(parse_value(l.tokens[0], l.number));
        if (!(w > 0.0)) fail_at(l.number, "weight must be positive");
        Vector x;
        for (std::size_t i = 1; i < l.tokens.size(); ++i) x.push_back(to_double(parse_value(l.tokens[i], l.number)));
        mu.add(std::move(x), w);
    }
    if (mu.atoms.empty()) throw InvalidInput("measure file has no atoms");
    return mu;
}

std::string format_measure(const AtomicMeasure& mu) {
    std::ostringstream os;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        os << format_double(mu.weights[i]);
        for (double c : mu.atoms[i]) os << ' ' << format_double(c);
        os << "\n";
    }
    return os.str();
}

CubicCurveMoments parse_curve(std::string_view text) {
    const auto lines = tokenize(text);
    if (lines.empty() || lines.front().tokens != std::vector<std::string>{"cubic-curve"})
        fail_at(lines.empty() ? 1 : lines.front().number, "expected header 'cubic-curve'");
    CubicCurveMoments m;
    std::map<char, std::size_t> seen;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const Line& l = lines[i];
        if (l.tokens.size() != 2 || l.tokens[0].size() != 1 ||
            CubicCurveMoments::kLetters.find(l.tokens[0][0]) == std::string_view::npos)
            fail_at(l.number, "expected '<letter> <value>' with a letter from " + std::string(CubicCurveMoments::kLetters));
        const char c = l.tokens[0][0];
        if (seen.count(c)) fail_at(l.number, std::string("duplicate letter ") + c);
        seen[c] = l.number;
        m[c] = parse_value(l.tokens[1], l.number);
    }
    for (char c : CubicCurveMoments::kLetters)
        if (!seen.count(c)) fail_at(lines.back().number, std::string("missing letter ") + c);
    return m;
}

std::string format_curve(const CubicCurveMoments& m) {
    std::ostringstream os;
    os << "cubic-curve\n";
    for (char c : CubicCurveMoments::kLetters) os << c << ' ' << format_value(m[c]) << "\n";
    return os.str();
}

std::string document_kind(std::string_view text) {
    const auto lines = tokenize(text);
    if (lines.empty()) return "";
    return lines.front().tokens.front();
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("cannot read " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidInput("cannot write " + path.string());
    out << text;
    if (!out) throw InvalidInput("write failed for " + path.string());
}

}  // namespace moments
