#include "moments/curve_psi.hpp"

#include <cctype>
#include <cmath>

#include "moments/errors.hpp"
#include "moments/symlin.hpp"

namespace moments {

Rational parse_rational(std::string_view text) {
    auto fail = [&]() { return InvalidInput("not a number: '" + std::string(text) + "'"); };
    if (text.empty()) throw fail();
    const auto slash = text.find('/');
    if (slash != std::string_view::npos) {
        const Rational num = parse_rational(text.substr(0, slash));
        const Rational den = parse_rational(text.substr(slash + 1));
        if (den == 0) throw InvalidInput("zero denominator in '" + std::string(text) + "'");
        return num / den;
    }
    std::size_t i = 0;
    bool neg = false;
    if (text[i] == '+' || text[i] == '-') neg = text[i++] == '-';
    boost::multiprecision::cpp_int digits = 0;
    int frac = 0;
    bool any = false, dot = false;
    for (; i < text.size(); ++i) {
        const char ch = text[i];
        if (std::isdigit(static_cast<unsigned char>(ch))) {
            digits = digits * 10 + (ch - '0');
            any = true;
            if (dot) ++frac;
        } else if (ch == '.' && !dot) {
            dot = true;
        } else {
            break;
        }
    }
    if (!any) throw fail();
    long exp10 = -frac;
    if (i < text.size()) {
        if (text[i] != 'e' && text[i] != 'E') throw fail();
        const std::string_view rest = text.substr(i + 1);
        if (rest.empty()) throw fail();
        std::size_t used = 0;
        long e = 0;
        try {
            e = std::stol(std::string(rest), &used);
        } catch (const std::exception&) {
            throw fail();
        }
        if (used != rest.size() || std::abs(e) > 4000) throw fail();
        exp10 += e;
    }
    Rational r(digits);
    const boost::multiprecision::cpp_int p = boost::multiprecision::pow(boost::multiprecision::cpp_int(10),
                                                                        static_cast<unsigned>(std::abs(exp10)));
    r = exp10 >= 0 ? r * Rational(p) : r / Rational(p);
    return neg ? Rational(-r) : r;
}

std::string to_string(const Rational& r) {
    if (boost::multiprecision::denominator(r) == 1) return boost::multiprecision::numerator(r).str();
    return boost::multiprecision::numerator(r).str() + "/" + boost::multiprecision::denominator(r).str();
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

RationalMatrix rational_inverse(const RationalMatrix& a) {
    const std::size_t n = a.size();
    RationalMatrix m = a;
    RationalMatrix inv(n, std::vector<Rational>(n, Rational(0)));
    for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        while (p < n && m[p][c] == 0) ++p;
        if (p == n) throw PreconditionError("rational_inverse: matrix is singular");
        std::swap(m[p], m[c]);
        std::swap(inv[p], inv[c]);
        const Rational pv = m[c][c];
        for (std::size_t k = 0; k < n; ++k) {
            m[c][k] /= pv;
            inv[c][k] /= pv;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c || m[r][c] == 0) continue;
            const Rational f = m[r][c];
            for (std::size_t k = 0; k < n; ++k) {
                m[r][k] -= f * m[c][k];
                inv[r][k] -= f * inv[c][k];
            }
        }
    }
    return inv;
}

std::vector<Rational> rational_ldl_pivots(const RationalMatrix& a) {
    RationalMatrix m = a;
    const std::size_t n = m.size();
    std::vector<Rational> piv;
    for (std::size_t c = 0; c < n; ++c) {
        piv.push_back(m[c][c]);
        if (m[c][c] <= 0) break;
        for (std::size_t r = c + 1; r < n; ++r) {
            const Rational f = m[r][c] / m[c][c];
            for (std::size_t k = c; k < n; ++k) m[r][k] -= f * m[c][k];
        }
    }
    return piv;
}

namespace {

// Row strings of the layout; '1' is y00.
constexpr const char* kLayout[10] = {
    "1abcedbfgx", "acebfgedhj", "bedfgxdhjk", "cbfedhfgxu", "efgdhjgxuv",
    "dgxhjkxuvw", "bedfgxdhjk", "fdhgxuhjkr", "ghjxuvjkrs", "xjkuvwkrst",
};
constexpr std::size_t kX13 = 6;  // label x1^3
constexpr const char* kW = "hxujkrvw";

std::size_t letter_index(char letter) {
    const auto pos = CubicCurveMoments::kLetters.find(letter);
    if (pos == std::string_view::npos) throw InvalidInput(std::string("unknown curve letter '") + letter + "'");
    return pos;
}

Rational entry(const CubicCurveMoments& m, char ch) { return ch == '1' ? Rational(1) : m[ch]; }

RationalMatrix j_exact(const CubicCurveMoments& m) {
    RationalMatrix j;
    for (std::size_t r = 0; r < 10; ++r) {
        if (r == kX13) continue;
        std::vector<Rational> row;
        for (std::size_t c = 0; c < 10; ++c)
            if (c != kX13) row.push_back(entry(m, kLayout[r][c]));
        j.push_back(std::move(row));
    }
    return j;
}

Matrix j_float(const CubicCurveMoments& m) {
    const RationalMatrix je = j_exact(m);
    Matrix j(9, 9);
    for (std::size_t r = 0; r < 9; ++r)
        for (std::size_t c = 0; c < 9; ++c) j(r, c) = to_double(je[r][c]);
    return j;
}

Vector w_float(const CubicCurveMoments& m) {
    Vector w;
    for (const char* p = kW; *p; ++p) w.push_back(m.value(*p));
    return w;
}

// LDL pivots in floating point; a pivot counts as positive above psd_tol times its diagonal entry.
bool j_pd_float(const Matrix& j, const ToleranceConfig& cfg, std::size_t* rank) {
    Matrix a = j;
    const std::size_t n = a.rows();
    std::size_t k = 0;
    for (; k < n; ++k) {
        if (!(a(k, k) > cfg.psd_tol * std::abs(j(k, k)))) break;
        for (std::size_t r = k + 1; r < n; ++r) {
            const double f = a(r, k) / a(k, k);
            for (std::size_t c = k; c < n; ++c) a(r, c) -= f * a(k, c);
        }
    }
    if (rank) *rank = k;
    return k == n;
}

void require_hypotheses(const CubicCurveMoments& m, const ToleranceConfig& cfg, bool exact) {
    if (!check_hypotheses(m, cfg, exact).ok())
        throw PreconditionError("J is not positive definite: M must be PSD with rank 9 and X2 = X1^3");
}

}  // namespace

Rational& CubicCurveMoments::operator[](char letter) { return values[letter_index(letter)]; }
const Rational& CubicCurveMoments::operator[](char letter) const { return values[letter_index(letter)]; }

RationalMatrix build_cubic_curve_exact(const CubicCurveMoments& m) {
    RationalMatrix out(10, std::vector<Rational>(10));
    for (std::size_t r = 0; r < 10; ++r)
        for (std::size_t c = 0; c < 10; ++c) out[r][c] = entry(m, kLayout[r][c]);
    return out;
}

MomentMatrix build_cubic_curve(const CubicCurveMoments& m) {
    MomentMatrix mm;
    mm.n = 2;
    mm.d = 3;
    mm.labels = monomial_basis(2, 3);
    mm.entries = Matrix(10, 10);
    const RationalMatrix e = build_cubic_curve_exact(m);
    for (std::size_t r = 0; r < 10; ++r)
        for (std::size_t c = 0; c < 10; ++c) mm.entries(r, c) = to_double(e[r][c]);
    return mm;
}

CurveHypotheses check_hypotheses(const CubicCurveMoments& m, const ToleranceConfig& cfg, bool exact) {
    CurveHypotheses h;
    const RationalMatrix full = build_cubic_curve_exact(m);
    h.relation = true;
    for (std::size_t r = 0; r < 10; ++r) h.relation = h.relation && full[r][2] == full[r][kX13];
    if (exact) {
        const auto piv = rational_ldl_pivots(j_exact(m));
        std::size_t k = 0;
        while (k < piv.size() && piv[k] > 0) ++k;
        h.rank = k;
        h.j_positive_definite = k == 9;
    } else {
        h.j_positive_definite = j_pd_float(j_float(m), cfg, &h.rank);
    }
    return h;
}

double psi(const CubicCurveMoments& m, const ToleranceConfig& cfg) {
    require_hypotheses(m, cfg, false);
    const Matrix n = j_float(m).block(0, 0, 8, 8);
    const auto l = cholesky(n);
    if (!l) throw PreconditionError("N is not positive definite");
    // psi = |L^-1 W|^2.
    const Vector w = w_float(m);
    Vector z(8);
    for (std::size_t i = 0; i < 8; ++i) {
        double s = w[i];
        for (std::size_t k = 0; k < i; ++k) s -= (*l)(i, k) * z[k];
        z[i] = s / (*l)(i, i);
    }
    return dot(z, z);
}

PsiBlocks psi_blocks(const CubicCurveMoments& m, const ToleranceConfig& cfg) {
    require_hypotheses(m, cfg, false);
    const SchurBlocks inv = inverse_blocks(j_float(m), 8, cfg);
    const Vector w = w_float(m);
    PsiBlocks b;
    b.omega = dot(inv.top_left * w, w);
    b.vw = dot(inv.top_right.col(0), w);
    b.epsilon = inv.bottom_right(0, 0);
    b.psi = (b.omega * b.epsilon - b.vw * b.vw) / b.epsilon;
    return b;
}

Rational psi_exact(const CubicCurveMoments& m) {
    const ToleranceConfig cfg;
    require_hypotheses(m, cfg, true);
    const RationalMatrix inv = rational_inverse(j_exact(m));
    std::vector<Rational> w;
    for (const char* p = kW; *p; ++p) w.push_back(m[*p]);
    Rational omega = 0, vw = 0;
    for (std::size_t i = 0; i < 8; ++i) {
        vw += inv[i][8] * w[i];
        for (std::size_t k = 0; k < 8; ++k) omega += inv[i][k] * w[i] * w[k];
    }
    const Rational eps = inv[8][8];
    return (omega * eps - vw * vw) / eps;
}

const char* to_string(CurveVerdict v) {
    switch (v) {
        case CurveVerdict::HasMeasure: return "HasMeasure";
        case CurveVerdict::NoMeasure: return "NoMeasure";
        case CurveVerdict::Boundary: return "Boundary";
    }
    return "?";
}

CurveTest curve_measure_test(const CubicCurveMoments& m, const ToleranceConfig& cfg, bool exact) {
    CurveTest t;
    t.s = m.value('s');
    if (exact) {
        const Rational p = psi_exact(m);
        t.psi_exact = p;
        t.psi = to_double(p);
        t.verdict = m['s'] > p ? CurveVerdict::HasMeasure : m['s'] < p ? CurveVerdict::NoMeasure : CurveVerdict::Boundary;
        return t;
    }
    t.psi = psi(m, cfg);
    const double band = cfg.moment_tol * (1.0 + std::abs(t.psi));
    t.verdict = t.s > t.psi + band   ? CurveVerdict::HasMeasure
                : t.s < t.psi - band ? CurveVerdict::NoMeasure
                                     : CurveVerdict::Boundary;
    return t;
}

std::vector<CurveApproxItem> curve_approx_sequence(const CubicCurveMoments& m, const std::vector<long>& mlist,
                                                   const ToleranceConfig& cfg) {
    std::vector<CurveApproxItem> out;
    if (mlist.empty()) return out;
    if (curve_measure_test(m, cfg, true).verdict != CurveVerdict::Boundary)
        throw PreconditionError("curve approximation needs s = psi(y)");
    for (long k : mlist) {
        if (k <= 0) throw InvalidInput("m must be a positive integer");
        CurveApproxItem item;
        item.m = k;
        item.moments = m;
        item.deviation = Rational(1, k);
        item.moments['s'] = m['s'] + item.deviation;
        item.within_window = check_hypotheses(item.moments, cfg, true).ok();
        item.verdict = item.within_window ? curve_measure_test(item.moments, cfg, true).verdict : CurveVerdict::Boundary;
        out.push_back(std::move(item));
    }
    return out;
}

}  // namespace moments
