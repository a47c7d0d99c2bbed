#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "moments/core.hpp"
#include "moments/curve_psi.hpp"
#include "moments/rational.hpp"

namespace moments {

// Problem file:
//   moments n=<n> k=<k>
//   <e1> ... <en> <value>        one line per |alpha| <= k, any order
//   constraint                   optional section
//   <e1> ... <en> <coefficient>
// Values are integers, decimals or "p/q" and are kept exactly; '#' starts a comment.
struct ProblemFile {
    int n = 0;
    int k = 0;
    std::vector<Rational> values;  // degree-lex order
    std::vector<std::pair<MultiIndex, Rational>> constraint;
    bool has_constraint = false;

    MomentSequence sequence() const;
    std::optional<Polynomial> constraint_polynomial() const;
    static ProblemFile from_sequence(const MomentSequence& y, const std::optional<Polynomial>& constraint = {});
};

ProblemFile parse_problem(std::string_view text);
std::string format_problem(const ProblemFile& p);

// Measure file: one atom per line, weight first, then the n coordinates.
AtomicMeasure parse_measure(std::string_view text);
std::string format_measure(const AtomicMeasure& mu);

// Curve file: "cubic-curve" then one "<letter> <value>" line for each of the 17 letters.
CubicCurveMoments parse_curve(std::string_view text);
std::string format_curve(const CubicCurveMoments& m);

// First meaningful token of a document: "moments" or "cubic-curve".
std::string document_kind(std::string_view text);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

// Shortest text that reads back to exactly r: integers and p/q stay exact, binary fractions use %.17g.
std::string format_value(const Rational& r);
std::string format_double(double v);

}  // namespace moments
