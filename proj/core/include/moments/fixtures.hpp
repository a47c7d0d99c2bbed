#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "moments/core.hpp"
#include "moments/curve_psi.hpp"
#include "moments/formats.hpp"

namespace moments {

// A worked example stored as a problem or curve file. Directive comments carry the extras:
//   # @provenance <text>
//   # @expect <key>=<value>      checked on load for rank and psd
//   # @meta <key>=<value>
//   # @term <name> <exponents...> <coefficient>   builds named polynomials
struct Fixture {
    std::string name;
    std::string provenance;
    std::string text;
    std::optional<ProblemFile> problem;
    std::optional<CubicCurveMoments> curve;
    std::map<std::string, std::string> expected;
    std::map<std::string, std::string> metadata;
    std::map<std::string, Polynomial> polynomials;
};

std::filesystem::path default_fixture_dir();
std::vector<std::string> fixture_names();

// Throws InvalidInput for unknown names and NumericalError when a stored rank or psd class is not reproduced.
Fixture load_fixture(const std::string& name);
Fixture load_fixture(const std::string& name, const std::filesystem::path& dir);

// Rank and psd class as recomputed from the payload (exact pivots for curve data).
std::map<std::string, std::string> classify_fixture(const Fixture& f, const ToleranceConfig& cfg);

// Parametric families of the worked examples.
MomentSequence ones_twos_sequence(double eps);  // y(eps); eps = 0 gives the ones/twos data
AtomicMeasure ones_twos_witness(double eps);
MomentSequence quartic_ab_sequence(double a, double b);  // a = 1, b = 3 is the rank-4 instance
MomentSequence quartic_perturbed_sequence(long m);        // a = 1 + 1/m, b = 3 + 1/(4 m^2)
MomentSequence parabola_sequence(double eps);             // ybar(eps); eps = 0 gives the singular M1
AtomicMeasure parabola_witness(double eps);

}  // namespace moments
