#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "moments/core.hpp"

namespace moments {

enum class Status { MeasureConstructed, ExistsNonConstructive, ApproximableOnly, NoMeasure };

const char* to_string(Status s);

struct Verdict {
    Status status = Status::NoMeasure;
    std::optional<AtomicMeasure> measure;
    std::vector<std::string> certificate;  // reason chain, most specific last
    bool approximable = false;             // in the closure of representable sequences
    std::map<std::string, std::string> diagnostics;

    void because(std::string reason) { certificate.push_back(std::move(reason)); }
};

}  // namespace moments
