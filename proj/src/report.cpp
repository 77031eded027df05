#include "igdiv/report.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>

namespace igdiv {

namespace {

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

}  // namespace

std::string CheckReport::summary_line() const {
    std::string line = (passed ? "PASS " : "FAIL ") + name;
    line += "  max_error=" + fmt17(max_error);
    line += "  tol=" + fmt17(tolerance);
    line += "  samples=" + std::to_string(samples);
    return line;
}

std::string CheckReport::to_json() const {
    nlohmann::ordered_json j;
    j["name"] = name;
    j["passed"] = passed;
    j["max_error"] = max_error;
    j["tolerance"] = tolerance;
    j["samples"] = samples;
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& d : details) {
        nlohmann::ordered_json e;
        e["index"] = d.index;
        e["p"] = d.p;
        e["q"] = d.q;
        e["residual"] = d.residual;
        if (!d.note.empty()) e["note"] = d.note;
        arr.push_back(e);
    }
    j["details"] = arr;
    return j.dump(2);
}

}  // namespace igdiv
