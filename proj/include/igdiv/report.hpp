#pragma once

#include <string>
#include <vector>

namespace igdiv {

/// One sampled verification instance: the inputs it used and the residual it
/// produced. `note` is empty on success and carries the failure diagnostic
/// otherwise.
struct SampleDetail {
    int index = 0;
    std::vector<double> p;
    std::vector<double> q;
    double residual = 0.0;
    std::string note;
};

/// Per-theorem verification record. passed <=> max_error <= tolerance and no
/// sample-level failure occurred.
struct CheckReport {
    std::string name;
    bool passed = false;
    double max_error = 0.0;
    double tolerance = 0.0;
    int samples = 0;
    std::vector<SampleDetail> details;

    void absorb(const SampleDetail& d) {
        details.push_back(d);
        if (d.residual > max_error) max_error = d.residual;
        ++samples;
    }
    void finalize(int required_samples) {
        bool any_note = false;
        for (const auto& d : details)
            if (!d.note.empty()) any_note = true;
        passed = !any_note && samples >= required_samples && max_error <= tolerance;
    }

    std::string summary_line() const;
    std::string to_json() const;
};

}  // namespace igdiv
