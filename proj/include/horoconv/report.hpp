#pragma once
// Structured-text verification reports: diff-friendly key-value records,
// versioned by a leading "horoconv-report/1" line. Every numeric record
// carries the tolerance it was judged against. Serialization is
// byte-deterministic for fixed inputs; timing is opt-in so that reports
// stay reproducible.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "horoconv/errors.hpp"

namespace horoconv {

inline constexpr const char* kToolVersion = "horoconv 0.1.0";
inline constexpr const char* kReportHeader = "horoconv-report/1";

inline std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string fmt_double_short(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

struct CheckRecord {
    std::string name;
    double max_residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    int samples = 0;
    uint64_t seed = 0;
    std::string note; // optional
};

struct VerificationReport {
    std::string spec_echo;
    uint64_t seed = 0;
    std::vector<CheckRecord> records;
    std::vector<std::string> adjudications;
    double timing_ms = -1.0; // emitted only when >= 0

    CheckRecord& add(const std::string& name, double max_residual, double tolerance, int samples,
                     const std::string& note = "") {
        records.push_back({name, max_residual, tolerance, max_residual <= tolerance, samples, seed, note});
        return records.back();
    }

    CheckRecord& add_flag(const std::string& name, bool pass, int samples, const std::string& note = "") {
        records.push_back({name, pass ? 0.0 : 1.0, 0.0, pass, samples, seed, note});
        return records.back();
    }

    bool overall_pass() const {
        for (const auto& r : records)
            if (!r.pass) return false;
        return true;
    }

    std::string to_string() const {
        std::ostringstream os;
        os << kReportHeader << "\n";
        os << "tool: " << kToolVersion << "\n";
        os << "spec: " << spec_echo << "\n";
        os << "seed: " << seed << "\n";
        for (const auto& r : records) {
            os << "check: " << r.name << "\n";
            os << "  max_residual: " << fmt_double(r.max_residual) << "\n";
            os << "  tolerance: " << fmt_double_short(r.tolerance) << "\n";
            os << "  pass: " << (r.pass ? "true" : "false") << "\n";
            os << "  samples: " << r.samples << "\n";
            os << "  seed: " << r.seed << "\n";
            if (!r.note.empty()) os << "  note: " << r.note << "\n";
        }
        for (const auto& a : adjudications) os << "adjudication: " << a << "\n";
        if (timing_ms >= 0.0) os << "timing_ms: " << fmt_double_short(timing_ms) << "\n";
        os << "overall: " << (overall_pass() ? "pass" : "fail") << "\n";
        return os.str();
    }

    void write(const std::string& path) const {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw spec_error("cannot open report file for writing: " + path);
        out << to_string();
    }
};

} // namespace horoconv
