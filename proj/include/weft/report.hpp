#ifndef WEFT_REPORT_HPP
#define WEFT_REPORT_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace weft {

// Outcome of one named identity check. pass <=> residual <= tolerance + tail_bound.
struct VerificationReport {
    std::string name;
    double residual = 0.0;
    double tolerance = 0.0;
    double tail_bound = 0.0;
    int excluded_blocks = 0; // blocks dropped at the truncation edge
    bool pass = false;
    double runtime_ms = 0.0;
    std::uint64_t seed = 0;

    static VerificationReport make(std::string name, double residual, double tolerance,
                                   double tail_bound = 0.0, int excluded = 0,
                                   std::uint64_t seed = 0) {
        VerificationReport r;
        r.name = std::move(name);
        r.residual = residual;
        r.tolerance = tolerance;
        r.tail_bound = tail_bound;
        r.excluded_blocks = excluded;
        r.seed = seed;
        r.pass = residual <= tolerance + tail_bound;
        return r;
    }
};

inline bool all_pass(const std::vector<VerificationReport>& reports) {
    for (const auto& r : reports)
        if (!r.pass) return false;
    return true;
}

} // namespace weft

#endif
