// End-to-end acceptance battery.  Each criterion exercises one pillar of the
// library against frozen closed-form values and prints a single verdict line;
// the exit code is the number of failing criteria.

#include <chrono>
#include <cstdio>

#include <hmcf/suite.hpp>

int main() {
    using clock = std::chrono::steady_clock;
    int failures = 0;
    const auto t0 = clock::now();
    for (int id = 1; id <= 11; ++id) {
        const auto c0 = clock::now();
        hmcf::CriterionResult r;
        try {
            r = hmcf::run_criterion(id, {});
        } catch (const std::exception& e) {
            r = {id, "criterion " + std::to_string(id), false,
                 std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(clock::now() - c0).count();
        std::printf("%s  (%.1fs)\n", hmcf::format_criterion(r).c_str(), secs);
        std::fflush(stdout);
        if (!r.pass) ++failures;
    }
    const double total = std::chrono::duration<double>(clock::now() - t0).count();
    std::printf("%d/11 criteria passed in %.1fs\n", 11 - failures, total);
    return failures;
}
