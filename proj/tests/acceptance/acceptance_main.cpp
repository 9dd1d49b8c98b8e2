// Acceptance report: one PASS/FAIL line per criterion at the full level (L up to 12).
//
//   efqs_acceptance            all criteria
//   efqs_acceptance 5 9        selected criteria
//
// Exit status 0 iff every selected criterion passes. Tolerances are pinned in validation.cpp.

#include "efqs/validation.hpp"

#include <cstdio>
#include <cstdlib>
#include <exception>
#include <string>

int main(int argc, char** argv) {
    efqs::ValidationOptions opt;
    opt.level = efqs::ValidationLevel::full;
    for(int i = 1; i < argc; ++i) {
        try {
            opt.only.push_back(std::stoi(argv[i]));
        } catch(const std::exception&) {
            std::fprintf(stderr, "usage: %s [criterion id ...]\n", argv[0]);
            return 2;
        }
    }
    try {
        const auto report = efqs::run_validation(opt);
        int        passed = 0;
        for(const auto& r : report.results) {
            std::printf("%s [%2d] %s: %s (%.2f s)\n", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str(), r.detail.c_str(), r.seconds);
            passed += r.passed;
        }
        std::printf("%d/%zu criteria passed\n", passed, report.results.size());
        return report.all_passed() ? EXIT_SUCCESS : EXIT_FAILURE;
    } catch(const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
