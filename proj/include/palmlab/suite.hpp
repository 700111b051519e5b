#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "palmlab/serialize.hpp"

namespace palmlab {

struct RunConfig {
    SpaceBundle bundle;
    std::vector<std::string> checkers;  // run order; each name from known_checkers()
    std::uint64_t seed = 0;
    long exact_cap = 1L << 20;  // outcome budget for generated spaces
};

// Schema "palmlab-config-v1". The space is either inline (a space document
// under "space":{"inline":...}) or produced by a named generator:
// "mark-field", "one-point", "translation", "two-species". Config-level
// rationals accept plain "a/b" text. Unknown fields are rejected everywhere.
RunConfig config_from_json(const std::string& text);

const std::vector<std::string>& known_checkers();

struct CheckOutcome {
    std::string checker;
    bool holds = false;
    std::string witness;  // empty when the check holds
    long millis = 0;
};

struct SuiteReport {
    std::vector<CheckOutcome> results;
    bool all_hold = true;
};

// Runs the requested checkers in order. A checker that rejects its input
// (precondition failure) is reported as not holding, with the reason as the
// witness; it does not abort the rest of the suite.
SuiteReport run_suite(const RunConfig& cfg);

// Schema "palmlab-report-v1". Identical output for identical (config, seed)
// except the millis timings.
std::string report_to_json(const SuiteReport& report);

struct ReproResult {
    std::string name;
    bool ok = false;
    std::string text;  // printable table, one line per row
};

// Pinned reproduction targets by name: "example65" (window-bias values),
// "example71" (two-species verdicts, group z3, p = 1/2), "coupling"
// (torus shift-coupling distance table).
ReproResult run_repro(const std::string& name, std::uint64_t seed);

}  // namespace palmlab
