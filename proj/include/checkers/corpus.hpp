#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "checkers/preorders.hpp"

namespace checkers {

class ConfigError : public DomainError {
public:
    using DomainError::DomainError;
};
class CorpusParseError : public DomainError {
public:
    using DomainError::DomainError;
};

struct ExpectedVerdict {
    std::string verdict;  // holds | fails | unknown
    bool definite = true;
};

struct CorpusEntry {
    std::string name;
    std::string lhs, rhs;  // source text, plain terms
    ExpectedVerdict bohm, pwc, ctx_imp;
    std::string provenance;
};

struct RunConfig {
    long long fuel = default_fuel;
    int bohm_depth = 6;
    TypeBound bound;                  // width 2, depth 3 by default
    ContextSearchOptions ctx;
    std::uint64_t seed = 1;
    int jobs = 1;
};

std::vector<CorpusEntry> load_corpus(const std::string& path);

struct CorpusReport {
    nlohmann::json json_report;
    int mismatches = 0;
    bool all_consistent = true;
};

// Runs the crosscheck on every entry and compares against the expected
// verdicts; deterministic under a fixed seed and config.
CorpusReport run_corpus(const std::vector<CorpusEntry>& entries, const RunConfig& cfg);

} // namespace checkers
