#pragma once

#include <optional>
#include <string>
#include <vector>

#include "checkers/bohm.hpp"
#include "checkers/derivation.hpp"
#include "checkers/term.hpp"
#include "checkers/types.hpp"
#include "checkers/whitening.hpp"

namespace checkers {

enum class VerdictTag { Holds, Fails, Unknown };

// One matched typing of a whiter-cheaper check: `from` in the left
// interpretation, `to` in the right one, with a rechecking witness for
// ⟨to⟩ ⊑+_delta ⟨from⟩ and from.index >= to.index + delta.
struct PwcMatch {
    Typing from;
    Typing to;
    long long delta = 0;
    Whitening witness;
};

// Three-valued verdict. Definite outcomes carry machine-checkable
// witnesses; bounded positives keep tag Holds with definite = false.
struct Verdict {
    VerdictTag tag = VerdictTag::Unknown;
    bool definite = false;
    std::string detail;
    std::optional<Typing> counterexample;        // pwc: unmatched typing of t
    std::vector<PwcMatch> matches;               // pwc: witness map on Holds
    std::optional<Context> separating_context;   // ctx-imp: refuting context
    long long count_lhs = -1;                    // interaction counts under it
    long long count_rhs = -1;

    bool holds() const { return tag == VerdictTag::Holds; }
    bool fails() const { return tag == VerdictTag::Fails; }
};

std::string verdict_name(VerdictTag t);

// Polarized whiter-cheaper improvement, decided on the colored
// interpretations within the bound. The plain version paints both black.
Verdict pwc_check_checkers(const Term& t, const Term& u, const TypeBound& bound,
                           long long fuel = default_fuel);
Verdict pwc_check(const Term& t, const Term& u, const TypeBound& bound,
                  long long fuel = default_fuel);

struct ContextSearchOptions {
    bool white_only = true;  // white head applicative contexts only
    int max_args = 2;
    int max_size = 8;
    int max_combinator = 3;
    long long fuel = default_fuel;
};

// Searches head applicative contexts for one where u needs more
// interactions than t (or diverges while t converges). Holds is always
// bounded (definite = false).
Verdict interaction_improvement_checkers(const Term& t, const Term& u,
                                         const ContextSearchOptions& opts);
Verdict interaction_improvement_check(const Term& t, const Term& u,
                                      const ContextSearchOptions& opts);

class PreconditionFailed : public DomainError {
public:
    using DomainError::DomainError;
};

struct SeparatorResult {
    Context plain_context;   // to be white-painted
    long long count_lhs = 0; // interactions of C°[t•]
    long long count_rhs = 0; // interactions of C°[u•], strictly larger
};

// Interaction Böhm-out: for t ⋢ u failing through an eta-gap on u's side
// along a spine-equal path, synthesizes a separating context from tuplers
// and selectors and verifies it with the engine.
SeparatorResult bohm_out_separator(const Term& t, const Term& u, int depth,
                                   long long fuel = default_fuel);

struct CrosscheckConfig {
    int bohm_depth = 6;
    TypeBound bound;
    ContextSearchOptions ctx;
    long long fuel = default_fuel;
};

struct CrosscheckReport {
    Verdict bohm;
    Verdict pwc;
    Verdict ctx_imp;
    // False when two definite verdicts disagree, which would indicate an
    // implementation bug.
    bool consistent = true;
};

CrosscheckReport crosscheck_main_theorem(const Term& t, const Term& u,
                                         const CrosscheckConfig& cfg);

} // namespace checkers
