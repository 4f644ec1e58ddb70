#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "checkers/term.hpp"

namespace checkers {

// Whether a root redex is internal to one player or crosses colors.
enum class RedexKind { Silent, Interaction };

enum class StepKind { SilentHead, InteractionHead, SilentInternal, InteractionInternal };

constexpr bool is_interaction(StepKind k) {
    return k == StepKind::InteractionHead || k == StepKind::InteractionInternal;
}
constexpr bool is_head(StepKind k) {
    return k == StepKind::SilentHead || k == StepKind::InteractionHead;
}

// Some(kind) iff t = (\a x. b) @c u at the root.
std::optional<RedexKind> classify_redex(const Term& t);

// Contracts the unique head redex, if any. None iff t is a checkers hnf.
std::optional<std::pair<Term, StepKind>> head_step(const Term& t);

bool is_hnf(const Term& t);

struct TraceStep {
    Term term;       // the term reached after the step
    StepKind kind;
};

struct EvalResult {
    enum class Status { Normal, FuelExhausted };
    Status status = Status::Normal;
    Term final_term;
    long long interactions = 0;
    long long silents = 0;
    std::vector<TraceStep> trace;
    // On FuelExhausted: an alpha-equal term was revisited, so the head
    // reduction provably loops.
    bool cycle = false;

    bool normal() const { return status == Status::Normal; }
    bool diverged() const { return status == Status::FuelExhausted && cycle; }
};

inline constexpr long long default_fuel = 10000;

// Iterated head reduction with interaction counting: realizes t ⇓ι k.
EvalResult evaluate_head(const Term& t, long long fuel = default_fuel,
                         bool record_trace = false);

// Node selectors for addressing a redex: descend into an abstraction body,
// an application function, or an application argument.
enum class PathStep { Body, Fun, Arg };
using TermPath = std::vector<PathStep>;

class NotARedex : public DomainError {
public:
    using DomainError::DomainError;
};

// Contracts the redex at `path`; the filter, when given, requires the redex
// to be of that kind. Throws NotARedex otherwise.
Term reduce_at(const Term& t, const TermPath& path,
               std::optional<RedexKind> filter = std::nullopt);

// All redex positions of t, leftmost-outermost first.
std::vector<TermPath> redex_positions(const Term& t);

// Leftmost-outermost beta-normalization; nullopt when fuel runs out.
std::optional<Term> normalize(const Term& t, long long fuel = default_fuel);

enum class ProbeVerdict { Holds, Unknown, CounterexampleFound };

struct ProbeReport {
    ProbeVerdict verdict = ProbeVerdict::Unknown;
    std::uint64_t seed = 0;
    std::optional<Term> normal_form;  // when Holds
    std::vector<Term> distinct_normal_forms;
};

// Runs `trials` random maximal reduction sequences; Holds when every
// terminating sequence ends in the same normal form up to alpha.
ProbeReport confluence_probe(const Term& t, int trials, long long fuel,
                             std::uint64_t seed);

// Independent head stepper for wash-normal terms, used to cross-check the
// painting/washing correspondence.
std::optional<Term> plain_head_step(const Term& t);

struct SimulationReport {
    bool holds = true;
    std::string detail;  // failure witness, printed
};

// Checks that plain (head) steps map to silent steps on the c-painting and
// that the washed trace matches, for up to `steps` steps.
SimulationReport simulate_plain(const Term& plain, Color c, int steps);

} // namespace checkers
