#pragma once

#include <optional>
#include <string>
#include <vector>

#include "checkers/reduce.hpp"
#include "checkers/term.hpp"
#include "checkers/types.hpp"

namespace checkers {

class TypeMismatch : public DomainError {
public:
    using DomainError::DomainError;
};
class TermMismatch : public DomainError {
public:
    using DomainError::DomainError;
};
class BadPartition : public DomainError {
public:
    using DomainError::DomainError;
};
class MarkingInvalid : public DomainError {
public:
    using DomainError::DomainError;
};
class StepMismatch : public DomainError {
public:
    using DomainError::DomainError;
};
class NotHnf : public DomainError {
public:
    using DomainError::DomainError;
};

// A full typing derivation tree. Ax, Lam and App conclude a linear type,
// Many concludes a multi type (its kids are linear derivations for the
// same subject).
struct Derivation {
    enum class Rule { Ax, Many, Lam, App };

    Rule rule;
    TypeEnv env;
    Term subject;
    std::optional<LinearType> ltype;  // set iff the node concludes a linear type
    std::optional<MultiType> mtype;   // set iff the node concludes a multi type
    long long index = 0;
    std::vector<Derivation> kids;

    bool concludes_linear() const { return ltype.has_value(); }
    const LinearType& linear() const;
    const MultiType& multi() const;
    Typing typing() const;
};

// Rule constructors; each computes the conclusion from its premises.
Derivation make_ax(const std::string& x, const LinearType& l);
Derivation make_many(const Term& subject, std::vector<Derivation> kids);
Derivation make_lam(Color c, const std::string& binder, Derivation body);
Derivation make_app(Color app_color, Derivation fun, Derivation arg);

// Number of @ nodes.
std::size_t applicative_size(const Derivation& d);

struct CheckFailure {
    std::string path;    // kid indices, dot-separated; empty = root
    std::string reason;
};

// Validates every node against its rule, including the index arithmetic.
std::optional<CheckFailure> check_derivation(const Derivation& d);
bool checks(const Derivation& d);

// Zero-weight typing of a checkers hnf, following the canonical
// construction: the head variable gets [] -> ... -> [] -> X and every
// spine argument is typed with the empty multi type.
Derivation hnf_zero_derivation(const Term& hnf);

// Splits a Many derivation for M = N + O into its two halves.
// Environments split pointwise, indices and applicative sizes add up.
std::pair<Derivation, Derivation> split_derivation(const Derivation& d,
                                                   const MultiType& n,
                                                   const MultiType& o);

// Regroups two Many derivations for the same term.
Derivation merge_derivations(const Derivation& d1, const Derivation& d2);

// Renames every binder of d's subject so that none lands in `avoid`,
// consistently through the tree.
Derivation rename_binders_avoiding(const Derivation& d, const std::set<std::string>& avoid);

// Substitution lemma: plugs a Many derivation for u : env(x) into d,
// yielding a derivation of t{x:=u} with index k+k' and size |d|+|e|.
Derivation substitute_derivation(const Derivation& d, const std::string& x,
                                 const Derivation& e);

struct AntiSubstitution {
    MultiType m;
    Derivation for_pattern;  // env + x:M ⊢ pattern : T
    Derivation for_argument; // ⊢ u : M, a Many node
};

// Inverse of the substitution lemma. `pattern` marks the occurrences of u
// inside d's subject with the variable x (x must not occur free in u).
AntiSubstitution anti_substitute(const Derivation& d, const Term& pattern,
                                 const std::string& x, const Term& u);

// Quantitative subject reduction along the unique head step of d's subject.
// The returned index is k-1 on an interaction step, k on a silent one, and
// the applicative size always drops by exactly 1.
std::pair<Derivation, StepKind> head_reduce_derivation(const Derivation& d);

// Subject expansion through the head step before -> d.subject.
Derivation head_expand_derivation(const Derivation& d, const Term& before);

struct Enumeration {
    std::vector<std::pair<Typing, Derivation>> items;
    bool complete = true;    // false when fuel or the unfold budget truncated
    bool diverged = false;   // head reduction provably loops: ⟦t⟧ = {}
    bool fuel_exhausted = false;
};

// Enumerates elements of the colored interpretation of t within the bound:
// head-evaluate, enumerate hnf typings, pull back through the trace.
Enumeration enumerate_typings(const Term& t, const TypeBound& bound,
                              long long fuel = default_fuel);

// Targeted interpretation membership: all derivations of one term at a
// requested conclusion type. The conclusion type itself may exceed the
// bound; only the enumerator's free choices are bounded.
class TypingOracle {
public:
    TypingOracle(Term t, const TypeBound& bound, long long fuel = default_fuel);
    ~TypingOracle();
    TypingOracle(TypingOracle&&) noexcept;

    // Derivations with conclusion type exactly `type`; memoized.
    const std::vector<Derivation>& at(const LinearType& type);
    // False once a query was truncated by fuel or the unfold budget.
    bool complete() const;
    bool diverged() const;
    bool fuel_exhausted() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

enum class Soundness { Holds, Fails, Unknown };

// Evaluates t and checks the interaction count against the index of d.
Soundness check_soundness(const Term& t, const Derivation& d, long long fuel = default_fuel);

} // namespace checkers
