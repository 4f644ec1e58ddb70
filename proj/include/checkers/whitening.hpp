#pragma once

#include <optional>
#include <string>
#include <vector>

#include "checkers/derivation.hpp"
#include "checkers/types.hpp"

namespace checkers {

class WitnessMismatch : public DomainError {
public:
    using DomainError::DomainError;
};

// Witness tree for T' ⊑^p_k T: T' is obtained from T by whitening k arrows
// occurring at polarity p. lhs is always the whiter side.
struct Whitening {
    enum class Kind { Atom, ArrowWhiten, ArrowSame, Multi, Env, Pair };

    Kind kind;
    Polarity pol = Polarity::Pos;
    long long count = 0;

    std::optional<LinearType> ltype_lhs, ltype_rhs;
    std::optional<MultiType> mtype_lhs, mtype_rhs;
    std::optional<TypeEnv> env_lhs, env_rhs;

    // Multi: lhs element i is paired with rhs element perm[i].
    std::vector<std::size_t> perm;
    // Env: the variable of each kid, in order.
    std::vector<std::string> vars;

    std::vector<Whitening> kids;
};

bool check_whitening(const Whitening& w);

std::optional<Whitening> decide_whitening(Polarity p, const LinearType& lhs,
                                          const LinearType& rhs);
std::optional<Whitening> decide_whitening(Polarity p, const MultiType& lhs,
                                          const MultiType& rhs);
std::optional<Whitening> decide_whitening(Polarity p, const TypeEnv& lhs, const TypeEnv& rhs);

// Pair whitening ⟨Γ'; T'⟩ ⊑^p_k ⟨Γ; T⟩: the environment is compared at the
// opposite polarity.
std::optional<Whitening> decide_whitening_pair(Polarity p, const TypeEnv& env_lhs,
                                               const LinearType& t_lhs,
                                               const TypeEnv& env_rhs,
                                               const LinearType& t_rhs);
std::optional<Whitening> decide_whitening_pair_multi(Polarity p, const TypeEnv& env_lhs,
                                                     const MultiType& t_lhs,
                                                     const TypeEnv& env_rhs,
                                                     const MultiType& t_rhs);

// Transitivity: w1 : A ⊑^p_{k1} B and w2 : B ⊑^p_{k2} C give A ⊑^p_{k1+k2} C.
Whitening compose_whitening(const Whitening& w1, const Whitening& w2);

// Inversion: moves the binding of x between the environment and an arrow,
// preserving the count.
Whitening invert_pair_to_arrow(const Whitening& pair_witness, const std::string& x, Color a);
Whitening invert_pair_to_binding(const Whitening& arrow_witness, const std::string& x);

// One arrow occurrence inside a (env; type) pair.
struct PairChange {
    bool in_env = false;
    std::string var;         // when in_env
    std::vector<int> path;   // into the multi type of var, or into the type
};

// All positions whitenable under a pair relation at polarity p (black
// arrows at positive local polarity).
std::vector<PairChange> whitenable_positions(Polarity p, const TypeEnv& env,
                                             const LinearType& type);
std::vector<PairChange> whitenable_positions_multi(Polarity p, const TypeEnv& env,
                                                   const MultiType& type);

// The positions at which two positionally-aligned pairs differ (lhs white
// where rhs is black). Throws WitnessMismatch on skeleton mismatch.
std::vector<PairChange> pair_diff(const TypeEnv& env_lhs, const LinearType& t_lhs,
                                  const TypeEnv& env_rhs, const LinearType& t_rhs);

struct RepaintOutcome {
    Derivation derivation;
    // Number of extra positive whitenings in the result (the i of
    // repaint_one, or the k2 of the sequence version).
    long long whitened = 0;
    // Signed index shift of the new derivation against the input.
    long long index_delta = 0;
    // Witness: conclusion of `derivation` ⊑^+_{whitened} target.
    Whitening witness;
};

// Repainting: given a derivation and a single negative whitening of its
// conclusion pair, produce a derivation of the whitened typing, either with
// one extra positive whitening (i=1, same index) or exactly the target
// typing with the index shifted by one (i=0).
RepaintOutcome repaint_one(const Derivation& d, const TypeEnv& env_target,
                           const LinearType& type_target);

// Iterated repainting: target ⊑^-_{k1} conclusion, result satisfies
// |k - k'| <= k1 - whitened.
RepaintOutcome multirepaint(const Derivation& d, const TypeEnv& env_target,
                            const LinearType& type_target);
RepaintOutcome multirepaint_multi(const Derivation& d, const TypeEnv& env_target,
                                  const MultiType& type_target);

enum class AppRepaintSide {
    ArgWhiter,      // N ⊑^+_δ M: the argument's multi type is whiter
    ArrowArgWhiter, // M ⊑^-_δ N: the arrow's argument is whiter
};

struct AppRepaintResult {
    Derivation derivation;  // types t @b u
    long long delta_prime = 0;
    Whitening witness;      // conclusion ⊑^+_{delta'} ⟨Γ+Δ; L⟩
};

// Application repainting: combines Γ ⊢k t : M ->a L and Δ ⊢l u : N whose
// argument types differ by δ whitenings into a typing of t @b u with
// m <= k + l + xor(a,b) + δ - δ'.
AppRepaintResult app_repaint(const Derivation& fun, const Derivation& arg,
                             AppRepaintSide side, Color app_color);

// Commutation of one negative and one positive whitening of the same pair:
// the completing corner carries both changes.
struct CommuteResult {
    TypeEnv env;
    LinearType type;
    Whitening pos_from_neg;  // corner ⊑^+_1 negative side
    Whitening neg_from_pos;  // corner ⊑^-_1 positive side
};

CommuteResult commute_whitening(const TypeEnv& env, const LinearType& type,
                                const PairChange& neg_change, const PairChange& pos_change);

} // namespace checkers
