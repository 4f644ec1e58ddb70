#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "checkers/reduce.hpp"
#include "checkers/term.hpp"

namespace checkers {

// Finite approximant of a Böhm tree. Bottom marks head divergence within
// fuel; Cut marks the depth frontier.
struct BohmApproximant {
    enum class Kind { Bottom, Cut, Node };
    Kind kind = Kind::Bottom;
    std::vector<std::string> binders;
    std::string head;
    std::vector<BohmApproximant> children;
};

BohmApproximant bohm_approximant(const Term& plain, int depth,
                                 long long fuel = default_fuel);
std::string print_approximant(const BohmApproximant& a);

enum class BohmVerdict { Holds, Fails, Unknown };

// Why a comparison failed; EtaGapRight is the separator-eligible shape
// (u's spine has m extra binders matched by m extra arguments).
enum class BohmFailKind {
    EtaGapRight,
    SpineMismatch,
    RightDiverges,
};

// Spine data recorded along a failing path, for the Böhm-out construction.
struct BohmPathLevel {
    std::size_t binders = 0;  // n of t's hnf at this level
    std::size_t args = 0;     // k, spine length
    bool head_bound = false;
    std::size_t child = 0;    // index of the failing child
};

struct BohmGapInfo {
    std::size_t binders = 0;  // n, shared binder prefix
    std::size_t args = 0;     // k, t's spine length
    std::size_t extra = 0;    // m > 0, u's surplus binders and arguments
    bool head_bound = false;
};

struct BohmCompareResult {
    BohmVerdict verdict = BohmVerdict::Unknown;
    std::string reason;  // unknown reason (depth/fuel) or failure summary
    // On Fails: path of child indices (0-based) to the failing node.
    std::vector<std::size_t> fail_path;
    BohmFailKind fail_kind = BohmFailKind::SpineMismatch;
    // True when every ancestor along fail_path has exactly matching spines,
    // as the Böhm-out construction requires.
    bool path_spines_equal = false;
    std::vector<BohmPathLevel> levels;  // one per ancestor along fail_path
    BohmGapInfo gap;                    // endpoint data when EtaGapRight
};

// Decides the Böhm preorder up to eta-reductions on t's side, to the given
// depth. Divergence counts only when the head reduction provably loops;
// plain fuel exhaustion yields Unknown.
BohmCompareResult bohm_le_eta(const Term& t, const Term& u, int depth,
                              long long fuel = default_fuel);

} // namespace checkers
