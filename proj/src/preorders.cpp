#include "checkers/preorders.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

#include "checkers/combinators.hpp"
#include "checkers/syntax.hpp"
#include "checkers/whitening.hpp"

namespace checkers {

std::string verdict_name(VerdictTag t) {
    switch (t) {
        case VerdictTag::Holds: return "holds";
        case VerdictTag::Fails: return "fails";
        case VerdictTag::Unknown: return "unknown";
    }
    return "unknown";
}

namespace {

Verdict mk(VerdictTag tag, bool definite, std::string detail) {
    Verdict v;
    v.tag = tag;
    v.definite = definite;
    v.detail = std::move(detail);
    return v;
}

} // namespace

Verdict pwc_check_checkers(const Term& t, const Term& u, const TypeBound& bound,
                           long long fuel) {
    Enumeration et = enumerate_typings(t, bound, fuel);
    if (et.fuel_exhausted)
        return mk(VerdictTag::Unknown, false, "fuel exhausted while evaluating the left term");
    if (et.diverged || et.items.empty())
        return mk(VerdictTag::Holds, et.diverged,
                  et.diverged ? "left interpretation is empty (divergent)"
                              : "left interpretation is empty within the bound");

    TypingOracle oracle(u, bound, fuel);
    if (oracle.fuel_exhausted())
        return mk(VerdictTag::Unknown, false, "fuel exhausted while evaluating the right term");

    // Min index of u's typings per (env, type), filled lazily per type.
    std::map<std::string, std::map<std::string, long long>> best_by_type;
    auto best_for = [&](const LinearType& type) -> const std::map<std::string, long long>& {
        auto it = best_by_type.find(type.key());
        if (it != best_by_type.end()) return it->second;
        std::map<std::string, long long> envs;
        for (const auto& d : oracle.at(type)) {
            std::string k = d.env.key();
            auto e = envs.find(k);
            if (e == envs.end() || d.index < e->second) envs[k] = d.index;
        }
        return best_by_type.emplace(type.key(), std::move(envs)).first->second;
    };

    std::vector<PwcMatch> matches;
    for (const auto& [ty, d] : et.items) {
        if (!typing_supported(ty, bound)) continue;  // beyond the bound's reach
        std::vector<PairChange> positions = whitenable_positions(Polarity::Pos, ty.env, ty.type);
        if (positions.size() > 20)
            return mk(VerdictTag::Unknown, false, "too many candidate whitenings");
        bool matched = false;
        std::uint64_t subsets = 1ull << positions.size();
        for (std::uint64_t mask = 0; mask < subsets && !matched; ++mask) {
            long long delta = static_cast<long long>(__builtin_popcountll(mask));
            if (delta > ty.index) continue;
            TypeEnv env = ty.env;
            LinearType type = ty.type;
            for (std::size_t i = 0; i < positions.size(); ++i) {
                if (!(mask & (1ull << i))) continue;
                const PairChange& ch = positions[i];
                if (ch.in_env)
                    env.set(ch.var, recolor_at(env.get(ch.var), ch.path, Color::White));
                else
                    type = recolor_at(type, ch.path, Color::White);
            }
            const auto& envs = best_for(type);
            auto it = envs.find(env.key());
            if (it != envs.end() && it->second + delta <= ty.index) {
                matched = true;
                auto w = decide_whitening_pair(Polarity::Pos, env, type, ty.env, ty.type);
                if (!w || w->count != delta)
                    throw DomainError("whiter candidate does not recheck");
                matches.push_back(PwcMatch{ty, Typing{env, type, it->second}, delta,
                                           std::move(*w)});
            }
        }
        if (!matched) {
            if (!oracle.complete())
                return mk(VerdictTag::Unknown, false,
                          "right enumeration truncated on a needed skeleton");
            Verdict v = mk(VerdictTag::Fails, true,
                           "typing of the left term has no whiter-cheaper match: " +
                               print_typing(ty));
            v.counterexample = ty;
            return v;
        }
    }
    Verdict v = mk(VerdictTag::Holds, false, "all typings matched within the bound");
    v.matches = std::move(matches);
    return v;
}

Verdict pwc_check(const Term& t, const Term& u, const TypeBound& bound, long long fuel) {
    return pwc_check_checkers(paint(Color::Black, wash(t)), paint(Color::Black, wash(u)),
                              bound, fuel);
}

namespace {

struct ArgEntry {
    Term term;       // plain
    int size;
    std::string name;
};

std::vector<ArgEntry> argument_library(int max_combinator, const std::string& free_var) {
    std::vector<ArgEntry> lib;
    lib.push_back({combinators::identity(), 1, "I"});
    for (int n = 1; n <= max_combinator; ++n)
        lib.push_back({combinators::tupler(n), n, "T" + std::to_string(n)});
    for (int n = 1; n <= max_combinator; ++n)
        for (int i = 1; i <= n; ++i)
            lib.push_back({combinators::selector(n, i), n,
                           "P" + std::to_string(n) + "_" + std::to_string(i)});
    lib.push_back({Term::var(free_var), 1, "var"});
    return lib;
}

Context build_context(const std::vector<std::string>& fv, int subst_tupler,
                      const std::vector<std::pair<Term, Color>>& args, Color app_color_default) {
    Context c = Context::hole();
    if (subst_tupler > 0 && !fv.empty()) {
        for (auto it = fv.rbegin(); it != fv.rend(); ++it)
            c = Context::abs(Color::White, *it, c);
        Term tup = paint(Color::White, combinators::tupler(subst_tupler));
        for (std::size_t i = 0; i < fv.size(); ++i)
            c = Context::app_left(Color::White, c, tup);
    }
    for (const auto& [a, col] : args) {
        (void)app_color_default;
        c = Context::app_left(col, c, a);
    }
    return c;
}

} // namespace

Verdict interaction_improvement_checkers(const Term& t, const Term& u,
                                         const ContextSearchOptions& opts) {
    std::set<std::string> fvset = free_vars(t);
    fvset.merge(free_vars(u));
    std::vector<std::string> fv(fvset.begin(), fvset.end());

    // A fresh variable usable as a search argument; it must escape the
    // substitution prefix that binds the free variables of t and u.
    std::vector<ArgEntry> lib =
        argument_library(opts.max_combinator, fresh_name("ctxvar", fvset));
    std::vector<Color> arg_colors =
        opts.white_only ? std::vector<Color>{Color::White}
                        : std::vector<Color>{Color::White, Color::Black};

    bool unknown_seen = false;
    Verdict found;

    std::vector<std::pair<Term, Color>> args;
    std::function<bool(int, int)> search = [&](int remaining_size, int remaining_args) -> bool {
        // Try the current candidate.
        for (int subst : fv.empty() ? std::vector<int>{0}
                                    : std::vector<int>{0, 1, 2, opts.max_combinator}) {
            Context c = build_context(fv, subst, args, Color::White);
            EvalResult rt = evaluate_head(plug(c, t), opts.fuel);
            if (!rt.normal()) {
                if (!rt.diverged()) unknown_seen = true;
                continue;
            }
            EvalResult ru = evaluate_head(plug(c, u), opts.fuel);
            if (!ru.normal()) {
                if (ru.diverged()) {
                    found = mk(VerdictTag::Fails, true,
                               "context separates: right side diverges");
                    found.separating_context = c;
                    found.count_lhs = rt.interactions;
                    found.count_rhs = -1;
                    return true;
                }
                unknown_seen = true;
                continue;
            }
            if (ru.interactions > rt.interactions) {
                found = mk(VerdictTag::Fails, true,
                           "context separates with counts " +
                               std::to_string(rt.interactions) + " vs " +
                               std::to_string(ru.interactions));
                found.separating_context = c;
                found.count_lhs = rt.interactions;
                found.count_rhs = ru.interactions;
                return true;
            }
        }
        if (remaining_args == 0) return false;
        for (const auto& entry : lib) {
            if (entry.size > remaining_size) continue;
            for (Color col : arg_colors) {
                Term painted = entry.name == "var" ? entry.term : paint(col, entry.term);
                args.emplace_back(painted, col);
                bool hit = search(remaining_size - entry.size, remaining_args - 1);
                args.pop_back();
                if (hit) return true;
            }
        }
        return false;
    };

    if (search(opts.max_size, opts.max_args)) return found;
    Verdict v = mk(VerdictTag::Holds, false,
                   unknown_seen ? "no separator found within the bound (some contexts hit fuel)"
                                : "no separator found within the bound");
    return v;
}

Verdict interaction_improvement_check(const Term& t, const Term& u,
                                      const ContextSearchOptions& opts) {
    return interaction_improvement_checkers(paint(Color::Black, wash(t)),
                                            paint(Color::Black, wash(u)), opts);
}

SeparatorResult bohm_out_separator(const Term& t, const Term& u, int depth, long long fuel) {
    BohmCompareResult cmp = bohm_le_eta(t, u, depth, fuel);
    if (cmp.verdict != BohmVerdict::Fails)
        throw PreconditionFailed("terms are not separated by the Böhm comparison");
    if (cmp.fail_kind != BohmFailKind::EtaGapRight || !cmp.path_spines_equal)
        throw PreconditionFailed(
            "failure is not an eta-gap along a spine-equal path; classical Böhm-out applies");

    std::size_t need = cmp.gap.args + cmp.gap.extra;
    for (const auto& lvl : cmp.levels) need = std::max(need, lvl.args);
    int big = static_cast<int>(need) + 2;
    Term tupler = paint(Color::White, combinators::tupler(big));

    std::vector<Term> args;  // white-painted, applied left to right
    if (cmp.gap.head_bound)
        for (std::size_t i = 0; i < cmp.gap.binders; ++i) args.push_back(tupler);
    for (std::size_t li = cmp.levels.size(); li-- > 0;) {
        const BohmPathLevel& lvl = cmp.levels[li];
        std::vector<Term> prefix;
        std::size_t copies = lvl.binders + static_cast<std::size_t>(big) - lvl.args;
        for (std::size_t i = 0; i < copies; ++i) prefix.push_back(tupler);
        prefix.push_back(
            paint(Color::White, combinators::selector(big, static_cast<int>(lvl.child) + 1)));
        prefix.insert(prefix.end(), args.begin(), args.end());
        args = std::move(prefix);
    }

    std::set<std::string> fvset = free_vars(t);
    fvset.merge(free_vars(u));

    Context c = Context::hole();
    for (auto it = fvset.rbegin(); it != fvset.rend(); ++it)
        c = Context::abs(Color::White, *it, c);
    for (std::size_t i = 0; i < fvset.size(); ++i) c = Context::app_left(Color::White, c, tupler);
    for (const auto& a : args) c = Context::app_left(Color::White, c, a);

    EvalResult rt = evaluate_head(plug(c, paint(Color::Black, wash(t))), fuel);
    EvalResult ru = evaluate_head(plug(c, paint(Color::Black, wash(u))), fuel);
    if (!rt.normal() || !ru.normal() || ru.interactions <= rt.interactions)
        throw DomainError("synthesized context failed engine verification");

    // Report the plain context; counts come from the white-painted run.
    Context plain = Context::hole();
    for (auto it = fvset.rbegin(); it != fvset.rend(); ++it)
        plain = Context::abs(plain_color, *it, plain);
    Term plain_tupler = combinators::tupler(big);
    for (std::size_t i = 0; i < fvset.size(); ++i)
        plain = Context::app_left(plain_color, plain, plain_tupler);
    for (const auto& a : args) plain = Context::app_left(plain_color, plain, wash(a));

    return SeparatorResult{plain, rt.interactions, ru.interactions};
}

CrosscheckReport crosscheck_main_theorem(const Term& t, const Term& u,
                                         const CrosscheckConfig& cfg) {
    CrosscheckReport rep;
    BohmCompareResult b = bohm_le_eta(wash(t), wash(u), cfg.bohm_depth, cfg.fuel);
    switch (b.verdict) {
        case BohmVerdict::Holds:
            rep.bohm = mk(VerdictTag::Holds, true,
                          b.reason.empty() ? "decided within the depth" : b.reason);
            break;
        case BohmVerdict::Fails: rep.bohm = mk(VerdictTag::Fails, true, b.reason); break;
        case BohmVerdict::Unknown: rep.bohm = mk(VerdictTag::Unknown, false, b.reason); break;
    }
    rep.pwc = pwc_check(t, u, cfg.bound, cfg.fuel);
    rep.ctx_imp = interaction_improvement_check(t, u, cfg.ctx);

    auto definite = [](const Verdict& v) { return v.definite && v.tag != VerdictTag::Unknown; };
    std::vector<const Verdict*> vs{&rep.bohm, &rep.pwc, &rep.ctx_imp};
    for (const auto* a : vs)
        for (const auto* b2 : vs)
            if (definite(*a) && definite(*b2) && a->tag != b2->tag) rep.consistent = false;
    return rep;
}

} // namespace checkers
