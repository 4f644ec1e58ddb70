#include "checkers/reduce.hpp"

#include <random>
#include <unordered_set>

#include "checkers/syntax.hpp"

namespace checkers {

std::optional<RedexKind> classify_redex(const Term& t) {
    if (!t.is_app() || !t.fun().is_abs()) return std::nullopt;
    return t.fun().color() == t.color() ? RedexKind::Silent : RedexKind::Interaction;
}

namespace {

// The head redex sits at the bottom of the spine of abstractions and left
// applications: H = \a⃗ x⃗. <> t1 ... tk.
std::optional<TermPath> head_redex_path(const Term& t) {
    TermPath path;
    const Term* cur = &t;
    Term hold = t;
    while (true) {
        if (cur->is_abs()) {
            path.push_back(PathStep::Body);
            hold = cur->body();
            cur = &hold;
        } else if (cur->is_app()) {
            if (cur->fun().is_abs()) return path;
            if (cur->fun().is_var()) return std::nullopt;
            path.push_back(PathStep::Fun);
            hold = cur->fun();
            cur = &hold;
        } else {
            return std::nullopt;  // head variable
        }
    }
}

Term subterm_at(const Term& t, const TermPath& path, std::size_t from = 0) {
    Term cur = t;
    for (std::size_t i = from; i < path.size(); ++i) {
        switch (path[i]) {
            case PathStep::Body: cur = cur.body(); break;
            case PathStep::Fun: cur = cur.fun(); break;
            case PathStep::Arg: cur = cur.arg(); break;
        }
    }
    return cur;
}

Term replace_at(const Term& t, const TermPath& path, std::size_t i, const Term& repl) {
    if (i == path.size()) return repl;
    switch (path[i]) {
        case PathStep::Body:
            return Term::abs(t.color(), t.name(), replace_at(t.body(), path, i + 1, repl));
        case PathStep::Fun:
            return Term::app(t.color(), replace_at(t.fun(), path, i + 1, repl), t.arg());
        case PathStep::Arg:
            return Term::app(t.color(), t.fun(), replace_at(t.arg(), path, i + 1, repl));
    }
    throw DomainError("unreachable");
}

Term contract(const Term& redex) {
    return substitute(redex.fun().body(), redex.fun().name(), redex.arg());
}

} // namespace

bool is_hnf(const Term& t) { return !head_redex_path(t).has_value(); }

std::optional<std::pair<Term, StepKind>> head_step(const Term& t) {
    auto path = head_redex_path(t);
    if (!path) return std::nullopt;
    Term redex = subterm_at(t, *path);
    RedexKind k = *classify_redex(redex);
    Term result = replace_at(t, *path, 0, contract(redex));
    StepKind sk = (k == RedexKind::Silent) ? StepKind::SilentHead : StepKind::InteractionHead;
    return std::make_pair(result, sk);
}

EvalResult evaluate_head(const Term& t, long long fuel, bool record_trace) {
    EvalResult res{EvalResult::Status::Normal, t, 0, 0, {}, false};
    std::unordered_set<std::string> seen;
    seen.insert(alpha_key(t));
    Term cur = t;
    for (long long used = 0;; ++used) {
        auto step = head_step(cur);
        if (!step) {
            res.status = EvalResult::Status::Normal;
            res.final_term = cur;
            return res;
        }
        if (used >= fuel) {
            res.status = EvalResult::Status::FuelExhausted;
            res.final_term = cur;
            return res;
        }
        cur = step->first;
        if (step->second == StepKind::InteractionHead)
            ++res.interactions;
        else
            ++res.silents;
        if (record_trace) res.trace.push_back({cur, step->second});
        if (!seen.insert(alpha_key(cur)).second) {
            res.status = EvalResult::Status::FuelExhausted;
            res.final_term = cur;
            res.cycle = true;
            return res;
        }
    }
}

Term reduce_at(const Term& t, const TermPath& path, std::optional<RedexKind> filter) {
    Term sub = t;
    for (auto s : path) {
        switch (s) {
            case PathStep::Body:
                if (!sub.is_abs()) throw NotARedex("path selects body of a non-abstraction");
                sub = sub.body();
                break;
            case PathStep::Fun:
                if (!sub.is_app()) throw NotARedex("path selects fun of a non-application");
                sub = sub.fun();
                break;
            case PathStep::Arg:
                if (!sub.is_app()) throw NotARedex("path selects arg of a non-application");
                sub = sub.arg();
                break;
        }
    }
    auto kind = classify_redex(sub);
    if (!kind) throw NotARedex("addressed node is not a beta redex");
    if (filter && *kind != *filter)
        throw NotARedex("addressed redex has the wrong kind");
    return replace_at(t, path, 0, contract(sub));
}

namespace {

void collect_redexes(const Term& t, TermPath& path, std::vector<TermPath>& out) {
    if (classify_redex(t)) out.push_back(path);
    switch (t.kind()) {
        case Term::Kind::Var: return;
        case Term::Kind::Abs:
            path.push_back(PathStep::Body);
            collect_redexes(t.body(), path, out);
            path.pop_back();
            return;
        case Term::Kind::App:
            path.push_back(PathStep::Fun);
            collect_redexes(t.fun(), path, out);
            path.pop_back();
            path.push_back(PathStep::Arg);
            collect_redexes(t.arg(), path, out);
            path.pop_back();
            return;
    }
}

} // namespace

std::vector<TermPath> redex_positions(const Term& t) {
    std::vector<TermPath> out;
    TermPath path;
    collect_redexes(t, path, out);
    return out;
}

std::optional<Term> normalize(const Term& t, long long fuel) {
    Term cur = t;
    for (long long i = 0; i < fuel; ++i) {
        auto rs = redex_positions(cur);
        if (rs.empty()) return cur;
        cur = reduce_at(cur, rs.front());
    }
    return redex_positions(cur).empty() ? std::optional<Term>(cur) : std::nullopt;
}

ProbeReport confluence_probe(const Term& t, int trials, long long fuel, std::uint64_t seed) {
    ProbeReport rep;
    rep.seed = seed;
    std::mt19937_64 rng(seed);
    std::vector<std::pair<std::string, Term>> nfs;
    for (int i = 0; i < trials; ++i) {
        Term cur = t;
        bool done = false;
        for (long long s = 0; s < fuel; ++s) {
            auto rs = redex_positions(cur);
            if (rs.empty()) {
                done = true;
                break;
            }
            std::uniform_int_distribution<std::size_t> pick(0, rs.size() - 1);
            cur = reduce_at(cur, rs[pick(rng)]);
        }
        if (!done && redex_positions(cur).empty()) done = true;
        if (done) {
            std::string k = alpha_key(cur);
            bool known = false;
            for (auto& [key, term] : nfs) known = known || key == k;
            if (!known) nfs.emplace_back(k, cur);
        }
    }
    for (auto& [k, term] : nfs) rep.distinct_normal_forms.push_back(term);
    if (nfs.empty())
        rep.verdict = ProbeVerdict::Unknown;
    else if (nfs.size() == 1) {
        rep.verdict = ProbeVerdict::Holds;
        rep.normal_form = nfs.front().second;
    } else
        rep.verdict = ProbeVerdict::CounterexampleFound;
    return rep;
}

std::optional<Term> plain_head_step(const Term& t) {
    // Separate code path over the washed structure, ignoring colors.
    if (t.is_abs()) {
        auto inner = plain_head_step(t.body());
        if (!inner) return std::nullopt;
        return Term::abs(t.color(), t.name(), *inner);
    }
    if (t.is_app()) {
        if (t.fun().is_abs())
            return substitute(t.fun().body(), t.fun().name(), t.arg());
        auto inner = plain_head_step(t.fun());
        if (!inner) return std::nullopt;
        return Term::app(t.color(), *inner, t.arg());
    }
    return std::nullopt;
}

SimulationReport simulate_plain(const Term& plain, Color c, int steps) {
    SimulationReport rep;
    Term p = wash(plain);
    Term painted = paint(c, p);
    for (int i = 0; i < steps; ++i) {
        auto ps = plain_head_step(p);
        auto cs = head_step(painted);
        if (!ps) {
            if (cs) {
                rep.holds = false;
                rep.detail = "painted term steps past the plain hnf: " + print_term(painted);
            }
            return rep;
        }
        if (!cs) {
            rep.holds = false;
            rep.detail = "plain step not lifted by the painting at " + print_plain(p);
            return rep;
        }
        if (cs->second != StepKind::SilentHead) {
            rep.holds = false;
            rep.detail = "painted step is not silent at " + print_term(painted);
            return rep;
        }
        if (!alpha_eq(wash(cs->first), wash(*ps))) {
            rep.holds = false;
            rep.detail = "washed results diverge: " + print_plain(cs->first) + " vs " +
                         print_plain(*ps);
            return rep;
        }
        p = wash(*ps);
        painted = cs->first;
    }
    return rep;
}

} // namespace checkers
