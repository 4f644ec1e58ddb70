#include "checkers/derivation.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

#include "checkers/syntax.hpp"

namespace checkers {

const LinearType& Derivation::linear() const {
    if (!ltype) throw DomainError("derivation concludes a multi type");
    return *ltype;
}

const MultiType& Derivation::multi() const {
    if (!mtype) throw DomainError("derivation concludes a linear type");
    return *mtype;
}

Typing Derivation::typing() const { return Typing{env, linear(), index}; }

Derivation make_ax(const std::string& x, const LinearType& l) {
    Derivation d{Derivation::Rule::Ax, TypeEnv{}, Term::var(x), l, std::nullopt, 0, {}};
    d.env.set(x, MultiType({l}));
    return d;
}

Derivation make_many(const Term& subject, std::vector<Derivation> kids) {
    TypeEnv env;
    std::vector<LinearType> types;
    long long index = 0;
    for (const auto& k : kids) {
        if (!k.concludes_linear()) throw DomainError("many: kids must conclude linear types");
        if (!alpha_eq(k.subject, subject)) throw TermMismatch("many: kid subject differs");
        env = env.sum(k.env);
        types.push_back(k.linear());
        index += k.index;
    }
    return Derivation{Derivation::Rule::Many, std::move(env), subject,
                      std::nullopt, MultiType(std::move(types)), index, std::move(kids)};
}

Derivation make_lam(Color c, const std::string& binder, Derivation body) {
    if (!body.concludes_linear()) throw DomainError("lam: body must conclude a linear type");
    MultiType m = body.env.get(binder);
    TypeEnv env = body.env.without(binder);
    LinearType t = LinearType::arrow(m, c, body.linear());
    Term subject = Term::abs(c, binder, body.subject);
    long long index = body.index;
    std::vector<Derivation> kids;
    kids.push_back(std::move(body));
    return Derivation{Derivation::Rule::Lam, std::move(env), std::move(subject),
                      std::move(t), std::nullopt, index, std::move(kids)};
}

Derivation make_app(Color app_color, Derivation fun, Derivation arg) {
    if (!fun.concludes_linear() || !fun.linear().is_arrow())
        throw TypeMismatch("app: function part must have an arrow type");
    if (arg.concludes_linear()) throw TypeMismatch("app: argument part must be a many node");
    if (fun.linear().arg() != arg.multi())
        throw TypeMismatch("app: argument multi type does not match the arrow: " +
                           fun.linear().arg().key() + " vs " + arg.multi().key());
    Color arrow_color = fun.linear().color();
    LinearType t = fun.linear().result();
    TypeEnv env = fun.env.sum(arg.env);
    long long index = fun.index + arg.index + color_mismatch(arrow_color, app_color);
    Term subject = Term::app(app_color, fun.subject, arg.subject);
    std::vector<Derivation> kids;
    kids.push_back(std::move(fun));
    kids.push_back(std::move(arg));
    return Derivation{Derivation::Rule::App, std::move(env), std::move(subject),
                      std::move(t), std::nullopt, index, std::move(kids)};
}

std::size_t applicative_size(const Derivation& d) {
    std::size_t n = d.rule == Derivation::Rule::App ? 1 : 0;
    for (const auto& k : d.kids) n += applicative_size(k);
    return n;
}

namespace {

std::optional<CheckFailure> fail(const std::string& path, const std::string& reason) {
    return CheckFailure{path, reason};
}

std::optional<CheckFailure> check_rec(const Derivation& d, const std::string& path) {
    switch (d.rule) {
        case Derivation::Rule::Ax: {
            if (!d.subject.is_var()) return fail(path, "ax subject is not a variable");
            if (!d.ltype) return fail(path, "ax must conclude a linear type");
            if (!d.kids.empty()) return fail(path, "ax has premises");
            if (d.index != 0) return fail(path, "ax index must be 0");
            TypeEnv want;
            want.set(d.subject.name(), MultiType({*d.ltype}));
            if (d.env != want) return fail(path, "ax environment is not x:[L]");
            return std::nullopt;
        }
        case Derivation::Rule::Many: {
            if (!d.mtype) return fail(path, "many must conclude a multi type");
            std::vector<LinearType> types;
            TypeEnv env;
            long long idx = 0;
            for (std::size_t i = 0; i < d.kids.size(); ++i) {
                const auto& k = d.kids[i];
                std::string p = path.empty() ? std::to_string(i) : path + "." + std::to_string(i);
                if (!k.concludes_linear()) return fail(p, "many kid concludes a multi type");
                if (!alpha_eq(k.subject, d.subject)) return fail(p, "many kid subject differs");
                if (auto f = check_rec(k, p)) return f;
                types.push_back(k.linear());
                env = env.sum(k.env);
                idx += k.index;
            }
            if (MultiType(types) != *d.mtype) return fail(path, "many type is not the kid multiset");
            if (env != d.env) return fail(path, "many environment is not the kid sum");
            if (idx != d.index) return fail(path, "many index is not the kid sum");
            return std::nullopt;
        }
        case Derivation::Rule::Lam: {
            if (!d.subject.is_abs()) return fail(path, "lam subject is not an abstraction");
            if (!d.ltype || !d.ltype->is_arrow()) return fail(path, "lam must conclude an arrow");
            if (d.kids.size() != 1) return fail(path, "lam needs exactly one premise");
            if (d.ltype->color() != d.subject.color())
                return fail(path, "arrow color differs from the abstraction color");
            const auto& kid = d.kids[0];
            std::string p = path.empty() ? "0" : path + ".0";
            if (!kid.concludes_linear()) return fail(p, "lam premise concludes a multi type");
            if (!alpha_eq(kid.subject, d.subject.body()))
                return fail(p, "lam premise subject is not the body");
            if (kid.linear() != d.ltype->result()) return fail(p, "lam result type mismatch");
            const std::string& x = d.subject.name();
            if (d.env.contains(x)) return fail(path, "binder still in the conclusion environment");
            if (kid.env.get(x) != d.ltype->arg()) return fail(path, "arrow argument is not env(x)");
            if (kid.env.without(x) != d.env) return fail(path, "environment mismatch");
            if (kid.index != d.index) return fail(path, "lam index must match the premise");
            return check_rec(kid, p);
        }
        case Derivation::Rule::App: {
            if (!d.subject.is_app()) return fail(path, "app subject is not an application");
            if (!d.ltype) return fail(path, "app must conclude a linear type");
            if (d.kids.size() != 2) return fail(path, "app needs two premises");
            const auto& f = d.kids[0];
            const auto& a = d.kids[1];
            std::string pf = path.empty() ? "0" : path + ".0";
            std::string pa = path.empty() ? "1" : path + ".1";
            if (!f.concludes_linear() || !f.linear().is_arrow())
                return fail(pf, "function premise is not an arrow");
            if (a.concludes_linear()) return fail(pa, "argument premise is not a many node");
            if (!alpha_eq(f.subject, d.subject.fun())) return fail(pf, "function subject differs");
            if (!alpha_eq(a.subject, d.subject.arg())) return fail(pa, "argument subject differs");
            if (f.linear().arg() != a.multi()) return fail(path, "arrow argument mismatch");
            if (f.linear().result() != *d.ltype) return fail(path, "conclusion type mismatch");
            if (f.env.sum(a.env) != d.env) return fail(path, "environment is not the premise sum");
            long long want = f.index + a.index +
                             color_mismatch(f.linear().color(), d.subject.color());
            if (d.index != want) return fail(path, "index arithmetic violated");
            if (auto r = check_rec(f, pf)) return r;
            return check_rec(a, pa);
        }
    }
    return fail(path, "unknown rule");
}

} // namespace

std::optional<CheckFailure> check_derivation(const Derivation& d) { return check_rec(d, ""); }
bool checks(const Derivation& d) { return !check_derivation(d).has_value(); }

namespace {

struct HnfParts {
    std::vector<std::pair<Color, std::string>> binders;
    Term head;
    std::vector<std::pair<Color, Term>> args;  // innermost application first
};

HnfParts decompose_hnf(const Term& hnf) {
    if (!is_hnf(hnf)) throw NotHnf("term has a head redex: " + print_term(hnf));
    HnfParts parts{{}, hnf, {}};
    Term cur = hnf;
    while (cur.is_abs()) {
        parts.binders.emplace_back(cur.color(), cur.name());
        cur = cur.body();
    }
    std::vector<std::pair<Color, Term>> rev;
    while (cur.is_app()) {
        rev.emplace_back(cur.color(), cur.arg());
        cur = cur.fun();
    }
    parts.head = cur;
    parts.args.assign(rev.rbegin(), rev.rend());
    return parts;
}

} // namespace

Derivation hnf_zero_derivation(const Term& hnf) {
    HnfParts parts = decompose_hnf(hnf);
    LinearType result = LinearType::atom("X");
    for (auto it = parts.args.rbegin(); it != parts.args.rend(); ++it)
        result = LinearType::arrow(MultiType{}, it->first, result);
    Derivation cur = make_ax(parts.head.name(), result);
    for (const auto& [c, arg] : parts.args)
        cur = make_app(c, std::move(cur), make_many(arg, {}));
    for (auto it = parts.binders.rbegin(); it != parts.binders.rend(); ++it)
        cur = make_lam(it->first, it->second, std::move(cur));
    return cur;
}

namespace {

// Greedily assigns kids of a Many node to cover `need`; leftovers go to the
// second component.
std::pair<std::vector<Derivation>, std::vector<Derivation>> partition_kids(
    const std::vector<Derivation>& kids, const MultiType& need) {
    std::map<std::string, int> want;
    for (const auto& e : need.elems()) ++want[e.key()];
    std::vector<Derivation> taken, rest;
    for (const auto& k : kids) {
        auto it = want.find(k.linear().key());
        if (it != want.end() && it->second > 0) {
            --it->second;
            taken.push_back(k);
        } else {
            rest.push_back(k);
        }
    }
    for (const auto& [k, n] : want)
        if (n != 0) throw BadPartition("multiset is not covered by the premises");
    return {std::move(taken), std::move(rest)};
}

} // namespace

std::pair<Derivation, Derivation> split_derivation(const Derivation& d, const MultiType& n,
                                                   const MultiType& o) {
    if (d.rule != Derivation::Rule::Many)
        throw DomainError("split: only many nodes conclude multi types");
    if (n.sum(o) != d.multi()) throw BadPartition("N + O differs from the concluded multi type");
    auto [taken, rest] = partition_kids(d.kids, n);
    return {make_many(d.subject, std::move(taken)), make_many(d.subject, std::move(rest))};
}

Derivation merge_derivations(const Derivation& d1, const Derivation& d2) {
    if (d1.rule != Derivation::Rule::Many || d2.rule != Derivation::Rule::Many)
        throw DomainError("merge: both derivations must be many nodes");
    if (!alpha_eq(d1.subject, d2.subject)) throw TermMismatch("merge: subjects differ");
    std::vector<Derivation> kids = d1.kids;
    kids.insert(kids.end(), d2.kids.begin(), d2.kids.end());
    return make_many(d1.subject, std::move(kids));
}

namespace {

// Renames the free variable x to z everywhere (z fresh for the subject).
Derivation subst_free_var(const Derivation& d, const std::string& x, const std::string& z) {
    switch (d.rule) {
        case Derivation::Rule::Ax:
            return d.subject.name() == x ? make_ax(z, d.linear()) : d;
        case Derivation::Rule::Many: {
            if (d.kids.empty()) {
                Term subject = substitute(d.subject, x, Term::var(z));
                return make_many(subject, {});
            }
            std::vector<Derivation> kids;
            for (const auto& k : d.kids) kids.push_back(subst_free_var(k, x, z));
            Term subject = kids.front().subject;
            return make_many(subject, std::move(kids));
        }
        case Derivation::Rule::Lam: {
            if (d.subject.name() == x) return d;  // shadowed, no free x below
            return make_lam(d.subject.color(), d.subject.name(),
                            subst_free_var(d.kids[0], x, z));
        }
        case Derivation::Rule::App:
            return make_app(d.subject.color(), subst_free_var(d.kids[0], x, z),
                            subst_free_var(d.kids[1], x, z));
    }
    throw DomainError("unreachable");
}

Term rename_term_binders(const Term& t, const std::set<std::string>& avoid) {
    switch (t.kind()) {
        case Term::Kind::Var:
            return t;
        case Term::Kind::Abs: {
            std::string x = t.name();
            Term body = t.body();
            if (avoid.count(x)) {
                std::set<std::string> a = avoid;
                a.merge(free_vars(body));
                std::string z = fresh_name(x, a);
                body = substitute(body, x, Term::var(z));
                x = z;
            }
            std::set<std::string> a = avoid;
            a.insert(x);
            return Term::abs(t.color(), x, rename_term_binders(body, a));
        }
        case Term::Kind::App:
            return Term::app(t.color(), rename_term_binders(t.fun(), avoid),
                             rename_term_binders(t.arg(), avoid));
    }
    throw DomainError("unreachable");
}

} // namespace

Derivation rename_binders_avoiding(const Derivation& d, const std::set<std::string>& avoid) {
    switch (d.rule) {
        case Derivation::Rule::Ax:
            return d;
        case Derivation::Rule::Many: {
            if (d.kids.empty()) return make_many(rename_term_binders(d.subject, avoid), {});
            std::vector<Derivation> kids;
            for (const auto& k : d.kids) kids.push_back(rename_binders_avoiding(k, avoid));
            Term subject = kids.front().subject;
            return make_many(subject, std::move(kids));
        }
        case Derivation::Rule::Lam: {
            std::string x = d.subject.name();
            Derivation kid = d.kids[0];
            if (avoid.count(x)) {
                std::set<std::string> a = avoid;
                a.merge(free_vars(d.subject.body()));
                for (const auto& v : kid.env.support()) a.insert(v);
                std::string z = fresh_name(x, a);
                kid = subst_free_var(kid, x, z);
                x = z;
            }
            std::set<std::string> a = avoid;
            a.insert(x);
            return make_lam(d.subject.color(), x, rename_binders_avoiding(kid, a));
        }
        case Derivation::Rule::App:
            return make_app(d.subject.color(),
                            rename_binders_avoiding(d.kids[0], avoid),
                            rename_binders_avoiding(d.kids[1], avoid));
    }
    throw DomainError("unreachable");
}

namespace {

// Splits a Many derivation e into a part with exactly the multi type `need`
// and the remainder.
std::pair<Derivation, Derivation> take_part(const Derivation& e, const MultiType& need) {
    auto [taken, rest] = partition_kids(e.kids, need);
    return {make_many(e.subject, std::move(taken)), make_many(e.subject, std::move(rest))};
}

Derivation subst_rec(const Derivation& d, const std::string& x, const Derivation& e) {
    switch (d.rule) {
        case Derivation::Rule::Ax: {
            if (d.subject.name() == x) {
                if (e.kids.size() != 1)
                    throw TypeMismatch("substitution: axiom needs a singleton multi type");
                return e.kids[0];
            }
            if (!e.kids.empty()) throw TypeMismatch("substitution: unused premises remain");
            return d;
        }
        case Derivation::Rule::Many: {
            if (d.kids.empty()) {
                Term subject = substitute(d.subject, x, e.subject);
                return make_many(subject, {});
            }
            Derivation pool = e;
            std::vector<Derivation> kids;
            for (const auto& k : d.kids) {
                auto [mine, rest] = take_part(pool, k.env.get(x));
                kids.push_back(subst_rec(k, x, mine));
                pool = rest;
            }
            Term subject = kids.front().subject;
            return make_many(subject, std::move(kids));
        }
        case Derivation::Rule::Lam:
            return make_lam(d.subject.color(), d.subject.name(),
                            subst_rec(d.kids[0], x, e));
        case Derivation::Rule::App: {
            auto [ef, ea] = take_part(e, d.kids[0].env.get(x));
            return make_app(d.subject.color(), subst_rec(d.kids[0], x, ef),
                            subst_rec(d.kids[1], x, ea));
        }
    }
    throw DomainError("unreachable");
}

} // namespace

Derivation substitute_derivation(const Derivation& d, const std::string& x,
                                 const Derivation& e) {
    if (e.rule != Derivation::Rule::Many)
        throw TypeMismatch("substitution: argument derivation must be a many node");
    if (d.env.get(x) != e.multi())
        throw TypeMismatch("substitution: multi type differs from the binding of x");
    std::set<std::string> avoid = free_vars(e.subject);
    for (const auto& v : e.env.support()) avoid.insert(v);
    avoid.insert(x);
    return subst_rec(rename_binders_avoiding(d, avoid), x, e);
}

namespace {

AntiSubstitution anti_rec(const Derivation& d, const Term& p, const std::string& x,
                          const Term& u) {
    if (d.rule == Derivation::Rule::Many) {
        std::vector<Derivation> pat_kids;
        Derivation arg = make_many(u, {});
        MultiType m;
        for (const auto& k : d.kids) {
            AntiSubstitution sub = anti_rec(k, p, x, u);
            pat_kids.push_back(std::move(sub.for_pattern));
            arg = merge_derivations(arg, sub.for_argument);
            m = m.sum(sub.m);
        }
        return {std::move(m), make_many(p, std::move(pat_kids)), std::move(arg)};
    }
    switch (p.kind()) {
        case Term::Kind::Var: {
            if (p.name() == x) {
                if (!alpha_eq(d.subject, u))
                    throw MarkingInvalid("marked occurrence does not match the argument");
                MultiType m({d.linear()});
                Derivation pat = make_ax(x, d.linear());
                std::vector<Derivation> one{d};
                return {std::move(m), std::move(pat), make_many(u, std::move(one))};
            }
            if (d.rule != Derivation::Rule::Ax || d.subject.name() != p.name())
                throw MarkingInvalid("pattern variable does not match the subject");
            return {MultiType{}, d, make_many(u, {})};
        }
        case Term::Kind::Abs: {
            if (p.name() == x)  // x shadowed: nothing marked below
                return {MultiType{}, d, make_many(u, {})};
            if (d.rule != Derivation::Rule::Lam || d.subject.color() != p.color())
                throw MarkingInvalid("pattern abstraction does not match the subject");
            std::set<std::string> avoid = free_vars(p.body());
            avoid.merge(free_vars(u));
            avoid.merge(free_vars(d.subject));
            for (const auto& v : d.kids[0].env.support()) avoid.insert(v);
            avoid.insert(x);
            std::string z = fresh_name(p.name(), avoid);
            Derivation kid = subst_free_var(d.kids[0], d.subject.name(), z);
            Term pbody = substitute(p.body(), p.name(), Term::var(z));
            AntiSubstitution sub = anti_rec(kid, pbody, x, u);
            return {std::move(sub.m), make_lam(p.color(), z, std::move(sub.for_pattern)),
                    std::move(sub.for_argument)};
        }
        case Term::Kind::App: {
            if (d.rule != Derivation::Rule::App || d.subject.color() != p.color())
                throw MarkingInvalid("pattern application does not match the subject");
            AntiSubstitution f = anti_rec(d.kids[0], p.fun(), x, u);
            AntiSubstitution a = anti_rec(d.kids[1], p.arg(), x, u);
            return {f.m.sum(a.m),
                    make_app(p.color(), std::move(f.for_pattern), std::move(a.for_pattern)),
                    merge_derivations(f.for_argument, a.for_argument)};
        }
    }
    throw DomainError("unreachable");
}

} // namespace

AntiSubstitution anti_substitute(const Derivation& d, const Term& pattern,
                                 const std::string& x, const Term& u) {
    if (free_vars(u).count(x))
        throw MarkingInvalid("the substitution variable occurs free in the argument");
    if (!alpha_eq(d.subject, substitute(pattern, x, u)))
        throw MarkingInvalid("subject is not the pattern with the marking filled");
    return anti_rec(d, pattern, x, u);
}

namespace {

std::pair<Derivation, StepKind> head_reduce_rec(const Derivation& d) {
    switch (d.rule) {
        case Derivation::Rule::Lam: {
            auto [kid, kind] = head_reduce_rec(d.kids[0]);
            return {make_lam(d.subject.color(), d.subject.name(), std::move(kid)), kind};
        }
        case Derivation::Rule::App: {
            const Derivation& f = d.kids[0];
            if (f.rule == Derivation::Rule::Lam) {
                Color arrow_color = f.subject.color();
                Color app_color = d.subject.color();
                StepKind kind = arrow_color == app_color ? StepKind::SilentHead
                                                         : StepKind::InteractionHead;
                Derivation result =
                    substitute_derivation(f.kids[0], f.subject.name(), d.kids[1]);
                return {std::move(result), kind};
            }
            if (f.rule == Derivation::Rule::App) {
                auto [nf, kind] = head_reduce_rec(f);
                return {make_app(d.subject.color(), std::move(nf), d.kids[1]), kind};
            }
            throw StepMismatch("subject is in head normal form");
        }
        default:
            throw StepMismatch("subject is in head normal form");
    }
}

} // namespace

std::pair<Derivation, StepKind> head_reduce_derivation(const Derivation& d) {
    if (!d.concludes_linear()) throw StepMismatch("head reduction needs a linear conclusion");
    return head_reduce_rec(d);
}

namespace {

Derivation expand_rec(const Derivation& d, const Term& before) {
    if (before.is_abs()) {
        if (d.rule != Derivation::Rule::Lam || d.subject.color() != before.color())
            throw StepMismatch("after-derivation does not match the abstraction spine");
        if (d.subject.name() == before.name())
            return make_lam(before.color(), before.name(),
                            expand_rec(d.kids[0], before.body()));
        std::set<std::string> avoid = free_vars(before.body());
        avoid.merge(free_vars(d.subject));
        for (const auto& v : d.kids[0].env.support()) avoid.insert(v);
        std::string z = fresh_name(before.name(), avoid);
        Derivation kid = subst_free_var(d.kids[0], d.subject.name(), z);
        Term body = substitute(before.body(), before.name(), Term::var(z));
        return make_lam(before.color(), z, expand_rec(kid, body));
    }
    if (before.is_app() && before.fun().is_abs()) {
        // The head redex: before = (\a x. s) @b u, d derives s{x:=u}.
        Term lam = before.fun();
        std::set<std::string> avoid = free_vars(lam.body());
        avoid.merge(free_vars(before.arg()));
        avoid.merge(free_vars(d.subject));
        for (const auto& v : d.env.support()) avoid.insert(v);
        avoid.insert(lam.name());
        std::string z = fresh_name(lam.name(), avoid);
        Term pattern = substitute(lam.body(), lam.name(), Term::var(z));
        AntiSubstitution sub = anti_substitute(d, pattern, z, before.arg());
        Derivation lam_d = make_lam(lam.color(), z, std::move(sub.for_pattern));
        return make_app(before.color(), std::move(lam_d), std::move(sub.for_argument));
    }
    if (before.is_app()) {
        if (d.rule != Derivation::Rule::App || d.subject.color() != before.color())
            throw StepMismatch("after-derivation does not match the application spine");
        if (!alpha_eq(d.kids[1].subject, before.arg()))
            throw StepMismatch("argument changed along a head step");
        return make_app(before.color(), expand_rec(d.kids[0], before.fun()), d.kids[1]);
    }
    throw StepMismatch("before-term has no head redex on its spine");
}

} // namespace

Derivation head_expand_derivation(const Derivation& d, const Term& before) {
    auto step = head_step(before);
    if (!step || !alpha_eq(step->first, d.subject))
        throw StepMismatch("derivation subject is not the head reduct of the before-term");
    return expand_rec(d, before);
}

namespace {

// Memoized pools of all linear types within a bound.
std::vector<std::string> atom_names(int n) {
    std::vector<std::string> out;
    for (int i = 0; i < n; ++i) out.push_back(i == 0 ? "X" : "X" + std::to_string(i));
    return out;
}

std::vector<MultiType> multis_over(const std::vector<LinearType>& pool, int width) {
    // Multisets up to equality: nondecreasing index sequences.
    std::vector<MultiType> out;
    std::vector<std::size_t> idx;
    std::function<void(std::size_t)> go = [&](std::size_t start) {
        std::vector<LinearType> elems;
        for (auto i : idx) elems.push_back(pool[i]);
        out.push_back(MultiType(std::move(elems)));
        if (static_cast<int>(idx.size()) == width) return;
        for (std::size_t i = start; i < pool.size(); ++i) {
            idx.push_back(i);
            go(i);
            idx.pop_back();
        }
    };
    go(0);
    return out;
}

const std::vector<LinearType>& linear_pool(const TypeBound& b) {
    static std::map<std::string, std::vector<LinearType>> cache;
    std::string key = std::to_string(b.width) + "," + std::to_string(b.depth) + "," +
                      std::to_string(b.atoms);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    std::vector<LinearType> cur;
    for (const auto& a : atom_names(b.atoms)) cur.push_back(LinearType::atom(a));
    for (int d = 2; d <= b.depth; ++d) {
        std::vector<LinearType> next = cur;
        for (const auto& m : multis_over(cur, b.width))
            for (Color c : {Color::White, Color::Black})
                for (const auto& r : cur) {
                    LinearType t = LinearType::arrow(m, c, r);
                    next.push_back(t);
                }
        std::sort(next.begin(), next.end());
        next.erase(std::unique(next.begin(), next.end()), next.end());
        cur = std::move(next);
    }
    return cache.emplace(key, std::move(cur)).first->second;
}

const std::vector<MultiType>& multi_pool(const TypeBound& b) {
    static std::map<std::string, std::vector<MultiType>> cache;
    std::string key = std::to_string(b.width) + "," + std::to_string(b.depth) + "," +
                      std::to_string(b.atoms);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    TypeBound inner = b;
    inner.depth = b.depth - 1;
    std::vector<MultiType> out =
        inner.depth < 1 ? std::vector<MultiType>{MultiType{}}
                        : multis_over(linear_pool(inner), b.width);
    return cache.emplace(key, std::move(out)).first->second;
}

struct EnumCtx {
    TypeBound bound;
    long long fuel = default_fuel;
    bool complete = true;
    bool fuel_exhausted = false;
    std::size_t work = 0;  // derivations built; enumeration stops at the cap
    // Memo of enum_at_linear keyed by (term, type, unfold budget).
    std::map<std::string, std::vector<Derivation>> memo;

    bool spend() {
        if (++work > enum_work_cap) {
            complete = false;
            return false;
        }
        return true;
    }

    static constexpr std::size_t enum_work_cap = 300000;
};

constexpr std::size_t enum_node_cap = 20000;

std::vector<Derivation> enum_hnf(const Term& hnf, const std::optional<LinearType>& target,
                                 int unfold_left, EnumCtx& ctx);

// All derivations of t at the linear type L within the bound; the result
// reference stays valid for the lifetime of the context's memo.
const std::vector<Derivation>& enum_at_linear(const Term& t, const LinearType& target,
                                              int unfold_left, EnumCtx& ctx) {
    std::string memo_key =
        alpha_key(t) + "@" + target.key() + "@" + std::to_string(unfold_left);
    auto hit = ctx.memo.find(memo_key);
    if (hit != ctx.memo.end()) return hit->second;

    std::vector<Derivation> out;
    EvalResult ev = evaluate_head(t, ctx.fuel, true);
    if (!ev.normal()) {
        if (!ev.diverged()) {
            ctx.complete = false;
            ctx.fuel_exhausted = true;
        }
        return ctx.memo.emplace(memo_key, std::move(out)).first->second;
    }
    std::vector<Derivation> ds = enum_hnf(ev.final_term, target, unfold_left, ctx);
    for (auto& d : ds) {
        Derivation cur = std::move(d);
        for (std::size_t i = ev.trace.size(); i-- > 0;) {
            const Term& before = (i == 0) ? t : ev.trace[i - 1].term;
            cur = head_expand_derivation(cur, before);
        }
        out.push_back(std::move(cur));
    }
    return ctx.memo.emplace(memo_key, std::move(out)).first->second;
}

// All Many derivations of t at the multi type N; memo-backed.
const std::vector<Derivation>& enum_at_multi(const Term& t, const MultiType& n,
                                             int unfold_left, EnumCtx& ctx) {
    std::string memo_key =
        "m:" + alpha_key(t) + "@" + n.key() + "@" + std::to_string(unfold_left);
    auto hit = ctx.memo.find(memo_key);
    if (hit != ctx.memo.end()) return hit->second;
    std::vector<Derivation> out;
    if (n.empty()) {
        out.push_back(make_many(t, {}));
        return ctx.memo.emplace(memo_key, std::move(out)).first->second;
    }
    if (unfold_left <= 0) {
        ctx.complete = false;
        return ctx.memo.emplace(memo_key, std::move(out)).first->second;
    }
    std::vector<const std::vector<Derivation>*> per_elem;
    for (const auto& l : n.elems()) {
        per_elem.push_back(&enum_at_linear(t, l, unfold_left - 1, ctx));
        if (per_elem.back()->empty())
            return ctx.memo.emplace(memo_key, std::move(out)).first->second;
    }
    std::set<std::string> seen;
    std::vector<std::size_t> pick(per_elem.size(), 0);
    while (true) {
        if (!ctx.spend()) break;
        std::vector<Derivation> kids;
        for (std::size_t i = 0; i < per_elem.size(); ++i)
            kids.push_back((*per_elem[i])[pick[i]]);
        Derivation m = make_many(t, std::move(kids));
        std::string k = m.env.key() + "|" + m.multi().key() + "|" + std::to_string(m.index);
        if (seen.insert(k).second) out.push_back(std::move(m));
        if (out.size() > enum_node_cap) {
            ctx.complete = false;
            break;
        }
        std::size_t i = 0;
        for (; i < per_elem.size(); ++i) {
            if (++pick[i] < per_elem[i]->size()) break;
            pick[i] = 0;
        }
        if (i == per_elem.size()) break;
    }
    return ctx.memo.emplace(memo_key, std::move(out)).first->second;
}

std::vector<Derivation> enum_hnf(const Term& hnf, const std::optional<LinearType>& target,
                                 int unfold_left, EnumCtx& ctx) {
    HnfParts parts = decompose_hnf(hnf);
    std::size_t m = parts.args.size();

    // With a target, the binder prefix of the type is forced.
    std::vector<MultiType> forced_binder_args;
    std::optional<LinearType> forced_result;
    if (target) {
        LinearType cur = *target;
        for (const auto& [c, x] : parts.binders) {
            if (!cur.is_arrow() || cur.color() != c) return {};
            forced_binder_args.push_back(cur.arg());
            cur = cur.result();
        }
        forced_result = cur;
    }

    // Candidate result types of the head variable.
    std::vector<LinearType> results;
    if (forced_result)
        results.push_back(*forced_result);
    else
        results = linear_pool(ctx.bound);

    std::vector<MultiType> arg_multis = multi_pool(ctx.bound);
    std::vector<Derivation> out;
    std::set<std::string> seen;

    // Choices per spine position: a multi type and an arrow color.
    struct SpineChoice {
        MultiType n;
        Color c;
    };
    std::vector<SpineChoice> options;
    for (const auto& n : arg_multis)
        for (Color c : {Color::White, Color::Black}) options.push_back({n, c});

    std::vector<SpineChoice> chosen(m, SpineChoice{MultiType{}, Color::Black});
    std::vector<const std::vector<Derivation>*> arg_opts(m, nullptr);
    std::function<void(std::size_t)> go = [&](std::size_t i) {
        if (out.size() > enum_node_cap) {
            ctx.complete = false;
            return;
        }
        if (i < m) {
            for (const auto& opt : options) {
                arg_opts[i] = &enum_at_multi(parts.args[i].second, opt.n, unfold_left, ctx);
                if (arg_opts[i]->empty()) continue;
                chosen[i] = opt;
                go(i + 1);
            }
            return;
        }
        for (const auto& l0 : results) {
            LinearType head_type = l0;
            for (std::size_t j = m; j-- > 0;)
                head_type = LinearType::arrow(chosen[j].n, chosen[j].c, head_type);
            // The head type is an element of the conclusion; conclusions
            // whose elements exceed the bound are out of reach anyway.
            if (!forced_result && !within_bound(head_type, ctx.bound)) continue;
            std::vector<std::size_t> pick(m, 0);
            while (true) {
                if (!ctx.spend()) return;
                Derivation cur = make_ax(parts.head.name(), head_type);
                for (std::size_t j = 0; j < m; ++j)
                    cur = make_app(parts.args[j].first, std::move(cur), (*arg_opts[j])[pick[j]]);
                bool ok = true;
                for (std::size_t j = parts.binders.size(); j-- > 0;) {
                    const auto& [c, x] = parts.binders[j];
                    if (forced_result && cur.env.get(x) != forced_binder_args[j]) {
                        ok = false;
                        break;
                    }
                    cur = make_lam(c, x, std::move(cur));
                }
                if (ok) {
                    std::string k = cur.typing().key();
                    if (seen.insert(k).second) out.push_back(std::move(cur));
                }
                // Next combination.
                std::size_t j = 0;
                for (; j < m; ++j) {
                    if (++pick[j] < arg_opts[j]->size()) break;
                    pick[j] = 0;
                }
                if (j == m) break;
            }
        }
    };
    go(0);
    return out;
}

} // namespace

Enumeration enumerate_typings(const Term& t, const TypeBound& bound, long long fuel) {
    Enumeration res;
    EvalResult ev = evaluate_head(t, fuel, true);
    if (!ev.normal()) {
        if (ev.diverged()) {
            res.diverged = true;
        } else {
            res.complete = false;
            res.fuel_exhausted = true;
        }
        return res;
    }
    EnumCtx ctx;
    ctx.bound = bound;
    ctx.fuel = fuel;
    std::vector<Derivation> ds = enum_hnf(ev.final_term, std::nullopt, bound.unfold, ctx);
    std::set<std::string> seen;
    for (auto& d : ds) {
        Derivation cur = std::move(d);
        for (std::size_t i = ev.trace.size(); i-- > 0;) {
            const Term& before = (i == 0) ? t : ev.trace[i - 1].term;
            cur = head_expand_derivation(cur, before);
        }
        Typing ty = cur.typing();
        if (seen.insert(ty.key()).second) res.items.emplace_back(std::move(ty), std::move(cur));
    }
    res.complete = ctx.complete;
    res.fuel_exhausted = ctx.fuel_exhausted;
    return res;
}

struct TypingOracle::Impl {
    Term term;
    EnumCtx ctx;
    EvalResult ev;
    bool diverged = false;
    bool dead = false;  // no typings at all (divergent or fuel out)
    std::map<std::string, std::vector<Derivation>> by_type;

    Impl(Term t, const TypeBound& bound, long long fuel)
        : term(std::move(t)), ev(evaluate_head(term, fuel, true)) {
        ctx.bound = bound;
        ctx.fuel = fuel;
        if (!ev.normal()) {
            dead = true;
            if (ev.diverged())
                diverged = true;
            else {
                ctx.complete = false;
                ctx.fuel_exhausted = true;
            }
        }
    }

    const std::vector<Derivation>& at(const LinearType& type) {
        auto it = by_type.find(type.key());
        if (it != by_type.end()) return it->second;
        std::vector<Derivation> out;
        if (!dead) {
            out = enum_hnf(ev.final_term, type, ctx.bound.unfold, ctx);
            for (auto& d : out) {
                for (std::size_t i = ev.trace.size(); i-- > 0;) {
                    const Term& before = (i == 0) ? term : ev.trace[i - 1].term;
                    d = head_expand_derivation(d, before);
                }
            }
        }
        return by_type.emplace(type.key(), std::move(out)).first->second;
    }
};

TypingOracle::TypingOracle(Term t, const TypeBound& bound, long long fuel)
    : impl_(std::make_unique<Impl>(std::move(t), bound, fuel)) {}
TypingOracle::~TypingOracle() = default;
TypingOracle::TypingOracle(TypingOracle&&) noexcept = default;

const std::vector<Derivation>& TypingOracle::at(const LinearType& type) {
    return impl_->at(type);
}
bool TypingOracle::complete() const { return impl_->ctx.complete; }
bool TypingOracle::diverged() const { return impl_->diverged; }
bool TypingOracle::fuel_exhausted() const { return impl_->ctx.fuel_exhausted; }

Soundness check_soundness(const Term& t, const Derivation& d, long long fuel) {
    EvalResult ev = evaluate_head(t, fuel);
    if (!ev.normal()) return ev.diverged() ? Soundness::Fails : Soundness::Unknown;
    return ev.interactions <= d.index ? Soundness::Holds : Soundness::Fails;
}

} // namespace checkers
