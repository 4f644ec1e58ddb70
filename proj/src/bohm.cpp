#include "checkers/bohm.hpp"

#include <set>

#include "checkers/syntax.hpp"

namespace checkers {

namespace {

struct PlainHnf {
    std::vector<std::string> binders;
    std::string head;
    int head_binder = -1;  // index into binders when bound, -1 when free
    std::vector<Term> args;
};

PlainHnf decompose(const Term& hnf) {
    PlainHnf out;
    Term cur = hnf;
    while (cur.is_abs()) {
        out.binders.push_back(cur.name());
        cur = cur.body();
    }
    std::vector<Term> rev;
    while (cur.is_app()) {
        rev.push_back(cur.arg());
        cur = cur.fun();
    }
    out.args.assign(rev.rbegin(), rev.rend());
    out.head = cur.name();
    for (std::size_t i = out.binders.size(); i-- > 0;) {
        if (out.binders[i] == out.head) {
            out.head_binder = static_cast<int>(i);
            break;
        }
    }
    return out;
}

// Renames the binders of a decomposed hnf to the given names (applied to
// head and arguments).
void rename_binders(PlainHnf& h, const std::vector<std::string>& names) {
    for (std::size_t i = 0; i < h.binders.size(); ++i) {
        const std::string& from = h.binders[i];
        const std::string& to = names[i];
        if (from == to) continue;
        bool shadowed = false;
        for (std::size_t j = i + 1; j < h.binders.size(); ++j)
            if (h.binders[j] == from) shadowed = true;
        if (!shadowed) {
            for (auto& a : h.args) a = substitute(a, from, Term::var(to));
            if (h.head == from && h.head_binder == static_cast<int>(i)) h.head = to;
        } else if (h.head_binder == static_cast<int>(i)) {
            h.head = to;
        }
        h.binders[i] = to;
    }
}

std::vector<std::string> canonical_names(std::size_t n, const std::set<std::string>& avoid) {
    std::vector<std::string> out;
    std::set<std::string> used = avoid;
    for (std::size_t i = 0; i < n; ++i) {
        std::string name = fresh_name("v", used);
        used.insert(name);
        out.push_back(name);
    }
    return out;
}

} // namespace

BohmApproximant bohm_approximant(const Term& plain, int depth, long long fuel) {
    if (depth <= 0) return BohmApproximant{BohmApproximant::Kind::Cut, {}, "", {}};
    EvalResult ev = evaluate_head(wash(plain), fuel);
    if (!ev.normal()) return BohmApproximant{BohmApproximant::Kind::Bottom, {}, "", {}};
    PlainHnf h = decompose(ev.final_term);
    BohmApproximant out{BohmApproximant::Kind::Node, h.binders, h.head, {}};
    for (const auto& a : h.args) out.children.push_back(bohm_approximant(a, depth - 1, fuel));
    return out;
}

std::string print_approximant(const BohmApproximant& a) {
    switch (a.kind) {
        case BohmApproximant::Kind::Bottom: return "_|_";
        case BohmApproximant::Kind::Cut: return "...";
        case BohmApproximant::Kind::Node: {
            std::string out;
            if (!a.binders.empty()) {
                out += "\\";
                for (const auto& b : a.binders) out += b + " ";
                out.back() = '.';
                out += " ";
            }
            out += a.head;
            for (const auto& c : a.children) out += " (" + print_approximant(c) + ")";
            return out;
        }
    }
    return "";
}

namespace {

BohmCompareResult bohm_le_rec(const Term& t, const Term& u, int depth, long long fuel) {
    BohmCompareResult res;
    if (depth <= 0) {
        res.verdict = BohmVerdict::Unknown;
        res.reason = "depth frontier";
        return res;
    }
    EvalResult et = evaluate_head(wash(t), fuel);
    if (!et.normal()) {
        if (et.diverged()) {
            res.verdict = BohmVerdict::Holds;  // clause (bot)
            return res;
        }
        res.verdict = BohmVerdict::Unknown;
        res.reason = "fuel exhausted on the left";
        return res;
    }
    EvalResult eu = evaluate_head(wash(u), fuel);
    if (!eu.normal()) {
        if (eu.diverged()) {
            res.verdict = BohmVerdict::Fails;
            res.fail_kind = BohmFailKind::RightDiverges;
            res.reason = "left converges, right diverges";
            res.path_spines_equal = true;
            return res;
        }
        res.verdict = BohmVerdict::Unknown;
        res.reason = "fuel exhausted on the right";
        return res;
    }
    PlainHnf ht = decompose(et.final_term);
    PlainHnf hu = decompose(eu.final_term);
    std::size_t nt = ht.binders.size(), nu = hu.binders.size();
    std::size_t kt = ht.args.size(), ku = hu.args.size();

    if (nt < nu) {
        // The clause only absorbs surplus on t's side; this refutes.
        std::size_t m = nu - nt;
        bool heads_match =
            (ht.head_binder >= 0)
                ? (hu.head_binder == ht.head_binder)
                : (hu.head_binder < 0 && ht.head == hu.head);
        res.verdict = BohmVerdict::Fails;
        res.path_spines_equal = true;
        if (heads_match && ku == kt + m) {
            res.fail_kind = BohmFailKind::EtaGapRight;
            res.gap = BohmGapInfo{nt, kt, m, ht.head_binder >= 0};
            res.reason = "right side has " + std::to_string(m) + " surplus eta levels";
        } else {
            res.fail_kind = BohmFailKind::SpineMismatch;
            res.reason = "spines disagree";
        }
        return res;
    }

    std::size_t p = nt - nu;
    if (kt != ku + p) {
        res.verdict = BohmVerdict::Fails;
        res.fail_kind = BohmFailKind::SpineMismatch;
        res.path_spines_equal = true;
        res.reason = "argument counts do not match the eta discipline";
        return res;
    }

    // Align binders on canonical fresh names.
    std::set<std::string> avoid = free_vars(et.final_term);
    avoid.merge(free_vars(eu.final_term));
    for (const auto& b : ht.binders) avoid.insert(b);
    for (const auto& b : hu.binders) avoid.insert(b);
    std::vector<std::string> names = canonical_names(nt, avoid);
    rename_binders(ht, names);
    rename_binders(hu, std::vector<std::string>(names.begin(), names.begin() + nu));

    bool heads_match = (ht.head_binder >= 0 || hu.head_binder >= 0)
                           ? (ht.head_binder == hu.head_binder &&
                              ht.head_binder < static_cast<int>(nu))
                           : (ht.head == hu.head);
    if (!heads_match) {
        res.verdict = BohmVerdict::Fails;
        res.fail_kind = BohmFailKind::SpineMismatch;
        res.path_spines_equal = true;
        res.reason = "head variables differ";
        return res;
    }

    bool unknown = false;
    std::string unknown_reason;
    for (std::size_t i = 0; i < kt; ++i) {
        Term rhs = (i < ku) ? hu.args[i] : Term::var(names[nu + (i - ku)]);
        BohmCompareResult sub = bohm_le_rec(ht.args[i], rhs, depth - 1, fuel);
        if (sub.verdict == BohmVerdict::Fails) {
            res.verdict = BohmVerdict::Fails;
            res.fail_kind = sub.fail_kind;
            res.reason = sub.reason;
            res.fail_path = sub.fail_path;
            res.fail_path.insert(res.fail_path.begin(), i);
            res.gap = sub.gap;
            res.levels = sub.levels;
            res.levels.insert(res.levels.begin(),
                              BohmPathLevel{nt, kt, ht.head_binder >= 0, i});
            res.path_spines_equal = sub.path_spines_equal && p == 0 && i < ku;
            return res;
        }
        if (sub.verdict == BohmVerdict::Unknown && !unknown) {
            unknown = true;
            unknown_reason = sub.reason;
        }
    }
    if (unknown) {
        res.verdict = BohmVerdict::Unknown;
        res.reason = unknown_reason;
        return res;
    }
    res.verdict = BohmVerdict::Holds;
    return res;
}

} // namespace

BohmCompareResult bohm_le_eta(const Term& t, const Term& u, int depth, long long fuel) {
    return bohm_le_rec(t, u, depth, fuel);
}

} // namespace checkers
