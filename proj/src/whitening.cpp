#include "checkers/whitening.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "checkers/syntax.hpp"

namespace checkers {

namespace {

Whitening atom_witness(Polarity p, const LinearType& a) {
    Whitening w{Whitening::Kind::Atom, p, 0, a, a, {}, {}, {}, {}, {}, {}};
    return w;
}

} // namespace

std::optional<Whitening> decide_whitening(Polarity p, const LinearType& lhs,
                                          const LinearType& rhs) {
    if (lhs.is_atom() && rhs.is_atom()) {
        if (lhs.atom_name() != rhs.atom_name()) return std::nullopt;
        return atom_witness(p, lhs);
    }
    if (!lhs.is_arrow() || !rhs.is_arrow()) return std::nullopt;
    bool same = lhs.color() == rhs.color();
    bool whiten = lhs.color() == Color::White && rhs.color() == Color::Black;
    if (!same && !(whiten && p == Polarity::Pos)) return std::nullopt;
    auto argw = decide_whitening(same ? flip(p) : Polarity::Neg, lhs.arg(), rhs.arg());
    if (!argw) return std::nullopt;
    auto resw = decide_whitening(same ? p : Polarity::Pos, lhs.result(), rhs.result());
    if (!resw) return std::nullopt;
    Whitening w;
    w.kind = same ? Whitening::Kind::ArrowSame : Whitening::Kind::ArrowWhiten;
    w.pol = p;
    w.count = argw->count + resw->count + (same ? 0 : 1);
    w.ltype_lhs = lhs;
    w.ltype_rhs = rhs;
    w.kids.push_back(std::move(*argw));
    w.kids.push_back(std::move(*resw));
    return w;
}

std::optional<Whitening> decide_whitening(Polarity p, const MultiType& lhs,
                                          const MultiType& rhs) {
    if (lhs.width() != rhs.width()) return std::nullopt;
    std::size_t n = lhs.width();
    std::vector<std::vector<std::optional<Whitening>>> m(n);
    for (std::size_t i = 0; i < n; ++i) {
        m[i].resize(n);
        for (std::size_t j = 0; j < n; ++j) m[i][j] = decide_whitening(p, lhs.at(i), rhs.at(j));
    }
    std::vector<std::size_t> perm(n, 0);
    std::vector<bool> used(n, false);
    std::function<bool(std::size_t)> assign = [&](std::size_t i) -> bool {
        if (i == n) return true;
        for (std::size_t j = 0; j < n; ++j) {
            if (used[j] || !m[i][j]) continue;
            used[j] = true;
            perm[i] = j;
            if (assign(i + 1)) return true;
            used[j] = false;
        }
        return false;
    };
    if (!assign(0)) return std::nullopt;
    Whitening w;
    w.kind = Whitening::Kind::Multi;
    w.pol = p;
    w.mtype_lhs = lhs;
    w.mtype_rhs = rhs;
    w.perm = perm;
    for (std::size_t i = 0; i < n; ++i) {
        w.count += m[i][perm[i]]->count;
        w.kids.push_back(*m[i][perm[i]]);
    }
    return w;
}

std::optional<Whitening> decide_whitening(Polarity p, const TypeEnv& lhs, const TypeEnv& rhs) {
    std::set<std::string> vars;
    for (const auto& [x, mt] : lhs.entries()) vars.insert(x);
    for (const auto& [x, mt] : rhs.entries()) vars.insert(x);
    Whitening w;
    w.kind = Whitening::Kind::Env;
    w.pol = p;
    w.env_lhs = lhs;
    w.env_rhs = rhs;
    for (const auto& x : vars) {
        auto kid = decide_whitening(p, lhs.get(x), rhs.get(x));
        if (!kid) return std::nullopt;
        w.count += kid->count;
        w.vars.push_back(x);
        w.kids.push_back(std::move(*kid));
    }
    return w;
}

std::optional<Whitening> decide_whitening_pair(Polarity p, const TypeEnv& env_lhs,
                                               const LinearType& t_lhs,
                                               const TypeEnv& env_rhs,
                                               const LinearType& t_rhs) {
    auto envw = decide_whitening(flip(p), env_lhs, env_rhs);
    if (!envw) return std::nullopt;
    auto tw = decide_whitening(p, t_lhs, t_rhs);
    if (!tw) return std::nullopt;
    Whitening w;
    w.kind = Whitening::Kind::Pair;
    w.pol = p;
    w.count = envw->count + tw->count;
    w.env_lhs = env_lhs;
    w.env_rhs = env_rhs;
    w.ltype_lhs = t_lhs;
    w.ltype_rhs = t_rhs;
    w.kids.push_back(std::move(*envw));
    w.kids.push_back(std::move(*tw));
    return w;
}

std::optional<Whitening> decide_whitening_pair_multi(Polarity p, const TypeEnv& env_lhs,
                                                     const MultiType& t_lhs,
                                                     const TypeEnv& env_rhs,
                                                     const MultiType& t_rhs) {
    auto envw = decide_whitening(flip(p), env_lhs, env_rhs);
    if (!envw) return std::nullopt;
    auto tw = decide_whitening(p, t_lhs, t_rhs);
    if (!tw) return std::nullopt;
    Whitening w;
    w.kind = Whitening::Kind::Pair;
    w.pol = p;
    w.count = envw->count + tw->count;
    w.env_lhs = env_lhs;
    w.env_rhs = env_rhs;
    w.mtype_lhs = t_lhs;
    w.mtype_rhs = t_rhs;
    w.kids.push_back(std::move(*envw));
    w.kids.push_back(std::move(*tw));
    return w;
}

namespace {

bool check_rec(const Whitening& w);

bool check_kids(const Whitening& w) {
    for (const auto& k : w.kids)
        if (!check_rec(k)) return false;
    return true;
}

bool check_rec(const Whitening& w) {
    switch (w.kind) {
        case Whitening::Kind::Atom:
            return w.count == 0 && w.kids.empty() && w.ltype_lhs && w.ltype_rhs &&
                   w.ltype_lhs->is_atom() && w.ltype_rhs->is_atom() &&
                   w.ltype_lhs->atom_name() == w.ltype_rhs->atom_name();
        case Whitening::Kind::ArrowWhiten:
        case Whitening::Kind::ArrowSame: {
            if (!w.ltype_lhs || !w.ltype_rhs || w.kids.size() != 2) return false;
            const LinearType& l = *w.ltype_lhs;
            const LinearType& r = *w.ltype_rhs;
            if (!l.is_arrow() || !r.is_arrow()) return false;
            bool same = w.kind == Whitening::Kind::ArrowSame;
            if (same && l.color() != r.color()) return false;
            if (!same) {
                if (w.pol != Polarity::Pos) return false;
                if (l.color() != Color::White || r.color() != Color::Black) return false;
            }
            const Whitening& wa = w.kids[0];
            const Whitening& wr = w.kids[1];
            if (wa.pol != (same ? flip(w.pol) : Polarity::Neg)) return false;
            if (wr.pol != (same ? w.pol : Polarity::Pos)) return false;
            if (!wa.mtype_lhs || *wa.mtype_lhs != l.arg() || !wa.mtype_rhs ||
                *wa.mtype_rhs != r.arg())
                return false;
            if (!wr.ltype_lhs || *wr.ltype_lhs != l.result() || !wr.ltype_rhs ||
                *wr.ltype_rhs != r.result())
                return false;
            if (w.count != wa.count + wr.count + (same ? 0 : 1)) return false;
            return check_kids(w);
        }
        case Whitening::Kind::Multi: {
            if (!w.mtype_lhs || !w.mtype_rhs) return false;
            const MultiType& l = *w.mtype_lhs;
            const MultiType& r = *w.mtype_rhs;
            if (l.width() != r.width() || w.perm.size() != l.width() ||
                w.kids.size() != l.width())
                return false;
            std::vector<bool> used(r.width(), false);
            long long total = 0;
            for (std::size_t i = 0; i < l.width(); ++i) {
                std::size_t j = w.perm[i];
                if (j >= r.width() || used[j]) return false;
                used[j] = true;
                const Whitening& k = w.kids[i];
                if (k.pol != w.pol) return false;
                if (!k.ltype_lhs || *k.ltype_lhs != l.at(i)) return false;
                if (!k.ltype_rhs || *k.ltype_rhs != r.at(j)) return false;
                total += k.count;
            }
            return total == w.count && check_kids(w);
        }
        case Whitening::Kind::Env: {
            if (!w.env_lhs || !w.env_rhs) return false;
            if (w.vars.size() != w.kids.size()) return false;
            std::set<std::string> covered;
            long long total = 0;
            for (std::size_t i = 0; i < w.vars.size(); ++i) {
                const auto& x = w.vars[i];
                covered.insert(x);
                const Whitening& k = w.kids[i];
                if (k.pol != w.pol) return false;
                if (!k.mtype_lhs || *k.mtype_lhs != w.env_lhs->get(x)) return false;
                if (!k.mtype_rhs || *k.mtype_rhs != w.env_rhs->get(x)) return false;
                total += k.count;
            }
            for (const auto& [x, m] : w.env_lhs->entries())
                if (!covered.count(x)) return false;
            for (const auto& [x, m] : w.env_rhs->entries())
                if (!covered.count(x)) return false;
            return total == w.count && check_kids(w);
        }
        case Whitening::Kind::Pair: {
            if (w.kids.size() != 2 || !w.env_lhs || !w.env_rhs) return false;
            const Whitening& we = w.kids[0];
            const Whitening& wt = w.kids[1];
            if (we.pol != flip(w.pol) || wt.pol != w.pol) return false;
            if (!we.env_lhs || *we.env_lhs != *w.env_lhs) return false;
            if (!we.env_rhs || *we.env_rhs != *w.env_rhs) return false;
            if (w.ltype_lhs) {
                if (!wt.ltype_lhs || *wt.ltype_lhs != *w.ltype_lhs) return false;
                if (!wt.ltype_rhs || !w.ltype_rhs || *wt.ltype_rhs != *w.ltype_rhs) return false;
            } else {
                if (!wt.mtype_lhs || !w.mtype_lhs || *wt.mtype_lhs != *w.mtype_lhs) return false;
                if (!wt.mtype_rhs || !w.mtype_rhs || *wt.mtype_rhs != *w.mtype_rhs) return false;
            }
            return w.count == we.count + wt.count && check_kids(w);
        }
    }
    return false;
}

} // namespace

bool check_whitening(const Whitening& w) { return check_rec(w); }

namespace {

bool same_object_multi(const Whitening& w, bool lhs_side, const Whitening& other) {
    const auto& a = lhs_side ? w.mtype_rhs : w.mtype_lhs;
    const auto& b = lhs_side ? other.mtype_lhs : other.mtype_rhs;
    if (a && b) return *a == *b;
    return false;
}

} // namespace

Whitening compose_whitening(const Whitening& w1, const Whitening& w2) {
    if (w1.pol != w2.pol) throw WitnessMismatch("compose: polarities differ");
    std::optional<Whitening> out;
    if (w1.kind == Whitening::Kind::Pair && w2.kind == Whitening::Kind::Pair) {
        bool mid_ok = w1.env_rhs && w2.env_lhs && *w1.env_rhs == *w2.env_lhs;
        if (w1.ltype_rhs && w2.ltype_lhs)
            mid_ok = mid_ok && *w1.ltype_rhs == *w2.ltype_lhs;
        else if (w1.mtype_rhs && w2.mtype_lhs)
            mid_ok = mid_ok && *w1.mtype_rhs == *w2.mtype_lhs;
        else
            mid_ok = false;
        if (!mid_ok) throw WitnessMismatch("compose: middle pairs differ");
        if (w1.ltype_lhs)
            out = decide_whitening_pair(w1.pol, *w1.env_lhs, *w1.ltype_lhs, *w2.env_rhs,
                                        *w2.ltype_rhs);
        else
            out = decide_whitening_pair_multi(w1.pol, *w1.env_lhs, *w1.mtype_lhs, *w2.env_rhs,
                                              *w2.mtype_rhs);
    } else if (w1.ltype_rhs && w2.ltype_lhs) {
        if (*w1.ltype_rhs != *w2.ltype_lhs) throw WitnessMismatch("compose: middle types differ");
        out = decide_whitening(w1.pol, *w1.ltype_lhs, *w2.ltype_rhs);
    } else if (w1.mtype_rhs && w2.mtype_lhs) {
        if (!same_object_multi(w1, true, w2)) throw WitnessMismatch("compose: middle types differ");
        out = decide_whitening(w1.pol, *w1.mtype_lhs, *w2.mtype_rhs);
    } else if (w1.env_rhs && w2.env_lhs && w1.kind == Whitening::Kind::Env) {
        if (*w1.env_rhs != *w2.env_lhs) throw WitnessMismatch("compose: middle envs differ");
        out = decide_whitening(w1.pol, *w1.env_lhs, *w2.env_rhs);
    } else {
        throw WitnessMismatch("compose: object kinds differ");
    }
    if (!out) throw WitnessMismatch("compose: composite is not derivable");
    if (out->count != w1.count + w2.count)
        throw WitnessMismatch("compose: counts are not additive");
    return *out;
}

Whitening invert_pair_to_arrow(const Whitening& w, const std::string& x, Color a) {
    if (w.kind != Whitening::Kind::Pair || !w.ltype_lhs)
        throw WitnessMismatch("inversion needs a linear pair witness");
    TypeEnv le = w.env_lhs->without(x);
    TypeEnv re = w.env_rhs->without(x);
    LinearType lt = LinearType::arrow(w.env_lhs->get(x), a, *w.ltype_lhs);
    LinearType rt = LinearType::arrow(w.env_rhs->get(x), a, *w.ltype_rhs);
    auto out = decide_whitening_pair(w.pol, le, lt, re, rt);
    if (!out || out->count != w.count)
        throw WitnessMismatch("inversion failed to preserve the witness");
    return *out;
}

Whitening invert_pair_to_binding(const Whitening& w, const std::string& x) {
    if (w.kind != Whitening::Kind::Pair || !w.ltype_lhs || !w.ltype_lhs->is_arrow() ||
        !w.ltype_rhs->is_arrow())
        throw WitnessMismatch("inversion needs a pair of arrow types");
    if (w.ltype_lhs->color() != w.ltype_rhs->color())
        throw WitnessMismatch("inversion needs equal arrow colors");
    if (w.env_lhs->contains(x) || w.env_rhs->contains(x))
        throw WitnessMismatch("variable already bound in the environment");
    TypeEnv le = *w.env_lhs;
    le.set(x, w.ltype_lhs->arg());
    TypeEnv re = *w.env_rhs;
    re.set(x, w.ltype_rhs->arg());
    auto out = decide_whitening_pair(w.pol, le, w.ltype_lhs->result(), re,
                                     w.ltype_rhs->result());
    if (!out || out->count != w.count)
        throw WitnessMismatch("inversion failed to preserve the witness");
    return *out;
}

std::vector<PairChange> whitenable_positions(Polarity p, const TypeEnv& env,
                                             const LinearType& type) {
    std::vector<PairChange> out;
    for (const auto& [x, m] : env.entries())
        for (const auto& pos : collect_arrows(m, flip(p)))
            if (pos.pol == Polarity::Pos && pos.color == Color::Black)
                out.push_back({true, x, pos.path});
    for (const auto& pos : collect_arrows(type, p))
        if (pos.pol == Polarity::Pos && pos.color == Color::Black)
            out.push_back({false, "", pos.path});
    return out;
}

std::vector<PairChange> whitenable_positions_multi(Polarity p, const TypeEnv& env,
                                                   const MultiType& type) {
    std::vector<PairChange> out;
    for (const auto& [x, m] : env.entries())
        for (const auto& pos : collect_arrows(m, flip(p)))
            if (pos.pol == Polarity::Pos && pos.color == Color::Black)
                out.push_back({true, x, pos.path});
    for (const auto& pos : collect_arrows(type, p))
        if (pos.pol == Polarity::Pos && pos.color == Color::Black)
            out.push_back({false, "", pos.path});
    return out;
}

namespace {

void diff_rec(const LinearType& lhs, const LinearType& rhs, std::vector<int>& path,
              std::vector<std::vector<int>>& out) {
    if (lhs.is_atom() && rhs.is_atom()) {
        if (lhs.atom_name() != rhs.atom_name())
            throw WitnessMismatch("diff: atoms differ");
        return;
    }
    if (!lhs.is_arrow() || !rhs.is_arrow() || lhs.arg().width() != rhs.arg().width())
        throw WitnessMismatch("diff: skeletons are not aligned");
    if (lhs.color() != rhs.color()) {
        if (lhs.color() != Color::White)
            throw WitnessMismatch("diff: left side is blacker");
        path.push_back(-1);
        out.push_back(path);
        path.pop_back();
    }
    for (std::size_t i = 0; i < lhs.arg().width(); ++i) {
        path.push_back(static_cast<int>(i));
        diff_rec(lhs.arg().at(i), rhs.arg().at(i), path, out);
        path.pop_back();
    }
    path.push_back(static_cast<int>(lhs.arg().width()));
    diff_rec(lhs.result(), rhs.result(), path, out);
    path.pop_back();
}

std::vector<std::vector<int>> diff_multi(const MultiType& lhs, const MultiType& rhs) {
    if (lhs.width() != rhs.width()) throw WitnessMismatch("diff: widths differ");
    std::vector<std::vector<int>> out;
    for (std::size_t i = 0; i < lhs.width(); ++i) {
        std::vector<int> path{static_cast<int>(i)};
        std::vector<std::vector<int>> sub;
        std::vector<int> p;
        diff_rec(lhs.at(i), rhs.at(i), p, sub);
        for (auto& s : sub) {
            std::vector<int> full = path;
            full.insert(full.end(), s.begin(), s.end());
            out.push_back(std::move(full));
        }
    }
    return out;
}

} // namespace

std::vector<PairChange> pair_diff(const TypeEnv& env_lhs, const LinearType& t_lhs,
                                  const TypeEnv& env_rhs, const LinearType& t_rhs) {
    std::vector<PairChange> out;
    std::set<std::string> vars;
    for (const auto& [x, m] : env_lhs.entries()) vars.insert(x);
    for (const auto& [x, m] : env_rhs.entries()) vars.insert(x);
    for (const auto& x : vars)
        for (auto& p : diff_multi(env_lhs.get(x), env_rhs.get(x)))
            out.push_back({true, x, std::move(p)});
    std::vector<int> path;
    std::vector<std::vector<int>> tdiff;
    diff_rec(t_lhs, t_rhs, path, tdiff);
    for (auto& p : tdiff) out.push_back({false, "", std::move(p)});
    return out;
}

namespace {

// ---- repainting ----------------------------------------------------------

struct RepaintStep {
    Derivation d;
    std::optional<PairChange> extra;  // set: case (i); position in d's conclusion
};

RepaintStep repaint_rec(const Derivation& d, const PairChange& ch);

// Finds the kid owning element `e` of var `v` in the summed environment.
std::pair<std::size_t, std::size_t> env_owner(const std::vector<const Derivation*>& kids,
                                              const std::string& v, std::size_t e) {
    std::size_t off = 0;
    for (std::size_t i = 0; i < kids.size(); ++i) {
        std::size_t w = kids[i]->env.get(v).width();
        if (e < off + w) return {i, e - off};
        off += w;
    }
    throw WitnessMismatch("environment position out of range");
}

std::size_t env_offset_before(const std::vector<const Derivation*>& kids, std::size_t k,
                              const std::string& v) {
    std::size_t off = 0;
    for (std::size_t i = 0; i < k; ++i) off += kids[i]->env.get(v).width();
    return off;
}

RepaintStep repaint_ax(const Derivation& d, const PairChange& ch) {
    const LinearType& l = d.linear();
    const std::string& x = d.subject.name();
    if (ch.in_env) {
        if (ch.var != x || ch.path.empty() || ch.path.front() != 0)
            throw WitnessMismatch("axiom environment change out of place");
        std::vector<int> inner(ch.path.begin() + 1, ch.path.end());
        LinearType l2 = recolor_at(l, inner, Color::White);
        PairChange extra{false, "", inner};
        return {make_ax(x, l2), extra};
    }
    LinearType l2 = recolor_at(l, ch.path, Color::White);
    std::vector<int> env_path = ch.path;
    env_path.insert(env_path.begin(), 0);
    PairChange extra{true, x, env_path};
    return {make_ax(x, l2), extra};
}

RepaintStep repaint_many(const Derivation& d, const PairChange& ch) {
    std::vector<const Derivation*> kids;
    for (const auto& k : d.kids) kids.push_back(&k);
    std::size_t owner;
    PairChange local;
    if (ch.in_env) {
        auto [o, e] = env_owner(kids, ch.var, static_cast<std::size_t>(ch.path.front()));
        owner = o;
        local.in_env = true;
        local.var = ch.var;
        local.path = ch.path;
        local.path[0] = static_cast<int>(e);
    } else {
        owner = static_cast<std::size_t>(ch.path.front());
        if (owner >= d.kids.size()) throw WitnessMismatch("multi position out of range");
        local.in_env = false;
        local.path.assign(ch.path.begin() + 1, ch.path.end());
    }
    RepaintStep r = repaint_rec(d.kids[owner], local);
    std::vector<Derivation> new_kids = d.kids;
    new_kids[owner] = r.d;
    Derivation out = make_many(d.subject, std::move(new_kids));
    if (!r.extra) return {std::move(out), std::nullopt};
    PairChange extra = *r.extra;
    if (extra.in_env) {
        std::vector<const Derivation*> nk;
        for (const auto& k : out.kids) nk.push_back(&k);
        extra.path[0] += static_cast<int>(env_offset_before(nk, owner, extra.var));
    } else {
        extra.path.insert(extra.path.begin(), static_cast<int>(owner));
    }
    return {std::move(out), extra};
}

RepaintStep repaint_lam(const Derivation& d, const PairChange& ch) {
    const std::string& binder = d.subject.name();
    Color c = d.subject.color();
    int width = static_cast<int>(d.linear().arg().width());
    PairChange local;
    if (ch.in_env) {
        local = ch;  // binder cannot appear in the conclusion environment
    } else {
        if (ch.path.front() == -1)
            throw WitnessMismatch("cannot repaint a negatively occurring arrow head");
        if (ch.path.front() < width) {
            local.in_env = true;
            local.var = binder;
            local.path = ch.path;
        } else {
            local.in_env = false;
            local.path.assign(ch.path.begin() + 1, ch.path.end());
        }
    }
    RepaintStep r = repaint_rec(d.kids[0], local);
    Derivation out = make_lam(c, binder, r.d);
    if (!r.extra) return {std::move(out), std::nullopt};
    PairChange extra = *r.extra;
    if (extra.in_env && extra.var == binder) {
        extra.in_env = false;
        extra.var.clear();
    } else if (!extra.in_env) {
        extra.path.insert(extra.path.begin(), width);
    }
    return {std::move(out), extra};
}

RepaintStep repaint_app(const Derivation& d, const PairChange& ch) {
    Color app_color = d.subject.color();
    Derivation fun = d.kids[0];
    Derivation arg = d.kids[1];
    int width = static_cast<int>(fun.linear().arg().width());

    enum class Side { Fun, Arg };
    Side side;
    PairChange cur;
    if (ch.in_env) {
        std::size_t w1 = fun.env.get(ch.var).width();
        std::size_t e = static_cast<std::size_t>(ch.path.front());
        if (e < w1) {
            side = Side::Fun;
            cur = ch;
        } else {
            side = Side::Arg;
            cur = ch;
            cur.path[0] = static_cast<int>(e - w1);
        }
    } else {
        side = Side::Fun;
        cur.in_env = false;
        cur.path = ch.path;
        cur.path.insert(cur.path.begin(), width);
    }

    std::size_t guard = count_black_arrows(fun.linear().arg()) + 2;
    for (std::size_t round = 0; round <= guard; ++round) {
        if (side == Side::Fun) {
            RepaintStep r = repaint_rec(fun, cur);
            fun = std::move(r.d);
            if (!r.extra) return {make_app(app_color, fun, arg), std::nullopt};
            PairChange e = *r.extra;
            if (!e.in_env && e.path.front() == -1)  // arrow head whitened: index shift
                return {make_app(app_color, fun, arg), std::nullopt};
            if (!e.in_env && e.path.front() < width) {
                side = Side::Arg;  // the change moved into the argument multi type
                cur.in_env = false;
                cur.var.clear();
                cur.path = e.path;
                continue;
            }
            Derivation out = make_app(app_color, fun, arg);
            if (!e.in_env) e.path.erase(e.path.begin());
            return {std::move(out), e};
        }
        RepaintStep r = repaint_rec(arg, cur);
        arg = std::move(r.d);
        if (!r.extra) return {make_app(app_color, fun, arg), std::nullopt};
        PairChange e = *r.extra;
        if (!e.in_env) {
            side = Side::Fun;  // bounce back through the arrow's argument
            cur.in_env = false;
            cur.var.clear();
            cur.path = e.path;
            continue;
        }
        Derivation out = make_app(app_color, fun, arg);
        std::size_t w1 = out.kids[0].env.get(e.var).width();
        e.path[0] += static_cast<int>(w1);
        return {std::move(out), e};
    }
    throw DomainError("repainting did not stabilize");
}

RepaintStep repaint_rec(const Derivation& d, const PairChange& ch) {
    switch (d.rule) {
        case Derivation::Rule::Ax: return repaint_ax(d, ch);
        case Derivation::Rule::Many: return repaint_many(d, ch);
        case Derivation::Rule::Lam: return repaint_lam(d, ch);
        case Derivation::Rule::App: return repaint_app(d, ch);
    }
    throw DomainError("unreachable");
}

Whitening pos_witness_of(const Derivation& d, const TypeEnv& env_target,
                         const std::optional<LinearType>& lt,
                         const std::optional<MultiType>& mt) {
    std::optional<Whitening> w;
    if (lt)
        w = decide_whitening_pair(Polarity::Pos, d.env, d.linear(), env_target, *lt);
    else
        w = decide_whitening_pair_multi(Polarity::Pos, d.env, d.multi(), env_target, *mt);
    if (!w) throw WitnessMismatch("repainting produced a non-whiter typing");
    return *w;
}

RepaintOutcome repaint_multi_impl(const Derivation& d, const TypeEnv& env_target,
                                  const std::optional<LinearType>& lt,
                                  const std::optional<MultiType>& mt, bool single) {
    std::optional<Whitening> neg;
    std::vector<PairChange> diffs;
    if (lt) {
        neg = decide_whitening_pair(Polarity::Neg, env_target, *lt, d.env, d.linear());
        diffs = pair_diff(env_target, *lt, d.env, d.linear());
    } else {
        neg = decide_whitening_pair_multi(Polarity::Neg, env_target, *mt, d.env, d.multi());
        std::set<std::string> vars;
        for (const auto& [x, m] : env_target.entries()) vars.insert(x);
        for (const auto& [x, m] : d.env.entries()) vars.insert(x);
        for (const auto& x : vars)
            for (auto& p : diff_multi(env_target.get(x), d.env.get(x)))
                diffs.push_back({true, x, std::move(p)});
        for (auto& p : diff_multi(*mt, d.multi())) diffs.push_back({false, "", std::move(p)});
    }
    if (!neg) throw WitnessMismatch("target is not a negative whitening of the conclusion");
    if (single && neg->count != 1)
        throw WitnessMismatch("repaint_one needs exactly one whitening");
    Derivation cur = d;
    long long whitened = 0;
    for (const auto& ch : diffs) {
        RepaintStep r = repaint_rec(cur, ch);
        cur = std::move(r.d);
        if (r.extra) ++whitened;
    }
    Whitening w = pos_witness_of(cur, env_target, lt, mt);
    if (w.count != whitened)
        throw WitnessMismatch("unexpected whitening count after repainting");
    long long delta = cur.index - d.index;
    return {std::move(cur), whitened, delta, std::move(w)};
}

} // namespace

RepaintOutcome repaint_one(const Derivation& d, const TypeEnv& env_target,
                           const LinearType& type_target) {
    return repaint_multi_impl(d, env_target, type_target, std::nullopt, true);
}

RepaintOutcome multirepaint(const Derivation& d, const TypeEnv& env_target,
                            const LinearType& type_target) {
    return repaint_multi_impl(d, env_target, type_target, std::nullopt, false);
}

RepaintOutcome multirepaint_multi(const Derivation& d, const TypeEnv& env_target,
                                  const MultiType& type_target) {
    return repaint_multi_impl(d, env_target, std::nullopt, type_target, false);
}

namespace {

MultiType recolor_multi(const MultiType& m, const std::vector<int>& path) {
    return recolor_at(m, path, Color::White);
}

} // namespace

AppRepaintResult app_repaint(const Derivation& fun, const Derivation& arg,
                             AppRepaintSide side, Color app_color) {
    if (!fun.concludes_linear() || !fun.linear().is_arrow())
        throw WitnessMismatch("app_repaint: function side must have an arrow type");
    if (arg.concludes_linear())
        throw WitnessMismatch("app_repaint: argument side must be a many node");

    TypeEnv env0 = fun.env.sum(arg.env);
    LinearType l0 = fun.linear().result();

    MultiType m = fun.linear().arg();
    MultiType n = arg.multi();

    Derivation f = fun;
    Derivation a = arg;
    std::size_t guard = count_black_arrows(m) + count_black_arrows(n) + 2;
    for (std::size_t round = 0; round <= guard; ++round) {
        m = f.linear().arg();
        n = a.multi();
        // Direction check doubles as a skeleton check.
        bool equal = (side == AppRepaintSide::ArgWhiter) ? diff_multi(n, m).empty()
                                                         : diff_multi(m, n).empty();
        if (equal) {
            Derivation out = make_app(app_color, f, a);
            auto w = decide_whitening_pair(Polarity::Pos, out.env, out.linear(), env0, l0);
            if (!w) throw WitnessMismatch("app_repaint result is not positively whiter");
            return {std::move(out), w->count, std::move(*w)};
        }
        if (side == AppRepaintSide::ArgWhiter) {
            // N ⊑+ M: repaint the function toward N -> a L.
            LinearType target_t = LinearType::arrow(n, f.linear().color(), f.linear().result());
            RepaintOutcome r = multirepaint(f, f.env, target_t);
            f = std::move(r.derivation);
            side = AppRepaintSide::ArrowArgWhiter;
        } else {
            // M ⊑- N: repaint the argument toward M.
            RepaintOutcome r = multirepaint_multi(a, a.env, m);
            a = std::move(r.derivation);
            side = AppRepaintSide::ArgWhiter;
        }
    }
    throw DomainError("app_repaint did not stabilize");
}

CommuteResult commute_whitening(const TypeEnv& env, const LinearType& type,
                                const PairChange& neg_change, const PairChange& pos_change) {
    auto apply = [](TypeEnv e, LinearType t,
                    const PairChange& ch) -> std::pair<TypeEnv, LinearType> {
        if (ch.in_env) {
            e.set(ch.var, recolor_multi(e.get(ch.var), ch.path));
            return {std::move(e), std::move(t)};
        }
        return {std::move(e), recolor_at(t, ch.path, Color::White)};
    };
    auto [neg_env, neg_t] = apply(env, type, neg_change);
    auto [pos_env, pos_t] = apply(env, type, pos_change);
    auto [corner_env0, corner_t0] = apply(neg_env, neg_t, pos_change);
    TypeEnv corner_env = corner_env0;
    LinearType corner_t = corner_t0;
    auto w1 = decide_whitening_pair(Polarity::Pos, corner_env, corner_t, neg_env, neg_t);
    auto w2 = decide_whitening_pair(Polarity::Neg, corner_env, corner_t, pos_env, pos_t);
    if (!w1 || w1->count != 1 || !w2 || w2->count != 1)
        throw WitnessMismatch("commutation corner does not complete the square");
    return {std::move(corner_env), std::move(corner_t), std::move(*w1), std::move(*w2)};
}

} // namespace checkers
