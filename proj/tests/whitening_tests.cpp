#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "checkers/syntax.hpp"
#include "checkers/whitening.hpp"
#include "support/generators.hpp"

using namespace checkers;

namespace {

const LinearType X = LinearType::atom("X");
const LinearType arrow_w = LinearType::arrow(MultiType{}, Color::White, X);
const LinearType arrow_b = LinearType::arrow(MultiType{}, Color::Black, X);

LinearType arr(MultiType m, Color c, LinearType r) {
    return LinearType::arrow(std::move(m), c, std::move(r));
}

// Random type recolored white at a sample of positions eligible for the
// given base polarity.
std::optional<std::pair<LinearType, int>> whiter_variant(testgen::Rng& rng,
                                                         const LinearType& t, Polarity base,
                                                         int max_flips) {
    std::vector<ArrowPos> all = collect_arrows(t, base);
    std::vector<ArrowPos> eligible;
    for (const auto& p : all)
        if (p.pol == Polarity::Pos && p.color == Color::Black) eligible.push_back(p);
    if (eligible.empty()) return std::nullopt;
    int flips = 1 + testgen::pick(rng, std::min<int>(max_flips, static_cast<int>(eligible.size())));
    LinearType out = t;
    std::set<std::size_t> used;
    int applied = 0;
    while (applied < flips) {
        std::size_t i = static_cast<std::size_t>(testgen::pick(rng, static_cast<int>(eligible.size())));
        if (!used.insert(i).second) continue;
        out = recolor_at(out, eligible[i].path, Color::White);
        ++applied;
    }
    return std::make_pair(out, flips);
}

} // namespace

TEST_CASE("direct whitening rule instances") {
    auto w = decide_whitening(Polarity::Pos, arrow_w, arrow_b);
    REQUIRE(w.has_value());
    CHECK(w->count == 1);
    CHECK(check_whitening(*w));
    // No negative top-level whitening rule.
    CHECK_FALSE(decide_whitening(Polarity::Neg, arrow_w, arrow_b).has_value());
    // The direction cannot blacken.
    CHECK_FALSE(decide_whitening(Polarity::Pos, arrow_b, arrow_w).has_value());
}

TEST_CASE("pair whitening of the eta example") {
    LinearType m_arrow_w = arr(MultiType({X}), Color::White, X);
    LinearType m_arrow_b = arr(MultiType({X}), Color::Black, X);
    TypeEnv env;
    env.set("x", MultiType({m_arrow_w}));
    auto w = decide_whitening_pair(Polarity::Pos, env, m_arrow_w, env, m_arrow_b);
    REQUIRE(w.has_value());
    CHECK(w->count == 1);
    CHECK(check_whitening(*w));
}

TEST_CASE("whitening under nested arguments follows the polarity") {
    // One nesting is negative: not derivable (the omission is intentional).
    LinearType lhs1 = arr(MultiType({arrow_w}), Color::Black, X);
    LinearType rhs1 = arr(MultiType({arrow_b}), Color::Black, X);
    CHECK_FALSE(decide_whitening(Polarity::Pos, lhs1, rhs1).has_value());
    // Two nestings flip back to positive: derivable with count 1.
    LinearType lhs2 = arr(MultiType({lhs1}), Color::Black, X);
    LinearType rhs2 = arr(MultiType({rhs1}), Color::Black, X);
    auto w = decide_whitening(Polarity::Pos, lhs2, rhs2);
    REQUIRE(w.has_value());
    CHECK(w->count == 1);
    CHECK(check_whitening(*w));
    // And it is negative-derivable one level down.
    auto wn = decide_whitening(Polarity::Neg, lhs1, rhs1);
    REQUIRE(wn.has_value());
    CHECK(wn->count == 1);
}

TEST_CASE("zero whitening coincides with equality") {
    testgen::Rng rng(89);
    for (int i = 0; i < 300; ++i) {
        LinearType t = testgen::gen_type(rng, 1 + testgen::pick(rng, 4));
        for (Polarity p : {Polarity::Pos, Polarity::Neg}) {
            auto w = decide_whitening(p, t, t);
            REQUIRE(w.has_value());
            CHECK(w->count == 0);
        }
        LinearType u = testgen::gen_type(rng, 1 + testgen::pick(rng, 4));
        auto w = decide_whitening(Polarity::Pos, t, u);
        if (w && w->count == 0) CHECK(t == u);
    }
}

TEST_CASE("transitivity composes with additive counts") {
    testgen::Rng rng(97);
    int done = 0;
    for (int i = 0; i < 20000 && done < 200; ++i) {
        LinearType c = testgen::gen_type(rng, 2 + testgen::pick(rng, 3));
        auto mid = whiter_variant(rng, c, Polarity::Pos, 2);
        if (!mid) continue;
        auto top = whiter_variant(rng, mid->first, Polarity::Pos, 2);
        if (!top) continue;
        auto w2 = decide_whitening(Polarity::Pos, mid->first, c);
        auto w1 = decide_whitening(Polarity::Pos, top->first, mid->first);
        REQUIRE(w1.has_value());
        REQUIRE(w2.has_value());
        Whitening both = compose_whitening(*w1, *w2);
        CHECK(both.count == w1->count + w2->count);
        CHECK(check_whitening(both));
        ++done;
    }
    CHECK(done == 200);
}

TEST_CASE("composition with the zero witness is the identity") {
    testgen::Rng rng(5);
    LinearType t = arr(MultiType({arrow_b}), Color::Black, X);
    auto zero = decide_whitening(Polarity::Pos, t, t);
    REQUIRE(zero.has_value());
    auto some = whiter_variant(rng, t, Polarity::Pos, 1);
    REQUIRE(some.has_value());
    auto w = decide_whitening(Polarity::Pos, some->first, t);
    REQUIRE(w.has_value());
    Whitening c = compose_whitening(*w, *zero);
    CHECK(c.count == w->count);
}

TEST_CASE("inversion preserves the count both ways") {
    // The eta-expansion pair inverts to an arrow-level witness of count 1.
    TypeEnv el, er;
    el.set("x", MultiType({arrow_w}));
    er.set("x", MultiType({arrow_w}));
    el.set("y", MultiType({X}));
    er.set("y", MultiType({X}));
    auto pw = decide_whitening_pair(Polarity::Pos, el, arrow_w, er, arrow_b);
    REQUIRE(pw.has_value());
    CHECK(pw->count == 1);
    Whitening arrw = invert_pair_to_arrow(*pw, "y", Color::Black);
    CHECK(arrw.count == 1);
    CHECK(check_whitening(arrw));
    Whitening back = invert_pair_to_binding(arrw, "y");
    CHECK(back.count == 1);
    CHECK(check_whitening(back));

    testgen::Rng rng(103);
    int done = 0;
    for (int i = 0; i < 400 && done < 100; ++i) {
        LinearType t = testgen::gen_type(rng, 2 + testgen::pick(rng, 2));
        LinearType m = testgen::gen_type(rng, 2);
        TypeEnv env;
        env.set("z", MultiType({m}));
        auto tv = whiter_variant(rng, t, Polarity::Pos, 2);
        if (!tv) continue;
        auto w = decide_whitening_pair(Polarity::Pos, env, tv->first, env, t);
        if (!w) continue;
        Whitening a = invert_pair_to_arrow(*w, "z", Color::White);
        Whitening b = invert_pair_to_binding(a, "z");
        CHECK(b.count == w->count);
        CHECK(check_whitening(b));
        ++done;
    }
    CHECK(done == 100);
}

TEST_CASE("repaint_one: the axiom flips both occurrences") {
    Derivation d = make_ax("x", arrow_b);
    TypeEnv target_env;
    target_env.set("x", MultiType({arrow_w}));
    RepaintOutcome out = repaint_one(d, target_env, arrow_b);
    CHECK(checks(out.derivation));
    CHECK(out.whitened == 1);
    CHECK(out.derivation.index == 0);
    CHECK(out.derivation.linear() == arrow_w);
    CHECK(out.derivation.env.get("x") == MultiType({arrow_w}));
    CHECK(check_whitening(out.witness));
}

TEST_CASE("repaint_one: recoloring the applied arrow shifts the index") {
    // x @b y with x : [X] ->b X; whitening x's arrow flips the xor.
    LinearType m_arrow_b = arr(MultiType({X}), Color::Black, X);
    LinearType m_arrow_w = arr(MultiType({X}), Color::White, X);
    Derivation d = make_app(Color::Black, make_ax("x", m_arrow_b),
                            make_many(Term::var("y"), {make_ax("y", X)}));
    CHECK(d.index == 0);
    TypeEnv target_env;
    target_env.set("x", MultiType({m_arrow_w}));
    target_env.set("y", MultiType({X}));
    RepaintOutcome out = repaint_one(d, target_env, X);
    CHECK(checks(out.derivation));
    CHECK(out.whitened == 0);  // case (ii)
    CHECK(out.derivation.index == 1);
    CHECK(out.derivation.env == target_env);
    CHECK(out.derivation.linear() == X);
}

namespace {

struct RepaintInstance {
    Derivation d;
    TypeEnv env_target;
    LinearType type_target;
    std::size_t changes;
};

const std::vector<std::pair<Typing, Derivation>>& repaint_pool() {
    static testgen::Rng rng(4242);
    static auto pool = testgen::derivation_pool(rng, 400, TypeBound{2, 2, 3, 1});
    return pool;
}

std::optional<RepaintInstance> gen_repaint_instance(testgen::Rng& rng, int max_changes) {
    const auto& pool = repaint_pool();
    if (pool.empty()) return std::nullopt;
    const auto& [ty, d] =
        pool[static_cast<std::size_t>(testgen::pick(rng, static_cast<int>(pool.size())))];
    std::vector<PairChange> elig = whitenable_positions(Polarity::Neg, ty.env, ty.type);
    if (elig.empty()) return std::nullopt;
    std::size_t n = 1 + static_cast<std::size_t>(
                            testgen::pick(rng, std::min<int>(max_changes,
                                                             static_cast<int>(elig.size()))));
    std::set<std::size_t> chosen;
    while (chosen.size() < n)
        chosen.insert(static_cast<std::size_t>(
            testgen::pick(rng, static_cast<int>(elig.size()))));
    TypeEnv env = ty.env;
    LinearType type = ty.type;
    for (auto i : chosen) {
        const PairChange& ch = elig[i];
        if (ch.in_env)
            env.set(ch.var, recolor_at(env.get(ch.var), ch.path, Color::White));
        else
            type = recolor_at(type, ch.path, Color::White);
    }
    return RepaintInstance{d, std::move(env), std::move(type), n};
}

} // namespace

TEST_CASE("repaint_one satisfies the (i)/(ii) disjunction on fuzz") {
    testgen::Rng rng(107);
    int done = 0;
    for (int iter = 0; iter < 4000 && done < 150; ++iter) {
        auto inst = gen_repaint_instance(rng, 1);
        if (!inst) continue;
        RepaintOutcome out = repaint_one(inst->d, inst->env_target, inst->type_target);
        CHECK(checks(out.derivation));
        CHECK(check_whitening(out.witness));
        CHECK((out.whitened == 0 || out.whitened == 1));
        long long drift = out.derivation.index - inst->d.index;
        CHECK(std::abs(drift) <= 1 - out.whitened);
        if (out.whitened == 0) {
            CHECK(out.derivation.env == inst->env_target);
            CHECK(out.derivation.linear() == inst->type_target);
        }
        ++done;
    }
    CHECK(done == 150);
}

TEST_CASE("multirepaint bounds |k - k'| by k1 - k2") {
    testgen::Rng rng(109);
    // k1 = 0 is the identity.
    Derivation ax = make_ax("x", arrow_b);
    TypeEnv env0;
    env0.set("x", MultiType({arrow_b}));
    RepaintOutcome id = multirepaint(ax, env0, arrow_b);
    CHECK(id.whitened == 0);
    CHECK(id.derivation.index == ax.index);

    int done = 0;
    for (int iter = 0; iter < 6000 && done < 100; ++iter) {
        auto inst = gen_repaint_instance(rng, 3);
        if (!inst || inst->changes < 2) continue;
        RepaintOutcome out = multirepaint(inst->d, inst->env_target, inst->type_target);
        CHECK(checks(out.derivation));
        CHECK(check_whitening(out.witness));
        CHECK(out.whitened <= static_cast<long long>(inst->changes));
        long long drift = std::abs(out.derivation.index - inst->d.index);
        CHECK(drift <= static_cast<long long>(inst->changes) - out.whitened);
        ++done;
    }
    CHECK(done == 100);
}

TEST_CASE("app_repaint with delta = 0 is the plain application rule") {
    LinearType m_arrow_w = arr(MultiType({X}), Color::White, X);
    Derivation fun = make_ax("x", arr(MultiType({m_arrow_w}), Color::White, X));
    Derivation arg = make_many(Term::var("u"), {make_ax("u", m_arrow_w)});
    AppRepaintResult r = app_repaint(fun, arg, AppRepaintSide::ArgWhiter, Color::Black);
    CHECK(checks(r.derivation));
    CHECK(r.delta_prime == 0);
    CHECK(r.derivation.index == 0 + 0 + 1);  // xor(White, Black)
}

TEST_CASE("app_repaint inequality on fuzz") {
    testgen::Rng rng(113);
    int done = 0;
    const auto& pool = repaint_pool();
    for (int iter = 0; iter < 6000 && done < 120; ++iter) {
        const auto& [ty, d] = pool[static_cast<std::size_t>(
            testgen::pick(rng, static_cast<int>(pool.size())))];
        if (!ty.type.is_arrow()) continue;
        const Derivation* fun = &d;
        MultiType m = fun->linear().arg();
        Color a = fun->linear().color();
        Color b = testgen::pick_color(rng);

        // Either the argument's type N is whiter than M (N ⊑+ M), or the
        // arrow's argument M is whiter than N (M ⊑- N, built by blackening
        // white arrows of M at negatively based positions).
        bool arg_whiter = testgen::pick(rng, 2) == 0;
        MultiType n = m;
        long long delta = 0;
        Polarity base = arg_whiter ? Polarity::Pos : Polarity::Neg;
        Color want = arg_whiter ? Color::Black : Color::White;
        Color put = arg_whiter ? Color::White : Color::Black;
        for (const auto& p : collect_arrows(m, base)) {
            if (p.pol != Polarity::Pos || p.color != want) continue;
            if (testgen::pick(rng, 2)) continue;
            n = recolor_at(n, p.path, put);
            ++delta;
        }
        std::vector<Derivation> kids;
        for (const auto& e : n.elems()) kids.push_back(make_ax("u", e));
        Derivation arg = make_many(Term::var("u"), kids);
        AppRepaintResult r = app_repaint(
            *fun, arg,
            arg_whiter ? AppRepaintSide::ArgWhiter : AppRepaintSide::ArrowArgWhiter, b);
        CHECK(checks(r.derivation));
        CHECK(check_whitening(r.witness));
        CHECK(r.delta_prime <= delta);
        long long bound = fun->index + arg.index + color_mismatch(a, b) + delta - r.delta_prime;
        CHECK(r.derivation.index <= bound);
        ++done;
    }
    CHECK(done == 120);
}

TEST_CASE("commutation square completes") {
    testgen::Rng rng(127);
    int done = 0;
    for (int iter = 0; iter < 4000 && done < 200; ++iter) {
        LinearType t = testgen::gen_type(rng, 2 + testgen::pick(rng, 2));
        TypeEnv env;
        env.set("x", MultiType({testgen::gen_type(rng, 2)}));
        std::vector<PairChange> neg = whitenable_positions(Polarity::Neg, env, t);
        std::vector<PairChange> pos = whitenable_positions(Polarity::Pos, env, t);
        if (neg.empty() || pos.empty()) continue;
        const PairChange& nc = neg[static_cast<std::size_t>(
            testgen::pick(rng, static_cast<int>(neg.size())))];
        const PairChange& pc = pos[static_cast<std::size_t>(
            testgen::pick(rng, static_cast<int>(pos.size())))];
        CommuteResult r = commute_whitening(env, t, nc, pc);
        CHECK(check_whitening(r.pos_from_neg));
        CHECK(check_whitening(r.neg_from_pos));
        CHECK(r.pos_from_neg.count == 1);
        CHECK(r.neg_from_pos.count == 1);
        ++done;
    }
    CHECK(done == 200);
}

TEST_CASE("whitening preserves the washed skeleton") {
    testgen::Rng rng(131);
    int done = 0;
    for (int iter = 0; iter < 4000 && done < 100; ++iter) {
        LinearType t = testgen::gen_type(rng, 2 + testgen::pick(rng, 3));
        auto v = whiter_variant(rng, t, Polarity::Pos, 3);
        if (!v) continue;
        auto w = decide_whitening(Polarity::Pos, v->first, t);
        REQUIRE(w.has_value());
        // Same depth and the diff only recolors; never reshapes.
        CHECK(v->first.depth() == t.depth());
        CHECK(count_black_arrows(t) ==
              count_black_arrows(v->first) + static_cast<std::size_t>(w->count));
        ++done;
    }
    CHECK(done == 100);
}
