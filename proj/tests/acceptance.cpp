// Acceptance suite: one line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "checkers/combinators.hpp"
#include "checkers/corpus.hpp"
#include "checkers/preorders.hpp"
#include "checkers/syntax.hpp"
#include "checkers/whitening.hpp"
#include "support/generators.hpp"

using namespace checkers;

namespace {

int failures = 0;
std::vector<std::string> notes;

void criterion(int n, const std::string& what, const std::function<bool()>& run) {
    notes.clear();
    bool ok = false;
    std::string error;
    auto t0 = std::chrono::steady_clock::now();
    try {
        ok = run();
    } catch (const std::exception& e) {
        error = e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (ok) {
        std::printf("[PASS] criterion %2d (%5.1fs): %s\n", n, secs, what.c_str());
    } else {
        ++failures;
        std::printf("[FAIL] criterion %2d (%5.1fs): %s\n", n, secs, what.c_str());
        for (const auto& msg : notes) std::printf("         %s\n", msg.c_str());
        if (!error.empty()) std::printf("         exception: %s\n", error.c_str());
    }
    std::fflush(stdout);
}

bool expect(bool cond, const std::string& msg) {
    if (!cond) notes.push_back(msg);
    return cond;
}

const LinearType X = LinearType::atom("X");

Derivation eta_derivation(Color env_arrow) {
    LinearType head = LinearType::arrow(MultiType{}, env_arrow, X);
    Derivation ax = make_ax("x", head);
    Derivation arg = make_many(Term::var("y"), {});
    Derivation app = make_app(Color::Black, std::move(ax), std::move(arg));
    return make_lam(Color::Black, "y", std::move(app));
}

struct HnfShape {
    std::size_t binders = 0;
    std::size_t args = 0;
};

HnfShape shape_of(const Term& hnf) {
    HnfShape s;
    Term cur = hnf;
    while (cur.is_abs()) {
        ++s.binders;
        cur = cur.body();
    }
    while (cur.is_app()) {
        ++s.args;
        cur = cur.fun();
    }
    return s;
}

} // namespace

int main() {
    // 1. Interaction counts of the two identities under [] @b I_b.
    criterion(1, "head counts under [] @b \\b x. x are exactly 1 and 0", [] {
        Context c = parse_context("[] @b \\b x. x");
        EvalResult white = evaluate_head(plug(c, parse_term("\\w x. x")));
        EvalResult black = evaluate_head(plug(c, parse_term("\\b x. x")));
        return expect(white.normal() && white.interactions == 1,
                      "white identity must cost exactly 1") &
               expect(black.normal() && black.interactions == 0,
                      "black identity must cost exactly 0");
    });

    // 2. The delta examples: root step kinds and the monochrome normal form.
    criterion(2, "delta examples: silent/interaction roots and the white normal form", [] {
        Term silent = parse_term("(\\b x. x) @b (\\w y. \\w x. x @w (y @w x))");
        Term inter = parse_term("(\\b x. x) @w (\\w y. \\w x. x @w (y @w x))");
        bool a = expect(classify_redex(silent) == RedexKind::Silent, "black-on-black is silent");
        bool b = expect(classify_redex(inter) == RedexKind::Interaction,
                        "white application of a black abstraction interacts");
        auto nf = normalize(
            parse_term("(\\w y. \\w x. x @w (y @w x)) @w (\\w y. \\w x. x @w (y @w x))"));
        bool c = expect(nf.has_value() &&
                            alpha_eq(*nf, parse_term("\\w x. x @w (\\w z. z @w (x @w z))")),
                        "white delta-delta normal form mismatch");
        return a & b & c;
    });

    // 3. The displayed eta-expansion derivation and its rejected variant.
    criterion(3, "eta-expansion derivation checks; the miscolored axiom is rejected", [] {
        Derivation white = eta_derivation(Color::White);
        Derivation black = eta_derivation(Color::Black);
        Derivation bad{Derivation::Rule::Ax, TypeEnv{}, Term::var("x"),
                       LinearType::arrow(MultiType{}, Color::Black, X), std::nullopt, 0, {}};
        bad.env.set("x", MultiType({LinearType::arrow(MultiType{}, Color::White, X)}));
        return expect(checks(white) && white.index == 1, "index-1 derivation must check") &
               expect(checks(black) && black.index == 0, "index-0 derivation must check") &
               expect(!checks(bad), "mismatched axiom colors must be rejected");
    });

    // 4. Quantitative subject reduction fuzz: 500 head steps.
    criterion(4, "quantitative subject reduction on 500 fuzzed head steps", [] {
        testgen::Rng rng(211);
        int steps = 0;
        for (int i = 0; i < 4000 && steps < 500; ++i) {
            Term t = testgen::gen_term(rng, 3 + testgen::pick(rng, 7), {});
            auto d0 = testgen::canonical_derivation(t, 400);
            if (!d0) continue;
            Derivation d = *d0;
            Term cur = t;
            while (auto step = head_step(cur)) {
                auto [next, kind] = head_reduce_derivation(d);
                if (!expect(checks(next), "reduced derivation must check")) return false;
                if (!expect(applicative_size(next) == applicative_size(d) - 1,
                            "applicative size must drop by exactly 1"))
                    return false;
                long long want = d.index - (kind == StepKind::InteractionHead ? 1 : 0);
                if (!expect(next.index == want, "index law violated")) return false;
                if (!expect(kind == step->second, "step kind mismatch with the engine"))
                    return false;
                d = next;
                cur = step->first;
                ++steps;
            }
        }
        return expect(steps >= 500, "needs at least 500 fuzzed steps, got " +
                                        std::to_string(steps));
    });

    // 5. Soundness/completeness round trip on 200 normalizing terms.
    criterion(5, "enumerate finds the engine's exact count; all typings are sound", [] {
        testgen::Rng rng(223);
        int done = 0;
        for (int i = 0; i < 4000 && done < 200; ++i) {
            Term t = testgen::gen_term(rng, 2 + testgen::pick(rng, 6), {});
            EvalResult ev = evaluate_head(t, 400);
            if (!ev.normal()) continue;
            HnfShape s = shape_of(ev.final_term);
            if (s.args > 2 || s.binders > 3) continue;
            TypeBound bound{1, static_cast<int>(s.args) + 1, 2, 1};
            Enumeration en = enumerate_typings(t, bound, 400);
            bool exact = false;
            for (const auto& [ty, d] : en.items) {
                if (ty.index == ev.interactions) exact = true;
                if (!expect(checks(d), "enumerated derivation must check")) return false;
                if (!expect(check_soundness(t, d, 4000) == Soundness::Holds,
                            "soundness must hold for " + print_typing(ty)))
                    return false;
            }
            if (!expect(exact, "no typing matches the engine count for " + print_term(t)))
                return false;
            ++done;
        }
        return expect(done >= 200, "needs 200 normalizing terms, got " + std::to_string(done));
    });

    // 6. Whitening metatheory: equality at zero, transitivity, commutation.
    criterion(6, "whitening: 0-equality (300), additive transitivity, commutation (200)", [] {
        testgen::Rng rng(227);
        for (int i = 0; i < 300; ++i) {
            LinearType t = testgen::gen_type(rng, 1 + testgen::pick(rng, 4));
            auto w = decide_whitening(Polarity::Pos, t, t);
            if (!expect(w && w->count == 0, "reflexive whitening must have count 0"))
                return false;
            LinearType u = testgen::gen_type(rng, 1 + testgen::pick(rng, 4));
            auto cross = decide_whitening(Polarity::Pos, t, u);
            if (cross && cross->count == 0 && !expect(t == u, "count 0 must force equality"))
                return false;
        }
        int trans = 0, comm = 0;
        for (int i = 0; i < 8000 && (trans < 200 || comm < 200); ++i) {
            LinearType c = testgen::gen_type(rng, 2 + testgen::pick(rng, 3));
            // transitivity: whiten twice and compose
            std::vector<ArrowPos> elig;
            for (const auto& p : collect_arrows(c, Polarity::Pos))
                if (p.pol == Polarity::Pos && p.color == Color::Black) elig.push_back(p);
            if (!elig.empty() && trans < 200) {
                LinearType mid = recolor_at(c, elig[0].path, Color::White);
                std::vector<ArrowPos> elig2;
                for (const auto& p : collect_arrows(mid, Polarity::Pos))
                    if (p.pol == Polarity::Pos && p.color == Color::Black) elig2.push_back(p);
                LinearType top = elig2.empty()
                                     ? mid
                                     : recolor_at(mid, elig2[0].path, Color::White);
                auto w1 = decide_whitening(Polarity::Pos, top, mid);
                auto w2 = decide_whitening(Polarity::Pos, mid, c);
                if (!expect(w1 && w2, "chain must be derivable")) return false;
                Whitening both = compose_whitening(*w1, *w2);
                if (!expect(both.count == w1->count + w2->count, "counts must add"))
                    return false;
                if (!expect(check_whitening(both), "composed witness must check")) return false;
                ++trans;
            }
            if (comm < 200) {
                TypeEnv env;
                env.set("x", MultiType({testgen::gen_type(rng, 2)}));
                auto neg = whitenable_positions(Polarity::Neg, env, c);
                auto pos = whitenable_positions(Polarity::Pos, env, c);
                if (!neg.empty() && !pos.empty()) {
                    CommuteResult r = commute_whitening(env, c, neg[0], pos[0]);
                    if (!expect(check_whitening(r.pos_from_neg) &&
                                    check_whitening(r.neg_from_pos),
                                "commutation corner must recheck"))
                        return false;
                    ++comm;
                }
            }
        }
        bool ok_t = expect(trans >= 200, "needs 200 transitivity instances");
        bool ok_c = expect(comm >= 200, "needs 200 commutation instances");
        return ok_t && ok_c;
    });

    // 7. Repainting: repaint_one 500, multirepaint 200, app_repaint 200.
    criterion(7, "repainting laws hold on fuzz (500 + 200 + 200)", [] {
        testgen::Rng rng(229);
        TypeBound bound{2, 2, 3, 1};
        auto pool = testgen::derivation_pool(rng, 500, bound);
        if (!expect(!pool.empty(), "empty derivation pool")) return false;
        int one = 0, multi = 0, app = 0;
        for (int i = 0; i < 60000 && (one < 500 || multi < 200 || app < 200); ++i) {
            const auto& [ty, d] = pool[static_cast<std::size_t>(
                testgen::pick(rng, static_cast<int>(pool.size())))];
            std::vector<PairChange> elig = whitenable_positions(Polarity::Neg, ty.env, ty.type);

            if (!elig.empty() && one < 500) {
                const PairChange& ch = elig[static_cast<std::size_t>(
                    testgen::pick(rng, static_cast<int>(elig.size())))];
                TypeEnv env = ty.env;
                LinearType type = ty.type;
                if (ch.in_env)
                    env.set(ch.var, recolor_at(env.get(ch.var), ch.path, Color::White));
                else
                    type = recolor_at(type, ch.path, Color::White);
                RepaintOutcome out = repaint_one(d, env, type);
                if (!expect(checks(out.derivation), "repainted derivation must check"))
                    return false;
                if (!expect(check_whitening(out.witness), "repaint witness must check"))
                    return false;
                long long drift = std::llabs(out.derivation.index - d.index);
                if (!expect(out.whitened == 0 || out.whitened == 1, "i must be 0 or 1"))
                    return false;
                if (!expect(drift <= 1 - out.whitened, "|k-k'| <= 1-i violated")) return false;
                ++one;
            }
            if (elig.size() >= 2 && multi < 200) {
                std::size_t k1 = 2 + static_cast<std::size_t>(
                                         testgen::pick(rng, static_cast<int>(
                                                                std::min<std::size_t>(
                                                                    elig.size(), 3) -
                                                                1)));
                TypeEnv env = ty.env;
                LinearType type = ty.type;
                for (std::size_t j = 0; j < k1; ++j) {
                    const PairChange& ch = elig[j];
                    if (ch.in_env)
                        env.set(ch.var, recolor_at(env.get(ch.var), ch.path, Color::White));
                    else
                        type = recolor_at(type, ch.path, Color::White);
                }
                RepaintOutcome out = multirepaint(d, env, type);
                if (!expect(checks(out.derivation), "multirepainted derivation must check"))
                    return false;
                if (!expect(check_whitening(out.witness), "multirepaint witness must check"))
                    return false;
                long long drift = std::llabs(out.derivation.index - d.index);
                if (!expect(out.whitened <= static_cast<long long>(k1), "k2 <= k1 violated"))
                    return false;
                if (!expect(drift <= static_cast<long long>(k1) - out.whitened,
                            "|k-k'| <= k1-k2 violated"))
                    return false;
                ++multi;
            }
            if (ty.type.is_arrow() && app < 200) {
                MultiType m = d.linear().arg();
                Color a = d.linear().color();
                Color b = testgen::pick_color(rng);
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
                for (const auto& e : n.elems()) kids.push_back(make_ax("uarg", e));
                Derivation arg = make_many(Term::var("uarg"), kids);
                AppRepaintResult r = app_repaint(
                    d, arg,
                    arg_whiter ? AppRepaintSide::ArgWhiter : AppRepaintSide::ArrowArgWhiter, b);
                if (!expect(checks(r.derivation), "app_repaint result must check")) return false;
                if (!expect(check_whitening(r.witness), "app_repaint witness must check"))
                    return false;
                long long bound_m =
                    d.index + arg.index + color_mismatch(a, b) + delta - r.delta_prime;
                if (!expect(r.derivation.index <= bound_m,
                            "m <= k+l+xor+delta-delta' violated"))
                    return false;
                ++app;
            }
        }
        bool ok1 = expect(one >= 500, "needs 500 repaint_one instances, got " + std::to_string(one));
        bool ok2 = expect(multi >= 200,
                          "needs 200 multirepaint instances, got " + std::to_string(multi));
        bool ok3 = expect(app >= 200, "needs 200 app_repaint instances, got " + std::to_string(app));
        return ok1 && ok2 && ok3;
    });

    // 8. Corpus agreement with the main equivalence.
    criterion(8, "corpus: expected verdicts match and no definite disagreement", [] {
        std::vector<CorpusEntry> entries = load_corpus(CHECKERS_CORPUS_FILE);
        if (!expect(entries.size() >= 20, "corpus must have at least 20 entries")) return false;
        bool has_eta = false, has_exp = false, has_bottom = false, has_j = false;
        for (const auto& e : entries) {
            if (e.name == "eta-reduction") has_eta = true;
            if (e.name == "eta-expansion") has_exp = true;
            if (e.name == "omega-bottom") has_bottom = true;
            if (e.name == "j3-below-id") has_j = true;
        }
        if (!expect(has_eta && has_exp && has_bottom && has_j,
                    "required named pairs missing"))
            return false;
        RunConfig cfg;
        CorpusReport rep = run_corpus(entries, cfg);
        if (!expect(rep.all_consistent, "definite verdicts disagree somewhere")) return false;
        if (rep.mismatches != 0) {
            for (const auto& e : rep.json_report.at("entries"))
                if (!e.value("match", false))
                    notes.push_back("mismatch at " + e.value("name", std::string("?")) + ": " +
                                    e.dump());
        }
        return expect(rep.mismatches == 0, "corpus verdicts deviate from the expected ones");
    });

    // 9. Böhm-out separators are engine-verified on six eta-gap pairs.
    criterion(9, "synthesized separators give strictly larger right counts", [] {
        std::vector<std::pair<std::string, std::string>> pairs = {
            {"\\x. x", "\\x. \\y. x y"},
            {"x", "\\y. x y"},
            {"\\y. x y", "\\y. x (\\z. y z)"},
            {"\\y. x y q", "\\y. x y (\\w. q w)"},
            {"\\x. \\y. y x", "\\x. \\y. y (\\z. x z)"},
            {"\\x. x", "\\x. \\y0. x (\\y1. y0 y1)"},
        };
        for (const auto& [lhs, rhs] : pairs) {
            SeparatorResult r = bohm_out_separator(parse_term(lhs), parse_term(rhs), 8);
            if (!expect(r.count_rhs > r.count_lhs,
                        "separator counts not increasing for " + lhs + " vs " + rhs))
                return false;
            Term ct = plug(paint_context(Color::White, r.plain_context),
                           paint(Color::Black, parse_term(lhs)));
            Term cu = plug(paint_context(Color::White, r.plain_context),
                           paint(Color::Black, parse_term(rhs)));
            EvalResult rt = evaluate_head(ct);
            EvalResult ru = evaluate_head(cu);
            if (!expect(rt.normal() && ru.normal() && rt.interactions == r.count_lhs &&
                            ru.interactions == r.count_rhs,
                        "engine re-verification failed for " + lhs + " vs " + rhs))
                return false;
        }
        return true;
    });

    // 10. Compositionality: plugged Holds pairs never flip to Fails.
    criterion(10, "pwc never fails on plugged Holds pairs (10 x 30 contexts)", [] {
        testgen::Rng rng(233);
        TypeBound bound{2, 2, 3, 1};
        std::vector<std::pair<Term, Term>> pairs = {
            {parse_term("\\y. x y"), parse_term("x")},
            {parse_term("\\x. \\y. x y"), parse_term("\\x. x")},
            {parse_term("\\x. x"), parse_term("\\x. x")},
            {parse_term("(\\x. x) (\\y. y)"), parse_term("\\y. y")},
            {parse_term("\\x. \\y. x (\\z. y z)"), parse_term("\\x. \\y. x y")},
            {combinators::omega(), parse_term("\\x. x")},
            {parse_term("\\x. \\y. y"), parse_term("\\x. \\y. y")},
            {parse_term("x y"), parse_term("x y")},
            {combinators::j_unfolding(2), parse_term("\\x. x")},
            {parse_term("\\z. z q"), parse_term("\\z. z q")},
        };
        for (const auto& [t, u] : pairs) {
            Verdict direct = pwc_check(t, u, bound, 2000);
            if (!expect(direct.tag != VerdictTag::Fails, "base pair must not fail")) return false;
            for (int i = 0; i < 30; ++i) {
                Context c = testgen::gen_context(rng, 1 + testgen::pick(rng, 6));
                Term ct = plug(c, paint(Color::Black, t));
                Term cu = plug(c, paint(Color::Black, u));
                Verdict v = pwc_check_checkers(ct, cu, bound, 2000);
                if (!expect(v.tag != VerdictTag::Fails,
                            "plugged pair fails under " + print_context(c)))
                    return false;
            }
        }
        return true;
    });

    // 11. Confluence: 300 normalizing terms, 5 random strategies each.
    criterion(11, "300 normalizing random terms reach alpha-identical normal forms", [] {
        testgen::Rng rng(239);
        int done = 0;
        for (int i = 0; i < 20000 && done < 300; ++i) {
            Term t = testgen::gen_term(rng, 2 + testgen::pick(rng, 7), {});
            auto lo = normalize(t, 200);
            if (!lo) continue;
            ProbeReport rep = confluence_probe(t, 5, 2000, 1000 + i);
            if (rep.verdict == ProbeVerdict::Unknown) continue;
            if (!expect(rep.verdict == ProbeVerdict::Holds,
                        "confluence counterexample on " + print_term(t)))
                return false;
            if (!expect(alpha_eq(*rep.normal_form, *lo),
                        "random strategies disagree with leftmost-outermost on " +
                            print_term(t)))
                return false;
            ++done;
        }
        return expect(done >= 300, "needs 300 normalizing terms, got " + std::to_string(done));
    });

    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
