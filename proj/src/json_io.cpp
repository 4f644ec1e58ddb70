#include "checkers/json_io.hpp"

#include "checkers/syntax.hpp"

namespace checkers {

using nlohmann::json;

namespace {

std::string color_str(Color c) { return std::string(1, color_char(c)); }

Color color_from(const json& j) {
    std::string s = j.get<std::string>();
    if (s == "b") return Color::Black;
    if (s == "w") return Color::White;
    throw DomainError("bad color tag '" + s + "'");
}

} // namespace

json term_to_json(const Term& t) {
    switch (t.kind()) {
        case Term::Kind::Var: return json{{"k", "var"}, {"x", t.name()}};
        case Term::Kind::Abs:
            return json{{"k", "abs"}, {"c", color_str(t.color())}, {"x", t.name()},
                        {"t", term_to_json(t.body())}};
        case Term::Kind::App:
            return json{{"k", "app"}, {"c", color_str(t.color())}, {"f", term_to_json(t.fun())},
                        {"a", term_to_json(t.arg())}};
    }
    throw DomainError("unreachable");
}

Term term_from_json(const json& j) {
    std::string k = j.at("k").get<std::string>();
    if (k == "var") return Term::var(j.at("x").get<std::string>());
    if (k == "abs")
        return Term::abs(color_from(j.at("c")), j.at("x").get<std::string>(),
                         term_from_json(j.at("t")));
    if (k == "app")
        return Term::app(color_from(j.at("c")), term_from_json(j.at("f")),
                         term_from_json(j.at("a")));
    throw DomainError("bad term tag '" + k + "'");
}

json context_to_json(const Context& c) {
    switch (c.kind()) {
        case Context::Kind::Hole: return json{{"k", "hole"}};
        case Context::Kind::Abs:
            return json{{"k", "abs"}, {"c", color_str(c.color())}, {"x", c.name()},
                        {"t", context_to_json(c.sub())}};
        case Context::Kind::AppLeft:
            return json{{"k", "appl"}, {"c", color_str(c.color())},
                        {"f", context_to_json(c.sub())}, {"a", term_to_json(c.term_part())}};
        case Context::Kind::AppRight:
            return json{{"k", "appr"}, {"c", color_str(c.color())},
                        {"f", term_to_json(c.term_part())}, {"a", context_to_json(c.sub())}};
    }
    throw DomainError("unreachable");
}

Context context_from_json(const json& j) {
    std::string k = j.at("k").get<std::string>();
    if (k == "hole") return Context::hole();
    if (k == "abs")
        return Context::abs(color_from(j.at("c")), j.at("x").get<std::string>(),
                            context_from_json(j.at("t")));
    if (k == "appl")
        return Context::app_left(color_from(j.at("c")), context_from_json(j.at("f")),
                                 term_from_json(j.at("a")));
    if (k == "appr")
        return Context::app_right(color_from(j.at("c")), term_from_json(j.at("f")),
                                  context_from_json(j.at("a")));
    throw DomainError("bad context tag '" + k + "'");
}

json type_to_json(const LinearType& t) {
    if (t.is_atom()) return json{{"k", "atom"}, {"x", t.atom_name()}};
    return json{{"k", "arrow"}, {"c", color_str(t.color())}, {"arg", multi_to_json(t.arg())},
                {"res", type_to_json(t.result())}};
}

LinearType type_from_json(const json& j) {
    std::string k = j.at("k").get<std::string>();
    if (k == "atom") return LinearType::atom(j.at("x").get<std::string>());
    if (k == "arrow")
        return LinearType::arrow(multi_from_json(j.at("arg")), color_from(j.at("c")),
                                 type_from_json(j.at("res")));
    throw DomainError("bad type tag '" + k + "'");
}

json multi_to_json(const MultiType& m) {
    json arr = json::array();
    for (const auto& e : m.elems()) arr.push_back(type_to_json(e));
    return arr;
}

MultiType multi_from_json(const json& j) {
    std::vector<LinearType> elems;
    for (const auto& e : j) elems.push_back(type_from_json(e));
    return MultiType(std::move(elems));
}

json env_to_json(const TypeEnv& e) {
    json out = json::object();
    for (const auto& [x, m] : e.entries()) out[x] = multi_to_json(m);
    return out;
}

TypeEnv env_from_json(const json& j) {
    TypeEnv out;
    for (auto it = j.begin(); it != j.end(); ++it) out.set(it.key(), multi_from_json(*it));
    return out;
}

json typing_to_json(const Typing& t) {
    return json{{"env", env_to_json(t.env)}, {"type", type_to_json(t.type)},
                {"index", t.index}};
}

Typing typing_from_json(const json& j) {
    return Typing{env_from_json(j.at("env")), type_from_json(j.at("type")),
                  j.at("index").get<long long>()};
}

namespace {

std::string rule_name(Derivation::Rule r) {
    switch (r) {
        case Derivation::Rule::Ax: return "ax";
        case Derivation::Rule::Many: return "many";
        case Derivation::Rule::Lam: return "lam";
        case Derivation::Rule::App: return "app";
    }
    return "?";
}

} // namespace

json derivation_to_json(const Derivation& d) {
    json out{{"rule", rule_name(d.rule)},
             {"env", env_to_json(d.env)},
             {"term", term_to_json(d.subject)},
             {"index", d.index}};
    if (d.ltype) out["type"] = type_to_json(*d.ltype);
    if (d.mtype) out["multi"] = multi_to_json(*d.mtype);
    json kids = json::array();
    for (const auto& k : d.kids) kids.push_back(derivation_to_json(k));
    out["kids"] = std::move(kids);
    return out;
}

Derivation derivation_from_json(const json& j) {
    std::string rule = j.at("rule").get<std::string>();
    Term subject = term_from_json(j.at("term"));
    std::vector<Derivation> kids;
    for (const auto& k : j.at("kids")) kids.push_back(derivation_from_json(k));
    Derivation d{Derivation::Rule::Ax, env_from_json(j.at("env")), subject,
                 std::nullopt, std::nullopt, j.at("index").get<long long>(), std::move(kids)};
    if (rule == "ax") d.rule = Derivation::Rule::Ax;
    else if (rule == "many") d.rule = Derivation::Rule::Many;
    else if (rule == "lam") d.rule = Derivation::Rule::Lam;
    else if (rule == "app") d.rule = Derivation::Rule::App;
    else throw DomainError("bad rule tag '" + rule + "'");
    if (j.contains("type")) d.ltype = type_from_json(j.at("type"));
    if (j.contains("multi")) d.mtype = multi_from_json(j.at("multi"));
    return d;
}

json whitening_to_json(const Whitening& w) {
    json out;
    switch (w.kind) {
        case Whitening::Kind::Atom: out["k"] = "atom"; break;
        case Whitening::Kind::ArrowWhiten: out["k"] = "whiten"; break;
        case Whitening::Kind::ArrowSame: out["k"] = "arrow"; break;
        case Whitening::Kind::Multi: out["k"] = "multi"; break;
        case Whitening::Kind::Env: out["k"] = "env"; break;
        case Whitening::Kind::Pair: out["k"] = "pair"; break;
    }
    out["pol"] = w.pol == Polarity::Pos ? "+" : "-";
    out["count"] = w.count;
    if (w.ltype_lhs) out["lhs"] = type_to_json(*w.ltype_lhs);
    if (w.ltype_rhs) out["rhs"] = type_to_json(*w.ltype_rhs);
    if (w.mtype_lhs) out["lhs_multi"] = multi_to_json(*w.mtype_lhs);
    if (w.mtype_rhs) out["rhs_multi"] = multi_to_json(*w.mtype_rhs);
    if (w.env_lhs) out["lhs_env"] = env_to_json(*w.env_lhs);
    if (w.env_rhs) out["rhs_env"] = env_to_json(*w.env_rhs);
    if (!w.perm.empty()) out["perm"] = w.perm;
    if (!w.vars.empty()) out["vars"] = w.vars;
    json kids = json::array();
    for (const auto& k : w.kids) kids.push_back(whitening_to_json(k));
    out["kids"] = std::move(kids);
    return out;
}

namespace {

std::string step_name(StepKind k) {
    switch (k) {
        case StepKind::SilentHead: return "silent-head";
        case StepKind::InteractionHead: return "interaction-head";
        case StepKind::SilentInternal: return "silent-internal";
        case StepKind::InteractionInternal: return "interaction-internal";
    }
    return "?";
}

} // namespace

json eval_result_to_json(const EvalResult& r, bool with_trace) {
    json out{{"status", r.normal() ? "normal" : (r.cycle ? "diverges" : "fuel-exhausted")},
             {"term", print_term(r.final_term)},
             {"interactions", r.interactions},
             {"silents", r.silents}};
    if (with_trace) {
        json steps = json::array();
        for (const auto& s : r.trace)
            steps.push_back(json{{"kind", step_name(s.kind)}, {"term", print_term(s.term)}});
        out["trace"] = std::move(steps);
    }
    return out;
}

json verdict_to_json(const Verdict& v) {
    json out{{"verdict", verdict_name(v.tag)}, {"definite", v.definite}, {"detail", v.detail}};
    if (v.counterexample) out["counterexample"] = typing_to_json(*v.counterexample);
    if (v.separating_context) {
        out["context"] = print_context(*v.separating_context);
        out["count_lhs"] = v.count_lhs;
        out["count_rhs"] = v.count_rhs;
    }
    return out;
}

json approximant_to_json(const BohmApproximant& a) {
    switch (a.kind) {
        case BohmApproximant::Kind::Bottom: return json{{"k", "bottom"}};
        case BohmApproximant::Kind::Cut: return json{{"k", "cut"}};
        case BohmApproximant::Kind::Node: {
            json kids = json::array();
            for (const auto& c : a.children) kids.push_back(approximant_to_json(c));
            return json{{"k", "node"}, {"binders", a.binders}, {"head", a.head},
                        {"children", std::move(kids)}};
        }
    }
    throw DomainError("unreachable");
}

} // namespace checkers
