#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "checkers/combinators.hpp"
#include "checkers/corpus.hpp"
#include "checkers/json_io.hpp"
#include "checkers/preorders.hpp"
#include "checkers/syntax.hpp"
#include "checkers/whitening.hpp"

using namespace checkers;
using nlohmann::json;

namespace {

constexpr int exit_input_error = 1;
constexpr int exit_usage = 2;
constexpr int exit_internal = 70;

std::uint64_t seed_from_env(std::uint64_t fallback) {
    if (const char* s = std::getenv("CHECKERS_SEED")) return std::strtoull(s, nullptr, 10);
    return fallback;
}

struct CompareFlags {
    std::string rel = "all";
    int depth = 6;
    int width = 2;
    int type_depth = 3;
    int unfold = 4;
    int ctx_size = 8;
    long long fuel = default_fuel;
};

void print_verdict(const std::string& name, const Verdict& v, bool as_json) {
    if (as_json) return;  // assembled by the caller
    std::cout << name << ": " << verdict_name(v.tag) << (v.definite ? "" : " (bounded)")
              << " -- " << v.detail << "\n";
    if (v.separating_context)
        std::cout << "  context: " << print_context(*v.separating_context) << "  counts "
                  << v.count_lhs << " vs " << v.count_rhs << "\n";
}

int run_reduce(const std::string& src, const std::string& strategy, long long fuel,
               bool trace, bool as_json) {
    Term t = parse_term(src);
    if (strategy == "head") {
        EvalResult r = evaluate_head(t, fuel, trace);
        if (as_json) {
            std::cout << eval_result_to_json(r, trace).dump(2) << "\n";
        } else {
            std::cout << (r.normal() ? "hnf: " : (r.cycle ? "diverges at: " : "fuel exhausted at: "))
                      << print_term(r.final_term) << "\n"
                      << "interactions: " << r.interactions << "  silents: " << r.silents << "\n";
            if (trace)
                for (const auto& s : r.trace)
                    std::cout << "  "
                              << (is_interaction(s.kind) ? "[i] " : "[s] ")
                              << print_term(s.term) << "\n";
        }
        return 0;
    }
    if (strategy == "full") {
        auto nf = normalize(t, fuel);
        if (as_json) {
            json out{{"status", nf ? "normal" : "fuel-exhausted"}};
            if (nf) out["term"] = print_term(*nf);
            std::cout << out.dump(2) << "\n";
        } else if (nf) {
            std::cout << "nf: " << print_term(*nf) << "\n";
        } else {
            std::cout << "fuel exhausted\n";
        }
        return 0;
    }
    std::cerr << "unknown strategy '" << strategy << "'\n";
    return exit_usage;
}

int run_type(const std::string& src, const TypeBound& bound, long long fuel,
             bool show_derivations, bool as_json) {
    Term t = parse_term(src);
    Enumeration en = enumerate_typings(t, bound, fuel);
    if (as_json) {
        json items = json::array();
        for (const auto& [ty, d] : en.items) {
            json it{{"typing", typing_to_json(ty)}};
            if (show_derivations) it["derivation"] = derivation_to_json(d);
            items.push_back(std::move(it));
        }
        json out{{"schema", json_schema_version},
                 {"complete", en.complete},
                 {"diverged", en.diverged},
                 {"typings", std::move(items)}};
        std::cout << out.dump(2) << "\n";
        return 0;
    }
    if (en.diverged) {
        std::cout << "diverged: interpretation is empty\n";
        return 0;
    }
    if (en.fuel_exhausted) std::cout << "(fuel exhausted: listing may be incomplete)\n";
    for (const auto& [ty, d] : en.items) std::cout << print_typing(ty) << "\n";
    if (!en.complete) std::cout << "(truncated by the bound)\n";
    return 0;
}

int run_whiten(const std::string& pol, const std::string& lhs, const std::string& rhs,
               bool as_json) {
    Polarity p = pol == "-" ? Polarity::Neg : Polarity::Pos;
    LinearType l = parse_type(lhs);
    LinearType r = parse_type(rhs);
    auto w = decide_whitening(p, l, r);
    if (as_json) {
        json out{{"derivable", w.has_value()}};
        if (w) out["witness"] = whitening_to_json(*w);
        std::cout << out.dump(2) << "\n";
    } else if (w) {
        std::cout << "derivable with count " << w->count << "\n";
    } else {
        std::cout << "not derivable\n";
    }
    return 0;
}

int run_compare(const std::string& lhs, const std::string& rhs, const CompareFlags& flags,
                bool as_json) {
    Term t = parse_term(lhs);
    Term u = parse_term(rhs);
    CrosscheckConfig cfg;
    cfg.bohm_depth = flags.depth;
    cfg.bound = TypeBound{flags.width, flags.type_depth, flags.unfold, 1};
    cfg.ctx.max_size = flags.ctx_size;
    cfg.fuel = flags.fuel;

    json out{{"schema", json_schema_version}};
    if (flags.rel == "all") {
        CrosscheckReport rep = crosscheck_main_theorem(t, u, cfg);
        if (as_json) {
            out["bohm_eta"] = verdict_to_json(rep.bohm);
            out["pwc"] = verdict_to_json(rep.pwc);
            out["ctx_imp"] = verdict_to_json(rep.ctx_imp);
            out["consistent"] = rep.consistent;
            std::cout << out.dump(2) << "\n";
        } else {
            print_verdict("bohm-eta", rep.bohm, false);
            print_verdict("pwc", rep.pwc, false);
            print_verdict("ctx-imp", rep.ctx_imp, false);
            if (!rep.consistent) {
                std::cerr << "internal error: definite verdicts disagree\n";
                return exit_internal;
            }
        }
        return 0;
    }
    Verdict v;
    if (flags.rel == "pwc") {
        v = pwc_check(t, u, cfg.bound, cfg.fuel);
    } else if (flags.rel == "bohm-eta") {
        BohmCompareResult r = bohm_le_eta(t, u, cfg.bohm_depth, cfg.fuel);
        v.tag = r.verdict == BohmVerdict::Holds
                    ? VerdictTag::Holds
                    : (r.verdict == BohmVerdict::Fails ? VerdictTag::Fails : VerdictTag::Unknown);
        v.definite = r.verdict != BohmVerdict::Unknown;
        v.detail = r.reason.empty() ? "decided within the depth" : r.reason;
    } else if (flags.rel == "ctx-imp") {
        v = interaction_improvement_check(t, u, cfg.ctx);
    } else {
        std::cerr << "unknown relation '" << flags.rel << "'\n";
        return exit_usage;
    }
    if (as_json)
        std::cout << verdict_to_json(v).dump(2) << "\n";
    else
        print_verdict(flags.rel, v, false);
    return 0;
}

int run_separate(const std::string& lhs, const std::string& rhs, int depth, long long fuel,
                 bool as_json) {
    Term t = parse_term(lhs);
    Term u = parse_term(rhs);
    SeparatorResult r = bohm_out_separator(t, u, depth, fuel);
    if (as_json) {
        json out{{"context", print_context_plain(r.plain_context)},
                 {"context_json", context_to_json(r.plain_context)},
                 {"count_lhs", r.count_lhs},
                 {"count_rhs", r.count_rhs}};
        std::cout << out.dump(2) << "\n";
    } else {
        std::cout << "context: " << print_context_plain(r.plain_context) << "\n"
                  << "counts: " << r.count_lhs << " vs " << r.count_rhs << "\n";
    }
    return 0;
}

int run_corpus_cmd(const std::string& path, RunConfig cfg, bool as_json) {
    std::vector<CorpusEntry> entries = load_corpus(path);
    CorpusReport rep = run_corpus(entries, cfg);
    if (as_json) {
        std::cout << rep.json_report.dump(2) << "\n";
    } else {
        for (const auto& e : rep.json_report.at("entries"))
            std::cout << (e.value("match", false) ? "[ ok ] " : "[FAIL] ")
                      << e.value("name", "?") << "\n";
        std::cout << rep.mismatches << " mismatches over " << entries.size() << " entries\n";
    }
    return rep.mismatches == 0 && rep.all_consistent ? 0 : exit_input_error;
}

int run_fmt(const std::string& src, bool plain, bool as_json) {
    Term t = parse_term(src);
    std::string printed = plain ? print_plain(t) : print_term(t);
    if (as_json)
        std::cout << json{{"term", printed}, {"json", term_to_json(t)}}.dump(2) << "\n";
    else
        std::cout << printed << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"checkers calculus workbench"};
    app.require_subcommand(1);
    bool as_json = false;
    app.add_flag("--json", as_json, "machine-readable JSON output");

    // reduce
    auto* reduce = app.add_subcommand("reduce", "evaluate a term");
    std::string reduce_term, strategy = "head";
    long long fuel = default_fuel;
    bool trace = false;
    reduce->add_option("term", reduce_term, "term source")->required();
    reduce->add_option("--strategy", strategy, "head|full")->capture_default_str();
    reduce->add_option("--fuel", fuel, "step budget")->capture_default_str();
    reduce->add_flag("--trace", trace, "record the reduction trace");

    // type
    auto* type_cmd = app.add_subcommand("type", "enumerate typings");
    std::string type_term, bound_spec;
    int width = 2, tdepth = 3, unfold = 6;
    bool show_derivations = false;
    type_cmd->add_option("term", type_term, "term source")->required();
    type_cmd->add_option("--bound", bound_spec, "compact bound, e.g. w=2,d=3");
    type_cmd->add_option("--width", width, "max multiset width")->capture_default_str();
    type_cmd->add_option("--depth", tdepth, "max type depth")->capture_default_str();
    type_cmd->add_option("--unfold", unfold, "max argument nesting")->capture_default_str();
    type_cmd->add_option("--fuel", fuel, "step budget");
    type_cmd->add_flag("--show-derivations", show_derivations, "include full derivations");

    // whiten
    auto* whiten = app.add_subcommand("whiten", "decide polarized whitening");
    std::string pol = "+", lhs_type, rhs_type;
    whiten->add_option("--pol", pol, "+ or -")->capture_default_str();
    whiten->add_option("--lhs", lhs_type, "whiter type")->required();
    whiten->add_option("--rhs", rhs_type, "blacker type")->required();

    // compare
    auto* compare = app.add_subcommand("compare", "decide the preorders");
    CompareFlags cflags;
    std::string cmp_lhs, cmp_rhs;
    compare->add_option("--rel", cflags.rel, "pwc|bohm-eta|ctx-imp|all")->capture_default_str();
    compare->add_option("--depth", cflags.depth, "Böhm depth")->capture_default_str();
    compare->add_option("--width", cflags.width, "type bound width")->capture_default_str();
    compare->add_option("--type-depth", cflags.type_depth, "type bound depth")
        ->capture_default_str();
    compare->add_option("--ctx-size", cflags.ctx_size, "context size bound")
        ->capture_default_str();
    compare->add_option("--fuel", cflags.fuel, "step budget")->capture_default_str();
    compare->add_option("lhs", cmp_lhs, "left term")->required();
    compare->add_option("rhs", cmp_rhs, "right term")->required();

    // separate
    auto* separate = app.add_subcommand("separate", "synthesize a separating context");
    std::string sep_lhs, sep_rhs;
    int sep_depth = 6;
    separate->add_option("lhs", sep_lhs, "left term")->required();
    separate->add_option("rhs", sep_rhs, "right term")->required();
    separate->add_option("--depth", sep_depth, "Böhm depth")->capture_default_str();
    separate->add_option("--fuel", fuel, "step budget");

    // corpus
    auto* corpus = app.add_subcommand("corpus", "run the bundled corpus");
    std::string corpus_path = "data/corpus.json";
    RunConfig rcfg;
    corpus->add_option("--file", corpus_path, "corpus file")->capture_default_str();
    corpus->add_option("--fuel", rcfg.fuel, "step budget")->capture_default_str();
    corpus->add_option("--depth", rcfg.bohm_depth, "Böhm depth")->capture_default_str();
    corpus->add_option("--seed", rcfg.seed, "report seed")->capture_default_str();
    corpus->add_option("--jobs", rcfg.jobs, "parallel workers")->capture_default_str();

    // fmt
    auto* fmt = app.add_subcommand("fmt", "parse and pretty-print");
    std::string fmt_term;
    bool fmt_plain = false;
    fmt->add_option("term", fmt_term, "term source")->required();
    fmt->add_flag("--plain", fmt_plain, "print the washed term");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : exit_usage;
    }

    try {
        if (reduce->parsed()) return run_reduce(reduce_term, strategy, fuel, trace, as_json);
        if (type_cmd->parsed()) {
            TypeBound bound{width, tdepth, unfold, 1};
            if (!bound_spec.empty()) {
                std::size_t pos = 0;
                while (pos < bound_spec.size()) {
                    std::size_t eq = bound_spec.find('=', pos);
                    std::size_t end = bound_spec.find(',', pos);
                    if (end == std::string::npos) end = bound_spec.size();
                    if (eq == std::string::npos || eq > end) {
                        std::cerr << "bad --bound entry, expected k=v pairs\n";
                        return exit_usage;
                    }
                    std::string key = bound_spec.substr(pos, eq - pos);
                    int value = std::atoi(bound_spec.substr(eq + 1, end - eq - 1).c_str());
                    if (key == "w") bound.width = value;
                    else if (key == "d") bound.depth = value;
                    else if (key == "u") bound.unfold = value;
                    else {
                        std::cerr << "unknown --bound key '" << key << "'\n";
                        return exit_usage;
                    }
                    pos = end + (end < bound_spec.size() ? 1 : 0);
                }
            }
            return run_type(type_term, bound, fuel, show_derivations, as_json);
        }
        if (whiten->parsed()) return run_whiten(pol, lhs_type, rhs_type, as_json);
        if (compare->parsed()) return run_compare(cmp_lhs, cmp_rhs, cflags, as_json);
        if (separate->parsed()) return run_separate(sep_lhs, sep_rhs, sep_depth, fuel, as_json);
        if (corpus->parsed()) {
            rcfg.seed = seed_from_env(rcfg.seed);
            return run_corpus_cmd(corpus_path, rcfg, as_json);
        }
        if (fmt->parsed()) return run_fmt(fmt_term, fmt_plain, as_json);
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return exit_input_error;
    } catch (const PreconditionFailed& e) {
        std::cerr << "precondition failed: " << e.what() << "\n";
        return exit_input_error;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_input_error;
    } catch (const CorpusParseError& e) {
        std::cerr << "corpus error: " << e.what() << "\n";
        return exit_input_error;
    } catch (const DomainError& e) {
        std::cerr << "internal invariant breach: " << e.what() << "\n";
        return exit_internal;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_input_error;
    }
    return exit_usage;
}
