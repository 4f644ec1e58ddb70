#include "checkers/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <mutex>
#include <thread>

#include "checkers/json_io.hpp"
#include "checkers/syntax.hpp"

namespace checkers {

using nlohmann::json;

namespace {

ExpectedVerdict expected_from(const json& j) {
    ExpectedVerdict e;
    e.verdict = j.at("verdict").get<std::string>();
    if (e.verdict != "holds" && e.verdict != "fails" && e.verdict != "unknown")
        throw CorpusParseError("bad expected verdict '" + e.verdict + "'");
    e.definite = j.value("definite", true);
    return e;
}

bool matches(const ExpectedVerdict& e, const Verdict& v) {
    return e.verdict == verdict_name(v.tag) && e.definite == v.definite;
}

json expected_to_json(const ExpectedVerdict& e) {
    return json{{"verdict", e.verdict}, {"definite", e.definite}};
}

} // namespace

std::vector<CorpusEntry> load_corpus(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open corpus file " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw CorpusParseError(std::string("corpus is not valid JSON: ") + e.what());
    }
    std::vector<CorpusEntry> out;
    for (const auto& ej : j.at("entries")) {
        CorpusEntry e;
        e.name = ej.at("name").get<std::string>();
        e.lhs = ej.at("lhs").get<std::string>();
        e.rhs = ej.at("rhs").get<std::string>();
        const auto& ex = ej.at("expected");
        e.bohm = expected_from(ex.at("bohm_eta"));
        e.pwc = expected_from(ex.at("pwc"));
        e.ctx_imp = expected_from(ex.at("ctx_imp"));
        e.provenance = ej.value("provenance", "");
        out.push_back(std::move(e));
    }
    return out;
}

CorpusReport run_corpus(const std::vector<CorpusEntry>& entries, const RunConfig& cfg) {
    CrosscheckConfig cc;
    cc.bohm_depth = cfg.bohm_depth;
    cc.bound = cfg.bound;
    cc.ctx = cfg.ctx;
    cc.fuel = cfg.fuel;

    struct Row {
        json j;
        bool mismatch = false;
        bool consistent = true;
    };
    std::vector<Row> rows(entries.size());

    auto run_one = [&](std::size_t i) {
        const CorpusEntry& e = entries[i];
        Row row;
        try {
            Term lhs = parse_term(e.lhs);
            Term rhs = parse_term(e.rhs);
            CrosscheckReport rep = crosscheck_main_theorem(lhs, rhs, cc);
            bool ok = matches(e.bohm, rep.bohm) && matches(e.pwc, rep.pwc) &&
                      matches(e.ctx_imp, rep.ctx_imp);
            row.mismatch = !ok;
            row.consistent = rep.consistent;
            row.j = json{{"name", e.name},
                         {"provenance", e.provenance},
                         {"verdicts",
                          json{{"bohm_eta", verdict_to_json(rep.bohm)},
                               {"pwc", verdict_to_json(rep.pwc)},
                               {"ctx_imp", verdict_to_json(rep.ctx_imp)}}},
                         {"expected",
                          json{{"bohm_eta", expected_to_json(e.bohm)},
                               {"pwc", expected_to_json(e.pwc)},
                               {"ctx_imp", expected_to_json(e.ctx_imp)}}},
                         {"match", ok},
                         {"consistent", rep.consistent}};
        } catch (const std::exception& ex) {
            row.mismatch = true;
            row.consistent = false;
            row.j = json{{"name", e.name}, {"error", ex.what()}, {"match", false}};
        }
        rows[i] = std::move(row);
    };

    if (cfg.jobs > 1) {
        std::vector<std::thread> pool;
        std::size_t next = 0;
        std::mutex mu;
        for (int w = 0; w < cfg.jobs; ++w)
            pool.emplace_back([&]() {
                while (true) {
                    std::size_t i;
                    {
                        std::lock_guard<std::mutex> lock(mu);
                        if (next >= entries.size()) return;
                        i = next++;
                    }
                    run_one(i);
                }
            });
        for (auto& th : pool) th.join();
    } else {
        for (std::size_t i = 0; i < entries.size(); ++i) run_one(i);
    }

    CorpusReport rep;
    json out{{"schema", json_schema_version},
             {"seed", cfg.seed},
             {"config", json{{"fuel", cfg.fuel},
                             {"bohm_depth", cfg.bohm_depth},
                             {"type_bound", json{{"width", cfg.bound.width},
                                                 {"depth", cfg.bound.depth},
                                                 {"unfold", cfg.bound.unfold}}},
                             {"ctx", json{{"max_args", cfg.ctx.max_args},
                                          {"max_size", cfg.ctx.max_size},
                                          {"max_combinator", cfg.ctx.max_combinator}}}}}};
    json items = json::array();
    // Assembly ordered by entry name.
    std::vector<std::size_t> order(entries.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return entries[a].name < entries[b].name;
    });
    for (auto i : order) {
        if (rows[i].mismatch) ++rep.mismatches;
        if (!rows[i].consistent) rep.all_consistent = false;
        items.push_back(rows[i].j);
    }
    out["entries"] = std::move(items);
    out["mismatches"] = rep.mismatches;
    rep.json_report = std::move(out);
    return rep;
}

} // namespace checkers
