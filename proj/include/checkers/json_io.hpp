#pragma once

#include <json.hpp>

#include "checkers/bohm.hpp"
#include "checkers/derivation.hpp"
#include "checkers/preorders.hpp"
#include "checkers/reduce.hpp"
#include "checkers/term.hpp"
#include "checkers/types.hpp"
#include "checkers/whitening.hpp"

// JSON schema, version 1. Terms are nested tagged objects
// {"k":"abs","c":"b","x":"x","t":...}; typings are
// {"env":{...},"type":...,"index":k}.
namespace checkers {

inline constexpr int json_schema_version = 1;

nlohmann::json term_to_json(const Term& t);
Term term_from_json(const nlohmann::json& j);

nlohmann::json context_to_json(const Context& c);
Context context_from_json(const nlohmann::json& j);

nlohmann::json type_to_json(const LinearType& t);
LinearType type_from_json(const nlohmann::json& j);
nlohmann::json multi_to_json(const MultiType& m);
MultiType multi_from_json(const nlohmann::json& j);
nlohmann::json env_to_json(const TypeEnv& e);
TypeEnv env_from_json(const nlohmann::json& j);

nlohmann::json typing_to_json(const Typing& t);
Typing typing_from_json(const nlohmann::json& j);

nlohmann::json derivation_to_json(const Derivation& d);
Derivation derivation_from_json(const nlohmann::json& j);

nlohmann::json whitening_to_json(const Whitening& w);

nlohmann::json eval_result_to_json(const EvalResult& r, bool with_trace);
nlohmann::json verdict_to_json(const Verdict& v);
nlohmann::json approximant_to_json(const BohmApproximant& a);

} // namespace checkers
