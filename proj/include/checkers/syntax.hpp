#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

#include "checkers/term.hpp"
#include "checkers/types.hpp"

namespace checkers {

struct SourceSpan {
    std::size_t begin = 0;
    std::size_t end = 0;
};

class ParseError : public std::runtime_error {
public:
    ParseError(SourceSpan span, const std::string& msg)
        : std::runtime_error(msg + " at " + std::to_string(span.begin) + ".." +
                             std::to_string(span.end)),
          span_(span) {}
    SourceSpan span() const { return span_; }

private:
    SourceSpan span_;
};

// A hole appeared where a term was expected.
class UnboundHole : public ParseError {
public:
    using ParseError::ParseError;
};

// A context had zero or more than one hole.
class HoleCountError : public ParseError {
public:
    using ParseError::ParseError;
};

// Concrete syntax:
//   variables    [a-zA-Z_][a-zA-Z0-9_']*
//   abstraction  \b x. t   \w x. t   plain: \x. t     (λ•, λ∘, λ accepted)
//   application  t @b u    t @w u    plain: t u       (@•, @∘ accepted)
//   hole         []
// Application associates to the left; abstraction bodies extend maximally
// to the right.
Term parse_term(const std::string& src);
Context parse_context(const std::string& src);

// Types: atoms are identifiers, multisets are [L1, L2, ...], arrows are
// M ->b L / M ->w L and associate to the right.
LinearType parse_type(const std::string& src);
MultiType parse_multi_type(const std::string& src);

std::string print_term(const Term& t);
std::string print_plain(const Term& t);  // washed syntax, no color markers
std::string print_context(const Context& c);
std::string print_context_plain(const Context& c);
std::string print_type(const LinearType& t);
std::string print_multi_type(const MultiType& m);
std::string print_env(const TypeEnv& e);
std::string print_typing(const Typing& t);

} // namespace checkers
