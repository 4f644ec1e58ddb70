#pragma once

#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace checkers {

// The two players. Plain λ-terms are checkers terms in wash-normal form,
// i.e. every constructor painted Black.
enum class Color { White, Black };

constexpr Color flip(Color c) { return c == Color::White ? Color::Black : Color::White; }
constexpr char color_char(Color c) { return c == Color::White ? 'w' : 'b'; }

inline constexpr Color plain_color = Color::Black;

// Index increment of rule @: 1 iff abstraction and application colors differ.
constexpr int color_mismatch(Color a, Color b) { return a == b ? 0 : 1; }

class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Immutable bichromatic λ-term. Copies share structure.
class Term {
public:
    enum class Kind { Var, Abs, App };

    static Term var(std::string name);
    static Term abs(Color c, std::string binder, Term body);
    static Term app(Color c, Term fun, Term arg);

    Kind kind() const { return node_->kind; }
    bool is_var() const { return kind() == Kind::Var; }
    bool is_abs() const { return kind() == Kind::Abs; }
    bool is_app() const { return kind() == Kind::App; }

    // Var name, or the binder of an Abs.
    const std::string& name() const { return node_->name; }
    Color color() const;
    Term body() const;
    Term fun() const;
    Term arg() const;

    bool same_node(const Term& other) const { return node_ == other.node_; }
    std::size_t size() const;

private:
    struct Node {
        Kind kind;
        Color color;        // Abs/App only
        std::string name;   // Var/Abs only
        std::shared_ptr<const Node> a, b;
    };
    explicit Term(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    static Term wrap(std::shared_ptr<const Node> n) { return Term(std::move(n)); }
    std::shared_ptr<const Node> node_;
};

std::set<std::string> free_vars(const Term& t);

// Smallest name of the form base'N not contained in avoid.
std::string fresh_name(const std::string& base, const std::set<std::string>& avoid);

// Capture-free substitution of u for the free occurrences of x in t;
// binders of t are renamed when they would capture a free variable of u.
Term substitute(const Term& t, const std::string& x, const Term& u);

// Syntactic equality up to bound-variable names. Colors must match exactly.
bool alpha_eq(const Term& t, const Term& u);

// Canonical key: de Bruijn rendering with colors; equal iff alpha_eq.
std::string alpha_key(const Term& t);

// Uniform recoloring. paint is meant for wash-normal terms; wash erases
// colors back to the wash-normal form.
Term paint(Color c, const Term& t);
Term wash(const Term& t);
bool is_plain(const Term& t);

// A term with exactly one hole, enforced structurally.
class Context {
public:
    enum class Kind { Hole, Abs, AppLeft, AppRight };

    static Context hole();
    static Context abs(Color c, std::string binder, Context body);
    static Context app_left(Color c, Context fun, Term arg);
    static Context app_right(Color c, Term fun, Context arg);

    Kind kind() const { return node_->kind; }
    const std::string& name() const { return node_->name; }
    Color color() const { return node_->color; }
    Context sub() const;       // the subcontext of Abs/AppLeft/AppRight
    Term term_part() const;    // the Term side of AppLeft/AppRight

    std::size_t size() const;

private:
    struct Node {
        Kind kind;
        Color color;
        std::string name;
        std::shared_ptr<const Node> ctx;
        std::optional<Term> term;
    };
    explicit Context(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    std::shared_ptr<const Node> node_;
};

// Textual replacement of the hole; free variables of t may be captured.
Term plug(const Context& c, const Term& t);

// plug(compose(c, d), t) == plug(c, plug(d, t))
Context compose(const Context& c, const Context& d);

Context paint_context(Color c, const Context& ctx);

} // namespace checkers
