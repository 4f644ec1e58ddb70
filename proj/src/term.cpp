#include "checkers/term.hpp"

#include <map>

namespace checkers {

Term Term::var(std::string name) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Var;
    n->color = plain_color;
    n->name = std::move(name);
    return wrap(n);
}

Term Term::abs(Color c, std::string binder, Term body) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Abs;
    n->color = c;
    n->name = std::move(binder);
    n->a = body.node_;
    return wrap(n);
}

Term Term::app(Color c, Term fun, Term arg) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::App;
    n->color = c;
    n->a = fun.node_;
    n->b = arg.node_;
    return wrap(n);
}

Color Term::color() const {
    if (is_var()) throw DomainError("variable has no color");
    return node_->color;
}

Term Term::body() const {
    if (!is_abs()) throw DomainError("body() on non-abstraction");
    return wrap(node_->a);
}

Term Term::fun() const {
    if (!is_app()) throw DomainError("fun() on non-application");
    return wrap(node_->a);
}

Term Term::arg() const {
    if (!is_app()) throw DomainError("arg() on non-application");
    return wrap(node_->b);
}

std::size_t Term::size() const {
    switch (kind()) {
        case Kind::Var: return 1;
        case Kind::Abs: return 1 + body().size();
        case Kind::App: return 1 + fun().size() + arg().size();
    }
    return 0;
}

namespace {

void free_vars_into(const Term& t, std::set<std::string>& bound, std::set<std::string>& out) {
    switch (t.kind()) {
        case Term::Kind::Var:
            if (!bound.count(t.name())) out.insert(t.name());
            return;
        case Term::Kind::Abs: {
            bool fresh = bound.insert(t.name()).second;
            free_vars_into(t.body(), bound, out);
            if (fresh) bound.erase(t.name());
            return;
        }
        case Term::Kind::App:
            free_vars_into(t.fun(), bound, out);
            free_vars_into(t.arg(), bound, out);
            return;
    }
}

} // namespace

std::set<std::string> free_vars(const Term& t) {
    std::set<std::string> bound, out;
    free_vars_into(t, bound, out);
    return out;
}

std::string fresh_name(const std::string& base, const std::set<std::string>& avoid) {
    std::string stem = base;
    auto cut = stem.find('\'');
    if (cut != std::string::npos) stem.resize(cut);
    if (stem.empty()) stem = "v";
    for (int i = 1;; ++i) {
        std::string cand = stem + "'" + std::to_string(i);
        if (!avoid.count(cand)) return cand;
    }
}

Term substitute(const Term& t, const std::string& x, const Term& u) {
    switch (t.kind()) {
        case Term::Kind::Var:
            return t.name() == x ? u : t;
        case Term::Kind::Abs: {
            if (t.name() == x) return t;
            std::set<std::string> fvu = free_vars(u);
            if (fvu.count(t.name()) && free_vars(t.body()).count(x)) {
                std::set<std::string> avoid = fvu;
                avoid.merge(free_vars(t.body()));
                avoid.insert(x);
                std::string y = fresh_name(t.name(), avoid);
                Term renamed = substitute(t.body(), t.name(), Term::var(y));
                return Term::abs(t.color(), y, substitute(renamed, x, u));
            }
            return Term::abs(t.color(), t.name(), substitute(t.body(), x, u));
        }
        case Term::Kind::App:
            return Term::app(t.color(), substitute(t.fun(), x, u), substitute(t.arg(), x, u));
    }
    throw DomainError("unreachable");
}

namespace {

bool alpha_eq_rec(const Term& t, const Term& u,
                  std::map<std::string, int>& bt, std::map<std::string, int>& bu, int depth) {
    if (t.kind() != u.kind()) return false;
    switch (t.kind()) {
        case Term::Kind::Var: {
            auto it = bt.find(t.name());
            auto iu = bu.find(u.name());
            if ((it == bt.end()) != (iu == bu.end())) return false;
            if (it == bt.end()) return t.name() == u.name();
            return it->second == iu->second;
        }
        case Term::Kind::Abs: {
            if (t.color() != u.color()) return false;
            auto st = bt.find(t.name());
            auto su = bu.find(u.name());
            std::optional<int> ot, ou;
            if (st != bt.end()) ot = st->second;
            if (su != bu.end()) ou = su->second;
            bt[t.name()] = depth;
            bu[u.name()] = depth;
            bool r = alpha_eq_rec(t.body(), u.body(), bt, bu, depth + 1);
            if (ot) bt[t.name()] = *ot; else bt.erase(t.name());
            if (ou) bu[u.name()] = *ou; else bu.erase(u.name());
            return r;
        }
        case Term::Kind::App:
            return t.color() == u.color() &&
                   alpha_eq_rec(t.fun(), u.fun(), bt, bu, depth + 1) &&
                   alpha_eq_rec(t.arg(), u.arg(), bt, bu, depth + 1);
    }
    return false;
}

void alpha_key_rec(const Term& t, std::map<std::string, int>& bound, int depth, std::string& out) {
    switch (t.kind()) {
        case Term::Kind::Var: {
            auto it = bound.find(t.name());
            if (it == bound.end()) {
                out += 'f';
                out += t.name();
            } else {
                out += '#';
                out += std::to_string(depth - it->second);
            }
            out += ';';
            return;
        }
        case Term::Kind::Abs: {
            out += 'L';
            out += color_char(t.color());
            auto prev = bound.find(t.name());
            std::optional<int> saved;
            if (prev != bound.end()) saved = prev->second;
            bound[t.name()] = depth;
            alpha_key_rec(t.body(), bound, depth + 1, out);
            if (saved) bound[t.name()] = *saved; else bound.erase(t.name());
            return;
        }
        case Term::Kind::App: {
            out += 'A';
            out += color_char(t.color());
            out += '(';
            alpha_key_rec(t.fun(), bound, depth + 1, out);
            alpha_key_rec(t.arg(), bound, depth + 1, out);
            out += ')';
            return;
        }
    }
}

} // namespace

bool alpha_eq(const Term& t, const Term& u) {
    if (t.same_node(u)) return true;
    std::map<std::string, int> bt, bu;
    return alpha_eq_rec(t, u, bt, bu, 0);
}

std::string alpha_key(const Term& t) {
    std::string out;
    std::map<std::string, int> bound;
    alpha_key_rec(t, bound, 0, out);
    return out;
}

Term paint(Color c, const Term& t) {
    switch (t.kind()) {
        case Term::Kind::Var: return t;
        case Term::Kind::Abs: return Term::abs(c, t.name(), paint(c, t.body()));
        case Term::Kind::App: return Term::app(c, paint(c, t.fun()), paint(c, t.arg()));
    }
    throw DomainError("unreachable");
}

Term wash(const Term& t) { return paint(plain_color, t); }

bool is_plain(const Term& t) {
    switch (t.kind()) {
        case Term::Kind::Var: return true;
        case Term::Kind::Abs: return t.color() == plain_color && is_plain(t.body());
        case Term::Kind::App:
            return t.color() == plain_color && is_plain(t.fun()) && is_plain(t.arg());
    }
    return false;
}

Context Context::hole() {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Hole;
    n->color = plain_color;
    return Context(n);
}

Context Context::abs(Color c, std::string binder, Context body) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Abs;
    n->color = c;
    n->name = std::move(binder);
    n->ctx = body.node_;
    return Context(n);
}

Context Context::app_left(Color c, Context fun, Term arg) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::AppLeft;
    n->color = c;
    n->ctx = fun.node_;
    n->term = std::move(arg);
    return Context(n);
}

Context Context::app_right(Color c, Term fun, Context arg) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::AppRight;
    n->color = c;
    n->ctx = arg.node_;
    n->term = std::move(fun);
    return Context(n);
}

Context Context::sub() const {
    if (kind() == Kind::Hole) throw DomainError("sub() on hole");
    return Context(node_->ctx);
}

Term Context::term_part() const {
    if (!node_->term) throw DomainError("term_part() on non-application context");
    return *node_->term;
}

std::size_t Context::size() const {
    switch (kind()) {
        case Kind::Hole: return 0;
        case Kind::Abs: return 1 + sub().size();
        case Kind::AppLeft: return 1 + sub().size() + term_part().size();
        case Kind::AppRight: return 1 + term_part().size() + sub().size();
    }
    return 0;
}

Term plug(const Context& c, const Term& t) {
    switch (c.kind()) {
        case Context::Kind::Hole: return t;
        case Context::Kind::Abs: return Term::abs(c.color(), c.name(), plug(c.sub(), t));
        case Context::Kind::AppLeft: return Term::app(c.color(), plug(c.sub(), t), c.term_part());
        case Context::Kind::AppRight: return Term::app(c.color(), c.term_part(), plug(c.sub(), t));
    }
    throw DomainError("unreachable");
}

Context compose(const Context& c, const Context& d) {
    switch (c.kind()) {
        case Context::Kind::Hole: return d;
        case Context::Kind::Abs: return Context::abs(c.color(), c.name(), compose(c.sub(), d));
        case Context::Kind::AppLeft:
            return Context::app_left(c.color(), compose(c.sub(), d), c.term_part());
        case Context::Kind::AppRight:
            return Context::app_right(c.color(), c.term_part(), compose(c.sub(), d));
    }
    throw DomainError("unreachable");
}

Context paint_context(Color col, const Context& ctx) {
    switch (ctx.kind()) {
        case Context::Kind::Hole: return ctx;
        case Context::Kind::Abs:
            return Context::abs(col, ctx.name(), paint_context(col, ctx.sub()));
        case Context::Kind::AppLeft:
            return Context::app_left(col, paint_context(col, ctx.sub()), paint(col, ctx.term_part()));
        case Context::Kind::AppRight:
            return Context::app_right(col, paint(col, ctx.term_part()), paint_context(col, ctx.sub()));
    }
    throw DomainError("unreachable");
}

} // namespace checkers
