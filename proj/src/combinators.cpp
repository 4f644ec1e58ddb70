#include "checkers/combinators.hpp"

namespace checkers {
namespace combinators {

namespace {

Term v(const std::string& n) { return Term::var(n); }
Term lam(const std::string& x, Term b) { return Term::abs(plain_color, x, std::move(b)); }
Term ap(Term f, Term a) { return Term::app(plain_color, std::move(f), std::move(a)); }

} // namespace

Term identity() { return lam("x", v("x")); }

Term omega() {
    Term half_x = lam("x", ap(v("x"), v("x")));
    Term half_y = lam("y", ap(v("y"), v("y")));
    return ap(half_x, half_y);
}

Term fixpoint() {
    Term half = lam("x", ap(v("f"), ap(v("x"), v("x"))));
    return lam("f", ap(half, half));
}

Term tupler(int n) {
    Term body = v("z");
    for (int i = 1; i <= n; ++i) body = ap(body, v("t" + std::to_string(i)));
    body = lam("z", body);
    for (int i = n; i >= 1; --i) body = lam("t" + std::to_string(i), body);
    return body;
}

Term selector(int n, int i) {
    Term body = v("s" + std::to_string(i));
    for (int j = n; j >= 1; --j) body = lam("s" + std::to_string(j), body);
    return body;
}

Term j_unfolding(int d) {
    // J satisfies J y = \y'. y (J y'); cutting the recursion with I after
    // d levels gives a finite eta-expansion of the identity.
    if (d < 1) throw DomainError("j_unfolding needs d >= 1");
    Term g = identity();
    for (int j = 1; j < d; ++j) {
        std::string a = "a" + std::to_string(j);
        std::string b = "b" + std::to_string(j);
        g = lam(a, lam(b, ap(v(a), ap(g, v(b)))));
    }
    return lam("x", lam("y0", ap(v("x"), ap(g, v("y0")))));
}

} // namespace combinators
} // namespace checkers
