#pragma once

#include "checkers/term.hpp"

namespace checkers {
namespace combinators {

// Plain (wash-normal) building blocks; paint at use.
Term identity();                  // \x. x
Term omega();                     // (\x. x x)(\y. y y)
Term fixpoint();                  // \f. (\x. f (x x)) (\x. f (x x))

// T_n = \x1...xn. \z. z x1 ... xn
Term tupler(int n);
// P^n_i = \x1...xn. xi, 1-based
Term selector(int n, int i);

// The d-fold unfolding of J = Y (\z x y. x (z y)) with the identity at the
// core: a finite eta-expansion of the identity along J's spine.
Term j_unfolding(int d);

} // namespace combinators
} // namespace checkers
