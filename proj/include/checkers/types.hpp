#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "checkers/term.hpp"

namespace checkers {

class MultiType;

// Linear type: an atom or a colored arrow from a multi type.
class LinearType {
public:
    enum class Kind { Atom, Arrow };

    static LinearType atom(std::string name);
    static LinearType arrow(MultiType arg, Color c, LinearType result);

    Kind kind() const;
    bool is_atom() const { return kind() == Kind::Atom; }
    bool is_arrow() const { return kind() == Kind::Arrow; }
    const std::string& atom_name() const;
    const MultiType& arg() const;
    Color color() const;
    const LinearType& result() const;

    int depth() const;
    // Canonical structural key; equal keys iff equal types (multisets sorted).
    const std::string& key() const;

    bool operator==(const LinearType& o) const { return key() == o.key(); }
    bool operator!=(const LinearType& o) const { return !(*this == o); }
    bool operator<(const LinearType& o) const { return key() < o.key(); }

private:
    struct Node;
    explicit LinearType(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    std::shared_ptr<const Node> node_;
};

// Finite multiset of linear types. Element order is preserved for printing
// and positional surgery; equality is order-insensitive.
class MultiType {
public:
    MultiType() = default;
    explicit MultiType(std::vector<LinearType> elems) : elems_(std::move(elems)) {}

    bool empty() const { return elems_.empty(); }
    std::size_t width() const { return elems_.size(); }
    const std::vector<LinearType>& elems() const { return elems_; }
    const LinearType& at(std::size_t i) const { return elems_.at(i); }

    MultiType sum(const MultiType& o) const;
    MultiType sorted() const;
    int depth() const;  // 0 when empty
    std::string key() const;

    bool operator==(const MultiType& o) const;
    bool operator!=(const MultiType& o) const { return !(*this == o); }

private:
    std::vector<LinearType> elems_;
};

// Finite-support map from variables to multi types; absent means empty.
class TypeEnv {
public:
    TypeEnv() = default;

    MultiType get(const std::string& x) const;
    void set(const std::string& x, MultiType m);  // dropping empty entries
    TypeEnv sum(const TypeEnv& o) const;
    TypeEnv without(const std::string& x) const;
    bool contains(const std::string& x) const { return map_.count(x) != 0; }
    const std::map<std::string, MultiType>& entries() const { return map_; }
    std::vector<std::string> support() const;

    std::string key() const;
    bool operator==(const TypeEnv& o) const { return key() == o.key(); }
    bool operator!=(const TypeEnv& o) const { return !(*this == o); }

private:
    std::map<std::string, MultiType> map_;
};

// One element of a colored interpretation.
struct Typing {
    TypeEnv env;
    LinearType type;
    long long index = 0;

    std::string key() const;
    bool operator==(const Typing& o) const { return key() == o.key(); }
};

// Bounds for the typing enumerator: multiset width, type depth, nesting
// depth of non-empty argument enumerations, and number of atoms.
struct TypeBound {
    int width = 2;
    int depth = 3;
    int unfold = 6;
    int atoms = 1;
};

bool within_bound(const LinearType& t, const TypeBound& b);
bool within_bound(const MultiType& m, const TypeBound& b);

// A typing is decidable within a bound when every multiset element
// occurring in it fits the bound; enumeration is complete for these.
bool elements_within_bound(const LinearType& t, const TypeBound& b);
bool elements_within_bound(const MultiType& m, const TypeBound& b);
bool typing_supported(const Typing& ty, const TypeBound& b);

// Occurrence polarity inside a type or a (env; type) pair.
enum class Polarity { Pos, Neg };
constexpr Polarity flip(Polarity p) { return p == Polarity::Pos ? Polarity::Neg : Polarity::Pos; }

// Path to one arrow occurrence. At an arrow node, -1 addresses the arrow
// itself, i in [0, width) descends into argument element i (flipping
// polarity), and width descends into the result.
struct ArrowPos {
    std::vector<int> path;
    Polarity pol = Polarity::Pos;
    Color color = Color::Black;
};

std::vector<ArrowPos> collect_arrows(const LinearType& t, Polarity base);
std::vector<ArrowPos> collect_arrows(const MultiType& m, Polarity base);
LinearType recolor_at(const LinearType& t, const std::vector<int>& path, Color c);
MultiType recolor_at(const MultiType& m, const std::vector<int>& path, Color c);

std::size_t count_black_arrows(const LinearType& t);
std::size_t count_black_arrows(const MultiType& m);
std::size_t count_black_arrows(const TypeEnv& e);

} // namespace checkers
