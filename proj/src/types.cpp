#include "checkers/types.hpp"

#include <algorithm>

namespace checkers {

struct LinearType::Node {
    Kind kind = Kind::Atom;
    std::string atom;
    std::shared_ptr<const MultiType> arg;
    std::shared_ptr<const LinearType> result;
    Color color = Color::Black;
    std::string key;
    int depth = 1;
};

LinearType LinearType::atom(std::string name) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Atom;
    n->atom = std::move(name);
    n->key = "a" + n->atom + ";";
    n->depth = 1;
    return LinearType(n);
}

LinearType LinearType::arrow(MultiType arg, Color c, LinearType result) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Arrow;
    n->color = c;
    n->depth = 1 + std::max(result.depth(), arg.depth());
    n->key = std::string(">") + color_char(c) + "(" + arg.key() + result.key() + ")";
    n->arg = std::make_shared<MultiType>(std::move(arg));
    n->result = std::make_shared<LinearType>(std::move(result));
    return LinearType(n);
}

LinearType::Kind LinearType::kind() const { return node_->kind; }

const std::string& LinearType::atom_name() const {
    if (!is_atom()) throw DomainError("atom_name() on arrow");
    return node_->atom;
}

const MultiType& LinearType::arg() const {
    if (!is_arrow()) throw DomainError("arg() on atom");
    return *node_->arg;
}

Color LinearType::color() const {
    if (!is_arrow()) throw DomainError("color() on atom");
    return node_->color;
}

const LinearType& LinearType::result() const {
    if (!is_arrow()) throw DomainError("result() on atom");
    return *node_->result;
}

int LinearType::depth() const { return node_->depth; }
const std::string& LinearType::key() const { return node_->key; }

MultiType MultiType::sum(const MultiType& o) const {
    std::vector<LinearType> v = elems_;
    v.insert(v.end(), o.elems_.begin(), o.elems_.end());
    return MultiType(std::move(v));
}

MultiType MultiType::sorted() const {
    std::vector<LinearType> v = elems_;
    std::sort(v.begin(), v.end());
    return MultiType(std::move(v));
}

int MultiType::depth() const {
    int d = 0;
    for (const auto& e : elems_) d = std::max(d, e.depth());
    return d;
}

std::string MultiType::key() const {
    MultiType canon = sorted();
    std::string out = "[";
    for (const auto& e : canon.elems()) out += e.key();
    out += "]";
    return out;
}

bool MultiType::operator==(const MultiType& o) const {
    if (elems_.size() != o.elems_.size()) return false;
    return key() == o.key();
}

MultiType TypeEnv::get(const std::string& x) const {
    auto it = map_.find(x);
    return it == map_.end() ? MultiType() : it->second;
}

void TypeEnv::set(const std::string& x, MultiType m) {
    if (m.empty())
        map_.erase(x);
    else
        map_[x] = std::move(m);
}

TypeEnv TypeEnv::sum(const TypeEnv& o) const {
    TypeEnv out = *this;
    for (const auto& [x, m] : o.map_) out.set(x, out.get(x).sum(m));
    return out;
}

TypeEnv TypeEnv::without(const std::string& x) const {
    TypeEnv out = *this;
    out.map_.erase(x);
    return out;
}

std::vector<std::string> TypeEnv::support() const {
    std::vector<std::string> out;
    for (const auto& [x, m] : map_) out.push_back(x);
    return out;
}

std::string TypeEnv::key() const {
    std::string out = "{";
    for (const auto& [x, m] : map_) {
        out += x;
        out += ':';
        out += m.key();
    }
    out += "}";
    return out;
}

std::string Typing::key() const {
    return env.key() + "|" + type.key() + "|" + std::to_string(index);
}

bool within_bound(const LinearType& t, const TypeBound& b) {
    if (t.depth() > b.depth) return false;
    if (t.is_atom()) return true;
    return t.arg().width() <= static_cast<std::size_t>(b.width) &&
           within_bound(t.arg(), b) && within_bound(t.result(), b);
}

bool within_bound(const MultiType& m, const TypeBound& b) {
    if (m.width() > static_cast<std::size_t>(b.width)) return false;
    for (const auto& e : m.elems())
        if (!within_bound(e, b)) return false;
    return true;
}

bool elements_within_bound(const LinearType& t, const TypeBound& b) {
    if (t.is_atom()) return true;
    return elements_within_bound(t.arg(), b) && elements_within_bound(t.result(), b);
}

bool elements_within_bound(const MultiType& m, const TypeBound& b) {
    for (const auto& e : m.elems())
        if (!within_bound(e, b)) return false;
    return true;
}

bool typing_supported(const Typing& ty, const TypeBound& b) {
    for (const auto& [x, m] : ty.env.entries())
        if (!elements_within_bound(m, b)) return false;
    return elements_within_bound(ty.type, b);
}

namespace {

void collect_rec(const LinearType& t, Polarity pol, std::vector<int>& path,
                 std::vector<ArrowPos>& out) {
    if (t.is_atom()) return;
    path.push_back(-1);
    out.push_back({path, pol, t.color()});
    path.pop_back();
    for (std::size_t i = 0; i < t.arg().width(); ++i) {
        path.push_back(static_cast<int>(i));
        collect_rec(t.arg().at(i), flip(pol), path, out);
        path.pop_back();
    }
    path.push_back(static_cast<int>(t.arg().width()));
    collect_rec(t.result(), pol, path, out);
    path.pop_back();
}

} // namespace

std::vector<ArrowPos> collect_arrows(const LinearType& t, Polarity base) {
    std::vector<ArrowPos> out;
    std::vector<int> path;
    collect_rec(t, base, path, out);
    return out;
}

std::vector<ArrowPos> collect_arrows(const MultiType& m, Polarity base) {
    std::vector<ArrowPos> out;
    for (std::size_t i = 0; i < m.width(); ++i) {
        for (auto& p : collect_arrows(m.at(i), base)) {
            p.path.insert(p.path.begin(), static_cast<int>(i));
            out.push_back(std::move(p));
        }
    }
    return out;
}

LinearType recolor_at(const LinearType& t, const std::vector<int>& path, Color c) {
    if (path.empty()) throw DomainError("recolor_at: empty path");
    if (!t.is_arrow()) throw DomainError("recolor_at: path into atom");
    int head = path.front();
    std::vector<int> rest(path.begin() + 1, path.end());
    if (head == -1) {
        if (!rest.empty()) throw DomainError("recolor_at: trailing path after arrow");
        return LinearType::arrow(t.arg(), c, t.result());
    }
    int w = static_cast<int>(t.arg().width());
    if (head == w) return LinearType::arrow(t.arg(), t.color(), recolor_at(t.result(), rest, c));
    if (head < 0 || head > w) throw DomainError("recolor_at: bad path index");
    std::vector<LinearType> elems = t.arg().elems();
    elems[static_cast<std::size_t>(head)] = recolor_at(elems[static_cast<std::size_t>(head)], rest, c);
    return LinearType::arrow(MultiType(std::move(elems)), t.color(), t.result());
}

MultiType recolor_at(const MultiType& m, const std::vector<int>& path, Color c) {
    if (path.empty()) throw DomainError("recolor_at: empty path");
    int head = path.front();
    if (head < 0 || head >= static_cast<int>(m.width()))
        throw DomainError("recolor_at: bad multiset index");
    std::vector<int> rest(path.begin() + 1, path.end());
    std::vector<LinearType> elems = m.elems();
    elems[static_cast<std::size_t>(head)] = recolor_at(elems[static_cast<std::size_t>(head)], rest, c);
    return MultiType(std::move(elems));
}

std::size_t count_black_arrows(const LinearType& t) {
    if (t.is_atom()) return 0;
    std::size_t n = t.color() == Color::Black ? 1 : 0;
    return n + count_black_arrows(t.arg()) + count_black_arrows(t.result());
}

std::size_t count_black_arrows(const MultiType& m) {
    std::size_t n = 0;
    for (const auto& e : m.elems()) n += count_black_arrows(e);
    return n;
}

std::size_t count_black_arrows(const TypeEnv& e) {
    std::size_t n = 0;
    for (const auto& [x, m] : e.entries()) n += count_black_arrows(m);
    return n;
}

} // namespace checkers
