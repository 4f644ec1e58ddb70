#include "checkers/syntax.hpp"

#include <algorithm>
#include <cctype>
#include <memory>
#include <optional>
#include <vector>

namespace checkers {

namespace {

enum class Tok {
    Ident,
    Lambda,      // \ or λ, color undecided
    LambdaB,     // λ•
    LambdaW,     // λ∘
    AppB,        // @b or @•
    AppW,        // @w or @∘
    Dot,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Colon,
    ArrowB,      // ->b or ->•
    ArrowW,      // ->w or ->∘
    End,
};

struct Token {
    Tok kind;
    std::string text;
    SourceSpan span;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

// UTF-8 sequences for the usual glyphs.
const std::string kLambda = "\xce\xbb";
const std::string kBullet = "\xe2\x80\xa2";
const std::string kCirc = "\xe2\x88\x98";

bool starts_with(const std::string& s, std::size_t i, const std::string& pre) {
    return s.compare(i, pre.size(), pre) == 0;
}

std::vector<Token> lex(const std::string& src) {
    std::vector<Token> out;
    std::size_t i = 0;
    auto push = [&](Tok k, std::size_t b, std::size_t e, std::string text = "") {
        out.push_back({k, std::move(text), {b, e}});
    };
    while (i < src.size()) {
        char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        std::size_t b = i;
        if (c == '\\' || starts_with(src, i, kLambda)) {
            i += (c == '\\') ? 1 : kLambda.size();
            if (starts_with(src, i, kBullet)) {
                i += kBullet.size();
                push(Tok::LambdaB, b, i);
            } else if (starts_with(src, i, kCirc)) {
                i += kCirc.size();
                push(Tok::LambdaW, b, i);
            } else {
                push(Tok::Lambda, b, i);
            }
            continue;
        }
        if (c == '@') {
            ++i;
            if (i < src.size() && (src[i] == 'b' || src[i] == 'w')) {
                push(src[i] == 'b' ? Tok::AppB : Tok::AppW, b, i + 1);
                ++i;
            } else if (starts_with(src, i, kBullet)) {
                i += kBullet.size();
                push(Tok::AppB, b, i);
            } else if (starts_with(src, i, kCirc)) {
                i += kCirc.size();
                push(Tok::AppW, b, i);
            } else {
                throw ParseError({b, i}, "expected color marker after '@'");
            }
            continue;
        }
        if (c == '-' && i + 1 < src.size() && src[i + 1] == '>') {
            i += 2;
            if (i < src.size() && (src[i] == 'b' || src[i] == 'w')) {
                push(src[i] == 'b' ? Tok::ArrowB : Tok::ArrowW, b, i + 1);
                ++i;
            } else if (starts_with(src, i, kBullet)) {
                i += kBullet.size();
                push(Tok::ArrowB, b, i);
            } else if (starts_with(src, i, kCirc)) {
                i += kCirc.size();
                push(Tok::ArrowW, b, i);
            } else {
                throw ParseError({b, i}, "expected color marker after '->'");
            }
            continue;
        }
        switch (c) {
            case '.': push(Tok::Dot, b, b + 1); ++i; continue;
            case '(': push(Tok::LParen, b, b + 1); ++i; continue;
            case ')': push(Tok::RParen, b, b + 1); ++i; continue;
            case '[': push(Tok::LBracket, b, b + 1); ++i; continue;
            case ']': push(Tok::RBracket, b, b + 1); ++i; continue;
            case ',': push(Tok::Comma, b, b + 1); ++i; continue;
            case ':': push(Tok::Colon, b, b + 1); ++i; continue;
            default: break;
        }
        if (ident_start(c)) {
            std::size_t e = i + 1;
            while (e < src.size() && ident_char(src[e])) ++e;
            push(Tok::Ident, b, e, src.substr(b, e - b));
            i = e;
            continue;
        }
        throw ParseError({b, b + 1}, "unexpected character '" + std::string(1, c) + "'");
    }
    push(Tok::End, src.size(), src.size());
    return out;
}

// Term-or-hole tree; converted afterwards depending on what was requested.
struct PTree {
    enum class Kind { Var, Abs, App, Hole };
    Kind kind;
    std::optional<Color> color;  // nullopt on Abs/App means plain (wash-normal)
    std::string name;
    std::shared_ptr<PTree> a, b;
    SourceSpan span;
};

using PP = std::shared_ptr<PTree>;

std::size_t count_holes(const PTree& p) {
    switch (p.kind) {
        case PTree::Kind::Var: return 0;
        case PTree::Kind::Hole: return 1;
        case PTree::Kind::Abs: return count_holes(*p.a);
        case PTree::Kind::App: return count_holes(*p.a) + count_holes(*p.b);
    }
    return 0;
}

Color color_of(const PTree& p) { return p.color.value_or(plain_color); }

Term to_term(const PTree& p) {
    switch (p.kind) {
        case PTree::Kind::Var: return Term::var(p.name);
        case PTree::Kind::Hole:
            throw UnboundHole(p.span, "hole '[]' in term position");
        case PTree::Kind::Abs: return Term::abs(color_of(p), p.name, to_term(*p.a));
        case PTree::Kind::App:
            return Term::app(color_of(p), to_term(*p.a), to_term(*p.b));
    }
    throw DomainError("unreachable");
}

Context to_context(const PTree& p) {
    switch (p.kind) {
        case PTree::Kind::Hole: return Context::hole();
        case PTree::Kind::Abs: return Context::abs(color_of(p), p.name, to_context(*p.a));
        case PTree::Kind::App:
            if (count_holes(*p.a) == 1)
                return Context::app_left(color_of(p), to_context(*p.a), to_term(*p.b));
            return Context::app_right(color_of(p), to_term(*p.a), to_context(*p.b));
        case PTree::Kind::Var:
            throw DomainError("to_context: no hole below");
    }
    throw DomainError("unreachable");
}

class Parser {
public:
    explicit Parser(const std::string& src) : toks_(lex(src)) {}

    PP parse_whole() {
        PP t = parse_term();
        expect(Tok::End, "end of input");
        return t;
    }

    LinearType parse_type_whole() {
        LinearType t = parse_linear();
        expect(Tok::End, "end of input");
        return t;
    }

    MultiType parse_multi_whole() {
        MultiType m = parse_multi();
        expect(Tok::End, "end of input");
        return m;
    }

private:
    const Token& peek(int k = 0) const { return toks_[pos_ + k]; }
    Token next() { return toks_[pos_++]; }
    void expect(Tok k, const std::string& what) {
        if (peek().kind != k)
            throw ParseError(peek().span, "expected " + what);
        ++pos_;
    }

    // term := app-chain, where a lambda is allowed as the last operand and
    // extends maximally to the right.
    PP parse_term() {
        if (is_lambda(peek().kind)) return parse_abs();
        PP t = parse_operand();
        while (true) {
            Tok k = peek().kind;
            if (k == Tok::AppB || k == Tok::AppW) {
                Token op = next();
                Color c = (op.kind == Tok::AppB) ? Color::Black : Color::White;
                PP u = is_lambda(peek().kind) ? parse_abs() : parse_operand();
                t = mk_app(c, t, u);
            } else if (starts_operand(k) || is_lambda(k)) {
                PP u = is_lambda(k) ? parse_abs() : parse_operand();
                t = mk_app(std::nullopt, t, u);
            } else {
                break;
            }
        }
        return t;
    }

    static bool is_lambda(Tok k) {
        return k == Tok::Lambda || k == Tok::LambdaB || k == Tok::LambdaW;
    }
    static bool starts_operand(Tok k) {
        return k == Tok::Ident || k == Tok::LParen || k == Tok::LBracket;
    }

    PP parse_abs() {
        Token lam = next();
        std::optional<Color> c;
        if (lam.kind == Tok::LambdaB) c = Color::Black;
        if (lam.kind == Tok::LambdaW) c = Color::White;
        if (peek().kind != Tok::Ident)
            throw ParseError(peek().span, "expected binder after lambda");
        Token first = next();
        std::string binder;
        if (!c && peek().kind == Tok::Ident) {
            // ASCII form: the first identifier is the color marker.
            if (first.text == "b")
                c = Color::Black;
            else if (first.text == "w")
                c = Color::White;
            else
                throw ParseError(first.span, "expected color marker 'b' or 'w'");
            binder = next().text;
        } else {
            binder = first.text;
        }
        expect(Tok::Dot, "'.' after binder");
        PP body = parse_term();
        auto p = std::make_shared<PTree>();
        p->kind = PTree::Kind::Abs;
        p->color = c;
        p->name = std::move(binder);
        p->a = std::move(body);
        p->span = lam.span;
        return p;
    }

    PP parse_operand() {
        Token t = peek();
        switch (t.kind) {
            case Tok::Ident: {
                next();
                auto p = std::make_shared<PTree>();
                p->kind = PTree::Kind::Var;
                p->name = t.text;
                p->span = t.span;
                return p;
            }
            case Tok::LParen: {
                next();
                PP inner = parse_term();
                expect(Tok::RParen, "')'");
                return inner;
            }
            case Tok::LBracket: {
                next();
                expect(Tok::RBracket, "']' of hole");
                auto p = std::make_shared<PTree>();
                p->kind = PTree::Kind::Hole;
                p->span = t.span;
                return p;
            }
            default:
                throw ParseError(t.span, "expected a term");
        }
    }

    static PP mk_app(std::optional<Color> c, PP f, PP a) {
        auto p = std::make_shared<PTree>();
        p->kind = PTree::Kind::App;
        p->color = c;
        p->span = f->span;
        p->a = std::move(f);
        p->b = std::move(a);
        return p;
    }

    // linear := ident | multi -> c linear
    LinearType parse_linear() {
        if (peek().kind == Tok::Ident) {
            Token t = next();
            return LinearType::atom(t.text);
        }
        if (peek().kind == Tok::LParen) {
            next();
            LinearType t = parse_linear();
            expect(Tok::RParen, "')'");
            return t;
        }
        MultiType m = parse_multi();
        Tok k = peek().kind;
        if (k != Tok::ArrowB && k != Tok::ArrowW)
            throw ParseError(peek().span, "expected '->b' or '->w' after multiset");
        Color c = (k == Tok::ArrowB) ? Color::Black : Color::White;
        next();
        LinearType res = parse_linear();
        return LinearType::arrow(std::move(m), c, std::move(res));
    }

    MultiType parse_multi() {
        expect(Tok::LBracket, "'['");
        std::vector<LinearType> elems;
        if (peek().kind != Tok::RBracket) {
            elems.push_back(parse_linear());
            while (peek().kind == Tok::Comma) {
                next();
                elems.push_back(parse_linear());
            }
        }
        expect(Tok::RBracket, "']'");
        return MultiType(std::move(elems));
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

} // namespace

Term parse_term(const std::string& src) {
    Parser p(src);
    return to_term(*p.parse_whole());
}

Context parse_context(const std::string& src) {
    Parser p(src);
    PP tree = p.parse_whole();
    std::size_t holes = count_holes(*tree);
    if (holes != 1)
        throw HoleCountError({0, src.size()},
                             "context must have exactly one hole, found " + std::to_string(holes));
    return to_context(*tree);
}

LinearType parse_type(const std::string& src) { return Parser(src).parse_type_whole(); }
MultiType parse_multi_type(const std::string& src) { return Parser(src).parse_multi_whole(); }

namespace {

void print_term_rec(const Term& t, bool plain, bool arg_pos, std::string& out) {
    switch (t.kind()) {
        case Term::Kind::Var:
            out += t.name();
            return;
        case Term::Kind::Abs: {
            bool paren = arg_pos;
            if (paren) out += '(';
            out += '\\';
            if (!plain) {
                out += color_char(t.color());
                out += ' ';
            }
            out += t.name();
            out += ". ";
            print_term_rec(t.body(), plain, false, out);
            if (paren) out += ')';
            return;
        }
        case Term::Kind::App: {
            bool paren = arg_pos;
            if (paren) out += '(';
            print_term_rec(t.fun(), plain, t.fun().is_abs(), out);
            if (plain) {
                out += ' ';
            } else {
                out += " @";
                out += color_char(t.color());
                out += ' ';
            }
            print_term_rec(t.arg(), plain, true, out);
            if (paren) out += ')';
            return;
        }
    }
}

void print_ctx_rec(const Context& c, bool plain, bool arg_pos, std::string& out) {
    switch (c.kind()) {
        case Context::Kind::Hole:
            out += "[]";
            return;
        case Context::Kind::Abs: {
            if (arg_pos) out += '(';
            out += '\\';
            if (!plain) {
                out += color_char(c.color());
                out += ' ';
            }
            out += c.name();
            out += ". ";
            print_ctx_rec(c.sub(), plain, false, out);
            if (arg_pos) out += ')';
            return;
        }
        case Context::Kind::AppLeft: {
            if (arg_pos) out += '(';
            print_ctx_rec(c.sub(), plain, c.sub().kind() == Context::Kind::Abs, out);
            if (plain) {
                out += ' ';
            } else {
                out += " @";
                out += color_char(c.color());
                out += ' ';
            }
            print_term_rec(c.term_part(), plain, true, out);
            if (arg_pos) out += ')';
            return;
        }
        case Context::Kind::AppRight: {
            if (arg_pos) out += '(';
            print_term_rec(c.term_part(), plain, c.term_part().is_abs(), out);
            if (plain) {
                out += ' ';
            } else {
                out += " @";
                out += color_char(c.color());
                out += ' ';
            }
            print_ctx_rec(c.sub(), plain, true, out);
            if (arg_pos) out += ')';
            return;
        }
    }
}

} // namespace

std::string print_term(const Term& t) {
    std::string out;
    print_term_rec(t, false, false, out);
    return out;
}

std::string print_plain(const Term& t) {
    std::string out;
    print_term_rec(wash(t), true, false, out);
    return out;
}

std::string print_context(const Context& c) {
    std::string out;
    print_ctx_rec(c, false, false, out);
    return out;
}

std::string print_context_plain(const Context& c) {
    std::string out;
    print_ctx_rec(c, true, false, out);
    return out;
}

std::string print_type(const LinearType& t) {
    if (t.is_atom()) return t.atom_name();
    return print_multi_type(t.arg()) + " ->" + color_char(t.color()) + " " + print_type(t.result());
}

std::string print_multi_type(const MultiType& m) {
    std::string out = "[";
    bool first = true;
    for (const auto& e : m.elems()) {
        if (!first) out += ", ";
        first = false;
        out += print_type(e);
    }
    out += "]";
    return out;
}

std::string print_env(const TypeEnv& e) {
    std::string out;
    bool first = true;
    for (const auto& [x, m] : e.entries()) {
        if (!first) out += ", ";
        first = false;
        out += x + ":" + print_multi_type(m);
    }
    return out;
}

namespace {

// Canonical rendering: multisets sorted by the structural order, so equal
// typings print identically regardless of construction order.
LinearType canonical_type(const LinearType& t);

MultiType canonical_multi(const MultiType& m) {
    std::vector<LinearType> elems;
    for (const auto& e : m.elems()) elems.push_back(canonical_type(e));
    std::sort(elems.begin(), elems.end());
    return MultiType(std::move(elems));
}

LinearType canonical_type(const LinearType& t) {
    if (t.is_atom()) return t;
    return LinearType::arrow(canonical_multi(t.arg()), t.color(), canonical_type(t.result()));
}

} // namespace

std::string print_typing(const Typing& t) {
    TypeEnv env;
    for (const auto& [x, m] : t.env.entries()) env.set(x, canonical_multi(m));
    std::string out = print_env(env);
    if (!out.empty()) out += ' ';
    out += "|-" + std::to_string(t.index) + " " + print_type(canonical_type(t.type));
    return out;
}

} // namespace checkers
