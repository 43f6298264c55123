#pragma once

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <memory>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

/* Tiny symbolic-expression layer: enough calculus (parse, evaluate,
 * differentiate, substitute, print) to state PDE coefficients, manufacture
 * right-hand sides from a chosen solution, and round-trip everything through
 * plain text.  Variables are fixed: s, t, v (physical coordinates), x, y, z
 * (ball coordinates), u (the unknown's value). */
namespace specball::expr {

enum class Var : int { s = 0, t, v, x, y, z, u };
inline constexpr int var_count = 7;

inline const char* var_name(Var v) {
    static constexpr const char* names[var_count] = {"s", "t", "v", "x", "y", "z", "u"};
    return names[static_cast<int>(v)];
}

inline std::optional<Var> var_from_name(std::string_view s) {
    for (int i = 0; i < var_count; ++i)
        if (s == var_name(static_cast<Var>(i))) return static_cast<Var>(i);
    return std::nullopt;
}

struct Env {
    std::array<double, var_count> values{};
    double& operator[](Var v) { return values[static_cast<int>(v)]; }
    double operator[](Var v) const { return values[static_cast<int>(v)]; }
};

struct ParseError : std::runtime_error {
    std::size_t offset;
    ParseError(const std::string& msg, std::size_t off)
        : std::runtime_error(msg + " (at offset " + std::to_string(off) + ")"), offset(off) {}
};

namespace detail {

enum class Kind { number, variable, neg, add, sub, mul, div, pow, call };
enum class Fn { cos, sin, exp, log, sqrt, abs };

inline const char* fn_name(Fn f) {
    static constexpr const char* names[] = {"cos", "sin", "exp", "log", "sqrt", "abs"};
    return names[static_cast<int>(f)];
}

inline std::optional<Fn> fn_from_name(std::string_view s) {
    for (int i = 0; i < 6; ++i)
        if (s == fn_name(static_cast<Fn>(i))) return static_cast<Fn>(i);
    return std::nullopt;
}

struct Node;
using NodeP = std::shared_ptr<const Node>;

struct Node {
    Kind kind;
    double number = 0.0;
    Var var = Var::s;
    Fn fn = Fn::cos;
    NodeP a, b;
};

inline NodeP make_number(double v) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::number;
    n->number = v;
    return n;
}

inline NodeP make_variable(Var v) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::variable;
    n->var = v;
    return n;
}

inline bool is_number(const NodeP& n, double v) {
    return n->kind == Kind::number && n->number == v;
}

inline NodeP make_binary(Kind k, NodeP a, NodeP b);
inline NodeP make_neg(NodeP a);

inline NodeP make_neg(NodeP a) {
    if (a->kind == Kind::number) return make_number(-a->number);
    if (a->kind == Kind::neg) return a->a;
    auto n = std::make_shared<Node>();
    n->kind = Kind::neg;
    n->a = std::move(a);
    return n;
}

/* Light constant folding keeps derivatives from drowning in 0*... terms. */
inline NodeP make_binary(Kind k, NodeP a, NodeP b) {
    if (a->kind == Kind::number && b->kind == Kind::number) {
        switch (k) {
            case Kind::add: return make_number(a->number + b->number);
            case Kind::sub: return make_number(a->number - b->number);
            case Kind::mul: return make_number(a->number * b->number);
            case Kind::div:
                if (b->number != 0.0) return make_number(a->number / b->number);
                break;
            case Kind::pow: return make_number(std::pow(a->number, b->number));
            default: break;
        }
    }
    switch (k) {
        case Kind::add:
            if (is_number(a, 0.0)) return b;
            if (is_number(b, 0.0)) return a;
            break;
        case Kind::sub:
            if (is_number(b, 0.0)) return a;
            if (is_number(a, 0.0)) return make_neg(std::move(b));
            break;
        case Kind::mul:
            if (is_number(a, 0.0) || is_number(b, 0.0)) return make_number(0.0);
            if (is_number(a, 1.0)) return b;
            if (is_number(b, 1.0)) return a;
            break;
        case Kind::div:
            if (is_number(a, 0.0)) return make_number(0.0);
            if (is_number(b, 1.0)) return a;
            break;
        case Kind::pow:
            if (is_number(b, 0.0)) return make_number(1.0);
            if (is_number(b, 1.0)) return a;
            break;
        default: break;
    }
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

inline NodeP make_call(Fn f, NodeP a) {
    if (a->kind == Kind::number) {
        const double t = a->number;
        switch (f) {
            case Fn::cos: return make_number(std::cos(t));
            case Fn::sin: return make_number(std::sin(t));
            case Fn::exp: return make_number(std::exp(t));
            case Fn::log: return make_number(std::log(t));
            case Fn::sqrt: return make_number(std::sqrt(t));
            case Fn::abs: return make_number(std::abs(t));
        }
    }
    auto n = std::make_shared<Node>();
    n->kind = Kind::call;
    n->fn = f;
    n->a = std::move(a);
    return n;
}

}  // namespace detail

class Expr {
  public:
    Expr() : node_(detail::make_number(0.0)) {}

    static Expr number(double v) { return Expr(detail::make_number(v)); }
    static Expr variable(Var v) { return Expr(detail::make_variable(v)); }
    static Expr parse(std::string_view text);

    double eval(const Env& env) const { return eval_node(node_, env); }

    Expr derivative(Var v) const { return Expr(diff_node(node_, v)); }
    Expr substitute(Var v, const Expr& replacement) const {
        return Expr(subst_node(node_, v, replacement.node_));
    }

    bool uses(Var v) const { return uses_node(node_, v); }
    std::vector<Var> variables() const {
        std::array<bool, var_count> seen{};
        collect(node_, seen);
        std::vector<Var> out;
        for (int i = 0; i < var_count; ++i)
            if (seen[i]) out.push_back(static_cast<Var>(i));
        return out;
    }

    std::string str() const {
        std::ostringstream os;
        os.precision(17);
        print(node_, os, 0);
        return os.str();
    }

    friend Expr operator+(const Expr& a, const Expr& b) {
        return Expr(detail::make_binary(detail::Kind::add, a.node_, b.node_));
    }
    friend Expr operator-(const Expr& a, const Expr& b) {
        return Expr(detail::make_binary(detail::Kind::sub, a.node_, b.node_));
    }
    friend Expr operator*(const Expr& a, const Expr& b) {
        return Expr(detail::make_binary(detail::Kind::mul, a.node_, b.node_));
    }
    friend Expr operator/(const Expr& a, const Expr& b) {
        return Expr(detail::make_binary(detail::Kind::div, a.node_, b.node_));
    }
    friend Expr operator-(const Expr& a) { return Expr(detail::make_neg(a.node_)); }
    friend Expr pow(const Expr& a, const Expr& b) {
        return Expr(detail::make_binary(detail::Kind::pow, a.node_, b.node_));
    }
    friend Expr cos(const Expr& a) { return Expr(detail::make_call(detail::Fn::cos, a.node_)); }
    friend Expr sin(const Expr& a) { return Expr(detail::make_call(detail::Fn::sin, a.node_)); }
    friend Expr exp(const Expr& a) { return Expr(detail::make_call(detail::Fn::exp, a.node_)); }
    friend Expr log(const Expr& a) { return Expr(detail::make_call(detail::Fn::log, a.node_)); }
    friend Expr sqrt(const Expr& a) { return Expr(detail::make_call(detail::Fn::sqrt, a.node_)); }
    friend Expr abs(const Expr& a) { return Expr(detail::make_call(detail::Fn::abs, a.node_)); }

  private:
    explicit Expr(detail::NodeP n) : node_(std::move(n)) {}

    static double eval_node(const detail::NodeP& n, const Env& env) {
        using detail::Kind;
        switch (n->kind) {
            case Kind::number: return n->number;
            case Kind::variable: return env[n->var];
            case Kind::neg: return -eval_node(n->a, env);
            case Kind::add: return eval_node(n->a, env) + eval_node(n->b, env);
            case Kind::sub: return eval_node(n->a, env) - eval_node(n->b, env);
            case Kind::mul: return eval_node(n->a, env) * eval_node(n->b, env);
            case Kind::div: return eval_node(n->a, env) / eval_node(n->b, env);
            case Kind::pow: return std::pow(eval_node(n->a, env), eval_node(n->b, env));
            case Kind::call: {
                const double t = eval_node(n->a, env);
                switch (n->fn) {
                    case detail::Fn::cos: return std::cos(t);
                    case detail::Fn::sin: return std::sin(t);
                    case detail::Fn::exp: return std::exp(t);
                    case detail::Fn::log: return std::log(t);
                    case detail::Fn::sqrt: return std::sqrt(t);
                    case detail::Fn::abs: return std::abs(t);
                }
            }
        }
        return 0.0;  // unreachable
    }

    static detail::NodeP diff_node(const detail::NodeP& n, Var v) {
        using detail::Kind;
        using detail::make_binary;
        using detail::make_call;
        using detail::make_neg;
        using detail::make_number;
        switch (n->kind) {
            case Kind::number: return make_number(0.0);
            case Kind::variable: return make_number(n->var == v ? 1.0 : 0.0);
            case Kind::neg: return make_neg(diff_node(n->a, v));
            case Kind::add: return make_binary(Kind::add, diff_node(n->a, v), diff_node(n->b, v));
            case Kind::sub: return make_binary(Kind::sub, diff_node(n->a, v), diff_node(n->b, v));
            case Kind::mul:
                return make_binary(Kind::add,
                                   make_binary(Kind::mul, diff_node(n->a, v), n->b),
                                   make_binary(Kind::mul, n->a, diff_node(n->b, v)));
            case Kind::div:
                return make_binary(
                    Kind::div,
                    make_binary(Kind::sub, make_binary(Kind::mul, diff_node(n->a, v), n->b),
                                make_binary(Kind::mul, n->a, diff_node(n->b, v))),
                    make_binary(Kind::mul, n->b, n->b));
            case Kind::pow: {
                if (n->b->kind == Kind::number) {
                    /* c a^(c-1) a' */
                    const double c = n->b->number;
                    return make_binary(
                        Kind::mul, make_number(c),
                        make_binary(Kind::mul,
                                    make_binary(Kind::pow, n->a, make_number(c - 1.0)),
                                    diff_node(n->a, v)));
                }
                /* a^b (b' log a + b a' / a) */
                auto term1 = make_binary(Kind::mul, diff_node(n->b, v),
                                         make_call(detail::Fn::log, n->a));
                auto term2 = make_binary(Kind::div, make_binary(Kind::mul, n->b, diff_node(n->a, v)),
                                         n->a);
                return make_binary(Kind::mul, make_binary(Kind::pow, n->a, n->b),
                                   make_binary(Kind::add, term1, term2));
            }
            case Kind::call: {
                const auto da = diff_node(n->a, v);
                detail::NodeP outer;
                switch (n->fn) {
                    case detail::Fn::cos:
                        outer = make_neg(make_call(detail::Fn::sin, n->a));
                        break;
                    case detail::Fn::sin: outer = make_call(detail::Fn::cos, n->a); break;
                    case detail::Fn::exp: outer = make_call(detail::Fn::exp, n->a); break;
                    case detail::Fn::log:
                        return make_binary(Kind::div, da, n->a);
                    case detail::Fn::sqrt:
                        return make_binary(
                            Kind::div, da,
                            make_binary(Kind::mul, make_number(2.0),
                                        make_call(detail::Fn::sqrt, n->a)));
                    case detail::Fn::abs:
                        /* sign(a) a', written a/|a| so it stays symbolic */
                        outer = make_binary(Kind::div, n->a, make_call(detail::Fn::abs, n->a));
                        break;
                }
                return make_binary(Kind::mul, outer, da);
            }
        }
        return make_number(0.0);  // unreachable
    }

    static detail::NodeP subst_node(const detail::NodeP& n, Var v, const detail::NodeP& rep) {
        using detail::Kind;
        switch (n->kind) {
            case Kind::number: return n;
            case Kind::variable: return n->var == v ? rep : n;
            case Kind::neg: return detail::make_neg(subst_node(n->a, v, rep));
            case Kind::call: return detail::make_call(n->fn, subst_node(n->a, v, rep));
            default:
                return detail::make_binary(n->kind, subst_node(n->a, v, rep),
                                           subst_node(n->b, v, rep));
        }
    }

    static bool uses_node(const detail::NodeP& n, Var v) {
        using detail::Kind;
        switch (n->kind) {
            case Kind::number: return false;
            case Kind::variable: return n->var == v;
            case Kind::neg:
            case Kind::call: return uses_node(n->a, v);
            default: return uses_node(n->a, v) || uses_node(n->b, v);
        }
    }

    static void collect(const detail::NodeP& n, std::array<bool, var_count>& seen) {
        using detail::Kind;
        switch (n->kind) {
            case Kind::number: return;
            case Kind::variable: seen[static_cast<int>(n->var)] = true; return;
            case Kind::neg:
            case Kind::call: collect(n->a, seen); return;
            default:
                collect(n->a, seen);
                collect(n->b, seen);
        }
    }

    /* Precedence-aware printer; output reparses to an equivalent tree.
     * levels: add/sub 1, mul/div 2, unary minus 3, pow 4, atoms 5. */
    static int prec(const detail::NodeP& n) {
        using detail::Kind;
        switch (n->kind) {
            case Kind::add:
            case Kind::sub: return 1;
            case Kind::mul:
            case Kind::div: return 2;
            case Kind::neg: return 3;
            case Kind::pow: return 4;
            default: return 5;
        }
    }

    static void print(const detail::NodeP& n, std::ostringstream& os, int parent_prec) {
        using detail::Kind;
        const int p = prec(n);
        const bool need_parens = p < parent_prec;
        if (need_parens) os << "(";
        switch (n->kind) {
            case Kind::number:
                if (n->number < 0.0) {
                    os << "(" << n->number << ")";
                } else {
                    os << n->number;
                }
                break;
            case Kind::variable: os << var_name(n->var); break;
            case Kind::neg:
                os << "-";
                print(n->a, os, p + 1);
                break;
            case Kind::add:
                print(n->a, os, p);
                os << " + ";
                print(n->b, os, p + 1);
                break;
            case Kind::sub:
                print(n->a, os, p);
                os << " - ";
                print(n->b, os, p + 1);
                break;
            case Kind::mul:
                print(n->a, os, p);
                os << "*";
                print(n->b, os, p + 1);
                break;
            case Kind::div:
                print(n->a, os, p);
                os << "/";
                print(n->b, os, p + 1);
                break;
            case Kind::pow:
                print(n->a, os, p + 1);
                os << "^";
                print(n->b, os, p);  // right-associative
                break;
            case Kind::call:
                os << detail::fn_name(n->fn) << "(";
                print(n->a, os, 0);
                os << ")";
                break;
        }
        if (need_parens) os << ")";
    }

    detail::NodeP node_;
};

namespace detail {

class Parser {
  public:
    explicit Parser(std::string_view text) : text_(text) {}

    NodeP run() {
        NodeP e = parse_expr();
        skip_ws();
        if (pos_ != text_.size())
            throw ParseError("unexpected trailing input", pos_);
        return e;
    }

  private:
    void skip_ws() {
        while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
    }

    bool consume(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    NodeP parse_expr() {
        NodeP e = parse_term();
        for (;;) {
            if (consume('+'))
                e = make_binary(Kind::add, e, parse_term());
            else if (consume('-'))
                e = make_binary(Kind::sub, e, parse_term());
            else
                return e;
        }
    }

    NodeP parse_term() {
        NodeP e = parse_factor();
        for (;;) {
            if (consume('*'))
                e = make_binary(Kind::mul, e, parse_factor());
            else if (consume('/'))
                e = make_binary(Kind::div, e, parse_factor());
            else
                return e;
        }
    }

    NodeP parse_factor() {
        if (consume('-')) return make_neg(parse_factor());
        return parse_power();
    }

    NodeP parse_power() {
        NodeP base = parse_atom();
        if (consume('^')) return make_binary(Kind::pow, base, parse_factor());
        return base;
    }

    NodeP parse_atom() {
        skip_ws();
        if (pos_ >= text_.size()) throw ParseError("unexpected end of expression", pos_);
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            NodeP e = parse_expr();
            if (!consume(')')) throw ParseError("missing ')'", pos_);
            return e;
        }
        if ((c >= '0' && c <= '9') || c == '.') return parse_number();
        if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_') return parse_ident();
        throw ParseError(std::string("unexpected character '") + c + "'", pos_);
    }

    NodeP parse_number() {
        const char* begin = text_.data() + pos_;
        const char* end = text_.data() + text_.size();
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(begin, end, value);
        if (ec != std::errc())
            throw ParseError("malformed number", pos_);
        pos_ = static_cast<std::size_t>(ptr - text_.data());
        return make_number(value);
    }

    NodeP parse_ident() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        const std::string_view name = text_.substr(start, pos_ - start);
        if (name == "pi") return make_number(std::numbers::pi);
        if (auto fn = fn_from_name(name)) {
            if (!consume('('))
                throw ParseError("function '" + std::string(name) + "' needs an argument list",
                                 pos_);
            NodeP arg = parse_expr();
            if (peek() == ',')
                throw ParseError("function '" + std::string(name) + "' takes one argument", pos_);
            if (!consume(')')) throw ParseError("missing ')'", pos_);
            return make_call(*fn, arg);
        }
        if (auto v = var_from_name(name)) {
            if (peek() == '(')
                throw ParseError("unknown function '" + std::string(name) + "'", pos_);
            return make_variable(*v);
        }
        throw ParseError("unknown identifier '" + std::string(name) + "'", start);
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

}  // namespace detail

inline Expr Expr::parse(std::string_view text) { return Expr(detail::Parser(text).run()); }

/* Throws when the expression mentions a variable outside `allowed`; the
 * message names the slot being validated (e.g. "f", "map.phi1"). */
inline void require_variables(const Expr& e, const std::vector<Var>& allowed,
                              const std::string& context) {
    for (Var v : e.variables()) {
        bool ok = false;
        for (Var a : allowed)
            if (a == v) ok = true;
        if (!ok)
            throw std::invalid_argument("expression for " + context +
                                        " uses variable '" + var_name(v) + "' which is not allowed here");
    }
}

}  // namespace specball::expr
