#ifndef RSJD_EXPR_HPP
#define RSJD_EXPR_HPP

#include <cctype>
#include <cmath>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "rsjd/common.hpp"

namespace rsjd {

// Evaluation context for model expressions: state x, jump vector z, regime i
// and ball index n. Unused slots may stay null.
struct ExprContext {
    const Vec* x = nullptr;
    const Vec* z = nullptr;
    int regime = 1;
    int n = 1;
};

// Small arithmetic expression language used by the [model] config section.
// Grammar (usual precedence, ^ binds tightest and is right-associative):
//   expr   := term (('+' | '-') term)*
//   term   := unary (('*' | '/') unary)*
//   unary  := ('+' | '-') unary | power
//   power  := primary ('^' unary)?
//   primary:= number | var | func '(' expr (',' expr)* ')' | '(' expr ')'
// Variables: x1..x3, z1..z3, i, n, pi. Functions: abs, sign, exp, log, sqrt,
// tanh, sin, cos, min, max, and case(sel, e1, ..., em) which evaluates only
// the branch selected by round(sel).
class Expr {
  public:
    static Expr parse(const std::string& text) {
        Parser p(text);
        Expr e;
        e.root_ = p.parse_expr();
        p.skip_ws();
        if (!p.done()) p.fail("trailing input");
        return e;
    }

    double eval(const ExprContext& ctx) const {
        if (!root_) throw ConfigError("expr: evaluating an empty expression");
        return eval_node(*root_, ctx);
    }

    bool empty() const { return !root_; }

    // true when the expression references any of the given variable kinds
    bool uses_z() const { return root_ && uses(*root_, Var::z1, Var::z3); }
    bool uses_x() const { return root_ && uses(*root_, Var::x1, Var::x3); }

  private:
    enum class Op { constant, variable, add, sub, mul, div, pow, neg, call };
    enum class Var { x1, x2, x3, z1, z2, z3, regime, ball, pi_const };
    enum class Fn { abs, sign, exp, log, sqrt, tanh, sin, cos, min, max, case_select };

    struct Node {
        Op op = Op::constant;
        double value = 0.0;
        Var var = Var::x1;
        Fn fn = Fn::abs;
        std::vector<std::shared_ptr<Node>> kids;
    };

    std::shared_ptr<Node> root_;

    static bool uses(const Node& n, Var lo, Var hi) {
        if (n.op == Op::variable && n.var >= lo && n.var <= hi) return true;
        for (const auto& k : n.kids)
            if (uses(*k, lo, hi)) return true;
        return false;
    }

    static double coord(const Vec* v, int k, const char* what) {
        if (!v || static_cast<std::size_t>(k) >= v->size())
            throw ConfigError(std::string("expr: variable ") + what +
                              " is not available in this context");
        return (*v)[k];
    }

    static double eval_node(const Node& n, const ExprContext& ctx) {
        switch (n.op) {
            case Op::constant: return n.value;
            case Op::variable:
                switch (n.var) {
                    case Var::x1: return coord(ctx.x, 0, "x1");
                    case Var::x2: return coord(ctx.x, 1, "x2");
                    case Var::x3: return coord(ctx.x, 2, "x3");
                    case Var::z1: return coord(ctx.z, 0, "z1");
                    case Var::z2: return coord(ctx.z, 1, "z2");
                    case Var::z3: return coord(ctx.z, 2, "z3");
                    case Var::regime: return ctx.regime;
                    case Var::ball: return ctx.n;
                    default: return 3.14159265358979323846;
                }
            case Op::add: return eval_node(*n.kids[0], ctx) + eval_node(*n.kids[1], ctx);
            case Op::sub: return eval_node(*n.kids[0], ctx) - eval_node(*n.kids[1], ctx);
            case Op::mul: return eval_node(*n.kids[0], ctx) * eval_node(*n.kids[1], ctx);
            case Op::div: return eval_node(*n.kids[0], ctx) / eval_node(*n.kids[1], ctx);
            case Op::pow: return std::pow(eval_node(*n.kids[0], ctx), eval_node(*n.kids[1], ctx));
            case Op::neg: return -eval_node(*n.kids[0], ctx);
            case Op::call: break;
        }
        switch (n.fn) {
            case Fn::abs: return std::abs(eval_node(*n.kids[0], ctx));
            case Fn::sign: return sgn(eval_node(*n.kids[0], ctx));
            case Fn::exp: return std::exp(eval_node(*n.kids[0], ctx));
            case Fn::log: return std::log(eval_node(*n.kids[0], ctx));
            case Fn::sqrt: return std::sqrt(eval_node(*n.kids[0], ctx));
            case Fn::tanh: return std::tanh(eval_node(*n.kids[0], ctx));
            case Fn::sin: return std::sin(eval_node(*n.kids[0], ctx));
            case Fn::cos: return std::cos(eval_node(*n.kids[0], ctx));
            case Fn::min:
                return std::min(eval_node(*n.kids[0], ctx), eval_node(*n.kids[1], ctx));
            case Fn::max:
                return std::max(eval_node(*n.kids[0], ctx), eval_node(*n.kids[1], ctx));
            case Fn::case_select: {
                const long sel = std::lround(eval_node(*n.kids[0], ctx));
                if (sel < 1 || sel >= static_cast<long>(n.kids.size()))
                    throw ConfigError("expr: case selector " + std::to_string(sel) +
                                      " out of range");
                return eval_node(*n.kids[sel], ctx);
            }
        }
        throw ConfigError("expr: corrupt node");
    }

    class Parser {
      public:
        explicit Parser(const std::string& s) : s_(s) {}

        std::shared_ptr<Node> parse_expr() {
            auto lhs = parse_term();
            while (true) {
                skip_ws();
                if (match('+'))
                    lhs = binary(Op::add, lhs, parse_term());
                else if (match('-'))
                    lhs = binary(Op::sub, lhs, parse_term());
                else
                    return lhs;
            }
        }

        void skip_ws() {
            while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        }
        bool done() const { return pos_ >= s_.size(); }
        [[noreturn]] void fail(const std::string& why) const {
            throw ConfigError("expr: " + why + " at position " + std::to_string(pos_) + " in '" +
                              s_ + "'");
        }

      private:
        std::shared_ptr<Node> parse_term() {
            auto lhs = parse_unary();
            while (true) {
                skip_ws();
                if (match('*'))
                    lhs = binary(Op::mul, lhs, parse_unary());
                else if (match('/'))
                    lhs = binary(Op::div, lhs, parse_unary());
                else
                    return lhs;
            }
        }

        std::shared_ptr<Node> parse_unary() {
            skip_ws();
            if (match('-')) {
                auto n = std::make_shared<Node>();
                n->op = Op::neg;
                n->kids.push_back(parse_unary());
                return n;
            }
            if (match('+')) return parse_unary();
            return parse_power();
        }

        std::shared_ptr<Node> parse_power() {
            auto base = parse_primary();
            skip_ws();
            if (match('^')) return binary(Op::pow, base, parse_unary());
            return base;
        }

        std::shared_ptr<Node> parse_primary() {
            skip_ws();
            if (done()) fail("unexpected end of expression");
            const char c = s_[pos_];
            if (match('(')) {
                auto inner = parse_expr();
                skip_ws();
                if (!match(')')) fail("expected ')'");
                return inner;
            }
            if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
            if (std::isalpha(static_cast<unsigned char>(c))) return parse_ident();
            fail(std::string("unexpected character '") + c + "'");
        }

        std::shared_ptr<Node> parse_number() {
            std::size_t used = 0;
            double v;
            try {
                v = std::stod(s_.substr(pos_), &used);
            } catch (const std::exception&) {
                fail("malformed number");
            }
            pos_ += used;
            auto n = std::make_shared<Node>();
            n->op = Op::constant;
            n->value = v;
            return n;
        }

        std::shared_ptr<Node> parse_ident() {
            std::size_t start = pos_;
            while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) ||
                                        s_[pos_] == '_'))
                ++pos_;
            const std::string name = s_.substr(start, pos_ - start);
            static const std::map<std::string, Var> vars = {
                {"x1", Var::x1}, {"x2", Var::x2}, {"x3", Var::x3},
                {"z1", Var::z1}, {"z2", Var::z2}, {"z3", Var::z3},
                {"i", Var::regime}, {"n", Var::ball}, {"pi", Var::pi_const}};
            auto vit = vars.find(name);
            if (vit != vars.end()) {
                auto nd = std::make_shared<Node>();
                nd->op = Op::variable;
                nd->var = vit->second;
                return nd;
            }
            static const std::map<std::string, std::pair<Fn, int>> fns = {
                {"abs", {Fn::abs, 1}},   {"sign", {Fn::sign, 1}}, {"exp", {Fn::exp, 1}},
                {"log", {Fn::log, 1}},   {"sqrt", {Fn::sqrt, 1}}, {"tanh", {Fn::tanh, 1}},
                {"sin", {Fn::sin, 1}},   {"cos", {Fn::cos, 1}},   {"min", {Fn::min, 2}},
                {"max", {Fn::max, 2}},   {"case", {Fn::case_select, -1}}};
            auto fit = fns.find(name);
            if (fit == fns.end()) fail("unknown identifier '" + name + "'");
            skip_ws();
            if (!match('(')) fail("expected '(' after function '" + name + "'");
            auto nd = std::make_shared<Node>();
            nd->op = Op::call;
            nd->fn = fit->second.first;
            while (true) {
                nd->kids.push_back(parse_expr());
                skip_ws();
                if (match(',')) continue;
                if (match(')')) break;
                fail("expected ',' or ')' in argument list of '" + name + "'");
            }
            const int arity = fit->second.second;
            if (arity > 0 && static_cast<int>(nd->kids.size()) != arity)
                fail("function '" + name + "' takes " + std::to_string(arity) + " arguments");
            if (arity < 0 && nd->kids.size() < 2)
                fail("function 'case' needs a selector and at least one branch");
            return nd;
        }

        std::shared_ptr<Node> binary(Op op, std::shared_ptr<Node> a, std::shared_ptr<Node> b) {
            auto n = std::make_shared<Node>();
            n->op = op;
            n->kids = {std::move(a), std::move(b)};
            return n;
        }

        bool match(char c) {
            if (pos_ < s_.size() && s_[pos_] == c) {
                ++pos_;
                return true;
            }
            return false;
        }

        const std::string& s_;
        std::size_t pos_ = 0;
    };
};

}  // namespace rsjd

#endif
