#pragma once

// Expression language for candidate functions f: R^n -> R.
//
// Grammar (EBNF), whitespace ignored:
//
//   expr    = term { ("+" | "-") term } ;
//   term    = unary { ("*" | "/") unary } ;
//   unary   = ("-" | "+") unary | power ;
//   power   = primary [ "^" unary ] ;          (* right-associative, binds tighter than unary minus *)
//   primary = number | variable | function "(" expr ")" | "(" expr ")" ;
//   variable = "x" digit { digit } ;          (* x1 .. xn *)
//   function = "exp" | "log" | "cosh" | "sinh" | "sqrt" ;
//   number  = digit { digit } [ "." { digit } ] [ ("e" | "E") [ "+" | "-" ] digit { digit } ] ;
//
// So -x1^2 parses as -(x1^2) and 2^3^2 as 2^(3^2).

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <variant>

#include "quadrix/dual.hpp"
#include "quadrix/error.hpp"

namespace quadrix {

enum class UnaryOp { negate, exp, log, cosh, sinh, sqrt };
enum class BinaryOp { add, sub, mul, div, pow };

class Expression {
public:
    struct Node;
    using NodePtr = std::shared_ptr<const Node>;

    struct Constant {
        double value;
    };
    struct Variable {
        int index;  // 0-based
    };
    struct Unary {
        UnaryOp op;
        NodePtr arg;
    };
    struct Binary {
        BinaryOp op;
        NodePtr lhs;
        NodePtr rhs;
    };
    struct Node {
        std::variant<Constant, Variable, Unary, Binary> body;
        bool constant;  // subtree has no variables
    };

    /// Parses `source` over variables x1..xn. Throws ParseError.
    static Expression parse(std::string_view source, int n);

    int dimension() const { return n_; }

    /// Fully parenthesised text that parses back to an identical tree.
    std::string to_string() const;

    template <typename T>
    T evaluate(std::span<const T> x) const {
        return eval(*root_, x);
    }

private:
    Expression(NodePtr root, int n) : root_(std::move(root)), n_(n) {}

    template <typename T>
    static T eval(const Node& node, std::span<const T> x);

    NodePtr root_;
    int n_ = 0;
};

template <typename T>
T Expression::eval(const Node& node, std::span<const T> x) {
    struct Visitor {
        std::span<const T> x;

        T operator()(const Constant& c) const { return T(c.value); }
        T operator()(const Variable& v) const { return x[static_cast<std::size_t>(v.index)]; }
        T operator()(const Unary& u) const {
            T a = eval(*u.arg, x);
            switch (u.op) {
            case UnaryOp::negate: return -a;
            case UnaryOp::exp: return q_exp(a);
            case UnaryOp::log: return q_log(a);
            case UnaryOp::cosh: return q_cosh(a);
            case UnaryOp::sinh: return q_sinh(a);
            case UnaryOp::sqrt: return q_sqrt(a);
            }
            return a;
        }
        T operator()(const Binary& b) const {
            if (b.op == BinaryOp::pow && b.rhs->constant) {
                // constant exponent: integer powers stay valid for negative bases
                double c = primal(eval(*b.rhs, std::span<const double>{}));
                return q_pow_const(eval(*b.lhs, x), c);
            }
            T l = eval(*b.lhs, x);
            T r = eval(*b.rhs, x);
            switch (b.op) {
            case BinaryOp::add: return l + r;
            case BinaryOp::sub: return l - r;
            case BinaryOp::mul: return l * r;
            case BinaryOp::div: return l / r;
            case BinaryOp::pow: return q_pow(l, r);
            }
            return l;
        }
    };
    return std::visit(Visitor{x}, node.body);
}

} // namespace quadrix
