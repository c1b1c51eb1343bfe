#include "quadrix/expression.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>

namespace quadrix {

namespace {

using Node = Expression::Node;
using NodePtr = Expression::NodePtr;

NodePtr make_constant(double v) {
    return std::make_shared<const Node>(Node{Expression::Constant{v}, true});
}

NodePtr make_unary(UnaryOp op, NodePtr arg) {
    bool c = arg->constant;
    return std::make_shared<const Node>(Node{Expression::Unary{op, std::move(arg)}, c});
}

NodePtr make_binary(BinaryOp op, NodePtr lhs, NodePtr rhs) {
    bool c = lhs->constant && rhs->constant;
    return std::make_shared<const Node>(Node{Expression::Binary{op, std::move(lhs), std::move(rhs)}, c});
}

class Parser {
public:
    Parser(std::string_view src, int n) : src_(src), n_(n) {}

    NodePtr parse() {
        NodePtr e = expr();
        skip_ws();
        if (pos_ != src_.size()) {
            throw ParseError(std::string("unexpected '") + src_[pos_] + "'", pos_);
        }
        return e;
    }

private:
    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) {
            ++pos_;
        }
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) {
            if (pos_ >= src_.size()) {
                throw ParseError(std::string("expected '") + c + "' but reached end of input", pos_);
            }
            throw ParseError(std::string("expected '") + c + "'", pos_);
        }
    }

    NodePtr expr() {
        NodePtr lhs = term();
        for (;;) {
            if (accept('+')) {
                lhs = make_binary(BinaryOp::add, lhs, term());
            } else if (accept('-')) {
                lhs = make_binary(BinaryOp::sub, lhs, term());
            } else {
                return lhs;
            }
        }
    }

    NodePtr term() {
        NodePtr lhs = unary();
        for (;;) {
            if (accept('*')) {
                lhs = make_binary(BinaryOp::mul, lhs, unary());
            } else if (accept('/')) {
                lhs = make_binary(BinaryOp::div, lhs, unary());
            } else {
                return lhs;
            }
        }
    }

    NodePtr unary() {
        if (accept('-')) {
            return make_unary(UnaryOp::negate, unary());
        }
        if (accept('+')) {
            return unary();
        }
        return power();
    }

    NodePtr power() {
        NodePtr base = primary();
        if (accept('^')) {
            return make_binary(BinaryOp::pow, base, unary());
        }
        return base;
    }

    NodePtr primary() {
        skip_ws();
        if (pos_ >= src_.size()) {
            throw ParseError("unexpected end of input", pos_);
        }
        char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr e = expr();
            expect(')');
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            return number();
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            return identifier();
        }
        throw ParseError(std::string("unexpected '") + c + "'", pos_);
    }

    NodePtr number() {
        std::size_t start = pos_;
        auto digits = [&] {
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                ++pos_;
            }
        };
        digits();
        if (pos_ < src_.size() && src_[pos_] == '.') {
            ++pos_;
            digits();
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t save = pos_;
            ++pos_;
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) {
                ++pos_;
            }
            if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                digits();
            } else {
                pos_ = save;
            }
        }
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(src_.data() + start, src_.data() + pos_, value);
        if (ec != std::errc() || ptr != src_.data() + pos_) {
            throw ParseError("malformed number", start);
        }
        return make_constant(value);
    }

    NodePtr identifier() {
        std::size_t start = pos_;
        while (pos_ < src_.size() && std::isalnum(static_cast<unsigned char>(src_[pos_]))) {
            ++pos_;
        }
        std::string_view name = src_.substr(start, pos_ - start);

        if (name.size() >= 2 && name[0] == 'x' &&
            name.find_first_not_of("0123456789", 1) == std::string_view::npos) {
            int index = 0;
            std::from_chars(name.data() + 1, name.data() + name.size(), index);
            if (index < 1 || index > n_) {
                throw ParseError("variable " + std::string(name) + " out of range (n=" +
                                     std::to_string(n_) + ")",
                                 start);
            }
            return std::make_shared<const Node>(Node{Expression::Variable{index - 1}, false});
        }

        static constexpr std::pair<std::string_view, UnaryOp> functions[] = {
            {"exp", UnaryOp::exp},   {"log", UnaryOp::log},   {"cosh", UnaryOp::cosh},
            {"sinh", UnaryOp::sinh}, {"sqrt", UnaryOp::sqrt},
        };
        for (const auto& [fname, op] : functions) {
            if (name == fname) {
                expect('(');
                NodePtr arg = expr();
                expect(')');
                return make_unary(op, std::move(arg));
            }
        }
        throw ParseError("unknown identifier '" + std::string(name) + "'", start);
    }

    std::string_view src_;
    int n_;
    std::size_t pos_ = 0;
};

void print(const Node& node, std::string& out) {
    struct Printer {
        std::string& out;

        void operator()(const Expression::Constant& c) const {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.17g", c.value);
            // negative literals come out of constant folding only; keep them parseable
            if (c.value < 0) {
                out += "(";
                out += buf;
                out += ")";
            } else {
                out += buf;
            }
        }
        void operator()(const Expression::Variable& v) const { out += "x" + std::to_string(v.index + 1); }
        void operator()(const Expression::Unary& u) const {
            static constexpr const char* names[] = {"-", "exp", "log", "cosh", "sinh", "sqrt"};
            out += names[static_cast<int>(u.op)];
            out += "(";
            print(*u.arg, out);
            out += ")";
        }
        void operator()(const Expression::Binary& b) const {
            static constexpr char ops[] = {'+', '-', '*', '/', '^'};
            out += "(";
            print(*b.lhs, out);
            out += ops[static_cast<int>(b.op)];
            print(*b.rhs, out);
            out += ")";
        }
    };
    std::visit(Printer{out}, node.body);
}

} // namespace

Expression Expression::parse(std::string_view source, int n) {
    if (n < 1) {
        throw ParseError("dimension must be positive", 0);
    }
    return Expression(Parser(source, n).parse(), n);
}

std::string Expression::to_string() const {
    std::string out;
    print(*root_, out);
    return out;
}

} // namespace quadrix
