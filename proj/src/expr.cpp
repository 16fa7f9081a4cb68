#include "ultraheat/expr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <vector>

#include "ultraheat/errors.hpp"

namespace ultraheat {

struct Expr::Node {
    Kind kind = Kind::Literal;
    double value = 0.0;  // literal value, or the exponent for Pow
    int depth = 1;
    std::shared_ptr<const Node> lhs;
    std::shared_ptr<const Node> rhs;
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;

NodePtr make(Expr::Kind kind, NodePtr lhs = nullptr, NodePtr rhs = nullptr, double value = 0.0) {
    auto n = std::make_shared<Expr::Node>();
    n->kind = kind;
    n->lhs = std::move(lhs);
    n->rhs = std::move(rhs);
    n->value = value;
    n->depth = 1 + std::max(n->lhs ? n->lhs->depth : 0, n->rhs ? n->rhs->depth : 0);
    return n;
}

class Parser {
public:
    explicit Parser(std::string_view src) : src_(src) {}

    NodePtr parse_all() {
        NodePtr root = expr();
        skip_space();
        if (pos_ != src_.size()) fail("unexpected character '" + std::string(1, src_[pos_]) + "'");
        return root;
    }

private:
    [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, pos_); }

    NodePtr checked(NodePtr n) const {
        if (n->depth > kMaxTreeDepth) fail("expression nested too deeply");
        return n;
    }

    void skip_space() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_space();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) fail(std::string("expected '") + c + "'");
    }

    NodePtr expr() {
        NodePtr lhs = term();
        for (;;) {
            if (accept('+')) {
                lhs = checked(make(Expr::Kind::Add, lhs, term()));
            } else if (accept('-')) {
                lhs = checked(make(Expr::Kind::Sub, lhs, term()));
            } else {
                return lhs;
            }
        }
    }

    NodePtr term() {
        NodePtr lhs = unary();
        for (;;) {
            if (accept('*')) {
                lhs = checked(make(Expr::Kind::Mul, lhs, unary()));
            } else if (accept('/')) {
                lhs = checked(make(Expr::Kind::Div, lhs, unary()));
            } else {
                return lhs;
            }
        }
    }

    NodePtr unary() {
        DepthGuard guard(*this);
        if (accept('-')) return make(Expr::Kind::Neg, unary());
        return power();
    }

    NodePtr power() {
        NodePtr base = primary();
        while (accept('^')) {
            skip_space();
            const bool negative = accept('-');
            skip_space();
            const std::size_t start = pos_;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
            if (start == pos_) fail("exponent must be an integer literal");
            if (pos_ < src_.size() && (src_[pos_] == '.' || src_[pos_] == 'e' || src_[pos_] == 'E')) {
                fail("exponent must be an integer literal");
            }
            if (pos_ - start > 9) fail("exponent too large");
            int k = 0;
            std::from_chars(src_.data() + start, src_.data() + pos_, k);
            base = checked(make(Expr::Kind::Pow, base, nullptr, negative ? -k : k));
        }
        return base;
    }

    NodePtr number() {
        const std::size_t start = pos_;
        auto digits = [&] {
            const std::size_t from = pos_;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
            return pos_ - from;
        };
        std::size_t count = digits();
        if (pos_ < src_.size() && src_[pos_] == '.') {
            ++pos_;
            count += digits();
        }
        if (count == 0) {
            pos_ = start;
            fail("malformed number");
        }
        // Exponent only when a digit follows, so "2e" is not swallowed silently.
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t look = pos_ + 1;
            if (look < src_.size() && (src_[look] == '+' || src_[look] == '-')) ++look;
            if (look < src_.size() && std::isdigit(static_cast<unsigned char>(src_[look]))) {
                pos_ = look;
                digits();
            }
        }
        double v = 0.0;
        const auto res = std::from_chars(src_.data() + start, src_.data() + pos_, v);
        if (res.ec != std::errc() || res.ptr != src_.data() + pos_) {
            pos_ = start;
            fail("malformed number");
        }
        return make(Expr::Kind::Literal, nullptr, nullptr, v);
    }

    NodePtr primary() {
        skip_space();
        if (pos_ >= src_.size()) fail("unexpected end of input");
        const char c = src_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (c == '(') {
            ++pos_;
            NodePtr inner = expr();
            expect(')');
            return inner;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            const std::size_t start = pos_;
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
                ++pos_;
            }
            const std::string_view name = src_.substr(start, pos_ - start);
            if (name == "t") return make(Expr::Kind::Time);
            if (name == "pi") return make(Expr::Kind::Literal, nullptr, nullptr, std::numbers::pi);
            if (name == "e") return make(Expr::Kind::Literal, nullptr, nullptr, std::numbers::e);
            Expr::Kind fn;
            if (name == "sin") {
                fn = Expr::Kind::Sin;
            } else if (name == "cos") {
                fn = Expr::Kind::Cos;
            } else if (name == "exp") {
                fn = Expr::Kind::Exp;
            } else {
                pos_ = start;
                fail("unknown identifier '" + std::string(name) + "'");
            }
            expect('(');
            NodePtr arg = expr();
            expect(')');
            return make(fn, arg);
        }
        fail("unexpected character '" + std::string(1, c) + "'");
    }

    struct DepthGuard {
        explicit DepthGuard(Parser& p) : parser(p) {
            if (++parser.depth_ > kMaxDepth) parser.fail("expression nested too deeply");
        }
        ~DepthGuard() { --parser.depth_; }
        Parser& parser;
    };

    static constexpr int kMaxDepth = 200;
    static constexpr int kMaxTreeDepth = 2000;

    std::string_view src_;
    std::size_t pos_ = 0;
    int depth_ = 0;
};

double eval_node(const Expr::Node& n, double t) {
    switch (n.kind) {
        case Expr::Kind::Literal: return n.value;
        case Expr::Kind::Time: return t;
        case Expr::Kind::Add: return eval_node(*n.lhs, t) + eval_node(*n.rhs, t);
        case Expr::Kind::Sub: return eval_node(*n.lhs, t) - eval_node(*n.rhs, t);
        case Expr::Kind::Mul: return eval_node(*n.lhs, t) * eval_node(*n.rhs, t);
        case Expr::Kind::Div: {
            const double d = eval_node(*n.rhs, t);
            if (d == 0.0) throw EvalError("division by zero");
            return eval_node(*n.lhs, t) / d;
        }
        case Expr::Kind::Neg: return -eval_node(*n.lhs, t);
        case Expr::Kind::Pow: {
            const double b = eval_node(*n.lhs, t);
            const int k = static_cast<int>(n.value);
            if (k < 0 && b == 0.0) throw EvalError("division by zero");
            // repeated squaring keeps integer powers exact where representable
            double acc = 1.0;
            double sq = b;
            for (unsigned m = static_cast<unsigned>(k < 0 ? -static_cast<long>(k) : k); m != 0; m >>= 1) {
                if (m & 1U) acc *= sq;
                sq *= sq;
            }
            return k < 0 ? 1.0 / acc : acc;
        }
        case Expr::Kind::Sin: return std::sin(eval_node(*n.lhs, t));
        case Expr::Kind::Cos: return std::cos(eval_node(*n.lhs, t));
        case Expr::Kind::Exp: return std::exp(eval_node(*n.lhs, t));
    }
    return 0.0;
}

void print_node(const Expr::Node& n, std::string& out) {
    auto binary = [&](const char* op) {
        out += '(';
        print_node(*n.lhs, out);
        out += op;
        print_node(*n.rhs, out);
        out += ')';
    };
    auto call = [&](const char* fn) {
        out += fn;
        out += '(';
        print_node(*n.lhs, out);
        out += ')';
    };
    switch (n.kind) {
        case Expr::Kind::Literal: {
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", n.value);
            out += '(';
            out += buf;
            out += ')';
            return;
        }
        case Expr::Kind::Time: out += 't'; return;
        case Expr::Kind::Add: binary(" + "); return;
        case Expr::Kind::Sub: binary(" - "); return;
        case Expr::Kind::Mul: binary(" * "); return;
        case Expr::Kind::Div: binary(" / "); return;
        case Expr::Kind::Neg:
            out += "(-";
            print_node(*n.lhs, out);
            out += ')';
            return;
        case Expr::Kind::Pow:
            out += '(';
            print_node(*n.lhs, out);
            out += '^';
            out += std::to_string(static_cast<int>(n.value));
            out += ')';
            return;
        case Expr::Kind::Sin: call("sin"); return;
        case Expr::Kind::Cos: call("cos"); return;
        case Expr::Kind::Exp: call("exp"); return;
    }
}

void tree_node(const Expr::Node& n, std::string& out) {
    auto node = [&](const char* name, bool two) {
        out += name;
        out += '(';
        tree_node(*n.lhs, out);
        if (two) {
            out += ", ";
            tree_node(*n.rhs, out);
        }
        out += ')';
    };
    switch (n.kind) {
        case Expr::Kind::Literal: {
            char buf[40];
            std::snprintf(buf, sizeof buf, "%g", n.value);
            out += buf;
            return;
        }
        case Expr::Kind::Time: out += 't'; return;
        case Expr::Kind::Add: node("Add", true); return;
        case Expr::Kind::Sub: node("Sub", true); return;
        case Expr::Kind::Mul: node("Mul", true); return;
        case Expr::Kind::Div: node("Div", true); return;
        case Expr::Kind::Neg: node("Neg", false); return;
        case Expr::Kind::Pow:
            out += "Pow(";
            tree_node(*n.lhs, out);
            out += ", " + std::to_string(static_cast<int>(n.value)) + ")";
            return;
        case Expr::Kind::Sin: node("Sin", false); return;
        case Expr::Kind::Cos: node("Cos", false); return;
        case Expr::Kind::Exp: node("Exp", false); return;
    }
}

}  // namespace

std::string Expr::tree() const {
    std::string out;
    tree_node(*root_, out);
    return out;
}

Expr Expr::parse(std::string_view source) {
    Parser parser(source);
    return Expr(parser.parse_all(), std::string(source));
}

double Expr::eval(double t) const { return eval_node(*root_, t); }

std::string Expr::to_string() const {
    std::string out;
    print_node(*root_, out);
    return out;
}

Expr::Kind Expr::kind() const { return root_->kind; }

}  // namespace ultraheat
