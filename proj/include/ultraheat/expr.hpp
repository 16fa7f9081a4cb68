#pragma once

#include <memory>
#include <string>
#include <string_view>

namespace ultraheat {

/// Immutable expression tree for time-dependent edge weights.
///
/// Grammar (whitespace-insensitive, no implicit multiplication):
///
///     expr     = term { ("+" | "-") term } ;
///     term     = unary { ("*" | "/") unary } ;
///     unary    = "-" unary | power ;
///     power    = primary { "^" exponent } ;          (* left-associative *)
///     exponent = [ "-" ] integer ;
///     primary  = number | "t" | "pi" | "e"
///              | ("sin" | "cos" | "exp") "(" expr ")"
///              | "(" expr ")" ;
///     number   = digits [ "." digits ] [ ("e" | "E") [ "+" | "-" ] digits ]
///              | "." digits ;
///
/// So `-2^2` is -(2^2) and `2^3^2` is (2^3)^2.
class Expr {
public:
    enum class Kind { Literal, Time, Add, Sub, Mul, Div, Neg, Pow, Sin, Cos, Exp };

    struct Node;

    static Expr parse(std::string_view source);

    /// Evaluates at time t. Throws EvalError on division by zero.
    double eval(double t) const;

    /// Fully parenthesised source that parses back to an equivalent tree.
    std::string to_string() const;

    /// Constructor-style dump, e.g. `Add(1, Mul(0.5, Sin(t)))`.
    std::string tree() const;

    Kind kind() const;

    const std::string& source() const noexcept { return source_; }

private:
    Expr(std::shared_ptr<const Node> root, std::string source)
        : root_(std::move(root)), source_(std::move(source)) {}

    std::shared_ptr<const Node> root_;
    std::string source_;
};

}  // namespace ultraheat
