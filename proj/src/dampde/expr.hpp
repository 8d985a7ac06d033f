#pragma once

#include <memory>
#include <string>

namespace dampde {

namespace detail {
struct ExprNode;
}

// Parsed arithmetic expression in the variables t, x, y with functions sin,
// cos, exp, the constant pi, and operators + - * / ^ (right-associative
// power), unary sign, and parentheses.
class Expression {
public:
    Expression() = default;
    double evaluate(double t, double x, double y) const;
    bool valid() const { return root_ != nullptr; }

private:
    friend Expression parse_expression(const std::string& text);
    std::shared_ptr<const detail::ExprNode> root_;
};

// Throws ConfigError with the offending position on malformed input.
Expression parse_expression(const std::string& text);

} // namespace dampde
