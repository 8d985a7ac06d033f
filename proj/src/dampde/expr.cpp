#include "expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>

#include "errors.hpp"

namespace dampde {

namespace detail {

struct ExprNode {
    enum class Kind { Number, VarT, VarX, VarY, Add, Sub, Mul, Div, Pow, Neg, Sin, Cos, Exp };

    Kind kind = Kind::Number;
    double value = 0.0;
    std::shared_ptr<const ExprNode> a;
    std::shared_ptr<const ExprNode> b;
};

namespace {

using NodePtr = std::shared_ptr<const ExprNode>;

double eval_node(const ExprNode& n, double t, double x, double y) {
    using Kind = ExprNode::Kind;
    switch (n.kind) {
    case Kind::Number:
        return n.value;
    case Kind::VarT:
        return t;
    case Kind::VarX:
        return x;
    case Kind::VarY:
        return y;
    case Kind::Add:
        return eval_node(*n.a, t, x, y) + eval_node(*n.b, t, x, y);
    case Kind::Sub:
        return eval_node(*n.a, t, x, y) - eval_node(*n.b, t, x, y);
    case Kind::Mul:
        return eval_node(*n.a, t, x, y) * eval_node(*n.b, t, x, y);
    case Kind::Div:
        return eval_node(*n.a, t, x, y) / eval_node(*n.b, t, x, y);
    case Kind::Pow:
        return std::pow(eval_node(*n.a, t, x, y), eval_node(*n.b, t, x, y));
    case Kind::Neg:
        return -eval_node(*n.a, t, x, y);
    case Kind::Sin:
        return std::sin(eval_node(*n.a, t, x, y));
    case Kind::Cos:
        return std::cos(eval_node(*n.a, t, x, y));
    case Kind::Exp:
        return std::exp(eval_node(*n.a, t, x, y));
    }
    return 0.0;
}

NodePtr leaf(ExprNode::Kind kind, double value = 0.0) {
    auto n = std::make_shared<ExprNode>();
    n->kind = kind;
    n->value = value;
    return n;
}

NodePtr unary_node(ExprNode::Kind kind, NodePtr a) {
    auto n = std::make_shared<ExprNode>();
    n->kind = kind;
    n->a = std::move(a);
    return n;
}

NodePtr binary_node(ExprNode::Kind kind, NodePtr a, NodePtr b) {
    auto n = std::make_shared<ExprNode>();
    n->kind = kind;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

class Parser {
public:
    explicit Parser(const std::string& text) : text_(text) {}

    NodePtr parse() {
        NodePtr e = parse_sum();
        skip_space();
        if (pos_ != text_.size()) {
            fail("unexpected trailing input");
        }
        return e;
    }

private:
    const std::string& text_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& what) const {
        throw ConfigError("expression error at position " + std::to_string(pos_) + ": " + what +
                          " in \"" + text_ + "\"");
    }

    void skip_space() {
        while (pos_ < text_.size() &&
               std::isspace(static_cast<unsigned char>(text_[pos_])) != 0) {
            ++pos_;
        }
    }

    bool consume(char c) {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr parse_sum() {
        NodePtr e = parse_product();
        for (;;) {
            if (consume('+')) {
                e = binary_node(ExprNode::Kind::Add, std::move(e), parse_product());
            } else if (consume('-')) {
                e = binary_node(ExprNode::Kind::Sub, std::move(e), parse_product());
            } else {
                return e;
            }
        }
    }

    NodePtr parse_product() {
        NodePtr e = parse_unary();
        for (;;) {
            if (consume('*')) {
                e = binary_node(ExprNode::Kind::Mul, std::move(e), parse_unary());
            } else if (consume('/')) {
                e = binary_node(ExprNode::Kind::Div, std::move(e), parse_unary());
            } else {
                return e;
            }
        }
    }

    // Unary sign binds looser than '^', so -x^2 negates the square, and the
    // exponent slot recurses through unary, so 2^-3 and 2^3^2 parse.
    NodePtr parse_unary() {
        if (consume('-')) {
            return unary_node(ExprNode::Kind::Neg, parse_unary());
        }
        if (consume('+')) {
            return parse_unary();
        }
        return parse_power();
    }

    NodePtr parse_power() {
        NodePtr base = parse_primary();
        if (consume('^')) {
            return binary_node(ExprNode::Kind::Pow, std::move(base), parse_unary());
        }
        return base;
    }

    NodePtr parse_primary() {
        skip_space();
        if (pos_ >= text_.size()) {
            fail("expected a value");
        }
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr e = parse_sum();
            if (!consume(')')) {
                fail("expected ')'");
            }
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) != 0 || c == '.') {
            return parse_number();
        }
        if (std::isalpha(static_cast<unsigned char>(c)) != 0 || c == '_') {
            return parse_name();
        }
        fail(std::string("unexpected character '") + c + "'");
    }

    NodePtr parse_number() {
        const char* start = text_.c_str() + pos_;
        char* end = nullptr;
        const double v = std::strtod(start, &end);
        if (end == start) {
            fail("malformed number");
        }
        pos_ += static_cast<std::size_t>(end - start);
        return leaf(ExprNode::Kind::Number, v);
    }

    NodePtr parse_name() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) != 0 ||
                text_[pos_] == '_')) {
            ++pos_;
        }
        const std::string name = text_.substr(start, pos_ - start);
        if (name == "t") {
            return leaf(ExprNode::Kind::VarT);
        }
        if (name == "x") {
            return leaf(ExprNode::Kind::VarX);
        }
        if (name == "y") {
            return leaf(ExprNode::Kind::VarY);
        }
        if (name == "pi") {
            return leaf(ExprNode::Kind::Number, std::numbers::pi);
        }
        ExprNode::Kind fn;
        if (name == "sin") {
            fn = ExprNode::Kind::Sin;
        } else if (name == "cos") {
            fn = ExprNode::Kind::Cos;
        } else if (name == "exp") {
            fn = ExprNode::Kind::Exp;
        } else {
            pos_ = start;
            fail("unknown name '" + name + "'");
        }
        if (!consume('(')) {
            fail("function '" + name + "' needs parentheses");
        }
        NodePtr arg = parse_sum();
        if (!consume(')')) {
            fail("expected ')'");
        }
        return unary_node(fn, std::move(arg));
    }
};

} // namespace

} // namespace detail

double Expression::evaluate(double t, double x, double y) const {
    if (!root_) {
        throw ConfigError("evaluating an empty expression");
    }
    return detail::eval_node(*root_, t, x, y);
}

Expression parse_expression(const std::string& text) {
    detail::Parser parser(text);
    Expression e;
    e.root_ = parser.parse();
    return e;
}

} // namespace dampde
