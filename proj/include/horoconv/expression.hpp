#pragma once
// Minimal arithmetic expression parser for chart-coordinate formulas:
// +, -, *, /, ^, exp, log, sqrt, sin, cos, named constants and coordinate
// variables y1..yn (plus rr = |y|^2). Parse errors carry the input position.

#include <cctype>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "horoconv/errors.hpp"
#include "horoconv/lorentz.hpp"

namespace horoconv {

class Expression {
public:
    /// Parses `text` over variables y1..yn; throws spec_error with a
    /// position-annotated message on malformed input.
    static Expression parse(const std::string& text, int n_vars);

    double eval(const Vec& y) const {
        if (y.size() != n_vars_) throw spec_error("expression: wrong number of coordinates");
        return root_->eval(y);
    }

    int n_vars() const { return n_vars_; }
    const std::string& text() const { return text_; }

private:
    struct Node {
        virtual ~Node() = default;
        virtual double eval(const Vec& y) const = 0;
    };
    using NodePtr = std::unique_ptr<Node>;

    struct Constant : Node {
        double value;
        explicit Constant(double v) : value(v) {}
        double eval(const Vec&) const override { return value; }
    };
    struct Variable : Node {
        int index; // -1 encodes rr = |y|^2
        explicit Variable(int i) : index(i) {}
        double eval(const Vec& y) const override {
            return index < 0 ? y.squaredNorm() : y[index];
        }
    };
    struct Binary : Node {
        char op;
        NodePtr lhs, rhs;
        Binary(char o, NodePtr l, NodePtr r) : op(o), lhs(std::move(l)), rhs(std::move(r)) {}
        double eval(const Vec& y) const override {
            const double a = lhs->eval(y), b = rhs->eval(y);
            switch (op) {
                case '+': return a + b;
                case '-': return a - b;
                case '*': return a * b;
                case '/': return a / b;
                default: return std::pow(a, b);
            }
        }
    };
    struct Unary : Node {
        std::function<double(double)> fn;
        NodePtr arg;
        Unary(std::function<double(double)> f, NodePtr a) : fn(std::move(f)), arg(std::move(a)) {}
        double eval(const Vec& y) const override { return fn(arg->eval(y)); }
    };

    class Parser {
    public:
        Parser(const std::string& text, int n_vars) : text_(text), n_(n_vars) {}

        NodePtr run() {
            NodePtr e = expr();
            skip_ws();
            if (pos_ != text_.size()) fail("unexpected trailing input");
            return e;
        }

    private:
        const std::string& text_;
        int n_;
        size_t pos_ = 0;

        [[noreturn]] void fail(const std::string& what) const {
            throw spec_error("expression parse error at position " + std::to_string(pos_) + ": " + what);
        }
        void skip_ws() {
            while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        }
        bool eat(char c) {
            skip_ws();
            if (pos_ < text_.size() && text_[pos_] == c) {
                ++pos_;
                return true;
            }
            return false;
        }

        NodePtr expr() {
            NodePtr lhs = term();
            for (;;) {
                if (eat('+'))
                    lhs = std::make_unique<Binary>('+', std::move(lhs), term());
                else if (eat('-'))
                    lhs = std::make_unique<Binary>('-', std::move(lhs), term());
                else
                    return lhs;
            }
        }

        NodePtr term() {
            NodePtr lhs = factor();
            for (;;) {
                if (eat('*'))
                    lhs = std::make_unique<Binary>('*', std::move(lhs), factor());
                else if (eat('/'))
                    lhs = std::make_unique<Binary>('/', std::move(lhs), factor());
                else
                    return lhs;
            }
        }

        // Right-associative power binds tighter than unary minus on the left.
        NodePtr factor() {
            skip_ws();
            if (eat('-')) return std::make_unique<Unary>([](double v) { return -v; }, factor());
            if (eat('+')) return factor();
            NodePtr base = primary();
            if (eat('^')) return std::make_unique<Binary>('^', std::move(base), factor());
            return base;
        }

        NodePtr primary() {
            skip_ws();
            if (pos_ >= text_.size()) fail("unexpected end of input");
            const char c = text_[pos_];
            if (c == '(') {
                ++pos_;
                NodePtr e = expr();
                if (!eat(')')) fail("expected ')'");
                return e;
            }
            if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
            if (std::isalpha(static_cast<unsigned char>(c))) return ident();
            fail(std::string("unexpected character '") + c + "'");
        }

        NodePtr number() {
            size_t end = pos_;
            while (end < text_.size() &&
                   (std::isdigit(static_cast<unsigned char>(text_[end])) || text_[end] == '.' ||
                    text_[end] == 'e' || text_[end] == 'E' ||
                    ((text_[end] == '+' || text_[end] == '-') && end > pos_ &&
                     (text_[end - 1] == 'e' || text_[end - 1] == 'E'))))
                ++end;
            try {
                const double v = std::stod(text_.substr(pos_, end - pos_));
                pos_ = end;
                return std::make_unique<Constant>(v);
            } catch (...) {
                fail("malformed number");
            }
        }

        NodePtr ident() {
            size_t end = pos_;
            while (end < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[end])) || text_[end] == '_'))
                ++end;
            const std::string name = text_.substr(pos_, end - pos_);
            pos_ = end;
            static const std::map<std::string, double (*)(double)> fns = {
                {"exp", [](double v) { return std::exp(v); }},  {"log", [](double v) { return std::log(v); }},
                {"sqrt", [](double v) { return std::sqrt(v); }}, {"sin", [](double v) { return std::sin(v); }},
                {"cos", [](double v) { return std::cos(v); }}};
            if (auto it = fns.find(name); it != fns.end()) {
                if (!eat('(')) fail("expected '(' after function " + name);
                NodePtr a = expr();
                if (!eat(')')) fail("expected ')'");
                return std::make_unique<Unary>(it->second, std::move(a));
            }
            if (name == "pi") return std::make_unique<Constant>(M_PI);
            if (name == "e") return std::make_unique<Constant>(M_E);
            if (name == "rr") return std::make_unique<Variable>(-1);
            if (name.size() >= 2 && name[0] == 'y') {
                try {
                    const int idx = std::stoi(name.substr(1));
                    if (idx >= 1 && idx <= n_) return std::make_unique<Variable>(idx - 1);
                } catch (...) {
                }
            }
            fail("unknown identifier '" + name + "' (variables are y1..y" + std::to_string(n_) + ", rr)");
        }
    };

    Expression(NodePtr root, int n_vars, std::string text)
        : root_(std::move(root)), n_vars_(n_vars), text_(std::move(text)) {}

    std::shared_ptr<const Node> root_;
    int n_vars_;
    std::string text_;
};

inline Expression Expression::parse(const std::string& text, int n_vars) {
    Parser p(text, n_vars);
    NodePtr root = p.run();
    return Expression(std::move(root), n_vars, text);
}

} // namespace horoconv
