#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "combcalc/space.hpp"

namespace combcalc {

enum class ExprKind { Constant, Variable, Neg, Add, Sub, Mul, Div, Pow, Sin, Cos, Exp, Apply };

// A smooth real function of one variable that knows its own derivative.
// Used for functions the expression grammar cannot spell, such as the
// compactly supported bump profiles behind partitions of unity.
class UnaryFunction {
public:
    virtual ~UnaryFunction() = default;
    virtual double operator()(double t) const = 0;
    virtual std::shared_ptr<const UnaryFunction> derivative() const = 0;
    virtual std::string name() const = 0;
};

// Immutable expression tree over the coordinates of a CombSpace.
//
// Copies share structure. The named factories (constant, variable) and the
// arithmetic operators below constant-fold (0*x -> 0, x+0 -> x, 1*x -> x,
// const op const -> const); the make_* builders keep the exact shape, which
// is what the parser uses.
class Expr {
public:
    Expr(); // constant 0

    static Expr constant(double value);
    static Expr variable(CoordLabel label);
    static Expr make_unary(ExprKind kind, Expr operand);
    static Expr make_binary(ExprKind kind, Expr lhs, Expr rhs);
    static Expr make_pow(Expr base, int exponent);
    static Expr make_apply(std::shared_ptr<const UnaryFunction> fn, Expr operand);

    ExprKind kind() const;
    double constant_value() const;
    const CoordLabel& label() const;
    int exponent() const;
    const UnaryFunction& function() const;
    const std::shared_ptr<const UnaryFunction>& function_ptr() const;
    std::size_t arity() const;
    const Expr& child(std::size_t i) const;

    bool is_constant() const { return kind() == ExprKind::Constant; }
    bool is_constant(double v) const { return is_constant() && constant_value() == v; }
    bool is_zero() const { return is_constant(0.0); }

private:
    struct Node;
    explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    std::shared_ptr<const Node> node_;
};

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr pow(const Expr& base, int exponent);
Expr sin(const Expr& a);
Expr cos(const Expr& a);
Expr exp(const Expr& a);
Expr apply(std::shared_ptr<const UnaryFunction> fn, const Expr& a);

// Same tree shape, same constants bitwise, same labels and functions.
bool structurally_equal(const Expr& a, const Expr& b);

// Parses text against space. Throws ParseError (with byte offset) on syntax
// errors and bad exponents, UnknownVariableError for labels not in space.
Expr parse(std::string_view text, const CombSpace& space);

// Renders text that parse() maps back to the same tree for any tree the
// parser can produce. Apply nodes print with the function's name.
std::string to_string(const Expr& e);

// Throws InvalidLabelError if e mentions a coordinate outside space.
void validate(const Expr& e, const CombSpace& space);

// Evaluates at a point; throws EvalError on division by zero.
double eval(const Expr& e, const Point& p);
double eval(const Expr& e, const CombSpace& space, std::span<const double> coords);

// Exact symbolic partial derivative, constant-folded.
Expr diff(const Expr& e, const CoordLabel& v);

// Replaces every variable by replacement(label).
Expr substitute(const Expr& e, const std::function<Expr(const CoordLabel&)>& replacement);

// Flattened postfix program for repeated evaluation against coordinate
// vectors of one space. Thread-safe to call concurrently.
class CompiledExpr {
public:
    CompiledExpr(const Expr& e, const CombSpace& space);

    double operator()(std::span<const double> coords) const;
    bool is_constant() const { return code_.size() == 1 && code_[0].op == Op::Const; }

private:
    enum class Op { Const, Var, Neg, Add, Sub, Mul, Div, Pow, Sin, Cos, Exp, Apply };
    struct Instr {
        Op op;
        double value = 0.0;
        int index = 0;
        const UnaryFunction* fn = nullptr;
    };
    void emit(const Expr& e, const CombSpace& space, int depth);

    std::vector<Instr> code_;
    std::vector<std::shared_ptr<const UnaryFunction>> keep_alive_;
    int max_depth_ = 0;
};

} // namespace combcalc
