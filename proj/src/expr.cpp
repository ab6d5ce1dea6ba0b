#include "combcalc/expr.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>

#include "combcalc/error.hpp"

namespace combcalc {

struct Expr::Node {
    ExprKind kind = ExprKind::Constant;
    double value = 0.0;
    CoordLabel label{};
    int exponent = 0;
    std::shared_ptr<const UnaryFunction> fn;
    std::vector<Expr> children;
};

namespace {

bool is_unary(ExprKind k) {
    return k == ExprKind::Neg || k == ExprKind::Sin || k == ExprKind::Cos || k == ExprKind::Exp;
}

bool is_binary(ExprKind k) {
    return k == ExprKind::Add || k == ExprKind::Sub || k == ExprKind::Mul || k == ExprKind::Div;
}

double int_pow(double base, int k) {
    double result = 1.0;
    while (k > 0) {
        if (k & 1) result *= base;
        base *= base;
        k >>= 1;
    }
    return result;
}

} // namespace

Expr::Expr() : Expr(constant(0.0)) {}

Expr Expr::constant(double value) {
    auto n = std::make_shared<Node>();
    n->kind = ExprKind::Constant;
    n->value = value;
    return Expr(std::move(n));
}

Expr Expr::variable(CoordLabel label) {
    auto n = std::make_shared<Node>();
    n->kind = ExprKind::Variable;
    n->label = label;
    return Expr(std::move(n));
}

Expr Expr::make_unary(ExprKind kind, Expr operand) {
    if (!is_unary(kind)) throw Error("make_unary: not a unary kind");
    auto n = std::make_shared<Node>();
    n->kind = kind;
    n->children.push_back(std::move(operand));
    return Expr(std::move(n));
}

Expr Expr::make_binary(ExprKind kind, Expr lhs, Expr rhs) {
    if (!is_binary(kind)) throw Error("make_binary: not a binary kind");
    auto n = std::make_shared<Node>();
    n->kind = kind;
    n->children.push_back(std::move(lhs));
    n->children.push_back(std::move(rhs));
    return Expr(std::move(n));
}

Expr Expr::make_pow(Expr base, int exponent) {
    if (exponent < 0) throw Error("make_pow: exponent must be nonnegative");
    auto n = std::make_shared<Node>();
    n->kind = ExprKind::Pow;
    n->exponent = exponent;
    n->children.push_back(std::move(base));
    return Expr(std::move(n));
}

Expr Expr::make_apply(std::shared_ptr<const UnaryFunction> fn, Expr operand) {
    if (!fn) throw Error("make_apply: null function");
    auto n = std::make_shared<Node>();
    n->kind = ExprKind::Apply;
    n->fn = std::move(fn);
    n->children.push_back(std::move(operand));
    return Expr(std::move(n));
}

ExprKind Expr::kind() const { return node_->kind; }
double Expr::constant_value() const { return node_->value; }
const CoordLabel& Expr::label() const { return node_->label; }
int Expr::exponent() const { return node_->exponent; }
const UnaryFunction& Expr::function() const { return *node_->fn; }
const std::shared_ptr<const UnaryFunction>& Expr::function_ptr() const { return node_->fn; }
std::size_t Expr::arity() const { return node_->children.size(); }
const Expr& Expr::child(std::size_t i) const { return node_->children.at(i); }

// Folding arithmetic.

Expr operator+(const Expr& a, const Expr& b) {
    if (a.is_constant() && b.is_constant()) return Expr::constant(a.constant_value() + b.constant_value());
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    return Expr::make_binary(ExprKind::Add, a, b);
}

Expr operator-(const Expr& a, const Expr& b) {
    if (a.is_constant() && b.is_constant()) return Expr::constant(a.constant_value() - b.constant_value());
    if (b.is_zero()) return a;
    if (a.is_zero()) return -b;
    return Expr::make_binary(ExprKind::Sub, a, b);
}

Expr operator*(const Expr& a, const Expr& b) {
    if (a.is_constant() && b.is_constant()) return Expr::constant(a.constant_value() * b.constant_value());
    if (a.is_zero() || b.is_zero()) return Expr::constant(0.0);
    if (a.is_constant(1.0)) return b;
    if (b.is_constant(1.0)) return a;
    if (a.is_constant(-1.0)) return -b;
    if (b.is_constant(-1.0)) return -a;
    return Expr::make_binary(ExprKind::Mul, a, b);
}

Expr operator/(const Expr& a, const Expr& b) {
    if (a.is_constant() && b.is_constant() && b.constant_value() != 0.0) {
        return Expr::constant(a.constant_value() / b.constant_value());
    }
    if (b.is_constant(1.0)) return a;
    if (a.is_zero() && !b.is_zero()) return a;
    return Expr::make_binary(ExprKind::Div, a, b);
}

Expr operator-(const Expr& a) {
    if (a.is_constant()) return Expr::constant(-a.constant_value());
    if (a.kind() == ExprKind::Neg) return a.child(0);
    return Expr::make_unary(ExprKind::Neg, a);
}

Expr pow(const Expr& base, int exponent) {
    if (exponent < 0) throw Error("pow: exponent must be nonnegative");
    if (exponent == 0) return Expr::constant(1.0);
    if (exponent == 1) return base;
    if (base.is_constant()) return Expr::constant(int_pow(base.constant_value(), exponent));
    return Expr::make_pow(base, exponent);
}

Expr sin(const Expr& a) {
    if (a.is_constant()) return Expr::constant(std::sin(a.constant_value()));
    return Expr::make_unary(ExprKind::Sin, a);
}

Expr cos(const Expr& a) {
    if (a.is_constant()) return Expr::constant(std::cos(a.constant_value()));
    return Expr::make_unary(ExprKind::Cos, a);
}

Expr exp(const Expr& a) {
    if (a.is_constant()) return Expr::constant(std::exp(a.constant_value()));
    return Expr::make_unary(ExprKind::Exp, a);
}

Expr apply(std::shared_ptr<const UnaryFunction> fn, const Expr& a) {
    if (a.is_constant()) return Expr::constant((*fn)(a.constant_value()));
    return Expr::make_apply(std::move(fn), a);
}

bool structurally_equal(const Expr& a, const Expr& b) {
    if (a.kind() != b.kind()) return false;
    switch (a.kind()) {
    case ExprKind::Constant: {
        const double x = a.constant_value();
        const double y = b.constant_value();
        return x == y && std::signbit(x) == std::signbit(y);
    }
    case ExprKind::Variable: return a.label() == b.label();
    case ExprKind::Pow:
        if (a.exponent() != b.exponent()) return false;
        break;
    case ExprKind::Apply:
        if (a.function_ptr() != b.function_ptr() && a.function().name() != b.function().name()) return false;
        break;
    default: break;
    }
    if (a.arity() != b.arity()) return false;
    for (std::size_t i = 0; i < a.arity(); ++i) {
        if (!structurally_equal(a.child(i), b.child(i))) return false;
    }
    return true;
}

// Parsing.

namespace {

class Parser {
public:
    Parser(std::string_view text, const CombSpace& space) : text_(text), space_(space) {}

    Expr parse_all() {
        Expr e = parse_expr();
        skip_ws();
        if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) {
            fail(pos_ < text_.size() ? "expected '" + std::string(1, c) + "'"
                                     : "expected '" + std::string(1, c) + "' before end of input");
        }
    }

    Expr parse_expr() {
        Expr lhs = parse_term();
        for (;;) {
            if (accept('+')) {
                lhs = Expr::make_binary(ExprKind::Add, lhs, parse_term());
            } else if (accept('-')) {
                lhs = Expr::make_binary(ExprKind::Sub, lhs, parse_term());
            } else {
                return lhs;
            }
        }
    }

    Expr parse_term() {
        Expr lhs = parse_factor();
        for (;;) {
            if (accept('*')) {
                lhs = Expr::make_binary(ExprKind::Mul, lhs, parse_factor());
            } else if (accept('/')) {
                lhs = Expr::make_binary(ExprKind::Div, lhs, parse_factor());
            } else {
                return lhs;
            }
        }
    }

    Expr parse_factor() {
        if (accept('-')) return Expr::make_unary(ExprKind::Neg, parse_factor());
        return parse_power();
    }

    Expr parse_power() {
        Expr base = parse_atom();
        if (!accept('^')) return base;
        skip_ws();
        const std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        const bool more = pos_ < text_.size() && (text_[pos_] == '.' || std::isalpha(static_cast<unsigned char>(text_[pos_])));
        if (start == pos_ || more) {
            pos_ = start;
            fail("exponent must be a nonnegative integer");
        }
        int k = 0;
        const auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, k);
        if (ec != std::errc()) {
            pos_ = start;
            fail("exponent out of range");
        }
        return Expr::make_pow(std::move(base), k);
    }

    Expr parse_atom() {
        skip_ws();
        if (pos_ >= text_.size()) fail("unexpected end of input");
        const char c = text_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (accept('(')) {
            Expr inner = parse_expr();
            expect(')');
            return inner;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) return parse_word();
        fail("unexpected '" + std::string(1, c) + "'");
    }

    Expr parse_number() {
        const std::size_t start = pos_;
        auto digits = [&] {
            const std::size_t s = pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            return pos_ - s;
        };
        std::size_t count = digits();
        if (pos_ < text_.size() && text_[pos_] == '.') {
            ++pos_;
            count += digits();
        }
        if (count == 0) fail("malformed number");
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            const std::size_t mark = pos_;
            ++pos_;
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
            if (digits() == 0) {
                pos_ = mark;
                fail("malformed exponent in number");
            }
        }
        double value = 0.0;
        const auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, value);
        if (ec != std::errc() || ptr != text_.data() + pos_) {
            pos_ = start;
            fail("malformed number");
        }
        return Expr::constant(value);
    }

    Expr parse_word() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) ++pos_;
        const std::string_view word = text_.substr(start, pos_ - start);
        for (const auto& [fname, kind] : {std::pair{"sin", ExprKind::Sin}, std::pair{"cos", ExprKind::Cos},
                                          std::pair{"exp", ExprKind::Exp}}) {
            if (word == fname) {
                expect('(');
                Expr arg = parse_expr();
                expect(')');
                return Expr::make_unary(kind, std::move(arg));
            }
        }
        const CoordLabel label = parse_ident(word, start);
        if (!space_.contains(label)) {
            throw UnknownVariableError("unknown variable '" + std::string(word) + "' in " + space_.describe());
        }
        return Expr::variable(label);
    }

    // ident := "x" digits ("_" digits)?
    CoordLabel parse_ident(std::string_view word, std::size_t start) {
        auto bad = [&] {
            pos_ = start;
            fail("unknown identifier '" + std::string(word) + "'");
        };
        if (word.size() < 2 || word[0] != 'x') bad();
        const std::size_t underscore = word.find('_');
        auto number = [&](std::string_view s) {
            int v = 0;
            if (s.empty()) bad();
            for (char ch : s) {
                if (!std::isdigit(static_cast<unsigned char>(ch))) bad();
            }
            const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
            if (ec != std::errc()) bad();
            return v;
        };
        if (underscore == std::string_view::npos) return CoordLabel::shared(number(word.substr(1)));
        return CoordLabel::extra(number(word.substr(1, underscore - 1)), number(word.substr(underscore + 1)));
    }

    std::string_view text_;
    const CombSpace& space_;
    std::size_t pos_ = 0;
};

// Printing precedence: sums 1, products 2, negation 3, powers 4, atoms 5.
int precedence(const Expr& e) {
    switch (e.kind()) {
    case ExprKind::Add:
    case ExprKind::Sub: return 1;
    case ExprKind::Mul:
    case ExprKind::Div: return 2;
    case ExprKind::Neg: return 3;
    case ExprKind::Pow: return 4;
    case ExprKind::Constant: return e.constant_value() < 0.0 || std::signbit(e.constant_value()) ? 0 : 5;
    default: return 5;
    }
}

std::string format_double(double v) {
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), ptr);
}

void print(const Expr& e, std::string& out);

void print_child(const Expr& e, bool parens, std::string& out) {
    if (parens) out += '(';
    print(e, out);
    if (parens) out += ')';
}

void print(const Expr& e, std::string& out) {
    const int prec = precedence(e);
    switch (e.kind()) {
    case ExprKind::Constant: out += format_double(e.constant_value()); return;
    case ExprKind::Variable: out += e.label().name(); return;
    case ExprKind::Neg:
        out += '-';
        print_child(e.child(0), precedence(e.child(0)) < 3, out);
        return;
    case ExprKind::Add:
    case ExprKind::Sub:
    case ExprKind::Mul:
    case ExprKind::Div: {
        static constexpr char ops[] = {'+', '-', '*', '/'};
        const char op = ops[static_cast<int>(e.kind()) - static_cast<int>(ExprKind::Add)];
        print_child(e.child(0), precedence(e.child(0)) < prec, out);
        out += op;
        print_child(e.child(1), precedence(e.child(1)) <= prec, out);
        return;
    }
    case ExprKind::Pow:
        print_child(e.child(0), precedence(e.child(0)) < 5, out);
        out += '^';
        out += std::to_string(e.exponent());
        return;
    case ExprKind::Sin: out += "sin"; break;
    case ExprKind::Cos: out += "cos"; break;
    case ExprKind::Exp: out += "exp"; break;
    case ExprKind::Apply: out += e.function().name(); break;
    }
    print_child(e.child(0), true, out);
}

} // namespace

Expr parse(std::string_view text, const CombSpace& space) { return Parser(text, space).parse_all(); }

std::string to_string(const Expr& e) {
    std::string out;
    print(e, out);
    return out;
}

void validate(const Expr& e, const CombSpace& space) {
    if (e.kind() == ExprKind::Variable) {
        if (!space.contains(e.label())) {
            throw InvalidLabelError("coordinate " + e.label().name() + " is not in " + space.describe());
        }
        return;
    }
    for (std::size_t i = 0; i < e.arity(); ++i) validate(e.child(i), space);
}

// Evaluation.

double eval(const Expr& e, const CombSpace& space, std::span<const double> coords) {
    switch (e.kind()) {
    case ExprKind::Constant: return e.constant_value();
    case ExprKind::Variable: return coords[static_cast<std::size_t>(space.index_of(e.label()))];
    case ExprKind::Neg: return -eval(e.child(0), space, coords);
    case ExprKind::Add: return eval(e.child(0), space, coords) + eval(e.child(1), space, coords);
    case ExprKind::Sub: return eval(e.child(0), space, coords) - eval(e.child(1), space, coords);
    case ExprKind::Mul: return eval(e.child(0), space, coords) * eval(e.child(1), space, coords);
    case ExprKind::Div: {
        const double num = eval(e.child(0), space, coords);
        const double den = eval(e.child(1), space, coords);
        if (den == 0.0) throw EvalError("division by zero");
        return num / den;
    }
    case ExprKind::Pow: return int_pow(eval(e.child(0), space, coords), e.exponent());
    case ExprKind::Sin: return std::sin(eval(e.child(0), space, coords));
    case ExprKind::Cos: return std::cos(eval(e.child(0), space, coords));
    case ExprKind::Exp: return std::exp(eval(e.child(0), space, coords));
    case ExprKind::Apply: return e.function()(eval(e.child(0), space, coords));
    }
    return 0.0;
}

double eval(const Expr& e, const Point& p) { return eval(e, p.space(), p.coords()); }

// Differentiation.

Expr diff(const Expr& e, const CoordLabel& v) {
    switch (e.kind()) {
    case ExprKind::Constant: return Expr::constant(0.0);
    case ExprKind::Variable: return Expr::constant(e.label() == v ? 1.0 : 0.0);
    case ExprKind::Neg: return -diff(e.child(0), v);
    case ExprKind::Add: return diff(e.child(0), v) + diff(e.child(1), v);
    case ExprKind::Sub: return diff(e.child(0), v) - diff(e.child(1), v);
    case ExprKind::Mul: {
        const Expr& a = e.child(0);
        const Expr& b = e.child(1);
        return diff(a, v) * b + a * diff(b, v);
    }
    case ExprKind::Div: {
        const Expr& a = e.child(0);
        const Expr& b = e.child(1);
        const Expr db = diff(b, v);
        if (db.is_zero()) return diff(a, v) / b;
        return (diff(a, v) * b - a * db) / pow(b, 2);
    }
    case ExprKind::Pow: {
        const int k = e.exponent();
        if (k == 0) return Expr::constant(0.0);
        const Expr& u = e.child(0);
        return Expr::constant(static_cast<double>(k)) * pow(u, k - 1) * diff(u, v);
    }
    case ExprKind::Sin: return cos(e.child(0)) * diff(e.child(0), v);
    case ExprKind::Cos: return -(sin(e.child(0)) * diff(e.child(0), v));
    case ExprKind::Exp: return exp(e.child(0)) * diff(e.child(0), v);
    case ExprKind::Apply: {
        const Expr du = diff(e.child(0), v);
        if (du.is_zero()) return du;
        return combcalc::apply(e.function().derivative(), e.child(0)) * du;
    }
    }
    return Expr::constant(0.0);
}

Expr substitute(const Expr& e, const std::function<Expr(const CoordLabel&)>& replacement) {
    switch (e.kind()) {
    case ExprKind::Constant: return e;
    case ExprKind::Variable: return replacement(e.label());
    case ExprKind::Neg: return -substitute(e.child(0), replacement);
    case ExprKind::Add: return substitute(e.child(0), replacement) + substitute(e.child(1), replacement);
    case ExprKind::Sub: return substitute(e.child(0), replacement) - substitute(e.child(1), replacement);
    case ExprKind::Mul: return substitute(e.child(0), replacement) * substitute(e.child(1), replacement);
    case ExprKind::Div: return substitute(e.child(0), replacement) / substitute(e.child(1), replacement);
    case ExprKind::Pow: return pow(substitute(e.child(0), replacement), e.exponent());
    case ExprKind::Sin: return sin(substitute(e.child(0), replacement));
    case ExprKind::Cos: return cos(substitute(e.child(0), replacement));
    case ExprKind::Exp: return exp(substitute(e.child(0), replacement));
    case ExprKind::Apply: return combcalc::apply(e.function_ptr(), substitute(e.child(0), replacement));
    }
    return e;
}

// Compiled evaluation.

CompiledExpr::CompiledExpr(const Expr& e, const CombSpace& space) { emit(e, space, 1); }

void CompiledExpr::emit(const Expr& e, const CombSpace& space, int depth) {
    max_depth_ = std::max(max_depth_, depth);
    switch (e.kind()) {
    case ExprKind::Constant: code_.push_back({Op::Const, e.constant_value()}); return;
    case ExprKind::Variable: code_.push_back({Op::Var, 0.0, space.index_of(e.label())}); return;
    case ExprKind::Add:
    case ExprKind::Sub:
    case ExprKind::Mul:
    case ExprKind::Div: {
        emit(e.child(0), space, depth);
        emit(e.child(1), space, depth + 1);
        static constexpr Op ops[] = {Op::Add, Op::Sub, Op::Mul, Op::Div};
        code_.push_back({ops[static_cast<int>(e.kind()) - static_cast<int>(ExprKind::Add)]});
        return;
    }
    default: break;
    }
    emit(e.child(0), space, depth);
    switch (e.kind()) {
    case ExprKind::Neg: code_.push_back({Op::Neg}); break;
    case ExprKind::Pow: code_.push_back({Op::Pow, 0.0, e.exponent()}); break;
    case ExprKind::Sin: code_.push_back({Op::Sin}); break;
    case ExprKind::Cos: code_.push_back({Op::Cos}); break;
    case ExprKind::Exp: code_.push_back({Op::Exp}); break;
    case ExprKind::Apply:
        keep_alive_.push_back(e.function_ptr());
        code_.push_back({Op::Apply, 0.0, 0, e.function_ptr().get()});
        break;
    default: break;
    }
}

double CompiledExpr::operator()(std::span<const double> coords) const {
    std::array<double, 64> small{};
    std::vector<double> large;
    double* stack = small.data();
    if (max_depth_ > static_cast<int>(small.size())) {
        large.resize(static_cast<std::size_t>(max_depth_));
        stack = large.data();
    }
    int top = -1;
    for (const Instr& in : code_) {
        switch (in.op) {
        case Op::Const: stack[++top] = in.value; break;
        case Op::Var: stack[++top] = coords[static_cast<std::size_t>(in.index)]; break;
        case Op::Neg: stack[top] = -stack[top]; break;
        case Op::Add: --top; stack[top] += stack[top + 1]; break;
        case Op::Sub: --top; stack[top] -= stack[top + 1]; break;
        case Op::Mul: --top; stack[top] *= stack[top + 1]; break;
        case Op::Div:
            --top;
            if (stack[top + 1] == 0.0) throw EvalError("division by zero");
            stack[top] /= stack[top + 1];
            break;
        case Op::Pow: stack[top] = int_pow(stack[top], in.index); break;
        case Op::Sin: stack[top] = std::sin(stack[top]); break;
        case Op::Cos: stack[top] = std::cos(stack[top]); break;
        case Op::Exp: stack[top] = std::exp(stack[top]); break;
        case Op::Apply: stack[top] = (*in.fn)(stack[top]); break;
        }
    }
    return stack[0];
}

} // namespace combcalc
