#include "ow/expr.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <utility>

namespace ow {

const char* func_name(FuncId f) {
    switch (f) {
    case FuncId::Sin: return "sin";
    case FuncId::Cos: return "cos";
    case FuncId::Exp: return "exp";
    case FuncId::Log: return "log";
    case FuncId::Abs: return "abs";
    case FuncId::Sqrt: return "sqrt";
    }
    return "?";
}

namespace {

using Ptr = ExprNode::Ptr;

Ptr make_number(double v, std::uint32_t off = 0) {
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprKind::Number;
    n->number = v;
    n->offset = off;
    return n;
}

Ptr make_variable(int idx, std::uint32_t off = 0) {
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprKind::Variable;
    n->var = idx;
    n->offset = off;
    return n;
}

Ptr make_node(ExprKind k, Ptr a, Ptr b, std::uint32_t off = 0) {
    auto n = std::make_shared<ExprNode>();
    n->kind = k;
    n->lhs = std::move(a);
    n->rhs = std::move(b);
    n->offset = off;
    return n;
}

Ptr make_call(FuncId f, Ptr arg, std::uint32_t off = 0) {
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprKind::Call;
    n->func = f;
    n->lhs = std::move(arg);
    n->offset = off;
    return n;
}

// ---------------------------------------------------------------------------
// Lexer

enum class Tok : std::uint8_t { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };

struct Token {
    Tok kind;
    std::size_t offset;
    std::string text;
    double number = 0.0;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    Token next() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_])))
            ++pos_;
        std::size_t start = pos_;
        if (pos_ >= src_.size()) return {Tok::End, start, ""};

        char c = src_[pos_];
        switch (c) {
        case '+': ++pos_; return {Tok::Plus, start, "+"};
        case '-': ++pos_; return {Tok::Minus, start, "-"};
        case '*': ++pos_; return {Tok::Star, start, "*"};
        case '/': ++pos_; return {Tok::Slash, start, "/"};
        case '^': ++pos_; return {Tok::Caret, start, "^"};
        case '(': ++pos_; return {Tok::LParen, start, "("};
        case ')': ++pos_; return {Tok::RParen, start, ")"};
        default: break;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return lex_number(start);
        if (std::isalpha(static_cast<unsigned char>(c))) {
            while (pos_ < src_.size() && std::isalpha(static_cast<unsigned char>(src_[pos_])))
                ++pos_;
            return {Tok::Ident, start, std::string(src_.substr(start, pos_ - start))};
        }
        throw ParseError("unexpected character", start, std::string(1, c));
    }

private:
    Token lex_number(std::size_t start) {
        bool any_digit = false;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
            ++pos_;
            any_digit = true;
        }
        if (pos_ < src_.size() && src_[pos_] == '.') {
            ++pos_;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                ++pos_;
                any_digit = true;
            }
        }
        if (!any_digit)
            throw ParseError("malformed number", start, std::string(src_.substr(start, pos_ - start)));
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t mark = pos_;
            ++pos_;
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
            if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
                    ++pos_;
            } else {
                pos_ = mark; // "2e" is the number 2 followed by identifier e
            }
        }
        std::string text(src_.substr(start, pos_ - start));
        double value = std::strtod(text.c_str(), nullptr);
        Token t{Tok::Number, start, text};
        t.number = value;
        return t;
    }

    std::string_view src_;
    std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Parser

class Parser {
public:
    Parser(std::string_view src, const std::vector<std::string>& vars)
        : lexer_(src), vars_(vars) {
        advance();
    }

    Ptr parse() {
        Ptr e = parse_expr();
        if (tok_.kind != Tok::End)
            throw ParseError("trailing tokens after expression", tok_.offset, tok_.text);
        return e;
    }

private:
    void advance() { tok_ = lexer_.next(); }

    bool accept(Tok k) {
        if (tok_.kind != k) return false;
        advance();
        return true;
    }

    Ptr parse_expr() {
        Ptr e = parse_term();
        for (;;) {
            std::size_t off = tok_.offset;
            if (accept(Tok::Plus)) {
                e = make_node(ExprKind::Add, e, parse_term(), static_cast<std::uint32_t>(off));
            } else if (accept(Tok::Minus)) {
                e = make_node(ExprKind::Sub, e, parse_term(), static_cast<std::uint32_t>(off));
            } else {
                return e;
            }
        }
    }

    Ptr parse_term() {
        Ptr e = parse_factor();
        for (;;) {
            std::size_t off = tok_.offset;
            if (accept(Tok::Star)) {
                e = make_node(ExprKind::Mul, e, parse_factor(), static_cast<std::uint32_t>(off));
            } else if (accept(Tok::Slash)) {
                e = make_node(ExprKind::Div, e, parse_factor(), static_cast<std::uint32_t>(off));
            } else {
                return e;
            }
        }
    }

    Ptr parse_factor() {
        std::size_t off = tok_.offset;
        if (accept(Tok::Minus))
            return make_node(ExprKind::Negate, parse_power(), nullptr, static_cast<std::uint32_t>(off));
        return parse_power();
    }

    Ptr parse_power() {
        Ptr base = parse_atom();
        std::size_t off = tok_.offset;
        if (accept(Tok::Caret)) // right-associative: exponent is a factor
            return make_node(ExprKind::Pow, base, parse_factor(), static_cast<std::uint32_t>(off));
        return base;
    }

    Ptr parse_atom() {
        Token t = tok_;
        switch (t.kind) {
        case Tok::Number:
            advance();
            return make_number(t.number, static_cast<std::uint32_t>(t.offset));
        case Tok::Ident: {
            advance();
            if (accept(Tok::LParen)) {
                FuncId f = lookup_function(t);
                Ptr arg = parse_expr();
                if (!accept(Tok::RParen))
                    throw ParseError("expected ')'", tok_.offset, tok_.text);
                return make_call(f, std::move(arg), static_cast<std::uint32_t>(t.offset));
            }
            return make_variable(lookup_variable(t), static_cast<std::uint32_t>(t.offset));
        }
        case Tok::LParen: {
            advance();
            Ptr e = parse_expr();
            if (!accept(Tok::RParen))
                throw ParseError("expected ')'", tok_.offset, tok_.text);
            return e;
        }
        case Tok::End:
            throw ParseError("unexpected end of input", t.offset, "");
        default:
            throw ParseError("expected number, identifier or '('", t.offset, t.text);
        }
    }

    FuncId lookup_function(const Token& t) const {
        static constexpr std::array<std::pair<std::string_view, FuncId>, 6> table{{
            {"sin", FuncId::Sin},
            {"cos", FuncId::Cos},
            {"exp", FuncId::Exp},
            {"log", FuncId::Log},
            {"abs", FuncId::Abs},
            {"sqrt", FuncId::Sqrt},
        }};
        for (const auto& [name, id] : table)
            if (name == t.text) return id;
        throw ParseError("unknown function '" + t.text + "'", t.offset, t.text);
    }

    int lookup_variable(const Token& t) const {
        for (std::size_t i = 0; i < vars_.size(); ++i)
            if (vars_[i] == t.text) return static_cast<int>(i);
        throw ParseError("unknown identifier '" + t.text + "'", t.offset, t.text);
    }

    Lexer lexer_;
    Token tok_{Tok::End, 0, ""};
    const std::vector<std::string>& vars_;
};

// ---------------------------------------------------------------------------
// Evaluation

double check_finite(double v, const ExprNode& n, const char* what) {
    if (!std::isfinite(v))
        throw EvalDomainError(std::string("non-finite result of ") + what, n.offset);
    return v;
}

double eval_node(const ExprNode& n, std::span<const double> values) {
    switch (n.kind) {
    case ExprKind::Number:
        return n.number;
    case ExprKind::Variable:
        return values[static_cast<std::size_t>(n.var)];
    case ExprKind::Negate:
        return -eval_node(*n.lhs, values);
    case ExprKind::Add:
        return check_finite(eval_node(*n.lhs, values) + eval_node(*n.rhs, values), n, "+");
    case ExprKind::Sub:
        return check_finite(eval_node(*n.lhs, values) - eval_node(*n.rhs, values), n, "-");
    case ExprKind::Mul:
        return check_finite(eval_node(*n.lhs, values) * eval_node(*n.rhs, values), n, "*");
    case ExprKind::Div: {
        double num = eval_node(*n.lhs, values);
        double den = eval_node(*n.rhs, values);
        if (den == 0.0) throw EvalDomainError("division by zero", n.offset);
        return check_finite(num / den, n, "/");
    }
    case ExprKind::Pow:
        return check_finite(std::pow(eval_node(*n.lhs, values), eval_node(*n.rhs, values)), n, "^");
    case ExprKind::Call: {
        double a = eval_node(*n.lhs, values);
        switch (n.func) {
        case FuncId::Sin: return std::sin(a);
        case FuncId::Cos: return std::cos(a);
        case FuncId::Exp: return check_finite(std::exp(a), n, "exp");
        case FuncId::Log:
            if (a <= 0.0) throw EvalDomainError("log of non-positive value", n.offset);
            return std::log(a);
        case FuncId::Abs: return std::fabs(a);
        case FuncId::Sqrt:
            if (a < 0.0) throw EvalDomainError("sqrt of negative value", n.offset);
            return std::sqrt(a);
        }
        throw EvalDomainError("unknown function", n.offset);
    }
    }
    throw EvalDomainError("corrupt expression node", n.offset);
}

// ---------------------------------------------------------------------------
// Differentiation with constant folding (folding only, no algebraic
// rewriting: equality of derivatives is established numerically in tests).

bool is_number(const Ptr& p) { return p && p->kind == ExprKind::Number; }

Ptr fold(Ptr n) {
    if (n->kind == ExprKind::Number || n->kind == ExprKind::Variable) return n;
    bool children_const = is_number(n->lhs) && (!n->rhs || is_number(n->rhs));
    if (!children_const) return n;
    try {
        double v = eval_node(*n, {});
        return make_number(v, n->offset);
    } catch (const EvalDomainError&) {
        return n; // leave 1/0 and friends to fail at evaluation time
    }
}

Ptr folded(ExprKind k, Ptr a, Ptr b, std::uint32_t off = 0) {
    return fold(make_node(k, std::move(a), std::move(b), off));
}

Ptr folded_call(FuncId f, Ptr arg, std::uint32_t off = 0) {
    return fold(make_call(f, std::move(arg), off));
}

Ptr diff_node(const Ptr& n, int var) {
    switch (n->kind) {
    case ExprKind::Number:
        return make_number(0.0);
    case ExprKind::Variable:
        return make_number(n->var == var ? 1.0 : 0.0);
    case ExprKind::Negate:
        return folded(ExprKind::Negate, diff_node(n->lhs, var), nullptr, n->offset);
    case ExprKind::Add:
        return folded(ExprKind::Add, diff_node(n->lhs, var), diff_node(n->rhs, var), n->offset);
    case ExprKind::Sub:
        return folded(ExprKind::Sub, diff_node(n->lhs, var), diff_node(n->rhs, var), n->offset);
    case ExprKind::Mul:
        // (uv)' = u'v + uv'
        return folded(ExprKind::Add,
                      folded(ExprKind::Mul, diff_node(n->lhs, var), n->rhs),
                      folded(ExprKind::Mul, n->lhs, diff_node(n->rhs, var)), n->offset);
    case ExprKind::Div:
        // (u/v)' = (u'v - uv') / v^2
        return folded(ExprKind::Div,
                      folded(ExprKind::Sub,
                             folded(ExprKind::Mul, diff_node(n->lhs, var), n->rhs),
                             folded(ExprKind::Mul, n->lhs, diff_node(n->rhs, var))),
                      folded(ExprKind::Pow, n->rhs, make_number(2.0)), n->offset);
    case ExprKind::Pow: {
        if (!is_number(n->rhs))
            throw PreconditionError("symbolic differentiation requires constant exponents");
        double e = n->rhs->number;
        if (e != std::floor(e) || e < 0.0)
            throw PreconditionError(
                "symbolic differentiation requires nonnegative integer exponents");
        if (e == 0.0) return make_number(0.0);
        // (u^n)' = n u^(n-1) u'
        return folded(ExprKind::Mul,
                      folded(ExprKind::Mul, make_number(e),
                             folded(ExprKind::Pow, n->lhs, make_number(e - 1.0))),
                      diff_node(n->lhs, var), n->offset);
    }
    case ExprKind::Call: {
        Ptr inner = diff_node(n->lhs, var);
        Ptr outer;
        switch (n->func) {
        case FuncId::Sin:
            outer = folded_call(FuncId::Cos, n->lhs, n->offset);
            break;
        case FuncId::Cos:
            outer = folded(ExprKind::Negate, folded_call(FuncId::Sin, n->lhs, n->offset), nullptr);
            break;
        case FuncId::Exp:
            outer = folded_call(FuncId::Exp, n->lhs, n->offset);
            break;
        case FuncId::Log:
            outer = folded(ExprKind::Div, make_number(1.0), n->lhs);
            break;
        case FuncId::Sqrt:
            outer = folded(ExprKind::Div, make_number(1.0),
                           folded(ExprKind::Mul, make_number(2.0),
                                  folded_call(FuncId::Sqrt, n->lhs, n->offset)));
            break;
        case FuncId::Abs:
            throw UnsupportedNodeError("abs is not symbolically differentiable", n->offset);
        }
        return folded(ExprKind::Mul, std::move(outer), std::move(inner), n->offset);
    }
    }
    throw PreconditionError("corrupt expression node");
}

// ---------------------------------------------------------------------------
// Printing. Parenthesization keeps the re-parsed tree structurally identical:
// binary operands are wrapped whenever the grammar would rebind them.

int precedence(ExprKind k) {
    switch (k) {
    case ExprKind::Add:
    case ExprKind::Sub: return 1;
    case ExprKind::Mul:
    case ExprKind::Div: return 2;
    case ExprKind::Negate: return 3;
    case ExprKind::Pow: return 4;
    default: return 5; // atoms
    }
}

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void print_node(const ExprNode& n, const std::vector<std::string>& vars, std::string& out);

void print_child(const ExprNode& child, const std::vector<std::string>& vars, int min_prec,
                 std::string& out) {
    bool parens = precedence(child.kind) < min_prec ||
                  (child.kind == ExprKind::Number && child.number < 0.0 && min_prec > 1);
    if (parens) out += '(';
    print_node(child, vars, out);
    if (parens) out += ')';
}

void print_node(const ExprNode& n, const std::vector<std::string>& vars, std::string& out) {
    switch (n.kind) {
    case ExprKind::Number:
        out += format_number(n.number);
        return;
    case ExprKind::Variable:
        out += vars[static_cast<std::size_t>(n.var)];
        return;
    case ExprKind::Negate:
        out += '-';
        print_child(*n.lhs, vars, precedence(ExprKind::Pow), out);
        return;
    case ExprKind::Add:
        print_child(*n.lhs, vars, 1, out);
        out += '+';
        print_child(*n.rhs, vars, 2, out);
        return;
    case ExprKind::Sub:
        print_child(*n.lhs, vars, 1, out);
        out += '-';
        print_child(*n.rhs, vars, 2, out);
        return;
    case ExprKind::Mul:
        print_child(*n.lhs, vars, 2, out);
        out += '*';
        print_child(*n.rhs, vars, 3, out);
        return;
    case ExprKind::Div:
        print_child(*n.lhs, vars, 2, out);
        out += '/';
        print_child(*n.rhs, vars, 3, out);
        return;
    case ExprKind::Pow:
        print_child(*n.lhs, vars, 5, out); // base must be an atom
        out += '^';
        print_child(*n.rhs, vars, 3, out); // exponent is a factor
        return;
    case ExprKind::Call:
        out += func_name(n.func);
        out += '(';
        print_node(*n.lhs, vars, out);
        out += ')';
        return;
    }
}

bool node_uses_abs(const ExprNode& n) {
    if (n.kind == ExprKind::Call && n.func == FuncId::Abs) return true;
    if (n.lhs && node_uses_abs(*n.lhs)) return true;
    if (n.rhs && node_uses_abs(*n.rhs)) return true;
    return false;
}

} // namespace

// ---------------------------------------------------------------------------
// Evaluation tape: the AST flattened to postfix once per expression, so hot
// loops avoid pointer-chasing recursion. Small constant integer exponents run
// as repeated multiplication. Semantics (including domain-error offsets)
// match eval_node exactly.

struct EvalTape {
    struct Op {
        ExprKind kind;
        FuncId func;
        int var;   // Variable
        int ipow;  // Pow with constant exponent 0..16, else -1
        double number;
        std::uint32_t offset;
    };

    std::vector<Op> ops;
    int max_stack = 0;

    static constexpr int kStackLimit = 64;
};

namespace {

// Returns the stack height the subtree needs, appending its ops; the
// exponent of an integer-power node is folded into the Pow op itself.
int flatten_node(const ExprNode& n, std::vector<EvalTape::Op>& ops) {
    switch (n.kind) {
    case ExprKind::Number:
        ops.push_back({n.kind, n.func, -1, -1, n.number, n.offset});
        return 1;
    case ExprKind::Variable:
        ops.push_back({n.kind, n.func, n.var, -1, 0.0, n.offset});
        return 1;
    case ExprKind::Negate:
    case ExprKind::Call: {
        int d = flatten_node(*n.lhs, ops);
        ops.push_back({n.kind, n.func, -1, -1, 0.0, n.offset});
        return d;
    }
    case ExprKind::Pow:
        if (n.rhs->kind == ExprKind::Number) {
            double e = n.rhs->number;
            if (e == std::floor(e) && e >= 0.0 && e <= 16.0) {
                int d = flatten_node(*n.lhs, ops);
                ops.push_back({n.kind, n.func, -1, static_cast<int>(e), 0.0, n.offset});
                return d;
            }
        }
        [[fallthrough]];
    case ExprKind::Add:
    case ExprKind::Sub:
    case ExprKind::Mul:
    case ExprKind::Div: {
        int dl = flatten_node(*n.lhs, ops);
        int dr = flatten_node(*n.rhs, ops);
        ops.push_back({n.kind, n.func, -1, -1, 0.0, n.offset});
        return std::max(dl, dr + 1);
    }
    }
    return EvalTape::kStackLimit + 1; // corrupt node: force the recursive path
}

std::shared_ptr<const EvalTape> build_tape(const ExprNode& root) {
    auto tape = std::make_shared<EvalTape>();
    tape->max_stack = flatten_node(root, tape->ops);
    if (tape->max_stack > EvalTape::kStackLimit) return nullptr;
    return tape;
}

double pow_int(double base, int e) {
    double result = 1.0;
    double acc = base;
    for (; e > 0; e >>= 1) {
        if (e & 1) result *= acc;
        acc *= acc;
    }
    return result;
}

double run_tape(const EvalTape& tape, std::span<const double> values) {
    double stack[EvalTape::kStackLimit];
    int sp = 0;
    for (const EvalTape::Op& op : tape.ops) {
        switch (op.kind) {
        case ExprKind::Number:
            stack[sp++] = op.number;
            break;
        case ExprKind::Variable:
            stack[sp++] = values[static_cast<std::size_t>(op.var)];
            break;
        case ExprKind::Negate:
            stack[sp - 1] = -stack[sp - 1];
            break;
        case ExprKind::Add: {
            double v = stack[sp - 2] + stack[sp - 1];
            if (!std::isfinite(v)) throw EvalDomainError("non-finite result of +", op.offset);
            stack[--sp - 1] = v;
            break;
        }
        case ExprKind::Sub: {
            double v = stack[sp - 2] - stack[sp - 1];
            if (!std::isfinite(v)) throw EvalDomainError("non-finite result of -", op.offset);
            stack[--sp - 1] = v;
            break;
        }
        case ExprKind::Mul: {
            double v = stack[sp - 2] * stack[sp - 1];
            if (!std::isfinite(v)) throw EvalDomainError("non-finite result of *", op.offset);
            stack[--sp - 1] = v;
            break;
        }
        case ExprKind::Div: {
            if (stack[sp - 1] == 0.0) throw EvalDomainError("division by zero", op.offset);
            double v = stack[sp - 2] / stack[sp - 1];
            if (!std::isfinite(v)) throw EvalDomainError("non-finite result of /", op.offset);
            stack[--sp - 1] = v;
            break;
        }
        case ExprKind::Pow: {
            double v;
            if (op.ipow >= 0) {
                v = pow_int(stack[sp - 1], op.ipow);
            } else {
                v = std::pow(stack[sp - 2], stack[sp - 1]);
                --sp;
            }
            if (!std::isfinite(v)) throw EvalDomainError("non-finite result of ^", op.offset);
            stack[sp - 1] = v;
            break;
        }
        case ExprKind::Call: {
            double a = stack[sp - 1];
            double v = 0.0;
            switch (op.func) {
            case FuncId::Sin: v = std::sin(a); break;
            case FuncId::Cos: v = std::cos(a); break;
            case FuncId::Exp:
                v = std::exp(a);
                if (!std::isfinite(v)) throw EvalDomainError("non-finite result of exp", op.offset);
                break;
            case FuncId::Log:
                if (a <= 0.0) throw EvalDomainError("log of non-positive value", op.offset);
                v = std::log(a);
                break;
            case FuncId::Abs: v = std::fabs(a); break;
            case FuncId::Sqrt:
                if (a < 0.0) throw EvalDomainError("sqrt of negative value", op.offset);
                v = std::sqrt(a);
                break;
            }
            stack[sp - 1] = v;
            break;
        }
        }
    }
    return stack[0];
}

} // namespace

Expression::Expression(ExprNode::Ptr root, std::shared_ptr<const std::vector<std::string>> vars)
    : root_(std::move(root)), vars_(std::move(vars)), tape_(build_tape(*root_)) {}

Expression Expression::parse(std::string_view source, const std::vector<std::string>& variables) {
    if (variables.empty()) throw PreconditionError("variable set must be nonempty");
    if (source.empty()) throw ParseError("empty input", 0, "");
    Parser parser(source, variables);
    return Expression(parser.parse(), std::make_shared<const std::vector<std::string>>(variables));
}

double Expression::eval(std::span<const double> values) const {
    if (values.size() < vars_->size())
        throw PreconditionError("bindings must cover all declared variables");
    if (tape_) return run_tape(*tape_, values);
    return eval_node(*root_, values);
}

Expression Expression::diff(std::string_view variable) const {
    int idx = -1;
    for (std::size_t i = 0; i < vars_->size(); ++i)
        if ((*vars_)[i] == variable) idx = static_cast<int>(i);
    if (idx < 0) throw PreconditionError("cannot differentiate by undeclared variable");
    return Expression(diff_node(root_, idx), vars_);
}

std::string Expression::to_string() const {
    std::string out;
    print_node(*root_, *vars_, out);
    return out;
}

bool Expression::uses_abs() const { return node_uses_abs(*root_); }

} // namespace ow
