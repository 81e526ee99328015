#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ow/errors.hpp"

namespace ow {

enum class ExprKind : std::uint8_t {
    Number,
    Variable,
    Negate,
    Add,
    Sub,
    Mul,
    Div,
    Pow,
    Call,
};

enum class FuncId : std::uint8_t { Sin, Cos, Exp, Log, Abs, Sqrt };

const char* func_name(FuncId f);

// One immutable AST node. Subtrees are shared freely between expressions
// (differentiation reuses operands of the input), so nodes are never mutated
// after construction.
struct ExprNode {
    using Ptr = std::shared_ptr<const ExprNode>;

    ExprKind kind;
    double number = 0.0;      // Number
    int var = -1;             // Variable: index into the declared variable list
    FuncId func = FuncId::Sin; // Call
    Ptr lhs, rhs;             // Negate/Call use lhs only
    std::uint32_t offset = 0; // byte offset into the original source
};

struct EvalTape; // flat postfix program, built once per expression

// A parsed scalar expression over a fixed, ordered set of variables.
// Evaluation and differentiation are pure; instances are safe to share
// across threads.
class Expression {
public:
    // Grammar:
    //   expr   := term (("+"|"-") term)*
    //   term   := factor (("*"|"/") factor)*
    //   factor := ("-")? power
    //   power  := atom ("^" factor)?
    //   atom   := number | ident | ident "(" expr ")" | "(" expr ")"
    // Identifiers are ASCII letters; they must name a declared variable or a
    // catalog function (sin, cos, exp, log, abs, sqrt). Throws ParseError.
    static Expression parse(std::string_view source, const std::vector<std::string>& variables);

    // values[i] binds variables()[i]. Throws EvalDomainError on non-finite
    // intermediate results.
    double eval(std::span<const double> values) const;

    // Exact partial derivative with respect to a declared variable.
    // Constant subtrees of the result are folded. Throws UnsupportedNodeError
    // if the tree contains abs, PreconditionError for ^ with an exponent that
    // is not a nonnegative integer constant.
    Expression diff(std::string_view variable) const;

    // Re-parseable text form; minimal parentheses, numbers at full precision.
    std::string to_string() const;

    const std::vector<std::string>& variables() const { return *vars_; }

    // True if any node is an abs() application (symbolic diff unavailable).
    bool uses_abs() const;

    const ExprNode::Ptr& root() const { return root_; }

    Expression(ExprNode::Ptr root, std::shared_ptr<const std::vector<std::string>> vars);

private:
    ExprNode::Ptr root_;
    std::shared_ptr<const std::vector<std::string>> vars_;
    std::shared_ptr<const EvalTape> tape_;
};

} // namespace ow
