#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

// A tiny expression language over doubles for user-supplied scalar functions
// (weights z(t), right-hand sides f(t, y), integrands h(s)).
//
// Grammar (EBNF):
//   expr    := term { ("+" | "-") term }
//   term    := unary { ("*" | "/") unary }
//   unary   := "-" unary | power
//   power   := primary [ "^" unary ]          (right-associative)
//   primary := number | variable | function "(" expr { "," expr } ")" | "(" expr ")"
//
// Variables are drawn from {t, s, y} and must be declared in the signature.
// Functions: sqrt, exp, ln, sin, cos, abs, pow, gamma.

namespace tsfrac {

enum class BinaryOp { add, sub, mul, div, pow };
enum class Builtin { sqrt_fn, exp_fn, ln_fn, sin_fn, cos_fn, abs_fn, pow_fn, gamma_fn };

struct Ast;
using AstPtr = std::shared_ptr<const Ast>;

struct Ast {
    struct Constant {
        double value; // always non-negative as parsed; minus signs become Negate
    };
    struct Variable {
        int index;
        std::string name;
    };
    struct Negate {
        AstPtr operand;
    };
    struct Binary {
        BinaryOp op;
        AstPtr lhs;
        AstPtr rhs;
    };
    struct Call {
        Builtin fn;
        std::vector<AstPtr> args;
    };
    std::variant<Constant, Variable, Negate, Binary, Call> node;
};

bool ast_equal(const Ast& a, const Ast& b);
std::string ast_to_string(const Ast& a);

/// A parsed, compiled expression with a fixed variable signature.
/// Evaluation is pure: same arguments, same bits.
class ExprFn {
public:
    /// Parses `source` against `signature` (an ordered subset of {t, s, y}).
    /// Throws SyntaxError / UnknownIdentifier / ArityMismatch / UndeclaredVariable.
    static ExprFn parse(std::string_view source, const std::vector<std::string>& signature);

    static ExprFn constant(double v);

    /// The weight "t" with signature {t}; the identity map used by the
    /// classical (unweighted) fractional operators.
    static ExprFn identity();

    ExprFn(); // the constant 0 with empty signature

    double eval(std::span<const double> args) const;
    double operator()(double a) const;
    double operator()(double a, double b) const;

    std::size_t arity() const { return signature_.size(); }
    const std::vector<std::string>& signature() const { return signature_; }
    const Ast& ast() const { return *root_; }
    const std::string& source() const { return source_; }

    /// Canonical text form; reparsing it yields a structurally identical AST.
    std::string pretty() const;

private:
    struct Instr;
    ExprFn(AstPtr root, std::vector<std::string> signature, std::string source);
    void compile();

    AstPtr root_;
    std::vector<std::string> signature_;
    std::string source_;
    std::vector<Instr> program_;
    std::size_t stack_need_ = 0;

    struct Instr {
        enum class Op {
            push_const,
            push_var,
            neg,
            add,
            sub,
            mul,
            div,
            pow,
            sqrt_c,
            exp_c,
            ln_c,
            sin_c,
            cos_c,
            abs_c,
            gamma_c,
        } op;
        double value = 0.0;
        int var = 0;
        const Ast* origin = nullptr; // for DomainError reporting
    };
};

} // namespace tsfrac
