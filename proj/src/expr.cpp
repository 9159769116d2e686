#include "tsfrac/expr.hpp"
#include "tsfrac/errors.hpp"
#include "tsfrac/gamma.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>

namespace tsfrac {
namespace {

struct Token {
    enum class Kind { number, ident, plus, minus, star, slash, caret, lparen, rparen, comma, end };
    Kind kind;
    std::size_t pos;
    std::string text;
    double value = 0.0;
};

std::vector<Token> tokenize(std::string_view src)
{
    std::vector<Token> out;
    std::size_t i = 0;
    const std::size_t n = src.size();
    while (i < n) {
        const char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        const std::size_t start = i;
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '.' && i + 1 < n && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
            while (i < n && std::isdigit(static_cast<unsigned char>(src[i])))
                ++i;
            if (i < n && src[i] == '.') {
                ++i;
                while (i < n && std::isdigit(static_cast<unsigned char>(src[i])))
                    ++i;
            }
            if (i < n && (src[i] == 'e' || src[i] == 'E')) {
                std::size_t j = i + 1;
                if (j < n && (src[j] == '+' || src[j] == '-'))
                    ++j;
                if (j >= n || !std::isdigit(static_cast<unsigned char>(src[j])))
                    throw SyntaxError(i, "malformed exponent in number literal");
                i = j;
                while (i < n && std::isdigit(static_cast<unsigned char>(src[i])))
                    ++i;
            }
            const std::string text(src.substr(start, i - start));
            out.push_back({Token::Kind::number, start, text, std::stod(text)});
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            while (i < n && (std::isalnum(static_cast<unsigned char>(src[i])) || src[i] == '_'))
                ++i;
            out.push_back({Token::Kind::ident, start, std::string(src.substr(start, i - start))});
            continue;
        }
        Token::Kind k;
        switch (c) {
        case '+': k = Token::Kind::plus; break;
        case '-': k = Token::Kind::minus; break;
        case '*': k = Token::Kind::star; break;
        case '/': k = Token::Kind::slash; break;
        case '^': k = Token::Kind::caret; break;
        case '(': k = Token::Kind::lparen; break;
        case ')': k = Token::Kind::rparen; break;
        case ',': k = Token::Kind::comma; break;
        default:
            throw SyntaxError(i, std::string("unexpected character '") + c + "'");
        }
        out.push_back({k, start, std::string(1, c)});
        ++i;
    }
    out.push_back({Token::Kind::end, n, ""});
    return out;
}

struct BuiltinInfo {
    Builtin fn;
    std::size_t arity;
};

const std::map<std::string, BuiltinInfo, std::less<>>& builtins()
{
    static const std::map<std::string, BuiltinInfo, std::less<>> table = {
        {"sqrt", {Builtin::sqrt_fn, 1}}, {"exp", {Builtin::exp_fn, 1}},
        {"ln", {Builtin::ln_fn, 1}},     {"sin", {Builtin::sin_fn, 1}},
        {"cos", {Builtin::cos_fn, 1}},   {"abs", {Builtin::abs_fn, 1}},
        {"pow", {Builtin::pow_fn, 2}},   {"gamma", {Builtin::gamma_fn, 1}},
    };
    return table;
}

bool is_allowed_variable(std::string_view name)
{
    return name == "t" || name == "s" || name == "y";
}

class Parser {
public:
    Parser(std::vector<Token> toks, const std::vector<std::string>& signature)
        : toks_(std::move(toks)), sig_(signature) {}

    AstPtr run()
    {
        AstPtr root = parse_expr();
        if (peek().kind != Token::Kind::end)
            throw SyntaxError(peek().pos, "unexpected token '" + peek().text + "'");
        return root;
    }

private:
    std::vector<Token> toks_;
    const std::vector<std::string>& sig_;
    std::size_t i_ = 0;

    const Token& peek() const { return toks_[i_]; }
    const Token& advance() { return toks_[i_++]; }
    bool accept(Token::Kind k)
    {
        if (peek().kind == k) {
            ++i_;
            return true;
        }
        return false;
    }
    void expect(Token::Kind k, const char* what)
    {
        if (!accept(k))
            throw SyntaxError(peek().pos, std::string("expected ") + what);
    }

    AstPtr parse_expr()
    {
        AstPtr lhs = parse_term();
        for (;;) {
            if (accept(Token::Kind::plus))
                lhs = std::make_shared<Ast>(Ast{Ast::Binary{BinaryOp::add, lhs, parse_term()}});
            else if (accept(Token::Kind::minus))
                lhs = std::make_shared<Ast>(Ast{Ast::Binary{BinaryOp::sub, lhs, parse_term()}});
            else
                return lhs;
        }
    }

    AstPtr parse_term()
    {
        AstPtr lhs = parse_unary();
        for (;;) {
            if (accept(Token::Kind::star))
                lhs = std::make_shared<Ast>(Ast{Ast::Binary{BinaryOp::mul, lhs, parse_unary()}});
            else if (accept(Token::Kind::slash))
                lhs = std::make_shared<Ast>(Ast{Ast::Binary{BinaryOp::div, lhs, parse_unary()}});
            else
                return lhs;
        }
    }

    AstPtr parse_unary()
    {
        if (accept(Token::Kind::minus))
            return std::make_shared<Ast>(Ast{Ast::Negate{parse_unary()}});
        return parse_power();
    }

    AstPtr parse_power()
    {
        AstPtr base = parse_primary();
        if (accept(Token::Kind::caret))
            return std::make_shared<Ast>(Ast{Ast::Binary{BinaryOp::pow, base, parse_unary()}});
        return base;
    }

    AstPtr parse_primary()
    {
        const Token& tok = peek();
        switch (tok.kind) {
        case Token::Kind::number:
            advance();
            return std::make_shared<Ast>(Ast{Ast::Constant{tok.value}});
        case Token::Kind::lparen: {
            advance();
            AstPtr inner = parse_expr();
            expect(Token::Kind::rparen, "')'");
            return inner;
        }
        case Token::Kind::ident:
            advance();
            return parse_ident(tok);
        default:
            throw SyntaxError(tok.pos, "expected an expression");
        }
    }

    AstPtr parse_ident(const Token& tok)
    {
        const auto& table = builtins();
        const auto it = table.find(tok.text);
        if (peek().kind == Token::Kind::lparen) {
            if (it == table.end())
                throw UnknownIdentifier(tok.text);
            advance();
            std::vector<AstPtr> args;
            if (peek().kind != Token::Kind::rparen) {
                args.push_back(parse_expr());
                while (accept(Token::Kind::comma))
                    args.push_back(parse_expr());
            }
            expect(Token::Kind::rparen, "')'");
            if (args.size() != it->second.arity)
                throw ArityMismatch(tok.text, it->second.arity, args.size());
            return std::make_shared<Ast>(Ast{Ast::Call{it->second.fn, std::move(args)}});
        }
        for (std::size_t k = 0; k < sig_.size(); ++k)
            if (sig_[k] == tok.text)
                return std::make_shared<Ast>(
                    Ast{Ast::Variable{static_cast<int>(k), tok.text}});
        if (is_allowed_variable(tok.text))
            throw UndeclaredVariable(tok.text);
        if (it != table.end())
            throw SyntaxError(peek().pos, "expected '(' after function name '" + tok.text + "'");
        throw UnknownIdentifier(tok.text);
    }
};

int precedence(const Ast& n)
{
    struct V {
        int operator()(const Ast::Constant&) const { return 100; }
        int operator()(const Ast::Variable&) const { return 100; }
        int operator()(const Ast::Call&) const { return 100; }
        int operator()(const Ast::Negate&) const { return 25; }
        int operator()(const Ast::Binary& b) const
        {
            switch (b.op) {
            case BinaryOp::pow: return 30;
            case BinaryOp::mul:
            case BinaryOp::div: return 20;
            default: return 10;
            }
        }
    };
    return std::visit(V{}, n.node);
}

const char* builtin_name(Builtin f)
{
    switch (f) {
    case Builtin::sqrt_fn: return "sqrt";
    case Builtin::exp_fn: return "exp";
    case Builtin::ln_fn: return "ln";
    case Builtin::sin_fn: return "sin";
    case Builtin::cos_fn: return "cos";
    case Builtin::abs_fn: return "abs";
    case Builtin::pow_fn: return "pow";
    case Builtin::gamma_fn: return "gamma";
    }
    return "?";
}

void print_node(const Ast& n, int min_prec, std::string& out)
{
    const bool parens = precedence(n) < min_prec;
    if (parens)
        out += '(';
    struct V {
        std::string& out;
        void operator()(const Ast::Constant& c) const
        {
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", c.value);
            out += buf;
        }
        void operator()(const Ast::Variable& v) const { out += v.name; }
        void operator()(const Ast::Negate& u) const
        {
            out += '-';
            print_node(*u.operand, 25, out);
        }
        void operator()(const Ast::Binary& b) const
        {
            int lmin = 10, rmin = 11;
            const char* sym = "+";
            switch (b.op) {
            case BinaryOp::add: break;
            case BinaryOp::sub: sym = "-"; break;
            case BinaryOp::mul: sym = "*"; lmin = 20; rmin = 21; break;
            case BinaryOp::div: sym = "/"; lmin = 20; rmin = 21; break;
            case BinaryOp::pow: sym = "^"; lmin = 31; rmin = 25; break;
            }
            print_node(*b.lhs, lmin, out);
            out += sym;
            print_node(*b.rhs, rmin, out);
        }
        void operator()(const Ast::Call& c) const
        {
            out += builtin_name(c.fn);
            out += '(';
            for (std::size_t k = 0; k < c.args.size(); ++k) {
                if (k)
                    out += ", ";
                print_node(*c.args[k], 0, out);
            }
            out += ')';
        }
    };
    std::visit(V{out}, n.node);
    if (parens)
        out += ')';
}

} // namespace

bool ast_equal(const Ast& a, const Ast& b)
{
    if (a.node.index() != b.node.index())
        return false;
    struct V {
        const Ast& b;
        bool operator()(const Ast::Constant& c) const
        {
            return c.value == std::get<Ast::Constant>(b.node).value;
        }
        bool operator()(const Ast::Variable& v) const
        {
            const auto& o = std::get<Ast::Variable>(b.node);
            return v.index == o.index && v.name == o.name;
        }
        bool operator()(const Ast::Negate& u) const
        {
            return ast_equal(*u.operand, *std::get<Ast::Negate>(b.node).operand);
        }
        bool operator()(const Ast::Binary& x) const
        {
            const auto& o = std::get<Ast::Binary>(b.node);
            return x.op == o.op && ast_equal(*x.lhs, *o.lhs) && ast_equal(*x.rhs, *o.rhs);
        }
        bool operator()(const Ast::Call& c) const
        {
            const auto& o = std::get<Ast::Call>(b.node);
            if (c.fn != o.fn || c.args.size() != o.args.size())
                return false;
            for (std::size_t k = 0; k < c.args.size(); ++k)
                if (!ast_equal(*c.args[k], *o.args[k]))
                    return false;
            return true;
        }
    };
    return std::visit(V{b}, a.node);
}

std::string ast_to_string(const Ast& a)
{
    std::string out;
    print_node(a, 0, out);
    return out;
}

ExprFn::ExprFn()
    : ExprFn(std::make_shared<Ast>(Ast{Ast::Constant{0.0}}), {}, "0") {}

ExprFn::ExprFn(AstPtr root, std::vector<std::string> signature, std::string source)
    : root_(std::move(root)), signature_(std::move(signature)), source_(std::move(source))
{
    compile();
}

ExprFn ExprFn::parse(std::string_view source, const std::vector<std::string>& signature)
{
    for (std::size_t k = 0; k < signature.size(); ++k) {
        if (!is_allowed_variable(signature[k]))
            throw Error("expr", "signature variable '" + signature[k] +
                                    "' is not one of t, s, y");
        for (std::size_t j = 0; j < k; ++j)
            if (signature[j] == signature[k])
                throw Error("expr", "duplicate signature variable '" + signature[k] + "'");
    }
    Parser p(tokenize(source), signature);
    return ExprFn(p.run(), signature, std::string(source));
}

ExprFn ExprFn::constant(double v)
{
    AstPtr node = std::make_shared<Ast>(Ast{Ast::Constant{std::abs(v)}});
    if (std::signbit(v))
        node = std::make_shared<Ast>(Ast{Ast::Negate{node}});
    ExprFn fn(node, {}, "");
    fn.source_ = fn.pretty();
    return fn;
}

ExprFn ExprFn::identity()
{
    return parse("t", {"t"});
}

void ExprFn::compile()
{
    program_.clear();
    std::size_t depth = 0, peak = 0;
    const auto push = [&](Instr ins) {
        program_.push_back(ins);
    };
    const auto walk = [&](auto&& self, const Ast& n) -> void {
        struct V {
            decltype(self)& rec;
            const Ast& n;
            std::vector<Instr>& prog;
            std::size_t& depth;
            std::size_t& peak;
            void grow()
            {
                if (++depth > peak)
                    peak = depth;
            }
            void operator()(const Ast::Constant& c)
            {
                prog.push_back({Instr::Op::push_const, c.value, 0, &n});
                grow();
            }
            void operator()(const Ast::Variable& v)
            {
                prog.push_back({Instr::Op::push_var, 0.0, v.index, &n});
                grow();
            }
            void operator()(const Ast::Negate& u)
            {
                rec(rec, *u.operand);
                prog.push_back({Instr::Op::neg, 0.0, 0, &n});
            }
            void operator()(const Ast::Binary& b)
            {
                rec(rec, *b.lhs);
                rec(rec, *b.rhs);
                Instr::Op op = Instr::Op::add;
                switch (b.op) {
                case BinaryOp::add: op = Instr::Op::add; break;
                case BinaryOp::sub: op = Instr::Op::sub; break;
                case BinaryOp::mul: op = Instr::Op::mul; break;
                case BinaryOp::div: op = Instr::Op::div; break;
                case BinaryOp::pow: op = Instr::Op::pow; break;
                }
                prog.push_back({op, 0.0, 0, &n});
                --depth;
            }
            void operator()(const Ast::Call& c)
            {
                for (const auto& a : c.args)
                    rec(rec, *a);
                Instr::Op op = Instr::Op::sqrt_c;
                switch (c.fn) {
                case Builtin::sqrt_fn: op = Instr::Op::sqrt_c; break;
                case Builtin::exp_fn: op = Instr::Op::exp_c; break;
                case Builtin::ln_fn: op = Instr::Op::ln_c; break;
                case Builtin::sin_fn: op = Instr::Op::sin_c; break;
                case Builtin::cos_fn: op = Instr::Op::cos_c; break;
                case Builtin::abs_fn: op = Instr::Op::abs_c; break;
                case Builtin::pow_fn: op = Instr::Op::pow; break;
                case Builtin::gamma_fn: op = Instr::Op::gamma_c; break;
                }
                prog.push_back({op, 0.0, 0, &n});
                if (c.fn == Builtin::pow_fn)
                    --depth;
            }
        };
        V v{self, n, program_, depth, peak};
        std::visit(v, n.node);
    };
    (void)push;
    walk(walk, *root_);
    stack_need_ = peak;
}

double ExprFn::eval(std::span<const double> args) const
{
    if (args.size() != signature_.size())
        throw ArityMismatch("<eval>", signature_.size(), args.size());
    std::array<double, 32> buf{};
    std::vector<double> heap;
    double* st = buf.data();
    if (stack_need_ > buf.size()) {
        heap.resize(stack_need_);
        st = heap.data();
    }
    std::size_t sp = 0;
    for (const Instr& ins : program_) {
        switch (ins.op) {
        case Instr::Op::push_const:
            st[sp++] = ins.value;
            break;
        case Instr::Op::push_var:
            st[sp++] = args[static_cast<std::size_t>(ins.var)];
            break;
        case Instr::Op::neg:
            st[sp - 1] = -st[sp - 1];
            break;
        case Instr::Op::add:
            --sp;
            st[sp - 1] += st[sp];
            break;
        case Instr::Op::sub:
            --sp;
            st[sp - 1] -= st[sp];
            break;
        case Instr::Op::mul:
            --sp;
            st[sp - 1] *= st[sp];
            break;
        case Instr::Op::div:
            --sp;
            st[sp - 1] /= st[sp];
            break;
        case Instr::Op::pow: {
            --sp;
            const double e = st[sp];
            const double b = st[sp - 1];
            if (b < 0.0 && e != std::nearbyint(e))
                throw DomainError("negative base raised to a non-integer power",
                                  ast_to_string(*ins.origin));
            st[sp - 1] = std::pow(b, e);
            break;
        }
        case Instr::Op::sqrt_c:
            if (st[sp - 1] < 0.0)
                throw DomainError("sqrt of a negative value", ast_to_string(*ins.origin));
            st[sp - 1] = std::sqrt(st[sp - 1]);
            break;
        case Instr::Op::exp_c:
            st[sp - 1] = std::exp(st[sp - 1]);
            break;
        case Instr::Op::ln_c:
            if (st[sp - 1] <= 0.0)
                throw DomainError("ln of a non-positive value", ast_to_string(*ins.origin));
            st[sp - 1] = std::log(st[sp - 1]);
            break;
        case Instr::Op::sin_c:
            st[sp - 1] = std::sin(st[sp - 1]);
            break;
        case Instr::Op::cos_c:
            st[sp - 1] = std::cos(st[sp - 1]);
            break;
        case Instr::Op::abs_c:
            st[sp - 1] = std::abs(st[sp - 1]);
            break;
        case Instr::Op::gamma_c:
            st[sp - 1] = gamma_fn(st[sp - 1]);
            break;
        }
    }
    return st[0];
}

double ExprFn::operator()(double a) const
{
    const double args[1] = {a};
    return eval(args);
}

double ExprFn::operator()(double a, double b) const
{
    const double args[2] = {a, b};
    return eval(args);
}

std::string ExprFn::pretty() const
{
    return ast_to_string(*root_);
}

} // namespace tsfrac
