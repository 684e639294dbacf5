#include "lagsym/parser.hpp"

#include "lagsym/errors.hpp"

#include <cctype>
#include <cstdlib>
#include <optional>

namespace lagsym {

namespace {

enum class Tok {
    Number, Name,
    LParen, RParen, LBracket, RBracket,
    Comma, Semicolon, Equals, DotDot,
    Plus, Minus, Star, Slash, Caret,
    End,
};

struct Token {
    Tok kind = Tok::End;
    std::string text;
    Real number = 0.0;
    bool integral = false; // numeric literal without '.' or exponent
    int line = 1;
    int col = 1;
};

class Lexer {
public:
    explicit Lexer(const std::string& text) : s_(text) { advance(); }

    const Token& peek() const { return cur_; }

    Token next() {
        Token t = cur_;
        advance();
        return t;
    }

private:
    void advance() {
        skip_ws();
        cur_ = Token{};
        cur_.line = line_;
        cur_.col = col_;
        if (pos_ >= s_.size()) { cur_.kind = Tok::End; return; }
        char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '.' && pos_ + 1 < s_.size() &&
             std::isdigit(static_cast<unsigned char>(s_[pos_ + 1])))) {
            lex_number();
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < s_.size() &&
                   (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
                take();
            cur_.kind = Tok::Name;
            cur_.text = s_.substr(start, pos_ - start);
            return;
        }
        if (c == '.' && pos_ + 1 < s_.size() && s_[pos_ + 1] == '.') {
            take(); take();
            cur_.kind = Tok::DotDot;
            return;
        }
        take();
        switch (c) {
            case '(': cur_.kind = Tok::LParen; return;
            case ')': cur_.kind = Tok::RParen; return;
            case '[': cur_.kind = Tok::LBracket; return;
            case ']': cur_.kind = Tok::RBracket; return;
            case ',': cur_.kind = Tok::Comma; return;
            case ';': cur_.kind = Tok::Semicolon; return;
            case '=': cur_.kind = Tok::Equals; return;
            case '+': cur_.kind = Tok::Plus; return;
            case '-': cur_.kind = Tok::Minus; return;
            case '*': cur_.kind = Tok::Star; return;
            case '/': cur_.kind = Tok::Slash; return;
            case '^': cur_.kind = Tok::Caret; return;
            default:
                throw ParseError(cur_.line, cur_.col,
                                 std::string("unexpected character '") + c + "'");
        }
    }

    void lex_number() {
        std::size_t start = pos_;
        bool integral = true;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) take();
        // A '.' followed by another '.' is a range operator, not a decimal point.
        if (pos_ + 1 < s_.size() && s_[pos_] == '.' && s_[pos_ + 1] != '.') {
            integral = false;
            take();
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) take();
        } else if (pos_ < s_.size() && s_[pos_] == '.' && pos_ + 1 >= s_.size()) {
            integral = false;
            take();
        }
        if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
            integral = false;
            take();
            if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) take();
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) take();
        }
        cur_.kind = Tok::Number;
        cur_.text = s_.substr(start, pos_ - start);
        cur_.number = std::strtod(cur_.text.c_str(), nullptr);
        cur_.integral = integral;
    }

    void skip_ws() {
        for (;;) {
            while (pos_ < s_.size() &&
                   std::isspace(static_cast<unsigned char>(s_[pos_])))
                take();
            if (pos_ < s_.size() && s_[pos_] == '#') {
                while (pos_ < s_.size() && s_[pos_] != '\n') take();
                continue;
            }
            break;
        }
    }

    void take() {
        if (s_[pos_] == '\n') { ++line_; col_ = 1; }
        else ++col_;
        ++pos_;
    }

    const std::string& s_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
    Token cur_;
};

struct VecRef {
    bool vel = false;
    int lo = 0;
    int hi = 0;
    int size() const { return hi - lo + 1; }
};

class Parser {
public:
    Parser(const std::string& text, SystemSpec* ctx)
        : lex_(text), spec_(ctx) {}

    SystemSpec parse_full(const std::string& source) {
        SystemSpec spec;
        spec.source = source;
        spec_ = &spec;
        bool have_L = false;
        while (!have_L) {
            Token t = lex_.next();
            if (t.kind != Tok::Name)
                fail(t, "expected a header keyword or 'L ='");
            if (t.text == "dim") {
                Token n = expect(Tok::Number, "dimension");
                if (!n.integral || n.number < 1)
                    fail(n, "dimension must be a positive integer");
                spec.dim = static_cast<int>(n.number);
                expect(Tok::Semicolon, "';'");
            } else if (t.text == "param") {
                Token name = expect(Tok::Name, "parameter name");
                expect(Tok::Equals, "'='");
                spec.params[name.text] = signed_number();
                expect(Tok::Semicolon, "';'");
            } else if (t.text == "slice") {
                require_dim(t);
                Token name = expect(Tok::Name, "slice name");
                expect(Tok::Equals, "'='");
                Token qk = expect(Tok::Name, "'q'");
                if (qk.text != "q") fail(qk, "slices index into q");
                expect(Tok::LBracket, "'['");
                Token lo = expect(Tok::Number, "start index");
                expect(Tok::DotDot, "'..'");
                Token hi = expect(Tok::Number, "end index");
                expect(Tok::RBracket, "']'");
                expect(Tok::Semicolon, "';'");
                if (!lo.integral || !hi.integral) fail(lo, "slice bounds must be integers");
                Slice s{static_cast<int>(lo.number), static_cast<int>(hi.number)};
                if (s.lo < 1 || s.hi > spec.dim || s.lo > s.hi)
                    fail(lo, "slice index out of range");
                spec.slices[name.text] = s;
            } else if (t.text == "guard") {
                require_dim(t);
                spec.guards.push_back(parse_expr(1));
                expect(Tok::Semicolon, "';'");
            } else if (t.text == "box") {
                require_dim(t);
                ensure_boxes();
                Token name = expect(Tok::Name, "box target");
                Real lo = signed_number();
                Real hi = signed_number();
                expect(Tok::Semicolon, "';'");
                if (lo >= hi) fail(name, "box interval must have lo < hi");
                // Positive lower bound declares a two-sided shell ±[lo, hi].
                BoxInterval bi{lo, hi, lo > 0.0};
                if (name.text == "q") {
                    for (auto& b : spec.q_box) b = bi;
                } else if (name.text == "v") {
                    for (auto& b : spec.v_box) b = bi;
                } else {
                    auto it = spec.slices.find(name.text);
                    if (it == spec.slices.end())
                        fail(name, "box target must be q, v, or a slice name");
                    for (int i = it->second.lo; i <= it->second.hi; ++i)
                        spec.q_box[i - 1] = bi;
                }
            } else if (t.text == "L") {
                require_dim(t);
                ensure_boxes();
                expect(Tok::Equals, "'='");
                spec.lagrangian = parse_expr(1);
                if (lex_.peek().kind == Tok::Semicolon) lex_.next();
                have_L = true;
            } else {
                fail(t, "unknown header '" + t.text + "'");
            }
        }
        Token end = lex_.next();
        if (end.kind != Tok::End) fail(end, "trailing input after Lagrangian");
        ensure_boxes();
        return spec;
    }

    Expr parse_single() {
        Expr e = parse_expr(1);
        Token end = lex_.next();
        if (end.kind != Tok::End) fail(end, "trailing input after expression");
        return e;
    }

private:
    void require_dim(const Token& at) {
        if (spec_->dim == 0)
            fail(at, "dim must be declared first");
    }

    void ensure_boxes() {
        if (spec_->q_box.empty()) {
            spec_->q_box.assign(spec_->dim, BoxInterval{});
            spec_->v_box.assign(spec_->dim, BoxInterval{});
        }
    }

    Real signed_number() {
        bool neg = false;
        if (lex_.peek().kind == Tok::Minus) { lex_.next(); neg = true; }
        Token n = expect(Tok::Number, "a number");
        return neg ? -n.number : n.number;
    }

    // Precedence-climbing expression parser.  Levels: add/sub 1, mul/div 3,
    // pow 4 (matching the printer); unary minus binds between them.
    Expr parse_expr(int min_prec) {
        Expr lhs = parse_unary();
        for (;;) {
            Tok k = lex_.peek().kind;
            int prec;
            switch (k) {
                case Tok::Plus:
                case Tok::Minus: prec = 1; break;
                case Tok::Star:
                case Tok::Slash: prec = 3; break;
                case Tok::Caret: prec = 4; break;
                default: return lhs;
            }
            if (prec < min_prec) return lhs;
            lex_.next();
            if (k == Tok::Caret) {
                lhs = make_pow(std::move(lhs), parse_exponent());
                continue;
            }
            Expr rhs = parse_expr(prec + 1);
            Op op = k == Tok::Plus ? Op::Add
                    : k == Tok::Minus ? Op::Sub
                    : k == Tok::Star ? Op::Mul
                                     : Op::Div;
            lhs = make_binary(op, std::move(lhs), std::move(rhs));
        }
    }

    Expr parse_unary() {
        if (lex_.peek().kind == Tok::Minus) {
            Token m = lex_.next();
            (void)m;
            Expr a = parse_expr(3);
            if (a->op == Op::Constant) return make_const(-a->value);
            return make_unary(Op::Neg, std::move(a));
        }
        return parse_primary();
    }

    Rational parse_exponent() {
        Token t = lex_.peek();
        bool neg = false;
        bool parens = false;
        if (t.kind == Tok::LParen) {
            parens = true;
            lex_.next();
            if (lex_.peek().kind == Tok::Minus) { lex_.next(); neg = true; }
        } else if (t.kind == Tok::Minus) {
            lex_.next();
            neg = true;
        }
        Token num = lex_.next();
        if (num.kind != Tok::Number || !num.integral)
            fail(num, "pow exponent must be a rational constant (integer or (p/q))");
        long long p = static_cast<long long>(num.number);
        long long q = 1;
        if (parens) {
            if (lex_.peek().kind == Tok::Slash) {
                lex_.next();
                Token den = lex_.next();
                if (den.kind != Tok::Number || !den.integral || den.number == 0)
                    fail(den, "pow exponent denominator must be a nonzero integer");
                q = static_cast<long long>(den.number);
            }
            expect(Tok::RParen, "')'");
        }
        return make_rational(neg ? -p : p, q);
    }

    Expr parse_primary() {
        Token t = lex_.next();
        switch (t.kind) {
            case Tok::Number:
                return make_const(t.number);
            case Tok::LParen: {
                Expr e = parse_expr(1);
                expect(Tok::RParen, "')'");
                return e;
            }
            case Tok::Name:
                return parse_name(t);
            default:
                fail(t, "expected an expression");
        }
        return nullptr; // unreachable
    }

    Expr parse_name(const Token& t) {
        if (t.text == "q" || t.text == "v") {
            expect(Tok::LBracket, "'['");
            Token idx = expect(Tok::Number, "index");
            expect(Tok::RBracket, "']'");
            if (!idx.integral) fail(idx, "index must be an integer");
            int i = static_cast<int>(idx.number);
            if (i < 1 || i > spec_->dim) fail(idx, "index out of range");
            return t.text == "q" ? make_coord(i) : make_vel(i);
        }
        if (t.text == "sqrt" || t.text == "sin" || t.text == "cos" || t.text == "ln") {
            expect(Tok::LParen, "'('");
            Expr a = parse_expr(1);
            expect(Tok::RParen, "')'");
            Op op = t.text == "sqrt" ? Op::Sqrt
                    : t.text == "sin" ? Op::Sin
                    : t.text == "cos" ? Op::Cos
                                      : Op::Ln;
            return make_unary(op, std::move(a));
        }
        if (t.text == "dot") {
            expect(Tok::LParen, "'('");
            VecRef a = parse_vec();
            expect(Tok::Comma, "','");
            VecRef b = parse_vec();
            expect(Tok::RParen, "')'");
            if (a.size() != b.size()) fail(t, "dot arguments have different lengths");
            return expand_dot(a, b);
        }
        if (t.text == "norm") {
            expect(Tok::LParen, "'('");
            VecRef a = parse_vec();
            expect(Tok::RParen, "')'");
            return make_unary(Op::Sqrt, expand_dot(a, a));
        }
        auto p = spec_->params.find(t.text);
        if (p != spec_->params.end()) return make_param(t.text);
        if (spec_->slices.count(t.text))
            fail(t, "slice '" + t.text + "' used in scalar context");
        fail(t, "unbound name '" + t.text + "'");
        return nullptr; // unreachable
    }

    VecRef parse_vec() {
        Token t = lex_.next();
        if (t.kind != Tok::Name) fail(t, "expected a vector argument");
        if (t.text == "q" || t.text == "v") {
            bool vel = t.text == "v";
            if (lex_.peek().kind == Tok::LBracket) {
                lex_.next();
                Token name = expect(Tok::Name, "slice name");
                expect(Tok::RBracket, "']'");
                auto it = spec_->slices.find(name.text);
                if (it == spec_->slices.end())
                    fail(name, "unbound slice '" + name.text + "'");
                return VecRef{vel, it->second.lo, it->second.hi};
            }
            return VecRef{vel, 1, spec_->dim};
        }
        auto it = spec_->slices.find(t.text);
        if (it == spec_->slices.end())
            fail(t, "expected q, v, or a slice name");
        return VecRef{false, it->second.lo, it->second.hi};
    }

    Expr expand_dot(const VecRef& a, const VecRef& b) {
        Expr sum;
        for (int i = 0; i < a.size(); ++i) {
            Expr ca = a.vel ? make_vel(a.lo + i) : make_coord(a.lo + i);
            Expr cb = b.vel ? make_vel(b.lo + i) : make_coord(b.lo + i);
            Expr term = make_binary(Op::Mul, std::move(ca), std::move(cb));
            sum = sum ? make_binary(Op::Add, std::move(sum), std::move(term)) : term;
        }
        return sum;
    }

    Token expect(Tok kind, const std::string& what) {
        Token t = lex_.next();
        if (t.kind != kind) fail(t, "expected " + what);
        return t;
    }

    [[noreturn]] void fail(const Token& t, const std::string& msg) {
        throw ParseError(t.line, t.col, msg);
    }

    Lexer lex_;
    SystemSpec* spec_;
};

} // namespace

SystemSpec parse_spec(const std::string& text) {
    Parser p(text, nullptr);
    return p.parse_full(text);
}

Expr parse_expr_in(const SystemSpec& spec, const std::string& text) {
    SystemSpec ctx = spec; // parser mutates box defaults only
    Parser p(text, &ctx);
    return p.parse_single();
}

} // namespace lagsym
