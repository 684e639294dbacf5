#include "lagsym/expr.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

namespace lagsym {

Rational make_rational(long long num, long long den) {
    if (den == 0) throw std::invalid_argument("rational exponent with zero denominator");
    if (den < 0) { num = -num; den = -den; }
    long long g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) { num /= g; den /= g; }
    if (num == 0) den = 1;
    return Rational{num, den};
}

Rational rational_sub_one(const Rational& r) {
    return make_rational(r.num - r.den, r.den);
}

namespace {

std::size_t hash_mix(std::size_t h, std::size_t x) {
    h ^= x + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
}

std::size_t node_hash(const ExprNode& n) {
    std::size_t h = static_cast<std::size_t>(n.op) * 0x100000001b3ULL;
    switch (n.op) {
        case Op::Constant: h = hash_mix(h, std::hash<Real>{}(n.value)); break;
        case Op::Parameter: h = hash_mix(h, std::hash<std::string>{}(n.name)); break;
        case Op::Coord:
        case Op::Vel: h = hash_mix(h, static_cast<std::size_t>(n.index)); break;
        case Op::Pow:
            h = hash_mix(h, static_cast<std::size_t>(n.exponent.num));
            h = hash_mix(h, static_cast<std::size_t>(n.exponent.den));
            break;
        default: break;
    }
    for (const auto& a : n.args) h = hash_mix(h, a->hash);
    return h;
}

Expr finish(ExprNode n) {
    n.hash = node_hash(n);
    return std::make_shared<const ExprNode>(std::move(n));
}

} // namespace

Expr make_const(Real value) {
    ExprNode n;
    n.op = Op::Constant;
    n.value = value;
    return finish(std::move(n));
}

Expr make_param(std::string name) {
    ExprNode n;
    n.op = Op::Parameter;
    n.name = std::move(name);
    return finish(std::move(n));
}

Expr make_coord(int index) {
    ExprNode n;
    n.op = Op::Coord;
    n.index = index;
    return finish(std::move(n));
}

Expr make_vel(int index) {
    ExprNode n;
    n.op = Op::Vel;
    n.index = index;
    return finish(std::move(n));
}

Expr make_unary(Op op, Expr a) {
    ExprNode n;
    n.op = op;
    n.args.push_back(std::move(a));
    return finish(std::move(n));
}

Expr make_binary(Op op, Expr a, Expr b) {
    ExprNode n;
    n.op = op;
    n.args.push_back(std::move(a));
    n.args.push_back(std::move(b));
    return finish(std::move(n));
}

Expr make_pow(Expr base, Rational r) {
    ExprNode n;
    n.op = Op::Pow;
    n.exponent = make_rational(r.num, r.den);
    n.args.push_back(std::move(base));
    return finish(std::move(n));
}

bool is_const(const Expr& e, Real v) {
    return e->op == Op::Constant && e->value == v;
}

Expr s_neg(Expr a) {
    if (a->op == Op::Constant) return make_const(-a->value);
    if (a->op == Op::Neg) return a->args[0];
    return make_unary(Op::Neg, std::move(a));
}

Expr s_add(Expr a, Expr b) {
    if (is_const(a, 0.0)) return b;
    if (is_const(b, 0.0)) return a;
    if (a->op == Op::Constant && b->op == Op::Constant) return make_const(a->value + b->value);
    return make_binary(Op::Add, std::move(a), std::move(b));
}

Expr s_sub(Expr a, Expr b) {
    if (is_const(b, 0.0)) return a;
    if (is_const(a, 0.0)) return s_neg(std::move(b));
    if (a->op == Op::Constant && b->op == Op::Constant) return make_const(a->value - b->value);
    return make_binary(Op::Sub, std::move(a), std::move(b));
}

Expr s_mul(Expr a, Expr b) {
    if (is_const(a, 0.0) || is_const(b, 0.0)) return make_const(0.0);
    if (is_const(a, 1.0)) return b;
    if (is_const(b, 1.0)) return a;
    if (a->op == Op::Constant && b->op == Op::Constant) return make_const(a->value * b->value);
    return make_binary(Op::Mul, std::move(a), std::move(b));
}

Expr s_div(Expr a, Expr b) {
    if (is_const(a, 0.0)) return make_const(0.0);
    if (is_const(b, 1.0)) return a;
    if (a->op == Op::Constant && b->op == Op::Constant && b->value != 0.0)
        return make_const(a->value / b->value);
    return make_binary(Op::Div, std::move(a), std::move(b));
}

namespace {

Real eval_rational_pow(Real base, const Rational& r) {
    if (r.den == 1) {
        // Integer exponent: exact repeated multiplication keeps the sign
        // correct for negative bases.
        long long n = r.num < 0 ? -r.num : r.num;
        Real acc = 1.0, p = base;
        while (n > 0) {
            if (n & 1) acc *= p;
            p *= p;
            n >>= 1;
        }
        return r.num < 0 ? 1.0 / acc : acc;
    }
    return std::pow(base, static_cast<Real>(r.num) / static_cast<Real>(r.den));
}

} // namespace

Expr s_pow(Expr base, Rational r) {
    r = make_rational(r.num, r.den);
    if (r.num == 0) return make_const(1.0);
    if (r.num == 1 && r.den == 1) return base;
    if (base->op == Op::Constant) return make_const(eval_rational_pow(base->value, r));
    if (r.num == r.den) return base;
    return make_pow(std::move(base), r);
}

bool same_expr(const Expr& a, const Expr& b) {
    if (a.get() == b.get()) return true;
    if (a->hash != b->hash || a->op != b->op) return false;
    switch (a->op) {
        case Op::Constant: if (a->value != b->value) return false; break;
        case Op::Parameter: if (a->name != b->name) return false; break;
        case Op::Coord:
        case Op::Vel: if (a->index != b->index) return false; break;
        case Op::Pow:
            if (a->exponent.num != b->exponent.num || a->exponent.den != b->exponent.den)
                return false;
            break;
        default: break;
    }
    if (a->args.size() != b->args.size()) return false;
    for (std::size_t i = 0; i < a->args.size(); ++i)
        if (!same_expr(a->args[i], b->args[i])) return false;
    return true;
}

Real eval_expr(const Expr& e, std::span<const Real> q, std::span<const Real> v,
               const std::map<std::string, Real>& params, EvalCache* cache) {
    EvalCache local;
    EvalCache& c = cache ? *cache : local;

    std::function<Real(const Expr&)> go = [&](const Expr& node) -> Real {
        auto it = c.memo.find(node.get());
        if (it != c.memo.end()) return it->second;
        Real r = 0.0;
        switch (node->op) {
            case Op::Constant: r = node->value; break;
            case Op::Parameter: {
                auto p = params.find(node->name);
                if (p == params.end())
                    throw std::runtime_error("unbound parameter: " + node->name);
                r = p->second;
                break;
            }
            case Op::Coord:
                if (node->index < 1 || node->index > static_cast<int>(q.size()))
                    throw std::out_of_range("coordinate index out of range");
                r = q[node->index - 1];
                break;
            case Op::Vel:
                if (node->index < 1 || node->index > static_cast<int>(v.size()))
                    throw std::out_of_range("velocity index out of range");
                r = v[node->index - 1];
                break;
            case Op::Neg: r = -go(node->args[0]); break;
            case Op::Sqrt: r = std::sqrt(go(node->args[0])); break;
            case Op::Sin: r = std::sin(go(node->args[0])); break;
            case Op::Cos: r = std::cos(go(node->args[0])); break;
            case Op::Ln: r = std::log(go(node->args[0])); break;
            case Op::Add: r = go(node->args[0]) + go(node->args[1]); break;
            case Op::Sub: r = go(node->args[0]) - go(node->args[1]); break;
            case Op::Mul: r = go(node->args[0]) * go(node->args[1]); break;
            case Op::Div: r = go(node->args[0]) / go(node->args[1]); break;
            case Op::Pow: r = eval_rational_pow(go(node->args[0]), node->exponent); break;
        }
        c.memo.emplace(node.get(), r);
        return r;
    };
    return go(e);
}

Expr differentiate(const Expr& e, Op wrt, int index) {
    if (wrt != Op::Coord && wrt != Op::Vel)
        throw std::invalid_argument("differentiate: wrt must be a coordinate or velocity");

    // Memo keyed by node identity; shared subtrees are differentiated once.
    std::unordered_map<const ExprNode*, Expr> memo;
    std::function<Expr(const Expr&)> d = [&](const Expr& node) -> Expr {
        auto it = memo.find(node.get());
        if (it != memo.end()) return it->second;
        Expr r;
        switch (node->op) {
            case Op::Constant:
            case Op::Parameter:
                r = make_const(0.0);
                break;
            case Op::Coord:
                r = make_const(wrt == Op::Coord && node->index == index ? 1.0 : 0.0);
                break;
            case Op::Vel:
                r = make_const(wrt == Op::Vel && node->index == index ? 1.0 : 0.0);
                break;
            case Op::Neg:
                r = s_neg(d(node->args[0]));
                break;
            case Op::Sqrt:
                // du / (2 sqrt(u))
                r = s_div(d(node->args[0]), s_mul(make_const(2.0), node));
                break;
            case Op::Sin:
                r = s_mul(make_unary(Op::Cos, node->args[0]), d(node->args[0]));
                break;
            case Op::Cos:
                r = s_neg(s_mul(make_unary(Op::Sin, node->args[0]), d(node->args[0])));
                break;
            case Op::Ln:
                r = s_div(d(node->args[0]), node->args[0]);
                break;
            case Op::Add:
                r = s_add(d(node->args[0]), d(node->args[1]));
                break;
            case Op::Sub:
                r = s_sub(d(node->args[0]), d(node->args[1]));
                break;
            case Op::Mul:
                r = s_add(s_mul(d(node->args[0]), node->args[1]),
                          s_mul(node->args[0], d(node->args[1])));
                break;
            case Op::Div:
                // (a'b - ab') / b^2
                r = s_div(s_sub(s_mul(d(node->args[0]), node->args[1]),
                                s_mul(node->args[0], d(node->args[1]))),
                          s_pow(node->args[1], make_rational(2, 1)));
                break;
            case Op::Pow: {
                const Rational& p = node->exponent;
                Expr coeff = make_const(static_cast<Real>(p.num) / static_cast<Real>(p.den));
                r = s_mul(s_mul(coeff, s_pow(node->args[0], rational_sub_one(p))),
                          d(node->args[0]));
                break;
            }
        }
        memo.emplace(node.get(), r);
        return r;
    };
    return d(e);
}

Expr simplify(const Expr& e) {
    std::unordered_map<const ExprNode*, Expr> memo;
    std::function<Expr(const Expr&)> go = [&](const Expr& node) -> Expr {
        auto it = memo.find(node.get());
        if (it != memo.end()) return it->second;
        Expr r;
        switch (node->op) {
            case Op::Constant:
            case Op::Parameter:
            case Op::Coord:
            case Op::Vel:
                r = node;
                break;
            case Op::Neg:
                r = s_neg(go(node->args[0]));
                break;
            case Op::Sqrt: {
                Expr a = go(node->args[0]);
                r = (a->op == Op::Constant && a->value >= 0.0)
                        ? make_const(std::sqrt(a->value))
                        : make_unary(Op::Sqrt, std::move(a));
                break;
            }
            case Op::Sin:
            case Op::Cos:
            case Op::Ln: {
                Expr a = go(node->args[0]);
                if (a->op == Op::Constant) {
                    Real x = a->value;
                    Real y = node->op == Op::Sin   ? std::sin(x)
                             : node->op == Op::Cos ? std::cos(x)
                                                   : std::log(x);
                    if (std::isfinite(y)) {
                        r = make_const(y);
                        break;
                    }
                }
                r = make_unary(node->op, std::move(a));
                break;
            }
            case Op::Add: r = s_add(go(node->args[0]), go(node->args[1])); break;
            case Op::Sub: r = s_sub(go(node->args[0]), go(node->args[1])); break;
            case Op::Mul: r = s_mul(go(node->args[0]), go(node->args[1])); break;
            case Op::Div: r = s_div(go(node->args[0]), go(node->args[1])); break;
            case Op::Pow: {
                Expr base = go(node->args[0]);
                Rational p = node->exponent;
                // (x^a)^n with integer n is x^(a n) for every x where the
                // inner power is defined; fractional outer exponents are left
                // alone (sign information would be lost).
                if (base->op == Op::Pow && p.den == 1) {
                    Rational inner = base->exponent;
                    p = make_rational(inner.num * p.num, inner.den);
                    base = base->args[0];
                }
                r = s_pow(std::move(base), p);
                break;
            }
        }
        memo.emplace(node.get(), r);
        return r;
    };
    return go(e);
}

namespace {

// Printer precedence levels; parenthesization keeps print/parse a structural
// round trip (the parser builds left-associative chains).
int prec_of(const Expr& e) {
    switch (e->op) {
        case Op::Add:
        case Op::Sub: return 1;
        case Op::Neg: return 2;
        case Op::Mul:
        case Op::Div: return 3;
        case Op::Pow: return 4;
        case Op::Constant: return e->value < 0.0 ? 2 : 5;
        default: return 5;
    }
}

std::string fmt_real(Real v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
}

void print_rec(const Expr& e, std::string& out);

void print_child(const Expr& child, int parent_prec, bool is_right, std::string& out) {
    int p = prec_of(child);
    bool parens = p < parent_prec || (is_right && p == parent_prec);
    if (parens) out += '(';
    print_rec(child, out);
    if (parens) out += ')';
}

void print_rec(const Expr& e, std::string& out) {
    switch (e->op) {
        case Op::Constant: out += fmt_real(e->value); break;
        case Op::Parameter: out += e->name; break;
        case Op::Coord: out += "q[" + std::to_string(e->index) + "]"; break;
        case Op::Vel: out += "v[" + std::to_string(e->index) + "]"; break;
        case Op::Neg:
            out += '-';
            print_child(e->args[0], 3, false, out);
            break;
        case Op::Sqrt:
        case Op::Sin:
        case Op::Cos:
        case Op::Ln: {
            const char* name = e->op == Op::Sqrt ? "sqrt"
                               : e->op == Op::Sin ? "sin"
                               : e->op == Op::Cos ? "cos"
                                                  : "ln";
            out += name;
            out += '(';
            print_rec(e->args[0], out);
            out += ')';
            break;
        }
        case Op::Add:
        case Op::Sub:
        case Op::Mul:
        case Op::Div: {
            int p = prec_of(e);
            print_child(e->args[0], p, false, out);
            out += e->op == Op::Add ? "+" : e->op == Op::Sub ? "-" : e->op == Op::Mul ? "*" : "/";
            print_child(e->args[1], p, true, out);
            break;
        }
        case Op::Pow: {
            print_child(e->args[0], 5, false, out);
            out += '^';
            const Rational& r = e->exponent;
            if (r.den == 1 && r.num >= 0) {
                out += std::to_string(r.num);
            } else if (r.den == 1) {
                out += "(" + std::to_string(r.num) + ")";
            } else {
                out += "(" + std::to_string(r.num) + "/" + std::to_string(r.den) + ")";
            }
            break;
        }
    }
}

} // namespace

std::string to_string(const Expr& e) {
    std::string out;
    print_rec(e, out);
    return out;
}

int count_nodes(const Expr& e) {
    std::unordered_set<const ExprNode*> seen;
    std::function<void(const Expr&)> go = [&](const Expr& n) {
        if (!seen.insert(n.get()).second) return;
        for (const auto& a : n->args) go(a);
    };
    go(e);
    return static_cast<int>(seen.size());
}

} // namespace lagsym
