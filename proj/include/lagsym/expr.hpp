#ifndef LAGSYM_EXPR_HPP
#define LAGSYM_EXPR_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace lagsym {

using Real = double;

enum class Op : std::uint8_t {
    Constant,
    Parameter,
    Coord,    // q[i], 1-based index
    Vel,      // v[i], 1-based index
    Neg,
    Sqrt,
    Sin,
    Cos,
    Ln,
    Add,
    Sub,
    Mul,
    Div,
    Pow,      // exponent is a rational constant stored on the node
};

// Rational exponent p/q, always normalized with q > 0 and gcd(p,q) = 1.
struct Rational {
    long long num = 0;
    long long den = 1;
};

Rational make_rational(long long num, long long den);
Rational rational_sub_one(const Rational& r);

class ExprNode;
using Expr = std::shared_ptr<const ExprNode>;

// Immutable expression tree node.  The structural hash is computed on
// construction; shared subtrees keep derivative trees compact and make the
// per-evaluation memo effective.
class ExprNode {
public:
    Op op = Op::Constant;
    Real value = 0.0;       // Constant
    std::string name;       // Parameter
    int index = 0;          // Coord / Vel
    Rational exponent;      // Pow
    std::vector<Expr> args;
    std::size_t hash = 0;
};

Expr make_const(Real value);
Expr make_param(std::string name);
Expr make_coord(int index);
Expr make_vel(int index);
Expr make_unary(Op op, Expr a);
Expr make_binary(Op op, Expr a, Expr b);
Expr make_pow(Expr base, Rational r);

// Smart constructors: apply cheap local identities (0/1 absorption, constant
// folding) so derivative construction does not blow up.
Expr s_neg(Expr a);
Expr s_add(Expr a, Expr b);
Expr s_sub(Expr a, Expr b);
Expr s_mul(Expr a, Expr b);
Expr s_div(Expr a, Expr b);
Expr s_pow(Expr base, Rational r);

bool same_expr(const Expr& a, const Expr& b);
bool is_const(const Expr& e, Real v);

// Per-call evaluation memo keyed by node identity.
struct EvalCache {
    std::unordered_map<const ExprNode*, Real> memo;
};

Real eval_expr(const Expr& e, std::span<const Real> q, std::span<const Real> v,
               const std::map<std::string, Real>& params, EvalCache* cache = nullptr);

// Exact symbolic partial derivative with respect to q[index] (wrt = Op::Coord)
// or v[index] (wrt = Op::Vel).
Expr differentiate(const Expr& e, Op wrt, int index);

// Value-preserving rewrite: constant folding, 0/1 identities, double negation,
// pow collapse.  Idempotent.
Expr simplify(const Expr& e);

// Printer; parse(print(t)) reproduces t node-for-node (unary minus applied to
// a numeric literal folds back into a negative constant on both sides).
std::string to_string(const Expr& e);

int count_nodes(const Expr& e);

} // namespace lagsym

#endif
