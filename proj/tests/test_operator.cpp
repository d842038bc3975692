#include <catch2/catch_amalgamated.hpp>

#include "ptpdm/normal_op.hpp"
#include "ptpdm/parser.hpp"
#include "test_util.hpp"

#include <random>

using namespace ptpdm;

namespace {

NormalOp random_op(std::mt19937_64& rng, int degree) {
    std::vector<Expr> c;
    for (int k = 0; k <= degree; ++k)
        c.push_back(testutil::random_tree(rng, 2, /*allow_poles=*/false));
    return NormalOp::from_coeffs(std::move(c));
}

// Generator data for the cubic model at mu = 1: R0 = -x^2, R1 = -2/3.
GeneratorCoeffs cubic_generator() {
    GeneratorCoeffs g;
    g.R.push_back(neg(pow(var(), 2)));
    g.R.push_back(rational(-2, 3));
    return g;
}

const CompareOptions kOpCmp{{-1.5, 1.5}, 100, 1e-9, 99991};

} // namespace

TEST_CASE("leibniz_move expands derivative-through-function products") {
    // d^2 (x^3 g) = x^3 g'' + 6 x^2 g' + 6 x g
    NormalOp m = leibniz_move(2, pow(var(), 3));
    REQUIRE(m.degree() == 2);
    REQUIRE(expr_close(m.coeff(0), parse("6*x"), kOpCmp));
    REQUIRE(expr_close(m.coeff(1), parse("6*x^2"), kOpCmp));
    REQUIRE(expr_close(m.coeff(2), parse("x^3"), kOpCmp));

    // multiplying operators reproduces the same reordering
    NormalOp viaprod = NormalOp::derivative(2) * NormalOp::multiplication(pow(var(), 3));
    REQUIRE(op_close(m, viaprod, kOpCmp));
}

TEST_CASE("canonical commutation relation") {
    NormalOp c = commutator(NormalOp::position(), NormalOp::momentum());
    REQUIRE(c.degree() == 0);
    REQUIRE(expr_close(c.coeff(0), constant(std::complex<double>(0.0, 1.0)), kOpCmp));
}

TEST_CASE("momentum powers compose") {
    NormalOp p = NormalOp::momentum();
    NormalOp p3 = p * p * p;
    REQUIRE(op_close(p3, NormalOp::momentum_power(3), kOpCmp));
}

TEST_CASE("commutator drops at least one derivative order") {
    std::mt19937_64 rng(555);
    for (int t = 0; t < 12; ++t) {
        NormalOp a = random_op(rng, 2), b = random_op(rng, 2);
        NormalOp c = commutator(a, b);
        if (a.is_zero() || b.is_zero()) continue;
        REQUIRE(c.degree() <= a.degree() + b.degree() - 1);
    }
}

TEST_CASE("Jacobi identity holds for operator products") {
    std::mt19937_64 rng(808);
    for (int t = 0; t < 6; ++t) {
        NormalOp a = random_op(rng, 2), b = random_op(rng, 1), c = random_op(rng, 1);
        NormalOp j = commutator(a, commutator(b, c)) + commutator(b, commutator(c, a)) +
                     commutator(c, commutator(a, b));
        CompareOptions opt = kOpCmp;
        opt.tol = 1e-8; // nested products amplify roundoff on double coefficients
        REQUIRE(op_close(j, NormalOp::zero(), opt));
    }
}

TEST_CASE("adjoint is an involution and an antihomomorphism") {
    std::mt19937_64 rng(31337);
    for (int t = 0; t < 8; ++t) {
        NormalOp a = random_op(rng, 2), b = random_op(rng, 2);
        REQUIRE(op_close(adjoint(adjoint(a)), a, kOpCmp));
        NormalOp lhs = adjoint(a * b);
        NormalOp rhs = adjoint(b) * adjoint(a);
        REQUIRE(op_close(lhs, rhs, kOpCmp));
    }
    REQUIRE(op_close(adjoint(NormalOp::momentum()), NormalOp::momentum(), kOpCmp));
    NormalOp iop = NormalOp::multiplication(constant(std::complex<double>(0.0, 1.0)));
    REQUIRE(op_close(adjoint(iop), -iop, kOpCmp));
}

TEST_CASE("generator expansion equals explicit anticommutator products") {
    std::mt19937_64 rng(2024);
    for (int t = 0; t < 20; ++t) {
        GeneratorCoeffs g;
        int parts = 1 + (int)(rng() % 3);
        for (int l = 0; l < parts; ++l)
            g.R.push_back(testutil::random_tree(rng, 2, /*allow_poles=*/false));
        NormalOp closed = expand_generator(g);
        NormalOp brute = generator_by_products(g);
        INFO("generator parts: " << parts);
        REQUIRE(op_close(closed, brute, kOpCmp));
    }
}

TEST_CASE("truncated generator yields the expected coefficient ladder") {
    NormalOp q1 = expand_generator(cubic_generator());
    // -i * (R0', 2 R0, 0, -2 R1)
    Expr mi = constant(std::complex<double>(0.0, -1.0));
    REQUIRE(q1.degree() == 3);
    REQUIRE(expr_close(q1.coeff(0), mi * parse("-2*x"), kOpCmp));
    REQUIRE(expr_close(q1.coeff(1), mi * parse("-2*x^2"), kOpCmp));
    REQUIRE(expr_close(q1.coeff(2), constant(Scalar()), kOpCmp));
    REQUIRE(expr_close(q1.coeff(3), mi * parse("4/3"), kOpCmp));
}

TEST_CASE("position and momentum commutators against the ladder formulas") {
    NormalOp q1 = expand_generator(cubic_generator());
    std::vector<Expr> S;
    Expr iu = constant(std::complex<double>(0.0, 1.0));
    for (int k = 0; k <= q1.degree(); ++k) S.push_back(simplify(iu * q1.coeff(k)));

    // [x, Q1] = i sum (k+1) S_{k+1} d^k
    NormalOp xc = commutator(NormalOp::position(), q1);
    std::vector<Expr> expect;
    for (int k = 0; k + 1 <= q1.degree(); ++k)
        expect.push_back(iu * constant(Scalar(std::int64_t(k + 1))) * S[k + 1]);
    REQUIRE(op_close(xc, NormalOp::from_coeffs(expect), kOpCmp));

    // [p, Q1] = - sum S_k' d^k
    NormalOp pc = commutator(NormalOp::momentum(), q1);
    std::vector<Expr> expect2;
    for (int k = 0; k <= q1.degree(); ++k)
        expect2.push_back(neg(differentiate(S[k])));
    REQUIRE(op_close(pc, NormalOp::from_coeffs(expect2), kOpCmp));
}

TEST_CASE("squared generator matches the direct convolution sums") {
    NormalOp q1 = expand_generator(cubic_generator());
    std::vector<Expr> S;
    Expr iu = constant(std::complex<double>(0.0, 1.0));
    for (int k = 0; k <= q1.degree(); ++k) S.push_back(simplify(iu * q1.coeff(k)));
    auto Sat = [&](int k) { return k <= q1.degree() ? S[k] : constant(Scalar()); };

    NormalOp q2 = q1 * q1;
    int deg = q1.degree();
    std::vector<Expr> w(2 * deg + 1, constant(Scalar()));
    for (int k = 0; k <= 2 * deg; ++k) {
        for (int l = 0; l <= k; ++l)
            for (int m = k - l; m <= deg; ++m)
                w[k] = w[k] + constant(binomial(m, k - l)) * Sat(m) *
                                  differentiate(Sat(l), l + m - k);
        w[k] = neg(w[k]); // Q1^2 = -(sum S d)(sum S d)
    }
    REQUIRE(op_close(q2, NormalOp::from_coeffs(w), kOpCmp));
}

TEST_CASE("generator symmetry triple") {
    NormalOp q1 = expand_generator(cubic_generator());
    // hermiticity
    REQUIRE(op_close(adjoint(q1), q1, kOpCmp));
    // even generator data: reflecting x inside the anticommutator form is inert
    GeneratorCoeffs g = cubic_generator();
    GeneratorCoeffs gr;
    for (const Expr& R : g.R) gr.R.push_back(substitute_var(R, neg(var())));
    REQUIRE(op_close(expand_generator(gr), q1, kOpCmp));
    // joint phase-space reflection flips the sign
    REQUIRE(op_close(parity_conjugate(q1), -q1, kOpCmp));
    // and the combined PT action leaves it invariant
    REQUIRE(op_close(pt_transform(q1), q1, kOpCmp));
}

TEST_CASE("PT-symmetric Hamiltonian is pt_transform invariant") {
    // H = p^2/2 + x^2/2 + i eps x^3
    NormalOp H = scale(Scalar(1, 2), NormalOp::momentum_power(2)) +
                 NormalOp::multiplication(parse("1/2*x^2")) +
                 NormalOp::multiplication(mul({constant(std::complex<double>(0.0, 0.1)),
                                               pow(var(), 3)}));
    REQUIRE(op_close(pt_transform(H), H, kOpCmp));
    REQUIRE_FALSE(op_close(adjoint(H), H, kOpCmp));
}

TEST_CASE("apply runs the operator on a concrete function") {
    NormalOp a = NormalOp::derivative(2) + NormalOp::from_coeffs(
        {constant(Scalar()), var()}); // d^2 + x d
    Expr out = apply(a, sin(var()));
    Expr expect = add({neg(sin(var())), mul({var(), cos(var())})});
    REQUIRE(expr_close(out, expect, kOpCmp));
}

TEST_CASE("momentum coefficient views round trip") {
    std::mt19937_64 rng(4242);
    for (int t = 0; t < 6; ++t) {
        NormalOp a = random_op(rng, 3);
        NormalOp back = from_momentum_coefficients(momentum_coefficients(a));
        REQUIRE(op_close(back, a, kOpCmp));
    }
    // symbol evaluation: x p^2 at (x=2, p=3) is 18
    NormalOp xp2 = from_momentum_coefficients(
        {constant(Scalar()), constant(Scalar()), var()});
    REQUIRE(std::abs(evaluate_symbol(xp2, 2.0, 3.0) - 18.0) < 1e-13);
}

TEST_CASE("degree cap raises a dedicated error") {
    NormalOp d9 = NormalOp::derivative(9);
    REQUIRE_THROWS_AS(d9 * d9, OperatorDegreeError);
    GeneratorCoeffs g;
    g.R.assign(9, constant(std::int64_t(1)));
    REQUIRE_THROWS_AS(expand_generator(g), OperatorDegreeError);
}

TEST_CASE("trailing zero coefficients are trimmed") {
    NormalOp a = NormalOp::from_coeffs({var(), constant(Scalar()), constant(Scalar())});
    REQUIRE(a.degree() == 0);
    NormalOp z = NormalOp::from_coeffs({constant(Scalar())});
    REQUIRE(z.is_zero());
    REQUIRE(z.degree() == -1);
}
