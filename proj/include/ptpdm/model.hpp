#pragma once

#include "ptpdm/normal_op.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace ptpdm {

// Raised when two independent internal computations of the same quantity
// disagree; indicates a bug, not bad input.
struct InternalConsistencyError : std::logic_error {
    using std::logic_error::logic_error;
};

// hbar, particle mass and length scale; fixes the energy unit used when a
// dimensionless model is dressed in physical units.
struct DimensionalScales {
    double hbar = 1.0;
    double mass = 1.0;
    double length = 1.0;
    double energy() const { return hbar * hbar / (mass * length * length); }
};

// Input data for the equivalence map. The antihermitian part of the
// Hamiltonian H = p^2/2 + V + i*eps*Vi is not free: once the generator ansatz
// below is adopted, Vi is determined by V and the two constants.
struct ModelSpec {
    Expr real_potential;       // V, even in x
    Scalar c0{};               // constant part of the generator
    Scalar c1{};               // strength of the cubic-in-p part
    double epsilon = 0.0;
    Interval domain{-1.0, 1.0};
};

struct ModelWarning {
    std::string id;
    std::string detail;
};

// Everything the map produces from a spec. The generator is
//   Q1 = {R0, 1} + {R1, d^2},  R0 = 3 c1 V + c0,  R1 = c1,
// equivalently Q1 = -i sum_k S_k d^k with real S_k.
struct DerivedModel {
    ModelSpec spec;
    GeneratorCoeffs generator;
    NormalOp q1;
    std::vector<Expr> s;       // S_0..S_3
    Expr vi;                   // odd imaginary potential fixed by the closure
    Expr m2;                   // second-order correction to the inverse mass
    Expr veff2;                // second-order correction to the potential
    std::vector<ModelWarning> warnings;
};

inline GeneratorCoeffs build_generator(const ModelSpec& spec) {
    GeneratorCoeffs g;
    g.R.push_back(simplify(constant(spec.c1 * Scalar(3)) * spec.real_potential +
                           constant(spec.c0)));
    g.R.push_back(constant(spec.c1));
    return g;
}

inline Expr imaginary_potential(const ModelSpec& spec) {
    const Expr& v = spec.real_potential;
    Expr r0 = constant(spec.c1 * Scalar(3)) * v + constant(spec.c0);
    return simplify(constant(spec.c1 * Scalar(1, 4)) * differentiate(v, 3) -
                    r0 * differentiate(v));
}

namespace detail {

// Uniform interior scan that steps over poles; returns false when fewer than
// half of the points were usable.
template <typename F>
inline bool scan_domain(const Interval& dom, int n, F&& fn) {
    int valid = 0;
    for (int j = 0; j < n; ++j) {
        double x = dom.lo + dom.width() * (j + 0.5) / n;
        try {
            fn(x);
        } catch (const PoleError&) {
            continue;
        }
        ++valid;
    }
    return valid >= n / 2;
}

} // namespace detail

inline DerivedModel derive(const ModelSpec& spec) {
    if (parity_of(spec.real_potential) != Parity::Even)
        throw DomainError("real potential must be even in x");

    DerivedModel m;
    m.spec = spec;
    m.generator = build_generator(spec);
    m.q1 = expand_generator(m.generator);
    Expr iu = constant(Scalar::imaginary_unit());
    for (int k = 0; k <= 3; ++k) m.s.push_back(simplify(iu * m.q1.coeff(k)));

    m.vi = imaginary_potential(spec);
    Expr vip = differentiate(m.vi);
    m.m2 = simplify(constant(spec.c1 * Scalar(-3)) * vip);
    m.veff2 = simplify(constant(Scalar(1, 2)) *
                       (neg(m.generator.R[0]) * vip +
                        constant(spec.c1) * differentiate(m.vi, 3)));

    Parity pvi = parity_of(m.vi);
    bool vi_vanishes = expr_close(m.vi, constant(Scalar()),
                                  {spec.domain, 64, 1e-12, 7});
    if (pvi != Parity::Odd && !vi_vanishes)
        throw DomainError("derived imaginary potential is not odd");

    double min_factor = std::numeric_limits<double>::infinity();
    double max_m2 = 0.0;
    double e2 = spec.epsilon * spec.epsilon;
    detail::scan_domain(spec.domain, 256, [&](double x) {
        double v = evaluate(m.m2, x).real();
        max_m2 = std::max(max_m2, std::abs(v));
        min_factor = std::min(min_factor, 1.0 + e2 * v);
    });
    if (min_factor <= 0.0)
        m.warnings.push_back({"mass_not_positive",
                              "inverse-mass factor reaches " + std::to_string(min_factor) +
                                  " inside the domain"});
    if (e2 * max_m2 > 0.5)
        m.warnings.push_back({"perturbative_regime",
                              "eps^2 * max|m2| = " + std::to_string(e2 * max_m2) +
                                  " exceeds 0.5; corrections are not small"});
    return m;
}

// 1 + eps^2 m2: the factor multiplying the kinetic term of the hermitian
// picture. The position-dependent mass is mass/(this factor).
inline Expr inverse_mass_factor(const DerivedModel& m) {
    return simplify(constant(std::int64_t(1)) +
                    constant(Scalar(m.spec.epsilon * m.spec.epsilon)) * m.m2);
}

inline NormalOp pt_hamiltonian(const DerivedModel& m) {
    Expr ieps = constant(std::complex<double>(0.0, m.spec.epsilon));
    return scale(Scalar(1, 2), NormalOp::momentum_power(2)) +
           NormalOp::multiplication(simplify(m.spec.real_potential + ieps * m.vi));
}

inline NormalOp hermitian_hamiltonian(const DerivedModel& m) {
    Expr f = inverse_mass_factor(m);
    Expr e2 = constant(Scalar(m.spec.epsilon * m.spec.epsilon));
    NormalOp kin = NormalOp::momentum() * NormalOp::multiplication(f) * NormalOp::momentum();
    return scale(Scalar(1, 2), kin) +
           NormalOp::multiplication(simplify(m.spec.real_potential + e2 * m.veff2));
}

// ---------------------------------------------------------------------------
// Scalar residual families. Each family is a list of terms whose pointwise
// sum must vanish; the reported figure is max |sum| / max(1, max |term|).
// ---------------------------------------------------------------------------

struct ResidualReport {
    std::string id;
    double max_abs = 0.0;
    bool ok = false;
};

namespace detail {

struct ResidualFamily {
    std::string id;
    ExprList terms;
};

inline ResidualReport evaluate_family(const ResidualFamily& fam, const Interval& dom,
                                      int points, double tol) {
    ResidualReport rep{fam.id, 0.0, false};
    bool enough = scan_domain(dom, points, [&](double x) {
        std::complex<double> sum = 0.0;
        double scale = 1.0;
        for (const Expr& t : fam.terms) {
            std::complex<double> v = evaluate(t, x);
            sum += v;
            scale = std::max(scale, std::abs(v));
        }
        rep.max_abs = std::max(rep.max_abs, std::abs(sum) / scale);
    });
    rep.ok = enough && rep.max_abs <= tol;
    return rep;
}

} // namespace detail

// The coupled conditions that make e^{-Q} H e^{Q} hermitian through second
// order, spelled out per derivative order. All of them must vanish once Vi,
// m2 and veff2 are derived from the generator.
inline std::vector<ResidualReport> check_condition_system(const DerivedModel& m,
                                                          int points = 200,
                                                          double tol = 1e-9) {
    const Expr& v = m.spec.real_potential;
    auto S = [&](int k) { return m.s[std::size_t(k)]; };
    auto d = [](const Expr& e, int n) { return differentiate(e, n); };
    Expr half = rational(1, 2);
    Expr two = constant(std::int64_t(2));
    Expr three = constant(std::int64_t(3));

    std::vector<detail::ResidualFamily> fams;
    fams.push_back({"potential_balance",
                    {half * d(S(0), 2), S(1) * d(v, 1), S(2) * d(v, 2), S(3) * d(v, 3),
                     two * m.vi}});
    fams.push_back({"closure_k1",
                    {d(S(0), 1), half * d(S(1), 2), two * S(2) * d(v, 1),
                     three * S(3) * d(v, 2)}});
    fams.push_back({"closure_k2", {d(S(1), 1), half * d(S(2), 2), three * S(3) * d(v, 1)}});
    fams.push_back({"closure_k3", {d(S(2), 1), half * d(S(3), 2)}});
    fams.push_back({"veff_balance",
                    {S(1) * d(m.vi, 1), S(2) * d(m.vi, 2), S(3) * d(m.vi, 3),
                     constant(std::int64_t(4)) * m.veff2}});
    fams.push_back({"mass_flux",
                    {two * S(2) * d(m.vi, 1), three * S(3) * d(m.vi, 2),
                     neg(two * d(m.m2, 1))}});
    fams.push_back({"mass_balance", {three * S(3) * d(m.vi, 1), neg(two * m.m2)}});

    // derivative orders above two must be absent from the second-order part
    NormalOp h2 = scale(Scalar(1, 4),
                        commutator(NormalOp::multiplication(
                                       simplify(constant(Scalar::imaginary_unit()) * m.vi)),
                                   m.q1));
    detail::ResidualFamily high{"higher_order", {}};
    for (int k = 3; k <= h2.degree(); ++k) high.terms.push_back(h2.coeff(k));
    if (high.terms.empty()) high.terms.push_back(constant(Scalar()));
    fams.push_back(std::move(high));

    std::vector<ResidualReport> out;
    for (auto& fam : fams) {
        for (Expr& t : fam.terms) t = simplify(t);
        out.push_back(detail::evaluate_family(fam, m.spec.domain, points, tol));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Operator-level checks, performed with exact operator arithmetic and
// pointwise coefficient comparison.
// ---------------------------------------------------------------------------

struct OperatorCheck {
    std::string id;
    bool ok = false;
    double max_rel_err = 0.0;
    int worst_k = -1;
};

inline std::vector<OperatorCheck> check_operator_conditions(const DerivedModel& m,
                                                            double tol = 1e-9) {
    CompareOptions opt{m.spec.domain, 100, tol, 411};
    NormalOp h0 = scale(Scalar(1, 2), NormalOp::momentum_power(2)) +
                  NormalOp::multiplication(m.spec.real_potential);
    NormalOp h1 = NormalOp::multiplication(
        simplify(constant(Scalar::imaginary_unit()) * m.vi));
    NormalOp h = h0 + scale(Scalar(m.spec.epsilon), h1);
    NormalOp two_h1 = scale(Scalar(std::int64_t(2)), h1);

    NormalOp pdm2 = scale(Scalar(1, 2), NormalOp::momentum() *
                                            NormalOp::multiplication(m.m2) *
                                            NormalOp::momentum()) +
                    NormalOp::multiplication(m.veff2);

    std::vector<std::pair<std::string, std::pair<NormalOp, NormalOp>>> checks;
    checks.push_back({"commutator_closure", {commutator(h0, m.q1) + two_h1, NormalOp::zero()}});
    checks.push_back({"second_order_match",
                      {scale(Scalar(1, 4), commutator(h1, m.q1)), pdm2}});
    checks.push_back({"adjoint_relation",
                      {adjoint(h) - h + scale(Scalar(2.0 * m.spec.epsilon), h1),
                       NormalOp::zero()}});
    checks.push_back({"pt_invariance", {pt_transform(h), h}});
    checks.push_back({"generator_hermitian", {adjoint(m.q1), m.q1}});
    checks.push_back({"generator_pt_symmetric", {pt_transform(m.q1), m.q1}});
    checks.push_back({"generator_reflection_odd", {parity_conjugate(m.q1), -m.q1}});

    std::vector<OperatorCheck> out;
    for (auto& [id, pair] : checks) {
        OpCompareResult r = op_compare(pair.first, pair.second, opt);
        out.push_back({id, r.close, r.max_rel_err, r.worst_k});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Equivalent observables. The hermitian-picture position and momentum map to
//   A -> A + (eps/2) [Q1, A] + (eps^2/8) [Q1, [Q1, A]]
// in the non-hermitian picture. Computed twice: once with generic operator
// products, once with the order-by-order ladder sums; the two must agree.
// ---------------------------------------------------------------------------

struct ObservablePair {
    NormalOp x;
    NormalOp p;
};

namespace detail {

inline NormalOp ladder_x_comm(const std::vector<Expr>& S) {
    // [x, Q1] = i sum (k+1) S_{k+1} d^k
    ExprList c;
    for (std::size_t k = 0; k + 1 < S.size(); ++k)
        c.push_back(constant(Scalar::imaginary_unit()) *
                    constant(Scalar(std::int64_t(k + 1))) * S[k + 1]);
    return NormalOp::from_coeffs(std::move(c));
}

inline NormalOp ladder_p_comm(const std::vector<Expr>& S) {
    // [p, Q1] = - sum S_k' d^k
    ExprList c;
    for (const Expr& sk : S) c.push_back(neg(differentiate(sk)));
    return NormalOp::from_coeffs(std::move(c));
}

inline Expr s_at(const std::vector<Expr>& S, std::size_t k) {
    return k < S.size() ? S[k] : constant(Scalar());
}

// [[x, Q1], Q1] = sum_k T_k d^k
inline NormalOp ladder_x_double(const std::vector<Expr>& S) {
    int deg = int(S.size()) - 1;
    ExprList c;
    for (int k = 0; k <= 2 * deg; ++k) {
        Expr acc = constant(Scalar());
        for (int l = 0; l <= k; ++l)
            for (int mm = k - l + 1; mm <= deg; ++mm) {
                Expr term = constant(binomial(mm, k - l)) *
                            (constant(Scalar(std::int64_t(mm + 1))) * s_at(S, mm + 1) *
                                 differentiate(s_at(S, l), l + mm - k) -
                             constant(Scalar(std::int64_t(l + 1))) * s_at(S, mm) *
                                 differentiate(s_at(S, l + 1), l + mm - k));
                acc = acc + term;
            }
        c.push_back(simplify(acc));
    }
    return NormalOp::from_coeffs(std::move(c));
}

// [[p, Q1], Q1] = i sum_k U_k d^k
inline NormalOp ladder_p_double(const std::vector<Expr>& S) {
    int deg = int(S.size()) - 1;
    ExprList c;
    for (int k = 0; k <= 2 * deg; ++k) {
        Expr acc = constant(Scalar());
        for (int l = 0; l <= k; ++l)
            for (int mm = k - l + 1; mm <= deg; ++mm) {
                Expr term = constant(binomial(mm, k - l)) *
                            (differentiate(s_at(S, mm)) *
                                 differentiate(s_at(S, l), l + mm - k) -
                             s_at(S, mm) * differentiate(s_at(S, l), l + mm - k + 1));
                acc = acc + term;
            }
        c.push_back(simplify(constant(Scalar::imaginary_unit()) * acc));
    }
    return NormalOp::from_coeffs(std::move(c));
}

} // namespace detail

inline ObservablePair pseudo_observables(const DerivedModel& m) {
    Scalar e(m.spec.epsilon);
    Scalar half_e = e * Scalar(1, 2);
    Scalar e2_8 = e * e * Scalar(1, 8);

    auto dress = [&](const NormalOp& a) {
        NormalOp c1 = commutator(m.q1, a);
        NormalOp c2 = commutator(m.q1, c1);
        return a + scale(half_e, c1) + scale(e2_8, c2);
    };
    ObservablePair prod{dress(NormalOp::position()), dress(NormalOp::momentum())};

    // independent route: assemble the same corrections from the ladder sums
    NormalOp x_sum = NormalOp::position() -
                     scale(half_e, detail::ladder_x_comm(m.s)) +
                     scale(e2_8, detail::ladder_x_double(m.s));
    NormalOp p_sum = NormalOp::momentum() -
                     scale(half_e, detail::ladder_p_comm(m.s)) +
                     scale(e2_8, detail::ladder_p_double(m.s));

    CompareOptions opt{m.spec.domain, 100, 1e-8, 20260815};
    OpCompareResult rx = op_compare(prod.x, x_sum, opt);
    OpCompareResult rp = op_compare(prod.p, p_sum, opt);
    if (!rx.close || !rp.close)
        throw InternalConsistencyError(
            "observable routes disagree (x err " + std::to_string(rx.max_rel_err) +
            " at k=" + std::to_string(rx.worst_k) + ", p err " +
            std::to_string(rp.max_rel_err) + " at k=" + std::to_string(rp.worst_k) + ")");
    return prod;
}

// Hand-expanded second-order forms of the same observables, in powers of the
// momentum. Valid for any spec; used as an independent target in tests and
// reports.
inline ObservablePair closed_form_observables(const DerivedModel& m) {
    const Expr& v = m.spec.real_potential;
    Scalar c0 = m.spec.c0, c1 = m.spec.c1;
    double eps = m.spec.epsilon;
    auto d = [&](int n) { return differentiate(v, n); };
    Expr I = constant(Scalar::imaginary_unit());
    Expr e1 = constant(Scalar(eps));
    Expr e2 = constant(Scalar(eps * eps));
    Expr C0 = constant(c0), C1 = constant(c1);

    // X = x - i e (3 c1 V + c0 + 3 c1 p^2)
    //       + (3/4) e^2 c1 [ -c1 (6 V V' + V''') - 2 c0 V'
    //                        - 6 i c1 V'' p + 6 c1 V' p^2 ]
    Expr q34 = rational(3, 4);
    ExprList xm(3, constant(Scalar()));
    xm[0] = var() - I * e1 * (constant(c1 * Scalar(3)) * v + C0) +
            q34 * e2 * C1 *
                (neg(C1) * (constant(std::int64_t(6)) * v * d(1) + d(3)) -
                 constant(c0 * Scalar(2)) * d(1));
    xm[1] = neg(q34 * e2 * C1 * constant(std::int64_t(6)) * I * C1 * d(2));
    xm[2] = neg(I * e1 * constant(c1 * Scalar(3))) +
            q34 * e2 * C1 * constant(std::int64_t(6)) * C1 * d(1);

    // P = p + (3/2) e c1 (V'' + 2 i V' p)
    //       + (3/4) i e^2 c1 { c1 (3 V' V'' - 3 V V''' + V^(5)) - c0 V'''
    //                          + i [c1 (6 V'^2 - 6 V V'' + 5 V'''') - 2 c0 V''] p
    //                          - 9 c1 V''' p^2 - 6 i c1 V'' p^3 }
    Expr q32 = rational(3, 2);
    ExprList pm(4, constant(Scalar()));
    pm[0] = q32 * e1 * C1 * d(2) +
            q34 * I * e2 * C1 *
                (C1 * (constant(std::int64_t(3)) * d(1) * d(2) -
                       constant(std::int64_t(3)) * v * d(3) + d(5)) -
                 C0 * d(3));
    pm[1] = constant(std::int64_t(1)) +
            q32 * e1 * C1 * constant(std::int64_t(2)) * I * d(1) +
            q34 * I * e2 * C1 * I *
                (C1 * (constant(std::int64_t(6)) * pow(d(1), 2) -
                       constant(std::int64_t(6)) * v * d(2) +
                       constant(std::int64_t(5)) * d(4)) -
                 constant(c0 * Scalar(2)) * d(2));
    pm[2] = neg(q34 * I * e2 * C1 * constant(std::int64_t(9)) * C1 * d(3));
    pm[3] = neg(q34 * I * e2 * C1 * constant(std::int64_t(6)) * I * C1 * d(2));

    ExprList xs, ps;
    for (Expr& t : xm) xs.push_back(simplify(t));
    for (Expr& t : pm) ps.push_back(simplify(t));
    return {from_momentum_coefficients(xs), from_momentum_coefficients(ps)};
}

// Maps a hermitian-picture wavefunction to its non-hermitian counterpart:
//   Psi = psi - (eps/2) Q1 psi + (eps^2/8) Q1^2 psi.
inline Expr map_wavefunction(const DerivedModel& m, const Expr& psi) {
    Scalar e(m.spec.epsilon);
    Expr first = apply(m.q1, psi);
    Expr second = apply(m.q1 * m.q1, psi);
    return simplify(psi + constant(-(e * Scalar(1, 2))) * first +
                    constant(e * e * Scalar(1, 8)) * second);
}

} // namespace ptpdm
