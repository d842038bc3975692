#pragma once

#include "ptpdm/model.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace ptpdm {

// One golden assertion of a worked example: an expression or value produced
// by the pipeline compared against its frozen expected form.
struct GoldenCheck {
    std::string id;
    bool pass = false;
    double max_err = 0.0;
    std::string detail;
};

// One entry of the audit that re-derives a published closed form from
// scratch and diffs it against the text as printed. A mismatch is recorded,
// not failed: the derived form is the authoritative one and is what every
// other check consumes.
struct TranscriptionAudit {
    std::string id;
    bool matches = false;
    double max_gap = 0.0; // pointwise gap between printed and derived forms
    std::string printed;
    std::string derived;
    std::string note;
};

struct ReproduceReport {
    std::string example_id;
    std::vector<GoldenCheck> checks;
    std::vector<TranscriptionAudit> audits;

    bool all_passed() const {
        for (const GoldenCheck& c : checks)
            if (!c.pass) return false;
        return true;
    }
};

// Value tuples for the unit layer. The coupling rides along because its
// dimensionless counterpart is rescaled nonlinearly by the model scales.
struct DimensionalTuple {
    double x = 0.0, p = 0.0, energy = 0.0, coupling = 0.0;
};
struct DimensionlessTuple {
    double x = 0.0, p = 0.0, energy = 0.0, coupling = 0.0;
};

// ---------------------------------------------------------------------------
// Anharmonic oscillator with a cubic antihermitian part
// ---------------------------------------------------------------------------

// Harmonic well of dimensionless frequency mu whose generator constants are
// tuned so the antihermitian part comes out as exactly x^3. The length unit
// is sqrt(hbar/(m0 omega_ref)) with omega_ref the reference frequency, so mu
// is the physical frequency in units of omega_ref.
struct CubicExample {
    double mu = 1.0;
    double epsilon = 0.05;
    double m0 = 1.0;
    double hbar = 1.0;
    double omega_ref = 1.0;

    double length() const { return std::sqrt(hbar / (m0 * omega_ref)); }
    double energy_unit() const { return hbar * omega_ref; }

    ModelSpec spec() const {
        if (!(mu > 0.0))
            throw DomainError("oscillator frequency must be positive");
        ModelSpec s;
        if (mu == 1.0) {
            s.real_potential = simplify(rational(1, 2) * pow(var(), 2));
            s.c1 = Scalar(-2, 3);
        } else {
            s.real_potential =
                simplify(constant(0.5 * mu * mu) * pow(var(), 2));
            s.c1 = Scalar(-2.0 / (3.0 * mu * mu * mu * mu));
        }
        s.c0 = Scalar(0);
        s.epsilon = epsilon;
        s.domain = {-2.0, 2.0};
        return s;
    }

    DimensionlessTuple to_dimensionless(const DimensionalTuple& d) const {
        double l = length(), e = energy_unit();
        return {d.x / l, d.p * l / hbar, d.energy / e,
                d.coupling * l * l * l / e};
    }
    DimensionalTuple to_dimensional(const DimensionlessTuple& d) const {
        double l = length(), e = energy_unit();
        return {d.x * l, d.p * hbar / l, d.energy * e,
                d.coupling * e / (l * l * l)};
    }
};

// ---------------------------------------------------------------------------
// Trigonometric well example
// ---------------------------------------------------------------------------

// Well depth v0 = nu lambda(lambda-1)/2 in the energy unit nu = hbar^2 k^2/m0;
// the generator constants 1/3, -1/3 produce the sec^4 tan antihermitian part.
// The dimensional coupling (an energy) maps to the dimensionless one through
// eps = coupling * nu / (2 v0 (v0 - nu)).
struct PoschlTellerExample {
    double lambda = 3.0;
    double coupling = 0.12; // dimensional, energy units
    double k = 1.0;
    double m0 = 1.0;
    double hbar = 1.0;

    double length() const { return 1.0 / k; }
    double nu() const { return hbar * hbar * k * k / m0; }
    double v0() const { return 0.5 * nu() * lambda * (lambda - 1.0); }

    double dimensionless_coupling() const {
        return coupling * nu() / (2.0 * v0() * (v0() - nu()));
    }

    void validate() const {
        if (!(lambda > 2.0))
            throw DomainError("well exponent must exceed 2");
        if (!(k > 0.0) || !(m0 > 0.0) || !(hbar > 0.0))
            throw DomainError("scales must be positive");
    }

    ModelSpec spec() const {
        validate();
        double a = lambda * (lambda - 1.0);
        ModelSpec s;
        if (a == std::floor(a) && std::abs(a) < 1e6)
            s.real_potential = simplify(constant(Scalar(std::int64_t(a), 2)) *
                                        pow(sec(var()), 2));
        else
            s.real_potential =
                simplify(constant(0.5 * a) * pow(sec(var()), 2));
        s.c0 = Scalar(1, 3);
        s.c1 = Scalar(-1, 3);
        s.epsilon = dimensionless_coupling();
        // region where the second-order corrections stay small (the guard
        // bound eps^2 max|m2| <= 1/2 fails beyond about 1.05 at the default
        // coupling); the well walls sit at pi/2
        s.domain = {-1.0, 1.0};
        return s;
    }

    DimensionlessTuple to_dimensionless(const DimensionalTuple& d) const {
        return {d.x * k, d.p / (hbar * k), d.energy / nu(),
                d.coupling * nu() / (2.0 * v0() * (v0() - nu()))};
    }
    DimensionalTuple to_dimensional(const DimensionlessTuple& d) const {
        return {d.x / k, d.p * hbar * k, d.energy * nu(),
                d.coupling * 2.0 * v0() * (v0() - nu()) / nu()};
    }
};

// ---------------------------------------------------------------------------
// Report machinery
// ---------------------------------------------------------------------------

namespace detail {

inline GoldenCheck expr_golden(const std::string& id, const Expr& produced,
                               const Expr& expected, const CompareOptions& opt,
                               const std::string& detail_text = "") {
    CompareResult r = expr_compare(produced, expected, opt);
    return {id, r.close, r.max_rel_err, detail_text};
}

inline GoldenCheck op_golden(const std::string& id, const NormalOp& produced,
                             const NormalOp& expected, const CompareOptions& opt,
                             const std::string& detail_text = "") {
    OpCompareResult r = op_compare(produced, expected, opt);
    std::string d = detail_text;
    if (!r.close)
        d += (d.empty() ? "" : "; ") +
             std::string("worst derivative order ") + std::to_string(r.worst_k);
    return {id, r.close, r.max_rel_err, d};
}

inline GoldenCheck value_golden(const std::string& id, double produced,
                                double expected, double tol,
                                const std::string& detail_text = "") {
    double err = std::abs(produced - expected) /
                 std::max(1.0, std::abs(expected));
    return {id, err <= tol, err, detail_text};
}

// The quadratic part of the wavefunction map as printed: a bracket of
// derivative coefficients in terms of V, c0, c1. The constant term is
// printed with the square of the potential where the derivation produces
// the square of its slope; both variants are built here so the audit can
// show the gap.
struct WaveBracket {
    std::vector<Expr> printed;
    std::vector<Expr> derived_d0_variant; // printed form with the slope squared
};

inline WaveBracket wave_bracket_printed(const Expr& v, const Scalar& c0s,
                                        const Scalar& c1s) {
    Expr c0 = constant(c0s), c1 = constant(c1s);
    Expr v1 = differentiate(v), v2 = differentiate(v, 2),
         v3 = differentiate(v, 3), v4 = differentiate(v, 4);
    Expr three = constant(std::int64_t(3)), six = constant(std::int64_t(6));
    Expr d0_printed =
        three * c1 *
        (c1 * (three * pow(v, 2) + six * v * v2 - constant(std::int64_t(2)) * v4) +
         constant(std::int64_t(2)) * c0 * v2);
    Expr d0_slope =
        three * c1 *
        (c1 * (three * pow(v1, 2) + six * v * v2 - constant(std::int64_t(2)) * v4) +
         constant(std::int64_t(2)) * c0 * v2);
    Expr d1 = six * c1 *
              (c1 * (constant(std::int64_t(12)) * v * v1 -
                     constant(std::int64_t(5)) * v3) +
               constant(std::int64_t(4)) * c0 * v1);
    Expr d2 = constant(std::int64_t(2)) *
              (constant(std::int64_t(9)) * c1 * c1 *
                   (constant(std::int64_t(2)) * pow(v, 2) -
                    constant(std::int64_t(3)) * v2) +
               constant(std::int64_t(12)) * c0 * c1 * v +
               constant(std::int64_t(2)) * c0 * c0);
    Expr d3 = neg(constant(std::int64_t(48)) * c1 * c1 * v1);
    Expr d4 = neg(constant(std::int64_t(8)) * c1 *
                  (three * c1 * v + c0));
    Expr zero = constant(Scalar());
    Expr d6 = constant(std::int64_t(4)) * c1 * c1;

    WaveBracket b;
    b.printed = {simplify(d0_printed), simplify(d1), simplify(d2),
                 simplify(d3), simplify(d4), zero, simplify(d6)};
    b.derived_d0_variant = b.printed;
    b.derived_d0_variant[0] = simplify(d0_slope);
    return b;
}

// Audits the quadratic wavefunction bracket of a derived model against the
// printed closed form. Two defects are recorded when present: the constant
// coefficient (squared potential vs squared slope) and the structural fact
// that the printed corrections are bare operators with no wavefunction to
// act on.
inline void audit_wave_bracket(const DerivedModel& m, const CompareOptions& opt,
                               std::vector<TranscriptionAudit>& out) {
    NormalOp q2 = m.q1 * m.q1;
    WaveBracket wb = wave_bracket_printed(m.spec.real_potential, m.spec.c0,
                                          m.spec.c1);
    int deg = std::max<int>(q2.degree(), int(wb.printed.size()) - 1);
    for (int k = 0; k <= deg; ++k) {
        Expr machine = simplify(neg(q2.coeff(k))); // q1^2 = -sum_k W_k d^k
        Expr printed = k < int(wb.printed.size()) ? wb.printed[std::size_t(k)]
                                                  : constant(Scalar());
        CompareResult r = expr_compare(machine, printed, opt);
        TranscriptionAudit a;
        a.id = "wavefunction_map_quadratic_d" + std::to_string(k);
        a.matches = r.close;
        a.max_gap = r.max_rel_err;
        a.printed = render(printed);
        a.derived = render(machine);
        if (!r.close && k == 0) {
            CompareResult fixed =
                expr_compare(machine, wb.derived_d0_variant[0], opt);
            if (fixed.close)
                a.note = "printed constant term squares the potential; the "
                         "derivation squares its slope (prime lost in print)";
        }
        out.push_back(std::move(a));
    }
    TranscriptionAudit structural;
    structural.id = "wavefunction_map_missing_target";
    structural.matches = false;
    structural.max_gap = 0.0;
    structural.printed = "psi + (i eps/2)[bracket] - (eps^2/8){bracket}";
    structural.derived = "psi + (i eps/2)[bracket] psi - (eps^2/8){bracket} psi";
    structural.note = "printed correction terms are bare operators; the "
                      "derived map applies them to the wavefunction";
    out.push_back(std::move(structural));
}

} // namespace detail

// ---------------------------------------------------------------------------
// Cubic reproduction
// ---------------------------------------------------------------------------

inline ReproduceReport reproduce_cubic(double mu = 1.0, double epsilon = 0.05) {
    CubicExample ex;
    ex.mu = mu;
    ex.epsilon = epsilon;
    ModelSpec spec = ex.spec();
    DerivedModel m = derive(spec);
    for (const ModelWarning& w : m.warnings)
        throw DomainError("cubic example outside its validity window: " + w.id);

    ReproduceReport rep;
    rep.example_id = "cubic";
    CompareOptions tight{{-2.0, 2.0}, 40, 1e-12, 811};
    CompareOptions op_opt{{-2.0, 2.0}, 20, 1e-9, 812};

    double mu2 = mu * mu, mu4 = mu2 * mu2, mu6 = mu4 * mu2;

    rep.checks.push_back(detail::expr_golden(
        "antihermitian_part_is_cubic", m.vi, simplify(pow(var(), 3)), tight,
        "generator constants 0 and -2/(3 mu^4) must give exactly x^3"));

    rep.checks.push_back(detail::expr_golden(
        "mass_correction", m.m2,
        simplify(constant(6.0 / mu4) * pow(var(), 2)), tight));

    rep.checks.push_back(detail::expr_golden(
        "potential_correction", m.veff2,
        simplify(constant(1.5 * mu2 / mu4) * pow(var(), 4) -
                 constant(2.0 / mu4)),
        tight, "expected (3 mu^2 x^4 - 4)/(2 mu^4)"));

    double factor = evaluate(inverse_mass_factor(m), 1.0).real();
    rep.checks.push_back(detail::value_golden(
        "mass_ratio_at_unit_x", 1.0 / factor,
        1.0 / (1.0 + 6.0 * epsilon * epsilon / mu4), 1e-12,
        "m(1)/m0 = " + std::to_string(1.0 / factor)));

    // printed dressed observables, as momentum polynomials
    Expr x = var();
    Expr I = constant(Scalar::imaginary_unit());
    double e = epsilon;
    Expr x_c0 = constant(e / mu4) * I * (constant(mu2) * pow(x, 2)) +
                constant(e * e / mu6) *
                    (neg(constant(mu2) * pow(x, 3))) + x;
    Expr x_c1 = constant(e * e / mu6) * constant(std::int64_t(-2)) * I;
    Expr x_c2 = constant(e / mu4) * I * constant(std::int64_t(2)) +
                constant(e * e / mu6) * constant(std::int64_t(2)) * x;
    NormalOp x_printed = from_momentum_coefficients(
        {simplify(x_c0), simplify(x_c1), simplify(x_c2)});

    Expr p_c0 = neg(constant(e / mu2)) * I * neg(I) +
                constant(e * e * mu2 / mu6) * I * x;
    Expr p_c1 = neg(constant(e / mu2)) * I * constant(std::int64_t(2)) * x -
                constant(e * e / mu6) * constant(mu2) * pow(x, 2) +
                constant(std::int64_t(1));
    Expr p_c3 = constant(2.0 * e * e / mu6);
    NormalOp p_printed = from_momentum_coefficients(
        {simplify(p_c0), simplify(p_c1), constant(Scalar()), p_c3});

    ObservablePair obs = closed_form_observables(m);
    rep.checks.push_back(detail::op_golden("position_observable_printed_form",
                                           obs.x, x_printed, op_opt));
    rep.checks.push_back(detail::op_golden("momentum_observable_printed_form",
                                           obs.p, p_printed, op_opt));

    TranscriptionAudit xa;
    xa.id = "position_observable_expansion";
    xa.matches = rep.checks[rep.checks.size() - 2].pass;
    xa.max_gap = rep.checks[rep.checks.size() - 2].max_err;
    xa.printed = "x + i(e/mu^4)(mu^2 x^2 + 2 p^2) "
                 "+ (e^2/mu^6)(-mu^2 x^3 - 2 i p + 2 x p^2)";
    xa.derived = render(obs.x.coeff(0)) + " ; d: " + render(obs.x.coeff(1)) +
                 " ; d^2: " + render(obs.x.coeff(2));
    rep.audits.push_back(std::move(xa));

    TranscriptionAudit pa;
    pa.id = "momentum_observable_expansion";
    pa.matches = rep.checks.back().pass;
    pa.max_gap = rep.checks.back().max_err;
    pa.printed = "p - i(e/mu^2)(2 x p - i) "
                 "+ (e^2/mu^6)(2 p^3 - mu^2 x^2 p + i mu^2 x)";
    pa.derived = render(obs.p.coeff(0)) + " ; d: " + render(obs.p.coeff(1)) +
                 " ; d^3: " + render(obs.p.coeff(3));
    rep.audits.push_back(std::move(pa));

    detail::audit_wave_bracket(m, tight, rep.audits);
    return rep;
}

// ---------------------------------------------------------------------------
// Trigonometric-well reproduction
// ---------------------------------------------------------------------------

inline ReproduceReport reproduce_poschl_teller(double lambda = 3.0,
                                               double coupling = 0.12,
                                               double k = 1.0, double m0 = 1.0,
                                               double hbar = 1.0) {
    PoschlTellerExample ex;
    ex.lambda = lambda;
    ex.coupling = coupling;
    ex.k = k;
    ex.m0 = m0;
    ex.hbar = hbar;
    ModelSpec spec = ex.spec();
    DerivedModel m = derive(spec);
    for (const ModelWarning& w : m.warnings)
        throw DomainError("well example outside its validity window: " + w.id);

    ReproduceReport rep;
    rep.example_id = "poschl_teller";
    CompareOptions tight{{-1.0, 1.0}, 40, 1e-12, 821};
    CompareOptions op_opt{{-1.0, 1.0}, 20, 1e-9, 822};

    double a = lambda * (lambda - 1.0); // twice the well depth in energy units
    double b = 0.5 * a * (a - 2.0);     // antihermitian coefficient
    Expr w = pow(sec(var()), 2);
    Expr t = tan(var());
    Expr I = constant(Scalar::imaginary_unit());

    rep.checks.push_back(detail::expr_golden(
        "antihermitian_part", m.vi, simplify(constant(b) * pow(sec(var()), 4) * t),
        tight,
        "coefficient (lam+1)lam(lam-1)(lam-2)/2 = " + std::to_string(b)));

    Expr m2_expected = simplify(constant(b) * pow(sec(var()), 4) *
                                (constant(std::int64_t(5)) * w -
                                 constant(std::int64_t(4))));
    rep.checks.push_back(detail::expr_golden("mass_correction", m.m2,
                                             m2_expected, tight));
    rep.checks.push_back(detail::value_golden(
        "mass_correction_at_origin", evaluate(m.m2, 0.0).real(), b, 1e-12));

    // effective potential correction: (b/2)[(5a/2-70) w^4 + (85-2a) w^3 - 20 w^2]
    Expr veff_expected =
        simplify(constant(0.5 * b) *
                 (constant(2.5 * a - 70.0) * pow(w, 4) +
                  constant(85.0 - 2.0 * a) * pow(w, 3) -
                  constant(std::int64_t(20)) * pow(w, 2)));
    GoldenCheck veff_check = detail::expr_golden(
        "potential_correction", m.veff2, veff_expected, tight);
    rep.checks.push_back(veff_check);

    TranscriptionAudit va;
    va.id = "effective_potential_expansion";
    va.matches = veff_check.pass;
    va.max_gap = veff_check.max_err;
    va.printed = "sec^4 [5(V0 - 14 nu) sec^4 - (4 V0 - 85 nu) sec^2 - 20 nu] "
                 "/ (4 V0 (V0 - nu)), converted to the energy unit";
    va.derived = render(m.veff2);
    rep.audits.push_back(std::move(va));

    // dimensional value at the origin: V0 + coupling^2 (V0 - 5 nu)/(4 V0 (V0 - nu))
    double nu = ex.nu(), v0 = ex.v0(), epsq = ex.dimensionless_coupling();
    double veff0_dim =
        nu * (evaluate(spec.real_potential, 0.0).real() +
              epsq * epsq * evaluate(m.veff2, 0.0).real());
    rep.checks.push_back(detail::value_golden(
        "effective_potential_origin_dimensional", veff0_dim,
        v0 + coupling * coupling * (v0 - 5.0 * nu) / (4.0 * v0 * (v0 - nu)),
        1e-12));

    // printed dressed position, converted to the dimensionless variables
    double e = epsq;
    Expr xq_c0 =
        var() + constant(e) * I * (constant(0.5 * a) * w - rational(1, 3)) -
        constant(e * e * 0.5 * a) * w *
            ((constant(0.5 * a + 2.0) * w - constant(std::int64_t(1))) * t);
    Expr xq_c1 = neg(constant(e * e * 0.5 * a)) * w * I *
                 (constant(std::int64_t(3)) * w - constant(std::int64_t(2)));
    Expr xq_c2 = constant(e) * I + constant(e * e * 0.5 * a) * w * t;
    NormalOp x_printed = from_momentum_coefficients(
        {simplify(xq_c0), simplify(xq_c1), simplify(xq_c2)});

    ObservablePair obs = closed_form_observables(m);
    GoldenCheck xcheck = detail::op_golden("position_observable_printed_form",
                                           obs.x, x_printed, op_opt);
    rep.checks.push_back(xcheck);

    TranscriptionAudit xa;
    xa.id = "position_observable_expansion";
    xa.matches = xcheck.pass;
    xa.max_gap = xcheck.max_err;
    xa.printed = "x - i eps/(2 k V0 (V0 - nu)) (-V0 sec^2 + nu/3 - p^2/m0) - "
                 "second-order bracket, converted to dimensionless form";
    xa.derived = render(obs.x.coeff(0));
    rep.audits.push_back(std::move(xa));

    // printed dressed momentum. The printed constant term of the quadratic
    // bracket is even in x; the derivation multiplies it by tan. Both are
    // built: the corrected form feeds the golden check, the literal one
    // feeds the audit.
    Expr p1_c0 = neg(constant(e * 0.5 * a)) * w *
                 (constant(std::int64_t(3)) * w - constant(std::int64_t(2)));
    Expr p1_c1 = neg(I) * constant(e * a) * w * t;
    Expr bracket_c0_even = constant(1.5 * a - 60.0) * pow(w, 2) +
                           constant(std::int64_t(38)) * w -
                           constant(std::int64_t(2));
    Expr bracket_c1 = I * (constant(0.5 * a - 50.0) * pow(w, 2) +
                           constant(std::int64_t(49)) * w -
                           constant(std::int64_t(6)));
    Expr bracket_c2 = constant(std::int64_t(6)) *
                      (constant(std::int64_t(3)) * w -
                       constant(std::int64_t(1))) *
                      t;
    Expr bracket_c3 = I * (constant(std::int64_t(3)) * w -
                           constant(std::int64_t(2)));
    auto p_with_c0 = [&](const Expr& c0term) {
        Expr pref = neg(I) * constant(e * e * 0.5 * a) * w;
        Expr c0 = simplify(p1_c0 + pref * c0term);
        Expr c1 = simplify(constant(std::int64_t(1)) + p1_c1 + pref * bracket_c1);
        Expr c2 = simplify(pref * bracket_c2);
        Expr c3 = simplify(pref * bracket_c3);
        return from_momentum_coefficients({c0, c1, c2, c3});
    };
    NormalOp p_corrected = p_with_c0(simplify(bracket_c0_even * t));
    NormalOp p_literal = p_with_c0(bracket_c0_even);

    GoldenCheck pcheck = detail::op_golden("momentum_observable_printed_form",
                                           obs.p, p_corrected, op_opt,
                                           "constant term of the quadratic "
                                           "bracket carries the restored tan "
                                           "factor");
    rep.checks.push_back(pcheck);

    OpCompareResult literal_gap = op_compare(obs.p, p_literal, op_opt);
    TranscriptionAudit pa;
    pa.id = "momentum_observable_quadratic_constant_term";
    pa.matches = literal_gap.close;
    pa.max_gap = literal_gap.max_rel_err;
    pa.printed = "sqrt(m0 nu) [3 V0 sec^4 - 2 nu (30 sec^4 - 19 sec^2 + 1)]";
    pa.derived = render(obs.p.coeff(0));
    pa.note = "printed term is even in x and would break the antiunitary "
              "symmetry; the derived coefficient carries an extra tan factor";
    rep.audits.push_back(std::move(pa));

    // wavefunction corrections for the bound state cos^lambda
    if (lambda == std::floor(lambda) && lambda >= 3.0 && lambda < 40.0) {
        Expr psi = pow(cos(var()), std::int64_t(lambda));
        Expr first = simplify(constant(Scalar(-1, 2)) * apply(m.q1, psi));
        double c43 = (lambda + 1.0) * lambda * (lambda - 1.0) / 6.0;
        Expr first_expected =
            simplify(I * constant(c43) * (w + constant(std::int64_t(2))) * t * psi);
        GoldenCheck w1 = detail::expr_golden("wavefunction_first_order", first,
                                             first_expected, tight,
                                             "relative to the bound state");
        rep.checks.push_back(w1);

        NormalOp q2 = m.q1 * m.q1;
        Expr second = simplify(rational(1, 8) * apply(q2, psi));
        double c2 = (lambda + 1.0) * lambda * (lambda - 1.0) / 72.0;
        Expr second_expected = simplify(
            neg(constant(c2)) *
            (constant((lambda - 4.0) * (lambda - 2.0) * (lambda + 15.0)) *
                 pow(w, 3) +
             constant(3.0 * (lambda - 2.0) *
                      (lambda * lambda - 4.0 * lambda + 15.0)) *
                 pow(w, 2) -
             constant(4.0 * (lambda + 1.0) * lambda * (lambda - 1.0))) *
            psi);
        GoldenCheck w2 = detail::expr_golden("wavefunction_second_order",
                                             second, second_expected, tight);
        rep.checks.push_back(w2);

        TranscriptionAudit wa;
        wa.id = "bound_state_map_expansion";
        wa.matches = w1.pass && w2.pass;
        wa.max_gap = std::max(w1.max_err, w2.max_err);
        wa.printed = "cos^lam {1 + (i/6) e (lam+1)lam(lam-1)(sec^2+2) tan - "
                     "(e^2/72)(lam+1)lam(lam-1)[...]}";
        wa.derived = "first order: " + render(first);
        wa.note = "printed closed form reproduced term by term";
        rep.audits.push_back(std::move(wa));
    }

    detail::audit_wave_bracket(m, tight, rep.audits);
    return rep;
}

} // namespace ptpdm
