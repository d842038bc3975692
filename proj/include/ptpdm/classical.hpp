#pragma once

#include "ptpdm/model.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

namespace ptpdm {

// Phase-space counterpart of the trigonometric-well model once the quantum
// scale is gone: a position-dependent mass, a corrected potential, and the
// complex dressed coordinates that replace the canonical pair. All closed
// forms are second order in the coupling.
class ClassicalModel {
public:
    ClassicalModel(double v0, double k, double m0, double eps)
        : v0_(v0), k_(k), m0_(m0), eps_(eps) {
        if (!(v0 > 0.0) || !(k > 0.0) || !(m0 > 0.0))
            throw DomainError("well depth, wavenumber and rest mass must be positive");
    }

    double well_depth() const { return v0_; }
    double wavenumber() const { return k_; }
    double rest_mass() const { return m0_; }
    double coupling() const { return eps_; }

    // m0 [1 - eps^2/(2 v0^2) sec^4(kx) (5 sec^2(kx) - 4)]
    double mass(double xc) const {
        double w = sec_squared(xc);
        return m0_ * (1.0 - 0.5 * eps_ * eps_ / (v0_ * v0_) * w * w * (5.0 * w - 4.0));
    }

    // v0 sec^2(kx) + eps^2/(4 v0) sec^6(kx) (5 sec^2(kx) - 4)
    double potential(double xc) const {
        double w = sec_squared(xc);
        return v0_ * w + 0.25 * eps_ * eps_ / v0_ * w * w * w * (5.0 * w - 4.0);
    }

    double hamiltonian(double xc, double pc) const {
        double m = mass(xc);
        if (!(m > 0.0))
            throw DomainError("mass is not positive at the requested point");
        return 0.5 * pc * pc / m + potential(xc);
    }

    // x + i eps/(2 k v0^2) (v0 sec^2 + p^2/m0)
    //   - eps^2/(4 k v0^3) sec^2 (v0 sec^2 - p^2/m0) tan
    std::complex<double> dressed_position(double xc, double pc) const {
        double w = sec_squared(xc);
        double t = std::tan(k_ * xc);
        double kin = pc * pc / m0_;
        double re = xc - 0.25 * eps_ * eps_ / (k_ * v0_ * v0_ * v0_) * w *
                             (v0_ * w - kin) * t;
        double im = 0.5 * eps_ / (k_ * v0_ * v0_) * (v0_ * w + kin);
        return {re, im};
    }

    // p - i eps/v0 sec^2 tan p
    //   + eps^2/(4 v0^3) sec^2 [v0 sec^4 + (3 sec^2 - 2) p^2/m0] p
    std::complex<double> dressed_momentum(double xc, double pc) const {
        double w = sec_squared(xc);
        double t = std::tan(k_ * xc);
        double kin = pc * pc / m0_;
        double re = pc + 0.25 * eps_ * eps_ / (v0_ * v0_ * v0_) * w *
                             (v0_ * w * w + (3.0 * w - 2.0) * kin) * pc;
        double im = -eps_ / v0_ * w * t * pc;
        return {re, im};
    }

    // Curvature frequency at the well bottom for the uncorrected potential.
    double small_oscillation_frequency() const {
        return k_ * std::sqrt(2.0 * v0_ / m0_);
    }

    double mass_slope(double xc) const {
        double w = sec_squared(xc);
        double wp = 2.0 * k_ * w * std::tan(k_ * xc);
        return -m0_ * 0.5 * eps_ * eps_ / (v0_ * v0_) * (15.0 * w - 8.0) * w * wp;
    }

    double potential_slope(double xc) const {
        double w = sec_squared(xc);
        double wp = 2.0 * k_ * w * std::tan(k_ * xc);
        return v0_ * wp + 0.25 * eps_ * eps_ / v0_ * (20.0 * w - 12.0) * w * w * wp;
    }

private:
    double sec_squared(double xc) const {
        double c = std::cos(k_ * xc);
        if (std::abs(c) < 1e-9)
            throw PoleError("phase-space point sits on a wall of the well");
        return 1.0 / (c * c);
    }

    double v0_, k_, m0_, eps_;
};

inline ClassicalModel build_classical_pt_model(double v0, double k, double m0,
                                               double eps) {
    return ClassicalModel(v0, k, m0, eps);
}

struct Trajectory {
    std::vector<double> t;
    std::vector<double> x;
    std::vector<double> p;
    std::vector<double> energy;
    std::vector<std::complex<double>> dressed_x;
    std::vector<std::complex<double>> dressed_p;
    double max_energy_drift = 0.0; // max |E(t) - E(0)| / |E(0)|
};

namespace detail {

struct PhaseDeriv {
    double dx, dp;
};

inline PhaseDeriv hamilton_rhs(const ClassicalModel& cm, double x, double p) {
    double m = cm.mass(x);
    double msq = m * m;
    return {p / m, 0.5 * p * p * cm.mass_slope(x) / msq - cm.potential_slope(x)};
}

} // namespace detail

// Symplectic propagation of the dressed-well dynamics. Constant-mass motion
// uses kick-drift-kick leapfrog; with a position-dependent mass the
// Hamiltonian is no longer separable and an implicit midpoint rule is used
// instead. A non-positive dt selects one thousandth of the small-oscillation
// period.
inline Trajectory integrate_trajectory(const ClassicalModel& cm, double x0,
                                       double p0, double t_end,
                                       double dt = 0.0) {
    if (!(t_end > 0.0))
        throw DomainError("integration horizon must be positive");
    if (dt <= 0.0)
        dt = 2.0 * std::numbers::pi / cm.small_oscillation_frequency() / 1000.0;

    if (!(cm.mass(x0) > 0.0))
        throw DomainError("mass is not positive at the starting point");

    long long steps = std::llround(t_end / dt);
    if (steps < 1) steps = 1;

    Trajectory out;
    auto record = [&](double t, double x, double p) {
        out.t.push_back(t);
        out.x.push_back(x);
        out.p.push_back(p);
        out.energy.push_back(cm.hamiltonian(x, p));
        out.dressed_x.push_back(cm.dressed_position(x, p));
        out.dressed_p.push_back(cm.dressed_momentum(x, p));
    };
    record(0.0, x0, p0);

    bool separable = cm.coupling() == 0.0;
    double x = x0, p = p0;
    for (long long i = 1; i <= steps; ++i) {
        if (separable) {
            double ph = p - 0.5 * dt * cm.potential_slope(x);
            x += dt * ph / cm.rest_mass();
            p = ph - 0.5 * dt * cm.potential_slope(x);
        } else {
            double xn = x, pn = p;
            {
                auto f = detail::hamilton_rhs(cm, x, p);
                xn = x + dt * f.dx;
                pn = p + dt * f.dp;
            }
            bool settled = false;
            for (int it = 0; it < 100; ++it) {
                auto f = detail::hamilton_rhs(cm, 0.5 * (x + xn), 0.5 * (p + pn));
                double xr = x + dt * f.dx;
                double pr = p + dt * f.dp;
                double move = std::abs(xr - xn) + std::abs(pr - pn);
                xn = xr;
                pn = pr;
                if (move <= 1e-14 * (1.0 + std::abs(xn) + std::abs(pn))) {
                    settled = true;
                    break;
                }
            }
            if (!settled)
                throw InternalConsistencyError(
                    "implicit midpoint iteration did not converge");
            x = xn;
            p = pn;
        }
        if (std::abs(std::cos(cm.wavenumber() * x)) < 1e-6 || !(cm.mass(x) > 0.0))
            throw DomainError("trajectory reached a singular region of the model");
        record(dt * double(i), x, p);
    }

    double e0 = out.energy.front();
    double drift = 0.0;
    for (double e : out.energy) drift = std::max(drift, std::abs(e - e0));
    out.max_energy_drift = drift / std::abs(e0);
    return out;
}

struct PhasePoint {
    double x = 0.0;
    double p = 0.0;
};

struct HbarLimitReport {
    std::vector<double> nu_values;             // decreasing quantum energy scales
    std::vector<double> finite_scale_deviation; // dressed-coordinate mismatch at each scale
    bool monotone = false;                      // mismatches shrink with the scale
    double max_rel_deviation = 0.0;             // extrapolated limit vs closed forms
    double max_dropped_term = 0.0;              // residue of the vanishing coefficients
};

namespace detail {

// Polynomial extrapolation to zero through the given abscissas.
inline std::complex<double> neville_to_zero(const std::vector<double>& xs,
                                            std::vector<std::complex<double>> ys) {
    std::size_t n = xs.size();
    for (std::size_t level = 1; level < n; ++level)
        for (std::size_t i = 0; i + level < n; ++i) {
            double xa = xs[i], xb = xs[i + level];
            ys[i] = (xa * ys[i + 1] - xb * ys[i]) / (xa - xb);
        }
    return ys[0];
}

} // namespace detail

// Rebuilds the quantum model at a sequence of shrinking energy scales nu,
// keeping the physical well depth, wavenumber, rest mass and coupling fixed,
// and compares the dressed quantum observables against the classical closed
// forms. Coefficients that scale with a half power of nu carry a leftover
// factor of the quantum scale; they are checked to shrink and dropped, while
// the surviving coefficients are extrapolated to nu = 0.
inline HbarLimitReport check_hbar_limit(const ClassicalModel& cm,
                                        const std::vector<PhasePoint>& samples,
                                        std::vector<double> nus = {1e-2, 1e-4,
                                                                   1e-6}) {
    if (samples.empty())
        throw DomainError("at least one phase-space sample is required");
    if (nus.size() < 3)
        throw DomainError("at least three quantum scales are required");
    std::sort(nus.begin(), nus.end(), std::greater<double>());

    const double v0 = cm.well_depth();
    const double k = cm.wavenumber();
    const double m0 = cm.rest_mass();
    const double eps = cm.coupling();

    double umax = 0.0;
    for (const PhasePoint& s : samples)
        umax = std::max(umax, std::abs(k * s.x));
    if (umax >= 0.5 * std::numbers::pi - 1e-3)
        throw DomainError("sample sits on a wall of the well");
    Interval dom{-(umax + 0.05), umax + 0.05};

    for (double nu : nus)
        if (!(nu > 0.0) || !(nu < v0))
            throw DomainError("quantum energy scales must lie in (0, well depth)");

    std::size_t ns = samples.size(), nn = nus.size();

    // coefficient tables indexed [observable 0=x,1=p][power j][sample][scale]
    std::vector<std::vector<std::vector<std::vector<std::complex<double>>>>> table(2);

    HbarLimitReport rep;
    rep.nu_values = nus;
    rep.finite_scale_deviation.assign(nn, 0.0);

    for (std::size_t a = 0; a < nn; ++a) {
        double nu = nus[a];
        double hbark = std::sqrt(m0 * nu);
        double lam2 = 2.0 * v0 / nu; // lambda (lambda - 1)
        double eps_dimless = eps * nu / (2.0 * v0 * (v0 - nu));

        ModelSpec ms;
        ms.real_potential =
            simplify(constant(Scalar(0.5 * lam2)) * pow(sec(var()), 2));
        ms.c0 = Scalar(1, 3);
        ms.c1 = Scalar(-1, 3);
        ms.epsilon = eps_dimless;
        ms.domain = dom;

        DerivedModel dm = derive(ms);
        ObservablePair obs = closed_form_observables(dm);
        std::vector<std::vector<Expr>> coeffs = {momentum_coefficients(obs.x),
                                                 momentum_coefficients(obs.p)};

        for (int o = 0; o < 2; ++o) {
            auto& slot = table[std::size_t(o)];
            if (slot.size() < coeffs[std::size_t(o)].size())
                slot.resize(coeffs[std::size_t(o)].size(),
                            std::vector<std::vector<std::complex<double>>>(
                                ns, std::vector<std::complex<double>>(nn)));
            for (std::size_t j = 0; j < coeffs[std::size_t(o)].size(); ++j) {
                // dimensional coefficient of p^j: the dimensionless value is
                // rescaled by the length (x) or momentum (p) unit and by
                // (hbar k)^-j for the momentum powers
                double unit = (o == 0 ? 1.0 / k : hbark);
                for (std::size_t i = 0; i < ns; ++i) {
                    std::complex<double> c =
                        evaluate(coeffs[std::size_t(o)][j], k * samples[i].x);
                    slot[j][i][a] = c * unit / std::pow(hbark, double(j));
                }
            }
        }

        // full dressed values at this finite scale, against the closed forms
        double worst = 0.0;
        for (std::size_t i = 0; i < ns; ++i) {
            std::complex<double> qx = 0.0, qp = 0.0;
            for (std::size_t j = table[0].size(); j-- > 0;)
                qx = qx * samples[i].p + table[0][j][i][a];
            for (std::size_t j = table[1].size(); j-- > 0;)
                qp = qp * samples[i].p + table[1][j][i][a];
            std::complex<double> cx = cm.dressed_position(samples[i].x, samples[i].p);
            std::complex<double> cp = cm.dressed_momentum(samples[i].x, samples[i].p);
            worst = std::max(worst, std::abs(qx - cx) / std::max(1.0, std::abs(cx)));
            worst = std::max(worst, std::abs(qp - cp) / std::max(1.0, std::abs(cp)));
        }
        rep.finite_scale_deviation[a] = worst;
    }

    // surviving coefficients carry integer powers of nu: even momentum powers
    // for the position, odd ones for the momentum; the rest scale as sqrt(nu)
    double worst_limit = 0.0;
    for (std::size_t i = 0; i < ns; ++i) {
        std::complex<double> qx = 0.0, qp = 0.0;
        for (int o = 0; o < 2; ++o) {
            for (std::size_t j = 0; j < table[std::size_t(o)].size(); ++j) {
                const auto& vals = table[std::size_t(o)][j][i];
                bool survives = (o == 0) ? (j % 2 == 0) : (j % 2 == 1);
                double pj = std::pow(samples[i].p, double(j));
                if (!survives) {
                    double first = std::abs(vals.front());
                    double last = std::abs(vals.back());
                    if (first > 1e-12 && last >= first)
                        throw InternalConsistencyError(
                            "a coefficient expected to vanish with the quantum "
                            "scale failed to shrink");
                    rep.max_dropped_term =
                        std::max(rep.max_dropped_term, last * std::abs(pj));
                    continue;
                }
                std::complex<double> lim = detail::neville_to_zero(nus, vals);
                if (o == 0)
                    qx += lim * pj;
                else
                    qp += lim * pj;
            }
        }
        std::complex<double> cx = cm.dressed_position(samples[i].x, samples[i].p);
        std::complex<double> cp = cm.dressed_momentum(samples[i].x, samples[i].p);
        worst_limit = std::max(worst_limit,
                               std::abs(qx - cx) / std::max(1.0, std::abs(cx)));
        worst_limit = std::max(worst_limit,
                               std::abs(qp - cp) / std::max(1.0, std::abs(cp)));
    }
    rep.max_rel_deviation = worst_limit;

    rep.monotone = true;
    for (std::size_t a = 0; a + 1 < nn; ++a) {
        double cur = rep.finite_scale_deviation[a];
        double nxt = rep.finite_scale_deviation[a + 1];
        if (!(nxt < cur || nxt <= 1e-12)) rep.monotone = false;
    }
    return rep;
}

} // namespace ptpdm
