#pragma once

#include "ptpdm/lapack.hpp"
#include "ptpdm/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

namespace ptpdm {

// Uniform Dirichlet grid: n interior nodes, hard walls at the box edges.
struct Grid {
    Interval box{-1.0, 1.0};
    int n = 0;
    double delta() const { return box.width() / (n + 1); }
    double x(int i) const { return box.lo + delta() * (i + 1); }
};

struct SymTridiagReal {
    std::vector<double> diag;
    std::vector<double> off; // size n-1
};

struct SymTridiagComplex {
    std::vector<std::complex<double>> diag;
    std::vector<double> off; // size n-1
};

// H = p^2/2 + V + i eps Vi on the grid; complex symmetric tridiagonal.
inline SymTridiagComplex discretize_pt(const DerivedModel& m, const Grid& g) {
    SymTridiagComplex a;
    double d2 = g.delta() * g.delta();
    a.diag.reserve(std::size_t(g.n));
    for (int i = 0; i < g.n; ++i) {
        double xi = g.x(i);
        double v = evaluate(m.spec.real_potential, xi).real();
        double w = evaluate(m.vi, xi).real();
        a.diag.push_back({1.0 / d2 + v, m.spec.epsilon * w});
    }
    a.off.assign(std::size_t(g.n - 1), -0.5 / d2);
    return a;
}

// h = (1/2) p f p + V + eps^2 veff2 with f = 1 + eps^2 m2, discretized with
// midpoint fluxes so the matrix stays exactly symmetric.
inline SymTridiagReal discretize_pdm(const DerivedModel& m, const Grid& g) {
    SymTridiagReal a;
    double d = g.delta(), d2 = d * d;
    double e2 = m.spec.epsilon * m.spec.epsilon;
    Expr f = inverse_mass_factor(m);
    auto fmid = [&](int i) { return evaluate(f, g.x(i) + 0.5 * d).real(); };
    // flux between node i-1 and i lives at x(i) - d/2 = x(i-1) + d/2
    std::vector<double> flux(std::size_t(g.n + 1));
    for (int i = 0; i <= g.n; ++i) flux[std::size_t(i)] = fmid(i - 1);
    a.diag.reserve(std::size_t(g.n));
    for (int i = 0; i < g.n; ++i) {
        double xi = g.x(i);
        double v = evaluate(m.spec.real_potential, xi).real() +
                   e2 * evaluate(m.veff2, xi).real();
        a.diag.push_back((flux[std::size_t(i)] + flux[std::size_t(i + 1)]) / (2.0 * d2) + v);
    }
    a.off.resize(std::size_t(g.n - 1));
    for (int i = 0; i + 1 < g.n; ++i)
        a.off[std::size_t(i)] = -flux[std::size_t(i + 1)] / (2.0 * d2);
    return a;
}

// Antiunitary symmetry of the discretized operator: reflecting the grid and
// conjugating must reproduce the matrix when the box is symmetric.
inline double pt_structure_residual(const SymTridiagComplex& a) {
    double r = 0.0;
    std::size_t n = a.diag.size();
    for (std::size_t i = 0; i < n; ++i)
        r = std::max(r, std::abs(a.diag[i] - std::conj(a.diag[n - 1 - i])));
    for (std::size_t i = 0; i + 1 < n; ++i)
        r = std::max(r, std::abs(a.off[i] - a.off[n - 2 - i]));
    return r;
}

inline std::vector<double> eigen_lowest(const SymTridiagReal& a, int count) {
    return lapack::sym_tridiag_lowest(a.diag, a.off, count);
}

struct ComplexEigenOptions {
    int dense_threshold = 600;  // below this, fall back to a dense solver
    int max_iterations = 80;
    double tol = 1e-12;
    std::uint64_t seed = 20260815;
};

namespace detail {

inline void tridiag_apply(const SymTridiagComplex& a,
                          const std::vector<std::complex<double>>& v,
                          std::vector<std::complex<double>>& out) {
    std::size_t n = a.diag.size();
    out.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::complex<double> s = a.diag[i] * v[i];
        if (i > 0) s += a.off[i - 1] * v[i - 1];
        if (i + 1 < n) s += a.off[i] * v[i + 1];
        out[i] = s;
    }
}

// Shift-inverted power iteration with bilinear Rayleigh-quotient updates;
// suited to complex symmetric matrices, whose left and right eigenvectors
// coincide without conjugation.
inline std::complex<double> shift_invert_eigenvalue(const SymTridiagComplex& a,
                                                    std::complex<double> sigma,
                                                    const ComplexEigenOptions& opt,
                                                    std::mt19937_64& rng) {
    std::size_t n = a.diag.size();
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<std::complex<double>> v(n), av;
    for (auto& c : v) c = dist(rng);

    std::vector<std::complex<double>> offc(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) offc[i] = a.off[i];

    // Residuals cannot drop below roundoff relative to the matrix scale, so
    // the convergence threshold keeps a floor proportional to the inf-norm.
    double anorm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double row = std::abs(a.diag[i]);
        if (i > 0) row += std::abs(a.off[i - 1]);
        if (i + 1 < n) row += std::abs(a.off[i]);
        anorm = std::max(anorm, row);
    }
    double floor = 16.0 * std::numeric_limits<double>::epsilon() * anorm;

    std::complex<double> lambda = sigma;
    for (int it = 0; it < opt.max_iterations; ++it) {
        std::vector<std::complex<double>> d(n);
        for (std::size_t i = 0; i < n; ++i) d[i] = a.diag[i] - sigma;
        std::vector<std::complex<double>> rhs = v;
        try {
            lapack::tridiag_solve(offc, d, offc, rhs);
        } catch (const lapack::BackendError&) {
            // sigma hit an eigenvalue exactly; nudge and retry
            sigma += 1e-10 * std::max(1.0, std::abs(sigma));
            continue;
        }
        v = std::move(rhs);

        double norm = 0.0;
        for (const auto& c : v) norm += std::norm(c);
        norm = std::sqrt(norm);
        for (auto& c : v) c /= norm;

        tridiag_apply(a, v, av);
        std::complex<double> num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            num += v[i] * av[i]; // bilinear, no conjugation
            den += v[i] * v[i];
        }
        if (std::abs(den) < 1e-12)
            throw InternalConsistencyError("quasi-null vector in shift-invert iteration");
        lambda = num / den;

        double resid = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            resid = std::max(resid, std::abs(av[i] - lambda * v[i]));
        if (resid <= std::max(opt.tol * std::max(1.0, std::abs(lambda)), floor))
            return lambda;
        if (it >= 2) sigma = lambda; // plain inverse iteration first, then Rayleigh
    }
    throw InternalConsistencyError("shift-invert iteration did not converge");
}

} // namespace detail

// Lowest eigenvalues (by real part) of a complex symmetric tridiagonal
// matrix. Small problems go through a dense solver; large ones run
// shift-inverted iterations seeded from the hermitian part's spectrum.
inline std::vector<std::complex<double>> eigen_lowest(const SymTridiagComplex& a,
                                                      int count,
                                                      const ComplexEigenOptions& opt = {}) {
    int n = int(a.diag.size());
    if (count < 1 || count > n) throw lapack::BackendError("eigenvalue count out of range");

    std::vector<std::complex<double>> out;
    if (n <= opt.dense_threshold) {
        std::vector<std::complex<double>> dense(std::size_t(n) * std::size_t(n), 0.0);
        for (int i = 0; i < n; ++i) {
            dense[std::size_t(i) * std::size_t(n) + std::size_t(i)] = a.diag[std::size_t(i)];
            if (i + 1 < n) {
                dense[std::size_t(i) * std::size_t(n) + std::size_t(i + 1)] = a.off[std::size_t(i)];
                dense[std::size_t(i + 1) * std::size_t(n) + std::size_t(i)] = a.off[std::size_t(i)];
            }
        }
        out = lapack::dense_eigenvalues(std::move(dense), n);
        std::sort(out.begin(), out.end(),
                  [](auto l, auto r) { return l.real() < r.real(); });
        out.resize(std::size_t(count));
        return out;
    }

    std::vector<double> rdiag(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) rdiag[std::size_t(i)] = a.diag[std::size_t(i)].real();
    std::vector<double> seeds = lapack::sym_tridiag_lowest(rdiag, a.off, count);

    std::mt19937_64 rng(opt.seed);
    for (double s : seeds)
        out.push_back(detail::shift_invert_eigenvalue(a, {s, 0.0}, opt, rng));
    std::sort(out.begin(), out.end(), [](auto l, auto r) { return l.real() < r.real(); });
    for (std::size_t i = 0; i + 1 < out.size(); ++i)
        if (std::abs(out[i] - out[i + 1]) <
            1e-9 * std::max(1.0, std::abs(out[i])))
            throw InternalConsistencyError(
                "two shift targets collapsed onto the same eigenvalue");
    return out;
}

// ---------------------------------------------------------------------------
// Rayleigh-Schroedinger second-order coefficient for the level shift under
// the antihermitian perturbation i*eps*Vi, evaluated in the discrete basis of
// the unperturbed grid operator. Exact for the matrix problem.
// ---------------------------------------------------------------------------

inline std::vector<double> rs_second_order(const DerivedModel& m, const Grid& g,
                                           const std::vector<int>& levels) {
    double d2 = g.delta() * g.delta();
    std::vector<double> diag(std::size_t(g.n)), w(std::size_t(g.n));
    for (int i = 0; i < g.n; ++i) {
        diag[std::size_t(i)] = 1.0 / d2 + evaluate(m.spec.real_potential, g.x(i)).real();
        w[std::size_t(i)] = evaluate(m.vi, g.x(i)).real();
    }
    std::vector<double> off(std::size_t(g.n - 1), -0.5 / d2);
    lapack::SymTridiagEigen eig = lapack::sym_tridiag_full(diag, off);

    std::size_t n = std::size_t(g.n);
    std::vector<double> out;
    for (int lvl : levels) {
        if (lvl < 0 || lvl >= g.n) throw DomainError("level outside the grid spectrum");
        const double* zn = eig.vectors.data() + std::size_t(lvl) * n;
        std::vector<double> u(n);
        double uu = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            u[i] = zn[i] * w[i];
            uu += u[i] * u[i];
        }
        double sum = 0.0, parseval = 0.0;
        double en = eig.values[std::size_t(lvl)];
        for (std::size_t mth = 0; mth < n; ++mth) {
            const double* zm = eig.vectors.data() + mth * n;
            double c = 0.0;
            for (std::size_t i = 0; i < n; ++i) c += zm[i] * u[i];
            parseval += c * c;
            if (int(mth) == lvl) continue;
            double de = eig.values[mth] - en;
            if (std::abs(de) < 1e-8 && std::abs(c) > 1e-10)
                throw DomainError("near-degenerate level in the perturbation sum");
            sum += c * c / de;
        }
        if (std::abs(parseval - uu) > 1e-8 * std::max(1.0, uu))
            throw InternalConsistencyError("perturbation sums violate completeness");
        out.push_back(sum);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Spectrum comparison between the two pictures. Every eigenvalue is computed
// on three grids and extrapolated in the step size before any difference is
// taken; the leftover extrapolation scatter becomes the resolution floor.
// ---------------------------------------------------------------------------

struct SpectrumRow {
    double epsilon = 0.0;
    int level = 0;
    std::complex<double> e_pt;
    double e_pdm = 0.0;
    double gap = 0.0;
    double floor = 0.0;
    bool resolved = false;
};

struct SpectrumReport {
    std::vector<SpectrumRow> rows;
    std::vector<double> slopes; // per level; NaN when too few resolved points
    double max_im = 0.0;
};

// Least-squares log-log slope of the inter-picture gap against the coupling,
// one slope per level. Rows below the resolution floor are excluded; levels
// with fewer than three resolved points get NaN.
inline std::vector<double> fit_slopes(const std::vector<SpectrumRow>& rows, int levels) {
    std::vector<double> slopes;
    for (int l = 0; l < levels; ++l) {
        std::vector<double> lx, ly;
        for (const SpectrumRow& r : rows)
            if (r.level == l && r.resolved && r.gap > 0.0) {
                lx.push_back(std::log(r.epsilon));
                ly.push_back(std::log(r.gap));
            }
        if (lx.size() < 3) {
            slopes.push_back(std::numeric_limits<double>::quiet_NaN());
            continue;
        }
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < lx.size(); ++i) {
            sx += lx[i];
            sy += ly[i];
            sxx += lx[i] * lx[i];
            sxy += lx[i] * ly[i];
        }
        double nn = double(lx.size());
        slopes.push_back((nn * sxy - sx * sy) / (nn * sxx - sx * sx));
    }
    return slopes;
}

namespace detail {

// two-point Richardson in delta^2 for arbitrary step ratio
inline std::complex<double> richardson(std::complex<double> ef, double df,
                                       std::complex<double> ec, double dc) {
    double wf = dc * dc, wc = df * df;
    return (wf * ef - wc * ec) / (wf - wc);
}

} // namespace detail

inline SpectrumReport compare_spectra(const ModelSpec& base, const Interval& box, int n,
                                      int levels, const std::vector<double>& eps_list,
                                      const ComplexEigenOptions& opt = {}) {
    if (levels < 1) throw DomainError("need at least one level");
    SpectrumReport rep;
    Grid g0{box, n}, g1{box, n / 2}, g2{box, n / 4};

    for (double eps : eps_list) {
        ModelSpec s = base;
        s.epsilon = eps;
        DerivedModel m = derive(s);

        std::vector<std::vector<std::complex<double>>> pt;
        std::vector<std::vector<double>> pdm;
        for (const Grid& g : {g0, g1, g2}) {
            pt.push_back(eigen_lowest(discretize_pt(m, g), levels, opt));
            pdm.push_back(eigen_lowest(discretize_pdm(m, g), levels));
        }
        for (int l = 0; l < levels; ++l) {
            std::size_t li = std::size_t(l);
            std::complex<double> pt01 =
                detail::richardson(pt[0][li], g0.delta(), pt[1][li], g1.delta());
            std::complex<double> pt12 =
                detail::richardson(pt[1][li], g1.delta(), pt[2][li], g2.delta());
            double pdm01 =
                detail::richardson(pdm[0][li], g0.delta(), pdm[1][li], g1.delta()).real();
            double pdm12 =
                detail::richardson(pdm[1][li], g1.delta(), pdm[2][li], g2.delta()).real();

            SpectrumRow row;
            row.epsilon = eps;
            row.level = l;
            row.e_pt = pt01;
            row.e_pdm = pdm01;
            row.gap = std::abs(pt01 - std::complex<double>(pdm01, 0.0));
            row.floor = 3.0 * (std::abs(pt01 - pt12) + std::abs(pdm01 - pdm12)) +
                        1e-13 * std::max(1.0, std::abs(pt01));
            row.resolved = row.gap > row.floor;
            rep.max_im = std::max(rep.max_im, std::abs(pt01.imag()));
            rep.rows.push_back(row);
        }
    }

    rep.slopes = fit_slopes(rep.rows, levels);
    return rep;
}

} // namespace ptpdm
