// Acceptance gate: one self-contained check per contract criterion, printed
// as a single pass/fail line each. The process exit code is the number of
// failed criteria. All tolerances are pinned here, next to the check they
// guard.

#include "ptpdm/ptpdm.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ptpdm;

namespace {

int g_failures = 0;

struct Outcome {
    bool ok = false;
    std::string detail;
};

template <class F>
void criterion(int idx, const std::string& title, F body) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
        out = body();
    } catch (const std::exception& e) {
        out.ok = false;
        out.detail = std::string("exception: ") + e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%s] criterion %d: %s (%s; %.2f s)\n", out.ok ? "PASS" : "FAIL", idx,
                title.c_str(), out.detail.c_str(), secs);
    std::fflush(stdout);
    if (!out.ok) ++g_failures;
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

ModelSpec cubic_spec(Interval dom) {
    ModelSpec s;
    s.real_potential = simplify(rational(1, 2) * pow(var(), 2));
    s.c0 = Scalar();
    s.c1 = Scalar(-2, 3);
    s.epsilon = 0.05;
    s.domain = dom;
    return s;
}

ModelSpec well_spec(Interval dom) {
    ModelSpec s;
    s.real_potential = simplify(constant(std::int64_t(3)) * pow(sec(var()), 2));
    s.c0 = Scalar(1, 3);
    s.c1 = Scalar(-1, 3);
    s.epsilon = 0.01;
    s.domain = dom;
    return s;
}

// two-point Richardson step for a quantity with a leading h^2 error
double rich2(double fine, double hf, double coarse, double hc) {
    double wf = hc * hc, wc = hf * hf;
    return (wf * fine - wc * coarse) / (wf - wc);
}

double lowest_pdm(DerivedModel m, double eps, const Grid& g) {
    m.spec.epsilon = eps;
    SymTridiagReal a = discretize_pdm(m, g);
    return lapack::sym_tridiag_lowest(a.diag, a.off, 1)[0];
}

struct ThreeWay {
    double full = 0.0, rs = 0.0, diag = 0.0;
    double tail = 0.0; // truncation + discretization + roundoff budget
};

// Ground-level second-order energy coefficient measured three independent
// ways on one model: finite-coupling solves extrapolated in the coupling,
// the perturbation-sum oracle, and the diagonal matrix element of the
// quadratic correction block. Each is Richardson-extrapolated across three
// grids; the disagreement of the extrapolation pairs is reported as the tail.
ThreeWay second_order_three_way(const ModelSpec& base, Interval box, int n, double ea) {
    ModelSpec s0 = base;
    s0.epsilon = 0.0;
    DerivedModel m = derive(s0);

    std::vector<Grid> grids{{box, n}, {box, n / 2}, {box, n / 4}};
    std::vector<double> full_g, fullpair_gap, rs_g, diag_g;
    double anorm_fine = 0.0;

    for (const Grid& g : grids) {
        double e0 = lowest_pdm(m, 0.0, g);
        double g1 = (lowest_pdm(m, ea, g) - e0) / (ea * ea);
        double g2 = (lowest_pdm(m, 2 * ea, g) - e0) / (4 * ea * ea);
        double g4 = (lowest_pdm(m, 4 * ea, g) - e0) / (16 * ea * ea);
        double r01 = (4.0 * g1 - g2) / 3.0; // eliminate the coupling^2 term
        double r12 = (4.0 * g2 - g4) / 3.0;
        full_g.push_back(r01);
        fullpair_gap.push_back(std::abs(r01 - r12));

        rs_g.push_back(rs_second_order(m, g, {0})[0]);

        // quadratic block B = A(eps) - A(0) scaled by eps^2; entries are affine
        // in eps^2 so eps = 1 reads the block off exactly
        DerivedModel m1 = m;
        m1.spec.epsilon = 1.0;
        SymTridiagReal a0 = discretize_pdm(m, g);
        SymTridiagReal a1 = discretize_pdm(m1, g);
        lapack::SymTridiagEigen eig = lapack::sym_tridiag_full(a0.diag, a0.off);
        const double* psi = eig.vectors.data(); // first column = ground state
        double val = 0.0;
        for (int i = 0; i < g.n; ++i) {
            val += psi[i] * (a1.diag[std::size_t(i)] - a0.diag[std::size_t(i)]) * psi[i];
            if (i + 1 < g.n)
                val += 2.0 * psi[i] * (a1.off[std::size_t(i)] - a0.off[std::size_t(i)]) *
                       psi[i + 1];
        }
        diag_g.push_back(val);

        if (&g == &grids.front())
            for (std::size_t i = 0; i < a0.diag.size(); ++i)
                anorm_fine = std::max(anorm_fine,
                                      std::abs(a0.diag[i]) + 2.0 * std::abs(i < a0.off.size()
                                                                                ? a0.off[i]
                                                                                : 0.0));
    }

    auto extrap = [&](const std::vector<double>& v, double* disc) {
        double h0 = grids[0].delta(), h1 = grids[1].delta(), h2 = grids[2].delta();
        double r01 = rich2(v[0], h0, v[1], h1);
        double r12 = rich2(v[1], h1, v[2], h2);
        *disc = std::abs(r01 - r12);
        return r01;
    };

    ThreeWay w;
    double d_full = 0, d_rs = 0, d_diag = 0;
    w.full = extrap(full_g, &d_full);
    w.rs = extrap(rs_g, &d_rs);
    w.diag = extrap(diag_g, &d_diag);
    double eps_tail = fullpair_gap[0];
    double roundoff = 64.0 * std::numeric_limits<double>::epsilon() * anorm_fine / (ea * ea);
    w.tail = eps_tail + d_full + d_rs + d_diag + roundoff;
    return w;
}

// ---- subprocess helpers for the CLI criteria --------------------------------

struct RunResult {
    int exit_code = -1;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RunResult run_cli(const std::string& args, const fs::path& cwd) {
    const char* bin = std::getenv("PTPDM_CLI");
    if (!bin) throw std::runtime_error("PTPDM_CLI is not set");
    fs::path err = cwd / "stderr.txt";
    std::string cmd = "cd '" + cwd.string() + "' && '" + std::string(bin) + "' " + args +
                      " >/dev/null 2>'" + err.string() + "'";
    int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.err = slurp(err);
    return r;
}

fs::path scratch(const std::string& name) {
    fs::path dir = fs::current_path() / "acceptance_scratch" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

} // namespace

int main() {
    std::printf("acceptance gate: symbolic-numeric PT <-> PDM equivalence toolkit\n");

    // 1 -------------------------------------------------------------------
    criterion(1, "cubic-oscillator closed forms", []() -> Outcome {
        auto t0 = std::chrono::steady_clock::now();
        DerivedModel m = derive(cubic_spec({-2.0, 2.0}));
        CompareOptions opt{{-2.0, 2.0}, 200, 1e-12, 901};
        Expr x = var();
        CompareResult vi = expr_compare(m.vi, pow(x, 3), opt);
        CompareResult m2 = expr_compare(m.m2, constant(std::int64_t(6)) * pow(x, 2), opt);
        CompareResult ve = expr_compare(
            m.veff2, rational(3, 2) * pow(x, 4) - constant(std::int64_t(2)), opt);
        double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        bool ok = vi.close && m2.close && ve.close && secs < 1.0;
        return {ok, fmt("max gaps %.2e / %.2e / %.2e vs tol 1e-12, derive %.3f s",
                        vi.max_rel_err, m2.max_rel_err, ve.max_rel_err, secs)};
    });

    // 2 -------------------------------------------------------------------
    criterion(2, "trigonometric-well closed forms and printed expansions",
              []() -> Outcome {
                  auto t0 = std::chrono::steady_clock::now();
                  ReproduceReport rep = reproduce_poschl_teller();
                  double secs = std::chrono::duration<double>(
                                    std::chrono::steady_clock::now() - t0)
                                    .count();
                  int passed = 0;
                  double worst = 0.0;
                  for (const GoldenCheck& c : rep.checks) {
                      if (c.pass) ++passed;
                      worst = std::max(worst, c.max_err);
                  }
                  bool ok = rep.all_passed() && !rep.checks.empty() && secs < 1.0;
                  return {ok, fmt("%d/%zu golden checks pass, worst gap %.2e, %.3f s",
                                  passed, rep.checks.size(), worst, secs)};
              });

    // 3 -------------------------------------------------------------------
    criterion(3, "operator identities on examples and random even potentials",
              []() -> Outcome {
                  auto t0 = std::chrono::steady_clock::now();
                  std::vector<ModelSpec> specs{cubic_spec({-1.0, 1.0}),
                                               well_spec({-1.0, 1.0})};
                  std::mt19937_64 rng(20260815);
                  std::uniform_real_distribution<double> amp(0.2, 1.0), cc(-0.5, 0.5);
                  for (int i = 0; i < 10; ++i) {
                      ModelSpec s;
                      s.real_potential = simplify(
                          constant(amp(rng)) * pow(var(), 2) +
                          constant(amp(rng)) * pow(var(), 4) +
                          constant(amp(rng)) * pow(var(), 6));
                      s.c0 = Scalar(cc(rng));
                      s.c1 = Scalar(cc(rng));
                      s.epsilon = 0.01;
                      s.domain = {-1.0, 1.0};
                      specs.push_back(s);
                  }
                  int models = 0, checks = 0;
                  double worst = 0.0;
                  for (const ModelSpec& s : specs) {
                      DerivedModel m = derive(s);
                      for (const OperatorCheck& c : check_operator_conditions(m, 1e-9)) {
                          ++checks;
                          worst = std::max(worst, c.max_rel_err);
                          if (!c.ok)
                              return {false, fmt("model %d fails %s (err %.2e)", models,
                                                 c.id.c_str(), c.max_rel_err)};
                      }
                      ++models;
                  }
                  double secs = std::chrono::duration<double>(
                                    std::chrono::steady_clock::now() - t0)
                                    .count();
                  bool ok = models == 12 && secs < 10.0;
                  return {ok, fmt("%d models, %d operator checks, worst residual %.2e, "
                                  "%.2f s",
                                  models, checks, worst, secs)};
              });

    // 4 -------------------------------------------------------------------
    criterion(4, "spectral gap scales as the fourth power of the coupling",
              []() -> Outcome {
                  auto t0 = std::chrono::steady_clock::now();
                  SpectrumReport rep =
                      compare_spectra(cubic_spec({-12.0, 12.0}), {-12.0, 12.0}, 2400, 4,
                                      {0.02, 0.04, 0.06, 0.08, 0.1});
                  double secs = std::chrono::duration<double>(
                                    std::chrono::steady_clock::now() - t0)
                                    .count();
                  bool ok = secs <= 300.0 && rep.max_im <= 1e-7;
                  std::string s = "slopes";
                  for (double sl : rep.slopes) {
                      ok = ok && std::isfinite(sl) && sl >= 3.5 && sl <= 4.5;
                      s += fmt(" %.3f", sl);
                  }
                  s += fmt(", max |Im E| %.2e vs 1e-7", rep.max_im);
                  return {ok, s};
              });

    // 5 -------------------------------------------------------------------
    criterion(5, "unperturbed spectra against the exact eigenvalues", []() -> Outcome {
        auto t0 = std::chrono::steady_clock::now();

        auto levels = [](const ModelSpec& s, Interval box, int n, int count) {
            DerivedModel m = derive(s);
            Grid gf{box, n}, gc{box, n / 2};
            SymTridiagReal af = discretize_pdm(m, gf), ac = discretize_pdm(m, gc);
            std::vector<double> ef = lapack::sym_tridiag_lowest(af.diag, af.off, count);
            std::vector<double> ec = lapack::sym_tridiag_lowest(ac.diag, ac.off, count);
            std::vector<double> out;
            for (int i = 0; i < count; ++i)
                out.push_back(rich2(ef[std::size_t(i)], gf.delta(), ec[std::size_t(i)],
                                    gc.delta()));
            return out;
        };

        ModelSpec h;
        h.real_potential = simplify(rational(1, 2) * pow(var(), 2));
        h.domain = {-12.0, 12.0};
        std::vector<double> eh = levels(h, {-12.0, 12.0}, 2400, 6);
        double worst_h = 0.0;
        for (int i = 0; i < 6; ++i)
            worst_h = std::max(worst_h, std::abs(eh[std::size_t(i)] - (i + 0.5)));

        ModelSpec w;
        w.real_potential = simplify(constant(std::int64_t(3)) * pow(sec(var()), 2));
        double half_pi = 0.5 * std::numbers::pi;
        w.domain = {-half_pi, half_pi};
        std::vector<double> ew = levels(w, w.domain, 1600, 4);
        double worst_w = 0.0;
        for (int i = 0; i < 4; ++i) {
            double exact = 0.5 * double((i + 3) * (i + 3));
            worst_w = std::max(worst_w, std::abs(ew[std::size_t(i)] - exact) / exact);
        }

        double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        bool ok = worst_h <= 1e-6 && worst_w <= 1e-5 && secs < 60.0;
        return {ok, fmt("harmonic |dE| %.2e vs 1e-6 (6 levels); trig well rel %.2e vs "
                        "1e-5 (4 levels) after step-size extrapolation; %.1f s",
                        worst_h, worst_w, secs)};
    });

    // 6 -------------------------------------------------------------------
    criterion(6, "three independent reads of the second-order ground shift",
              []() -> Outcome {
                  auto spread = [](const ThreeWay& t) {
                      double lo = std::min({t.full, t.rs, t.diag});
                      double hi = std::max({t.full, t.rs, t.diag});
                      return hi - lo;
                  };

                  ThreeWay c =
                      second_order_three_way(cubic_spec({-10.0, 10.0}), {-10.0, 10.0},
                                             1200, 0.01);
                  double bc = std::max(1e-6, c.tail);
                  bool cubic_ok = spread(c) <= bc;

                  // The trigonometric well is run on its validity window and on a
                  // shrunk window. The perturbation-sum read lives in the
                  // antisymmetric picture while the other two live in the
                  // mass-corrected picture, and for this well the second-order
                  // expectation does not converge: the bound state decays like
                  // cos^3 while the generator coefficients grow like sec^4, so
                  // every read moves with the window and the pictures keep a
                  // window-dependent offset. The spread is reported against the
                  // numerical tail and is expected to dwarf it; see the decisions
                  // ledger for the analysis and the slope-2 corollary.
                  ThreeWay w =
                      second_order_three_way(well_spec({-1.0, 1.0}), {-1.0, 1.0}, 400,
                                             0.005);
                  ThreeWay ws =
                      second_order_three_way(well_spec({-0.9, 0.9}), {-0.9, 0.9}, 400,
                                             0.005);
                  double bw = std::max(1e-6, w.tail);
                  bool well_ok = spread(w) <= bw;
                  double window_drift =
                      std::max({std::abs(w.full - ws.full), std::abs(w.rs - ws.rs),
                                std::abs(w.diag - ws.diag)});

                  bool ok = cubic_ok && well_ok;
                  return {ok,
                          fmt("cubic full/sum/diag %.8f / %.8f / %.8f spread %.2e vs "
                              "%.2e; well %.4f / %.4f / %.4f spread %.2e vs %.2e, "
                              "window shrink moves reads by up to %.1f "
                              "(non-convergent; documented limitation)",
                              c.full, c.rs, c.diag, spread(c), bc, w.full, w.rs,
                              w.diag, spread(w), bw, window_drift)};
              });

    // 7 -------------------------------------------------------------------
    criterion(7, "classical limit, energy conservation and oscillation period",
              []() -> Outcome {
                  ClassicalModel cm = build_classical_pt_model(1.3, 0.9, 1.7, 0.065);
                  double xm = 0.8 / cm.wavenumber();
                  double pm = 0.6 * std::sqrt(2.0 * cm.rest_mass() * cm.well_depth());
                  std::mt19937_64 rng(20260815);
                  std::uniform_real_distribution<double> dx(-0.75 * xm, 0.75 * xm),
                      dp(-0.75 * pm, 0.75 * pm);
                  std::vector<PhasePoint> pts;
                  for (int i = 0; i < 20; ++i) pts.push_back({dx(rng), dp(rng)});
                  HbarLimitReport limit = check_hbar_limit(cm, pts);

                  double period_h =
                      2.0 * std::numbers::pi / cm.small_oscillation_frequency();
                  double dt = period_h / 1000.0;
                  Trajectory tr = integrate_trajectory(cm, 0.05 / cm.wavenumber(), 0.0,
                                                       10.0 * period_h, dt);

                  std::vector<double> crossings;
                  for (std::size_t i = 0; i + 1 < tr.x.size(); ++i)
                      if (tr.x[i] > 0.0 && tr.x[i + 1] <= 0.0)
                          crossings.push_back(tr.t[i] + dt * tr.x[i] /
                                                            (tr.x[i] - tr.x[i + 1]));
                  double period = crossings.size() >= 2
                                      ? crossings[1] - crossings[0]
                                      : std::numeric_limits<double>::quiet_NaN();
                  double period_err = std::abs(period - period_h) / period_h;

                  bool ok = limit.max_rel_deviation <= 1e-9 && limit.monotone &&
                            tr.max_energy_drift <= 1e-6 && period_err <= 0.01;
                  return {ok, fmt("limit deviation %.2e vs 1e-9 (monotone=%d, 20 "
                                  "points); drift %.2e vs 1e-6 over %zu steps; period "
                                  "off by %.3f%% vs 1%%",
                                  limit.max_rel_deviation, int(limit.monotone),
                                  tr.max_energy_drift, tr.t.size() - 1,
                                  100.0 * period_err)};
              });

    // 8 -------------------------------------------------------------------
    criterion(8, "deliberate defect makes verification fail loudly", []() -> Outcome {
        fs::path dir = scratch("teeth");
        std::ofstream(dir / "cfg.json") << R"cfg({
          "potential": "x^2/2", "c0": 0.0, "c1": -0.6666666666666666,
          "epsilon": 0.05, "domain": [-2.0, 2.0], "output_dir": "out"})cfg";
        RunResult r = run_cli("verify --config cfg.json --perturb 0.01", dir);

        double worst = 0.0;
        std::ifstream csv(dir / "out/residuals.csv");
        std::string line;
        std::getline(csv, line); // header
        while (std::getline(csv, line)) {
            std::size_t a = line.find(','), b = line.find(',', a + 1);
            if (a == std::string::npos || b == std::string::npos) continue;
            worst = std::max(worst, std::stod(line.substr(a + 1, b - a - 1)));
        }
        bool ok = r.exit_code == 1 && worst > 1e-4;
        return {ok, fmt("exit code %d (want 1), worst residual %.2e vs > 1e-4",
                        r.exit_code, worst)};
    });

    // 9 -------------------------------------------------------------------
    criterion(9, "term-by-term audit of the printed expansions", []() -> Outcome {
        fs::path dir = scratch("audit");
        std::ofstream(dir / "cub.json") << R"cfg({"example": "cubic",
          "output_dir": "cub"})cfg";
        std::ofstream(dir / "well.json") << R"cfg({"example": "poschl-teller",
          "output_dir": "well"})cfg";
        RunResult r1 = run_cli("reproduce --config cub.json", dir);
        RunResult r2 = run_cli("reproduce --config well.json", dir);

        bool ok = r1.exit_code == 0 && r2.exit_code == 0;
        int diffs = 0;
        for (const char* sub : {"cub", "well"}) {
            std::string diff = slurp(dir / sub / "transcription_diff.txt");
            ok = ok && !diff.empty();
            std::size_t pos = 0;
            while ((pos = diff.find("transcription-diff", pos)) != std::string::npos) {
                ++diffs;
                pos += 1;
            }
            json rep = json::parse(slurp(dir / sub / "reproduce_report.json"));
            ok = ok && rep.at("all_passed").get<bool>() && !rep.at("audits").empty();
        }
        // machinery-path results are exercised by criteria 1-6 in-process;
        // here the reports must carry the printed-text comparison itself
        ok = ok && diffs >= 2;
        return {ok, fmt("both example reports emitted, %d printed-term deviations "
                        "recorded, machine checks all green",
                        diffs)};
    });

    std::printf("%d of 9 criteria failed\n", g_failures);
    return g_failures;
}
