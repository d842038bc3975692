#include <catch2/catch_amalgamated.hpp>

#include "ptpdm/examples.hpp"

#include <algorithm>
#include <cmath>

using namespace ptpdm;

namespace {

const TranscriptionAudit* find_audit(const ReproduceReport& rep,
                                     const std::string& id) {
    for (const TranscriptionAudit& a : rep.audits)
        if (a.id == id) return &a;
    return nullptr;
}

const GoldenCheck* find_check(const ReproduceReport& rep,
                              const std::string& id) {
    for (const GoldenCheck& c : rep.checks)
        if (c.id == id) return &c;
    return nullptr;
}

} // namespace

TEST_CASE("unit conversions round-trip", "[examples]") {
    CubicExample cub;
    cub.mu = 1.0;
    cub.m0 = 1.7;
    cub.hbar = 0.9;
    cub.omega_ref = 2.3;

    PoschlTellerExample pt;
    pt.lambda = 3.0;
    pt.k = 1.4;
    pt.m0 = 2.1;
    pt.hbar = 0.8;

    DimensionalTuple d{0.37, -1.21, 4.5, 0.12};
    {
        DimensionalTuple back = cub.to_dimensional(cub.to_dimensionless(d));
        REQUIRE(std::abs(back.x - d.x) < 1e-14);
        REQUIRE(std::abs(back.p - d.p) < 1e-14);
        REQUIRE(std::abs(back.energy - d.energy) < 1e-14);
        REQUIRE(std::abs(back.coupling - d.coupling) < 1e-14);
    }
    {
        DimensionalTuple back = pt.to_dimensional(pt.to_dimensionless(d));
        REQUIRE(std::abs(back.x - d.x) < 1e-14);
        REQUIRE(std::abs(back.p - d.p) < 1e-14);
        REQUIRE(std::abs(back.energy - d.energy) < 1e-14);
        REQUIRE(std::abs(back.coupling - d.coupling) < 1e-14);
    }
}

TEST_CASE("trigonometric well scales at unit constants", "[examples]") {
    PoschlTellerExample pt; // lambda = 3, k = m0 = hbar = 1
    REQUIRE(pt.nu() == 1.0);
    REQUIRE(pt.v0() == 3.0);
    // coupling (energy) 0.12 divided by 2 V0 (V0 - nu)/nu = 12
    REQUIRE(std::abs(pt.dimensionless_coupling() - 0.01) < 1e-15);

    DimensionlessTuple u{0.5, 0.25, 4.5, 0.02};
    DimensionalTuple d = pt.to_dimensional(u);
    REQUIRE(std::abs(d.coupling - 0.24) < 1e-15);
}

TEST_CASE("invalid example parameters are rejected", "[examples]") {
    CubicExample cub;
    cub.mu = 0.0;
    REQUIRE_THROWS_AS(cub.spec(), DomainError);

    PoschlTellerExample pt;
    pt.lambda = 2.0; // the antihermitian part vanishes and the coupling
                     // conversion divides by zero
    REQUIRE_THROWS_AS(pt.spec(), DomainError);
    pt.lambda = 3.0;
    pt.k = -1.0;
    REQUIRE_THROWS_AS(pt.spec(), DomainError);
}

TEST_CASE("cubic reproduction passes every golden check", "[examples]") {
    ReproduceReport rep = reproduce_cubic();
    REQUIRE(rep.example_id == "cubic");
    REQUIRE(rep.all_passed());
    REQUIRE(rep.checks.size() >= 6);
    for (const GoldenCheck& c : rep.checks) {
        INFO(c.id << ": max_err = " << c.max_err << " " << c.detail);
        CHECK(c.pass);
    }

    const GoldenCheck* mass = find_check(rep, "mass_ratio_at_unit_x");
    REQUIRE(mass != nullptr);
    REQUIRE(mass->pass);
}

TEST_CASE("cubic audit pins the printed-text defects", "[examples]") {
    ReproduceReport rep = reproduce_cubic();

    // the constant coefficient of the quadratic wavefunction bracket is the
    // one place where the printed text disagrees with the derivation
    const TranscriptionAudit* d0 =
        find_audit(rep, "wavefunction_map_quadratic_d0");
    REQUIRE(d0 != nullptr);
    CHECK_FALSE(d0->matches);
    CHECK(d0->note.find("slope") != std::string::npos);

    for (int k = 1; k <= 6; ++k) {
        const TranscriptionAudit* a =
            find_audit(rep, "wavefunction_map_quadratic_d" + std::to_string(k));
        REQUIRE(a != nullptr);
        INFO(a->id << ": gap = " << a->max_gap);
        CHECK(a->matches);
    }

    const TranscriptionAudit* target =
        find_audit(rep, "wavefunction_map_missing_target");
    REQUIRE(target != nullptr);
    CHECK_FALSE(target->matches);

    // both dressed observables agree with the printed expansions
    const TranscriptionAudit* xa =
        find_audit(rep, "position_observable_expansion");
    const TranscriptionAudit* pa =
        find_audit(rep, "momentum_observable_expansion");
    REQUIRE(xa != nullptr);
    REQUIRE(pa != nullptr);
    CHECK(xa->matches);
    CHECK(pa->matches);
}

TEST_CASE("cubic reproduction with the coupling switched off", "[examples]") {
    ReproduceReport rep = reproduce_cubic(1.0, 0.0);
    REQUIRE(rep.all_passed());
}

TEST_CASE("trigonometric well reproduction passes every golden check",
          "[examples]") {
    ReproduceReport rep = reproduce_poschl_teller();
    REQUIRE(rep.example_id == "poschl_teller");
    for (const GoldenCheck& c : rep.checks) {
        INFO(c.id << ": max_err = " << c.max_err << " " << c.detail);
        CHECK(c.pass);
    }
    REQUIRE(rep.all_passed());

    // the bound-state map checks must have run for an integer exponent
    REQUIRE(find_check(rep, "wavefunction_first_order") != nullptr);
    REQUIRE(find_check(rep, "wavefunction_second_order") != nullptr);
}

TEST_CASE("trigonometric well audit pins the even-term defect", "[examples]") {
    ReproduceReport rep = reproduce_poschl_teller();

    const TranscriptionAudit* pa =
        find_audit(rep, "momentum_observable_quadratic_constant_term");
    REQUIRE(pa != nullptr);
    CHECK_FALSE(pa->matches);
    CHECK(pa->note.find("tan") != std::string::npos);

    const TranscriptionAudit* d0 =
        find_audit(rep, "wavefunction_map_quadratic_d0");
    REQUIRE(d0 != nullptr);
    CHECK_FALSE(d0->matches);

    const TranscriptionAudit* wave = find_audit(rep, "bound_state_map_expansion");
    REQUIRE(wave != nullptr);
    CHECK(wave->matches);
}

TEST_CASE("trigonometric well values at the origin", "[examples]") {
    PoschlTellerExample pt;
    ModelSpec spec = pt.spec();
    DerivedModel m = derive(spec);

    // twice the depth of the well at lambda = 3 is 6; the mass correction at
    // the bottom of the well is lambda(lambda-1)[lambda(lambda-1)-2]/2 = 12
    REQUIRE(std::abs(evaluate(spec.real_potential, 0.0).real() - 3.0) < 1e-14);
    REQUIRE(std::abs(evaluate(m.m2, 0.0).real() - 12.0) < 1e-12);
    REQUIRE(std::abs(evaluate(m.veff2, 0.0).real() - (-12.0)) < 1e-12);

    // effective well bottom in energy units: V0 + eps^2 (V0 - 5 nu)/(4 V0 (V0 - nu))
    double expected = 3.0 + 0.12 * 0.12 * (3.0 - 5.0) / (4.0 * 3.0 * 2.0);
    double got = 1.0 * (3.0 + 0.01 * 0.01 * (-12.0));
    REQUIRE(std::abs(got - expected) < 1e-15);
}
