#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "helpers.hpp"
#include "qmix/mixing_model.hpp"
#include "qmix/priors.hpp"
#include "qmix/validation.hpp"

using namespace qmix;

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

// Shared reference point: r2 = sqrt(1/2) so the observation components come
// out as simple fractions.
const SourceVector kRef{0.5, std::sqrt(0.5), 0.0};
const MixingParam kRefV{0.6};

}  // namespace

TEST_CASE("forward reproduces the reference observation") {
    const ObservationVector x = forward(kRef, kRefV);
    CHECK(x.p1 == doctest::Approx(0.125).epsilon(1e-12));
    CHECK(x.p2 == doctest::Approx(0.375).epsilon(1e-12));
    CHECK(x.p3 == doctest::Approx(0.215).epsilon(1e-12));
    x.validate();
}

TEST_CASE("forward near the amplitude ceiling pushes p1 to one") {
    const SourceVector s{1.0 - 2e-8, 1.0 - 1e-8, 0.7};
    const ObservationVector x = forward(s, MixingParam{0.3});
    CHECK(x.p1 == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(std::abs(x.p2) < 1e-6);
    CHECK(std::abs(x.p3) < 1e-3);
}

TEST_CASE("forward with zero phase drops the cross term") {
    const SourceVector s{0.3, 0.7, 0.0};
    const MixingParam v{0.45};
    const double r1s = s.r1 * s.r1;
    const double r2s = s.r2 * s.r2;
    const double expected =
        r1s * (1.0 - r2s) * (1.0 - v.v * v.v) + (1.0 - r1s) * r2s * v.v * v.v;
    CHECK(forward(s, v).p3 == doctest::Approx(expected).epsilon(1e-15));
}

TEST_CASE("forward rejects domain violations naming the field") {
    CHECK_THROWS_WITH_AS(forward({0.0, 0.7, 0.0}, kRefV), doctest::Contains("r1"),
                         PreconditionError);
    CHECK_THROWS_WITH_AS(forward({0.3, 1.0, 0.0}, kRefV), doctest::Contains("r2"),
                         PreconditionError);
    CHECK_THROWS_WITH_AS(forward({0.7, 0.3, 0.0}, kRefV), doctest::Contains("r1 < r2"),
                         PreconditionError);
    CHECK_THROWS_WITH_AS(forward({0.3, 0.7, kHalfPi}, kRefV), doctest::Contains("delta"),
                         PreconditionError);
    CHECK_THROWS_WITH_AS(forward({0.3, 0.7, 0.0}, MixingParam{1.0}), doctest::Contains("v"),
                         PreconditionError);
    CHECK_THROWS_AS(forward({0.3, 0.7, 0.0}, MixingParam{0.0}), PreconditionError);
}

TEST_CASE("jacobian matches the frozen reference value") {
    CHECK(jacobian(kRef, kRefV) == doctest::Approx(0.07348469228349538).epsilon(1e-12));
}

TEST_CASE("jacobian vanishes at equal amplitudes and at the phase edge") {
    CHECK(jacobian({0.5, 0.5, 0.3}, kRefV) == 0.0);
    CHECK(std::abs(jacobian({0.3, 0.7, kHalfPi}, kRefV)) < 1e-16);
    CHECK(std::abs(jacobian({0.3, 0.7, -kHalfPi}, kRefV)) < 1e-16);
}

TEST_CASE("jacobian is positive on the canonical domain") {
    Rng rng(7101);
    for (int i = 0; i < 1000; ++i) {
        const SourceVector s = test::random_source(rng);
        CHECK(jacobian(s, test::random_coupling(rng)) > 0.0);
    }
}

TEST_CASE("invert_amplitudes solves the reference quadratic") {
    const Amplitudes amp = invert_amplitudes({0.125, 0.375, 0.215});
    CHECK(amp.r1 == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(amp.r2 == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
}

TEST_CASE("invert_amplitudes reports a double root as singular") {
    // 1 + p1 - p2 = 1 and p1 = 0.25: discriminant is exactly zero.
    CHECK_THROWS_AS(invert_amplitudes({0.25, 0.25, 0.5}), SingularMixtureError);
}

TEST_CASE("invert_amplitudes rejects roots outside the unit interval") {
    // roots 3.73 and 1.07
    CHECK_THROWS_AS(invert_amplitudes({4.0, 0.2, 0.5}), InvalidObservationError);
    CHECK_THROWS_AS(invert_amplitudes({-0.1, 0.2, 0.5}), InvalidObservationError);
}

TEST_CASE("invert_phase recovers the reference phase") {
    const double delta = invert_phase({0.125, 0.375, 0.215}, 0.5, std::sqrt(0.5), kRefV);
    CHECK(std::abs(delta) < 1e-12);
}

TEST_CASE("invert_phase at the branch edge clamps and flags near-singular") {
    const SourceVector s{0.3, 0.7, 0.0};
    const MixingParam v{0.5};
    ObservationVector x = forward(s, v);
    const double reach = 2.0 * s.r1 * s.r2 * std::sqrt(1.0 - s.r1 * s.r1)
                       * std::sqrt(1.0 - s.r2 * s.r2) * std::sqrt(1.0 - v.v * v.v) * v.v;

    SUBCASE("arcsine argument exactly one") {
        x.p3 -= reach;  // sin(delta) would have to be exactly 1
        const double delta = invert_phase(x, s.r1, s.r2, v);
        CHECK(delta == doctest::Approx(kHalfPi).epsilon(1e-9));
        CHECK(near_singular_phase(delta, 1e-6));
    }
    SUBCASE("overshoot within the clamp tolerance is absorbed") {
        x.p3 -= reach * (1.0 + 1e-10);
        CHECK(invert_phase(x, s.r1, s.r2, v) == doctest::Approx(kHalfPi).epsilon(1e-9));
    }
    SUBCASE("larger overshoot is inconsistent") {
        x.p3 -= reach * (1.0 + 1e-6);
        CHECK_THROWS_AS(invert_phase(x, s.r1, s.r2, v), InconsistentObservationError);
    }
}

TEST_CASE("round-trip: invert(forward(s,v),v) == s") {
    const PriorConfig priors;
    Rng rng(20250801);
    for (int i = 0; i < 10000; ++i) {
        const SourceVector s = detail::draw_source(priors, 99, static_cast<std::uint64_t>(i));
        const MixingParam v = test::random_coupling(rng);
        const SourceVector back = invert(forward(s, v), v);
        CHECK(std::abs(back.r1 - s.r1) <= 1e-10);
        CHECK(std::abs(back.r2 - s.r2) <= 1e-10);
        CHECK(std::abs(back.delta - s.delta) <= 1e-10);
    }
}

TEST_CASE("round-trip: forward(invert(x,v),v) == x") {
    Rng rng(555);
    for (int i = 0; i < 2000; ++i) {
        const SourceVector s = test::random_source(rng);
        const MixingParam v = test::random_coupling(rng);
        const ObservationVector x = forward(s, v);
        const ObservationVector again = forward(invert(x, v), v);
        CHECK(std::abs(again.p1 - x.p1) <= 1e-10);
        CHECK(std::abs(again.p2 - x.p2) <= 1e-10);
        CHECK(std::abs(again.p3 - x.p3) <= 1e-10);
    }
}

TEST_CASE("amplitude reconstruction is bit-identical across coupling values") {
    Rng rng(808);
    int compared = 0;
    for (int i = 0; i < 200; ++i) {
        const SourceVector s = test::random_source(rng);
        const MixingParam v = test::random_coupling(rng, 0.1);
        const ObservationVector x = forward(s, v);
        // Probe two nearby couplings; the phase need not invert at distant
        // ones, but the amplitudes must not move at all where it does.
        const MixingParam va{v.v - 1e-3};
        const MixingParam vb{v.v + 1e-3};
        if (detail::try_invert(x, va.v).status != SampleStatus::Ok ||
            detail::try_invert(x, vb.v).status != SampleStatus::Ok) {
            continue;
        }
        const SourceVector a = invert(x, va);
        const SourceVector b = invert(x, vb);
        CHECK(a.r1 == b.r1);
        CHECK(a.r2 == b.r2);
        ++compared;
    }
    CHECK(compared > 150);
}

TEST_CASE("phase constraint residual vanishes at the reconstructed source") {
    Rng rng(1234);
    for (int i = 0; i < 500; ++i) {
        const SourceVector s = test::random_source(rng);
        const MixingParam v = test::random_coupling(rng);
        const ObservationVector x = forward(s, v);
        const SourceVector back = invert(x, v);
        const PhaseConstraint ctx{back.r1, back.r2, x.p3};
        CHECK(std::abs(constraint_residual(back.delta, v, ctx)) < 1e-12);
    }
}

TEST_CASE("phase-constraint partials match central differences") {
    Rng rng(4321);
    const double h = 1e-6;
    for (int i = 0; i < 500; ++i) {
        const SourceVector s = test::random_source(rng);
        const MixingParam v = test::random_coupling(rng);
        const PhaseConstraint ctx{s.r1, s.r2, forward(s, v).p3};

        const double fd_delta = central_diff(
            [&](double d) { return constraint_residual(d, v, ctx); }, s.delta, h);
        CHECK(test::rel_err(dconstraint_ddelta(s.delta, v, ctx), fd_delta, 1e-9) < 1e-6);

        const double fd_v = central_diff(
            [&](double vv) { return constraint_residual(s.delta, MixingParam{vv}, ctx); }, v.v, h);
        CHECK(test::rel_err(dconstraint_dv(s.delta, v, ctx), fd_v, 1e-9) < 1e-6);
    }
}

TEST_CASE("phase-constraint delta partial at zero phase") {
    const SourceVector s{0.3, 0.7, 0.0};
    const MixingParam v{0.45};
    const PhaseConstraint ctx{s.r1, s.r2, forward(s, v).p3};
    const double expected = -2.0 * s.r1 * s.r2 * std::sqrt(1.0 - 0.09) * std::sqrt(1.0 - 0.49)
                          * std::sqrt(1.0 - v.v * v.v) * v.v;
    CHECK(dconstraint_ddelta(0.0, v, ctx) == doctest::Approx(expected).epsilon(1e-15));
}

TEST_CASE("dphase_dv at zero phase and the frozen reference value") {
    CHECK(dphase_dv(kRef, kRefV) == doctest::Approx(1.443375672974065).epsilon(1e-12));
    const SourceVector s{0.3, 0.7, 0.0};
    const double kp = s.r1 * s.r2 * std::sqrt(1.0 - 0.09) * std::sqrt(1.0 - 0.49);
    const MixingParam v{0.45};
    const double expected = (0.49 - 0.09) / (kp * std::sqrt(1.0 - v.v * v.v));
    CHECK(dphase_dv(s, v) == doctest::Approx(expected).epsilon(1e-13));
}

TEST_CASE("dphase_dv vanishes when both factors die") {
    // r1 == r2 kills the first term, v = 1/sqrt(2) the second (up to the
    // one-ulp error of representing 1/sqrt(2)).
    CHECK(std::abs(dphase_dv({0.5, 0.5, 0.3}, MixingParam{std::sqrt(0.5)})) < 1e-14);
}

TEST_CASE("dphase_dv throws near the phase singularity") {
    CHECK_THROWS_AS(dphase_dv({0.3, 0.7, kHalfPi - 1e-10}, kRefV), NearSingularPhaseError);
}

TEST_CASE("dphase_dv matches the implicit-function finite difference") {
    Rng rng(2468);
    const double h = 1e-6;
    int tested = 0;
    while (tested < 1000) {
        const SourceVector s = test::random_source(rng, 0.05, 0.03, 1.35);
        const MixingParam v = test::random_coupling(rng, 0.1);
        const ObservationVector x = forward(s, v);
        const double fd = central_diff(
            [&](double vv) { return invert(x, MixingParam{vv}).delta; }, v.v, h);
        CHECK(test::rel_err(dphase_dv(s, v), fd, 1e-9) < 1e-6);
        ++tested;
    }
}

TEST_CASE("implicit-function identity ties the constraint partials to dphase_dv") {
    Rng rng(1357);
    for (int i = 0; i < 1000; ++i) {
        const SourceVector s = test::random_source(rng);
        const MixingParam v = test::random_coupling(rng);
        const PhaseConstraint ctx{s.r1, s.r2, forward(s, v).p3};
        const double residual =
            dconstraint_ddelta(s.delta, v, ctx) * dphase_dv(s, v) + dconstraint_dv(s.delta, v, ctx);
        CHECK(std::abs(residual) <= 1e-10 * std::max(1.0, std::abs(dconstraint_dv(s.delta, v, ctx))));
    }
}

TEST_CASE("djacobian_dv_partial: frozen value, zero at v = 1/sqrt(2), FD agreement") {
    CHECK(djacobian_dv_partial(kRef, kRefV) == doctest::Approx(0.05358258812338205).epsilon(1e-12));
    CHECK(djacobian_dv_partial({0.3, 0.7, 0.4}, MixingParam{std::sqrt(0.5)})
          == doctest::Approx(0.0).epsilon(1e-15));

    Rng rng(9753);
    const double h = 1e-6;
    for (int i = 0; i < 500; ++i) {
        const SourceVector s = test::random_source(rng);
        const MixingParam v = test::random_coupling(rng);
        const double fd =
            central_diff([&](double vv) { return jacobian(s, MixingParam{vv}); }, v.v, h);
        CHECK(test::rel_err(djacobian_dv_partial(s, v), fd, 1e-10) < 1e-5);
    }
}

TEST_CASE("djacobian_ddelta: zero at zero phase, negative sign, FD agreement") {
    CHECK(djacobian_ddelta(kRef, kRefV) == 0.0);
    Rng rng(8642);
    for (int i = 0; i < 200; ++i) {
        SourceVector s = test::random_source(rng);
        s.delta = rng.uniform(0.01, 1.45);
        CHECK(djacobian_ddelta(s, test::random_coupling(rng)) < 0.0);
    }
    const double h = 1e-6;
    for (int i = 0; i < 500; ++i) {
        const SourceVector s = test::random_source(rng);
        const MixingParam v = test::random_coupling(rng);
        const double fd = central_diff(
            [&](double d) { return jacobian({s.r1, s.r2, d}, v); }, s.delta, h);
        CHECK(test::rel_err(djacobian_ddelta(s, v), fd, 1e-10) < 1e-5);
    }
}

TEST_CASE("djacobian_dv_total reduces to the direct term at zero phase") {
    const SourceVector s{0.3, 0.7, 0.0};
    const MixingParam v{0.45};
    const double r1s = 0.09;
    const double r2s = 0.49;
    const double expected = 8.0 * r1s * r2s * (r2s - r1s) * std::sqrt(1.0 - r1s)
                          * std::sqrt(1.0 - r2s) * (1.0 - 2.0 * v.v * v.v)
                          / std::sqrt(1.0 - v.v * v.v);
    CHECK(djacobian_dv_total(s, v) == doctest::Approx(expected).epsilon(1e-13));
}

TEST_CASE("djacobian_dv_total decomposes into direct plus indirect parts") {
    Rng rng(11235);
    for (int i = 0; i < 10000; ++i) {
        const SourceVector s = test::random_source(rng);
        const MixingParam v = test::random_coupling(rng);
        const double total = djacobian_dv_total(s, v);
        const double assembled =
            djacobian_dv_partial(s, v) + djacobian_ddelta(s, v) * dphase_dv(s, v);
        CHECK(std::abs(total - assembled) <= 1e-10 * std::max(1.0, std::abs(total)));
    }
}

TEST_CASE("djacobian_dv_total matches the observation-fixed finite difference") {
    Rng rng(31415);
    const double h = 1e-6;
    for (int i = 0; i < 500; ++i) {
        const SourceVector s = test::random_source(rng, 0.05, 0.05, 1.3);
        const MixingParam v = test::random_coupling(rng, 0.1);
        const ObservationVector x = forward(s, v);
        const double fd = central_diff(
            [&](double vv) {
                const MixingParam mv{vv};
                return jacobian(invert(x, mv), mv);
            },
            v.v, h);
        CHECK(test::rel_err(djacobian_dv_total(s, v), fd, 1e-10) < 1e-6);
    }
}
