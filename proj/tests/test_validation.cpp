#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "helpers.hpp"
#include "qmix/datagen.hpp"
#include "qmix/validation.hpp"

using namespace qmix;

TEST_CASE("central_diff is exact for quadratics and constants") {
    CHECK(std::abs(central_diff([](double v) { return v * v; }, 3.0, 1e-5) - 6.0) < 1e-9);
    CHECK(std::abs(central_diff([](double) { return 4.2; }, 0.3, 1e-5)) < 1e-12);
}

TEST_CASE("central_diff truncation scales as h^2") {
    const auto f = [](double x) { return std::sin(3.0 * x); };
    const double exact = 3.0 * std::cos(3.0);
    const double c_coarse = std::abs(central_diff(f, 1.0, 1e-4) - exact) / 1e-8;
    const double c_fine = std::abs(central_diff(f, 1.0, 1e-5) - exact) / 1e-10;
    CHECK(c_coarse / c_fine > 0.7);
    CHECK(c_coarse / c_fine < 1.4);
}

TEST_CASE("one Richardson step beats the plain difference") {
    const auto f = [](double x) { return std::sin(3.0 * x); };
    const double exact = 3.0 * std::cos(3.0);
    const double plain = std::abs(central_diff(f, 1.0, 1e-4) - exact);
    const double refined = std::abs(central_diff_richardson(f, 1.0, 1e-4) - exact);
    CHECK(refined < 0.01 * plain);
}

TEST_CASE("fd_det3 reproduces the determinant of a linear map") {
    const Map3 linear = [](const std::array<double, 3>& u) {
        return std::array<double, 3>{2.0 * u[0] - u[1] + 0.5 * u[2],
                                     0.3 * u[0] + 1.1 * u[1] - 0.2 * u[2],
                                     -0.7 * u[0] + 0.4 * u[1] + 0.9 * u[2]};
    };
    // det of [[2,-1,.5],[.3,1.1,-.2],[-.7,.4,.9]]
    const double exact = 2.0 * (1.1 * 0.9 - (-0.2) * 0.4) - (-1.0) * (0.3 * 0.9 - (-0.2) * (-0.7))
                       + 0.5 * (0.3 * 0.4 - 1.1 * (-0.7));
    const double fd = fd_det3(linear, {0.2, 0.4, 0.1}, 1e-6);
    CHECK(test::rel_err(fd, exact) < 1e-9);
}

TEST_CASE("fd_jacobian_det agrees with the analytic Jacobian") {
    Rng rng(606);
    for (int i = 0; i < 300; ++i) {
        const SourceVector s = test::random_source(rng);
        const MixingParam v = test::random_coupling(rng);
        CHECK(test::rel_err(fd_jacobian_det(s, v, 1e-6), jacobian(s, v)) < 1e-5);
    }
}

TEST_CASE("fd_jacobian_det and jacobian vanish together near equal amplitudes") {
    const SourceVector s{0.49995, 0.50005, 0.2};
    const MixingParam v{0.5};
    const double analytic = jacobian(s, v);
    const double fd = fd_jacobian_det(s, v, 1e-7);
    CHECK(std::abs(analytic) < 2e-4);
    CHECK(std::abs(fd) < 2e-4);
    CHECK(std::abs(fd - analytic) < 1e-6);
}

TEST_CASE("fd_jacobian_det reports a stencil leaving the domain") {
    CHECK_THROWS_AS(fd_jacobian_det({5e-7, 0.5, 0.0}, MixingParam{0.5}, 1e-6),
                    DomainTooTightError);
}

TEST_CASE("adaptive_simpson hits textbook integrals") {
    CHECK(std::abs(adaptive_simpson([](double x) { return std::sin(x); }, 0.0,
                                    std::numbers::pi, 1e-12) - 2.0) < 1e-10);
    CHECK(std::abs(adaptive_simpson([](double x) { return x * x * x; }, -1.0, 2.0, 1e-12)
                   - 15.0 / 4.0) < 1e-10);
}

TEST_CASE("default audit grid skips the neighborhood of 1/sqrt(2)") {
    const auto grid = default_audit_grid();
    REQUIRE(grid.size() == 16);
    CHECK(grid.front() == doctest::Approx(0.10));
    CHECK(grid.back() == doctest::Approx(0.90));
    for (const double v : grid) {
        CHECK(std::abs(v - 0.7071067811865476) >= 0.02);
    }
}

TEST_CASE("gradient_audit: total variant tracks the difference quotient, partial-only does not") {
    const PriorConfig cfg;
    const SampleSet data = generate(cfg, MixingParam{0.6}, 300, 99);
    const auto grid = default_audit_grid();
    const auto rows = gradient_audit(data, cfg, grid);
    REQUIRE(rows.size() == 2 * grid.size());

    double worst_total = 0.0;
    double best_partial = 0.0;
    for (const AuditRow& row : rows) {
        REQUIRE(row.ok);
        CHECK(row.skipped < data.size());
        if (row.variant == GradientVariant::Total) {
            worst_total = std::max(worst_total, row.rel_err);
        } else {
            best_partial = std::max(best_partial, row.rel_err);
        }
    }
    CHECK(worst_total <= 1e-5);
    CHECK(best_partial > 1e-2);
}

TEST_CASE("gradient_audit: empty grid, failing point") {
    const PriorConfig cfg;
    const SampleSet data = generate(cfg, MixingParam{0.6}, 50, 3);

    CHECK(gradient_audit(data, cfg, std::vector<double>{}).empty());

    // With few samples the far tail of the grid can have no sample that is
    // evaluable across the whole stencil; force it with an extreme point.
    const std::vector<double> grid{0.011};
    const auto rows = gradient_audit(data, cfg, grid);
    REQUIRE(rows.size() == 2);
    for (const AuditRow& row : rows) {
        CHECK_FALSE(row.ok);
        CHECK_FALSE(row.error.empty());
        CHECK(row.skipped == data.size());
    }
}
