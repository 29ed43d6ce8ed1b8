#include "qmix/validation.hpp"

#include <algorithm>
#include <cmath>

namespace qmix {

namespace {

double simpson(double fa, double fm, double fb, double a, double b) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double simpson_adapt(const std::function<double(double)>& f, double a, double b, double eps,
                     double whole, double fa, double fm, double fb, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = simpson(fa, flm, fm, a, m);
    const double right = simpson(fm, frm, fb, m, b);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * eps) {
        return left + right + delta / 15.0;
    }
    return simpson_adapt(f, a, m, 0.5 * eps, left, fa, flm, fm, depth - 1)
         + simpson_adapt(f, m, b, 0.5 * eps, right, fm, frm, fb, depth - 1);
}

std::vector<std::uint8_t> and_masks(const std::vector<std::uint8_t>& a,
                                    const std::vector<std::uint8_t>& b,
                                    const std::vector<std::uint8_t>& c) {
    std::vector<std::uint8_t> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        out[i] = (a[i] != 0 && b[i] != 0 && c[i] != 0) ? 1 : 0;
    }
    return out;
}

}  // namespace

double fd_det3(const Map3& f, const std::array<double, 3>& at, double h) {
    double m[3][3];
    for (int j = 0; j < 3; ++j) {
        std::array<double, 3> plus = at;
        std::array<double, 3> minus = at;
        plus[static_cast<std::size_t>(j)] += h;
        minus[static_cast<std::size_t>(j)] -= h;
        const auto fp = f(plus);
        const auto fm = f(minus);
        for (int i = 0; i < 3; ++i) {
            m[i][j] = (fp[static_cast<std::size_t>(i)] - fm[static_cast<std::size_t>(i)]) / (2.0 * h);
        }
    }
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
         - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
         + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

double fd_jacobian_det(const SourceVector& s, MixingParam v, double h) {
    v.validate();
    const Map3 map = [&](const std::array<double, 3>& u) {
        const SourceVector probe{u[0], u[1], u[2]};
        try {
            probe.validate();
        } catch (const PreconditionError& e) {
            throw DomainTooTightError(std::string("stencil point leaves the domain: ") + e.what());
        }
        const ObservationVector x = detail::forward_raw(u[0], u[1], u[2], v.v);
        return std::array<double, 3>{x.p1, x.p2, x.p3};
    };
    return fd_det3(map, {s.r1, s.r2, s.delta}, h);
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol) {
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(0.5 * (a + b));
    const double whole = simpson(fa, fm, fb, a, b);
    return simpson_adapt(f, a, b, tol, whole, fa, fm, fb, 48);
}

std::vector<double> default_audit_grid() {
    std::vector<double> grid;
    const double inv_sqrt2 = 0.7071067811865476;
    for (int i = 2; i <= 18; ++i) {
        const double v = 0.05 * i;
        if (std::abs(v - inv_sqrt2) < 0.02) {
            continue;
        }
        grid.push_back(v);
    }
    return grid;
}

std::vector<AuditRow> gradient_audit(const SampleSet& data, const PriorConfig& cfg,
                                     std::span<const double> grid, const AuditOptions& opts) {
    std::vector<AuditRow> rows;
    rows.reserve(2 * grid.size());
    const std::size_t n = data.size();
    for (const double v : grid) {
        AuditRow total{v, GradientVariant::Total, 0, 0, 0, 0, 0, false, {}};
        AuditRow partial{v, GradientVariant::PartialOnly, 0, 0, 0, 0, 0, false, {}};
        try {
            // Pin one subset that evaluates cleanly across the whole stencil,
            // so the difference quotient and the analytic values see the same
            // objective.
            const auto mask = and_masks(
                evaluable_mask(data, MixingParam{v - opts.h}, cfg, opts.cos_guard),
                evaluable_mask(data, MixingParam{v}, cfg, opts.cos_guard),
                evaluable_mask(data, MixingParam{v + opts.h}, cfg, opts.cos_guard));
            const auto active =
                static_cast<std::size_t>(std::count(mask.begin(), mask.end(), std::uint8_t{1}));
            const std::size_t skipped = n - active;
            total.skipped = partial.skipped = skipped;
            if (active == 0) {
                throw EvaluationError("no sample is evaluable across the stencil");
            }

            EvalOptions eo;
            eo.cos_guard = opts.cos_guard;
            eo.parallel = opts.parallel;
            eo.mask = &mask;

            const auto logl_at = [&](double vv) {
                return log_likelihood(data, MixingParam{vv}, cfg, eo).value;
            };
            const double fd = opts.richardson
                                  ? central_diff_richardson(logl_at, v, opts.h)
                                  : central_diff(logl_at, v, opts.h);
            total.analytic = dlogl_dv_total(data, MixingParam{v}, cfg,
                                            GradientRoute::ClosedForm, eo).value;
            partial.analytic = dlogl_dv_partial_only(data, MixingParam{v}, cfg, eo).value;

            for (AuditRow* row : {&total, &partial}) {
                row->fd = fd;
                row->abs_err = std::abs(row->analytic - fd);
                row->rel_err = row->abs_err / std::max(std::abs(fd), opts.rel_floor);
                row->ok = true;
            }
        } catch (const Error& e) {
            total.ok = partial.ok = false;
            total.error = partial.error = e.what();
        }
        rows.push_back(total);
        rows.push_back(partial);
    }
    return rows;
}

}  // namespace qmix
