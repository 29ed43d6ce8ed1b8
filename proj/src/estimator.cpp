#include "qmix/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qmix {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Per-sample feasibility in u = v^2: |A + B u| <= 2K sqrt(u (1 - u)) with
// A = r1^2 (1 - r2^2) - p3, B = r2^2 - r1^2, K = r1 r2 c1 c2. Squaring gives
// (B^2 + 4K^2) u^2 + (2AB - 4K^2) u + A^2 <= 0, a single u-interval.
Interval sample_feasible_u(const ObservationVector& x) {
    const Amplitudes amp = invert_amplitudes(x);
    const double r1s = amp.r1 * amp.r1;
    const double r2s = amp.r2 * amp.r2;
    const double a = r1s * (1.0 - r2s);
    const double b = (1.0 - r1s) * r2s;
    const double k2 = a * b;  // (r1 r2 c1 c2)^2
    const double big_a = a - x.p3;
    const double big_b = b - a;

    const double qa = big_b * big_b + 4.0 * k2;
    const double qb = 2.0 * big_a * big_b - 4.0 * k2;
    const double qc = big_a * big_a;
    const double disc = qb * qb - 4.0 * qa * qc;
    if (!(disc > 0.0)) {
        return {1.0, 0.0};  // empty
    }
    const double root = std::sqrt(disc);
    // Both roots are nonnegative (product qc/qa >= 0, and the parabola must
    // dip below zero somewhere in [0,1] for a feasible sample).
    const double q = -0.5 * (qb + std::copysign(root, qb));
    double u1 = q / qa;
    double u2 = (q != 0.0) ? qc / q : 0.0;
    if (u1 > u2) {
        std::swap(u1, u2);
    }
    return {std::max(u1, 0.0), std::min(u2, 1.0)};
}

struct Candidate {
    double v = 0.0;
    double logl = 0.0;
    double grad = 0.0;
    bool boundary = false;
    VBracket bracket{};
};

struct Evaluator {
    const SampleSet& data;
    const PriorConfig& cfg;
    EvalOptions eval_opts;
    GradientVariant variant;
    mutable std::size_t n_evals = 0;

    Eval logl(double v) const {
        ++n_evals;
        return log_likelihood(data, MixingParam{v}, cfg, eval_opts);
    }
    Eval grad(double v) const {
        ++n_evals;
        if (variant == GradientVariant::Total) {
            return dlogl_dv_total(data, MixingParam{v}, cfg, GradientRoute::ClosedForm, eval_opts);
        }
        return dlogl_dv_partial_only(data, MixingParam{v}, cfg, eval_opts);
    }
};

// Derivative-free fallback: golden-section maximization of the likelihood.
double golden_section_max(const Evaluator& ev, double lo, double hi, double vtol) {
    constexpr double kInvPhi = 0.6180339887498949;
    double a = lo;
    double b = hi;
    double x1 = b - kInvPhi * (b - a);
    double x2 = a + kInvPhi * (b - a);
    double f1 = ev.logl(x1).value;
    double f2 = ev.logl(x2).value;
    while (b - a > vtol) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + kInvPhi * (b - a);
            f2 = ev.logl(x2).value;
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - kInvPhi * (b - a);
            f1 = ev.logl(x1).value;
        }
    }
    return 0.5 * (a + b);
}

}  // namespace

Interval feasible_interval(const SampleSet& data, Interval search) {
    data.validate();
    double lo_u = search.lo > 0.0 ? search.lo * search.lo : 0.0;
    double hi_u = search.hi < 1.0 ? search.hi * search.hi : 1.0;
    for (const ObservationVector& x : data.observations) {
        const Interval u = sample_feasible_u(x);
        lo_u = std::max(lo_u, u.lo);
        hi_u = std::min(hi_u, u.hi);
        if (lo_u >= hi_u) {
            break;
        }
    }
    return {std::sqrt(std::max(lo_u, 0.0)), std::sqrt(std::max(hi_u, 0.0))};
}

std::vector<ScanPoint> scan(const SampleSet& data, const PriorConfig& cfg,
                            std::span<const double> grid, const ScanOptions& opts) {
    data.validate();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] > 0.0 && grid[i] < 1.0)) {
            throw PreconditionError("scan grid points must lie strictly in (0,1)");
        }
        if (i > 0 && !(grid[i] > grid[i - 1])) {
            throw PreconditionError("scan grid must be strictly increasing");
        }
    }
    EvalOptions eo;
    eo.allow_exclusion = opts.allow_exclusion;
    eo.parallel = opts.parallel;

    std::vector<ScanPoint> points;
    points.reserve(grid.size());
    std::size_t failures = 0;
    for (const double v : grid) {
        ScanPoint p;
        p.v = v;
        try {
            const Eval value = log_likelihood(data, MixingParam{v}, cfg, eo);
            const Eval slope = opts.variant == GradientVariant::Total
                                   ? dlogl_dv_total(data, MixingParam{v}, cfg,
                                                    GradientRoute::ClosedForm, eo)
                                   : dlogl_dv_partial_only(data, MixingParam{v}, cfg, eo);
            p.logl = value.value;
            p.dlogl = slope.value;
            p.excluded = value.excluded;
            p.ok = true;
        } catch (const Error& e) {
            p.ok = false;
            p.error = e.what();
            ++failures;
        }
        points.push_back(p);
    }
    if (!grid.empty() && failures == grid.size()) {
        throw ScanError("every scan point failed to evaluate");
    }
    return points;
}

EstimateResult estimate_v(const SampleSet& data, const PriorConfig& cfg,
                          const SearchOptions& opts) {
    data.validate();
    cfg.validate();
    if (!(opts.lo > 0.0 && opts.lo < opts.hi && opts.hi < 1.0)) {
        throw PreconditionError("search domain must satisfy 0 < lo < hi < 1");
    }
    if (opts.coarse_points < 2) {
        throw PreconditionError("coarse scan needs at least 2 points");
    }

    Evaluator ev{data, cfg,
                 EvalOptions{opts.allow_exclusion, tol::kNearSingularCos, opts.parallel, nullptr},
                 opts.variant};

    // Strict evaluation only exists where every sample inverts into the
    // prior support, which for this mixture is a narrow interval around the
    // generating value. Locate it instead of hoping a coarse grid hits it:
    // closed-form inversion feasibility first, then wall refinement on the
    // all-samples-evaluable predicate (the support can cut in earlier than
    // invertibility when the phase prior is narrower than the principal
    // branch).
    double lo = opts.lo + 1e-6 * (opts.hi - opts.lo);
    double hi = opts.hi - 1e-6 * (opts.hi - opts.lo);
    if (!opts.allow_exclusion) {
        const Interval feasible = feasible_interval(data, {opts.lo, opts.hi});
        if (!(feasible.lo < feasible.hi)) {
            throw NoInteriorMaximumError(
                "no coupling value in the search domain admits inversion of every sample", kNaN);
        }
        const double margin = std::max(1e-9 * (feasible.hi - feasible.lo), 1e-14);
        lo = feasible.lo + margin;
        hi = std::max(feasible.hi - margin, lo);

        const auto failures = [&](double v) {
            ++ev.n_evals;
            const auto statuses = sample_statuses(data, MixingParam{v}, cfg, tol::kNearSingularCos);
            std::size_t bad = 0;
            for (const SampleStatus st : statuses) {
                if (st != SampleStatus::Ok) ++bad;
            }
            return bad;
        };

        const std::size_t probe_n = std::max<std::size_t>(opts.coarse_points, 9);
        std::vector<double> pv(probe_n);
        std::vector<std::size_t> pf(probe_n);
        for (std::size_t i = 0; i < probe_n; ++i) {
            pv[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(probe_n - 1);
            pf[i] = failures(pv[i]);
        }
        std::size_t best = 0;
        for (std::size_t i = 1; i < probe_n; ++i) {
            if (pf[i] < pf[best]) best = i;
        }
        if (pf[best] != 0) {
            // The evaluable sliver fell between probes; shrink around the
            // point with the fewest failing samples.
            double a = pv[best > 0 ? best - 1 : 0];
            double b = pv[std::min(best + 1, probe_n - 1)];
            double center = pv[best];
            std::size_t center_f = pf[best];
            for (int iter = 0; iter < 60 && center_f != 0 && b - a > opts.vtol; ++iter) {
                const double l = 0.5 * (a + center);
                const double r = 0.5 * (center + b);
                const std::size_t fl = failures(l);
                const std::size_t fr = failures(r);
                if (fl <= center_f && fl <= fr) {
                    b = center;
                    center = l;
                    center_f = fl;
                } else if (fr <= center_f) {
                    a = center;
                    center = r;
                    center_f = fr;
                } else {
                    a = l;
                    b = r;
                }
            }
            if (center_f != 0) {
                throw NoInteriorMaximumError(
                    "no coupling value evaluates every sample inside the prior support", center);
            }
            pv.assign(1, center);
            pf.assign(1, 0);
            best = 0;
        }

        // Outermost evaluable probes, then bisect each wall between
        // evaluable and failing points.
        std::size_t first_ok = best;
        while (first_ok > 0 && pf[first_ok - 1] == 0) --first_ok;
        std::size_t last_ok = best;
        while (last_ok + 1 < pf.size() && pf[last_ok + 1] == 0) ++last_ok;

        const auto bisect_wall = [&](double good, double bad) {
            while (std::abs(bad - good) > opts.vtol) {
                const double mid = 0.5 * (good + bad);
                if (failures(mid) == 0) {
                    good = mid;
                } else {
                    bad = mid;
                }
            }
            return good;
        };
        const double wall_lo =
            first_ok > 0 ? bisect_wall(pv[first_ok], pv[first_ok - 1]) : pv[first_ok];
        const double wall_hi = last_ok + 1 < pf.size()
                                   ? bisect_wall(pv[last_ok], pv[last_ok + 1])
                                   : pv[last_ok];
        lo = wall_lo;
        hi = std::max(wall_hi, wall_lo);
    }

    // Coarse scan of the gradient.
    const std::size_t grid_n = std::max<std::size_t>(opts.coarse_points, 2);
    std::vector<double> vs(grid_n);
    std::vector<double> gs(grid_n);
    std::vector<bool> ok(grid_n, false);
    for (std::size_t i = 0; i < grid_n; ++i) {
        vs[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(grid_n - 1);
        try {
            gs[i] = ev.grad(vs[i]).value;
            ok[i] = true;
        } catch (const Error&) {
            ok[i] = false;
        }
    }

    std::vector<Candidate> interior;
    std::vector<Candidate> walls;

    // Refine every descending zero crossing of the gradient by bisection.
    std::size_t sign_changes = 0;
    for (std::size_t i = 0; i + 1 < grid_n; ++i) {
        if (!ok[i] || !ok[i + 1] || !(gs[i] > 0.0 && gs[i + 1] < 0.0)) {
            continue;
        }
        ++sign_changes;
        double a = vs[i];
        double b = vs[i + 1];
        double ga = gs[i];
        bool fell_back = false;
        while (b - a > opts.vtol) {
            const double mid = 0.5 * (a + b);
            double gm = 0.0;
            try {
                gm = ev.grad(mid).value;
            } catch (const Error&) {
                fell_back = true;
                break;
            }
            if (gm == 0.0) {
                a = b = mid;
                break;
            }
            if ((gm > 0.0) == (ga > 0.0)) {
                a = mid;
                ga = gm;
            } else {
                b = mid;
            }
        }
        Candidate c;
        if (fell_back) {
            c.v = golden_section_max(ev, a, b, opts.vtol);
        } else {
            c.v = 0.5 * (a + b);
        }
        try {
            c.logl = ev.logl(c.v).value;
            c.grad = ev.grad(c.v).value;
        } catch (const Error&) {
            continue;
        }
        c.boundary = false;
        c.bracket = {a == b ? c.v - opts.vtol : a, a == b ? c.v + opts.vtol : b};
        interior.push_back(c);
    }

    // Under this mixture the strict gradient is non-decreasing in the
    // coupling for every sample, so a descending crossing often does not
    // exist and the maximum sits at an edge of the evaluable domain. The
    // edges are the fallback candidates, reported as boundary-bracketed.
    for (const std::size_t i : {std::size_t{0}, grid_n - 1}) {
        if (!ok[i]) {
            continue;
        }
        Candidate c;
        c.v = vs[i];
        try {
            c.logl = ev.logl(c.v).value;
        } catch (const Error&) {
            continue;
        }
        c.grad = gs[i];
        c.boundary = true;
        c.bracket = {vs[0] - opts.vtol, vs[grid_n - 1] + opts.vtol};
        walls.push_back(c);
    }

    if (interior.empty() && walls.empty()) {
        // Nothing evaluated; report the best grid value seen, if any.
        double best_v = kNaN;
        for (std::size_t i = 0; i < grid_n; ++i) {
            if (ok[i]) {
                best_v = vs[i];
                break;
            }
        }
        throw NoInteriorMaximumError("no evaluable candidate in the search domain", best_v);
    }

    const auto by_logl = [](const Candidate& x, const Candidate& y) { return x.logl < y.logl; };
    const auto best = interior.empty()
                          ? std::max_element(walls.begin(), walls.end(), by_logl)
                          : std::max_element(interior.begin(), interior.end(), by_logl);

    EstimateResult out;
    out.v_hat = best->v;
    out.logl_at_vhat = best->logl;
    out.grad_at_vhat = best->grad;
    out.boundary_bracketed = best->boundary;
    out.bracket = best->bracket;
    out.sign_changes = sign_changes;
    out.n_evals = ev.n_evals;
    if (opts.allow_exclusion) {
        out.excluded_samples = log_likelihood(data, MixingParam{out.v_hat}, cfg, ev.eval_opts).excluded;
    }
    return out;
}

}  // namespace qmix
