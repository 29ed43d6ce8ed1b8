#include "qmix/likelihood.hpp"

#include <algorithm>
#include <cmath>

#include "qmix/parallel.hpp"

namespace qmix {

namespace {

struct SampleTerms {
    double logl = 0.0;
    double grad_total_closed = 0.0;
    double grad_total_assembled = 0.0;
    double grad_partial = 0.0;
    SampleStatus status = SampleStatus::Ok;
};

// One pass over a sample: reconstruct the sources at the queried coupling and
// evaluate the log-likelihood term plus all gradient flavors. Must not throw;
// failures are reported through the status field so the parallel region stays
// exception-free.
SampleTerms compute_terms(const ObservationVector& x, double v, const PriorConfig& cfg,
                          double cos_guard) noexcept {
    SampleTerms t;
    const auto inv = detail::try_invert(x, v);
    if (inv.status != SampleStatus::Ok) {
        t.status = inv.status;
        return t;
    }
    const double c = std::cos(inv.delta);
    if (!(std::abs(c) >= cos_guard)) {
        t.status = SampleStatus::NearSingularPhase;
        return t;
    }

    const double lf1 = detail::log_pdf_raw(cfg, SourceId::R1, inv.r1);
    const double lf2 = detail::log_pdf_raw(cfg, SourceId::R2, inv.r2);
    const double lfd = detail::log_pdf_raw(cfg, SourceId::Delta, inv.delta);
    if (std::isnan(lf1) || std::isnan(lf2) || std::isnan(lfd)) {
        t.status = SampleStatus::OutOfSupport;
        return t;
    }

    const double jg = detail::jacobian_raw(inv.r1, inv.r2, inv.delta, v);
    t.logl = lf1 + lf2 + lfd - std::log(jg);

    const double psi = detail::score_raw(cfg, SourceId::Delta, inv.delta);

    // Fused per-sample gradient: score contribution through the phase
    // sensitivity, then the Jacobian contribution with the direct and
    // indirect pieces already combined and divided through by the Jacobian.
    {
        const double r1s = inv.r1 * inv.r1;
        const double r2s = inv.r2 * inv.r2;
        const double gap = r2s - r1s;
        const double kp = inv.r1 * inv.r2 * std::sqrt(1.0 - r1s) * std::sqrt(1.0 - r2s);
        const double w = std::sqrt(1.0 - v * v);
        const double sn = std::sin(inv.delta);
        const double one_m2v2 = 1.0 - 2.0 * v * v;
        const double vw2 = (1.0 - v * v) * v;
        const double phase_sens = gap / (kp * w * c) - one_m2v2 * sn / (vw2 * c);
        t.grad_total_closed =
            -psi * phase_sens
            - (one_m2v2 / (vw2 * c * c) - gap * sn / (kp * w * c * c));
    }

    // Same quantity assembled from the derivative blocks. The amplitude
    // reconstructions carry no coupling dependency, so only the phase score
    // enters the source term.
    {
        const double dphase = detail::dphase_dv_raw(inv.r1, inv.r2, inv.delta, v);
        const double djg_total = detail::djacobian_dv_total_raw(inv.r1, inv.r2, inv.delta, v);
        const double djg_partial = detail::djacobian_dv_partial_raw(inv.r1, inv.r2, inv.delta, v);
        t.grad_total_assembled = -psi * dphase - djg_total / jg;
        t.grad_partial = -psi * dphase - djg_partial / jg;
    }

    return t;
}

enum class Field { LogL, GradTotalClosed, GradTotalAssembled, GradPartial };

double pick(const SampleTerms& t, Field f) noexcept {
    switch (f) {
        case Field::LogL: return t.logl;
        case Field::GradTotalClosed: return t.grad_total_closed;
        case Field::GradTotalAssembled: return t.grad_total_assembled;
        case Field::GradPartial: return t.grad_partial;
    }
    return 0.0;
}

Eval reduce(const SampleSet& data, MixingParam vp, const PriorConfig& cfg,
            const EvalOptions& opts, Field field) {
    vp.validate();
    cfg.validate();
    const std::size_t n = data.size();
    if (n == 0) {
        throw EvaluationError("sample set is empty");
    }
    if (opts.mask != nullptr && opts.mask->size() != n) {
        throw PreconditionError("mask size does not match the sample count");
    }
    const double guard = std::max(opts.cos_guard, tol::kNearSingularCos);
    const double v = vp.v;

    const auto terms = par::fill_indexed<SampleTerms>(
        n, [&](std::size_t i) { return compute_terms(data.observations[i], v, cfg, guard); },
        opts.parallel);

    Eval out;
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (opts.mask != nullptr && (*opts.mask)[i] == 0) {
            ++out.excluded;
            continue;
        }
        if (terms[i].status != SampleStatus::Ok) {
            if (!opts.allow_exclusion) {
                throw EvaluationError(i, to_string(terms[i].status));
            }
            ++out.excluded;
            continue;
        }
        acc += pick(terms[i], field);
        ++out.used;
    }
    if (out.used == 0) {
        throw EvaluationError("no evaluable sample at the queried coupling value");
    }
    out.value = acc / static_cast<double>(out.used);
    return out;
}

}  // namespace

const char* to_string(GradientVariant variant) noexcept {
    return variant == GradientVariant::Total ? "total" : "partial-only";
}

Eval log_likelihood(const SampleSet& data, MixingParam v, const PriorConfig& cfg,
                    const EvalOptions& opts) {
    return reduce(data, v, cfg, opts, Field::LogL);
}

Eval dlogl_dv_total(const SampleSet& data, MixingParam v, const PriorConfig& cfg,
                    GradientRoute route, const EvalOptions& opts) {
    return reduce(data, v, cfg, opts,
                  route == GradientRoute::ClosedForm ? Field::GradTotalClosed
                                                     : Field::GradTotalAssembled);
}

Eval dlogl_dv_partial_only(const SampleSet& data, MixingParam v, const PriorConfig& cfg,
                           const EvalOptions& opts) {
    return reduce(data, v, cfg, opts, Field::GradPartial);
}

std::vector<SampleStatus> sample_statuses(const SampleSet& data, MixingParam v,
                                          const PriorConfig& cfg, double cos_guard) {
    v.validate();
    cfg.validate();
    const double guard = std::max(cos_guard, tol::kNearSingularCos);
    return par::fill_indexed<SampleStatus>(data.size(), [&](std::size_t i) {
        return compute_terms(data.observations[i], v.v, cfg, guard).status;
    });
}

std::vector<std::uint8_t> evaluable_mask(const SampleSet& data, MixingParam v,
                                         const PriorConfig& cfg, double cos_guard) {
    const auto statuses = sample_statuses(data, v, cfg, cos_guard);
    std::vector<std::uint8_t> mask(statuses.size());
    for (std::size_t i = 0; i < statuses.size(); ++i) {
        mask[i] = statuses[i] == SampleStatus::Ok ? 1 : 0;
    }
    return mask;
}

}  // namespace qmix
