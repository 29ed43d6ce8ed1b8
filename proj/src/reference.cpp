#include "qmix/reference.hpp"

#include <cmath>

namespace qmix::reference {

double log_likelihood(const SampleSet& data, MixingParam v, const PriorConfig& cfg) {
    v.validate();
    cfg.validate();
    double acc = 0.0;
    for (const ObservationVector& x : data.observations) {
        const SourceVector s = invert(x, v);
        acc += log_pdf(cfg, SourceId::R1, s.r1);
        acc += log_pdf(cfg, SourceId::R2, s.r2);
        acc += log_pdf(cfg, SourceId::Delta, s.delta);
        acc -= std::log(jacobian(s, v));
    }
    return acc / static_cast<double>(data.size());
}

double dlogl_dv_total(const SampleSet& data, MixingParam v, const PriorConfig& cfg) {
    v.validate();
    cfg.validate();
    double acc = 0.0;
    for (const ObservationVector& x : data.observations) {
        const SourceVector s = invert(x, v);
        const double psi = score(cfg, SourceId::Delta, s.delta);
        acc += -psi * dphase_dv(s, v) - djacobian_dv_total(s, v) / jacobian(s, v);
    }
    return acc / static_cast<double>(data.size());
}

double dlogl_dv_partial_only(const SampleSet& data, MixingParam v, const PriorConfig& cfg) {
    v.validate();
    cfg.validate();
    double acc = 0.0;
    for (const ObservationVector& x : data.observations) {
        const SourceVector s = invert(x, v);
        const double psi = score(cfg, SourceId::Delta, s.delta);
        acc += -psi * dphase_dv(s, v) - djacobian_dv_partial(s, v) / jacobian(s, v);
    }
    return acc / static_cast<double>(data.size());
}

}  // namespace qmix::reference
