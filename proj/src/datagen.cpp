#include "qmix/datagen.hpp"

#include <cstdio>

#include "qmix/parallel.hpp"
#include "qmix/rng.hpp"

namespace qmix {

namespace {

// Stream tag separating perturbation draws from generation draws.
constexpr std::uint64_t kPerturbStream = 0x706572747572ull;

std::string hash_hex(const PriorConfig& cfg) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(cfg.hash()));
    return buf;
}

}  // namespace

SampleSet generate(const PriorConfig& cfg, MixingParam v_true, std::size_t n, std::uint64_t seed) {
    cfg.validate();
    v_true.validate();
    if (n == 0) {
        throw PreconditionError("generate requires n >= 1");
    }
    const double v = v_true.v;
    SampleSet out;
    out.observations = par::fill_indexed<ObservationVector>(n, [&](std::size_t i) {
        const SourceVector s = detail::draw_source(cfg, seed, i);
        return detail::forward_raw(s.r1, s.r2, s.delta, v);
    });
    out.meta.v_true = v;
    out.meta.seed = seed;
    out.meta.prior_hash = hash_hex(cfg);
    out.validate();
    return out;
}

PerturbResult perturb(const SampleSet& data, double noise_scale, std::uint64_t seed) {
    if (!(noise_scale >= 0.0)) {
        throw PreconditionError("perturb requires noise_scale >= 0");
    }
    data.validate();
    const std::uint64_t base = mix_seed(seed, kPerturbStream);

    struct Candidate {
        ObservationVector x;
        bool keep = false;
    };
    const auto candidates = par::fill_indexed<Candidate>(data.size(), [&](std::size_t i) {
        Rng rng(mix_seed(base, i));
        ObservationVector x = data.observations[i];
        x.p1 += noise_scale * rng.normal();
        x.p2 += noise_scale * rng.normal();
        x.p3 += noise_scale * rng.normal();
        const bool in_range = x.p1 > 0.0 && x.p2 > 0.0 && x.p3 >= 0.0 && x.p3 <= 1.0;
        const bool invertible =
            in_range && detail::observation_status(x) == SampleStatus::Ok;
        return Candidate{x, invertible};
    });

    PerturbResult out;
    out.data.meta = data.meta;
    out.data.meta.noise_scale = noise_scale;
    out.data.observations.reserve(data.size());
    for (const Candidate& c : candidates) {
        if (c.keep) {
            out.data.observations.push_back(c.x);
        } else {
            ++out.dropped;
        }
    }
    if (out.data.observations.empty()) {
        throw DegenerateDataError("perturbation invalidated every sample");
    }
    return out;
}

}  // namespace qmix
