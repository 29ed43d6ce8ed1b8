#include "qmix/sample_set.hpp"

#include <string>

namespace qmix {

void SampleSet::validate() const {
    if (observations.empty()) {
        throw PreconditionError("SampleSet must be nonempty");
    }
    for (std::size_t t = 0; t < observations.size(); ++t) {
        try {
            observations[t].validate();
        } catch (const PreconditionError& e) {
            throw PreconditionError("observation " + std::to_string(t) + ": " + e.what());
        }
    }
}

}  // namespace qmix
