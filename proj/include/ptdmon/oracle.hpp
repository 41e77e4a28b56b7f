// Concrete-parameter membership decider used to cross-check the symbolic
// monitor, plus a deterministic parameter-point sampler. The decider fixes
// all parameters, evaluates data concretely, and searches over unobservable
// insertion times with clock zones only.
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ptdmon/model.hpp"
#include "ptdmon/monitor.hpp"

namespace ptdmon::oracle {

bool decide(const model::Ptda& ptda, const std::map<std::string, Rational>& timing_valuation,
            const std::map<std::string, model::Value>& param_valuation,
            const model::TimedDataWord& word);

struct SamplePoint {
    std::map<std::string, Rational> timing;
    std::map<std::string, model::Value> data;
    bool inside;
};

struct SampleStrategy {
    std::uint64_t seed = 0;
    std::size_t min_points = 200;
};

// Deterministic grid of parameter points around the domain's blocks (bound
// values, midpoints, perturbed exterior values, fresh strings), each tagged
// with domain_contains.
std::vector<SamplePoint> sample_grid(const monitor::ValidityDomain& vd, const model::Ptda& ptda,
                                     const SampleStrategy& strategy);

}  // namespace ptdmon::oracle
