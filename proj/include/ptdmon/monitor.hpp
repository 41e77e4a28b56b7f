// Online symbolic monitoring: symbolic configurations across observable
// events, unobservable-edge saturation with elapsed-time tracking, final
// closure, and the accumulated validity domain.
#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "ptdmon/model.hpp"
#include "ptdmon/poly.hpp"
#include "ptdmon/strdom.hpp"

namespace ptdmon::monitor {

struct DataConf {
    strdom::StringState strings;
    poly::Polyhedron numeric;  // over numeric variables and numeric data parameters
};

struct Configuration {
    std::uint32_t location;
    poly::Polyhedron timed;  // over clocks and timing parameters
    DataConf data;
};

// One product block of the validity domain.
struct Block {
    poly::Polyhedron timing;  // over timing parameters
    std::map<std::string, strdom::StringParamConstraint> strings;
    poly::Polyhedron numeric;  // over numeric data parameters

    std::string canonical_key() const;
};

// b inside a, pointwise.
bool block_includes(const Block& a, const Block& b);

class ValidityDomain {
public:
    // Returns false when the block is a syntactic duplicate of a stored one.
    bool add(Block b);
    const std::vector<Block>& blocks() const { return blocks_; }
    std::size_t size() const { return blocks_.size(); }

private:
    std::vector<Block> blocks_;
    std::unordered_set<std::string> keys_;
};

bool domain_contains(const model::Ptda& ptda, const ValidityDomain& vd,
                     const std::map<std::string, Rational>& timing_valuation,
                     const std::map<std::string, model::Value>& param_valuation);

// Exact pointwise inclusion of `sub` in `super`, decided with the polyhedra
// engine over a finite set of representative strings per string parameter.
bool domain_includes(const model::Ptda& ptda, const ValidityDomain& super, const ValidityDomain& sub);
bool domain_equal(const model::Ptda& ptda, const ValidityDomain& a, const ValidityDomain& b);

// Absorbs blocks included in other blocks and merges mergeable pairs; the
// denoted point set is unchanged.
ValidityDomain minimize_domain(const ValidityDomain& vd);

// Merging optimization: configurations with the same location, the same timed
// part, and the same string projection are joined when their numeric parts
// form an exact convex union.
std::vector<Configuration> merge_confs(std::vector<Configuration> confs);

struct MonitorOptions {
    bool merging = true;
    // When false, blocks are only reported (sink / step return value), not
    // accumulated; memory stays flat on long logs.
    bool store_results = true;
    // Called with the 1-based index of the triggering event (n+1 for the
    // final closure) for each block as it is found.
    std::function<void(std::size_t, const Block&)> sink;
};

class Monitor {
public:
    explicit Monitor(const model::Ptda& ptda, MonitorOptions options = {});

    std::vector<Block> step(model::Event ev);
    std::vector<Block> finalize();

    const model::Ptda& ptda() const { return ptda_; }
    const ValidityDomain& result() const { return result_; }
    const std::vector<Configuration>& current() const { return current_; }
    const Rational& last_timestamp() const { return last_ts_; }
    std::size_t event_index() const { return event_index_; }
    std::size_t peak_configurations() const { return peak_confs_; }
    std::size_t blocks_found() const { return blocks_found_; }
    bool finalized() const { return finalized_; }

private:
    struct UConfiguration {
        std::uint32_t location;
        poly::Polyhedron timed_plus;  // clocks, timing parameters, elapsed time
        DataConf data;
    };

    std::optional<DataConf> apply_data(const model::Edge& edge, const DataConf& data,
                                       const model::Event* ev,
                                       const std::map<std::string, std::string>* slocals) const;
    void emit(std::size_t index, Block block, std::vector<Block>& out);

    const model::Ptda& ptda_;
    MonitorOptions options_;
    std::vector<Configuration> current_;
    ValidityDomain result_;
    Rational last_ts_ = 0;
    std::size_t event_index_ = 0;
    std::size_t peak_confs_ = 0;
    std::size_t blocks_found_ = 0;
    bool finalized_ = false;

    std::set<std::uint32_t> var_ids_;            // numeric variable dims
    std::set<std::uint32_t> clock_and_elapsed_;  // flowing dims in the eps phase
    std::set<std::uint32_t> clocks_and_elapsed_removed_;  // projection for result blocks
};

}  // namespace ptdmon::monitor
