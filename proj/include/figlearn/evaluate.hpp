#pragma once

#include <cstdint>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "figlearn/geometry.hpp"
#include "figlearn/program.hpp"

namespace figlearn::dsl {

// A concept's extension: sorted unique universe figure ids.
using Extension = std::vector<int32_t>;

struct EvalOptions {
    // Cap on |A| x |B| pair enumerations per attach node; independent of
    // cache state so the same program always succeeds or fails identically.
    size_t attach_pair_budget = 250000;
    bool memoize = true;
};

// Denotational evaluator over one universe. Results are memoized per
// subprogram; concurrent evaluate calls on the same instance are safe and
// yield identical results.
class Evaluator {
public:
    explicit Evaluator(const geom::Universe& u, EvalOptions opt = {})
        : universe_(u), opt_(opt) {}

    Extension evaluate(const Program& p);

    const geom::Universe& universe() const { return universe_; }
    const EvalOptions& options() const { return opt_; }

private:
    Extension eval_node(const NodePtr& n, int binding);
    Extension eval_uncached(const NodePtr& n, int binding);

    const geom::Universe& universe_;
    EvalOptions opt_;
    std::unordered_map<std::string, Extension> memo_;
    std::mutex memo_mutex_;
};

} // namespace figlearn::dsl
