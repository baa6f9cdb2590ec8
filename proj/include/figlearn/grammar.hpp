#pragma once

#include <utility>
#include <vector>

#include "figlearn/program.hpp"
#include "figlearn/rng.hpp"

namespace figlearn::dsl {

// Sufficient statistics of a derivation for re-scoring the prior at new
// grammar parameters without walking the tree again:
//   log_prior(theta) = log_const
//                    + orient_yes*log(to) + orient_no*log(1-to)
//                    + config_free*log(tc) + config_fixed*log(1-tc)
struct ExpansionCounts {
    int orient_yes = 0;
    int orient_no = 0;
    int config_free = 0;
    int config_fixed = 0;
    double log_const = 0.0;

    double log_prior(double theta_orient, double theta_config) const;
};

// Probabilistic grammar over concept programs. Two expansion distributions
// carry free parameters: the root choice of whether the concept is closed
// under rotation (theta_orient) and the choice between attach and attach*
// (theta_config). Every other expansion is uniform over its alternatives.
//
// Depth is derivation depth: the start symbol is at level 0 and each rewrite
// level adds one. The smallest program (a bare primitive) needs depth 3.
// Expansions that could not terminate within depth_cap are removed and the
// remaining alternatives renormalized.
class Grammar {
public:
    Grammar(double theta_orient, double theta_config, int depth_cap = 12);

    double theta_orient() const { return theta_orient_; }
    double theta_config() const { return theta_config_; }
    int depth_cap() const { return depth_cap_; }

    Program sample_program(Rng& rng) const;

    // -inf for programs that the capped grammar cannot generate.
    double log_prior(const Program& p) const;
    ExpansionCounts expansion_counts(const Program& p) const;

    // A regeneration site per AST node, preorder. The root regenerates the
    // whole program from the start symbol; a Map's over-set regenerates as a
    // primitive set; every other node regenerates as a figure-set expansion
    // at its recorded budget.
    struct Site {
        enum class Kind { Start, FigureSet, PrimitiveSet } kind = Kind::Start;
        int budget = 0;
        bool in_body = false;
        std::vector<int> path;  // 0 = child a, 1 = child b
    };

    std::vector<Site> sites(const Program& p) const;
    NodePtr regenerate(const Site& s, Rng& rng) const;
    double log_generation(const Site& s, const NodePtr& subtree) const;
    static Program replace(const Program& p, const Site& s, NodePtr subtree);
    static NodePtr subtree_at(const Program& p, const Site& s);

    // Every program of derivation depth <= depth_cap with its log prior.
    // Throws EnumerationBudgetExceeded past max_programs.
    std::vector<std::pair<Program, double>> enumerate_all(size_t max_programs = 1000000) const;

private:
    double theta_orient_;
    double theta_config_;
    int depth_cap_;
};

} // namespace figlearn::dsl
