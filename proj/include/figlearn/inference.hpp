#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "figlearn/evaluate.hpp"
#include "figlearn/grammar.hpp"
#include "figlearn/program.hpp"

namespace figlearn::infer {

struct Hypothesis {
    dsl::Program program;
    std::string text;               // canonical key
    dsl::ExpansionCounts counts;
    dsl::Extension extension;
    double log_prior = 0.0;         // at the sampling grammar's parameters
    int64_t size = 0;               // |h|
    int64_t visits = 0;             // post-burn-in chain occupancy, all chains
};

struct ChainStats {
    int64_t steps = 0;
    int64_t accepted = 0;
    double acceptance_rate = 0.0;
    bool stalled = false;  // acceptance below 1%; inspect the trial setup
};

// Deduplicated hypotheses discovered by the chains, keyed by program text.
struct HypothesisSet {
    std::vector<Hypothesis> items;
    std::unordered_map<std::string, size_t> index;

    uint64_t seed = 0;
    int chains = 0;
    int64_t steps = 0;
    double burn_in_frac = 0.0;
    std::vector<ChainStats> chain_stats;

    size_t upsert(Hypothesis h);  // merges visits when the program is known
};

enum class PoolMode {
    Visited,   // every evaluated hypothesis, including rejected proposals
    Accepted,  // only states the chains occupied
};

struct McmcOptions {
    int64_t steps = 100000;
    int chains = 3;
    uint64_t seed = 1;
    double burn_in_frac = 0.10;
    PoolMode pool = PoolMode::Visited;
    bool parallel = true;
};

// Size-principle likelihood: -k log|h| when every example lies in the
// extension, -inf otherwise (and always -inf for an empty extension).
double log_likelihood(const dsl::Extension& extension,
                      const std::vector<int32_t>& examples,
                      int32_t universe_size);

// Tree-regeneration Metropolis-Hastings from a fresh prior sample per chain.
// Deterministic given the seed; chains use independent streams and merge in
// chain order.
HypothesisSet mcmc_run(const dsl::Grammar& grammar,
                       dsl::Evaluator& evaluator,
                       const std::vector<int32_t>& examples,
                       const McmcOptions& options);

// Normalized posterior over the pooled hypotheses at arbitrary grammar
// parameters, via the stored expansion counts. Throws AllZeroWeights when no
// hypothesis explains the examples.
std::vector<double> posterior_weights(const HypothesisSet& pool,
                                      const std::vector<int32_t>& examples,
                                      int32_t universe_size,
                                      double theta_orient,
                                      double theta_config);

// Posterior predictive membership probability of figure y.
double predict(const HypothesisSet& pool, const std::vector<double>& weights, int32_t y);

struct ExactPosterior {
    std::vector<Hypothesis> items;
    std::vector<double> weights;
};

// Exhaustive enumeration of every program within the grammar's depth cap,
// with exact normalized posterior weights. The testing oracle for mcmc_run.
ExactPosterior exact_posterior(const dsl::Grammar& grammar,
                               dsl::Evaluator& evaluator,
                               const std::vector<int32_t>& examples,
                               size_t max_programs = 1000000);

double predict(const ExactPosterior& exact, int32_t y);

} // namespace figlearn::infer
