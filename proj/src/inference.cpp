#include "figlearn/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "figlearn/errors.hpp"
#include "figlearn/rng.hpp"

namespace figlearn::infer {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

bool contains(const dsl::Extension& ext, int32_t id) {
    return std::binary_search(ext.begin(), ext.end(), id);
}

} // namespace

size_t HypothesisSet::upsert(Hypothesis h) {
    auto it = index.find(h.text);
    if (it != index.end()) {
        items[it->second].visits += h.visits;
        return it->second;
    }
    const size_t pos = items.size();
    index.emplace(h.text, pos);
    items.push_back(std::move(h));
    return pos;
}

double log_likelihood(const dsl::Extension& extension,
                      const std::vector<int32_t>& examples,
                      int32_t universe_size) {
    if (examples.empty()) {
        fail("MissingData", "likelihood needs at least one example");
    }
    for (int32_t x : examples) {
        if (x < 0 || x >= universe_size) {
            fail("UnknownFigure", "example id " + std::to_string(x) + " outside the universe");
        }
    }
    if (extension.empty()) return kNegInf;
    for (int32_t x : examples) {
        if (!contains(extension, x)) return kNegInf;
    }
    return -static_cast<double>(examples.size()) *
           std::log(static_cast<double>(extension.size()));
}

namespace {

struct ChainResult {
    std::vector<Hypothesis> pool;  // insertion order
    std::unordered_map<std::string, size_t> index;
    ChainStats stats;

    Hypothesis& upsert(Hypothesis h) {
        auto it = index.find(h.text);
        if (it != index.end()) return pool[it->second];
        index.emplace(h.text, pool.size());
        pool.push_back(std::move(h));
        return pool.back();
    }
};

struct State {
    dsl::Program program;
    std::string text;
    double log_prior = 0.0;
    double log_lik = 0.0;
};

// Evaluation failures (attach budget) make a hypothesis infeasible rather
// than fatal: empty extension, -inf likelihood.
dsl::Extension safe_eval(dsl::Evaluator& ev, const dsl::Program& p) {
    try {
        return ev.evaluate(p);
    } catch (const Error& e) {
        if (e.code() == "EvaluationBudgetExceeded") return {};
        throw;
    }
}

ChainResult run_chain(const dsl::Grammar& grammar,
                      dsl::Evaluator& evaluator,
                      const std::vector<int32_t>& examples,
                      const McmcOptions& opt,
                      int chain_index) {
    Rng rng = Rng::for_stream(opt.seed, static_cast<uint64_t>(chain_index));
    const int32_t usize = evaluator.universe().size();
    const int64_t burn_in =
        static_cast<int64_t>(static_cast<double>(opt.steps) * opt.burn_in_frac);

    ChainResult out;
    auto make_hypothesis = [&](const dsl::Program& p, const std::string& text,
                               const dsl::Extension& ext, double lp) {
        Hypothesis h;
        h.program = p;
        h.text = text;
        h.counts = grammar.expansion_counts(p);
        h.extension = ext;
        h.log_prior = lp;
        h.size = static_cast<int64_t>(ext.size());
        return h;
    };

    State cur;
    cur.program = grammar.sample_program(rng);
    cur.text = dsl::print_program(cur.program);
    cur.log_prior = grammar.log_prior(cur.program);
    dsl::Extension cur_ext = safe_eval(evaluator, cur.program);
    cur.log_lik = cur_ext.empty() ? kNegInf : log_likelihood(cur_ext, examples, usize);
    out.upsert(make_hypothesis(cur.program, cur.text, cur_ext, cur.log_prior));

    for (int64_t step = 0; step < opt.steps; ++step) {
        const auto sites = grammar.sites(cur.program);
        const size_t pick = rng.uniform_int(sites.size());
        const dsl::Grammar::Site& site = sites[pick];

        const dsl::NodePtr old_subtree = dsl::Grammar::subtree_at(cur.program, site);
        const dsl::NodePtr new_subtree = grammar.regenerate(site, rng);

        State prop;
        prop.program = dsl::Grammar::replace(cur.program, site, new_subtree);
        prop.text = dsl::print_program(prop.program);
        prop.log_prior = grammar.log_prior(prop.program);
        dsl::Extension prop_ext = safe_eval(evaluator, prop.program);
        prop.log_lik = prop_ext.empty() ? kNegInf : log_likelihood(prop_ext, examples, usize);

        if (opt.pool == PoolMode::Visited) {
            out.upsert(make_hypothesis(prop.program, prop.text, prop_ext, prop.log_prior));
        }

        // q(h'|h) = (1/#nodes(h)) * P_gen(new subtree at site); the reverse
        // move regenerates the old subtree at the same path in h'.
        const double log_q_fwd = -std::log(static_cast<double>(sites.size())) +
                                 grammar.log_generation(site, new_subtree);
        const double log_q_rev =
            -std::log(static_cast<double>(dsl::node_count(prop.program))) +
            grammar.log_generation(site, old_subtree);

        bool accept;
        if (std::isinf(prop.log_lik) && !std::isinf(cur.log_lik)) {
            accept = false;
        } else if (std::isinf(cur.log_lik) && !std::isinf(prop.log_lik)) {
            accept = true;
        } else {
            // Off support on both sides the likelihood terms cancel and the
            // walk follows the prior.
            const double lik_term =
                (std::isinf(cur.log_lik) || std::isinf(prop.log_lik))
                    ? 0.0
                    : prop.log_lik - cur.log_lik;
            const double log_acc =
                (prop.log_prior + log_q_rev) - (cur.log_prior + log_q_fwd) + lik_term;
            accept = log_acc >= 0.0 || rng.next_double() < std::exp(log_acc);
        }

        if (accept) {
            cur = prop;
            cur_ext = std::move(prop_ext);
            ++out.stats.accepted;
            if (opt.pool == PoolMode::Accepted) {
                out.upsert(make_hypothesis(cur.program, cur.text, cur_ext, cur.log_prior));
            }
        }
        if (step >= burn_in) {
            out.upsert(make_hypothesis(cur.program, cur.text, cur_ext, cur.log_prior)).visits +=
                1;
        }
    }

    out.stats.steps = opt.steps;
    out.stats.acceptance_rate =
        opt.steps > 0 ? static_cast<double>(out.stats.accepted) /
                            static_cast<double>(opt.steps)
                      : 0.0;
    out.stats.stalled = opt.steps >= 1000 && out.stats.acceptance_rate < 0.01;
    return out;
}

} // namespace

HypothesisSet mcmc_run(const dsl::Grammar& grammar,
                       dsl::Evaluator& evaluator,
                       const std::vector<int32_t>& examples,
                       const McmcOptions& options) {
    if (options.steps < 1 || options.chains < 1) {
        fail("OutOfRange", "mcmc needs at least one chain and one step");
    }
    // Examples are validated once up front so every chain sees the same data.
    for (int32_t x : examples) {
        if (x < 0 || x >= evaluator.universe().size()) {
            fail("UnknownFigure", "example id " + std::to_string(x) + " outside the universe");
        }
    }

    std::vector<ChainResult> results(static_cast<size_t>(options.chains));
    if (options.parallel && options.chains > 1) {
        std::vector<std::thread> workers;
        workers.reserve(static_cast<size_t>(options.chains));
        for (int c = 0; c < options.chains; ++c) {
            workers.emplace_back([&, c]() {
                results[static_cast<size_t>(c)] =
                    run_chain(grammar, evaluator, examples, options, c);
            });
        }
        for (std::thread& w : workers) w.join();
    } else {
        for (int c = 0; c < options.chains; ++c) {
            results[static_cast<size_t>(c)] = run_chain(grammar, evaluator, examples, options, c);
        }
    }

    HypothesisSet pool;
    pool.seed = options.seed;
    pool.chains = options.chains;
    pool.steps = options.steps;
    pool.burn_in_frac = options.burn_in_frac;
    for (ChainResult& r : results) {
        for (Hypothesis& h : r.pool) pool.upsert(std::move(h));
        pool.chain_stats.push_back(r.stats);
    }
    return pool;
}

std::vector<double> posterior_weights(const HypothesisSet& pool,
                                      const std::vector<int32_t>& examples,
                                      int32_t universe_size,
                                      double theta_orient,
                                      double theta_config) {
    if (pool.items.empty()) {
        fail("AllZeroWeights", "empty hypothesis set");
    }
    std::vector<double> logs(pool.items.size(), kNegInf);
    double best = kNegInf;
    for (size_t i = 0; i < pool.items.size(); ++i) {
        const Hypothesis& h = pool.items[i];
        const double ll = log_likelihood(h.extension, examples, universe_size);
        if (std::isinf(ll)) continue;
        logs[i] = h.counts.log_prior(theta_orient, theta_config) + ll;
        best = std::max(best, logs[i]);
    }
    if (std::isinf(best)) {
        fail("AllZeroWeights", "no hypothesis in the pool explains the examples");
    }
    double total = 0.0;
    std::vector<double> weights(pool.items.size(), 0.0);
    for (size_t i = 0; i < logs.size(); ++i) {
        if (!std::isinf(logs[i])) {
            weights[i] = std::exp(logs[i] - best);
            total += weights[i];
        }
    }
    for (double& w : weights) w /= total;
    return weights;
}

double predict(const HypothesisSet& pool, const std::vector<double>& weights, int32_t y) {
    double q = 0.0;
    for (size_t i = 0; i < pool.items.size(); ++i) {
        if (weights[i] > 0.0 && contains(pool.items[i].extension, y)) {
            q += weights[i];
        }
    }
    return q;
}

ExactPosterior exact_posterior(const dsl::Grammar& grammar,
                               dsl::Evaluator& evaluator,
                               const std::vector<int32_t>& examples,
                               size_t max_programs) {
    const int32_t usize = evaluator.universe().size();
    ExactPosterior out;
    std::vector<double> logs;
    double best = kNegInf;
    for (auto& [program, log_prior] : grammar.enumerate_all(max_programs)) {
        Hypothesis h;
        h.program = program;
        h.text = dsl::print_program(program);
        h.counts = grammar.expansion_counts(program);
        h.extension = [&]() -> dsl::Extension {
            try {
                return evaluator.evaluate(program);
            } catch (const Error& e) {
                if (e.code() == "EvaluationBudgetExceeded") return {};
                throw;
            }
        }();
        h.log_prior = log_prior;
        h.size = static_cast<int64_t>(h.extension.size());
        const double ll = log_likelihood(h.extension, examples, usize);
        const double score = std::isinf(ll) ? kNegInf : log_prior + ll;
        best = std::max(best, score);
        logs.push_back(score);
        out.items.push_back(std::move(h));
    }
    if (std::isinf(best)) {
        fail("AllZeroWeights", "no program within the depth cap explains the examples");
    }
    double total = 0.0;
    out.weights.assign(logs.size(), 0.0);
    for (size_t i = 0; i < logs.size(); ++i) {
        if (!std::isinf(logs[i])) {
            out.weights[i] = std::exp(logs[i] - best);
            total += out.weights[i];
        }
    }
    for (double& w : out.weights) w /= total;
    return out;
}

double predict(const ExactPosterior& exact, int32_t y) {
    double q = 0.0;
    for (size_t i = 0; i < exact.items.size(); ++i) {
        if (exact.weights[i] > 0.0 && contains(exact.items[i].extension, y)) {
            q += exact.weights[i];
        }
    }
    return q;
}

} // namespace figlearn::infer
