#include "figlearn/grammar.hpp"

#include <cmath>
#include <limits>

#include "figlearn/errors.hpp"

namespace figlearn::dsl {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Figure-set alternatives, in sampling order.
enum class FsAlt : int { Prim = 0, Has = 1, Comb = 2, Map = 3, Rot = 4 };

// A leaf consumes two derivation levels (category + terminal choice); a
// combinator consumes two and hands budget-2 to each child figure set.
constexpr int kLeafCost = 2;
constexpr int kCombCost = 4;

int fs_option_count(int budget) {
    if (budget >= kCombCost) return 5;
    if (budget >= kLeafCost) return 2;  // PrimSet and Has leaves
    return 0;
}

bool fs_alt_available(FsAlt alt, int budget) {
    switch (alt) {
        case FsAlt::Prim:
        case FsAlt::Has:
            return budget >= kLeafCost;
        default:
            return budget >= kCombCost;
    }
}

int prim_option_count(bool in_body) { return in_body ? 6 : 5; }

struct Walk {
    double log_prob = 0.0;
    int orient_yes = 0;
    int orient_no = 0;
    int config_free = 0;
    int config_fixed = 0;
    double log_theta = 0.0;  // contribution of the parameterized choices
    bool reachable = true;
};

} // namespace

double ExpansionCounts::log_prior(double theta_orient, double theta_config) const {
    return log_const + orient_yes * std::log(theta_orient) +
           orient_no * std::log1p(-theta_orient) + config_free * std::log(theta_config) +
           config_fixed * std::log1p(-theta_config);
}

Grammar::Grammar(double theta_orient, double theta_config, int depth_cap)
    : theta_orient_(theta_orient), theta_config_(theta_config), depth_cap_(depth_cap) {
    if (!(theta_orient > 0.0 && theta_orient < 1.0) ||
        !(theta_config > 0.0 && theta_config < 1.0)) {
        fail("OutOfRange", "grammar parameters must lie strictly inside (0,1)");
    }
    if (depth_cap < 3) {
        fail("NoTerminalAlternative",
             "depth cap " + std::to_string(depth_cap) + " cannot derive any program");
    }
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

namespace {

NodePtr sample_prim_set(Rng& rng, bool in_body) {
    const int n = prim_option_count(in_body);
    const int pick = static_cast<int>(rng.uniform_int(static_cast<uint64_t>(n)));
    if (pick < 4) return make_prim_set(pick);
    if (pick == 4) return make_prim_set(-1);
    return make_var();
}

NodePtr sample_fset(Rng& rng, int budget, bool in_body, double theta_config) {
    const int n_opts = fs_option_count(budget);
    if (n_opts == 0) {
        fail("NoTerminalAlternative", "no expansion fits the remaining depth budget");
    }
    FsAlt alt;
    if (n_opts == 2) {
        alt = rng.bernoulli(0.5) ? FsAlt::Prim : FsAlt::Has;
    } else {
        alt = static_cast<FsAlt>(rng.uniform_int(5));
    }
    switch (alt) {
        case FsAlt::Prim:
            return sample_prim_set(rng, in_body);
        case FsAlt::Has:
            return make_has(static_cast<int>(rng.uniform_int(4)));
        case FsAlt::Comb: {
            const bool free_form = rng.bernoulli(theta_config);
            NodePtr l = sample_fset(rng, budget - 2, in_body, theta_config);
            NodePtr r = sample_fset(rng, budget - 2, in_body, theta_config);
            if (free_form) return make_attach(std::move(l), std::move(r));
            const int idx = 1 + static_cast<int>(rng.uniform_int(8));
            return make_attach_fixed(std::move(l), std::move(r), idx);
        }
        case FsAlt::Map: {
            NodePtr body = sample_fset(rng, budget - 2, true, theta_config);
            NodePtr over = sample_prim_set(rng, in_body);
            return make_map(std::move(body), std::move(over));
        }
        case FsAlt::Rot: {
            const int angle = 90 * static_cast<int>(rng.uniform_int(4));
            return make_rotate(sample_fset(rng, budget - 2, in_body, theta_config), angle);
        }
    }
    fail("NoTerminalAlternative", "unreachable");
}

} // namespace

Program Grammar::sample_program(Rng& rng) const {
    // The rotations wrapper costs one extra level, so it needs depth >= 4.
    if (depth_cap_ >= 4 && rng.bernoulli(theta_orient_)) {
        return Program{make_all_rotations(sample_fset(rng, depth_cap_ - 2, false, theta_config_))};
    }
    return Program{sample_fset(rng, depth_cap_ - 1, false, theta_config_)};
}

// ---------------------------------------------------------------------------
// Scoring
// ---------------------------------------------------------------------------

namespace {

void score_prim_set(const NodePtr& n, bool in_body, Walk& w) {
    if (n->kind == NodeKind::Var && !in_body) {
        w.reachable = false;
        return;
    }
    w.log_prob -= std::log(static_cast<double>(prim_option_count(in_body)));
}

void score_fset(const NodePtr& n, int budget, bool in_body, double theta_config, Walk& w) {
    if (!w.reachable) return;
    const int n_opts = fs_option_count(budget);
    if (n_opts == 0) {
        w.reachable = false;
        return;
    }
    FsAlt alt;
    switch (n->kind) {
        case NodeKind::PrimSet:
        case NodeKind::Var:
            alt = FsAlt::Prim;
            break;
        case NodeKind::Has:
            alt = FsAlt::Has;
            break;
        case NodeKind::Attach:
        case NodeKind::AttachFixed:
            alt = FsAlt::Comb;
            break;
        case NodeKind::Map:
            alt = FsAlt::Map;
            break;
        case NodeKind::Rotate:
            alt = FsAlt::Rot;
            break;
        default:
            w.reachable = false;  // AllRotations below the root
            return;
    }
    if (!fs_alt_available(alt, budget)) {
        w.reachable = false;
        return;
    }
    w.log_prob -= std::log(static_cast<double>(n_opts));
    switch (alt) {
        case FsAlt::Prim:
            score_prim_set(n, in_body, w);
            break;
        case FsAlt::Has:
            w.log_prob -= std::log(4.0);
            break;
        case FsAlt::Comb:
            if (n->kind == NodeKind::Attach) {
                ++w.config_free;
                w.log_theta += std::log(theta_config);
            } else {
                ++w.config_fixed;
                w.log_theta += std::log1p(-theta_config);
                w.log_prob -= std::log(8.0);
            }
            score_fset(n->a, budget - 2, in_body, theta_config, w);
            score_fset(n->b, budget - 2, in_body, theta_config, w);
            break;
        case FsAlt::Map:
            score_fset(n->a, budget - 2, true, theta_config, w);
            score_prim_set(n->b, in_body, w);
            break;
        case FsAlt::Rot:
            w.log_prob -= std::log(4.0);
            score_fset(n->a, budget - 2, in_body, theta_config, w);
            break;
    }
}

Walk score_start(const NodePtr& root, double theta_orient, double theta_config, int cap) {
    Walk w;
    if (root->kind == NodeKind::AllRotations) {
        if (cap < 4) {
            w.reachable = false;
            return w;
        }
        ++w.orient_yes;
        w.log_theta += std::log(theta_orient);
        score_fset(root->a, cap - 2, false, theta_config, w);
    } else {
        if (cap >= 4) {
            ++w.orient_no;
            w.log_theta += std::log1p(-theta_orient);
        }
        score_fset(root, cap - 1, false, theta_config, w);
    }
    return w;
}

} // namespace

double Grammar::log_prior(const Program& p) const {
    validate(p);
    const Walk w = score_start(p.root, theta_orient_, theta_config_, depth_cap_);
    if (!w.reachable) return kNegInf;
    return w.log_prob + w.log_theta;
}

ExpansionCounts Grammar::expansion_counts(const Program& p) const {
    validate(p);
    const Walk w = score_start(p.root, theta_orient_, theta_config_, depth_cap_);
    ExpansionCounts c;
    c.orient_yes = w.orient_yes;
    c.orient_no = w.orient_no;
    c.config_free = w.config_free;
    c.config_fixed = w.config_fixed;
    c.log_const = w.reachable ? w.log_prob : kNegInf;
    return c;
}

// ---------------------------------------------------------------------------
// Regeneration sites
// ---------------------------------------------------------------------------

namespace {

void collect_sites(const NodePtr& n, Grammar::Site site, std::vector<Grammar::Site>& out) {
    out.push_back(site);
    auto child = [&site](int step, Grammar::Site::Kind kind, int budget, bool in_body) {
        Grammar::Site s;
        s.kind = kind;
        s.budget = budget;
        s.in_body = in_body;
        s.path = site.path;
        s.path.push_back(step);
        return s;
    };
    using Kind = Grammar::Site::Kind;
    switch (n->kind) {
        case NodeKind::AllRotations:
            collect_sites(n->a, child(0, Kind::FigureSet, site.budget - 2, false), out);
            break;
        case NodeKind::Rotate:
            collect_sites(n->a, child(0, Kind::FigureSet, site.budget - 2, site.in_body), out);
            break;
        case NodeKind::Attach:
        case NodeKind::AttachFixed:
            collect_sites(n->a, child(0, Kind::FigureSet, site.budget - 2, site.in_body), out);
            collect_sites(n->b, child(1, Kind::FigureSet, site.budget - 2, site.in_body), out);
            break;
        case NodeKind::Map:
            collect_sites(n->a, child(0, Kind::FigureSet, site.budget - 2, true), out);
            collect_sites(n->b, child(1, Kind::PrimitiveSet, site.budget - 2, site.in_body), out);
            break;
        default:
            break;
    }
}

} // namespace

std::vector<Grammar::Site> Grammar::sites(const Program& p) const {
    std::vector<Site> out;
    Site root;
    root.kind = Site::Kind::Start;
    root.budget = p.root->kind == NodeKind::AllRotations ? depth_cap_ : depth_cap_ - 1;
    root.in_body = false;
    collect_sites(p.root, root, out);
    return out;
}

NodePtr Grammar::regenerate(const Site& s, Rng& rng) const {
    switch (s.kind) {
        case Site::Kind::Start:
            return sample_program(rng).root;
        case Site::Kind::FigureSet:
            return sample_fset(rng, s.budget, s.in_body, theta_config_);
        case Site::Kind::PrimitiveSet:
            return sample_prim_set(rng, s.in_body);
    }
    fail("NoTerminalAlternative", "unreachable");
}

double Grammar::log_generation(const Site& s, const NodePtr& subtree) const {
    Walk w;
    switch (s.kind) {
        case Site::Kind::Start:
            w = score_start(subtree, theta_orient_, theta_config_, depth_cap_);
            break;
        case Site::Kind::FigureSet:
            score_fset(subtree, s.budget, s.in_body, theta_config_, w);
            break;
        case Site::Kind::PrimitiveSet:
            if (subtree->kind != NodeKind::PrimSet && subtree->kind != NodeKind::Var) {
                return kNegInf;
            }
            score_prim_set(subtree, s.in_body, w);
            break;
    }
    if (!w.reachable) return kNegInf;
    return w.log_prob + w.log_theta;
}

namespace {

NodePtr replace_rec(const NodePtr& n, const std::vector<int>& path, size_t depth,
                    const NodePtr& subtree) {
    if (depth == path.size()) return subtree;
    Node copy = *n;
    if (path[depth] == 0) {
        copy.a = replace_rec(n->a, path, depth + 1, subtree);
    } else {
        copy.b = replace_rec(n->b, path, depth + 1, subtree);
    }
    return std::make_shared<const Node>(std::move(copy));
}

} // namespace

Program Grammar::replace(const Program& p, const Site& s, NodePtr subtree) {
    return Program{replace_rec(p.root, s.path, 0, subtree)};
}

NodePtr Grammar::subtree_at(const Program& p, const Site& s) {
    NodePtr cur = p.root;
    for (int step : s.path) {
        cur = step == 0 ? cur->a : cur->b;
    }
    return cur;
}

// ---------------------------------------------------------------------------
// Exhaustive enumeration
// ---------------------------------------------------------------------------

namespace {

struct Enumerator {
    size_t max_programs;
    size_t produced = 0;

    void bump() {
        if (++produced > max_programs) {
            fail("EnumerationBudgetExceeded",
                 "program enumeration exceeds " + std::to_string(max_programs));
        }
    }

    std::vector<std::pair<NodePtr, double>> prim_sets(bool in_body) {
        std::vector<std::pair<NodePtr, double>> out;
        const double lp = -std::log(static_cast<double>(prim_option_count(in_body)));
        for (int prim = 0; prim < 4; ++prim) out.emplace_back(make_prim_set(prim), lp);
        out.emplace_back(make_prim_set(-1), lp);
        if (in_body) out.emplace_back(make_var(), lp);
        return out;
    }

    std::vector<std::pair<NodePtr, double>> fsets(int budget, bool in_body,
                                                  double theta_config) {
        std::vector<std::pair<NodePtr, double>> out;
        const int n_opts = fs_option_count(budget);
        if (n_opts == 0) return out;
        const double alt_lp = -std::log(static_cast<double>(n_opts));

        for (auto& [n, lp] : prim_sets(in_body)) {
            bump();
            out.emplace_back(std::move(n), alt_lp + lp);
        }
        for (int prim = 0; prim < 4; ++prim) {
            bump();
            out.emplace_back(make_has(prim), alt_lp - std::log(4.0));
        }
        if (n_opts == 2) return out;

        const auto children = fsets(budget - 2, in_body, theta_config);
        for (const auto& [l, lp_l] : children) {
            for (const auto& [r, lp_r] : children) {
                bump();
                out.emplace_back(make_attach(l, r),
                                 alt_lp + std::log(theta_config) + lp_l + lp_r);
                for (int idx = 1; idx <= 8; ++idx) {
                    bump();
                    out.emplace_back(make_attach_fixed(l, r, idx),
                                     alt_lp + std::log1p(-theta_config) - std::log(8.0) +
                                         lp_l + lp_r);
                }
            }
        }
        for (const auto& [body, lp_b] : fsets(budget - 2, true, theta_config)) {
            for (const auto& [over, lp_o] : prim_sets(in_body)) {
                bump();
                out.emplace_back(make_map(body, over), alt_lp + lp_b + lp_o);
            }
        }
        for (const auto& [c, lp_c] : children) {
            for (int k = 0; k < 4; ++k) {
                bump();
                out.emplace_back(make_rotate(c, 90 * k), alt_lp - std::log(4.0) + lp_c);
            }
        }
        return out;
    }
};

} // namespace

std::vector<std::pair<Program, double>> Grammar::enumerate_all(size_t max_programs) const {
    Enumerator en{max_programs};
    std::vector<std::pair<Program, double>> out;
    const bool orient_choice = depth_cap_ >= 4;
    for (auto& [n, lp] : en.fsets(depth_cap_ - 1, false, theta_config_)) {
        out.emplace_back(Program{std::move(n)},
                         lp + (orient_choice ? std::log1p(-theta_orient_) : 0.0));
    }
    if (orient_choice) {
        for (auto& [n, lp] : en.fsets(depth_cap_ - 2, false, theta_config_)) {
            out.emplace_back(Program{make_all_rotations(std::move(n))},
                             lp + std::log(theta_orient_));
        }
    }
    return out;
}

} // namespace figlearn::dsl
