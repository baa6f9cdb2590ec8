#include "figlearn/evaluate.hpp"

#include <algorithm>
#include <set>

#include "figlearn/errors.hpp"

namespace figlearn::dsl {

namespace {

bool has_free_var(const NodePtr& n) {
    if (!n) return false;
    if (n->kind == NodeKind::Var) return true;
    if (n->kind == NodeKind::Map) return has_free_var(n->b);  // body binds x
    return has_free_var(n->a) || has_free_var(n->b);
}

void sort_unique(Extension& e) {
    std::sort(e.begin(), e.end());
    e.erase(std::unique(e.begin(), e.end()), e.end());
}

// Slots an over-set ranges across.
std::vector<int> over_slots(const NodePtr& over, int binding) {
    if (over->kind == NodeKind::Var) return {binding};
    if (over->prim >= 0) return {over->prim};
    return {0, 1, 2, 3};
}

} // namespace

Extension Evaluator::evaluate(const Program& p) {
    validate(p);
    return eval_node(p.root, -1);
}

Extension Evaluator::eval_node(const NodePtr& n, int binding) {
    if (!opt_.memoize) return eval_uncached(n, binding);
    std::string key = print_node(n);
    if (binding >= 0 && has_free_var(n)) {
        key += "@p";
        key += static_cast<char>('1' + binding);
    }
    {
        std::lock_guard<std::mutex> lock(memo_mutex_);
        auto it = memo_.find(key);
        if (it != memo_.end()) return it->second;
    }
    Extension result = eval_uncached(n, binding);
    std::lock_guard<std::mutex> lock(memo_mutex_);
    auto [it, fresh] = memo_.try_emplace(std::move(key), std::move(result));
    (void)fresh;
    return it->second;
}

Extension Evaluator::eval_uncached(const NodePtr& n, int binding) {
    switch (n->kind) {
        case NodeKind::PrimSet: {
            if (n->prim >= 0) return {universe_.base_figure(n->prim)};
            Extension out;
            for (int slot = 0; slot < 4; ++slot) out.push_back(universe_.base_figure(slot));
            sort_unique(out);
            return out;
        }
        case NodeKind::Var:
            return {universe_.base_figure(binding)};
        case NodeKind::Has:
            return universe_.containing_slot(n->prim);
        case NodeKind::Rotate: {
            Extension in = eval_node(n->a, binding);
            for (int32_t& id : in) id = universe_.rotate_id(id, n->angle);
            sort_unique(in);
            return in;
        }
        case NodeKind::AllRotations: {
            const Extension in = eval_node(n->a, binding);
            Extension out;
            out.reserve(in.size() * 4);
            for (int32_t id : in) {
                int32_t cur = id;
                for (int k = 0; k < 4; ++k) {
                    out.push_back(cur);
                    cur = universe_.rotate_id(cur, 90);
                }
            }
            sort_unique(out);
            return out;
        }
        case NodeKind::Attach:
        case NodeKind::AttachFixed: {
            const Extension left = eval_node(n->a, binding);
            const Extension right = eval_node(n->b, binding);
            const size_t pairs = left.size() * right.size();
            if (pairs > opt_.attach_pair_budget) {
                fail("EvaluationBudgetExceeded",
                     "attach over " + std::to_string(pairs) + " pairs exceeds budget of " +
                         std::to_string(opt_.attach_pair_budget));
            }
            Extension out;
            for (int32_t a : left) {
                for (int32_t b : right) {
                    const std::vector<int32_t>& ids = universe_.attach_ids(a, b);
                    if (n->kind == NodeKind::Attach) {
                        for (int32_t id : ids) {
                            if (id >= 0) out.push_back(id);
                        }
                    } else if (!ids.empty()) {
                        const size_t pick =
                            static_cast<size_t>(n->index - 1) % ids.size();
                        if (ids[pick] >= 0) out.push_back(ids[pick]);
                    }
                }
            }
            sort_unique(out);
            return out;
        }
        case NodeKind::Map: {
            Extension out;
            for (int slot : over_slots(n->b, binding)) {
                const Extension part = eval_node(n->a, slot);
                out.insert(out.end(), part.begin(), part.end());
            }
            sort_unique(out);
            return out;
        }
    }
    fail("IllTypedProgram", "unreachable node kind");
}

} // namespace figlearn::dsl
