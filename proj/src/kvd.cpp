#include "cohesum/kvd.hpp"

#include <algorithm>

namespace cohesum {

namespace {

// Argmax of phi over a buffer. Ties: greater last_retained_step, then lower id.
struct BestMatch {
    int buffer_pos = -1;
    double similarity = 0.0;
};

BestMatch best_chain(const std::vector<Chain>& buffer, const NounPhrase& np) {
    BestMatch best;
    for (size_t i = 0; i < buffer.size(); ++i) {
        const Chain& c = buffer[i];
        const double s = phi(np, c);
        if (best.buffer_pos < 0) {
            best = {static_cast<int>(i), s};
            continue;
        }
        const Chain& cur = buffer[best.buffer_pos];
        if (s > best.similarity ||
            (s == best.similarity && (c.last_retained_step > cur.last_retained_step ||
                                      (c.last_retained_step == cur.last_retained_step &&
                                       c.id < cur.id)))) {
            best = {static_cast<int>(i), s};
        }
    }
    return best;
}

int rec_of(const MemoryState& mem, const Chain& chain) {
    return std::max(1, mem.step - chain.last_retained_step);
}

} // namespace

const Chain* MemoryState::find_chain(int id) const {
    for (const Chain& c : working)
        if (c.id == id)
            return &c;
    for (const Chain& c : longterm)
        if (c.id == id)
            return &c;
    return nullptr;
}

Chain* MemoryState::find_chain(int id) {
    return const_cast<Chain*>(static_cast<const MemoryState*>(this)->find_chain(id));
}

double phi(const NounPhrase& np, const Chain& chain) {
    if (chain.members.empty())
        throw Error("phi: empty chain " + std::to_string(chain.id));
    double s = 0.0;
    for (const NounPhrase& member : chain.members)
        s += std::max(0.0, cosine(np.embedding, member.embedding));
    return s / static_cast<double>(chain.members.size());
}

std::vector<Assignment> assign_phrases(const std::vector<NounPhrase>& phrases, MemoryState& mem,
                                       double nu) {
    std::vector<Assignment> assignments;
    assignments.reserve(phrases.size());
    for (const NounPhrase& np : phrases) {
        const BestMatch in_working = best_chain(mem.working, np);
        if (in_working.buffer_pos >= 0 && in_working.similarity >= nu) {
            Chain& c = mem.working[in_working.buffer_pos];
            assignments.push_back({np, AssignTarget::Existing, c.id, in_working.similarity});
            c.members.push_back(np);
            continue;
        }
        const BestMatch in_longterm = best_chain(mem.longterm, np);
        if (in_longterm.buffer_pos >= 0 && in_longterm.similarity >= nu) {
            // Recall: the chain grows now but moves to T only on commit.
            Chain& c = mem.longterm[in_longterm.buffer_pos];
            assignments.push_back({np, AssignTarget::Recalled, c.id, in_longterm.similarity});
            c.members.push_back(np);
            continue;
        }
        Chain fresh;
        fresh.id = mem.next_chain_id++;
        fresh.members.push_back(np);
        fresh.last_retained_step = mem.step;
        assignments.push_back({np, AssignTarget::Fresh, fresh.id, 0.0});
        mem.working.push_back(std::move(fresh));
    }
    return assignments;
}

double score_candidate(const std::vector<Assignment>& assignments, const MemoryState& mem,
                       double gamma_rec) {
    double working_sum = 0.0, recall_sum = 0.0;
    int working_n = 0, recall_n = 0;
    for (const Assignment& a : assignments) {
        if (a.target == AssignTarget::Fresh)
            continue;
        const Chain* chain = mem.find_chain(a.chain_id);
        if (!chain)
            throw Error("score_candidate: unknown chain " + std::to_string(a.chain_id));
        const double contribution = a.similarity / static_cast<double>(rec_of(mem, *chain));
        if (a.target == AssignTarget::Existing) {
            working_sum += contribution;
            ++working_n;
        } else {
            recall_sum += contribution;
            ++recall_n;
        }
    }
    double f = 0.0;
    if (working_n > 0)
        f += working_sum / static_cast<double>(working_n);
    if (recall_n > 0)
        f += gamma_rec * (recall_sum / static_cast<double>(recall_n));
    return f;
}

CommitInfo commit_step(MemoryState& mem, const std::vector<Assignment>& assignments,
                       int wm_capacity) {
    CommitInfo info;
    std::vector<int> touched;
    for (const Assignment& a : assignments) {
        touched.push_back(a.chain_id);
        if (a.target == AssignTarget::Recalled) {
            auto it = std::find_if(mem.longterm.begin(), mem.longterm.end(),
                                   [&](const Chain& c) { return c.id == a.chain_id; });
            if (it != mem.longterm.end()) {
                info.recalled_chain_ids.push_back(it->id);
                mem.working.push_back(std::move(*it));
                mem.longterm.erase(it);
            }
        }
    }
    for (Chain& c : mem.working)
        if (std::find(touched.begin(), touched.end(), c.id) != touched.end())
            c.last_retained_step = mem.step + 1;

    // Recency order: higher last_retained_step first, then newer chains first.
    std::stable_sort(mem.working.begin(), mem.working.end(), [](const Chain& a, const Chain& b) {
        if (a.last_retained_step != b.last_retained_step)
            return a.last_retained_step > b.last_retained_step;
        return a.id > b.id;
    });
    while (static_cast<int>(mem.working.size()) > wm_capacity) {
        Chain evicted = std::move(mem.working.back());
        mem.working.pop_back();
        info.evicted_chain_ids.push_back(evicted.id);
        mem.longterm.push_back(std::move(evicted));
    }
    for (Chain& c : mem.working)
        c.last_retained_step = mem.step + 1; // every retained chain is refreshed
    mem.step += 1;
    return info;
}

KvdEvaluation evaluate_candidate(const std::vector<NounPhrase>& phrases, const MemoryState& mem,
                                 double nu, double gamma_rec, int wm_capacity,
                                 bool evict_before_score) {
    MemoryState scratch = mem;
    KvdEvaluation eval;
    eval.assignments = assign_phrases(phrases, scratch, nu);
    if (!evict_before_score) {
        eval.f_coh = score_candidate(eval.assignments, scratch, gamma_rec);
        return eval;
    }
    // Alternate order: update memory first, then score against the post-update
    // state (assignments re-bucketed by where their chain ended up).
    commit_step(scratch, eval.assignments, wm_capacity);
    double working_sum = 0.0, recall_sum = 0.0;
    int working_n = 0, recall_n = 0;
    for (const Assignment& a : eval.assignments) {
        if (a.target == AssignTarget::Fresh)
            continue;
        const Chain* chain = scratch.find_chain(a.chain_id);
        if (!chain)
            continue;
        const bool in_working = std::any_of(scratch.working.begin(), scratch.working.end(),
                                            [&](const Chain& c) { return c.id == a.chain_id; });
        const double contribution =
            a.similarity / static_cast<double>(std::max(1, scratch.step - chain->last_retained_step));
        if (in_working) {
            working_sum += contribution;
            ++working_n;
        } else {
            recall_sum += contribution;
            ++recall_n;
        }
    }
    if (working_n > 0)
        eval.f_coh += working_sum / static_cast<double>(working_n);
    if (recall_n > 0)
        eval.f_coh += gamma_rec * (recall_sum / static_cast<double>(recall_n));
    return eval;
}

} // namespace cohesum
