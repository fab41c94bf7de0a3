#pragma once

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <unordered_set>
#include <vector>

#include "core.hpp"
#include "parallel.hpp"

namespace seqmine {

struct MiningStats {
    Count candidates_generated = 0;
    Count database_passes = 0;
    std::chrono::nanoseconds elapsed{0};
};

struct MiningResult {
    std::vector<SupportedPattern> patterns;
    MiningStats stats;
    std::size_t database_size = 0;
};

namespace detail {

// ---------------------------------------------------------------------------
// Pseudo-projection. For each sequence that contains the current prefix we
// keep every transaction index at which the prefix's last element can be
// matched by some constraint-respecting embedding. Keeping the full set (not
// just the leftmost match) is what makes max_gap / max_index_gap exact.
// ---------------------------------------------------------------------------

struct Projected {
    std::uint32_t seq;
    std::vector<std::uint32_t> ends; // ascending
};
using Projection = std::vector<Projected>;

struct ExtensionCounts {
    std::vector<Count> sequence_ext; // item -> #sequences, new element {item}
    std::vector<Count> itemset_ext;  // item -> #sequences, item joins last element
};

inline bool gap_free(const Constraints& c) noexcept {
    return c.min_gap == 0 && !c.max_gap && !c.max_index_gap;
}

/// Transactions of `seq` that may host the next element after `ends`.
inline void next_positions(const DataSequence& seq, std::span<const std::uint32_t> ends,
                           const Constraints& c, std::vector<char>& valid) {
    const std::size_t n = seq.size();
    valid.assign(n, 0);
    if (ends.empty()) return;
    if (gap_free(c)) {
        for (std::size_t t = ends.front() + 1; t < n; ++t) valid[t] = 1;
        return;
    }
    for (std::size_t t2 = ends.front() + 1; t2 < n; ++t2) {
        for (std::uint32_t t1 : ends) {
            if (t1 >= t2) break;
            if (c.gap_ok(seq[t2].time - seq[t1].time, t2 - t1 - 1)) {
                valid[t2] = 1;
                break;
            }
        }
    }
}

/// Per-item support of every length-1 pattern.
inline std::vector<Count> count_items(std::span<const DataSequence> seqs, ItemId bound) {
    std::vector<Count> counts(bound, 0);
    std::vector<std::size_t> stamp(bound, std::numeric_limits<std::size_t>::max());
    for (std::size_t s = 0; s < seqs.size(); ++s)
        for (const auto& t : seqs[s].transactions())
            for (ItemId i : t.items)
                if (stamp[i] != s) {
                    stamp[i] = s;
                    ++counts[i];
                }
    return counts;
}

inline Projection project_item(std::span<const DataSequence> seqs, ItemId item) {
    Projection out;
    for (std::uint32_t s = 0; s < seqs.size(); ++s) {
        Projected p{s, {}};
        for (std::uint32_t t = 0; t < seqs[s].size(); ++t)
            if (seqs[s][t].items.contains(item)) p.ends.push_back(t);
        if (!p.ends.empty()) out.push_back(std::move(p));
    }
    return out;
}

inline void count_extensions(std::span<const DataSequence> seqs, const Projection& proj, ItemId last_item,
                             const Constraints& c, ItemId bound, ExtensionCounts& out) {
    out.sequence_ext.assign(bound, 0);
    out.itemset_ext.assign(bound, 0);
    std::vector<std::size_t> seen_s(bound, std::numeric_limits<std::size_t>::max());
    std::vector<std::size_t> seen_i(bound, std::numeric_limits<std::size_t>::max());
    std::vector<char> valid;
    for (std::size_t k = 0; k < proj.size(); ++k) {
        const auto& p = proj[k];
        const auto& seq = seqs[p.seq];
        for (std::uint32_t t : p.ends) {
            const auto items = seq[t].items.items();
            for (auto it = std::upper_bound(items.begin(), items.end(), last_item); it != items.end(); ++it)
                if (seen_i[*it] != k) {
                    seen_i[*it] = k;
                    ++out.itemset_ext[*it];
                }
        }
        next_positions(seq, p.ends, c, valid);
        for (std::size_t t = 0; t < seq.size(); ++t) {
            if (!valid[t]) continue;
            for (ItemId i : seq[t].items)
                if (seen_s[i] != k) {
                    seen_s[i] = k;
                    ++out.sequence_ext[i];
                }
        }
    }
}

inline Projection project_sequence_ext(std::span<const DataSequence> seqs, const Projection& proj, ItemId item,
                                       const Constraints& c) {
    Projection out;
    std::vector<char> valid;
    for (const auto& p : proj) {
        const auto& seq = seqs[p.seq];
        next_positions(seq, p.ends, c, valid);
        Projected q{p.seq, {}};
        for (std::uint32_t t = 0; t < seq.size(); ++t)
            if (valid[t] && seq[t].items.contains(item)) q.ends.push_back(t);
        if (!q.ends.empty()) out.push_back(std::move(q));
    }
    return out;
}

inline Projection project_itemset_ext(std::span<const DataSequence> seqs, const Projection& proj, ItemId item) {
    Projection out;
    for (const auto& p : proj) {
        Projected q{p.seq, {}};
        for (std::uint32_t t : p.ends)
            if (seqs[p.seq][t].items.contains(item)) q.ends.push_back(t);
        if (!q.ends.empty()) out.push_back(std::move(q));
    }
    return out;
}

inline SupportedPattern make_supported(Pattern p, Count count, std::size_t n) {
    return {std::move(p), count, static_cast<double>(count) / static_cast<double>(n)};
}

inline void check_input(const SequenceDatabase& db, const Constraints& c) {
    if (db.empty()) throw Error(Errc::EmptyDatabase, "sequence database is empty");
    c.validate();
}

} // namespace detail

// ---------------------------------------------------------------------------
// GSP-style level-wise miner
// ---------------------------------------------------------------------------

/// Level-m candidates from the frequent level m-1: append a frequent item as
/// a new element, or add it into the last element. A candidate survives only
/// if the pattern without its first item is frequent; when no max_gap or
/// max_index_gap is active, every single-item deletion is checked.
inline std::vector<Pattern> gsp_candidates(std::span<const Pattern> prev, std::span<const ItemId> frequent_items,
                                           const Constraints& c) {
    const std::unordered_set<Pattern, PatternHash> known(prev.begin(), prev.end());
    const bool full_prune = c.interior_pruning_safe();

    auto survives = [&](const Pattern& cand) {
        if (full_prune) {
            // the last item's deletion is the parent, already frequent
            for (std::size_t e = 0; e < cand.element_count(); ++e)
                for (std::size_t i = 0; i < cand[e].size(); ++i) {
                    if (e + 1 == cand.element_count() && i + 1 == cand[e].size()) continue;
                    if (!known.contains(*cand.without_item(e, i))) return false;
                }
            return true;
        }
        return known.contains(*cand.without_first_item());
    };

    std::vector<Pattern> out;
    for (const auto& p : prev) {
        for (ItemId item : frequent_items) {
            Pattern s = p.with_new_element(item);
            if (survives(s)) out.push_back(std::move(s));
        }
        for (auto it = std::upper_bound(frequent_items.begin(), frequent_items.end(), p.last_item());
             it != frequent_items.end(); ++it) {
            Pattern i = p.with_item_in_last(*it);
            if (survives(i)) out.push_back(std::move(i));
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

inline MiningResult gsp_mine(const SequenceDatabase& db, const Constraints& c) {
    detail::check_input(db, c);
    const auto start = std::chrono::steady_clock::now();
    const auto seqs = db.sequences();
    const Count min_count = c.min_count(db.size());

    MiningResult result;
    result.database_size = db.size();
    auto& stats = result.stats;

    const auto item_counts = detail::count_items(seqs, db.item_bound());
    stats.database_passes = 1;
    stats.candidates_generated = item_counts.size();

    std::vector<ItemId> frequent_items;
    std::vector<Pattern> level;
    for (ItemId i = 0; i < item_counts.size(); ++i) {
        if (item_counts[i] >= min_count && c.length_ok(1)) {
            frequent_items.push_back(i);
            level.push_back(Pattern{Itemset{i}});
            result.patterns.push_back(detail::make_supported(level.back(), item_counts[i], db.size()));
        }
    }

    for (std::size_t m = 2; !level.empty(); ++m) {
        // the pass that would discover level m; empty when capped by max_length
        ++stats.database_passes;
        if (!c.length_ok(m)) break;
        auto candidates = gsp_candidates(level, frequent_items, c);
        stats.candidates_generated += candidates.size();

        std::vector<Count> counts(candidates.size(), 0);
        parallel_for(candidates.size(), [&](std::size_t k) {
            Count n = 0;
            for (const auto& s : seqs) n += contains(candidates[k], s, c) ? 1 : 0;
            counts[k] = n;
        });

        level.clear();
        for (std::size_t k = 0; k < candidates.size(); ++k) {
            if (counts[k] < min_count) continue;
            result.patterns.push_back(detail::make_supported(candidates[k], counts[k], db.size()));
            level.push_back(std::move(candidates[k]));
        }
    }

    sort_patterns(result.patterns);
    stats.elapsed = std::chrono::steady_clock::now() - start;
    return result;
}

// ---------------------------------------------------------------------------
// PrefixSpan-style pattern growth
// ---------------------------------------------------------------------------

namespace detail {

struct GrowthContext {
    std::span<const DataSequence> seqs;
    const Constraints& constraints;
    Count min_count;
    ItemId bound;
    std::size_t n;
};

struct GrowthOutput {
    std::vector<SupportedPattern> patterns;
    Count candidates = 0;
    std::size_t depth = 0;
};

inline void grow(const GrowthContext& ctx, const Pattern& prefix, const Projection& proj, GrowthOutput& out) {
    out.depth = std::max(out.depth, prefix.size());
    if (!ctx.constraints.length_ok(prefix.size() + 1)) return;
    ExtensionCounts ext;
    count_extensions(ctx.seqs, proj, prefix.last_item(), ctx.constraints, ctx.bound, ext);
    // sequence-extension before itemset-extension at equal prefix
    for (ItemId i = 0; i < ctx.bound; ++i) {
        if (ext.sequence_ext[i] == 0) continue;
        ++out.candidates;
        if (ext.sequence_ext[i] < ctx.min_count) continue;
        Pattern child = prefix.with_new_element(i);
        auto child_proj = project_sequence_ext(ctx.seqs, proj, i, ctx.constraints);
        out.patterns.push_back(make_supported(child, ext.sequence_ext[i], ctx.n));
        grow(ctx, child, child_proj, out);
    }
    for (ItemId i = 0; i < ctx.bound; ++i) {
        if (ext.itemset_ext[i] == 0) continue;
        ++out.candidates;
        if (ext.itemset_ext[i] < ctx.min_count) continue;
        Pattern child = prefix.with_item_in_last(i);
        auto child_proj = project_itemset_ext(ctx.seqs, proj, i);
        out.patterns.push_back(make_supported(child, ext.itemset_ext[i], ctx.n));
        grow(ctx, child, child_proj, out);
    }
}

} // namespace detail

inline MiningResult prefixspan_mine(const SequenceDatabase& db, const Constraints& c) {
    detail::check_input(db, c);
    const auto start = std::chrono::steady_clock::now();
    const auto seqs = db.sequences();
    const ItemId bound = db.item_bound();
    const detail::GrowthContext ctx{seqs, c, c.min_count(db.size()), bound, db.size()};

    MiningResult result;
    result.database_size = db.size();

    const auto item_counts = detail::count_items(seqs, bound);
    std::vector<ItemId> roots;
    for (ItemId i = 0; i < bound; ++i)
        if (item_counts[i] >= ctx.min_count && c.length_ok(1)) roots.push_back(i);

    // one growth branch per frequent item; merged in item order
    std::vector<detail::GrowthOutput> branches(roots.size());
    parallel_for(roots.size(), [&](std::size_t k) {
        const Pattern root{Itemset{roots[k]}};
        auto& out = branches[k];
        out.patterns.push_back(detail::make_supported(root, item_counts[roots[k]], db.size()));
        detail::grow(ctx, root, detail::project_item(seqs, roots[k]), out);
    });

    std::size_t depth = 0;
    result.stats.candidates_generated = bound;
    for (auto& b : branches) {
        depth = std::max(depth, b.depth);
        result.stats.candidates_generated += b.candidates;
        result.patterns.insert(result.patterns.end(), std::make_move_iterator(b.patterns.begin()),
                               std::make_move_iterator(b.patterns.end()));
    }
    // one scan for the items, then one projected scan per growth level
    result.stats.database_passes = 1 + depth;
    sort_patterns(result.patterns);
    result.stats.elapsed = std::chrono::steady_clock::now() - start;
    return result;
}

// ---------------------------------------------------------------------------
// Closed-pattern post filter
// ---------------------------------------------------------------------------

/// Keeps P unless some strictly larger pattern in the result contains it
/// (pattern-in-pattern, gaps ignored) with the same count.
inline MiningResult filter_closed(const MiningResult& result) {
    std::map<Count, std::vector<const SupportedPattern*>> by_count;
    for (const auto& sp : result.patterns) by_count[sp.count].push_back(&sp);

    MiningResult out;
    out.stats = result.stats;
    out.database_size = result.database_size;
    for (const auto& sp : result.patterns) {
        bool absorbed = false;
        for (const SupportedPattern* other : by_count[sp.count]) {
            if (other->pattern.size() > sp.pattern.size() && is_subpattern(sp.pattern, other->pattern)) {
                absorbed = true;
                break;
            }
        }
        if (!absorbed) out.patterns.push_back(sp);
    }
    return out;
}

} // namespace seqmine
