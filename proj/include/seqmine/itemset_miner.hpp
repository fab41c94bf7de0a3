#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "core.hpp"
#include "parallel.hpp"

namespace seqmine {

struct FrequentItemset {
    Itemset itemset;
    Count count = 0;
    double support = 0.0;

    bool operator==(const FrequentItemset& o) const {
        return itemset == o.itemset && count == o.count;
    }
};

struct AssociationRule {
    Itemset antecedent;
    Itemset consequent;
    double support = 0.0;
    double confidence = 0.0;
    Count joint_count = 0;
    Count antecedent_count = 0;
};

inline bool by_size_then_lex(const Itemset& a, const Itemset& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
}

inline void sort_itemsets(std::vector<FrequentItemset>& v) {
    std::sort(v.begin(), v.end(), [](const FrequentItemset& a, const FrequentItemset& b) {
        return by_size_then_lex(a.itemset, b.itemset);
    });
}

/// Apriori-gen: prefix-join pairs sharing their first m-2 items, then keep a
/// candidate only if every (m-1)-subset is in `frequent_prev`.
inline std::vector<Itemset> generate_candidates(std::span<const Itemset> frequent_prev) {
    if (frequent_prev.empty()) return {};
    const std::size_t k = frequent_prev.front().size();
    for (const auto& s : frequent_prev)
        if (s.size() != k) throw Error(Errc::MixedSizes, "candidate inputs differ in size");

    std::vector<Itemset> prev(frequent_prev.begin(), frequent_prev.end());
    std::sort(prev.begin(), prev.end());
    const std::unordered_set<Itemset, ItemsetHash> known(prev.begin(), prev.end());

    auto same_prefix = [k](const Itemset& a, const Itemset& b) {
        return std::equal(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(k - 1), b.begin());
    };

    std::vector<Itemset> out;
    for (std::size_t i = 0; i < prev.size(); ++i) {
        for (std::size_t j = i + 1; j < prev.size() && same_prefix(prev[i], prev[j]); ++j) {
            Itemset cand = prev[i].with_appended(prev[j].back());
            bool all_frequent = true;
            // dropping either of the last two items gives prev[i] / prev[j]
            for (std::size_t drop = 0; drop + 2 < cand.size() && all_frequent; ++drop)
                all_frequent = known.contains(*cand.without(drop));
            if (all_frequent) out.push_back(std::move(cand));
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

namespace detail {

inline std::size_t binomial_capped(std::size_t n, std::size_t k, std::size_t cap) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    std::size_t r = 1;
    for (std::size_t i = 1; i <= k; ++i) {
        r = r * (n - k + i) / i;
        if (r > cap) return cap + 1;
    }
    return r;
}

/// Counts each candidate (all of size k) over the transactions. Small
/// transactions enumerate their k-subsets against a hash index; large ones
/// test each candidate by inclusion.
inline std::vector<Count> count_candidates(std::span<const Itemset> transactions,
                                           std::span<const Itemset> candidates, std::size_t k) {
    std::unordered_map<Itemset, std::size_t, ItemsetHash> index;
    index.reserve(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i) index.emplace(candidates[i], i);

    const std::size_t workers = std::max<std::size_t>(1, std::min(thread_count(), transactions.size()));
    std::vector<std::vector<Count>> partial(workers, std::vector<Count>(candidates.size(), 0));

    parallel_chunks(
        transactions.size(),
        [&](std::size_t begin, std::size_t end, std::size_t w) {
            auto& counts = partial[w];
            std::vector<ItemId> buf(k);
            std::vector<std::size_t> pick(k);
            for (std::size_t t = begin; t < end; ++t) {
                const auto& txn = transactions[t];
                if (txn.size() < k) continue;
                if (binomial_capped(txn.size(), k, candidates.size()) <= candidates.size()) {
                    // lexicographic walk over k-combinations of positions
                    for (std::size_t i = 0; i < k; ++i) pick[i] = i;
                    const auto items = txn.items();
                    while (true) {
                        for (std::size_t i = 0; i < k; ++i) buf[i] = items[pick[i]];
                        if (auto it = index.find(Itemset(buf)); it != index.end()) ++counts[it->second];
                        std::size_t i = k;
                        while (i > 0 && pick[i - 1] == txn.size() - k + (i - 1)) --i;
                        if (i == 0) break;
                        ++pick[i - 1];
                        for (std::size_t j = i; j < k; ++j) pick[j] = pick[j - 1] + 1;
                    }
                } else {
                    for (std::size_t c = 0; c < candidates.size(); ++c)
                        if (candidates[c].is_subset_of(txn)) ++counts[c];
                }
            }
        },
        workers);

    std::vector<Count> total(candidates.size(), 0);
    for (const auto& p : partial)
        for (std::size_t c = 0; c < total.size(); ++c) total[c] += p[c];
    return total;
}

} // namespace detail

/// Level-wise Apriori. Output sorted by (size, lexicographic).
inline std::vector<FrequentItemset> mine_frequent_itemsets(std::span<const Itemset> transactions,
                                                           double min_support) {
    if (transactions.empty()) throw Error(Errc::EmptyDatabase, "transaction list is empty");
    if (!(min_support > 0.0 && min_support <= 1.0))
        throw Error(Errc::InvalidThreshold, "min_support must be in (0, 1]");

    const Count n = transactions.size();
    const Count min_count = std::max<Count>(1, Fraction::from_double(min_support).ceil_of(n));
    auto make = [n](const Itemset& s, Count c) {
        return FrequentItemset{s, c, static_cast<double>(c) / static_cast<double>(n)};
    };

    std::vector<FrequentItemset> out;

    // pass 1
    std::unordered_map<ItemId, Count> singles;
    for (const auto& t : transactions)
        for (ItemId i : t) ++singles[i];
    std::vector<Itemset> level;
    for (const auto& [item, c] : singles) {
        if (c >= min_count) {
            level.push_back(Itemset{item});
            out.push_back(make(level.back(), c));
        }
    }
    std::sort(level.begin(), level.end());

    for (std::size_t k = 2; !level.empty(); ++k) {
        auto candidates = generate_candidates(level);
        const auto counts = detail::count_candidates(transactions, candidates, k);
        level.clear();
        for (std::size_t c = 0; c < candidates.size(); ++c) {
            if (counts[c] >= min_count) {
                out.push_back(make(candidates[c], counts[c]));
                level.push_back(std::move(candidates[c]));
            }
        }
    }
    sort_itemsets(out);
    return out;
}

/// Emits X -> Z\X for every frequent Z (|Z| >= 2) and non-empty proper subset
/// X whose confidence count(Z)/count(X) reaches `min_confidence`.
inline std::vector<AssociationRule> generate_rules(std::span<const FrequentItemset> frequent,
                                                   double min_confidence) {
    if (!(min_confidence > 0.0 && min_confidence <= 1.0))
        throw Error(Errc::InvalidThreshold, "min_confidence must be in (0, 1]");

    std::unordered_map<Itemset, const FrequentItemset*, ItemsetHash> by_set;
    for (const auto& f : frequent) by_set.emplace(f.itemset, &f);

    std::vector<const FrequentItemset*> order;
    for (const auto& f : frequent)
        if (f.itemset.size() >= 2) order.push_back(&f);
    std::sort(order.begin(), order.end(), [](const FrequentItemset* a, const FrequentItemset* b) {
        return by_size_then_lex(a->itemset, b->itemset);
    });

    const Fraction min_conf = Fraction::from_double(min_confidence);
    std::vector<AssociationRule> rules;
    for (const FrequentItemset* z : order) {
        const auto items = z->itemset.items();
        const std::size_t m = items.size();
        std::vector<std::pair<Itemset, Itemset>> splits;
        for (std::uint64_t mask = 1; mask + 1 < (std::uint64_t{1} << m); ++mask) {
            std::vector<ItemId> lhs, rhs;
            for (std::size_t i = 0; i < m; ++i) ((mask >> i) & 1U ? lhs : rhs).push_back(items[i]);
            splits.emplace_back(Itemset(std::move(lhs)), Itemset(std::move(rhs)));
        }
        std::sort(splits.begin(), splits.end(), [](const auto& a, const auto& b) {
            return by_size_then_lex(a.first, b.first);
        });
        for (auto& [lhs, rhs] : splits) {
            auto it = by_set.find(lhs);
            if (it == by_set.end())
                throw Error(Errc::MissingSubsetSupport, "no support recorded for a rule antecedent");
            const Count lhs_count = it->second->count;
            // count(Z) / count(X) >= min_conf, compared exactly
            if (static_cast<__int128>(z->count) * Fraction::scale <
                static_cast<__int128>(min_conf.ppm()) * lhs_count)
                continue;
            rules.push_back(AssociationRule{
                std::move(lhs), std::move(rhs), z->support,
                static_cast<double>(z->count) / static_cast<double>(lhs_count), z->count, lhs_count});
        }
    }
    return rules;
}

} // namespace seqmine
