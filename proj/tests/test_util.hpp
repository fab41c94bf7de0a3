#pragma once

#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <seqmine/core.hpp>

namespace seqmine::testing {

/// Alphabet with a..z interned as ids 0..25.
inline Alphabet letters() {
    Alphabet a;
    for (char c = 'a'; c <= 'z'; ++c) a.intern(std::string(1, c));
    return a;
}

inline ItemId id(char c) { return static_cast<ItemId>(c - 'a'); }

inline Itemset iset(std::string_view s) {
    std::vector<ItemId> v;
    for (char c : s) v.push_back(id(c));
    return Itemset(std::move(v));
}

/// "a|bc" -> <{a},{b,c}>
inline Pattern pat(std::string_view s) {
    std::vector<Itemset> els;
    std::size_t start = 0;
    while (true) {
        auto bar = s.find('|', start);
        els.push_back(iset(s.substr(start, bar - start)));
        if (bar == std::string_view::npos) break;
        start = bar + 1;
    }
    return Pattern(std::move(els));
}

using RawSequence = std::pair<std::string, std::vector<std::pair<Time, std::string>>>;

inline DataSequence seq(const RawSequence& raw) {
    std::vector<Transaction> t;
    for (const auto& [time, items] : raw.second) t.push_back({time, iset(items)});
    return DataSequence(raw.first, std::move(t));
}

inline SequenceDatabase db(const std::vector<RawSequence>& raws) {
    std::vector<DataSequence> seqs;
    for (const auto& r : raws) seqs.push_back(seq(r));
    return SequenceDatabase(std::move(seqs), letters());
}

inline SequenceDatabase db1() {
    return db({{"S1", {{1, "a"}, {2, "ab"}, {3, "c"}}},
               {"S2", {{1, "a"}, {2, "c"}, {3, "b"}}},
               {"S3", {{1, "b"}, {2, "ab"}, {3, "c"}}},
               {"S4", {{1, "a"}, {5, "b"}}}});
}

inline std::vector<Itemset> tdb1() { return {iset("abc"), iset("ab"), iset("ac"), iset("bc")}; }

inline Constraints unconstrained(double min_support = 1.0) {
    Constraints c;
    c.min_support = min_support;
    return c;
}

inline Itemset random_itemset(std::mt19937_64& rng, std::size_t alphabet, double p = 0.35) {
    std::bernoulli_distribution coin(p);
    std::vector<ItemId> v;
    for (ItemId i = 0; i < alphabet; ++i)
        if (coin(rng)) v.push_back(i);
    if (v.empty()) v.push_back(static_cast<ItemId>(std::uniform_int_distribution<std::size_t>(0, alphabet - 1)(rng)));
    return Itemset(std::move(v));
}

inline DataSequence random_sequence(std::mt19937_64& rng, std::string id, std::size_t alphabet,
                                    std::size_t max_txns) {
    const auto n = std::uniform_int_distribution<std::size_t>(1, max_txns)(rng);
    std::uniform_int_distribution<Time> step(1, 3);
    std::vector<Transaction> t;
    Time time = 0;
    for (std::size_t k = 0; k < n; ++k) {
        time += step(rng);
        t.push_back({time, random_itemset(rng, alphabet)});
    }
    return DataSequence(std::move(id), std::move(t));
}

inline SequenceDatabase random_db(std::mt19937_64& rng, std::size_t max_items = 6, std::size_t max_seqs = 8,
                                  std::size_t max_txns = 5) {
    const auto items = std::uniform_int_distribution<std::size_t>(1, max_items)(rng);
    const auto n = std::uniform_int_distribution<std::size_t>(1, max_seqs)(rng);
    std::vector<DataSequence> seqs;
    for (std::size_t s = 0; s < n; ++s) seqs.push_back(random_sequence(rng, "s" + std::to_string(s), items, max_txns));
    return SequenceDatabase(std::move(seqs), letters());
}

inline std::vector<Itemset> random_transactions(std::mt19937_64& rng, std::size_t max_items = 8,
                                                std::size_t max_txns = 12) {
    const auto items = std::uniform_int_distribution<std::size_t>(1, max_items)(rng);
    const auto n = std::uniform_int_distribution<std::size_t>(1, max_txns)(rng);
    std::vector<Itemset> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(random_itemset(rng, items, 0.45));
    return out;
}

/// Containment by enumerating every strictly increasing index tuple.
inline bool brute_contains(const Pattern& p, const DataSequence& s, const Constraints& c) {
    std::vector<std::size_t> idx;
    auto rec = [&](auto& self, std::size_t j, std::size_t from) -> bool {
        if (j == p.element_count()) return true;
        for (std::size_t t = from; t < s.size(); ++t) {
            if (!p[j].is_subset_of(s[t].items)) continue;
            if (j > 0) {
                const auto prev = idx.back();
                if (!c.gap_ok(s[t].time - s[prev].time, t - prev - 1)) continue;
            }
            idx.push_back(t);
            if (self(self, j + 1, t + 1)) return true;
            idx.pop_back();
        }
        return false;
    };
    return rec(rec, 0, 0);
}

/// The grid of constraint settings used by the equivalence checks.
inline std::vector<Constraints> constraint_grid(double min_support, std::size_t max_length) {
    std::vector<Constraints> out;
    for (int max_gap : {0, 1, 2})
        for (int max_index_gap : {-1, 0, 1})
            for (int min_gap : {0, 1}) {
                Constraints c;
                c.min_support = min_support;
                c.max_length = max_length;
                c.min_gap = min_gap;
                if (max_gap > 0) c.max_gap = max_gap;
                if (max_index_gap >= 0) c.max_index_gap = static_cast<std::size_t>(max_index_gap);
                if (c.max_gap && *c.max_gap <= c.min_gap) continue;
                out.push_back(c);
            }
    return out;
}

} // namespace seqmine::testing
