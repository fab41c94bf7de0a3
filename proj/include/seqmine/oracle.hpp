#pragma once

// Exhaustive reference miners. Exponential by construction, capped by hard
// input limits, and deliberately free of any pruning.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <set>
#include <span>
#include <vector>

#include "core.hpp"
#include "itemset_miner.hpp"

namespace seqmine::oracle {

inline constexpr std::size_t max_itemset_alphabet = 16;
inline constexpr std::size_t max_sequence_alphabet = 6;
inline constexpr std::size_t max_sequence_length = 4;

inline std::vector<FrequentItemset> brute_itemsets(std::span<const Itemset> transactions, double min_support) {
    if (transactions.empty()) throw Error(Errc::EmptyDatabase, "transaction list is empty");
    if (!(min_support > 0.0 && min_support <= 1.0))
        throw Error(Errc::InvalidThreshold, "min_support must be in (0, 1]");

    std::set<ItemId> distinct;
    for (const auto& t : transactions) distinct.insert(t.begin(), t.end());
    if (distinct.size() > max_itemset_alphabet)
        throw Error(Errc::AlphabetTooLarge, "brute_itemsets handles at most 16 distinct items");
    const std::vector<ItemId> alphabet(distinct.begin(), distinct.end());

    const Count n = transactions.size();
    const Count min_count = std::max<Count>(1, Fraction::from_double(min_support).ceil_of(n));

    std::vector<FrequentItemset> out;
    for (std::uint32_t mask = 1; mask < (1U << alphabet.size()); ++mask) {
        std::vector<ItemId> items;
        for (std::size_t b = 0; b < alphabet.size(); ++b)
            if ((mask >> b) & 1U) items.push_back(alphabet[b]);
        Itemset s(std::move(items));
        Count c = 0;
        for (const auto& t : transactions)
            if (s.is_subset_of(t)) ++c;
        if (c >= min_count) out.push_back({s, c, static_cast<double>(c) / static_cast<double>(n)});
    }
    sort_itemsets(out);
    return out;
}

/// Every canonical pattern of at most `max_len` items over `alphabet`.
inline std::vector<Pattern> enumerate_patterns(std::span<const ItemId> alphabet, std::size_t max_len) {
    std::vector<Itemset> subsets;
    for (std::uint32_t mask = 1; mask < (1U << alphabet.size()); ++mask) {
        if (static_cast<std::size_t>(std::popcount(mask)) > max_len) continue;
        std::vector<ItemId> items;
        for (std::size_t b = 0; b < alphabet.size(); ++b)
            if ((mask >> b) & 1U) items.push_back(alphabet[b]);
        subsets.emplace_back(std::move(items));
    }

    std::vector<Pattern> out;
    std::vector<Itemset> current;
    auto rec = [&](auto& self, std::size_t used) -> void {
        if (!current.empty()) out.emplace_back(current);
        for (const auto& s : subsets) {
            if (used + s.size() > max_len) continue;
            current.push_back(s);
            self(self, used + s.size());
            current.pop_back();
        }
    };
    rec(rec, 0);
    return out;
}

/// All patterns meeting constraints.min_support, found by enumerating every
/// candidate and testing containment sequence by sequence. With no
/// max_length the longest sequence's item count bounds the enumeration.
inline std::vector<SupportedPattern> brute_sequences(const SequenceDatabase& db, const Constraints& c) {
    if (db.empty()) throw Error(Errc::EmptyDatabase, "sequence database is empty");
    c.validate();

    std::set<ItemId> distinct;
    std::size_t longest = 0;
    for (const auto& s : db.sequences()) {
        longest = std::max(longest, s.item_count());
        for (const auto& t : s.transactions()) distinct.insert(t.items.begin(), t.items.end());
    }
    const std::size_t max_len = c.max_length.value_or(longest);
    if (distinct.size() > max_sequence_alphabet || max_len > max_sequence_length)
        throw Error(Errc::InstanceTooLarge, "brute_sequences handles at most 6 items and patterns of 4 items");
    const std::vector<ItemId> alphabet(distinct.begin(), distinct.end());

    const Count min_count = c.min_count(db.size());
    std::vector<SupportedPattern> out;
    for (auto& p : enumerate_patterns(alphabet, max_len)) {
        Count count = 0;
        for (const auto& s : db.sequences()) count += contains(p, s, c) ? 1 : 0;
        if (count >= min_count)
            out.push_back({std::move(p), count, static_cast<double>(count) / static_cast<double>(db.size())});
    }
    sort_patterns(out);
    return out;
}

/// The whole stream mined offline as one static database.
inline std::vector<SupportedPattern> brute_stream(std::span<const DataSequence> stream, double sigma,
                                                  std::size_t max_length) {
    if (stream.empty()) return {};
    Constraints c;
    c.min_support = sigma;
    c.max_length = max_length;
    // seq_ids in a stream may repeat; the oracle only needs positions
    std::vector<DataSequence> renamed;
    renamed.reserve(stream.size());
    for (std::size_t i = 0; i < stream.size(); ++i)
        renamed.emplace_back(std::to_string(i), std::vector<Transaction>(stream[i].transactions().begin(),
                                                                        stream[i].transactions().end()));
    return brute_sequences(SequenceDatabase(std::move(renamed), Alphabet{}), c);
}

/// Patterns with no strictly larger pattern of equal count in `patterns`.
inline std::vector<SupportedPattern> brute_closed(std::span<const SupportedPattern> patterns) {
    std::vector<SupportedPattern> out;
    for (const auto& p : patterns) {
        bool closed = true;
        for (const auto& q : patterns)
            if (q.count == p.count && !(q.pattern == p.pattern) && is_subpattern(p.pattern, q.pattern)) {
                closed = false;
                break;
            }
        if (closed) out.push_back(p);
    }
    sort_patterns(out);
    return out;
}

} // namespace seqmine::oracle
