#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "error.hpp"

namespace seqmine {

using ItemId = std::uint32_t;
using Time = std::int64_t;
using Count = std::uint64_t;

// ---------------------------------------------------------------------------
// Thresholds
// ---------------------------------------------------------------------------

/// A fraction quantized to parts-per-million so that threshold arithmetic
/// (ceil/floor of fraction * N) is exact integer math.
class Fraction {
  public:
    static constexpr std::int64_t scale = 1'000'000;

    constexpr Fraction() = default;
    constexpr explicit Fraction(std::int64_t ppm) : ppm_(ppm) {}

    static Fraction from_double(double v) {
        return Fraction(static_cast<std::int64_t>(std::llround(v * static_cast<double>(scale))));
    }

    constexpr std::int64_t ppm() const noexcept { return ppm_; }
    constexpr double value() const noexcept { return static_cast<double>(ppm_) / scale; }

    /// ceil(f * n), f assumed non-negative
    constexpr Count ceil_of(Count n) const noexcept {
        auto p = static_cast<Count>(ppm_);
        return (p * n + static_cast<Count>(scale) - 1) / static_cast<Count>(scale);
    }
    /// floor(f * n), f assumed non-negative
    constexpr Count floor_of(Count n) const noexcept {
        return static_cast<Count>(ppm_) * n / static_cast<Count>(scale);
    }

    constexpr auto operator<=>(const Fraction&) const = default;
    constexpr Fraction operator-(Fraction o) const noexcept { return Fraction(ppm_ - o.ppm_); }

  private:
    std::int64_t ppm_ = 0;
};

// ---------------------------------------------------------------------------
// Symbol table
// ---------------------------------------------------------------------------

class Alphabet {
  public:
    ItemId intern(std::string_view token) {
        auto key = std::string(token);
        if (auto it = ids_.find(key); it != ids_.end()) return it->second;
        auto id = static_cast<ItemId>(tokens_.size());
        tokens_.push_back(key);
        ids_.emplace(std::move(key), id);
        return id;
    }

    std::optional<ItemId> find(std::string_view token) const {
        auto it = ids_.find(std::string(token));
        if (it == ids_.end()) return std::nullopt;
        return it->second;
    }

    const std::string& token(ItemId id) const { return tokens_.at(id); }
    std::size_t size() const noexcept { return tokens_.size(); }
    const std::vector<std::string>& tokens() const noexcept { return tokens_; }

    /// Returns the old-id -> new-id map that makes id order equal token order.
    std::vector<ItemId> sort_tokens() {
        std::vector<ItemId> order(tokens_.size());
        for (ItemId i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](ItemId a, ItemId b) { return tokens_[a] < tokens_[b]; });
        std::vector<ItemId> remap(tokens_.size());
        std::vector<std::string> sorted;
        sorted.reserve(tokens_.size());
        for (ItemId rank = 0; rank < order.size(); ++rank) {
            remap[order[rank]] = rank;
            sorted.push_back(tokens_[order[rank]]);
        }
        tokens_ = std::move(sorted);
        ids_.clear();
        for (ItemId i = 0; i < tokens_.size(); ++i) ids_.emplace(tokens_[i], i);
        return remap;
    }

  private:
    std::vector<std::string> tokens_;
    std::unordered_map<std::string, ItemId> ids_;
};

// ---------------------------------------------------------------------------
// Itemsets and patterns
// ---------------------------------------------------------------------------

/// Non-empty, strictly ascending set of item ids.
class Itemset {
  public:
    explicit Itemset(std::vector<ItemId> items) : items_(std::move(items)) {
        std::sort(items_.begin(), items_.end());
        items_.erase(std::unique(items_.begin(), items_.end()), items_.end());
        if (items_.empty()) throw Error(Errc::EmptyElement, "itemset must be non-empty");
    }
    Itemset(std::initializer_list<ItemId> items) : Itemset(std::vector<ItemId>(items)) {}

    std::span<const ItemId> items() const noexcept { return items_; }
    std::size_t size() const noexcept { return items_.size(); }
    ItemId front() const noexcept { return items_.front(); }
    ItemId back() const noexcept { return items_.back(); }
    auto begin() const noexcept { return items_.begin(); }
    auto end() const noexcept { return items_.end(); }

    bool contains(ItemId item) const noexcept {
        return std::binary_search(items_.begin(), items_.end(), item);
    }
    bool is_subset_of(const Itemset& other) const noexcept {
        return std::includes(other.items_.begin(), other.items_.end(), items_.begin(), items_.end());
    }

    /// Copy with `item` added; `item` must be greater than back().
    Itemset with_appended(ItemId item) const {
        Itemset out = *this;
        out.items_.push_back(item);
        return out;
    }
    /// Copy without the item at `pos`; empty results are returned as nullopt.
    std::optional<Itemset> without(std::size_t pos) const {
        if (items_.size() == 1) return std::nullopt;
        Itemset out = *this;
        out.items_.erase(out.items_.begin() + static_cast<std::ptrdiff_t>(pos));
        return out;
    }

    auto operator<=>(const Itemset&) const = default;
    bool operator==(const Itemset&) const = default;

  private:
    std::vector<ItemId> items_;
};

struct ItemsetHash {
    std::size_t operator()(const Itemset& s) const noexcept {
        std::uint64_t h = 1469598103934665603ULL;
        for (ItemId i : s) {
            h ^= i;
            h *= 1099511628211ULL;
        }
        return static_cast<std::size_t>(h);
    }
};

/// A sequential pattern: non-empty ordered list of itemsets.
class Pattern {
  public:
    explicit Pattern(std::vector<Itemset> elements) : elements_(std::move(elements)) {
        if (elements_.empty()) throw Error(Errc::EmptyPattern, "pattern must have at least one element");
        for (const auto& e : elements_) size_ += e.size();
    }
    Pattern(std::initializer_list<Itemset> elements) : Pattern(std::vector<Itemset>(elements)) {}

    std::span<const Itemset> elements() const noexcept { return elements_; }
    std::size_t element_count() const noexcept { return elements_.size(); }
    /// Total number of items over all elements.
    std::size_t size() const noexcept { return size_; }
    const Itemset& operator[](std::size_t i) const noexcept { return elements_[i]; }
    const Itemset& last() const noexcept { return elements_.back(); }
    ItemId last_item() const noexcept { return elements_.back().back(); }

    /// Sequence extension: append {item} as a new element.
    Pattern with_new_element(ItemId item) const {
        Pattern out = *this;
        out.elements_.push_back(Itemset{item});
        ++out.size_;
        return out;
    }
    /// Itemset extension: add `item` (> last_item()) into the last element.
    Pattern with_item_in_last(ItemId item) const {
        Pattern out = *this;
        out.elements_.back() = out.elements_.back().with_appended(item);
        ++out.size_;
        return out;
    }

    /// Drops the item at (element, pos); an emptied element disappears.
    /// Returns nullopt when the result would be the empty pattern.
    std::optional<Pattern> without_item(std::size_t element, std::size_t pos) const {
        if (size_ == 1) return std::nullopt;
        std::vector<Itemset> els;
        els.reserve(elements_.size());
        for (std::size_t e = 0; e < elements_.size(); ++e) {
            if (e != element) {
                els.push_back(elements_[e]);
            } else if (auto reduced = elements_[e].without(pos)) {
                els.push_back(std::move(*reduced));
            }
        }
        return Pattern(std::move(els));
    }
    std::optional<Pattern> without_first_item() const { return without_item(0, 0); }
    std::optional<Pattern> without_last_item() const {
        return without_item(elements_.size() - 1, elements_.back().size() - 1);
    }

    auto operator<=>(const Pattern& o) const { return elements_ <=> o.elements_; }
    bool operator==(const Pattern& o) const { return elements_ == o.elements_; }

  private:
    std::vector<Itemset> elements_;
    std::size_t size_ = 0;
};

struct PatternHash {
    std::size_t operator()(const Pattern& p) const noexcept {
        std::uint64_t h = 1469598103934665603ULL;
        for (const auto& e : p.elements()) {
            for (ItemId i : e) {
                h ^= i + 1;
                h *= 1099511628211ULL;
            }
            h ^= 0x9e3779b97f4a7c15ULL;
            h *= 1099511628211ULL;
        }
        return static_cast<std::size_t>(h);
    }
};

/// Result ordering: total item count first, then lexicographic by element.
struct BySizeThenLex {
    bool operator()(const Pattern& a, const Pattern& b) const {
        if (a.size() != b.size()) return a.size() < b.size();
        return a < b;
    }
};

/// Sorts and deduplicates each element list; element order is preserved.
inline Pattern canonicalize(const std::vector<std::vector<ItemId>>& raw) {
    if (raw.empty()) throw Error(Errc::EmptyPattern, "pattern must have at least one element");
    std::vector<Itemset> els;
    els.reserve(raw.size());
    for (const auto& e : raw) els.emplace_back(e);
    return Pattern(std::move(els));
}

/// True when every element of `inner` maps, in order, to a superset element of
/// `outer`. Gap constraints play no part here.
inline bool is_subpattern(const Pattern& inner, const Pattern& outer) noexcept {
    std::size_t j = 0;
    for (const auto& e : inner.elements()) {
        while (j < outer.element_count() && !e.is_subset_of(outer[j])) ++j;
        if (j == outer.element_count()) return false;
        ++j;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Sequences
// ---------------------------------------------------------------------------

struct Transaction {
    Time time;
    Itemset items;
};

/// Time-ordered transactions of one entity; times strictly increase.
class DataSequence {
  public:
    DataSequence(std::string id, std::vector<Transaction> transactions)
        : id_(std::move(id)), transactions_(std::move(transactions)) {
        if (transactions_.empty())
            throw Error(Errc::InvalidSequence, "data-sequence '" + id_ + "' has no transactions");
        for (std::size_t i = 1; i < transactions_.size(); ++i) {
            if (transactions_[i].time <= transactions_[i - 1].time)
                throw Error(Errc::InvalidSequence,
                            "data-sequence '" + id_ + "' times are not strictly increasing");
        }
    }

    /// Sorts by time and unions transactions that share a timestamp.
    static DataSequence merged(std::string id, std::vector<Transaction> transactions) {
        std::stable_sort(transactions.begin(), transactions.end(),
                         [](const Transaction& a, const Transaction& b) { return a.time < b.time; });
        std::vector<Transaction> out;
        out.reserve(transactions.size());
        for (auto& t : transactions) {
            if (!out.empty() && out.back().time == t.time) {
                std::vector<ItemId> u(out.back().items.begin(), out.back().items.end());
                u.insert(u.end(), t.items.begin(), t.items.end());
                out.back().items = Itemset(std::move(u));
            } else {
                out.push_back(std::move(t));
            }
        }
        return DataSequence(std::move(id), std::move(out));
    }

    const std::string& id() const noexcept { return id_; }
    std::span<const Transaction> transactions() const noexcept { return transactions_; }
    std::size_t size() const noexcept { return transactions_.size(); }
    const Transaction& operator[](std::size_t i) const noexcept { return transactions_[i]; }

    std::size_t item_count() const noexcept {
        std::size_t n = 0;
        for (const auto& t : transactions_) n += t.items.size();
        return n;
    }

  private:
    std::string id_;
    std::vector<Transaction> transactions_;
};

class SequenceDatabase {
  public:
    SequenceDatabase() = default;
    SequenceDatabase(std::vector<DataSequence> sequences, Alphabet alphabet)
        : sequences_(std::move(sequences)), alphabet_(std::move(alphabet)) {
        std::vector<std::string_view> ids;
        ids.reserve(sequences_.size());
        for (const auto& s : sequences_) ids.push_back(s.id());
        std::sort(ids.begin(), ids.end());
        if (auto it = std::adjacent_find(ids.begin(), ids.end()); it != ids.end())
            throw Error(Errc::DuplicateId, "duplicate seq_id '" + std::string(*it) + "'");
    }

    std::span<const DataSequence> sequences() const noexcept { return sequences_; }
    std::size_t size() const noexcept { return sequences_.size(); }
    bool empty() const noexcept { return sequences_.empty(); }
    const DataSequence& operator[](std::size_t i) const noexcept { return sequences_[i]; }
    const Alphabet& alphabet() const noexcept { return alphabet_; }

    /// One past the largest item id that occurs in any sequence.
    ItemId item_bound() const noexcept {
        ItemId bound = 0;
        for (const auto& s : sequences_)
            for (const auto& t : s.transactions()) bound = std::max(bound, t.items.back() + 1);
        return bound;
    }

  private:
    std::vector<DataSequence> sequences_;
    Alphabet alphabet_;
};

// ---------------------------------------------------------------------------
// Constraints and containment
// ---------------------------------------------------------------------------

/// Support threshold plus the gap/length bounds that govern containment.
/// Between consecutive matched elements: dt > min_gap, dt <= max_gap, and at
/// most max_index_gap transactions in between.
struct Constraints {
    double min_support = 1.0;
    Time min_gap = 0;
    std::optional<Time> max_gap;
    std::optional<std::size_t> max_index_gap;
    std::optional<std::size_t> max_length;

    void validate() const {
        if (!(min_support > 0.0 && min_support <= 1.0))
            throw Error(Errc::InvalidThreshold, "min_support must be in (0, 1]");
        if (Fraction::from_double(min_support).ppm() <= 0)
            throw Error(Errc::InvalidThreshold, "min_support below the 1e-6 resolution");
        if (min_gap < 0) throw Error(Errc::InvalidConstraints, "min_gap must be >= 0");
        if (max_gap && *max_gap <= min_gap)
            throw Error(Errc::InvalidConstraints, "min_gap must be < max_gap");
        if (max_length && *max_length < 1)
            throw Error(Errc::InvalidConstraints, "max_length must be >= 1");
    }

    /// Absolute threshold: ceil(min_support * n), at least 1.
    Count min_count(std::size_t n) const {
        return std::max<Count>(1, Fraction::from_double(min_support).ceil_of(n));
    }

    /// Whether dropping an interior item can only widen the set of
    /// containing sequences (false under max_gap / max_index_gap).
    bool interior_pruning_safe() const noexcept { return !max_gap && !max_index_gap; }

    bool gap_ok(Time dt, std::size_t skipped) const noexcept {
        if (dt <= min_gap) return false;
        if (max_gap && dt > *max_gap) return false;
        if (max_index_gap && skipped > *max_index_gap) return false;
        return true;
    }

    bool length_ok(std::size_t len) const noexcept { return !max_length || len <= *max_length; }
};

/// Embedding search: track every transaction index at which the current
/// element can end a constraint-respecting embedding of the prefix so far.
inline bool contains(const Pattern& pattern, const DataSequence& seq, const Constraints& c) {
    const std::size_t n = seq.size();
    std::vector<char> reach(n, 0), next(n, 0);
    bool any = false;
    for (std::size_t t = 0; t < n; ++t) {
        reach[t] = pattern[0].is_subset_of(seq[t].items);
        any = any || reach[t];
    }
    for (std::size_t j = 1; j < pattern.element_count() && any; ++j) {
        any = false;
        for (std::size_t t2 = 0; t2 < n; ++t2) {
            next[t2] = 0;
            if (!pattern[j].is_subset_of(seq[t2].items)) continue;
            for (std::size_t t1 = 0; t1 < t2; ++t1) {
                if (reach[t1] && c.gap_ok(seq[t2].time - seq[t1].time, t2 - t1 - 1)) {
                    next[t2] = 1;
                    break;
                }
            }
            any = any || next[t2];
        }
        reach.swap(next);
    }
    return any;
}

struct SupportedPattern {
    Pattern pattern;
    Count count = 0;
    double support = 0.0;

    bool operator==(const SupportedPattern& o) const {
        return pattern == o.pattern && count == o.count;
    }
};

inline SupportedPattern support(const Pattern& pattern, const SequenceDatabase& db, const Constraints& c) {
    if (db.empty()) throw Error(Errc::EmptyDatabase, "sequence database is empty");
    Count count = 0;
    for (const auto& s : db.sequences()) count += contains(pattern, s, c) ? 1 : 0;
    return {pattern, count, static_cast<double>(count) / static_cast<double>(db.size())};
}

struct ItemsetSupport {
    Count count = 0;
    double fraction = 0.0;
};

inline ItemsetSupport itemset_support(const Itemset& itemset, std::span<const Itemset> transactions) {
    if (transactions.empty()) throw Error(Errc::EmptyDatabase, "transaction list is empty");
    Count count = 0;
    for (const auto& t : transactions) count += itemset.is_subset_of(t) ? 1 : 0;
    return {count, static_cast<double>(count) / static_cast<double>(transactions.size())};
}

inline void sort_patterns(std::vector<SupportedPattern>& v) {
    std::sort(v.begin(), v.end(), [](const SupportedPattern& a, const SupportedPattern& b) {
        return BySizeThenLex{}(a.pattern, b.pattern);
    });
}

} // namespace seqmine
