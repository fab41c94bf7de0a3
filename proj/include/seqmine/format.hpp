#pragma once

// Pattern text format, one pattern per line:
//   <{a b},{c}> count=3 support=0.7500
// Tokens inside an element are sorted, support has four decimals (half-up),
// and lines are ordered by item count, then lexicographically by tokens.

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "core.hpp"
#include "itemset_miner.hpp"

namespace seqmine {

/// count / n rounded half-up to four decimals, computed in integers.
inline std::string format_fraction(Count count, Count n) {
    if (n == 0) return "0.0000";
    const Count scaled = (count * 20000 + n) / (2 * n);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%llu.%04llu", static_cast<unsigned long long>(scaled / 10000),
                  static_cast<unsigned long long>(scaled % 10000));
    return buf;
}

using TokenPattern = std::vector<std::vector<std::string>>;

inline TokenPattern to_tokens(const Pattern& p, const Alphabet& alphabet) {
    TokenPattern out;
    for (const auto& e : p.elements()) {
        std::vector<std::string> toks;
        for (ItemId i : e) toks.push_back(alphabet.token(i));
        std::sort(toks.begin(), toks.end());
        out.push_back(std::move(toks));
    }
    return out;
}

inline std::string format_element(const std::vector<std::string>& tokens) {
    std::string s = "{";
    for (std::size_t i = 0; i < tokens.size(); ++i) s += (i ? " " : "") + tokens[i];
    return s + "}";
}

inline std::string format_pattern(const TokenPattern& p) {
    std::string s = "<";
    for (std::size_t i = 0; i < p.size(); ++i) s += (i ? "," : "") + format_element(p[i]);
    return s + ">";
}

inline std::string format_pattern(const Pattern& p, const Alphabet& alphabet) {
    return format_pattern(to_tokens(p, alphabet));
}

namespace detail {

inline std::size_t token_count(const TokenPattern& p) {
    std::size_t n = 0;
    for (const auto& e : p) n += e.size();
    return n;
}

struct Line {
    TokenPattern key;
    std::string text;
};

inline void emit_sorted(std::ostream& out, std::vector<Line>& lines) {
    std::sort(lines.begin(), lines.end(), [](const Line& a, const Line& b) {
        const auto na = token_count(a.key), nb = token_count(b.key);
        if (na != nb) return na < nb;
        return a.key < b.key;
    });
    for (const auto& l : lines) out << l.text << '\n';
}

} // namespace detail

inline void write_patterns(std::ostream& out, std::span<const SupportedPattern> patterns, const Alphabet& alphabet,
                           Count n) {
    std::vector<detail::Line> lines;
    lines.reserve(patterns.size());
    for (const auto& sp : patterns) {
        auto key = to_tokens(sp.pattern, alphabet);
        auto text = format_pattern(key) + " count=" + std::to_string(sp.count) +
                    " support=" + format_fraction(sp.count, n);
        lines.push_back({std::move(key), std::move(text)});
    }
    detail::emit_sorted(out, lines);
}

/// Frequent itemsets as single-element patterns.
inline void write_itemsets(std::ostream& out, std::span<const FrequentItemset> itemsets, const Alphabet& alphabet,
                           Count n) {
    std::vector<SupportedPattern> as_patterns;
    as_patterns.reserve(itemsets.size());
    for (const auto& f : itemsets) as_patterns.push_back({Pattern{f.itemset}, f.count, f.support});
    write_patterns(out, as_patterns, alphabet, n);
}

/// `{a} => {b} support=0.5000 confidence=0.6667`, in rule order.
inline void write_rules(std::ostream& out, std::span<const AssociationRule> rules, const Alphabet& alphabet, Count n) {
    for (const auto& r : rules) {
        auto lhs = to_tokens(Pattern{r.antecedent}, alphabet);
        auto rhs = to_tokens(Pattern{r.consequent}, alphabet);
        out << format_element(lhs[0]) << " => " << format_element(rhs[0])
            << " support=" << format_fraction(r.joint_count, n)
            << " confidence=" << format_fraction(r.joint_count, r.antecedent_count) << '\n';
    }
}

} // namespace seqmine
