#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "bundled_results.hpp"
#include "core.hpp"

namespace seqmine {

// ---------------------------------------------------------------------------
// Line helpers
// ---------------------------------------------------------------------------

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

inline bool skippable(std::string_view line) {
    line = trim(line);
    return line.empty() || line.front() == '#';
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline std::vector<std::string_view> tokens(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
        std::size_t j = i;
        while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
        if (j > i) out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

template <typename Int>
std::optional<Int> parse_int(std::string_view s) {
    Int v{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
    return v;
}

inline Itemset remap(const Itemset& s, const std::vector<ItemId>& map) {
    std::vector<ItemId> v;
    v.reserve(s.size());
    for (ItemId i : s) v.push_back(map[i]);
    return Itemset(std::move(v));
}

} // namespace detail

// ---------------------------------------------------------------------------
// Exact two-digit decimals
// ---------------------------------------------------------------------------

/// Decimal with exactly two fractional digits, stored as hundredths.
struct Centi {
    std::int64_t value = 0;

    auto operator<=>(const Centi&) const = default;

    static Centi parse(std::string_view s, std::size_t line = 0) {
        s = detail::trim(s);
        const bool negative = !s.empty() && s.front() == '-';
        if (negative) s.remove_prefix(1);
        const auto dot = s.find('.');
        const auto whole = s.substr(0, dot);
        const auto frac = dot == std::string_view::npos ? std::string_view{} : s.substr(dot + 1);
        auto w = detail::parse_int<std::int64_t>(whole);
        const bool frac_ok =
            frac.size() <= 2 && frac.find_first_not_of("0123456789") == std::string_view::npos &&
            (dot == std::string_view::npos || !frac.empty());
        if (!w || !frac_ok || whole.find_first_not_of("0123456789") != std::string_view::npos)
            throw Error(Errc::ParseError, "not a decimal with at most 2 fractional digits: '" + std::string(s) + "'",
                        line);
        std::int64_t f = 0;
        for (std::size_t i = 0; i < 2; ++i) f = f * 10 + (i < frac.size() ? frac[i] - '0' : 0);
        const std::int64_t v = *w * 100 + f;
        return Centi{negative ? -v : v};
    }

    std::string str() const {
        const std::int64_t a = value < 0 ? -value : value;
        std::string frac = std::to_string(a % 100);
        if (frac.size() < 2) frac.insert(0, "0");
        return (value < 0 ? "-" : "") + std::to_string(a / 100) + "." + frac;
    }

    /// Signed form ("+17.30", "-44.71", "0.00").
    std::string signed_str() const { return (value > 0 ? "+" : "") + str(); }

    double to_double() const { return static_cast<double>(value) / 100.0; }
};

// ---------------------------------------------------------------------------
// Sequence CSV:  seq_id,time,items   (items space-separated)
// ---------------------------------------------------------------------------

struct SequenceLine {
    std::string seq_id;
    Time time;
    std::vector<std::string_view> items;
};

inline SequenceLine parse_sequence_line(std::string_view line, std::size_t line_no) {
    const auto fields = detail::split(line, ',');
    if (fields.size() != 3)
        throw Error(Errc::ParseError, "line " + std::to_string(line_no) + ": expected seq_id,time,items", line_no);
    if (fields[0].empty())
        throw Error(Errc::ParseError, "line " + std::to_string(line_no) + ": empty seq_id", line_no);
    auto time = detail::parse_int<Time>(fields[1]);
    if (!time)
        throw Error(Errc::NonIntegerTime,
                    "line " + std::to_string(line_no) + ": time '" + std::string(fields[1]) + "' is not an integer",
                    line_no);
    auto items = detail::tokens(fields[2]);
    if (items.empty())
        throw Error(Errc::ParseError, "line " + std::to_string(line_no) + ": transaction has no items", line_no);
    return {std::string(fields[0]), *time, std::move(items)};
}

/// Whole-file load: lines may arrive in any order; equal-time transactions of
/// a sequence are merged. Item ids follow token order.
inline SequenceDatabase load_sequence_db(std::istream& in) {
    Alphabet alphabet;
    std::vector<std::string> order;
    std::map<std::string, std::vector<Transaction>> grouped;
    std::string line;
    for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
        if (detail::skippable(line)) continue;
        auto parsed = parse_sequence_line(line, line_no);
        std::vector<ItemId> ids;
        for (auto tok : parsed.items) ids.push_back(alphabet.intern(tok));
        auto [it, fresh] = grouped.try_emplace(parsed.seq_id);
        if (fresh) order.push_back(parsed.seq_id);
        it->second.push_back({parsed.time, Itemset(std::move(ids))});
    }
    const auto remap = alphabet.sort_tokens();
    std::vector<DataSequence> seqs;
    seqs.reserve(order.size());
    for (const auto& id : order) {
        auto& txns = grouped[id];
        for (auto& t : txns) t.items = detail::remap(t.items, remap);
        seqs.push_back(DataSequence::merged(id, std::move(txns)));
    }
    return SequenceDatabase(std::move(seqs), std::move(alphabet));
}

inline SequenceDatabase load_sequence_db(std::string_view text) {
    std::istringstream in{std::string(text)};
    return load_sequence_db(in);
}

inline void save_sequence_db(std::ostream& out, const SequenceDatabase& db) {
    for (const auto& s : db.sequences())
        for (const auto& t : s.transactions()) {
            out << s.id() << ',' << t.time << ',';
            bool first = true;
            for (ItemId i : t.items) {
                out << (first ? "" : " ") << db.alphabet().token(i);
                first = false;
            }
            out << '\n';
        }
}

/// Incremental reader for stream mode: consecutive lines sharing a seq_id form
/// one data-sequence, which is emitted once a different seq_id (or the end of
/// input) is seen. Items are interned into a caller-owned alphabet.
class SequenceCsvReader {
  public:
    using LineSource = std::function<std::optional<std::string>()>;

    SequenceCsvReader(LineSource source, Alphabet& alphabet) : source_(std::move(source)), alphabet_(alphabet) {}

    static LineSource from_stream(std::istream& in) {
        return [&in]() -> std::optional<std::string> {
            std::string line;
            if (std::getline(in, line)) return line;
            return std::nullopt;
        };
    }

    std::optional<DataSequence> next() {
        while (!done_) {
            auto line = source_();
            ++line_no_;
            if (!line) {
                done_ = true;
                break;
            }
            if (detail::skippable(*line)) continue;
            auto parsed = parse_sequence_line(*line, line_no_);
            std::vector<ItemId> ids;
            for (auto tok : parsed.items) ids.push_back(alphabet_.intern(tok));
            Transaction txn{parsed.time, Itemset(std::move(ids))};
            if (current_id_ && *current_id_ != parsed.seq_id) {
                auto seq = DataSequence::merged(std::move(*current_id_), std::move(current_));
                current_id_ = parsed.seq_id;
                current_ = {std::move(txn)};
                return seq;
            }
            current_id_ = parsed.seq_id;
            current_.push_back(std::move(txn));
        }
        if (current_id_) {
            auto seq = DataSequence::merged(std::move(*current_id_), std::move(current_));
            current_id_.reset();
            current_.clear();
            return seq;
        }
        return std::nullopt;
    }

  private:
    LineSource source_;
    Alphabet& alphabet_;
    std::optional<std::string> current_id_;
    std::vector<Transaction> current_;
    std::size_t line_no_ = 0;
    bool done_ = false;
};

// ---------------------------------------------------------------------------
// Transactions CSV:  txn_id,items
// ---------------------------------------------------------------------------

struct TransactionDatabase {
    std::vector<std::string> ids;
    std::vector<Itemset> transactions;
    Alphabet alphabet;
};

inline TransactionDatabase load_transactions(std::istream& in) {
    TransactionDatabase db;
    std::set<std::string> seen;
    std::string line;
    for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
        if (detail::skippable(line)) continue;
        const auto fields = detail::split(line, ',');
        if (fields.size() != 2 || fields[0].empty())
            throw Error(Errc::ParseError, "line " + std::to_string(line_no) + ": expected txn_id,items", line_no);
        if (!seen.insert(std::string(fields[0])).second)
            throw Error(Errc::ParseError,
                        "line " + std::to_string(line_no) + ": duplicate txn_id '" + std::string(fields[0]) + "'",
                        line_no);
        auto toks = detail::tokens(fields[1]);
        if (toks.empty())
            throw Error(Errc::ParseError, "line " + std::to_string(line_no) + ": transaction has no items", line_no);
        std::vector<ItemId> ids;
        for (auto t : toks) ids.push_back(db.alphabet.intern(t));
        db.ids.emplace_back(fields[0]);
        db.transactions.emplace_back(std::move(ids));
    }
    const auto remap = db.alphabet.sort_tokens();
    for (auto& t : db.transactions) t = detail::remap(t, remap);
    return db;
}

// ---------------------------------------------------------------------------
// University results
// ---------------------------------------------------------------------------

struct ResultRecord {
    int year = 0;
    std::string subject_code;
    Centi pass_pct;

    bool operator==(const ResultRecord&) const = default;
};

/// Header `year,subject_code,pass_pct`; `#` lines are comments.
inline std::vector<ResultRecord> load_results(std::istream& in) {
    std::vector<ResultRecord> out;
    std::set<std::pair<int, std::string>> keys;
    std::string line;
    bool header = false;
    for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
        if (detail::skippable(line)) continue;
        const auto fields = detail::split(line, ',');
        if (!header) {
            if (fields.size() != 3 || fields[0] != "year" || fields[1] != "subject_code" || fields[2] != "pass_pct")
                throw Error(Errc::ParseError, "expected header year,subject_code,pass_pct", line_no);
            header = true;
            continue;
        }
        if (fields.size() != 3 || fields[1].empty())
            throw Error(Errc::ParseError, "line " + std::to_string(line_no) + ": expected year,subject_code,pass_pct",
                        line_no);
        auto year = detail::parse_int<int>(fields[0]);
        if (!year)
            throw Error(Errc::ParseError, "line " + std::to_string(line_no) + ": bad year", line_no);
        const Centi pct = Centi::parse(fields[2], line_no);
        if (pct.value < 0 || pct.value > 10000)
            throw Error(Errc::OutOfRange,
                        "line " + std::to_string(line_no) + ": pass_pct " + pct.str() + " outside [0, 100]", line_no);
        if (!keys.emplace(*year, std::string(fields[1])).second)
            throw Error(Errc::DuplicateKey,
                        "line " + std::to_string(line_no) + ": duplicate (" + std::to_string(*year) + ", " +
                            std::string(fields[1]) + ")",
                        line_no);
        out.push_back({*year, std::string(fields[1]), pct});
    }
    return out;
}

inline std::vector<ResultRecord> load_bundled_results() {
    std::istringstream in{std::string(bundled_results_csv)};
    return load_results(in);
}

/// Half-open bins [prev, upper) with the final bin closed at 100.
class BandScheme {
  public:
    struct Band {
        Centi upper;
        std::string label;
    };

    explicit BandScheme(std::vector<Band> bands) : bands_(std::move(bands)) {
        if (bands_.empty()) throw Error(Errc::InvalidBands, "band scheme is empty");
        for (std::size_t i = 0; i < bands_.size(); ++i) {
            if (bands_[i].label.empty()) throw Error(Errc::InvalidBands, "band label is empty");
            if (bands_[i].upper.value <= 0 || bands_[i].upper.value > 10000)
                throw Error(Errc::InvalidBands, "band bound outside (0, 100]");
            if (i > 0 && bands_[i].upper <= bands_[i - 1].upper)
                throw Error(Errc::InvalidBands, "band bounds must be strictly increasing");
        }
        if (bands_.back().upper.value != 10000) throw Error(Errc::InvalidBands, "final band bound must be 100");
    }

    /// "50:F,70:C,85:B,100:A"
    static BandScheme parse(std::string_view spec) {
        std::vector<Band> bands;
        for (auto part : detail::split(spec, ',')) {
            const auto kv = detail::split(part, ':');
            if (kv.size() != 2) throw Error(Errc::InvalidBands, "band must look like <bound>:<label>");
            try {
                bands.push_back({Centi::parse(kv[0]), std::string(kv[1])});
            } catch (const Error&) {
                throw Error(Errc::InvalidBands, "band bound '" + std::string(kv[0]) + "' is not a decimal");
            }
        }
        return BandScheme(std::move(bands));
    }

    static BandScheme default_scheme() { return parse("50:F,70:C,85:B,100:A"); }

    const std::string& label_for(Centi pct) const {
        for (const auto& b : bands_)
            if (pct < b.upper) return b.label;
        return bands_.back().label;
    }

    const std::vector<Band>& bands() const noexcept { return bands_; }

  private:
    std::vector<Band> bands_;
};

/// One data-sequence per subject, one transaction per year holding the
/// single item "<subject>:<band>".
inline SequenceDatabase discretize(const std::vector<ResultRecord>& records, const BandScheme& scheme) {
    std::map<std::string, std::vector<const ResultRecord*>> by_subject;
    for (const auto& r : records) by_subject[r.subject_code].push_back(&r);

    Alphabet alphabet;
    std::vector<std::pair<std::string, std::vector<std::pair<Time, std::string>>>> raw;
    for (auto& [subject, rows] : by_subject) {
        std::vector<std::pair<Time, std::string>> txns;
        for (const auto* r : rows) {
            auto token = subject + ":" + scheme.label_for(r->pass_pct);
            alphabet.intern(token);
            txns.emplace_back(r->year, std::move(token));
        }
        raw.emplace_back(subject, std::move(txns));
    }
    alphabet.sort_tokens();
    std::vector<DataSequence> seqs;
    for (auto& [subject, txns] : raw) {
        std::vector<Transaction> t;
        for (auto& [year, token] : txns) t.push_back({year, Itemset{*alphabet.find(token)}});
        seqs.push_back(DataSequence::merged(subject, std::move(t)));
    }
    return SequenceDatabase(std::move(seqs), std::move(alphabet));
}

enum class Direction { up, down, flat };

constexpr std::string_view to_string(Direction d) noexcept {
    switch (d) {
    case Direction::up: return "up";
    case Direction::down: return "down";
    case Direction::flat: return "flat";
    }
    return "?";
}

struct TrendPoint {
    int year = 0;
    Centi pass_pct;
    std::optional<Centi> delta; // absent for the first year
    std::optional<Direction> direction;
};

struct SubjectTrend {
    std::string subject_code;
    std::vector<TrendPoint> points;
};

struct Anomaly {
    std::string subject_code;
    int year = 0;
    Centi delta;
};

struct TrendSummary {
    std::vector<SubjectTrend> subjects; // subject order
    std::vector<Anomaly> anomalies;     // |delta| > threshold
};

inline TrendSummary trend(const std::vector<ResultRecord>& records, Centi anomaly_threshold = Centi{2000}) {
    std::map<std::string, std::vector<const ResultRecord*>> by_subject;
    for (const auto& r : records) by_subject[r.subject_code].push_back(&r);

    TrendSummary out;
    for (auto& [subject, rows] : by_subject) {
        if (rows.size() < 2)
            throw Error(Errc::InsufficientHistory, "subject " + subject + " needs at least two years");
        std::sort(rows.begin(), rows.end(), [](auto* a, auto* b) { return a->year < b->year; });
        SubjectTrend st{subject, {}};
        for (std::size_t i = 0; i < rows.size(); ++i) {
            TrendPoint p{rows[i]->year, rows[i]->pass_pct, std::nullopt, std::nullopt};
            if (i > 0) {
                const Centi d{rows[i]->pass_pct.value - rows[i - 1]->pass_pct.value};
                p.delta = d;
                p.direction = d.value > 0 ? Direction::up : d.value < 0 ? Direction::down : Direction::flat;
                if ((d.value < 0 ? -d.value : d.value) > anomaly_threshold.value)
                    out.anomalies.push_back({subject, rows[i]->year, d});
            }
            st.points.push_back(p);
        }
        out.subjects.push_back(std::move(st));
    }
    return out;
}

} // namespace seqmine
