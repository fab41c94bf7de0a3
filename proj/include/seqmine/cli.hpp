#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "dataset.hpp"
#include "format.hpp"
#include "itemset_miner.hpp"
#include "parallel.hpp"
#include "plot.hpp"
#include "sequence_miner.hpp"
#include "stream_miner.hpp"
#include "synthetic.hpp"

namespace seqmine::cli {

enum ExitCode : int { ok = 0, input_error = 2, usage_error = 3, internal_error = 4 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

/// Writes to --out when given, otherwise to the command's stdout.
class Sink {
  public:
    Sink(const std::string& path, std::ostream& fallback) : out_(&fallback) {
        if (!path.empty()) {
            file_.open(path, std::ios::binary | std::ios::trunc);
            if (!file_) throw UsageError("cannot open --out file '" + path + "'");
            out_ = &file_;
        }
    }
    std::ostream& stream() { return *out_; }

  private:
    std::ofstream file_;
    std::ostream* out_;
};

inline std::ifstream open_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::ParseError, "cannot open input '" + path + "'");
    return in;
}

inline void check_fraction(double v, const char* flag) {
    if (!(v > 0.0 && v <= 1.0)) throw UsageError(std::string(flag) + " must be in (0, 1]");
}

inline std::size_t approx_bytes(const std::vector<SupportedPattern>& v) {
    std::size_t b = v.capacity() * sizeof(SupportedPattern);
    for (const auto& sp : v)
        for (const auto& e : sp.pattern.elements()) b += sizeof(Itemset) + e.size() * sizeof(ItemId);
    return b;
}

} // namespace detail

// ---------------------------------------------------------------------------
// mine-itemsets
// ---------------------------------------------------------------------------

struct ItemsetArgs {
    std::string input;
    double min_support = 0;
    std::optional<double> min_confidence;
    std::string out;
};

inline int cmd_mine_itemsets(const ItemsetArgs& a, std::ostream& out) {
    detail::check_fraction(a.min_support, "--min-support");
    if (a.min_confidence) detail::check_fraction(*a.min_confidence, "--min-confidence");
    auto in = detail::open_input(a.input);
    auto db = load_transactions(in);
    const auto frequent = mine_frequent_itemsets(db.transactions, a.min_support);
    detail::Sink sink(a.out, out);
    write_itemsets(sink.stream(), frequent, db.alphabet, db.transactions.size());
    if (a.min_confidence)
        write_rules(sink.stream(), generate_rules(frequent, *a.min_confidence), db.alphabet,
                    db.transactions.size());
    return ok;
}

// ---------------------------------------------------------------------------
// mine-seq
// ---------------------------------------------------------------------------

inline constexpr std::size_t unbounded_alphabet_limit = 26;

struct SequenceArgs {
    std::string input;
    double min_support = 0;
    Time min_gap = 0;
    std::optional<Time> max_gap;
    std::optional<std::size_t> max_index_gap;
    std::optional<std::size_t> max_length;
    std::string algo = "prefixspan";
    bool closed = false;
    std::string out;
};

inline int cmd_mine_seq(const SequenceArgs& a, std::ostream& out) {
    detail::check_fraction(a.min_support, "--min-support");
    if (a.algo != "gsp" && a.algo != "prefixspan") throw UsageError("--algo must be gsp or prefixspan");
    Constraints c;
    c.min_support = a.min_support;
    c.min_gap = a.min_gap;
    c.max_gap = a.max_gap;
    c.max_index_gap = a.max_index_gap;
    c.max_length = a.max_length;
    try {
        c.validate();
    } catch (const Error& e) {
        throw UsageError(std::string("invalid constraints: ") + e.what());
    }
    auto in = detail::open_input(a.input);
    const auto db = load_sequence_db(in);
    if (!a.max_length && db.alphabet().size() > unbounded_alphabet_limit)
        throw UsageError("--max-length is required when the alphabet has more than 26 items");
    auto result = a.algo == "gsp" ? gsp_mine(db, c) : prefixspan_mine(db, c);
    if (a.closed) result = filter_closed(result);
    detail::Sink sink(a.out, out);
    write_patterns(sink.stream(), result.patterns, db.alphabet(), db.size());
    return ok;
}

// ---------------------------------------------------------------------------
// mine-stream
// ---------------------------------------------------------------------------

struct StreamArgs {
    std::string input;
    double sigma = 0;
    double epsilon = 0;
    std::size_t batch_size = 100;
    std::size_t max_length = 5;
    std::size_t report_every = 1;
    std::string out;
    bool watch = false;
    std::size_t poll_ms = 200;
    double idle_timeout = 0;
};

namespace detail {

/// Line source over a file that may still be growing. Without `watch` it
/// stops at the first end-of-file; with it, it polls until no new complete
/// line has arrived for `idle_timeout` seconds (0 = never stop).
class TailSource {
  public:
    TailSource(std::istream& in, bool watch, std::size_t poll_ms, double idle_timeout)
        : in_(in), watch_(watch), poll_(poll_ms), idle_timeout_(idle_timeout) {}

    std::optional<std::string> operator()() {
        auto idle_since = std::chrono::steady_clock::now();
        while (true) {
            std::string chunk;
            if (std::getline(in_, chunk)) {
                if (!in_.eof()) {
                    std::string line = partial_ + chunk;
                    partial_.clear();
                    return line;
                }
                partial_ += chunk; // no newline yet
            }
            if (!watch_) {
                if (partial_.empty()) return std::nullopt;
                std::string line;
                line.swap(partial_);
                return line;
            }
            in_.clear();
            const std::chrono::duration<double> idle = std::chrono::steady_clock::now() - idle_since;
            if (idle_timeout_ > 0 && idle.count() >= idle_timeout_) {
                if (partial_.empty()) return std::nullopt;
                std::string line;
                line.swap(partial_);
                return line;
            }
            std::this_thread::sleep_for(std::chrono::milliseconds(poll_));
        }
    }

  private:
    std::istream& in_;
    bool watch_;
    std::chrono::milliseconds poll_;
    double idle_timeout_;
    std::string partial_;
};

inline void write_report(std::ostream& out, const StreamMiner& miner, const Alphabet& alphabet,
                         const std::vector<SupportedPattern>& patterns) {
    const auto& st = miner.state();
    out << "# report batches=" << st.batches_seen << " N=" << st.sequences_seen
        << " tree_size=" << st.tree.size() << " patterns=" << patterns.size() << '\n';
    write_patterns(out, patterns, alphabet, st.sequences_seen);
    out.flush();
}

} // namespace detail

inline int cmd_mine_stream(const StreamArgs& a, std::ostream& out) {
    StreamConfig cfg{a.sigma, a.epsilon, a.batch_size, a.max_length};
    detail::check_fraction(a.sigma, "--sigma");
    if (!(a.epsilon > 0.0 && a.epsilon < a.sigma)) throw UsageError("--epsilon must be in (0, --sigma)");
    if (a.batch_size < 1) throw UsageError("--batch-size must be >= 1");
    if (a.max_length < 1) throw UsageError("--max-length must be >= 1");
    if (a.report_every < 1) throw UsageError("--report-every must be >= 1");
    try {
        cfg.validate();
    } catch (const Error& e) {
        throw UsageError(e.what());
    }

    auto in = detail::open_input(a.input);
    detail::Sink sink(a.out, out);
    Alphabet alphabet;
    SequenceCsvReader reader(detail::TailSource(in, a.watch, a.poll_ms, a.idle_timeout), alphabet);
    StreamMiner miner(cfg);

    std::size_t last_reported = static_cast<std::size_t>(-1);
    auto final_patterns = miner.run(reader, [&](const StreamMiner& m) {
        if (m.state().batches_seen % a.report_every != 0) return;
        detail::write_report(sink.stream(), m, alphabet, m.query());
        last_reported = m.state().batches_seen;
    });
    if (last_reported != miner.state().batches_seen)
        detail::write_report(sink.stream(), miner, alphabet, final_patterns);
    return ok;
}

// ---------------------------------------------------------------------------
// analyze-results
// ---------------------------------------------------------------------------

struct AnalyzeArgs {
    std::string input;
    std::string bands = "50:F,70:C,85:B,100:A";
    std::string anomaly_threshold = "20";
    std::string plot_dir = "plots";
};

inline int cmd_analyze_results(const AnalyzeArgs& a, std::ostream& out) {
    std::optional<BandScheme> scheme;
    try {
        scheme = BandScheme::parse(a.bands);
    } catch (const Error& e) {
        throw UsageError(std::string("--bands: ") + e.what());
    }
    Centi threshold;
    try {
        threshold = Centi::parse(a.anomaly_threshold);
    } catch (const Error&) {
        throw UsageError("--anomaly-threshold must be a decimal with at most 2 fractional digits");
    }
    if (threshold.value < 0) throw UsageError("--anomaly-threshold must be >= 0");

    std::vector<ResultRecord> records;
    if (a.input.empty()) {
        records = load_bundled_results();
    } else {
        auto in = detail::open_input(a.input);
        records = load_results(in);
    }
    const auto summary = trend(records, threshold);
    const auto db = discretize(records, *scheme);

    out << "# trend (anomaly threshold " << threshold.str() << ")\n";
    for (const auto& s : summary.subjects) {
        out << s.subject_code << '\n';
        for (std::size_t i = 0; i < s.points.size(); ++i) {
            const auto& p = s.points[i];
            out << "  " << p.year << "  " << std::setw(6) << p.pass_pct.str() << "  band="
                << scheme->label_for(p.pass_pct);
            if (p.delta) out << "  delta=" << p.delta->signed_str() << "  " << to_string(*p.direction);
            out << '\n';
        }
    }
    out << "# anomalies\n";
    for (const auto& an : summary.anomalies)
        out << "  " << an.subject_code << ' ' << an.year << ' ' << an.delta.signed_str() << '\n';
    out << "# band sequences\n";
    for (const auto& s : db.sequences()) {
        out << "  " << s.id() << ':';
        for (const auto& t : s.transactions()) out << ' ' << t.time << '=' << db.alphabet().token(t.items.front());
        out << '\n';
    }
    out << "# charts\n";
    for (const auto& s : summary.subjects) out << plot::ascii_chart(s);

    if (!a.plot_dir.empty()) {
        std::filesystem::create_directories(a.plot_dir);
        for (const auto& s : summary.subjects) {
            const auto path = std::filesystem::path(a.plot_dir) / (s.subject_code + ".svg");
            std::ofstream f(path, std::ios::binary | std::ios::trunc);
            if (!f) throw UsageError("cannot write plot '" + path.string() + "'");
            f << plot::svg_chart(s);
        }
    }
    return ok;
}

// ---------------------------------------------------------------------------
// bench
// ---------------------------------------------------------------------------

struct BenchArgs {
    std::vector<std::size_t> sizes{100, 200, 400};
    std::vector<std::string> algos{"gsp", "prefixspan", "stream"};
    std::uint64_t seed = 42;
    double min_support = 0.05;
    std::size_t max_length = 4;
    std::size_t batch_size = 100;
    std::string out;
};

struct BenchRow {
    std::string algo;
    std::size_t sequences = 0;
    double avg_transactions = 0;
    std::string constraints;
    std::size_t patterns_emitted = 0;
    std::chrono::microseconds elapsed{0};
    std::size_t store_bytes = 0;
};

inline BenchRow bench_one(const std::string& algo, const SequenceDatabase& db, const BenchArgs& a) {
    BenchRow row;
    row.algo = algo;
    row.sequences = db.size();
    std::size_t txns = 0;
    for (const auto& s : db.sequences()) txns += s.size();
    row.avg_transactions = db.empty() ? 0 : static_cast<double>(txns) / static_cast<double>(db.size());
    std::ostringstream cons;
    cons << "min_support=" << a.min_support << ",max_length=" << a.max_length;

    const auto start = std::chrono::steady_clock::now();
    if (algo == "gsp" || algo == "prefixspan") {
        Constraints c;
        c.min_support = a.min_support;
        c.max_length = a.max_length;
        auto r = algo == "gsp" ? gsp_mine(db, c) : prefixspan_mine(db, c);
        row.patterns_emitted = r.patterns.size();
        row.store_bytes = detail::approx_bytes(r.patterns);
    } else if (algo == "apriori") {
        // each sequence flattened to the set of items it mentions
        std::vector<Itemset> txns;
        for (const auto& s : db.sequences()) {
            std::vector<ItemId> items;
            for (const auto& t : s.transactions()) items.insert(items.end(), t.items.begin(), t.items.end());
            txns.emplace_back(std::move(items));
        }
        auto r = mine_frequent_itemsets(txns, a.min_support);
        row.patterns_emitted = r.size();
        row.store_bytes = r.capacity() * sizeof(FrequentItemset);
        for (const auto& f : r) row.store_bytes += f.itemset.size() * sizeof(ItemId);
    } else if (algo == "stream") {
        StreamConfig cfg{a.min_support, a.min_support / 10, a.batch_size, a.max_length};
        cons << ",epsilon=" << cfg.epsilon << ",batch_size=" << cfg.batch_size;
        StreamMiner miner(cfg);
        for (const auto& s : db.sequences()) miner.push(s);
        row.patterns_emitted = miner.finish().size();
        row.store_bytes = miner.state().peak_tree_bytes;
    } else {
        throw UsageError("unknown algorithm '" + algo + "' (expected gsp, prefixspan, apriori, stream)");
    }
    row.elapsed = std::chrono::duration_cast<std::chrono::microseconds>(std::chrono::steady_clock::now() - start);
    row.constraints = cons.str();
    return row;
}

inline int cmd_bench(const BenchArgs& a, std::ostream& out) {
    for (const auto& algo : a.algos)
        if (algo != "gsp" && algo != "prefixspan" && algo != "apriori" && algo != "stream")
            throw UsageError("unknown algorithm '" + algo + "' (expected gsp, prefixspan, apriori, stream)");
    if (a.sizes.empty()) throw UsageError("--sizes must not be empty");
    for (auto s : a.sizes)
        if (s == 0) throw UsageError("--sizes entries must be >= 1");
    detail::check_fraction(a.min_support, "--min-support");
    if (a.max_length < 1) throw UsageError("--max-length must be >= 1");
    if (a.batch_size < 1) throw UsageError("--batch-size must be >= 1");

    detail::Sink sink(a.out, out);
    std::vector<BenchRow> rows;
    for (auto size : a.sizes) {
        synthetic::GeneratorConfig g;
        g.sequences = size;
        g.seed = a.seed;
        const auto db = synthetic::generate(g);
        for (const auto& algo : a.algos) {
            rows.push_back(bench_one(algo, db, a));
            const auto& r = rows.back();
            sink.stream() << "bench algo=" << r.algo << " sequences=" << r.sequences << " avg_transactions="
                          << std::fixed << std::setprecision(3) << r.avg_transactions
                          << " constraints=" << r.constraints << " patterns=" << r.patterns_emitted
                          << " elapsed_us=" << r.elapsed.count() << " store_bytes=" << r.store_bytes << '\n';
        }
    }

    std::vector<double> xs, ys;
    for (const auto& r : rows)
        if (r.algo == "stream") {
            xs.push_back(static_cast<double>(r.sequences));
            ys.push_back(static_cast<double>(r.elapsed.count()));
        }
    std::optional<synthetic::LineFit> fit;
    if (xs.size() >= 2) {
        fit = synthetic::fit_line(xs, ys);
        sink.stream() << "stream_linearity slope_us_per_sequence=" << std::setprecision(4) << fit->slope
                      << " intercept_us=" << fit->intercept << " r2=" << fit->r_squared << '\n';
    }

    {
        out << std::left << std::setw(12) << "algo" << std::right << std::setw(10) << "sequences" << std::setw(10)
            << "avg_txn" << std::setw(10) << "patterns" << std::setw(14) << "elapsed_ms" << std::setw(14)
            << "store_bytes" << '\n';
        for (const auto& r : rows)
            out << std::left << std::setw(12) << r.algo << std::right << std::setw(10) << r.sequences
                << std::setw(10) << std::fixed << std::setprecision(2) << r.avg_transactions << std::setw(10)
                << r.patterns_emitted << std::setw(14) << std::setprecision(3)
                << static_cast<double>(r.elapsed.count()) / 1000.0 << std::setw(14) << r.store_bytes << '\n';
        if (fit) out << "stream linearity R^2 = " << std::setprecision(4) << fit->r_squared << '\n';
    }
    return ok;
}

// ---------------------------------------------------------------------------
// Entry point
// ---------------------------------------------------------------------------

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"seqmine: frequent itemset, sequential pattern and stream pattern mining"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "seqmine 1.0.0");

    ItemsetArgs ia;
    auto* itemsets = app.add_subcommand("mine-itemsets", "Apriori frequent itemsets and association rules");
    itemsets->add_option("input", ia.input, "transactions CSV (txn_id,items)")->required();
    itemsets->add_option("--min-support", ia.min_support, "minimum support fraction in (0, 1]")->required();
    itemsets->add_option("--min-confidence", ia.min_confidence, "also emit rules with at least this confidence");
    itemsets->add_option("--out", ia.out, "output file (default: stdout)");

    SequenceArgs sa;
    auto* seq = app.add_subcommand("mine-seq", "sequential patterns under gap/length constraints");
    seq->add_option("input", sa.input, "sequence CSV (seq_id,time,items)")->required();
    seq->add_option("--min-support", sa.min_support, "minimum support fraction in (0, 1]")->required();
    seq->add_option("--min-gap", sa.min_gap, "time difference between elements must exceed this");
    seq->add_option("--max-gap", sa.max_gap, "time difference between elements must not exceed this");
    seq->add_option("--max-index-gap", sa.max_index_gap, "max transactions skipped between elements");
    seq->add_option("--max-length", sa.max_length, "max items per pattern");
    seq->add_option("--algo", sa.algo, "gsp or prefixspan");
    seq->add_flag("--closed", sa.closed, "keep only closed patterns");
    seq->add_option("--out", sa.out, "output file (default: stdout)");

    StreamArgs st;
    auto* stream = app.add_subcommand("mine-stream", "one-pass batched stream mining");
    stream->add_option("input", st.input, "sequence CSV replayed in arrival order")->required();
    stream->add_option("--sigma", st.sigma, "support threshold")->required();
    stream->add_option("--epsilon", st.epsilon, "error bound, < sigma")->required();
    stream->add_option("--batch-size", st.batch_size, "sequences per batch");
    stream->add_option("--max-length", st.max_length, "max items per pattern");
    stream->add_option("--report-every", st.report_every, "report after every k batches");
    stream->add_option("--out", st.out, "output file (default: stdout)");
    stream->add_flag("--watch", st.watch, "keep tailing the input file as it grows");
    stream->add_option("--poll-ms", st.poll_ms, "poll interval for --watch");
    stream->add_option("--idle-timeout", st.idle_timeout, "stop --watch after this many idle seconds (0 = never)");

    AnalyzeArgs aa;
    auto* analyze = app.add_subcommand("analyze-results", "trend report and charts for result percentages");
    analyze->add_option("input", aa.input, "results CSV (default: bundled dataset)");
    analyze->add_option("--bands", aa.bands, "band scheme, e.g. 50:F,70:C,85:B,100:A");
    analyze->add_option("--anomaly-threshold", aa.anomaly_threshold, "flag |year-over-year delta| above this");
    analyze->add_option("--plot-dir", aa.plot_dir, "directory for SVG charts (empty string disables)");

    BenchArgs ba;
    auto* bench = app.add_subcommand("bench", "synthetic benchmark of the miners");
    bench->add_option("--sizes", ba.sizes, "database sizes")->delimiter(',');
    bench->add_option("--algos", ba.algos, "gsp,prefixspan,apriori,stream")->delimiter(',');
    bench->add_option("--seed", ba.seed, "generator seed");
    bench->add_option("--min-support", ba.min_support, "minimum support fraction");
    bench->add_option("--max-length", ba.max_length, "max items per pattern");
    bench->add_option("--batch-size", ba.batch_size, "stream batch size");
    bench->add_option("--out", ba.out, "machine-readable rows (stdout when omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return ok;
    } catch (const CLI::CallForVersion&) {
        out << "seqmine 1.0.0\n";
        return ok;
    } catch (const CLI::ParseError& e) {
        std::string msg = e.what();
        if (auto nl = msg.find('\n'); nl != std::string::npos) msg.resize(nl);
        err << "error: " << msg << '\n';
        return usage_error;
    }

    try {
        (void)thread_count();
        if (itemsets->parsed()) return cmd_mine_itemsets(ia, out);
        if (seq->parsed()) return cmd_mine_seq(sa, out);
        if (stream->parsed()) return cmd_mine_stream(st, out);
        if (analyze->parsed()) return cmd_analyze_results(aa, out);
        if (bench->parsed()) return cmd_bench(ba, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return usage_error;
    } catch (const Error& e) {
        err << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
        if (e.is_input_error()) return input_error;
        switch (e.code()) {
        case Errc::InvalidThreshold:
        case Errc::InvalidConstraints:
        case Errc::InvalidConfig:
        case Errc::InvalidBands:
        case Errc::BadBatchSize:
            return usage_error;
        default:
            return internal_error;
        }
    } catch (const std::exception& e) {
        err << "error: internal: " << e.what() << '\n';
        return internal_error;
    }
    return usage_error;
}

} // namespace seqmine::cli
