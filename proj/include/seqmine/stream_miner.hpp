#pragma once

#include <algorithm>
#include <compare>
#include <concepts>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "core.hpp"
#include "sequence_miner.hpp"

namespace seqmine {

/// sigma: output threshold; epsilon: tolerated error (sigma - epsilon is the
/// floor under every reported pattern's true support). Both are quantized to
/// 1e-6 so all threshold arithmetic is exact.
struct StreamConfig {
    double sigma = 0.1;
    double epsilon = 0.01;
    std::size_t batch_size = 100;
    std::size_t max_length = 5;

    void validate() const {
        const auto s = Fraction::from_double(sigma);
        const auto e = Fraction::from_double(epsilon);
        if (!(s.ppm() > 0 && s.ppm() <= Fraction::scale))
            throw Error(Errc::InvalidConfig, "sigma must be in (0, 1]");
        if (!(e.ppm() > 0 && e < s)) throw Error(Errc::InvalidConfig, "epsilon must be in (0, sigma)");
        if (batch_size < 1) throw Error(Errc::InvalidConfig, "batch_size must be >= 1");
        if (max_length < 1) throw Error(Errc::InvalidConfig, "max_length must be >= 1");
    }

    Fraction sigma_fraction() const { return Fraction::from_double(sigma); }
    Fraction epsilon_fraction() const { return Fraction::from_double(epsilon); }
};

/// Child edge label: which item was added, and whether it opened a new
/// element (sequence extension) or joined the last one (itemset extension).
struct ExtensionKey {
    bool itemset_ext = false;
    ItemId item = 0;
    auto operator<=>(const ExtensionKey&) const = default;
};

/// Prefix tree of candidate patterns. Each node's pattern is its parent's
/// pattern extended by the edge key. `count` is exact since insertion, `delta`
/// bounds what may have been missed before it, so
///   count <= true count <= count + delta.
class PatternTree {
  public:
    struct Child;
    struct Node {
        Count count = 0;
        Count delta = 0;
        std::size_t inserted_at_batch = 0;
        std::vector<Child> children; // sorted by key

        Node* find(ExtensionKey key);
        const Node* find(ExtensionKey key) const;
        Node& insert(ExtensionKey key, Node node);
    };
    struct Child {
        ExtensionKey key;
        Node node;
    };

    Node& root() noexcept { return root_; }
    const Node& root() const noexcept { return root_; }

    /// Number of patterns stored (the root is the empty pattern, not counted).
    std::size_t size() const { return subtree_size(root_) - 1; }

    const Node* find(const Pattern& p) const {
        const Node* n = &root_;
        for (std::size_t e = 0; e < p.element_count() && n; ++e)
            for (std::size_t i = 0; i < p[e].size() && n; ++i)
                n = n->find(ExtensionKey{i > 0, p[e].items()[i]});
        return n;
    }

    /// f(const Pattern&, const Node&) for every stored pattern, parents first.
    template <typename F>
    void visit(F&& f) const {
        for (const auto& c : root_.children) {
            Pattern p{Itemset{c.key.item}};
            visit_from(p, c.node, f);
        }
    }

    /// Drops every node with count + delta <= threshold, with its subtree.
    void prune(Count threshold) { prune_from(root_, threshold); }

    /// Rough heap footprint of the stored nodes.
    std::size_t approx_bytes() const { return sizeof(*this) + bytes_from(root_); }

  private:
    static std::size_t subtree_size(const Node& n) {
        std::size_t s = 1;
        for (const auto& c : n.children) s += subtree_size(c.node);
        return s;
    }
    static std::size_t bytes_from(const Node& n) {
        std::size_t b = n.children.capacity() * sizeof(Child);
        for (const auto& c : n.children) b += bytes_from(c.node);
        return b;
    }
    template <typename F>
    static void visit_from(const Pattern& p, const Node& n, F& f) {
        f(p, n);
        for (const auto& c : n.children) {
            Pattern q = c.key.itemset_ext ? p.with_item_in_last(c.key.item) : p.with_new_element(c.key.item);
            visit_from(q, c.node, f);
        }
    }
    static void prune_from(Node& n, Count threshold) {
        std::erase_if(n.children, [&](const Child& c) { return c.node.count + c.node.delta <= threshold; });
        for (auto& c : n.children) prune_from(c.node, threshold);
    }

    Node root_;
};

inline PatternTree::Node* PatternTree::Node::find(ExtensionKey key) {
    auto it = std::lower_bound(children.begin(), children.end(), key,
                               [](const Child& c, ExtensionKey k) { return c.key < k; });
    return (it != children.end() && it->key == key) ? &it->node : nullptr;
}

inline const PatternTree::Node* PatternTree::Node::find(ExtensionKey key) const {
    return const_cast<Node*>(this)->find(key);
}

inline PatternTree::Node& PatternTree::Node::insert(ExtensionKey key, Node node) {
    auto it = std::lower_bound(children.begin(), children.end(), key,
                               [](const Child& c, ExtensionKey k) { return c.key < k; });
    it = children.insert(it, Child{key, std::move(node)});
    return it->node;
}

struct StreamState {
    PatternTree tree;
    Count sequences_seen = 0;
    std::size_t batches_seen = 0;
    std::size_t peak_tree_bytes = 0;
};

namespace detail {

struct BatchWalk {
    std::span<const DataSequence> batch;
    const Constraints unconstrained{};
    ItemId bound;
    Count local_threshold;
    Count new_delta;
    std::size_t batch_no;
    std::size_t max_length;

    // Adds this batch's exact support to every stored node it touches, and
    // inserts children whose batch support reaches the local threshold.
    void extend(PatternTree::Node& node, ExtensionKey key, Count support, const Projection* parent,
                std::size_t depth) {
        PatternTree::Node* child = node.find(key);
        if (child == nullptr) {
            if (support < local_threshold) return;
            child = &node.insert(key, PatternTree::Node{0, new_delta, batch_no, {}});
        }
        child->count += support;
        if (support == 0 || depth >= max_length) return;
        Projection proj = parent == nullptr ? project_item(batch, key.item)
                          : key.itemset_ext ? project_itemset_ext(batch, *parent, key.item)
                                            : project_sequence_ext(batch, *parent, key.item, unconstrained);
        descend(*child, proj, key.item, depth);
    }

    void descend(PatternTree::Node& node, const Projection& proj, ItemId last_item, std::size_t depth) {
        ExtensionCounts ext;
        count_extensions(batch, proj, last_item, unconstrained, bound, ext);
        for (ItemId i = 0; i < bound; ++i)
            if (ext.sequence_ext[i] > 0) extend(node, {false, i}, ext.sequence_ext[i], &proj, depth + 1);
        for (ItemId i = 0; i < bound; ++i)
            if (ext.itemset_ext[i] > 0) extend(node, {true, i}, ext.itemset_ext[i], &proj, depth + 1);
    }

    void run(PatternTree& tree) {
        const auto counts = count_items(batch, bound);
        for (ItemId i = 0; i < bound; ++i)
            if (counts[i] > 0) extend(tree.root(), {false, i}, counts[i], nullptr, 1);
    }
};

inline void absorb(StreamState& state, std::span<const DataSequence> batch, const StreamConfig& config) {
    if (batch.empty()) return;
    const Fraction eps = config.epsilon_fraction();
    const Count n_before = state.sequences_seen;
    const Count n_after = n_before + batch.size();

    ItemId bound = 0;
    for (const auto& s : batch)
        for (const auto& t : s.transactions()) bound = std::max(bound, t.items.back() + 1);

    BatchWalk walk{batch,
                   Constraints{},
                   bound,
                   std::max<Count>(1, eps.floor_of(batch.size())),
                   eps.floor_of(n_before),
                   state.batches_seen + 1,
                   config.max_length};
    walk.run(state.tree);

    state.peak_tree_bytes = std::max(state.peak_tree_bytes, state.tree.approx_bytes());
    state.tree.prune(eps.floor_of(n_after));
    state.sequences_seen = n_after;
    ++state.batches_seen;
}

} // namespace detail

/// Mines one full batch into the tree and discards it.
inline StreamState process_batch(StreamState state, std::vector<DataSequence>&& batch, const StreamConfig& config) {
    config.validate();
    if (batch.size() != config.batch_size)
        throw Error(Errc::BadBatchSize, "batch holds " + std::to_string(batch.size()) + " sequences, expected " +
                                            std::to_string(config.batch_size));
    detail::absorb(state, batch, config);
    batch.clear();
    return state;
}

/// Every stored pattern whose count reaches (sigma - epsilon) * N.
inline std::vector<SupportedPattern> query_output(const StreamState& state, const StreamConfig& config) {
    std::vector<SupportedPattern> out;
    const Count n = state.sequences_seen;
    if (n == 0) return out;
    const auto floor_ppm = static_cast<Count>((config.sigma_fraction() - config.epsilon_fraction()).ppm());
    state.tree.visit([&](const Pattern& p, const PatternTree::Node& node) {
        if (static_cast<__int128>(node.count) * Fraction::scale >= static_cast<__int128>(floor_ppm) * n)
            out.push_back({p, node.count, static_cast<double>(node.count) / static_cast<double>(n)});
    });
    sort_patterns(out);
    return out;
}

/// Processes a trailing partial batch, then answers the query.
inline std::vector<SupportedPattern> flush(StreamState& state, std::vector<DataSequence>&& residual,
                                           const StreamConfig& config) {
    config.validate();
    if (residual.size() >= config.batch_size)
        throw Error(Errc::BadBatchSize, "residual batch must be smaller than batch_size");
    detail::absorb(state, residual, config);
    residual.clear();
    return query_output(state, config);
}

template <typename S>
concept SequenceSource = requires(S s) {
    { s.next() } -> std::same_as<std::optional<DataSequence>>;
};

/// Push-driven wrapper: buffers arriving sequences and hands each full batch
/// to process_batch exactly once.
class StreamMiner {
  public:
    explicit StreamMiner(StreamConfig config) : config_(config) { config_.validate(); }

    /// Returns true when this push completed (and processed) a batch.
    bool push(DataSequence seq) {
        pending_.push_back(std::move(seq));
        if (pending_.size() < config_.batch_size) return false;
        state_ = process_batch(std::move(state_), std::move(pending_), config_);
        pending_ = {};
        return true;
    }

    std::vector<SupportedPattern> query() const { return query_output(state_, config_); }

    std::vector<SupportedPattern> finish() {
        auto out = flush(state_, std::move(pending_), config_);
        pending_ = {};
        return out;
    }

    /// Drains `source`, calling on_batch(*this) after every full batch.
    template <SequenceSource S, typename OnBatch>
    std::vector<SupportedPattern> run(S& source, OnBatch&& on_batch) {
        while (auto seq = source.next())
            if (push(std::move(*seq))) on_batch(*this);
        return finish();
    }

    const StreamState& state() const noexcept { return state_; }
    const StreamConfig& config() const noexcept { return config_; }
    std::size_t pending() const noexcept { return pending_.size(); }

  private:
    StreamConfig config_;
    StreamState state_;
    std::vector<DataSequence> pending_;
};

} // namespace seqmine
