#ifndef SPLITREE_TREE_HPP
#define SPLITREE_TREE_HPP

#include <cstdint>
#include <deque>
#include <span>
#include <vector>

#include "splitree/params.hpp"
#include "splitree/rng.hpp"
#include "splitree/split_source.hpp"

namespace splitree {

// CountsOnly: per-vertex ball counts only (fastest).
// Traced: additionally tracks ball identities (D_k, D_k^f, D_n*).
// Instrumented: additionally carries cumulative root-path split weights.
enum class BuildMode { CountsOnly, Traced, Instrumented };

struct Vertex {
    std::int32_t parent = -1;     // -1 for the root
    std::int32_t depth = 0;
    std::int32_t split = -1;      // index into the split arena; -1 while a leaf
    std::int32_t ball_count = 0;  // C_v
    double cum_weight = 1.0;      // instrumented mode: prod of root-path components
};

// A split tree under construction is confined to one execution context;
// once built it is immutable and safe to share read-only.
class Tree {
public:
    Tree(SplitParams params, BuildMode mode);

    // Inserts one ball per the generating algorithm and returns the depth at
    // which it comes to rest (D_k^f). Splitting cascades run on an explicit
    // FIFO queue so chains with s0 = 0 cannot exhaust the stack.
    int add_ball(const SplitVectorSource& source, Rng& rng);

    const SplitParams& params() const { return params_; }
    BuildMode mode() const { return mode_; }
    std::int64_t n_balls() const { return n_balls_; }
    std::int64_t vertex_count() const { return static_cast<std::int64_t>(vertices_.size()); }
    const std::vector<Vertex>& vertices() const { return vertices_; }

    // Child handle (-1 if absent); v must be an internal vertex for i-th child.
    std::int32_t child(std::int32_t v, int i) const;
    bool is_leaf(std::int32_t v) const { return vertices_[v].split < 0; }
    // The frozen split vector of an internal vertex (empty span for leaves).
    std::span<const double> split_vector(std::int32_t v) const;

    // Depth of the most recently inserted ball after its insertion completed.
    // For the final ball this equals D_n in every mode.
    int last_ball_depth() const { return last_ball_depth_; }

    // Traced-mode accessors.
    const std::vector<std::int32_t>& ball_locations() const;   // ball -> vertex
    const std::vector<std::int32_t>& insertion_depths() const; // D_k^f
    std::vector<std::int32_t> final_ball_depths() const;       // D_k

private:
    friend std::vector<std::int64_t> subtree_ball_counts(const Tree&);

    std::int32_t create_vertex(std::int32_t parent, double weight);
    std::int32_t flagged_vertex_marker_token() const;
    std::int32_t get_or_create_child(std::int32_t v, int i);
    int pick_child(std::int32_t v, Rng& rng) const;
    void place(std::int32_t v, std::int32_t token);
    void split_leaf(std::int32_t v, std::int32_t incoming,
                    const SplitVectorSource& source, Rng& rng);

    SplitParams params_;
    BuildMode mode_;
    std::vector<Vertex> vertices_;
    std::vector<std::int32_t> children_;    // b slots per split record
    std::vector<double> split_probs_;       // b components per split record
    std::int64_t n_balls_ = 0;
    int last_ball_depth_ = -1;

    // Tracking of the ball currently being inserted.
    std::int32_t flagged_vertex_ = -1;

    // Traced mode.
    std::vector<std::int32_t> ball_locations_;
    std::vector<std::int32_t> insertion_depths_;
    std::vector<std::int32_t> resident_; // s slots per vertex, ball ids

    struct QueueItem {
        std::int32_t vertex;
        std::int32_t token;
    };
    std::deque<QueueItem> queue_;
    std::vector<std::int32_t> scratch_tokens_; // s + 1 slots reused per split
};

// Builds a tree from n balls. Deterministic given all arguments within one
// implementation. Throws std::invalid_argument on bad parameters or n < 1.
Tree build(const SplitParams& params, const SplitVectorSource& source,
           std::int64_t n, std::uint64_t seed, BuildMode mode);

// n_v for every vertex, one bottom-up pass.
std::vector<std::int64_t> subtree_ball_counts(const Tree& tree);

} // namespace splitree

#endif
