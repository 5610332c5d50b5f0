#include "splitree/tree.hpp"

#include <stdexcept>

namespace splitree {

namespace {
// Token for an untracked resident ball (counts-only / instrumented modes).
constexpr std::int32_t kAnonymous = -1;
// Token for the ball currently being inserted when identities are not kept.
constexpr std::int32_t kFlagged = -2;
} // namespace

Tree::Tree(SplitParams params, BuildMode mode) : params_(params), mode_(mode) {
    require_valid(params);
    scratch_tokens_.resize(static_cast<std::size_t>(params_.s) + 1);
    create_vertex(-1, 1.0);
}

std::int32_t Tree::create_vertex(std::int32_t parent, double weight) {
    Vertex v;
    v.parent = parent;
    v.depth = parent < 0 ? 0 : vertices_[parent].depth + 1;
    v.cum_weight = weight;
    vertices_.push_back(v);
    if (mode_ == BuildMode::Traced)
        resident_.resize(vertices_.size() * static_cast<std::size_t>(params_.s), kAnonymous);
    return static_cast<std::int32_t>(vertices_.size() - 1);
}

std::int32_t Tree::child(std::int32_t v, int i) const {
    const std::int32_t split = vertices_[v].split;
    if (split < 0) return -1;
    return children_[static_cast<std::size_t>(split) * params_.b + i];
}

std::span<const double> Tree::split_vector(std::int32_t v) const {
    const std::int32_t split = vertices_[v].split;
    if (split < 0) return {};
    return {split_probs_.data() + static_cast<std::size_t>(split) * params_.b,
            static_cast<std::size_t>(params_.b)};
}

int Tree::pick_child(std::int32_t v, Rng& rng) const {
    const std::size_t base = static_cast<std::size_t>(vertices_[v].split) * params_.b;
    const double u = uniform01(rng);
    double acc = 0.0;
    int last_positive = 0;
    for (int i = 0; i < params_.b; ++i) {
        const double p = split_probs_[base + i];
        if (p <= 0.0) continue;
        acc += p;
        last_positive = i;
        if (u < acc) return i;
    }
    return last_positive; // u landed in the rounding gap below 1
}

std::int32_t Tree::get_or_create_child(std::int32_t v, int i) {
    const std::size_t slot = static_cast<std::size_t>(vertices_[v].split) * params_.b + i;
    std::int32_t c = children_[slot];
    if (c < 0) {
        double weight = 1.0;
        if (mode_ == BuildMode::Instrumented)
            weight = vertices_[v].cum_weight * split_probs_[slot];
        c = create_vertex(v, weight);
        children_[slot] = c;
    }
    return c;
}

void Tree::place(std::int32_t v, std::int32_t token) {
    Vertex& vert = vertices_[v];
    if (vert.ball_count >= params_.s)
        throw std::logic_error("place: leaf already at capacity");
    if (mode_ == BuildMode::Traced) {
        resident_[static_cast<std::size_t>(v) * params_.s + vert.ball_count] = token;
        ball_locations_[token] = v;
    }
    ++vert.ball_count;
    if (token == flagged_vertex_marker_token())
        flagged_vertex_ = v;
}

std::int32_t Tree::flagged_vertex_marker_token() const {
    return mode_ == BuildMode::Traced ? static_cast<std::int32_t>(n_balls_ - 1)
                                      : kFlagged;
}

void Tree::split_leaf(std::int32_t v, std::int32_t incoming,
                      const SplitVectorSource& source, Rng& rng) {
    const int b = params_.b;
    const int s = params_.s;
    if (vertices_[v].ball_count != s)
        throw std::logic_error("split_leaf: vertex is not a full leaf");

    const std::int32_t flagged = flagged_vertex_marker_token();

    // The s + 1 balls taking part in the split.
    auto& toks = scratch_tokens_;
    if (mode_ == BuildMode::Traced) {
        const std::size_t base = static_cast<std::size_t>(v) * s;
        for (int j = 0; j < s; ++j) toks[j] = resident_[base + j];
    } else {
        for (int j = 0; j < s; ++j) toks[j] = kAnonymous;
        if (flagged_vertex_ == v) {
            toks[0] = kFlagged;
            flagged_vertex_ = -1;
        }
    }
    toks[s] = incoming;

    // Freeze this vertex's split vector and allocate its child slots.
    const std::int32_t split = static_cast<std::int32_t>(split_probs_.size() / b);
    split_probs_.resize(split_probs_.size() + b);
    source.sample(rng, {split_probs_.data() + static_cast<std::size_t>(split) * b,
                        static_cast<std::size_t>(b)});
    children_.resize(children_.size() + b, -1);
    vertices_[v].split = split;

    // s0 uniformly chosen balls stay; then s1 per child, children in index
    // order; both by sequential sampling without replacement.
    const int m = s + 1;
    int idx = 0;
    auto draw_next = [&](int upto) {
        const int r = std::uniform_int_distribution<int>(idx, upto - 1)(rng);
        std::swap(toks[idx], toks[r]);
        return toks[idx++];
    };

    vertices_[v].ball_count = params_.s0;
    for (int j = 0; j < params_.s0; ++j) {
        const std::int32_t tok = draw_next(m);
        if (mode_ == BuildMode::Traced) {
            resident_[static_cast<std::size_t>(v) * s + j] = tok;
            ball_locations_[tok] = v;
        }
        if (tok == flagged) flagged_vertex_ = v;
    }

    for (int i = 0; i < b; ++i) {
        if (params_.s1 == 0) break;
        const std::int32_t c = get_or_create_child(v, i);
        for (int k = 0; k < params_.s1; ++k) {
            const std::int32_t tok = draw_next(m);
            Vertex& cv = vertices_[c];
            if (cv.ball_count >= s)
                throw std::logic_error("split_leaf: seeded child over capacity");
            if (mode_ == BuildMode::Traced) {
                resident_[static_cast<std::size_t>(c) * s + cv.ball_count] = tok;
                ball_locations_[tok] = c;
            }
            ++cv.ball_count;
            if (tok == flagged) flagged_vertex_ = c;
        }
    }

    // Remaining balls are routed independently by this vertex's split vector
    // and re-inserted into the selected child's subtree.
    for (; idx < m; ++idx) {
        const int i = pick_child(v, rng);
        const std::int32_t c = get_or_create_child(v, i);
        queue_.push_back({c, toks[idx]});
    }
}

int Tree::add_ball(const SplitVectorSource& source, Rng& rng) {
    if (source.branch_factor() != params_.b)
        throw std::invalid_argument("add_ball: source branch factor mismatch");
    ++n_balls_;
    if (mode_ == BuildMode::Traced) ball_locations_.push_back(-1);
    flagged_vertex_ = -1;

    queue_.push_back({0, flagged_vertex_marker_token()});
    while (!queue_.empty()) {
        const QueueItem item = queue_.front();
        queue_.pop_front();
        std::int32_t v = item.vertex;
        while (vertices_[v].split >= 0)
            v = get_or_create_child(v, pick_child(v, rng));
        if (vertices_[v].ball_count < params_.s)
            place(v, item.token);
        else
            split_leaf(v, item.token, source, rng);
    }

    if (flagged_vertex_ < 0)
        throw std::logic_error("add_ball: inserted ball never came to rest");
    last_ball_depth_ = vertices_[flagged_vertex_].depth;
    if (mode_ == BuildMode::Traced) insertion_depths_.push_back(last_ball_depth_);
    return last_ball_depth_;
}

const std::vector<std::int32_t>& Tree::ball_locations() const {
    if (mode_ != BuildMode::Traced)
        throw std::logic_error("ball_locations: tree was not built in traced mode");
    return ball_locations_;
}

const std::vector<std::int32_t>& Tree::insertion_depths() const {
    if (mode_ != BuildMode::Traced)
        throw std::logic_error("insertion_depths: tree was not built in traced mode");
    return insertion_depths_;
}

std::vector<std::int32_t> Tree::final_ball_depths() const {
    const auto& locs = ball_locations();
    std::vector<std::int32_t> depths(locs.size());
    for (std::size_t k = 0; k < locs.size(); ++k)
        depths[k] = vertices_[locs[k]].depth;
    return depths;
}

Tree build(const SplitParams& params, const SplitVectorSource& source,
           std::int64_t n, std::uint64_t seed, BuildMode mode) {
    require_valid(params);
    if (n < 1) throw std::invalid_argument("build: need n >= 1");
    Tree tree(params, mode);
    Rng rng(seed);
    for (std::int64_t k = 0; k < n; ++k) tree.add_ball(source, rng);
    return tree;
}

std::vector<std::int64_t> subtree_ball_counts(const Tree& tree) {
    const auto& verts = tree.vertices();
    std::vector<std::int64_t> nv(verts.size());
    for (std::size_t v = 0; v < verts.size(); ++v) nv[v] = verts[v].ball_count;
    for (std::size_t v = verts.size(); v-- > 1;) nv[verts[v].parent] += nv[v];
    return nv;
}

} // namespace splitree
