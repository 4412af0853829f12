#include "elect/gbt.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <numeric>

#include "elect/rng.hpp"

namespace elect {

using nlohmann::json;

namespace {

constexpr double kMinGain = 1e-12;

struct NodeStats {
  std::size_t count = 0;
  double sum = 0.0;
};

struct Split {
  double gain = kMinGain;
  int feature = -1;
  double threshold = 0.0;
};

// Per-node running state while scanning one feature in sorted order.
struct Scan {
  std::size_t count = 0;
  double sum = 0.0;
  double last = 0.0;
  bool seen = false;
};

double split_point(double lo, double hi) {
  double mid = lo + 0.5 * (hi - lo);
  return mid < hi ? mid : lo;
}

class TreeBuilder {
 public:
  TreeBuilder(const Matrix& x, const std::vector<std::vector<std::size_t>>& sorted,
              const GbtParams& params)
      : x_(x), sorted_(sorted), params_(params) {}

  RegressionTree build(const std::vector<double>& residual, const std::vector<char>& in_bag) {
    const std::size_t n = x_.rows();
    RegressionTree tree;
    tree.nodes.push_back(TreeNode{});
    node_of_.assign(n, -1);
    NodeStats root;
    for (std::size_t i = 0; i < n; ++i) {
      if (!in_bag[i]) continue;
      node_of_[i] = 0;
      ++root.count;
      root.sum += residual[i];
    }
    std::vector<int> level{0};
    std::vector<NodeStats> stats{root};

    for (int depth = 0; depth < params_.max_depth && !level.empty(); ++depth) {
      // slot_[node] = position in `level`, or -1.
      slot_.assign(tree.nodes.size(), -1);
      for (std::size_t s = 0; s < level.size(); ++s) slot_[static_cast<std::size_t>(level[s])] = static_cast<int>(s);
      std::vector<Split> best(level.size());
      std::vector<Scan> scan(level.size());
      for (std::size_t f = 0; f < x_.cols(); ++f) {
        std::fill(scan.begin(), scan.end(), Scan{});
        for (auto i : sorted_[f]) {
          const int node = node_of_[i];
          if (node < 0) continue;
          const int s = slot_[static_cast<std::size_t>(node)];
          if (s < 0) continue;
          auto& sc = scan[static_cast<std::size_t>(s)];
          const double v = x_(i, f);
          if (sc.seen && v > sc.last) consider(sc, stats[static_cast<std::size_t>(s)], f, v, best[static_cast<std::size_t>(s)]);
          ++sc.count;
          sc.sum += residual[i];
          sc.last = v;
          sc.seen = true;
        }
      }
      std::vector<int> next_level;
      for (std::size_t s = 0; s < level.size(); ++s) {
        if (best[s].feature < 0) continue;
        const int id = level[s];
        const int l = static_cast<int>(tree.nodes.size());
        tree.nodes.push_back(TreeNode{});
        tree.nodes.push_back(TreeNode{});
        auto& node = tree.nodes[static_cast<std::size_t>(id)];
        node.feature = best[s].feature;
        node.threshold = best[s].threshold;
        node.left = l;
        node.right = l + 1;
        next_level.push_back(l);
        next_level.push_back(l + 1);
      }
      if (next_level.empty()) break;
      std::vector<NodeStats> next_stats(next_level.size());
      std::vector<int> next_slot(tree.nodes.size(), -1);
      for (std::size_t s = 0; s < next_level.size(); ++s)
        next_slot[static_cast<std::size_t>(next_level[s])] = static_cast<int>(s);
      for (std::size_t i = 0; i < n; ++i) {
        const int node = node_of_[i];
        if (node < 0) continue;
        const auto& tn = tree.nodes[static_cast<std::size_t>(node)];
        if (tn.feature < 0) continue;  // settled in a leaf
        const int child =
            x_(i, static_cast<std::size_t>(tn.feature)) <= tn.threshold ? tn.left : tn.right;
        node_of_[i] = child;
        auto& st = next_stats[static_cast<std::size_t>(next_slot[static_cast<std::size_t>(child)])];
        ++st.count;
        st.sum += residual[i];
      }
      level = std::move(next_level);
      stats = std::move(next_stats);
    }
    // Leaf values: mean residual of the in-bag rows that reached the leaf.
    std::vector<NodeStats> leaf(tree.nodes.size());
    for (std::size_t i = 0; i < n; ++i) {
      const int node = node_of_[i];
      if (node < 0) continue;
      ++leaf[static_cast<std::size_t>(node)].count;
      leaf[static_cast<std::size_t>(node)].sum += residual[i];
    }
    for (std::size_t id = 0; id < tree.nodes.size(); ++id) {
      auto& node = tree.nodes[id];
      if (node.feature < 0 && leaf[id].count > 0)
        node.value = leaf[id].sum / static_cast<double>(leaf[id].count);
    }
    return tree;
  }

 private:
  void consider(const Scan& sc, const NodeStats& total, std::size_t f, double v, Split& best) const {
    const std::size_t n_left = sc.count;
    const std::size_t n_right = total.count - n_left;
    const auto min_leaf = static_cast<std::size_t>(std::max(params_.min_leaf, 1));
    if (n_left < min_leaf || n_right < min_leaf) return;
    const double s_left = sc.sum;
    const double s_right = total.sum - s_left;
    const double gain = s_left * s_left / static_cast<double>(n_left) +
                        s_right * s_right / static_cast<double>(n_right) -
                        total.sum * total.sum / static_cast<double>(total.count);
    if (gain > best.gain) {
      best.gain = gain;
      best.feature = static_cast<int>(f);
      best.threshold = split_point(sc.last, v);
    }
  }

  const Matrix& x_;
  const std::vector<std::vector<std::size_t>>& sorted_;
  const GbtParams& params_;
  std::vector<int> node_of_;
  std::vector<int> slot_;
};

}  // namespace

double RegressionTree::predict(std::span<const double> x) const {
  std::size_t id = 0;
  while (nodes[id].feature >= 0) {
    const auto& n = nodes[id];
    id = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
  }
  return nodes[id].value;
}

int RegressionTree::depth() const {
  std::vector<int> d(nodes.size(), 0);
  int deepest = 0;
  for (std::size_t id = 0; id < nodes.size(); ++id) {
    if (nodes[id].feature < 0) continue;
    d[static_cast<std::size_t>(nodes[id].left)] = d[id] + 1;
    d[static_cast<std::size_t>(nodes[id].right)] = d[id] + 1;
    deepest = std::max(deepest, d[id] + 1);
  }
  return deepest;
}

double GbtModel::predict(std::span<const double> x) const {
  double s = 0.0;
  for (const auto& t : trees) s += t.predict(x);
  return base_score + learning_rate * s;
}

GbtModel fit_gbt(const Matrix& features, std::span<const double> targets,
                 const GbtParams& params) {
  const std::size_t n = features.rows();
  if (n < 2) throw ValidationError("fit_gbt: need at least 2 samples");
  if (targets.size() != n) throw ValidationError("fit_gbt: target count differs from rows");
  if (params.n_trees < 0 || params.max_depth < 0 || !(params.learning_rate > 0.0) ||
      !(params.subsample > 0.0 && params.subsample <= 1.0))
    throw ValidationError("fit_gbt: invalid parameters");
  const std::size_t f_count = features.cols();

  // Canonical row order: lexicographic on (features..., target).
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    for (std::size_t f = 0; f < f_count; ++f)
      if (features(a, f) != features(b, f)) return features(a, f) < features(b, f);
    return targets[a] < targets[b];
  });
  Matrix x(n, f_count);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t f = 0; f < f_count; ++f) x(i, f) = features(order[i], f);
    y[i] = targets[order[i]];
  }

  std::vector<std::vector<std::size_t>> sorted(f_count, std::vector<std::size_t>(n));
  for (std::size_t f = 0; f < f_count; ++f) {
    std::iota(sorted[f].begin(), sorted[f].end(), std::size_t{0});
    std::stable_sort(sorted[f].begin(), sorted[f].end(),
                     [&](std::size_t a, std::size_t b) { return x(a, f) < x(b, f); });
  }

  GbtModel model;
  model.n_features = f_count;
  model.learning_rate = params.learning_rate;
  model.base_score = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);

  std::vector<double> pred(n, model.base_score), residual(n);
  std::vector<char> in_bag(n, 1);
  TreeBuilder builder(x, sorted, params);
  Rng rng(params.seed);
  const auto bag_size = static_cast<std::size_t>(std::ceil(params.subsample * static_cast<double>(n)));
  std::vector<std::size_t> perm(n);
  for (int t = 0; t < params.n_trees; ++t) {
    for (std::size_t i = 0; i < n; ++i) residual[i] = y[i] - pred[i];
    if (bag_size < n) {
      std::iota(perm.begin(), perm.end(), std::size_t{0});
      for (std::size_t i = 0; i < bag_size; ++i) std::swap(perm[i], perm[i + rng.below(n - i)]);
      std::fill(in_bag.begin(), in_bag.end(), 0);
      for (std::size_t i = 0; i < bag_size; ++i) in_bag[perm[i]] = 1;
    }
    auto tree = builder.build(residual, in_bag);
    for (std::size_t i = 0; i < n; ++i) pred[i] += params.learning_rate * tree.predict(x.row(i));
    model.trees.push_back(std::move(tree));
  }
  return model;
}

std::string gbt_to_json(const GbtModel& model) {
  json trees = json::array();
  for (const auto& t : model.trees) {
    json feature = json::array(), threshold = json::array(), left = json::array(),
         right = json::array(), value = json::array();
    for (const auto& n : t.nodes) {
      feature.push_back(n.feature);
      threshold.push_back(n.threshold);
      left.push_back(n.left);
      right.push_back(n.right);
      value.push_back(n.value);
    }
    trees.push_back({{"feature", feature},
                     {"threshold", threshold},
                     {"left", left},
                     {"right", right},
                     {"value", value}});
  }
  json j{{"n_features", model.n_features},
         {"base_score", model.base_score},
         {"learning_rate", model.learning_rate},
         {"trees", trees}};
  return j.dump(1) + "\n";
}

GbtModel gbt_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("predictor.json", 0, 0, e.what());
  }
  GbtModel m;
  m.n_features = j.at("n_features").get<std::size_t>();
  m.base_score = j.at("base_score").get<double>();
  m.learning_rate = j.at("learning_rate").get<double>();
  for (const auto& t : j.at("trees")) {
    RegressionTree tree;
    const auto& f = t.at("feature");
    for (std::size_t i = 0; i < f.size(); ++i) {
      TreeNode n;
      n.feature = f[i].get<int>();
      n.threshold = t.at("threshold")[i].get<double>();
      n.left = t.at("left")[i].get<int>();
      n.right = t.at("right")[i].get<int>();
      n.value = t.at("value")[i].get<double>();
      if (n.feature >= static_cast<int>(m.n_features) ||
          (n.feature >= 0 && (n.left <= 0 || n.right <= 0 ||
                              static_cast<std::size_t>(std::max(n.left, n.right)) >= f.size())))
        throw ValidationError("predictor.json: malformed tree");
      tree.nodes.push_back(n);
    }
    if (tree.nodes.empty()) throw ValidationError("predictor.json: empty tree");
    m.trees.push_back(std::move(tree));
  }
  return m;
}

}  // namespace elect
