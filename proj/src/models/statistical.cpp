#include "dpcipi/models/statistical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace dpcipi {

namespace {

struct Standardizer {
  double mean = 0.0;
  double scale = 1.0;

  explicit Standardizer(std::span<const double> x) {
    if (x.empty()) return;
    mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
    double var = 0.0;
    for (double v : x) var += (v - mean) * (v - mean);
    var /= static_cast<double>(x.size());
    scale = var > 0.0 ? std::sqrt(var) : 1.0;
  }
  double operator()(double v) const { return (v - mean) / scale; }
};

void check_inputs(std::span<const double> x, std::span<const std::size_t> y, std::size_t classes) {
  if (x.size() != y.size()) throw std::invalid_argument("feature and label counts differ");
  if (x.empty()) throw std::invalid_argument("cannot fit on an empty training set");
  for (auto label : y)
    if (label >= classes) throw std::out_of_range("label out of range");
}

double gini(const std::vector<double>& counts, double n) {
  if (n <= 0.0) return 0.0;
  double g = 1.0;
  for (double c : counts) g -= (c / n) * (c / n);
  return g;
}

}  // namespace

double gse_similarity(const SequenceEmbedding& reference, const SequenceEmbedding& test) {
  const Eigen::VectorXd p = gse_pool(reference), r = gse_pool(test);
  const double np = p.norm(), nr = r.norm();
  if (np == 0.0 || nr == 0.0) return 0.0;
  return p.dot(r) / (np * nr);
}

double logistic(double w, double b, double x) { return 1.0 / (1.0 + std::exp(-w * x - b)); }

LogisticModel fit_logistic(std::span<const double> x, std::span<const std::size_t> y, std::size_t classes,
                           const LogisticOptions& options) {
  check_inputs(x, y, classes);
  const Standardizer standardize(x);
  std::vector<double> z(x.size());
  std::transform(x.begin(), x.end(), z.begin(), standardize);
  const double n = static_cast<double>(x.size());

  LogisticModel m;
  m.classes = classes;
  const std::size_t targets = classes == 2 ? 1 : classes;
  for (std::size_t c = 0; c < targets; ++c) {
    const std::size_t positive = classes == 2 ? 1 : c;
    std::vector<double> t(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) t[i] = y[i] == positive ? 1.0 : 0.0;
    const double ones = std::accumulate(t.begin(), t.end(), 0.0);
    if (ones == 0.0 || ones == n) m.degenerate = true;

    double a = 0.0, bias = 0.0, prev = std::numeric_limits<double>::infinity(), loss = 0.0;
    std::size_t it = 0;
    for (; it < options.max_iterations; ++it) {
      double ga = 0.0, gb = 0.0;
      loss = 0.0;
      for (std::size_t i = 0; i < z.size(); ++i) {
        const double s = a * z[i] + bias;
        const double p = 1.0 / (1.0 + std::exp(-s));
        // log(1+e^s) - t*s, written to stay finite for large |s|
        loss += std::max(s, 0.0) + std::log1p(std::exp(-std::abs(s))) - t[i] * s;
        ga += (p - t[i]) * z[i];
        gb += p - t[i];
      }
      loss /= n;
      if (std::abs(prev - loss) < options.tolerance) break;
      prev = loss;
      a -= options.learning_rate * ga / n;
      bias -= options.learning_rate * gb / n;
    }
    m.iterations = std::max(m.iterations, it);
    m.final_loss += loss / static_cast<double>(targets);
    m.w.push_back(a / standardize.scale);
    m.b.push_back(bias - a * standardize.mean / standardize.scale);
  }
  return m;
}

Eigen::VectorXd predict_proba(const LogisticModel& m, double x) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(m.classes));
  if (m.classes == 2) {
    const double p = logistic(m.w[0], m.b[0], x);
    out << 1.0 - p, p;
    return out;
  }
  for (std::size_t c = 0; c < m.classes; ++c) out(static_cast<Eigen::Index>(c)) = logistic(m.w[c], m.b[c], x);
  const double total = out.sum();
  if (total > 0.0) return out / total;
  return Eigen::VectorXd::Constant(out.size(), 1.0 / static_cast<double>(m.classes));
}

PerceptronModel fit_perceptron(std::span<const double> x, std::span<const std::size_t> y,
                               std::size_t max_passes) {
  check_inputs(x, y, 2);
  const Standardizer standardize(x);
  double a = 0.0, c = 0.0;
  PerceptronModel m;
  for (m.passes = 0; m.passes < max_passes;) {
    ++m.passes;
    std::size_t mistakes = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double t = y[i] == 1 ? 1.0 : -1.0;
      const double z = standardize(x[i]);
      if (t * (a * z + c) <= 0.0) {
        a += t * z;
        c += t;
        ++mistakes;
      }
    }
    if (mistakes == 0) {
      m.converged = true;
      break;
    }
  }
  m.w = a / standardize.scale;
  m.b = c - a * standardize.mean / standardize.scale;
  return m;
}

std::size_t predict_class(const PerceptronModel& m, double x) { return m.w * x + m.b > 0.0 ? 1 : 0; }

std::size_t DecisionTree::depth() const {
  std::size_t d = 0;
  for (const auto& n : nodes) d = std::max(d, n.depth);
  return d;
}

std::size_t DecisionTree::leaf_count() const {
  return static_cast<std::size_t>(std::count_if(nodes.begin(), nodes.end(), [](const Node& n) { return n.leaf; }));
}

DecisionTree fit_tree(std::span<const double> x, std::span<const std::size_t> y, std::size_t classes,
                      std::size_t max_depth) {
  check_inputs(x, y, classes);
  DecisionTree tree;
  tree.classes = classes;

  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });

  // Samples of a node are a contiguous run of `order`, already sorted by x.
  auto build = [&](auto&& self, std::size_t lo, std::size_t hi, std::size_t depth) -> int {
    const int id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    std::vector<double> counts(classes, 0.0);
    for (std::size_t i = lo; i < hi; ++i) counts[y[order[i]]] += 1.0;
    const double n = static_cast<double>(hi - lo);
    tree.nodes[id].depth = depth;
    tree.nodes[id].distribution = counts;
    const double parent = gini(counts, n);
    if (depth >= max_depth || parent == 0.0 || hi - lo < 2) return id;

    std::vector<double> left(classes, 0.0);
    double best = parent - 1e-12;
    std::size_t best_cut = 0;
    for (std::size_t i = lo; i + 1 < hi; ++i) {
      left[y[order[i]]] += 1.0;
      if (x[order[i]] == x[order[i + 1]]) continue;
      const double nl = static_cast<double>(i + 1 - lo), nr = n - nl;
      std::vector<double> right(classes);
      for (std::size_t c = 0; c < classes; ++c) right[c] = counts[c] - left[c];
      const double impurity = (nl * gini(left, nl) + nr * gini(right, nr)) / n;
      if (impurity < best) {
        best = impurity;
        best_cut = i + 1;
      }
    }
    if (best_cut == 0) return id;

    const double threshold = 0.5 * (x[order[best_cut - 1]] + x[order[best_cut]]);
    const int l = self(self, lo, best_cut, depth + 1);
    const int r = self(self, best_cut, hi, depth + 1);
    auto& node = tree.nodes[id];
    node.leaf = false;
    node.threshold = threshold;
    node.left = l;
    node.right = r;
    return id;
  };
  build(build, 0, x.size(), 0);
  return tree;
}

Eigen::VectorXd predict_proba(const DecisionTree& tree, double x) {
  const DecisionTree::Node* node = &tree.nodes.at(0);
  while (!node->leaf) node = &tree.nodes[static_cast<std::size_t>(x <= node->threshold ? node->left : node->right)];
  Eigen::VectorXd p(static_cast<Eigen::Index>(tree.classes));
  double total = 0.0;
  for (double c : node->distribution) total += c;
  for (std::size_t c = 0; c < tree.classes; ++c) p(static_cast<Eigen::Index>(c)) = node->distribution[c] / total;
  return p;
}

nlohmann::ordered_json to_json(const LogisticModel& m) {
  return {{"classes", m.classes}, {"w", m.w}, {"b", m.b}, {"iterations", m.iterations},
          {"final_loss", m.final_loss}, {"degenerate", m.degenerate}};
}

nlohmann::ordered_json to_json(const PerceptronModel& m) {
  return {{"w", m.w}, {"b", m.b}, {"passes", m.passes}, {"converged", m.converged}};
}

nlohmann::ordered_json to_json(const DecisionTree& t) {
  nlohmann::ordered_json nodes = nlohmann::ordered_json::array();
  for (const auto& n : t.nodes)
    nodes.push_back({{"leaf", n.leaf}, {"threshold", n.threshold}, {"left", n.left}, {"right", n.right},
                     {"depth", n.depth}, {"distribution", n.distribution}});
  return {{"classes", t.classes}, {"nodes", nodes}};
}

LogisticModel logistic_from_json(const nlohmann::json& j) {
  LogisticModel m;
  m.classes = j.at("classes").get<std::size_t>();
  m.w = j.at("w").get<std::vector<double>>();
  m.b = j.at("b").get<std::vector<double>>();
  m.iterations = j.at("iterations").get<std::size_t>();
  m.final_loss = j.at("final_loss").get<double>();
  m.degenerate = j.at("degenerate").get<bool>();
  return m;
}

PerceptronModel perceptron_from_json(const nlohmann::json& j) {
  PerceptronModel m;
  m.w = j.at("w").get<double>();
  m.b = j.at("b").get<double>();
  m.passes = j.at("passes").get<std::size_t>();
  m.converged = j.at("converged").get<bool>();
  return m;
}

DecisionTree tree_from_json(const nlohmann::json& j) {
  DecisionTree t;
  t.classes = j.at("classes").get<std::size_t>();
  for (const auto& n : j.at("nodes")) {
    DecisionTree::Node node;
    node.leaf = n.at("leaf").get<bool>();
    node.threshold = n.at("threshold").get<double>();
    node.left = n.at("left").get<int>();
    node.right = n.at("right").get<int>();
    node.depth = n.at("depth").get<std::size_t>();
    node.distribution = n.at("distribution").get<std::vector<double>>();
    t.nodes.push_back(std::move(node));
  }
  return t;
}

}  // namespace dpcipi
