#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "dpcipi/embed.hpp"

namespace dpcipi {

/// Cosine similarity of the pooled (mean) embeddings; 0 if either is the zero vector.
double gse_similarity(const SequenceEmbedding& reference, const SequenceEmbedding& test);

double logistic(double w, double b, double x);

// Scalar-feature logistic regression. Binary tasks hold one (w,b); multilevel
// tasks hold one one-vs-rest (w,b) per class.
struct LogisticModel {
  std::size_t classes = 2;
  std::vector<double> w;
  std::vector<double> b;
  std::size_t iterations = 0;
  double final_loss = 0.0;
  bool degenerate = false;  // some one-vs-rest target had a single label value
};

struct LogisticOptions {
  double learning_rate = 1.0;  // on the standardized feature
  double tolerance = 1e-9;
  std::size_t max_iterations = 10000;
};

LogisticModel fit_logistic(std::span<const double> x, std::span<const std::size_t> y, std::size_t classes,
                           const LogisticOptions& options = {});
Eigen::VectorXd predict_proba(const LogisticModel& m, double x);

// Classic perceptron on one scalar feature; predicts class 1 when w*x+b > 0.
struct PerceptronModel {
  double w = 0.0;
  double b = 0.0;
  std::size_t passes = 0;
  bool converged = false;
};

PerceptronModel fit_perceptron(std::span<const double> x, std::span<const std::size_t> y,
                               std::size_t max_passes = 1000);
std::size_t predict_class(const PerceptronModel& m, double x);

// CART with Gini impurity on a single scalar feature; x <= threshold goes left.
struct DecisionTree {
  struct Node {
    bool leaf = true;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    std::size_t depth = 0;
    std::vector<double> distribution;  // class frequencies of the training samples at this node
  };
  std::size_t classes = 2;
  std::vector<Node> nodes;  // nodes[0] is the root

  std::size_t depth() const;
  std::size_t leaf_count() const;
};

DecisionTree fit_tree(std::span<const double> x, std::span<const std::size_t> y, std::size_t classes,
                      std::size_t max_depth = 5);
Eigen::VectorXd predict_proba(const DecisionTree& tree, double x);

nlohmann::ordered_json to_json(const LogisticModel& m);
nlohmann::ordered_json to_json(const PerceptronModel& m);
nlohmann::ordered_json to_json(const DecisionTree& t);
LogisticModel logistic_from_json(const nlohmann::json& j);
PerceptronModel perceptron_from_json(const nlohmann::json& j);
DecisionTree tree_from_json(const nlohmann::json& j);

}  // namespace dpcipi
