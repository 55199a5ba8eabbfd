#pragma once

#include <cstddef>

#include <Eigen/Dense>

namespace dpcipi::nn {

// input -> ReLU hidden layer -> linear logits -> softmax.
struct MlpParams {
  Eigen::MatrixXd w_hidden;  // hidden x input
  Eigen::VectorXd b_hidden;
  Eigen::MatrixXd w_out;     // classes x hidden
  Eigen::VectorXd b_out;

  std::size_t input_dim() const { return static_cast<std::size_t>(w_hidden.cols()); }
  std::size_t classes() const { return static_cast<std::size_t>(w_out.rows()); }
};

MlpParams make_mlp(std::size_t input_dim, std::size_t hidden, std::size_t classes);

struct MlpTrace {
  Eigen::VectorXd input;
  Eigen::VectorXd hidden;  // post-ReLU
  Eigen::VectorXd probs;
};

Eigen::VectorXd softmax(const Eigen::VectorXd& logits);

Eigen::VectorXd mlp_classify(const MlpParams& params, const Eigen::VectorXd& q);
Eigen::VectorXd mlp_forward(const MlpParams& params, const Eigen::VectorXd& q, MlpTrace& trace);

/// Backpropagates -log(probs[label]) and accumulates into grads; returns dL/dq.
Eigen::VectorXd mlp_backward(const MlpParams& params, const MlpTrace& trace, std::size_t label,
                             MlpParams& grads);

double cross_entropy(const Eigen::VectorXd& probs, std::size_t label);

/// q = [p; p*r; p-r; r]
Eigen::VectorXd mii(const Eigen::VectorXd& p, const Eigen::VectorXd& r);
void mii_backward(const Eigen::VectorXd& p, const Eigen::VectorXd& r, const Eigen::VectorXd& dq,
                  Eigen::VectorXd& dp, Eigen::VectorXd& dr);

}  // namespace dpcipi::nn
