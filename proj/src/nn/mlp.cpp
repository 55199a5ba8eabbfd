#include "dpcipi/nn/mlp.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dpcipi::nn {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

MlpParams make_mlp(std::size_t input_dim, std::size_t hidden, std::size_t classes) {
  return {MatrixXd::Zero(static_cast<Index>(hidden), static_cast<Index>(input_dim)),
          VectorXd::Zero(static_cast<Index>(hidden)),
          MatrixXd::Zero(static_cast<Index>(classes), static_cast<Index>(hidden)),
          VectorXd::Zero(static_cast<Index>(classes))};
}

VectorXd softmax(const VectorXd& logits) {
  const double top = logits.maxCoeff();
  VectorXd e = (logits.array() - top).exp();
  return e / e.sum();
}

VectorXd mlp_forward(const MlpParams& params, const VectorXd& q, MlpTrace& trace) {
  if (static_cast<std::size_t>(q.size()) != params.input_dim())
    throw std::invalid_argument("MLP expects input dim " + std::to_string(params.input_dim()) + ", got " +
                                std::to_string(q.size()));
  trace.input = q;
  trace.hidden = (params.w_hidden * q + params.b_hidden).cwiseMax(0.0);
  trace.probs = softmax(params.w_out * trace.hidden + params.b_out);
  return trace.probs;
}

VectorXd mlp_classify(const MlpParams& params, const VectorXd& q) {
  MlpTrace trace;
  return mlp_forward(params, q, trace);
}

VectorXd mlp_backward(const MlpParams& params, const MlpTrace& trace, std::size_t label, MlpParams& grads) {
  VectorXd d_logits = trace.probs;
  d_logits(static_cast<Index>(label)) -= 1.0;
  grads.w_out.noalias() += d_logits * trace.hidden.transpose();
  grads.b_out += d_logits;
  VectorXd d_hidden = params.w_out.transpose() * d_logits;
  for (Index j = 0; j < d_hidden.size(); ++j)
    if (trace.hidden(j) <= 0.0) d_hidden(j) = 0.0;
  grads.w_hidden.noalias() += d_hidden * trace.input.transpose();
  grads.b_hidden += d_hidden;
  return params.w_hidden.transpose() * d_hidden;
}

double cross_entropy(const VectorXd& probs, std::size_t label) {
  if (label >= static_cast<std::size_t>(probs.size()))
    throw std::out_of_range("label " + std::to_string(label) + " out of range for " +
                            std::to_string(probs.size()) + " classes");
  return -std::log(probs(static_cast<Index>(label)));
}

VectorXd mii(const VectorXd& p, const VectorXd& r) {
  if (p.size() != r.size())
    throw std::invalid_argument("mii operands differ in length: " + std::to_string(p.size()) + " vs " +
                                std::to_string(r.size()));
  const Index n = p.size();
  VectorXd q(4 * n);
  q.segment(0, n) = p;
  q.segment(n, n) = p.cwiseProduct(r);
  q.segment(2 * n, n) = p - r;
  q.segment(3 * n, n) = r;
  return q;
}

void mii_backward(const VectorXd& p, const VectorXd& r, const VectorXd& dq, VectorXd& dp, VectorXd& dr) {
  const Index n = p.size();
  dp = dq.segment(0, n) + dq.segment(n, n).cwiseProduct(r) + dq.segment(2 * n, n);
  dr = dq.segment(3 * n, n) + dq.segment(n, n).cwiseProduct(p) - dq.segment(2 * n, n);
}

}  // namespace dpcipi::nn
