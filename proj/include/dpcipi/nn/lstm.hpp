#pragma once

#include <cstddef>

#include <Eigen/Dense>

namespace dpcipi::nn {

// Gate blocks are stacked in the order input, forget, cell, output.
struct LstmParams {
  Eigen::MatrixXd w_input;      // 4H x input_dim
  Eigen::MatrixXd w_recurrent;  // 4H x H
  Eigen::VectorXd bias;         // 4H
};

struct BiLstmParams {
  std::size_t input_dim = 0;
  std::size_t hidden_dim = 0;
  LstmParams forward;
  LstmParams backward;
};

enum class Pooling {
  final_state,  // [h_fwd(T-1); h_bwd(0)]
  mean,         // time average of [h_fwd(t); h_bwd(t)]
};

BiLstmParams make_bilstm(std::size_t input_dim, std::size_t hidden_dim);

// Per-direction activations kept for backpropagation, indexed by processing step.
struct LstmTrace {
  Eigen::MatrixXd gates;   // T x 4H, post-activation
  Eigen::MatrixXd cells;   // T x H
  Eigen::MatrixXd tanh_c;  // T x H
  Eigen::MatrixXd hidden;  // T x H
};

struct BiLstmTrace {
  LstmTrace forward;
  LstmTrace backward;
};

/// Encodes T x input_dim rows into a 2H vector. Zero rows encode to zeros.
Eigen::VectorXd bilstm_encode(const BiLstmParams& params, const Eigen::MatrixXd& rows,
                              Pooling pooling = Pooling::final_state);

Eigen::VectorXd bilstm_forward(const BiLstmParams& params, const Eigen::MatrixXd& rows, Pooling pooling,
                               BiLstmTrace& trace);

/// Accumulates into `grads` (same shapes as params). When d_rows is non-null it
/// receives dL/drows (T x input_dim).
void bilstm_backward(const BiLstmParams& params, const Eigen::MatrixXd& rows, const BiLstmTrace& trace,
                     Pooling pooling, const Eigen::VectorXd& d_out, BiLstmParams& grads,
                     Eigen::MatrixXd* d_rows);

}  // namespace dpcipi::nn
