#include "dpcipi/nn/lstm.hpp"

#include <stdexcept>
#include <string>

namespace dpcipi::nn {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

LstmParams make_cell(std::size_t input_dim, std::size_t hidden_dim) {
  const auto h4 = static_cast<Index>(4 * hidden_dim);
  return {MatrixXd::Zero(h4, static_cast<Index>(input_dim)),
          MatrixXd::Zero(h4, static_cast<Index>(hidden_dim)), VectorXd::Zero(h4)};
}

// Runs one direction. Step s consumes rows[reverse ? T-1-s : s].
void run_cell(const LstmParams& p, const MatrixXd& rows, bool reverse, LstmTrace& tr) {
  const Index T = rows.rows();
  const Index H = p.w_recurrent.cols();
  const MatrixXd projected = rows * p.w_input.transpose();  // T x 4H
  tr.gates.resize(T, 4 * H);
  tr.cells.resize(T, H);
  tr.tanh_c.resize(T, H);
  tr.hidden.resize(T, H);

  VectorXd h = VectorXd::Zero(H), c = VectorXd::Zero(H), z(4 * H);
  for (Index s = 0; s < T; ++s) {
    const Index t = reverse ? T - 1 - s : s;
    z.noalias() = projected.row(t).transpose() + p.bias;
    z.noalias() += p.w_recurrent * h;
    for (Index j = 0; j < H; ++j) {
      const double ig = sigmoid(z(j));
      const double fg = sigmoid(z(H + j));
      const double gg = std::tanh(z(2 * H + j));
      const double og = sigmoid(z(3 * H + j));
      c(j) = fg * c(j) + ig * gg;
      const double tc = std::tanh(c(j));
      h(j) = og * tc;
      tr.gates(s, j) = ig;
      tr.gates(s, H + j) = fg;
      tr.gates(s, 2 * H + j) = gg;
      tr.gates(s, 3 * H + j) = og;
      tr.tanh_c(s, j) = tc;
    }
    tr.cells.row(s) = c.transpose();
    tr.hidden.row(s) = h.transpose();
  }
}

// dh_ext holds dL/dh for every processing step.
void backprop_cell(const LstmParams& p, const MatrixXd& rows, bool reverse, const LstmTrace& tr,
                   const MatrixXd& dh_ext, LstmParams& g, MatrixXd* d_rows) {
  const Index T = rows.rows();
  const Index H = p.w_recurrent.cols();
  MatrixXd dz_all(T, 4 * H);
  VectorXd dh_next = VectorXd::Zero(H), dc_next = VectorXd::Zero(H), dz(4 * H);

  for (Index s = T - 1; s >= 0; --s) {
    for (Index j = 0; j < H; ++j) {
      const double ig = tr.gates(s, j), fg = tr.gates(s, H + j);
      const double gg = tr.gates(s, 2 * H + j), og = tr.gates(s, 3 * H + j);
      const double tc = tr.tanh_c(s, j);
      const double c_prev = s > 0 ? tr.cells(s - 1, j) : 0.0;
      const double dh = dh_ext(s, j) + dh_next(j);
      const double dc = dc_next(j) + dh * og * (1.0 - tc * tc);
      dz(j) = dc * gg * ig * (1.0 - ig);
      dz(H + j) = dc * c_prev * fg * (1.0 - fg);
      dz(2 * H + j) = dc * ig * (1.0 - gg * gg);
      dz(3 * H + j) = dh * tc * og * (1.0 - og);
      dc_next(j) = dc * fg;
    }
    dz_all.row(s) = dz.transpose();
    g.bias += dz;
    if (s > 0) g.w_recurrent.noalias() += dz * tr.hidden.row(s - 1);
    dh_next.noalias() = p.w_recurrent.transpose() * dz;
  }

  // Reorder steps back to row order for the input-side products.
  MatrixXd dz_rows(T, 4 * H);
  for (Index s = 0; s < T; ++s) dz_rows.row(reverse ? T - 1 - s : s) = dz_all.row(s);
  g.w_input.noalias() += dz_rows.transpose() * rows;
  if (d_rows) d_rows->noalias() += dz_rows * p.w_input;
}

void check_input(const BiLstmParams& params, const MatrixXd& rows) {
  if (rows.rows() > 0 && static_cast<std::size_t>(rows.cols()) != params.input_dim)
    throw std::invalid_argument("BiLSTM expects input dim " + std::to_string(params.input_dim) + ", got " +
                                std::to_string(rows.cols()));
}

}  // namespace

BiLstmParams make_bilstm(std::size_t input_dim, std::size_t hidden_dim) {
  return {input_dim, hidden_dim, make_cell(input_dim, hidden_dim), make_cell(input_dim, hidden_dim)};
}

Eigen::VectorXd bilstm_encode(const BiLstmParams& params, const Eigen::MatrixXd& rows, Pooling pooling) {
  BiLstmTrace trace;
  return bilstm_forward(params, rows, pooling, trace);
}

Eigen::VectorXd bilstm_forward(const BiLstmParams& params, const Eigen::MatrixXd& rows, Pooling pooling,
                               BiLstmTrace& trace) {
  check_input(params, rows);
  const auto H = static_cast<Index>(params.hidden_dim);
  VectorXd out = VectorXd::Zero(2 * H);
  const Index T = rows.rows();
  if (T == 0) return out;

  run_cell(params.forward, rows, false, trace.forward);
  run_cell(params.backward, rows, true, trace.backward);
  if (pooling == Pooling::final_state) {
    out.head(H) = trace.forward.hidden.row(T - 1).transpose();
    out.tail(H) = trace.backward.hidden.row(T - 1).transpose();
  } else {
    out.head(H) = trace.forward.hidden.colwise().mean().transpose();
    out.tail(H) = trace.backward.hidden.colwise().mean().transpose();
  }
  return out;
}

void bilstm_backward(const BiLstmParams& params, const Eigen::MatrixXd& rows, const BiLstmTrace& trace,
                     Pooling pooling, const Eigen::VectorXd& d_out, BiLstmParams& grads,
                     Eigen::MatrixXd* d_rows) {
  const Index T = rows.rows();
  const auto H = static_cast<Index>(params.hidden_dim);
  if (d_rows) *d_rows = MatrixXd::Zero(T, static_cast<Index>(params.input_dim));
  if (T == 0) return;

  MatrixXd dh_fwd = MatrixXd::Zero(T, H), dh_bwd = MatrixXd::Zero(T, H);
  if (pooling == Pooling::final_state) {
    dh_fwd.row(T - 1) = d_out.head(H).transpose();
    dh_bwd.row(T - 1) = d_out.tail(H).transpose();
  } else {
    const double inv = 1.0 / static_cast<double>(T);
    dh_fwd.rowwise() = d_out.head(H).transpose() * inv;
    dh_bwd.rowwise() = d_out.tail(H).transpose() * inv;
  }
  backprop_cell(params.forward, rows, false, trace.forward, dh_fwd, grads.forward, d_rows);
  backprop_cell(params.backward, rows, true, trace.backward, dh_bwd, grads.backward, d_rows);
}

}  // namespace dpcipi::nn
