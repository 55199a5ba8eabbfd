#include "dpcipi/nn/network.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <random>
#include <stdexcept>
#include <thread>
#include <utility>

namespace dpcipi::nn {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

std::string_view to_string(Fusion f) {
  switch (f) {
    case Fusion::mii: return "mii";
    case Fusion::concat: return "concat";
    case Fusion::joint: return "joint";
    case Fusion::pooled: return "pooled";
  }
  return "?";
}

Fusion fusion_from_string(std::string_view s) {
  if (s == "mii") return Fusion::mii;
  if (s == "concat") return Fusion::concat;
  if (s == "joint") return Fusion::joint;
  if (s == "pooled") return Fusion::pooled;
  throw std::invalid_argument("unknown fusion '" + std::string(s) + "'");
}

std::string_view to_string(Pooling p) { return p == Pooling::final_state ? "final" : "mean"; }

Pooling pooling_from_string(std::string_view s) {
  if (s == "final") return Pooling::final_state;
  if (s == "mean") return Pooling::mean;
  throw std::invalid_argument("unknown pooling '" + std::string(s) + "'");
}

std::size_t head_input_dim(const NetworkSpec& spec) {
  switch (spec.fusion) {
    case Fusion::mii: return 4 * 2 * spec.hidden_dim;
    case Fusion::concat: return 2 * 2 * spec.hidden_dim;
    case Fusion::joint: return 2 * spec.hidden_dim;
    case Fusion::pooled: return 2 * spec.input_dim;
  }
  return 0;
}

Network make_network(const NetworkSpec& spec, std::size_t vocabulary) {
  if (spec.classes < 2) throw std::invalid_argument("network needs at least two classes");
  Network net;
  net.spec = spec;
  if (spec.fusion != Fusion::pooled) net.encoder = make_bilstm(spec.input_dim, spec.hidden_dim);
  net.head = make_mlp(head_input_dim(spec), spec.mlp_hidden, spec.classes);
  if (spec.train_embeddings)
    net.embedding = RowMatrix::Zero(static_cast<Index>(vocabulary), static_cast<Index>(spec.input_dim));
  return net;
}

Network zeros_like(const Network& net) {
  Network z = net;
  for (auto& t : tensors(z)) std::fill(t.values.begin(), t.values.end(), 0.0);
  return z;
}

namespace {

template <class Tensor>
void fill_uniform(Tensor& t, double bound, std::mt19937_64& rng) {
  double* p = t.data();
  for (Index i = 0; i < t.size(); ++i) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    p[i] = bound * (2.0 * u - 1.0);
  }
}

template <class NetT, class View>
std::vector<View> collect(NetT& net) {
  std::vector<View> out;
  auto add = [&](std::string name, auto& tensor) {
    if (tensor.size() == 0) return;
    out.push_back({std::move(name), {tensor.data(), static_cast<std::size_t>(tensor.size())}});
  };
  add("encoder.forward.w_input", net.encoder.forward.w_input);
  add("encoder.forward.w_recurrent", net.encoder.forward.w_recurrent);
  add("encoder.forward.bias", net.encoder.forward.bias);
  add("encoder.backward.w_input", net.encoder.backward.w_input);
  add("encoder.backward.w_recurrent", net.encoder.backward.w_recurrent);
  add("encoder.backward.bias", net.encoder.backward.bias);
  add("head.w_hidden", net.head.w_hidden);
  add("head.b_hidden", net.head.b_hidden);
  add("head.w_out", net.head.w_out);
  add("head.b_out", net.head.b_out);
  add("embedding", net.embedding);
  return out;
}

// Rows of one strain, from the trainable copy when there is one.
const MatrixXd& rows_for(const Network& net, const EmbeddingPlan& plan, const SequenceEmbedding& frozen,
                         MatrixXd& scratch) {
  if (!net.spec.train_embeddings) return frozen.rows;
  scratch = materialize(net.embedding, plan).rows;
  return scratch;
}

void scatter_rows(const EmbeddingPlan& plan, const MatrixXd& d_rows, RowMatrix& d_embedding) {
  for (std::size_t i = 0; i < plan.rows.size(); ++i)
    for (const auto& [idx, weight] : plan.rows[i].terms)
      d_embedding.row(static_cast<Index>(idx)) += weight * d_rows.row(static_cast<Index>(i));
}

VectorXd mean_rows(const MatrixXd& rows, std::size_t dim) {
  if (rows.rows() == 0) return VectorXd::Zero(static_cast<Index>(dim));
  return rows.colwise().mean().transpose();
}

MatrixXd stack(const MatrixXd& a, const MatrixXd& b, Index cols) {
  MatrixXd out(a.rows() + b.rows(), cols);
  if (a.rows()) out.topRows(a.rows()) = a;
  if (b.rows()) out.bottomRows(b.rows()) = b;
  return out;
}

struct ForwardState {
  MatrixXd ref_scratch, test_scratch, joint_rows;
  BiLstmTrace ref_trace, test_trace;
  VectorXd p, r;
  MlpTrace head;
};

VectorXd run_forward(const Network& net, const PairExample& ex, ForwardState& st) {
  const auto& spec = net.spec;
  const MatrixXd& ref = rows_for(net, ex.reference_plan, ex.reference, st.ref_scratch);
  const MatrixXd& test = rows_for(net, ex.test_plan, ex.test, st.test_scratch);
  const auto dim = static_cast<Index>(spec.input_dim);
  for (const MatrixXd* m : {&ref, &test})
    if (m->rows() > 0 && m->cols() != dim)
      throw std::invalid_argument("example embedding dim " + std::to_string(m->cols()) +
                                  " does not match network input dim " + std::to_string(dim));
  VectorXd q;
  switch (spec.fusion) {
    case Fusion::mii:
    case Fusion::concat:
      st.p = bilstm_forward(net.encoder, ref, spec.pooling, st.ref_trace);
      st.r = bilstm_forward(net.encoder, test, spec.pooling, st.test_trace);
      if (spec.fusion == Fusion::mii) {
        q = mii(st.p, st.r);
      } else {
        q.resize(st.p.size() + st.r.size());
        q << st.p, st.r;
      }
      break;
    case Fusion::joint:
      st.joint_rows = stack(ref, test, dim);
      q = bilstm_forward(net.encoder, st.joint_rows, spec.pooling, st.ref_trace);
      break;
    case Fusion::pooled:
      st.p = mean_rows(ref, spec.input_dim);
      st.r = mean_rows(test, spec.input_dim);
      q.resize(st.p.size() + st.r.size());
      q << st.p, st.r;
      break;
  }
  return mlp_forward(net.head, q, st.head);
}

}  // namespace

void initialize(Network& net, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  if (net.spec.fusion != Fusion::pooled) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(net.spec.hidden_dim));
    for (LstmParams* cell : {&net.encoder.forward, &net.encoder.backward}) {
      fill_uniform(cell->w_input, bound, rng);
      fill_uniform(cell->w_recurrent, bound, rng);
      fill_uniform(cell->bias, bound, rng);
    }
  }
  const double b1 = 1.0 / std::sqrt(static_cast<double>(net.head.input_dim()));
  fill_uniform(net.head.w_hidden, b1, rng);
  fill_uniform(net.head.b_hidden, b1, rng);
  const double b2 = 1.0 / std::sqrt(static_cast<double>(net.spec.mlp_hidden));
  fill_uniform(net.head.w_out, b2, rng);
  fill_uniform(net.head.b_out, b2, rng);
}

std::vector<TensorView> tensors(Network& net) { return collect<Network, TensorView>(net); }

std::vector<ConstTensorView> tensors(const Network& net) {
  return collect<const Network, ConstTensorView>(net);
}

std::size_t parameter_count(const Network& net) {
  std::size_t n = 0;
  for (const auto& t : tensors(net)) n += t.values.size();
  return n;
}

PairExample make_example(const EmbeddingTable& table, const KmerSequence& reference, const KmerSequence& test,
                         std::size_t label) {
  PairExample ex;
  ex.reference_plan = plan_embedding(table, reference);
  ex.test_plan = plan_embedding(table, test);
  ex.reference = materialize(table.vectors(), ex.reference_plan);
  ex.test = materialize(table.vectors(), ex.test_plan);
  ex.label = label;
  return ex;
}

VectorXd forward(const Network& net, const PairExample& example) {
  ForwardState st;
  return run_forward(net, example, st);
}

double accumulate_gradients(const Network& net, const PairExample& ex, Network& grads) {
  if (ex.label >= net.spec.classes)
    throw std::out_of_range("label " + std::to_string(ex.label) + " out of range for " +
                            std::to_string(net.spec.classes) + " classes");
  ForwardState st;
  const VectorXd probs = run_forward(net, ex, st);
  const double loss = cross_entropy(probs, ex.label);
  const VectorXd dq = mlp_backward(net.head, st.head, ex.label, grads.head);

  const auto& spec = net.spec;
  const bool want_rows = spec.train_embeddings;
  MatrixXd d_ref, d_test;
  const MatrixXd& ref = spec.train_embeddings ? st.ref_scratch : ex.reference.rows;
  const MatrixXd& test = spec.train_embeddings ? st.test_scratch : ex.test.rows;
  const auto H = static_cast<Index>(spec.hidden_dim);

  switch (spec.fusion) {
    case Fusion::mii:
    case Fusion::concat: {
      VectorXd dp, dr;
      if (spec.fusion == Fusion::mii) {
        mii_backward(st.p, st.r, dq, dp, dr);
      } else {
        dp = dq.head(2 * H);
        dr = dq.tail(2 * H);
      }
      bilstm_backward(net.encoder, ref, st.ref_trace, spec.pooling, dp, grads.encoder,
                      want_rows ? &d_ref : nullptr);
      bilstm_backward(net.encoder, test, st.test_trace, spec.pooling, dr, grads.encoder,
                      want_rows ? &d_test : nullptr);
      break;
    }
    case Fusion::joint: {
      MatrixXd d_joint;
      bilstm_backward(net.encoder, st.joint_rows, st.ref_trace, spec.pooling, dq, grads.encoder,
                      want_rows ? &d_joint : nullptr);
      if (want_rows) {
        d_ref = d_joint.topRows(ref.rows());
        d_test = d_joint.bottomRows(test.rows());
      }
      break;
    }
    case Fusion::pooled:
      if (want_rows) {
        const auto D = static_cast<Index>(spec.input_dim);
        d_ref = MatrixXd::Zero(ref.rows(), D);
        d_test = MatrixXd::Zero(test.rows(), D);
        if (ref.rows()) d_ref.rowwise() = dq.head(D).transpose() / static_cast<double>(ref.rows());
        if (test.rows()) d_test.rowwise() = dq.tail(D).transpose() / static_cast<double>(test.rows());
      }
      break;
  }
  if (want_rows) {
    scatter_rows(ex.reference_plan, d_ref, grads.embedding);
    scatter_rows(ex.test_plan, d_test, grads.embedding);
  }
  return loss;
}

double backward(const Network& net, std::span<const PairExample> batch, Network& grads, std::size_t threads) {
  std::vector<const PairExample*> ptrs;
  ptrs.reserve(batch.size());
  for (const auto& ex : batch) ptrs.push_back(&ex);
  return backward(net, std::span<const PairExample* const>(ptrs), grads, threads);
}

double backward(const Network& net, std::span<const PairExample* const> batch, Network& grads,
                std::size_t threads) {
  grads = zeros_like(net);
  if (batch.empty()) return 0.0;
  const std::size_t n = batch.size();
  std::vector<Network> partial(n, grads);
  std::vector<double> losses(n, 0.0);

  auto work = [&](std::size_t first) {
    for (std::size_t i = first; i < n; i += std::max<std::size_t>(threads, 1))
      losses[i] = accumulate_gradients(net, *batch[i], partial[i]);
  };
  threads = std::clamp<std::size_t>(threads, 1, n);
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    for (std::size_t w = 0; w < threads; ++w)
      pool.emplace_back([&, w] {
        try {
          work(w);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    for (auto& t : pool) t.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  double total = 0.0;
  auto dst = tensors(grads);
  for (std::size_t i = 0; i < n; ++i) {
    total += losses[i];
    auto src = tensors(std::as_const(partial[i]));
    for (std::size_t t = 0; t < dst.size(); ++t)
      for (std::size_t j = 0; j < dst[t].values.size(); ++j) dst[t].values[j] += src[t].values[j];
  }
  return total;
}

}  // namespace dpcipi::nn
