#include "femmir/scorer.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "femmir/errors.hpp"
#include "femmir/util.hpp"

namespace femmir {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

MatrixXd relu(const MatrixXd& z) { return z.cwiseMax(0.0); }

MatrixXd relu_mask(const MatrixXd& z) {
  return (z.array() > 0.0).cast<double>().matrix();
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

void xavier(MatrixXd& w, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
  for (Eigen::Index j = 0; j < w.cols(); ++j) {
    for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, j) = rng.uniform(-bound, bound);
  }
}

// Intermediate values of one graph's forward pass.
struct GraphPass {
  std::vector<MatrixXd> inputs;  // aggregate * H_{l-1}, per layer
  std::vector<MatrixXd> pre;     // Z_l
  MatrixXd nodes;                // H_L
  VectorXd mean;
  VectorXd context;
  VectorXd attention;
  VectorXd pooled;
};

GraphPass forward_graph(const ScorerGraph& g, const ScorerModel& m) {
  GraphPass p;
  MatrixXd h = g.features;
  for (int l = 0; l < m.dims.layers; ++l) {
    p.inputs.push_back(g.aggregate * h);
    MatrixXd z = p.inputs.back() * m.layer_weight[l].transpose();
    z.rowwise() += m.layer_bias[l].transpose();
    h = relu(z);
    p.pre.push_back(std::move(z));
  }
  p.nodes = std::move(h);
  const double n = static_cast<double>(p.nodes.rows());
  p.mean = p.nodes.colwise().sum().transpose() / n;
  p.context = (m.context * p.mean).array().tanh().matrix();
  p.attention = (p.nodes * p.context).unaryExpr([](double x) { return logistic(x); });
  p.pooled = p.nodes.transpose() * p.attention;
  return p;
}

void backward_graph(const ScorerGraph& g, const GraphPass& p, const VectorXd& d_pooled,
                    const ScorerModel& m, ScorerModel& grad) {
  const double n = static_cast<double>(p.nodes.rows());
  MatrixXd d_nodes = p.attention * d_pooled.transpose();
  VectorXd d_att = p.nodes * d_pooled;
  VectorXd d_att_pre = d_att.array() * p.attention.array() * (1.0 - p.attention.array());
  d_nodes += d_att_pre * p.context.transpose();
  VectorXd d_context = p.nodes.transpose() * d_att_pre;
  VectorXd d_context_pre = d_context.array() * (1.0 - p.context.array().square());
  grad.context += d_context_pre * p.mean.transpose();
  VectorXd d_mean = m.context.transpose() * d_context_pre;
  d_nodes.rowwise() += d_mean.transpose() / n;

  MatrixXd d_h = std::move(d_nodes);
  for (int l = m.dims.layers - 1; l >= 0; --l) {
    MatrixXd d_z = d_h.cwiseProduct(relu_mask(p.pre[l]));
    grad.layer_weight[l] += d_z.transpose() * p.inputs[l];
    grad.layer_bias[l] += d_z.colwise().sum().transpose();
    if (l > 0) d_h = g.aggregate.transpose() * (d_z * m.layer_weight[l]);
  }
}

struct HeadPass {
  VectorXd joined;
  VectorXd score_pre;
  VectorXd score;
  VectorXd hidden_pre;
  VectorXd hidden;
  double out = 0.0;
};

HeadPass forward_head(const VectorXd& hq, const VectorXd& hc, const ScorerModel& m) {
  HeadPass p;
  const int k = m.dims.slices;
  p.joined.resize(hq.size() + hc.size());
  p.joined << hq, hc;
  p.score_pre = m.tensor_linear * p.joined + m.tensor_bias;
  for (int s = 0; s < k; ++s) p.score_pre(s) += hq.dot(m.tensor[s] * hc);
  p.score = p.score_pre.cwiseMax(0.0);
  p.hidden_pre = m.mlp_weight * p.score + m.mlp_bias;
  p.hidden = p.hidden_pre.cwiseMax(0.0);
  p.out = logistic((m.out_weight * p.hidden)(0) + m.out_bias(0));
  return p;
}

}  // namespace

// ---------------------------------------------------------------------------

ScorerModel ScorerModel::init(const ScorerDims& dims, std::uint64_t seed) {
  if (dims.hash_dim <= 0 || dims.hidden <= 0 || dims.layers <= 0 || dims.slices <= 0 ||
      dims.mlp_hidden <= 0) {
    throw std::invalid_argument("scorer dimensions must be positive");
  }
  ScorerModel m;
  m.dims = dims;
  m.seed = seed;
  Rng rng(seed);
  for (int l = 0; l < dims.layers; ++l) {
    MatrixXd w(dims.hidden, l == 0 ? dims.hash_dim : dims.hidden);
    xavier(w, rng);
    m.layer_weight.push_back(std::move(w));
    m.layer_bias.push_back(VectorXd::Constant(dims.hidden, 0.01));
  }
  m.context.resize(dims.hidden, dims.hidden);
  xavier(m.context, rng);
  for (int s = 0; s < dims.slices; ++s) {
    MatrixXd w(dims.hidden, dims.hidden);
    xavier(w, rng);
    m.tensor.push_back(std::move(w));
  }
  m.tensor_linear.resize(dims.slices, 2 * dims.hidden);
  xavier(m.tensor_linear, rng);
  m.tensor_bias = VectorXd::Constant(dims.slices, 0.01);
  m.mlp_weight.resize(dims.mlp_hidden, dims.slices);
  xavier(m.mlp_weight, rng);
  m.mlp_bias = VectorXd::Constant(dims.mlp_hidden, 0.01);
  m.out_weight.resize(1, dims.mlp_hidden);
  xavier(m.out_weight, rng);
  m.out_bias = VectorXd::Zero(1);
  return m;
}

ScorerModel ScorerModel::zeros_like() const {
  ScorerModel z = *this;
  z.visit([](const std::string&, double* data, Eigen::Index rows, Eigen::Index cols) {
    std::fill(data, data + rows * cols, 0.0);
  });
  return z;
}

void ScorerModel::visit(const Visitor& fn) {
  for (std::size_t l = 0; l < layer_weight.size(); ++l) {
    auto& w = layer_weight[l];
    fn("layer" + std::to_string(l) + ".weight", w.data(), w.rows(), w.cols());
    auto& b = layer_bias[l];
    fn("layer" + std::to_string(l) + ".bias", b.data(), b.rows(), 1);
  }
  fn("context.weight", context.data(), context.rows(), context.cols());
  for (std::size_t s = 0; s < tensor.size(); ++s) {
    fn("tensor" + std::to_string(s) + ".weight", tensor[s].data(), tensor[s].rows(),
       tensor[s].cols());
  }
  fn("tensor.linear", tensor_linear.data(), tensor_linear.rows(), tensor_linear.cols());
  fn("tensor.bias", tensor_bias.data(), tensor_bias.rows(), 1);
  fn("mlp.weight", mlp_weight.data(), mlp_weight.rows(), mlp_weight.cols());
  fn("mlp.bias", mlp_bias.data(), mlp_bias.rows(), 1);
  fn("out.weight", out_weight.data(), out_weight.rows(), out_weight.cols());
  fn("out.bias", out_bias.data(), out_bias.rows(), 1);
}

void ScorerModel::visit(const Visitor& fn) const { const_cast<ScorerModel*>(this)->visit(fn); }

std::size_t ScorerModel::parameter_count() const {
  std::size_t n = 0;
  visit([&](const std::string&, double*, Eigen::Index r, Eigen::Index c) {
    n += static_cast<std::size_t>(r * c);
  });
  return n;
}

ScorerGraph prepare_graph(const Harg& g, int hash_dim) {
  const auto n = static_cast<Eigen::Index>(g.nodes.size());
  ScorerGraph out;
  out.features = MatrixXd::Zero(n, hash_dim);
  out.aggregate = MatrixXd::Identity(n, n);

  std::vector<std::string> incoming(g.nodes.size());
  for (const auto& e : g.edges) {
    if (g.nodes[e.to].parent == e.from && incoming[e.to].empty()) incoming[e.to] = e.label;
    if (e.from != e.to) {
      out.aggregate(e.from, e.to) = 1.0;
      out.aggregate(e.to, e.from) = 1.0;
    }
  }
  for (Eigen::Index v = 0; v < n; ++v) {
    // two signed hash slots per node: "incoming-edge-label:node-label"
    const std::string key = incoming[v] + ":" + to_lower(g.nodes[v].label);
    for (int k = 0; k < 2; ++k) {
      const std::uint64_t h = fnv1a(key + (k == 0 ? "" : "#1"));
      const double sign = (h >> 63) ? -1.0 : 1.0;
      out.features(v, static_cast<Eigen::Index>(h % static_cast<std::uint64_t>(hash_dim))) +=
          sign;
    }
  }
  for (Eigen::Index v = 0; v < n; ++v) out.aggregate.row(v) /= out.aggregate.row(v).sum();
  return out;
}

Eigen::MatrixXd encode_nodes(const ScorerGraph& g, const ScorerModel& m) {
  return forward_graph(g, m).nodes;
}

Eigen::MatrixXd encode_nodes(const Harg& g, const ScorerModel& m) {
  return encode_nodes(prepare_graph(g, m.dims.hash_dim), m);
}

Eigen::VectorXd pool_graph(const Eigen::MatrixXd& node_vectors, const ScorerModel& m) {
  if (node_vectors.rows() == 0) throw std::invalid_argument("pool_graph: no nodes");
  const double n = static_cast<double>(node_vectors.rows());
  VectorXd mean = node_vectors.colwise().sum().transpose() / n;
  VectorXd c = (m.context * mean).array().tanh().matrix();
  VectorXd a = (node_vectors * c).unaryExpr([](double x) { return logistic(x); });
  return node_vectors.transpose() * a;
}

Eigen::VectorXd ntn_interaction(const Eigen::VectorXd& hq, const Eigen::VectorXd& hc,
                                const ScorerModel& m) {
  return forward_head(hq, hc, m).score;
}

double predict_similarity(const ScorerGraph& query, const ScorerGraph& candidate,
                          const ScorerModel& m) {
  auto q = forward_graph(query, m);
  auto c = forward_graph(candidate, m);
  return forward_head(q.pooled, c.pooled, m).out;
}

double predict_similarity(const Harg& query, const Harg& candidate, const ScorerModel& m) {
  return predict_similarity(prepare_graph(query, m.dims.hash_dim),
                            prepare_graph(candidate, m.dims.hash_dim), m);
}

double pair_loss(const ScorerGraph& query, const ScorerGraph& candidate, double target,
                 const ScorerModel& m, ScorerModel* grad, double weight) {
  const auto q = forward_graph(query, m);
  const auto c = forward_graph(candidate, m);
  const auto h = forward_head(q.pooled, c.pooled, m);
  const double err = h.out - target;
  if (!grad) return err * err;

  ScorerModel& g = *grad;
  const double d_out_pre = weight * 2.0 * err * h.out * (1.0 - h.out);
  g.out_weight += d_out_pre * h.hidden.transpose();
  g.out_bias(0) += d_out_pre;
  VectorXd d_hidden = d_out_pre * m.out_weight.row(0).transpose();
  VectorXd d_hidden_pre = d_hidden.cwiseProduct(relu_mask(h.hidden_pre));
  g.mlp_weight += d_hidden_pre * h.score.transpose();
  g.mlp_bias += d_hidden_pre;
  VectorXd d_score = m.mlp_weight.transpose() * d_hidden_pre;
  VectorXd d_score_pre = d_score.cwiseProduct(relu_mask(h.score_pre));

  g.tensor_linear += d_score_pre * h.joined.transpose();
  g.tensor_bias += d_score_pre;
  VectorXd d_joined = m.tensor_linear.transpose() * d_score_pre;
  const auto dim = q.pooled.size();
  VectorXd d_q = d_joined.head(dim);
  VectorXd d_c = d_joined.tail(dim);
  for (int s = 0; s < m.dims.slices; ++s) {
    const double ds = d_score_pre(s);
    if (ds == 0.0) continue;
    g.tensor[s] += ds * q.pooled * c.pooled.transpose();
    d_q += ds * (m.tensor[s] * c.pooled);
    d_c += ds * (m.tensor[s].transpose() * q.pooled);
  }
  backward_graph(query, q, d_q, m, g);
  backward_graph(candidate, c, d_c, m, g);
  return err * err;
}

double mean_loss(const std::vector<ScorerGraph>& graphs, const std::vector<TrainingPair>& pairs,
                 const ScorerModel& m) {
  if (pairs.empty()) return 0.0;
  double total = 0.0;
  for (const auto& p : pairs) {
    total += pair_loss(graphs.at(p.query), graphs.at(p.candidate), p.sim, m, nullptr);
  }
  return total / static_cast<double>(pairs.size());
}

ScorerModel train(const std::vector<ScorerGraph>& graphs, const std::vector<TrainingPair>& pairs,
                  const TrainConfig& cfg, ScorerModel model, TrainReport* report) {
  if (pairs.empty()) throw std::invalid_argument("train: no training pairs");
  if (!(cfg.learning_rate >= 0.0)) throw std::invalid_argument("train: learning rate < 0");
  if (cfg.batch_size <= 0 || cfg.epochs < 0) throw std::invalid_argument("train: bad schedule");
  for (const auto& p : pairs) {
    if (!(p.sim > 0.0 && p.sim <= 1.0) && p.sim != 0.0) {
      throw std::invalid_argument("train: similarity labels must lie in [0, 1]");
    }
  }

  constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kEps = 1e-8;
  ScorerModel first = model.zeros_like();
  ScorerModel second = model.zeros_like();
  Rng rng(cfg.seed);
  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), 0);

  TrainReport local;
  local.initial_loss = mean_loss(graphs, pairs, model);
  long step = 0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(order);
    double epoch_total = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
      const double weight = 1.0 / static_cast<double>(stop - start);
      ScorerModel grad = model.zeros_like();
      for (std::size_t k = start; k < stop; ++k) {
        const auto& p = pairs[order[k]];
        epoch_total +=
            pair_loss(graphs.at(p.query), graphs.at(p.candidate), p.sim, model, &grad, weight);
      }
      if (!std::isfinite(epoch_total)) {
        throw std::runtime_error("train: non-finite loss at epoch " + std::to_string(epoch));
      }
      ++step;
      const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(step));
      const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(step));
      // walk the four structures in lockstep; visit order is fixed
      std::vector<double*> params, grads, m1, m2;
      std::vector<Eigen::Index> sizes;
      model.visit([&](const std::string&, double* d, Eigen::Index r, Eigen::Index c) {
        params.push_back(d);
        sizes.push_back(r * c);
      });
      grad.visit([&](const std::string&, double* d, Eigen::Index, Eigen::Index) {
        grads.push_back(d);
      });
      first.visit([&](const std::string&, double* d, Eigen::Index, Eigen::Index) {
        m1.push_back(d);
      });
      second.visit([&](const std::string&, double* d, Eigen::Index, Eigen::Index) {
        m2.push_back(d);
      });
      for (std::size_t b = 0; b < params.size(); ++b) {
        for (Eigen::Index i = 0; i < sizes[b]; ++i) {
          const double gi = grads[b][i];
          m1[b][i] = kBeta1 * m1[b][i] + (1.0 - kBeta1) * gi;
          m2[b][i] = kBeta2 * m2[b][i] + (1.0 - kBeta2) * gi * gi;
          params[b][i] -=
              cfg.learning_rate * (m1[b][i] / c1) / (std::sqrt(m2[b][i] / c2) + kEps);
        }
      }
    }
    local.epoch_loss.push_back(epoch_total / static_cast<double>(pairs.size()));
  }
  local.final_loss = mean_loss(graphs, pairs, model);
  if (!std::isfinite(local.final_loss)) throw std::runtime_error("train: non-finite final loss");
  if (report) *report = std::move(local);
  return model;
}

ScorerModel train(const std::vector<ScorerGraph>& graphs, const std::vector<TrainingPair>& pairs,
                  const TrainConfig& cfg, const ScorerDims& dims, TrainReport* report) {
  return train(graphs, pairs, cfg, ScorerModel::init(dims, cfg.seed), report);
}

// ---------------------------------------------------------------------------

nlohmann::ordered_json model_to_json(const ScorerModel& m) {
  nlohmann::ordered_json j;
  j["format"] = "femmir-scorer";
  j["version"] = 1;
  j["seed"] = m.seed;
  j["dims"] = {{"hash_dim", m.dims.hash_dim},
               {"hidden", m.dims.hidden},
               {"layers", m.dims.layers},
               {"slices", m.dims.slices},
               {"mlp_hidden", m.dims.mlp_hidden}};
  j["params"] = nlohmann::ordered_json::object();
  m.visit([&](const std::string& name, double* data, Eigen::Index rows, Eigen::Index cols) {
    nlohmann::ordered_json p;
    p["shape"] = {rows, cols};
    // row-major in the file
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(rows * cols));
    for (Eigen::Index i = 0; i < rows; ++i) {
      for (Eigen::Index k = 0; k < cols; ++k) values.push_back(data[k * rows + i]);
    }
    p["data"] = std::move(values);
    j["params"][name] = std::move(p);
  });
  return j;
}

ScorerModel model_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != "femmir-scorer") {
      throw DataError("model: unexpected format tag");
    }
    ScorerDims dims;
    const auto& d = j.at("dims");
    dims.hash_dim = d.at("hash_dim").get<int>();
    dims.hidden = d.at("hidden").get<int>();
    dims.layers = d.at("layers").get<int>();
    dims.slices = d.at("slices").get<int>();
    dims.mlp_hidden = d.at("mlp_hidden").get<int>();
    ScorerModel m = ScorerModel::init(dims, j.at("seed").get<std::uint64_t>());
    const auto& params = j.at("params");
    std::size_t seen = 0;
    m.visit([&](const std::string& name, double* data, Eigen::Index rows, Eigen::Index cols) {
      const auto& p = params.at(name);
      const auto shape = p.at("shape").get<std::vector<Eigen::Index>>();
      if (shape.size() != 2 || shape[0] != rows || shape[1] != cols) {
        throw DataError("model: parameter '" + name + "' has the wrong shape");
      }
      const auto values = p.at("data").get<std::vector<double>>();
      if (static_cast<Eigen::Index>(values.size()) != rows * cols) {
        throw DataError("model: parameter '" + name + "' has the wrong element count");
      }
      for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index k = 0; k < cols; ++k) data[k * rows + i] = values[i * cols + k];
      }
      ++seen;
    });
    if (seen != params.size()) throw DataError("model: unexpected extra parameters");
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("model: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("model: ") + e.what());
  }
}

void save_model(const ScorerModel& m, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write model '" + path.string() + "'");
  out << model_to_json(m).dump(1) << '\n';
}

ScorerModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open model '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(buf.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError("model '" + path.string() + "': malformed JSON: " + e.what());
  }
  return model_from_json(j);
}

}  // namespace femmir
