#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"

#include "femmir/harg.hpp"

namespace femmir {

struct ScorerDims {
  int hash_dim = 32;
  int hidden = 16;
  int layers = 3;
  int slices = 8;      // NTN interaction scores
  int mlp_hidden = 8;

  bool operator==(const ScorerDims&) const = default;
};

/// Parameters of the graph-pair similarity regressor:
/// node aggregation layers -> attention pooling -> tensor interaction -> MLP.
struct ScorerModel {
  ScorerDims dims;
  std::uint64_t seed = 0;

  std::vector<Eigen::MatrixXd> layer_weight;  // [hidden x in]
  std::vector<Eigen::VectorXd> layer_bias;
  Eigen::MatrixXd context;                    // [hidden x hidden]
  std::vector<Eigen::MatrixXd> tensor;        // slices x [hidden x hidden]
  Eigen::MatrixXd tensor_linear;              // [slices x 2*hidden]
  Eigen::VectorXd tensor_bias;                // [slices]
  Eigen::MatrixXd mlp_weight;                 // [mlp_hidden x slices]
  Eigen::VectorXd mlp_bias;                   // [mlp_hidden]
  Eigen::MatrixXd out_weight;                 // [1 x mlp_hidden]
  Eigen::VectorXd out_bias;                   // [1]

  /// Xavier-uniform weights from `seed`, small positive biases.
  static ScorerModel init(const ScorerDims& dims, std::uint64_t seed);
  /// Same shapes, all zeros (gradient accumulator).
  ScorerModel zeros_like() const;

  using Visitor =
      std::function<void(const std::string& name, double* data, Eigen::Index rows,
                         Eigen::Index cols)>;
  /// Visits every parameter block (column-major storage) under a stable
  /// name such as "layer0.weight", always in the same order.
  void visit(const Visitor& fn);
  void visit(const Visitor& fn) const;
  std::size_t parameter_count() const;
};

/// Scorer-side view of a HARG: hashed initial features and the row-normalised
/// neighbourhood matrix (self loop included, edge direction ignored).
struct ScorerGraph {
  Eigen::MatrixXd features;    // [nodes x hash_dim]
  Eigen::MatrixXd aggregate;   // [nodes x nodes]
};

ScorerGraph prepare_graph(const Harg& g, int hash_dim);

/// Node vectors after the aggregation layers, one row per HARG node.
Eigen::MatrixXd encode_nodes(const Harg& g, const ScorerModel& m);
Eigen::MatrixXd encode_nodes(const ScorerGraph& g, const ScorerModel& m);
/// Context-attention pooling of node vectors (one per row).
Eigen::VectorXd pool_graph(const Eigen::MatrixXd& node_vectors, const ScorerModel& m);
Eigen::VectorXd ntn_interaction(const Eigen::VectorXd& hq, const Eigen::VectorXd& hc,
                                const ScorerModel& m);
double predict_similarity(const Harg& query, const Harg& candidate, const ScorerModel& m);
double predict_similarity(const ScorerGraph& query, const ScorerGraph& candidate,
                          const ScorerModel& m);

/// Squared error of one pair; adds d(loss)/d(param) * weight into `grad`
/// when non-null.
double pair_loss(const ScorerGraph& query, const ScorerGraph& candidate, double target,
                 const ScorerModel& m, ScorerModel* grad, double weight = 1.0);

struct TrainConfig {
  double learning_rate = 0.01;
  int epochs = 100;
  int batch_size = 32;
  std::uint64_t seed = 1;
};

struct TrainingPair {
  std::size_t query;      // index into the graph list
  std::size_t candidate;
  double sim;
};

struct TrainReport {
  double initial_loss = 0.0;
  double final_loss = 0.0;
  std::vector<double> epoch_loss;  // mean loss after each epoch
};

double mean_loss(const std::vector<ScorerGraph>& graphs, const std::vector<TrainingPair>& pairs,
                 const ScorerModel& m);

/// Mean-squared-error training with Adam, mini-batches shuffled by
/// `cfg.seed`. Throws std::runtime_error on a non-finite loss.
ScorerModel train(const std::vector<ScorerGraph>& graphs, const std::vector<TrainingPair>& pairs,
                  const TrainConfig& cfg, ScorerModel model, TrainReport* report = nullptr);
ScorerModel train(const std::vector<ScorerGraph>& graphs, const std::vector<TrainingPair>& pairs,
                  const TrainConfig& cfg, const ScorerDims& dims = {},
                  TrainReport* report = nullptr);

nlohmann::ordered_json model_to_json(const ScorerModel& m);
ScorerModel model_from_json(const nlohmann::json& j);
void save_model(const ScorerModel& m, const std::filesystem::path& path);
ScorerModel load_model(const std::filesystem::path& path);

}  // namespace femmir
