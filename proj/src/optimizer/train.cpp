#include "meltpinn/optimizer/train.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numeric>
#include <random>

namespace meltpinn::opt {

double LrSchedule::rate(double base, int epoch, int epochs) const {
  if (kind == LrScheduleKind::Constant) return base;
  const int period = std::max(1, static_cast<int>(std::lround(period_fraction * epochs)));
  return base * std::pow(factor, epoch / period);
}

void TrainConfig::validate() const {
  require(epochs > 0, "train.epochs must be positive");
  require(counts.interior > 0, "train.interior_points must be positive");
  require(counts.traction >= 0 && counts.flux >= 0 && counts.dirichlet >= 0 && counts.contact >= 0,
          "train boundary point counts must be non-negative");
  require(interior_pool >= 0, "train.interior_pool must be non-negative");
  require(checkpoint_interval >= 0, "train.checkpoint_interval must be non-negative");
  weights.validate();
  adam.validate();
  schedule.validate();
  if (focus) require(focus->fraction >= 0.0 && focus->fraction < 1.0, "train.focus.fraction must lie in [0, 1)");
}

std::string checkpoint_path(const std::string& dir, int epoch) {
  char name[32];
  std::snprintf(name, sizeof name, "epoch_%06d.ckpt", epoch);
  return (std::filesystem::path(dir) / name).string();
}

TrainResult train(const loss::PinnProblem& problem, nn::NetworkParams<double> net, const TrainConfig& config,
                  const EpochCallback& on_epoch) {
  config.validate();
  problem.validate();
  net.validate();
  require(net.input_dim() == problem.box.input_dim(), "network input size does not match the problem");
  require(net.output_dim() == problem.outputs, "network output size does not match the problem");
  const bool write = !config.checkpoint_dir.empty();
  if (write) std::filesystem::create_directories(config.checkpoint_dir);

  loss::CollocationBatch batch =
      loss::sample_collocation(problem, config.counts, loss::mix_seed(config.seed, 0), config.sampling, config.focus);
  Eigen::MatrixXd pool;
  if (config.interior_pool > 0) {
    pool = loss::sample_interior(problem, config.interior_pool, loss::mix_seed(config.seed, 1), config.sampling,
                                 config.focus);
    if (pool.cols() <= config.counts.interior) batch.interior = pool;
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(pool.cols()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  AdamState state = AdamState::zeros_like(net, config.adam);
  TrainResult result;
  result.history.reserve(config.epochs);

  auto diverge = [&](const std::string& why, int epoch) {
    if (write) nn::save_checkpoint(net, (std::filesystem::path(config.checkpoint_dir) / "last_good.ckpt").string());
    throw DivergenceError("training diverged at epoch " + std::to_string(epoch) + ": " + why, epoch);
  };

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    if (pool.cols() > config.counts.interior) {
      std::mt19937_64 rng(loss::mix_seed(config.seed, static_cast<std::uint64_t>(epoch) + 1));
      const int n = config.counts.interior;
      for (int i = 0; i < n; ++i) {
        std::uniform_int_distribution<Eigen::Index> pick(i, pool.cols() - 1);
        std::swap(order[i], order[pick(rng)]);
      }
      batch.interior.resize(pool.rows(), n);
      for (int i = 0; i < n; ++i) batch.interior.col(i) = pool.col(order[i]);
    } else if (epoch > 0 && pool.cols() == 0) {
      batch.interior = loss::sample_interior(problem, config.counts.interior,
                                             loss::mix_seed(config.seed, static_cast<std::uint64_t>(epoch) + 1),
                                             config.sampling, config.focus);
    }
    HistoryRow row;
    row.epoch = epoch;
    row.lr = config.schedule.rate(config.adam.lr, epoch, config.epochs);
    nn::NetworkParams<double> grad;
    row.loss = loss::evaluate_loss(net, problem, batch, config.weights, config.bc_mode, &grad);
    if (!std::isfinite(row.loss.total)) diverge("total loss is not finite", epoch);
    if (config.track_bc_mismatch)
      row.bc_mismatch = loss::soft_bc_loss(net, problem, config.bc_mode, batch.dirichlet_points);

    nn::NetworkParams<double> next = net;
    try {
      adam_step(next, grad, state, row.lr);
    } catch (const NumericalError& e) {
      diverge(e.what(), epoch);
    }
    if (!next.weights.back().allFinite()) diverge("parameters are not finite", epoch);
    net = std::move(next);

    result.history.push_back(row);
    if (on_epoch) on_epoch(row);
    if (write && config.checkpoint_interval > 0 && (epoch + 1) % config.checkpoint_interval == 0)
      nn::save_checkpoint(net, checkpoint_path(config.checkpoint_dir, epoch + 1));
  }
  result.params = std::move(net);
  return result;
}

}  // namespace meltpinn::opt
