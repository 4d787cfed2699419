#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "meltpinn/errors.hpp"
#include "meltpinn/loss/loss.hpp"
#include "meltpinn/loss/sampling.hpp"
#include "meltpinn/optimizer/adam.hpp"

namespace meltpinn::opt {

enum class LrScheduleKind { Constant, StepDecay };

struct LrSchedule {
  LrScheduleKind kind = LrScheduleKind::StepDecay;
  double factor = 0.5;          // multiplier per decay step
  double period_fraction = 0.25;  // decay every this fraction of the epochs

  void validate() const {
    require(factor > 0.0 && factor <= 1.0, "schedule.factor must lie in (0, 1]");
    require(period_fraction > 0.0 && period_fraction <= 1.0, "schedule.period_fraction must lie in (0, 1]");
  }
  double rate(double base, int epoch, int epochs) const;
};

struct TrainConfig {
  int epochs = 1000;
  loss::CollocationCounts counts{1000, 0, 0, 0, 0};
  std::uint64_t seed = 0;
  loss::LossWeights weights;
  loss::BcMode bc_mode = loss::BcMode::Hard;
  loss::SamplingStrategy sampling = loss::SamplingStrategy::LatinHypercube;
  std::optional<loss::FocusRegion> focus;
  // > 0: interior points come from a fixed pool of this size, and each epoch
  // uses a random subset of counts.interior of them (all of them if the pool
  // is smaller). 0: a fresh interior batch every epoch.
  int interior_pool = 0;
  AdamConfig adam;
  LrSchedule schedule;
  int checkpoint_interval = 0;  // 0: no periodic checkpoints
  std::string checkpoint_dir;   // empty: nothing written to disk
  // Also evaluate the Dirichlet mismatch on the fixed boundary points each epoch.
  bool track_bc_mismatch = false;

  void validate() const;
};

struct HistoryRow {
  int epoch = 0;
  loss::LossValues loss;
  double lr = 0.0;
  double bc_mismatch = 0.0;
};

struct TrainResult {
  nn::NetworkParams<double> params;
  std::vector<HistoryRow> history;
};

// Raised when the total loss or a gradient stops being finite.
class DivergenceError : public NumericalError {
 public:
  DivergenceError(const std::string& what, int epoch) : NumericalError(what), epoch_(epoch) {}
  int epoch() const noexcept { return epoch_; }

 private:
  int epoch_;
};

using EpochCallback = std::function<void(const HistoryRow&)>;

// One epoch is one Adam step on a freshly drawn interior batch; boundary,
// contact and label sets are drawn once. On divergence the last finite
// parameters are written to <checkpoint_dir>/last_good.ckpt and
// DivergenceError is thrown.
TrainResult train(const loss::PinnProblem& problem, nn::NetworkParams<double> net, const TrainConfig& config,
                  const EpochCallback& on_epoch = {});

std::string checkpoint_path(const std::string& dir, int epoch);

}  // namespace meltpinn::opt
