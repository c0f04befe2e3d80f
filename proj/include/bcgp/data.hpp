#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <variant>

namespace bcgp {

/// Validated series: strictly increasing timestamps, finite values.
class TimeSeries {
 public:
  TimeSeries() = default;
  TimeSeries(Eigen::VectorXd times, Eigen::VectorXd values);

  const Eigen::VectorXd& times() const noexcept { return times_; }
  const Eigen::VectorXd& values() const noexcept { return values_; }
  Eigen::Index size() const noexcept { return times_.size(); }
  bool empty() const noexcept { return times_.size() == 0; }

 private:
  Eigen::VectorXd times_;
  Eigen::VectorXd values_;
};

/// Reads a headed CSV. Rows with missing or unparsable entries in the chosen
/// columns raise DataError naming the row (1-based, header = row 1).
TimeSeries load_csv(const std::string& path, const std::string& time_column,
                    const std::string& value_column);

/// Train on `train_count` points drawn from [window_start, window_end];
/// reconstruct the rest of the window; forecast everything after window_end.
struct ReconstructForecast {
  double window_start = 0.0;
  double window_end = 0.0;
  long train_count = 0;
};

/// Train on a random subset (count, or fraction of the series when count is
/// zero); test on the complement. No forecast set.
struct RandomFraction {
  long train_count = 0;
  double fraction = 0.0;
};

struct SplitSpec {
  std::variant<ReconstructForecast, RandomFraction> mode;
  std::uint64_t seed = 0;
};

struct Split {
  TimeSeries train;
  TimeSeries reconstruct;
  TimeSeries forecast;
};

Split split(const TimeSeries& series, const SplitSpec& spec);

struct Scores {
  double mae = 0.0;
  double mse = 0.0;
  double nlpd = 0.0;
};

/// MAE and MSE of the point predictions; NLPD = -mean(log_densities).
Scores score(const Eigen::VectorXd& y_true, const Eigen::VectorXd& y_point,
             const Eigen::VectorXd& log_densities);

}  // namespace bcgp
