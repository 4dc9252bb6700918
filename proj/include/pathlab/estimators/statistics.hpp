#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace pathlab::estimators {

// Pairwise (tree) summation: the result depends only on the order of the
// inputs, not on how the work was split between threads.
double pairwise_sum(std::span<const double> x);

struct Estimate {
  double value = 0.0;
  double se = 0.0;
};

/* Per-path samples: row i holds the p quantities assembled from path i.
   Means, covariances and delta-method errors are all computed from this
   table, so every derived quantity shares the same paths. */
class SampleTable {
 public:
  SampleTable() = default;
  SampleTable(std::size_t rows, int cols);

  std::size_t rows() const { return rows_; }
  int cols() const { return cols_; }
  double* row(std::size_t i) { return data_.data() + i * cols_; }
  const double* row(std::size_t i) const { return data_.data() + i * cols_; }
  double operator()(std::size_t i, int c) const { return data_[i * cols_ + c]; }

  // Keep only the rows flagged true (order preserved).
  void compact(const std::vector<char>& keep);

  std::vector<double> column(int c) const;
  Eigen::VectorXd means() const;
  Eigen::MatrixXd covariance() const;

  Estimate mean(int c) const;
  // g applied to the column means; error by the delta method with a
  // central-difference gradient of g.
  Estimate delta(const std::function<double(const Eigen::VectorXd&)>& g) const;

 private:
  std::size_t rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

}  // namespace pathlab::estimators
