#include "pathlab/estimators/statistics.hpp"

#include <cmath>
#include <stdexcept>

namespace pathlab::estimators {

double pairwise_sum(std::span<const double> x) {
  if (x.size() <= 64) {
    double s = 0.0;
    for (double v : x) s += v;
    return s;
  }
  const std::size_t h = x.size() / 2;
  return pairwise_sum(x.first(h)) + pairwise_sum(x.subspan(h));
}

SampleTable::SampleTable(std::size_t rows, int cols)
    : rows_(rows), cols_(cols), data_(rows * static_cast<std::size_t>(cols), 0.0) {}

void SampleTable::compact(const std::vector<char>& keep) {
  std::size_t out = 0;
  for (std::size_t i = 0; i < rows_; ++i) {
    if (!keep[i]) continue;
    if (out != i)
      std::copy(data_.begin() + i * cols_, data_.begin() + (i + 1) * cols_, data_.begin() + out * cols_);
    ++out;
  }
  rows_ = out;
  data_.resize(rows_ * cols_);
}

std::vector<double> SampleTable::column(int c) const {
  std::vector<double> v(rows_);
  for (std::size_t i = 0; i < rows_; ++i) v[i] = data_[i * cols_ + c];
  return v;
}

Eigen::VectorXd SampleTable::means() const {
  Eigen::VectorXd m(cols_);
  for (int c = 0; c < cols_; ++c) m[c] = pairwise_sum(column(c)) / static_cast<double>(rows_);
  return m;
}

Eigen::MatrixXd SampleTable::covariance() const {
  if (rows_ < 2) throw std::invalid_argument("need at least two samples");
  const Eigen::VectorXd mu = means();
  std::vector<std::vector<double>> centred(cols_);
  for (int c = 0; c < cols_; ++c) {
    centred[c] = column(c);
    for (double& x : centred[c]) x -= mu[c];
  }
  Eigen::MatrixXd cov(cols_, cols_);
  std::vector<double> prod(rows_);
  for (int a = 0; a < cols_; ++a)
    for (int b = a; b < cols_; ++b) {
      for (std::size_t i = 0; i < rows_; ++i) prod[i] = centred[a][i] * centred[b][i];
      cov(a, b) = cov(b, a) = pairwise_sum(prod) / static_cast<double>(rows_ - 1);
    }
  return cov;
}

Estimate SampleTable::mean(int c) const {
  if (rows_ < 2) throw std::invalid_argument("need at least two samples");
  std::vector<double> x = column(c);
  const double mu = pairwise_sum(x) / static_cast<double>(rows_);
  for (double& v : x) v = (v - mu) * (v - mu);
  const double var = pairwise_sum(x) / static_cast<double>(rows_ - 1);
  return {mu, std::sqrt(var / static_cast<double>(rows_))};
}

Estimate SampleTable::delta(const std::function<double(const Eigen::VectorXd&)>& g) const {
  if (rows_ < 2) throw std::invalid_argument("need at least two samples");
  const Eigen::VectorXd mu = means();
  const double value = g(mu);
  // Influence values psi_i = grad g . (x_i - mu); only columns g depends on
  // contribute.
  Eigen::VectorXd grad(cols_);
  for (int c = 0; c < cols_; ++c) {
    const double h = 1e-6 * (1.0 + std::abs(mu[c]));
    Eigen::VectorXd up = mu, dn = mu;
    up[c] += h;
    dn[c] -= h;
    grad[c] = (g(up) - g(dn)) / (2.0 * h);
  }
  std::vector<double> psi(rows_);
  for (std::size_t i = 0; i < rows_; ++i) {
    double s = 0.0;
    for (int c = 0; c < cols_; ++c)
      if (grad[c] != 0.0) s += grad[c] * (data_[i * cols_ + c] - mu[c]);
    psi[i] = s;
  }
  const double pm = pairwise_sum(psi) / static_cast<double>(rows_);
  for (double& v : psi) v = (v - pm) * (v - pm);
  const double var = pairwise_sum(psi) / static_cast<double>(rows_ - 1);
  return {value, std::sqrt(var / static_cast<double>(rows_))};
}

}  // namespace pathlab::estimators
