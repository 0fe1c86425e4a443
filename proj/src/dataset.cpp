#include "drce/dataset.hpp"

#include <cmath>
#include <string>

#include "drce/errors.hpp"

namespace drce {

Dataset::Dataset(std::size_t covariate_dim, std::size_t response_dim,
                 std::vector<double> covariates, std::vector<double> responses)
    : covariate_dim_(covariate_dim),
      response_dim_(response_dim),
      covariates_(std::move(covariates)),
      responses_(std::move(responses)) {
  if (covariate_dim_ == 0 || response_dim_ == 0) {
    throw InputError("dataset dimensions must be positive");
  }
  if (covariates_.empty() || covariates_.size() % covariate_dim_ != 0) {
    throw InputError("covariate buffer size is not a multiple of the dimension");
  }
  size_ = covariates_.size() / covariate_dim_;
  if (responses_.size() != size_ * response_dim_) {
    throw InputError("response buffer does not match " +
                     std::to_string(size_) + " samples of dimension " +
                     std::to_string(response_dim_));
  }
  for (double v : covariates_) {
    if (!std::isfinite(v)) throw InputError("non-finite covariate entry");
  }
  for (double v : responses_) {
    if (!std::isfinite(v)) throw InputError("non-finite response entry");
  }
}

Dataset Dataset::without_row(std::size_t skip) const {
  if (skip >= size_) throw InputError("row index out of range");
  if (size_ < 2) throw InputError("cannot drop the only sample");
  std::vector<double> xs;
  std::vector<double> ys;
  xs.reserve((size_ - 1) * covariate_dim_);
  ys.reserve((size_ - 1) * response_dim_);
  for (std::size_t i = 0; i < size_; ++i) {
    if (i == skip) continue;
    auto x = covariate(i);
    auto y = response(i);
    xs.insert(xs.end(), x.begin(), x.end());
    ys.insert(ys.end(), y.begin(), y.end());
  }
  return Dataset(covariate_dim_, response_dim_, std::move(xs), std::move(ys));
}

}  // namespace drce
