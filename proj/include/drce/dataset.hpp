#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace drce {

/// Labeled sample set: N covariate rows in R^n paired with N response rows in
/// R^m, stored row-major. Every sample carries uniform empirical weight 1/N.
class Dataset {
public:
  /// Validates shapes and finiteness; throws InputError on violation.
  Dataset(std::size_t covariate_dim, std::size_t response_dim,
          std::vector<double> covariates, std::vector<double> responses);

  std::size_t size() const noexcept { return size_; }
  std::size_t covariate_dim() const noexcept { return covariate_dim_; }
  std::size_t response_dim() const noexcept { return response_dim_; }

  std::span<const double> covariate(std::size_t i) const {
    return {covariates_.data() + i * covariate_dim_, covariate_dim_};
  }
  std::span<const double> response(std::size_t i) const {
    return {responses_.data() + i * response_dim_, response_dim_};
  }

  /// Scalar response shortcut; valid only when response_dim() == 1.
  double response_scalar(std::size_t i) const { return responses_[i]; }

  const std::vector<double>& covariates() const noexcept { return covariates_; }
  const std::vector<double>& responses() const noexcept { return responses_; }

  /// Copy with row `skip` removed; used by leave-one-out cross validation.
  Dataset without_row(std::size_t skip) const;

private:
  std::size_t size_ = 0;
  std::size_t covariate_dim_ = 0;
  std::size_t response_dim_ = 0;
  std::vector<double> covariates_;
  std::vector<double> responses_;
};

}  // namespace drce
