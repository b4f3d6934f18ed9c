#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "netcage/gp/gp.hpp"

namespace netcage::nargp {

/// Hyperparameters of one autoregressive level t >= 2. The k_f amplitude is
/// fixed to 1, so the free kernel count is 2d + 3 (noise excluded).
struct NargpHyperparams {
  gp::SeArd<double> rho;
  double f_weight = 1.0;
  gp::SeArd<double> delta;
  double noise_var = 1e-6;

  Index base_dim() const { return rho.input_dim(); }
  Index free_param_count() const { return 2 * base_dim() + 3; }
  gp::NargpKernel<double> kernel() const { return {rho, f_weight, delta}; }
};

/// Recursive multifidelity model. levels[0] is a plain SE-ARD GP over x;
/// levels[t] (t >= 1) is a GP over (x, posterior mean of level t-1), and
/// stores the augmented training inputs it was conditioned on.
struct NargpModel {
  std::vector<gp::GpModel> levels;
  Index input_dim = 0;

  Index num_levels() const { return static_cast<Index>(levels.size()); }
  /// `level` is 1-based and must be >= 2.
  NargpHyperparams hyperparams(Index level) const;
};

struct NestedReport {
  bool surrogate_mode = false;
  std::string note;
};

/// Confirms every level's inputs are a subset of the level below, comparing in
/// the level-1 standardized space with tolerance `tolerance`. Throws LevelOrder
/// if `level` fields are not 1..s, EmptyLevel for a level with fewer than two
/// rows and NestedViolation naming the offending rows. In surrogate mode the
/// subset check is skipped because the lower level is evaluable anywhere.
NestedReport validate_nested(std::span<const gp::FidelityDataset> datasets, bool surrogate_mode = false,
                             double tolerance = 1e-9);

struct NargpConfig {
  gp::FitOptions fit;
  bool surrogate_lower_level = false;
};

/// Appends the lower-level posterior mean as an extra input column.
Matrix augment(const Matrix& X, const Vector& lower_mean);

/// Trains level 1 on datasets[0] and each higher level on augmented inputs,
/// strictly in order.
NargpModel fit_nargp(std::span<const gp::FidelityDataset> datasets, const NargpConfig& config = {});

/// Same recursion with an already-trained lowest level (surrogate mode):
/// `higher` holds the datasets for levels 2..s.
NargpModel fit_nargp_on(gp::GpModel lowest, std::span<const gp::FidelityDataset> higher,
                        const NargpConfig& config = {});

enum class Propagation { MeanPropagation, MonteCarlo };

struct PredictOptions {
  Propagation mode = Propagation::MeanPropagation;
  int samples = 100;
  std::uint64_t seed = 0;
};

/// Mean propagation feeds each level's posterior mean upward and reports the
/// top level's conditional variance. Monte Carlo draws `samples` level-1
/// posterior samples per query point and reports the empirical moments.
gp::Prediction predict_nargp(const NargpModel& model, const Matrix& X_star, const PredictOptions& options = {});

/// Monte Carlo propagation from given level-1 posterior moments.
gp::Prediction propagate_samples(const NargpModel& model, const Matrix& X_star, const Vector& level1_mean,
                                 const Vector& level1_variance, int samples, std::uint64_t seed);

/// Writes levels 2..s; the lowest level is stored by its owner and passed
/// back in on reading.
void write_upper_levels(ByteWriter& out, const NargpModel& model);
NargpModel read_upper_levels(ByteReader& in, gp::GpModel lowest);

}  // namespace netcage::nargp
