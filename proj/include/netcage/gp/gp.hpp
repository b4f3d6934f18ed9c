#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "netcage/core/archive.hpp"
#include "netcage/gp/kernel.hpp"

namespace netcage::gp {

/// Input/output pairs observed at one fidelity level.
struct FidelityDataset {
  int level = 1;
  Matrix inputs;   // n x d
  Vector outputs;  // n
  std::vector<std::string> input_names;
  std::vector<std::string> input_units;
  std::string output_name;
  std::string output_unit;

  Index size() const { return inputs.rows(); }
  Index input_dim() const { return inputs.cols(); }
};

/// Checks shape, finiteness and (when `min_rows` > 0) the row count; rows
/// closer than `duplicate_tolerance` in the infinity norm are rejected.
void validate_dataset(const FidelityDataset& data, Index min_rows, double duplicate_tolerance);

/// Affine maps to and from the standardized space the kernels operate in.
struct Normalization {
  Vector input_mean;
  Vector input_scale;
  double output_mean = 0.0;
  double output_scale = 1.0;

  Matrix to_unit(const Matrix& X) const;
};

Normalization identity_normalization(Index input_dim);
Normalization fit_normalization(const Matrix& X, const Vector& y);

struct FitOptions {
  int restarts = 10;
  std::uint64_t seed = 0;
  double init_low = 1e-3;  // log-uniform restart range for kernel parameters
  double init_high = 1e3;
  double noise_init_low = 1e-4;
  double noise_init_high = 1e-1;
  double noise_floor = 1e-6;
  bool learn_noise = true;
  double fixed_noise = 1e-6;  // used when learn_noise is false
  bool standardize = true;
  double duplicate_tolerance = 1e-12;
  int max_iterations = 200;
  double gradient_tolerance = 1e-7;
};

/// Hyperparameters of any fitted level: kernel plus noise, in normalized units.
struct Hyperparams {
  KernelParams kernel;
  double noise_var = 1e-6;
};

/// A conditioned Gaussian process. Immutable after construction.
struct GpModel {
  Hyperparams hyperparams;
  double jitter = 0.0;  // diagonal added on top of noise_var to factorize
  Matrix training_inputs;   // raw units, canonical row order
  Vector training_outputs;  // raw units
  Normalization normalization;
  Matrix unit_inputs;       // training_inputs mapped through normalization
  Matrix chol_factor;       // L with L L^T = K + (noise_var + jitter) I
  Vector alpha;             // (K + (noise_var + jitter) I)^-1 y, normalized
  double log_likelihood = 0.0;
  bool constant_fallback = false;

  Index input_dim() const { return training_inputs.cols(); }
  Index size() const { return training_inputs.rows(); }
  KernelKind kind() const { return kind_of(hyperparams.kernel); }
};

struct LmlResult {
  double value = 0.0;
  Vector gradient;  // d/dlog of [pack_log(kernel)..., noise_var]
  double jitter = 0.0;
};

/// Standard GP log marginal likelihood on (X, y) as given (no standardization),
/// with the analytic gradient in log-hyperparameter space. Jitter escalates
/// from 1e-8 by factors of 10 up to 1e-4 before NotPositiveDefinite.
LmlResult log_marginal_likelihood(const Matrix& X, const Vector& y, const KernelParams& kernel,
                                  double noise_var);
LmlResult log_marginal_likelihood(const Matrix& X, const Vector& y, const GpHyperparams& hp);

/// Conditions a GP on data with fixed hyperparameters (no optimization).
GpModel condition_gp(const Matrix& X, const Vector& y, const Hyperparams& hp,
                     const Normalization& norm);

/// Maximum-likelihood fit with multi-start L-BFGS in log space.
GpModel fit_gp(const Matrix& X, const Vector& y, KernelKind kind, const FitOptions& options = {});
GpModel fit_gp(const FidelityDataset& data, const FitOptions& options = {});

enum class VarianceKind { Observed, Latent };

struct Prediction {
  Vector mean;
  Vector variance;
};

/// Posterior mean and marginal variance in output units. `Observed` adds the
/// noise variance; `Latent` is the variance of the underlying function.
Prediction predict(const GpModel& model, const Matrix& X_star, VarianceKind kind = VarianceKind::Observed);

/// SE-ARD view of a single-fidelity model's hyperparameters.
GpHyperparams se_ard_hyperparams(const GpModel& model);

/// Binary form of a conditioned model. The factor and weights are stored
/// as-is, so a reloaded model predicts bit-identically.
void write_gp(ByteWriter& out, const GpModel& model);
GpModel read_gp(ByteReader& in);

}  // namespace netcage::gp
