#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "sparsetree/hamiltonian.hpp"

namespace sparsetree {

inline constexpr std::size_t kDenseSpectrumCap = 6000;

/// Eigenvalues ascending; eigenvectors orthonormal, column n belongs to eigenvalue n.
struct SpectralDecomposition {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;
};

/// Dense symmetric eigen-decomposition. Refuses balls above `max_size` vertices; use
/// spectrum_values for eigenvalues only.
SpectralDecomposition spectrum_full(const HamiltonianMatrix& h, std::size_t max_size = kDenseSpectrumCap);

/// Eigenvalues only (no size cap beyond memory).
Eigen::VectorXd spectrum_values(const HamiltonianMatrix& h);

struct LocalizationMetrics {
  double ipr = 0.0;  // sum psi^4
  VertexId center = 0;  // argmax |psi|
  double decay_rate = 0.0;  // slope of -ln(max |psi| per distance shell) vs distance
  double decay_r_squared = 0.0;
  std::size_t shells_used = 0;
};

/// Inverse participation ratio sum psi(x)^4.
double inverse_participation_ratio(std::span<const double> psi);

/// Exponential decay fit of |psi| around its maximum: ln(max_{d(x,c)=d} |psi(x)|) vs d.
/// Shells whose maximum is below 1e-12 of the peak are left out of the fit.
LocalizationMetrics localization_metrics(std::span<const double> psi, const TreeBall& ball);

std::vector<LocalizationMetrics> eigen_metrics(const SpectralDecomposition& dec, const TreeBall& ball);

struct SpectralAtom {
  double energy = 0.0;
  double weight = 0.0;
};

/// Atoms (E_n, |psi_n(x)|^2) of the spectral measure of delta_x.
std::vector<SpectralAtom> spectral_measure(const SpectralDecomposition& dec, VertexId x);

/// sum_n weight_n / (E_n - z).
std::complex<double> stieltjes_transform(std::span<const SpectralAtom> atoms, std::complex<double> z);

inline constexpr std::size_t kUnfoldingWindow = 21;
inline constexpr std::size_t kMinLevels = 50;

struct SpacingStatistics {
  std::vector<double> spacings;  // unfolded, mean 1
  double ks_distance = 0.0;      // sup |F_empirical - (1 - e^{-s})|
};

/// Each nearest-neighbor spacing is divided by the mean of the 21 spacings centred on it
/// (indices reflected at the spectrum edges), then all are rescaled to mean 1.
SpacingStatistics spacing_statistics(std::span<const double> eigenvalues);

}  // namespace sparsetree
