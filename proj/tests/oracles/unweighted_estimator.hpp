#pragma once

#include <span>
#include <vector>

#include "sbwave/wavelet_basis.hpp"

namespace oracle {

/// Periodized atoms by explicit lattice sums over every shift l whose
/// translate can touch [0,1].
double lattice_phi(const sbwave::WaveletBasis& basis, int j, long k, double y);
double lattice_psi(const sbwave::WaveletBasis& basis, int j, long k, double y);

/// Classical wavelet density estimator for a directly observed sample:
/// rescale to [eps, 1 - eps], empirical coefficients, universal hard
/// threshold (MAD / 0.6745 of the finest level), synthesis by lattice sums.
struct UnweightedEstimate {
  const sbwave::WaveletBasis* basis = nullptr;
  double q = 0.0;
  double s = 1.0;
  int j0 = 0;
  int j1 = 0;
  std::vector<double> c;
  std::vector<std::vector<double>> d;

  double operator()(double x) const;
};

UnweightedEstimate unweighted_wavelet_density(std::span<const double> sample,
                                              const sbwave::WaveletBasis& basis, int j0, int j1,
                                              double epsilon, bool threshold);

}  // namespace oracle
