#pragma once

#include <vector>

#include "ccs/rng.hpp"

namespace ccs {

/// y = x + z with z iid N(0, sigma2). Noise variance defaults to 1 per
/// dimension; SNR is steered through the per-symbol energy Es.
std::vector<double> awgn_observe(const std::vector<double>& x, Rng& rng, double sigma2 = 1.0);

/// Eb/N0 in dB for total codeword length N (all slots), per-symbol energy Es
/// and B message bits, with sigma2 = 1 (N0 = 2).
double ebn0_db(double es, long long n_total, int b);

/// Inverse of ebn0_db: the Es achieving a target Eb/N0 (dB).
double es_for_ebn0(double ebn0_db, long long n_total, int b);

}  // namespace ccs
