#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ccs/gf2core.hpp"
#include "ccs/rng.hpp"

namespace ccs {

enum class MatrixKind { Antipodal, Gaussian };

/// Per-slot sensing matrix, stored column-major. Antipodal entries are
/// +/- sqrt(Es); Gaussian entries are N(0, Es). A codeword occupies one
/// column, so each user's per-slot signal has energy rows * Es (exactly for
/// antipodal, in expectation for Gaussian).
class SensingMatrix {
public:
    SensingMatrix() = default;

    static SensingMatrix sample(MatrixKind kind, std::size_t rows, std::size_t cols,
                                double es, Rng& rng);
    static SensingMatrix from_data(std::size_t rows, std::size_t cols,
                                   std::vector<float> column_major);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    const float* col(std::size_t c) const { return a_.data() + c * rows_; }

    /// y = A x for dense x (entries of x may be any reals).
    std::vector<double> apply(const std::vector<double>& x) const;
    /// A^T r.
    std::vector<double> apply_t(const std::vector<double>& r) const;
    /// Sum of the columns listed in `cols` (with multiplicity).
    std::vector<double> superimpose(const std::vector<std::uint32_t>& cols) const;

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<float> a_;
};

/// Binary sensing-matrix file: 8-byte magic "CCSMAT1\0", rows and cols as
/// little-endian uint32, then rows*cols float32 entries in row-major order.
void export_matrix(const SensingMatrix& a, const std::string& path);
SensingMatrix import_matrix(const std::string& path);

struct NnlsOptions {
    double tol = 1e-6;   // relative residual target
    int max_iters = 500;
};

struct NnlsResult {
    std::vector<double> x;
    double rel_residual = 0.0;
    int iters = 0;
    bool converged = false;  // stopped at tol rather than max_iters
};

/// min ||A x - y||_2 over x >= 0, by accelerated projected gradient with a
/// monotone (non-increasing residual) safeguard. Step size comes from a
/// power-iteration estimate of ||A^T A||.
NnlsResult nnls(const SensingMatrix& a, const std::vector<double>& y,
                const NnlsOptions& opt = {});

struct FragmentList {
    std::vector<BitVector> fragments;   // distinct J-bit fragments
    std::vector<double> magnitudes;     // matching NNLS coefficients, descending
};

/// NNLS on the slot observation followed by top-K selection. Ties in
/// magnitude resolve to the lower column index; exact zeros are dropped, so
/// the list holds at most K fragments. cols must be a power of two (2^J).
FragmentList cs_decode_slot(const SensingMatrix& a, const std::vector<double>& y,
                            int K, const NnlsOptions& opt = {},
                            NnlsResult* diagnostics = nullptr);

}  // namespace ccs
