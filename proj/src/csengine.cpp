#include "ccs/csengine.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "ccs/treecode.hpp"

namespace ccs {

SensingMatrix SensingMatrix::sample(MatrixKind kind, std::size_t rows, std::size_t cols,
                                    double es, Rng& rng) {
    if (rows == 0 || cols == 0 || es <= 0.0)
        throw std::invalid_argument("sensing matrix: rows, cols and Es must be positive");
    SensingMatrix m;
    m.rows_ = rows;
    m.cols_ = cols;
    m.a_.resize(rows * cols);
    const double amp = std::sqrt(es);
    // column-by-column so the draw order matches the storage order
    for (std::size_t c = 0; c < cols; ++c) {
        float* col = m.a_.data() + c * rows;
        if (kind == MatrixKind::Antipodal) {
            for (std::size_t r = 0; r < rows; ++r)
                col[r] = static_cast<float>(rng.next_bit() ? amp : -amp);
        } else {
            for (std::size_t r = 0; r < rows; ++r)
                col[r] = static_cast<float>(amp * rng.next_gaussian());
        }
    }
    return m;
}

SensingMatrix SensingMatrix::from_data(std::size_t rows, std::size_t cols,
                                       std::vector<float> column_major) {
    if (column_major.size() != rows * cols)
        throw std::invalid_argument("sensing matrix: data size mismatch");
    SensingMatrix m;
    m.rows_ = rows;
    m.cols_ = cols;
    m.a_ = std::move(column_major);
    return m;
}

std::vector<double> SensingMatrix::apply(const std::vector<double>& x) const {
    if (x.size() != cols_) throw std::invalid_argument("apply: x size mismatch");
    std::vector<double> y(rows_, 0.0);
    for (std::size_t c = 0; c < cols_; ++c) {
        const double xc = x[c];
        if (xc == 0.0) continue;
        const float* a = col(c);
        for (std::size_t r = 0; r < rows_; ++r) y[r] += xc * a[r];
    }
    return y;
}

std::vector<double> SensingMatrix::apply_t(const std::vector<double>& r) const {
    if (r.size() != rows_) throw std::invalid_argument("apply_t: r size mismatch");
    std::vector<double> g(cols_);
    for (std::size_t c = 0; c < cols_; ++c) {
        const float* a = col(c);
        double acc = 0.0;
        for (std::size_t i = 0; i < rows_; ++i) acc += a[i] * r[i];
        g[c] = acc;
    }
    return g;
}

std::vector<double> SensingMatrix::superimpose(const std::vector<std::uint32_t>& cs) const {
    std::vector<double> y(rows_, 0.0);
    for (std::uint32_t c : cs) {
        if (c >= cols_) throw std::invalid_argument("superimpose: column out of range");
        const float* a = col(c);
        for (std::size_t r = 0; r < rows_; ++r) y[r] += a[r];
    }
    return y;
}

namespace {

constexpr char kMagic[8] = {'C', 'C', 'S', 'M', 'A', 'T', '1', '\0'};

void put_u32le(std::ostream& os, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16),
                          static_cast<unsigned char>(v >> 24)};
    os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32le(std::istream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

}  // namespace

void export_matrix(const SensingMatrix& a, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("export_matrix: cannot open " + path);
    os.write(kMagic, 8);
    put_u32le(os, static_cast<std::uint32_t>(a.rows()));
    put_u32le(os, static_cast<std::uint32_t>(a.cols()));
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t c = 0; c < a.cols(); ++c) {
            const float v = a.col(c)[r];
            os.write(reinterpret_cast<const char*>(&v), 4);
        }
    if (!os) throw std::runtime_error("export_matrix: write failed for " + path);
}

SensingMatrix import_matrix(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("import_matrix: cannot open " + path);
    char magic[8];
    is.read(magic, 8);
    if (!is || std::memcmp(magic, kMagic, 8) != 0)
        throw std::runtime_error("import_matrix: bad magic in " + path);
    const std::uint32_t rows = get_u32le(is);
    const std::uint32_t cols = get_u32le(is);
    if (!is || rows == 0 || cols == 0)
        throw std::runtime_error("import_matrix: bad header in " + path);
    std::vector<float> data(static_cast<std::size_t>(rows) * cols);
    for (std::uint32_t r = 0; r < rows; ++r)
        for (std::uint32_t c = 0; c < cols; ++c) {
            float v;
            is.read(reinterpret_cast<char*>(&v), 4);
            data[static_cast<std::size_t>(c) * rows + r] = v;
        }
    if (!is) throw std::runtime_error("import_matrix: truncated file " + path);
    return SensingMatrix::from_data(rows, cols, std::move(data));
}

namespace {

double norm2(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

double estimate_lipschitz(const SensingMatrix& a) {
    Rng rng(0x9d2c5680u);
    std::vector<double> v(a.cols());
    for (double& x : v) x = rng.next_gaussian();
    double lambda = 1.0;
    for (int it = 0; it < 30; ++it) {
        std::vector<double> w = a.apply_t(a.apply(v));
        lambda = norm2(w);
        if (lambda <= 0.0) return 1.0;
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = w[i] / lambda;
    }
    return lambda;
}

}  // namespace

NnlsResult nnls(const SensingMatrix& a, const std::vector<double>& y,
                const NnlsOptions& opt) {
    if (y.size() != a.rows()) throw std::invalid_argument("nnls: y size mismatch");
    if (opt.tol <= 0.0 || opt.max_iters < 1)
        throw std::invalid_argument("nnls: tol must be > 0 and max_iters >= 1");

    NnlsResult res;
    const double ynorm = norm2(y);
    res.x.assign(a.cols(), 0.0);
    if (ynorm == 0.0) {
        res.converged = true;
        return res;
    }

    double lip = estimate_lipschitz(a) * 1.05;

    std::vector<double> x(a.cols(), 0.0), x_prev = x;
    std::vector<double> ax(a.rows(), 0.0), ax_prev = ax;
    double resid = ynorm;
    double t = 1.0;

    auto step_from = [&](const std::vector<double>& v, const std::vector<double>& av,
                         std::vector<double>& out) {
        std::vector<double> r(a.rows());
        for (std::size_t i = 0; i < r.size(); ++i) r[i] = av[i] - y[i];
        std::vector<double> g = a.apply_t(r);
        out.resize(a.cols());
        for (std::size_t i = 0; i < out.size(); ++i)
            out[i] = std::max(0.0, v[i] - g[i] / lip);
    };

    for (res.iters = 1; res.iters <= opt.max_iters; ++res.iters) {
        const double beta = (t - 1.0) / (0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t)));
        t = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));

        std::vector<double> v(a.cols()), av(a.rows());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = x[i] + beta * (x[i] - x_prev[i]);
        for (std::size_t i = 0; i < av.size(); ++i) av[i] = ax[i] + beta * (ax[i] - ax_prev[i]);

        std::vector<double> x_new;
        step_from(v, av, x_new);
        std::vector<double> ax_new = a.apply(x_new);
        std::vector<double> d(a.rows());
        for (std::size_t i = 0; i < d.size(); ++i) d[i] = ax_new[i] - y[i];
        double resid_new = norm2(d);

        if (resid_new > resid) {
            // momentum overshoot: restart from the plain gradient step
            t = 1.0;
            step_from(x, ax, x_new);
            ax_new = a.apply(x_new);
            for (std::size_t i = 0; i < d.size(); ++i) d[i] = ax_new[i] - y[i];
            resid_new = norm2(d);
            for (int k = 0; k < 30 && resid_new > resid; ++k) {
                lip *= 2.0;
                step_from(x, ax, x_new);
                ax_new = a.apply(x_new);
                for (std::size_t i = 0; i < d.size(); ++i) d[i] = ax_new[i] - y[i];
                resid_new = norm2(d);
            }
            if (resid_new > resid) break;  // no further progress possible
        }

        x_prev = std::move(x);
        ax_prev = std::move(ax);
        x = std::move(x_new);
        ax = std::move(ax_new);
        resid = resid_new;
        if (resid / ynorm <= opt.tol) {
            res.converged = true;
            break;
        }
    }
    res.iters = std::min(res.iters, opt.max_iters);
    res.x = std::move(x);
    res.rel_residual = resid / ynorm;
    return res;
}

FragmentList cs_decode_slot(const SensingMatrix& a, const std::vector<double>& y,
                            int K, const NnlsOptions& opt, NnlsResult* diagnostics) {
    if (K < 1) throw std::invalid_argument("cs_decode_slot: K must be >= 1");
    if (!std::has_single_bit(a.cols()))
        throw std::invalid_argument("cs_decode_slot: column count must be 2^J");
    const int J = std::countr_zero(a.cols());

    NnlsResult sol = nnls(a, y, opt);
    std::vector<std::uint32_t> idx(a.cols());
    std::iota(idx.begin(), idx.end(), 0u);
    std::partial_sort(idx.begin(),
                      idx.begin() + std::min<std::size_t>(K, idx.size()), idx.end(),
                      [&](std::uint32_t p, std::uint32_t q) {
                          if (sol.x[p] != sol.x[q]) return sol.x[p] > sol.x[q];
                          return p < q;
                      });

    FragmentList list;
    for (int k = 0; k < K && k < static_cast<int>(idx.size()); ++k) {
        const double mag = sol.x[idx[k]];
        if (mag <= 0.0) break;
        list.fragments.push_back(index_to_fragment(idx[k], J));
        list.magnitudes.push_back(mag);
    }
    if (diagnostics) *diagnostics = std::move(sol);
    return list;
}

}  // namespace ccs
