#include "ccs/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace ccs {

std::vector<double> awgn_observe(const std::vector<double>& x, Rng& rng, double sigma2) {
    if (sigma2 < 0.0) throw std::invalid_argument("awgn_observe: sigma2 must be >= 0");
    const double sd = std::sqrt(sigma2);
    std::vector<double> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] + sd * rng.next_gaussian();
    return y;
}

double ebn0_db(double es, long long n_total, int b) {
    if (es <= 0.0 || n_total <= 0 || b <= 0)
        throw std::invalid_argument("ebn0_db: es, N and B must be positive");
    return 10.0 * std::log10(static_cast<double>(n_total) * es / (2.0 * b));
}

double es_for_ebn0(double ebn0_db, long long n_total, int b) {
    if (n_total <= 0 || b <= 0)
        throw std::invalid_argument("es_for_ebn0: N and B must be positive");
    return std::pow(10.0, ebn0_db / 10.0) * 2.0 * b / static_cast<double>(n_total);
}

}  // namespace ccs
