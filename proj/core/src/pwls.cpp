#include <cmath>

#include "fdct/errors.hpp"
#include "fdct/recon.hpp"

namespace fdct {

Grid2 pwls_weights(const Grid2& x, double photon_count, double eta) {
    if (!(photon_count > 0.0)) throw DomainError("pwls_weights: photon_count must be > 0");
    if (!(eta > 0.0)) throw DomainError("pwls_weights: eta must be > 0");
    Grid2 w(x.rows, x.cols);
    for (std::size_t i = 0; i < x.v.size(); ++i) w.v[i] = photon_count * std::exp(-x.v[i] / eta);
    return w;
}

Grid2 pwls_update(const Grid2& x_tilde, const Grid2& y, const Grid2& w, double mu,
                  const Grid2& prior_grad, PwlsMode mode) {
    if (!x_tilde.same_shape(y) || !x_tilde.same_shape(w) || !x_tilde.same_shape(prior_grad))
        throw ShapeError("pwls_update: shape mismatch");
    if (mu < 0.0) throw DomainError("pwls_update: mu must be >= 0");
    Grid2 out(x_tilde.rows, x_tilde.cols);
    if (mode == PwlsMode::corrected) {
        for (std::size_t i = 0; i < out.v.size(); ++i)
            out.v[i] = x_tilde.v[i] +
                       (w.v[i] * (y.v[i] - x_tilde.v[i]) - mu * prior_grad.v[i]) / (w.v[i] + mu);
    } else {
        for (std::size_t i = 0; i < out.v.size(); ++i)
            out.v[i] = (w.v[i] * (y.v[i] - x_tilde.v[i]) + mu * prior_grad.v[i]) / (w.v[i] + mu);
    }
    return out;
}

}  // namespace fdct
