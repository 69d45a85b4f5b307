#include "chemo/model.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace chemo {

void ModelParams::validate() const {
    if (tau != 0 && tau != 1) {
        throw std::invalid_argument("ModelParams: tau must be 0 or 1");
    }
    if (!(mu >= 0.0) || !std::isfinite(mu)) {
        throw std::invalid_argument("ModelParams: mu must be finite and >= 0");
    }
    if (!(p >= 0.0) || !std::isfinite(p)) {
        throw std::invalid_argument("ModelParams: p must be finite and >= 0");
    }
    if (!std::isfinite(r)) {
        throw std::invalid_argument("ModelParams: r must be finite");
    }
}

bool ModelParams::theorem_regime() const noexcept {
    return r > 0.0 && mu > 0.0 && p >= 0.0 && p < 1.0;
}

std::vector<std::string> ModelParams::warnings() const {
    std::vector<std::string> out;
    if (p >= 1.0) {
        out.emplace_back("p >= 1: outside the global-boundedness hypotheses (0 <= p < 1)");
    }
    if (mu == 0.0) {
        out.emplace_back("mu = 0: no damping, outside the global-boundedness hypotheses");
    }
    if (r <= 0.0) {
        out.emplace_back("r <= 0: outside the global-boundedness hypotheses (r > 0)");
    }
    return out;
}

State::State(Field u_, Field v_, Field w_, Field z_, double t_)
    : u(std::move(u_)), v(std::move(v_)), w(std::move(w_)), z(std::move(z_)), t(t_) {
    require_same_grid(u, v, "State");
    require_same_grid(u, w, "State");
    require_same_grid(u, z, "State");
}

double source(double u, const ModelParams& params) {
    if (!(u >= 0.0)) {
        throw std::domain_error("source: u must be >= 0");
    }
    const double damping = params.p == 0.0
                               ? params.mu * u * u
                               : params.mu * u * u / std::pow(std::log(u + std::numbers::e), params.p);
    return params.r * u - damping;
}

double phi(double u) {
    if (!(u >= 0.0)) {
        throw std::domain_error("phi: u must be >= 0");
    }
    return u * u / (u + std::numbers::e);
}

double phi_derivative(double u) {
    const double s = u + std::numbers::e;
    return u / s + std::numbers::e * u / (s * s);
}

Field source_field(const Field& u, const ModelParams& params, double pos_tol) {
    Field out(u.grid());
    for (std::size_t k = 0; k < u.size(); ++k) {
        double value = u[k];
        if (value < 0.0 && value >= -pos_tol) {
            value = 0.0;
        }
        if (!(value >= 0.0)) {
            std::ostringstream msg;
            msg << "source_field: u = " << u[k] << " is negative at cell ("
                << k % static_cast<std::size_t>(u.grid().nx()) << ", "
                << k / static_cast<std::size_t>(u.grid().nx()) << ")";
            throw NumericalError(msg.str());
        }
        out[k] = source(value, params);
    }
    return out;
}

}  // namespace chemo
