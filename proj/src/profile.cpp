#include "fsib/profile.hpp"
#include "fsib/errors.hpp"

#include <cmath>

namespace fsib {

bool BeamProfile::is_rect() const {
    return eta0.size() == 0 || eta0.lpNorm<Eigen::Infinity>() == 0.0;
}

double BeamProfile::min_gap() const {
    return (1.0 + eta0.array()).minCoeff();
}

Vec fd_derivative(const Vec& f, double h, int order) {
    const int n = static_cast<int>(f.size());
    Vec d(n);
    switch (order) {
    case 1: {
        if (n < 3) throw DimensionError("fd_derivative: need >= 3 nodes");
        for (int j = 1; j < n - 1; ++j) d[j] = (f[j + 1] - f[j - 1]) / (2 * h);
        d[0] = (-3 * f[0] + 4 * f[1] - f[2]) / (2 * h);
        d[n - 1] = (3 * f[n - 1] - 4 * f[n - 2] + f[n - 3]) / (2 * h);
        break;
    }
    case 2: {
        if (n < 4) throw DimensionError("fd_derivative: need >= 4 nodes");
        for (int j = 1; j < n - 1; ++j) d[j] = (f[j + 1] - 2 * f[j] + f[j - 1]) / (h * h);
        d[0] = (2 * f[0] - 5 * f[1] + 4 * f[2] - f[3]) / (h * h);
        d[n - 1] = (2 * f[n - 1] - 5 * f[n - 2] + 4 * f[n - 3] - f[n - 4]) / (h * h);
        break;
    }
    case 3: {
        if (n < 5) throw DimensionError("fd_derivative: need >= 5 nodes");
        const double h3 = h * h * h;
        for (int j = 2; j < n - 2; ++j)
            d[j] = (f[j + 2] - 2 * f[j + 1] + 2 * f[j - 1] - f[j - 2]) / (2 * h3);
        // one-sided 4-point at the two nodes adjacent to each end, and at the ends
        auto fwd = [&](int j) { return (-f[j] + 3 * f[j + 1] - 3 * f[j + 2] + f[j + 3]) / h3; };
        auto bwd = [&](int j) { return (f[j] - 3 * f[j - 1] + 3 * f[j - 2] - f[j - 3]) / h3; };
        d[0] = fwd(0);
        d[1] = fwd(1);
        d[n - 2] = bwd(n - 2);
        d[n - 1] = bwd(n - 1);
        break;
    }
    default:
        throw DomainError("fd_derivative: order must be 1, 2 or 3");
    }
    return d;
}

BeamProfile make_profile(double L, const Vec& eta0) {
    if (L <= 0) throw DomainError("profile: L must be positive");
    const int n = static_cast<int>(eta0.size());
    if (n < 7) throw DimensionError("profile: need at least 7 beam nodes");
    const double h = L / (n - 1);

    for (int j = 0; j < n; ++j)
        if (1.0 + eta0[j] <= 0.0)
            throw CollisionError("profile: 1 + eta0 <= 0 at node " + std::to_string(j),
                                 1.0 + eta0[j]);

    // clamping within one grid tolerance
    const double tol = h * std::max(1.0, eta0.lpNorm<Eigen::Infinity>());
    const double slope_l = (eta0[1] - eta0[0]) / h;
    const double slope_r = (eta0[n - 1] - eta0[n - 2]) / h;
    if (std::abs(eta0[0]) > tol || std::abs(eta0[n - 1]) > tol ||
        std::abs(slope_l) > 2.0 || std::abs(slope_r) > 2.0)
        throw PreconditionError("profile: eta0 must be clamped (eta0 = eta0_x = 0 at x=0,L)");

    BeamProfile p;
    p.L = L;
    p.eta0 = eta0;
    p.eta0_x = fd_derivative(eta0, h, 1);
    p.eta0_xx = fd_derivative(eta0, h, 2);
    p.eta0_xxx = fd_derivative(eta0, h, 3);
    return p;
}

BeamProfile rect_profile(double L, int nodes) {
    return make_profile(L, Vec::Zero(nodes));
}

BeamProfile bump_profile(double L, int nodes, double amplitude) {
    Vec e(nodes);
    for (int j = 0; j < nodes; ++j) {
        const double x = L * j / (nodes - 1);
        e[j] = amplitude * 16.0 * x * x * (L - x) * (L - x) / (L * L * L * L);
    }
    BeamProfile p = make_profile(L, e);
    // analytic derivatives where available beat the stencil versions
    for (int j = 0; j < nodes; ++j) {
        const double x = L * j / (nodes - 1);
        const double c = amplitude * 16.0 / (L * L * L * L);
        p.eta0_x[j] = c * (2 * x * (L - x) * (L - x) - 2 * x * x * (L - x));
        p.eta0_xx[j] = c * (2 * (L - x) * (L - x) - 8 * x * (L - x) + 2 * x * x);
        p.eta0_xxx[j] = c * (-12 * (L - x) + 12 * x);
    }
    return p;
}

BeamProfile poly_profile(double L, int nodes, const Vec& coeffs) {
    Vec e = Vec::Zero(nodes);
    for (int j = 0; j < nodes; ++j) {
        const double x = L * j / (nodes - 1);
        double xp = 1.0;
        for (int k = 0; k < coeffs.size(); ++k) {
            e[j] += coeffs[k] * xp;
            xp *= x;
        }
    }
    return make_profile(L, e);
}

} // namespace fsib
