#include "efqs/quadrature.hpp"

#include "efqs/errors.hpp"

namespace efqs {

std::vector<double> linspace(double a, double b, int n) {
    if(n < 1) throw DomainError("linspace needs at least one point");
    if(n == 1) return {a};
    std::vector<double> out(static_cast<std::size_t>(n));
    const double        h = (b - a) / (n - 1);
    for(int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = a + i * h;
    out.back() = b;
    return out;
}

std::vector<double> trapezoid_weights(int n, double h) {
    if(n < 2) throw DomainError("trapezoid rule needs at least two points");
    std::vector<double> w(static_cast<std::size_t>(n), h);
    w.front() = w.back() = 0.5 * h;
    return w;
}

} // namespace efqs
