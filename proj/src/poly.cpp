#include "hslab/poly.hpp"

#include <Eigen/Eigenvalues>

namespace hslab {

std::vector<Cplx> Polynomial::roots() const {
    if (is_zero()) throw DegenerateError("roots of the zero polynomial");
    int n = degree();
    if (n == 0) return {};
    if (n == 1) return {-c_[0] / c_[1]};
    if (n == 2) {
        Cplx a = c_[2], b = c_[1], c = c_[0];
        Cplx disc = std::sqrt(b * b - 4.0 * a * c);
        // Pick the sign that avoids cancellation in the -b +/- sqrt branch.
        Cplx q = (std::real(std::conj(b) * disc) >= 0.0) ? -0.5 * (b + disc) : -0.5 * (b - disc);
        if (std::abs(q) == 0.0) return {Cplx(0.0), Cplx(0.0)};
        return {q / a, c / q};
    }
    Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
    for (int i = 0; i < n; ++i) companion(i, n - 1) = -c_[i] / c_[n];
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion, false);
    std::vector<Cplx> out(n);
    for (int i = 0; i < n; ++i) out[i] = solver.eigenvalues()(i);
    return out;
}

}  // namespace hslab
