#pragma once

#include <vector>

#include "hslab/complex_types.hpp"

namespace hslab {

// Dense complex polynomial, coefficients in ascending order of degree.
class Polynomial {
public:
    Polynomial() = default;
    Polynomial(std::initializer_list<Cplx> coeffs) : c_(coeffs) { trim(); }
    explicit Polynomial(std::vector<Cplx> coeffs) : c_(std::move(coeffs)) { trim(); }

    bool is_zero() const { return c_.empty(); }
    int degree() const { return static_cast<int>(c_.size()) - 1; }  // -1 for the zero polynomial
    const std::vector<Cplx>& coeffs() const { return c_; }

    Cplx eval(Cplx z) const {
        Cplx acc = 0.0;
        for (size_t k = c_.size(); k-- > 0;) acc = acc * z + c_[k];
        return acc;
    }

    Polynomial derivative() const {
        if (c_.size() <= 1) return Polynomial{};
        std::vector<Cplx> d(c_.size() - 1);
        for (size_t k = 1; k < c_.size(); ++k) d[k - 1] = double(k) * c_[k];
        return Polynomial(std::move(d));
    }

    // All roots with multiplicity. Degree <= 2 in closed form, otherwise a
    // companion-matrix eigenvalue solve; near-coincident roots are clustered
    // afterwards by the caller if multiplicity matters.
    std::vector<Cplx> roots() const;

private:
    void trim() {
        while (!c_.empty() && c_.back() == Cplx(0.0, 0.0)) c_.pop_back();
    }
    std::vector<Cplx> c_;
};

}  // namespace hslab
