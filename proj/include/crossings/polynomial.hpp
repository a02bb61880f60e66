#pragma once

#include <complex>
#include <vector>

namespace crossings {

using Complex = std::complex<double>;

// Dense real-coefficient polynomial, ascending powers: c[0] + c[1]*s + ...
// Invariant: coefficient list is nonempty and the leading (highest-index)
// coefficient is nonzero, except for the literal zero polynomial {0}.
class RealPolynomial {
public:
    RealPolynomial() : c_{0.0} {}
    explicit RealPolynomial(std::vector<double> coeffs);

    static RealPolynomial zero() { return RealPolynomial(); }
    static RealPolynomial one() { return RealPolynomial({1.0}); }

    const std::vector<double>& coeffs() const { return c_; }
    double operator[](std::size_t i) const { return i < c_.size() ? c_[i] : 0.0; }
    int degree() const { return static_cast<int>(c_.size()) - 1; }
    bool is_zero() const { return c_.size() == 1 && c_[0] == 0.0; }
    double leading() const { return c_.back(); }
    double max_abs_coeff() const;

    Complex eval(Complex s) const;

    RealPolynomial operator*(const RealPolynomial& rhs) const;
    RealPolynomial operator+(const RealPolynomial& rhs) const;
    RealPolynomial scaled(double k) const;
    RealPolynomial derivative() const;

    // Multiplies by s^k (prepends k zero coefficients).
    RealPolynomial shifted_up(int k) const;

    bool operator==(const RealPolynomial& rhs) const { return c_ == rhs.c_; }

private:
    std::vector<double> c_;
};

// Horner evaluation at a complex point.
Complex poly_eval(const RealPolynomial& p, Complex s);

struct RootSet {
    std::vector<Complex> roots;  // size == degree, sorted by (re, im)
    double residual = 0.0;       // max |p(root)| over the set
};

// Simultaneous-iteration root finder with a conjugate-pairing post-pass.
// Throws ZeroPolynomialError for the zero polynomial, NoConvergenceError if
// the iteration does not settle within max_iter sweeps.
RootSet poly_roots(const RealPolynomial& p, double tol = 1e-12, int max_iter = 200);

// Number of roots with strictly positive real part, by the Routh array with
// epsilon substitution for zero pivots and the auxiliary-polynomial derivative
// for vanished rows. Throws IndeterminateError when a root lies on the
// imaginary axis within tolerance.
int routh_rhp_count(const RealPolynomial& p);

// Half-width of the band around the imaginary axis inside which a root is
// treated as marginal rather than left/right.
inline double marginal_band(Complex root) {
    return 1e-9 * std::max(1.0, std::abs(root));
}

}  // namespace crossings
