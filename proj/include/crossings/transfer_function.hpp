#pragma once

#include <string>
#include <vector>

#include "crossings/polynomial.hpp"

namespace crossings {

// Open-loop transfer function kept in factored form:
//
//   L(s) = gain * prod(zero_factors) / (s^integrator_order * prod(pole_factors))
//
// Every factor is a RealPolynomial of degree 1 or 2 with a nonzero constant
// term; roots at the origin are normalized out into integrator_order (poles)
// or explicit {0,1} factors produced by the parser get folded the same way on
// the numerator side, where they are kept as degree-1 factors with c0 == 0.
struct FactoredTF {
    double gain = 1.0;
    int integrator_order = 0;
    std::vector<RealPolynomial> zero_factors;
    std::vector<RealPolynomial> pole_factors;

    int numerator_degree() const;
    int denominator_degree() const;
    // denominator degree minus numerator degree; negative means improper
    int relative_degree() const;
    bool is_zero() const { return gain == 0.0; }

    FactoredTF with_gain(double k) const {
        FactoredTF out = *this;
        out.gain = k;
        return out;
    }
};

// Expanded numerator/denominator form.
struct RationalTF {
    RealPolynomial num;
    RealPolynomial den;
};

// Parses the factored grammar, e.g. "5/((s/1+1)(s/2+1)(s/3+1))" or
// "-5*(s/2-1)/(s*(s/1+1))". Throws ParseError (with position and the expected
// token set) or DegreeError for a parenthesized factor above degree 2.
FactoredTF parse_tf(const std::string& text);

// Canonical text form: gain first, zero factors, "/", pole factors; degree-1
// factors are scaled to "s/a+1" / "s/a-1" with a > 0, scales folded into the
// gain. parse_tf(print_tf(tf)) is structurally equal to tf.
std::string print_tf(const FactoredTF& tf);

RationalTF expand(const FactoredTF& tf);

// Direct factored evaluation of L(s). Infinite or NaN results are returned
// as-is; callers near poles must guard themselves.
Complex eval_tf(const FactoredTF& tf, Complex s);

// Series interconnection: gains multiply, factor lists concatenate. Never
// cancels anything.
FactoredTF compose(const FactoredTF& a, const FactoredTF& b);

struct CancelPair {
    Complex zero;
    Complex pole;
};

// Zero/pole root pairs that coincide within tol*max(1,|root|).
std::vector<CancelPair> cancel_check(const FactoredTF& tf, double tol = 1e-6);

// Exact roots of a degree-1 or degree-2 factor (quadratic formula).
std::vector<Complex> factor_roots(const RealPolynomial& factor);

std::vector<Complex> zero_locations(const FactoredTF& tf);
// Includes integrator poles at the origin, one entry per order.
std::vector<Complex> pole_locations(const FactoredTF& tf);

// Tolerant structural comparison after canonical normalization (factor scales
// folded into the gain, factor lists matched as multisets).
bool structurally_equal(const FactoredTF& a, const FactoredTF& b, double tol = 1e-12);

}  // namespace crossings
