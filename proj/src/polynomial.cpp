#include "crossings/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "crossings/errors.hpp"

namespace crossings {

RealPolynomial::RealPolynomial(std::vector<double> coeffs) : c_(std::move(coeffs)) {
    if (c_.empty()) throw std::invalid_argument("polynomial needs at least one coefficient");
    while (c_.size() > 1 && c_.back() == 0.0) c_.pop_back();
}

double RealPolynomial::max_abs_coeff() const {
    double m = 0.0;
    for (double v : c_) m = std::max(m, std::abs(v));
    return m;
}

Complex RealPolynomial::eval(Complex s) const {
    Complex acc{0.0, 0.0};
    for (std::size_t i = c_.size(); i-- > 0;) acc = acc * s + c_[i];
    return acc;
}

RealPolynomial RealPolynomial::operator*(const RealPolynomial& rhs) const {
    if (is_zero() || rhs.is_zero()) return zero();
    std::vector<double> out(c_.size() + rhs.c_.size() - 1, 0.0);
    for (std::size_t i = 0; i < c_.size(); ++i)
        for (std::size_t j = 0; j < rhs.c_.size(); ++j) out[i + j] += c_[i] * rhs.c_[j];
    return RealPolynomial(std::move(out));
}

RealPolynomial RealPolynomial::operator+(const RealPolynomial& rhs) const {
    std::vector<double> out(std::max(c_.size(), rhs.c_.size()), 0.0);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = (*this)[i] + rhs[i];
    return RealPolynomial(std::move(out));
}

RealPolynomial RealPolynomial::scaled(double k) const {
    std::vector<double> out = c_;
    for (double& v : out) v *= k;
    return RealPolynomial(std::move(out));
}

RealPolynomial RealPolynomial::derivative() const {
    if (c_.size() == 1) return zero();
    std::vector<double> out(c_.size() - 1);
    for (std::size_t i = 1; i < c_.size(); ++i) out[i - 1] = c_[i] * static_cast<double>(i);
    return RealPolynomial(std::move(out));
}

RealPolynomial RealPolynomial::shifted_up(int k) const {
    if (is_zero()) return zero();
    std::vector<double> out(c_.size() + static_cast<std::size_t>(k), 0.0);
    std::copy(c_.begin(), c_.end(), out.begin() + k);
    return RealPolynomial(std::move(out));
}

Complex poly_eval(const RealPolynomial& p, Complex s) { return p.eval(s); }

namespace {

// p and p' at s in one Horner sweep.
void eval_with_derivative(const std::vector<double>& c, Complex s, Complex& p, Complex& dp) {
    p = Complex{0.0, 0.0};
    dp = Complex{0.0, 0.0};
    for (std::size_t i = c.size(); i-- > 0;) {
        dp = dp * s + p;
        p = p * s + c[i];
    }
}

// Backward-error scale sum |c_k| * |s|^k; nonzero whenever c[0] != 0.
double local_scale(const std::vector<double>& c, Complex s) {
    double as = std::abs(s);
    double pw = 1.0;
    double acc = 0.0;
    for (double v : c) {
        acc += std::abs(v) * pw;
        pw *= as;
    }
    return acc;
}

std::vector<Complex> aberth(const std::vector<double>& c, double tol, int max_iter) {
    const int n = static_cast<int>(c.size()) - 1;
    double cmax = 0.0;
    for (int i = 0; i < n; ++i) cmax = std::max(cmax, std::abs(c[i]));
    const double r0 = 1.0 + cmax / std::abs(c[n]);

    std::vector<Complex> z(n);
    for (int k = 0; k < n; ++k) {
        double ang = 2.0 * M_PI * k / n + 0.4;
        z[k] = r0 * Complex{std::cos(ang), std::sin(ang)};
    }

    for (int iter = 0; iter < max_iter; ++iter) {
        bool all_small = true;
        double max_step = 0.0;
        for (int i = 0; i < n; ++i) {
            Complex p, dp;
            eval_with_derivative(c, z[i], p, dp);
            if (std::abs(p) > tol * local_scale(c, z[i])) all_small = false;
            if (dp == Complex{0.0, 0.0}) {
                z[i] += Complex{1e-6 * (1.0 + std::abs(z[i])), 1e-6};
                all_small = false;
                continue;
            }
            Complex w = p / dp;
            Complex sum{0.0, 0.0};
            for (int j = 0; j < n; ++j) {
                if (j == i) continue;
                Complex d = z[i] - z[j];
                if (d == Complex{0.0, 0.0}) d = Complex{1e-30, 0.0};
                sum += 1.0 / d;
            }
            Complex denom = 1.0 - w * sum;
            Complex step = (std::abs(denom) < 1e-300) ? w : w / denom;
            z[i] -= step;
            max_step = std::max(max_step, std::abs(step) / (1.0 + std::abs(z[i])));
        }
        if (all_small || max_step < 1e-16) break;
        if (iter == max_iter - 1) {
            for (int i = 0; i < n; ++i) {
                Complex p, dp;
                eval_with_derivative(c, z[i], p, dp);
                if (std::abs(p) > tol * local_scale(c, z[i]))
                    throw NoConvergenceError("root iteration did not converge within " +
                                             std::to_string(max_iter) + " sweeps");
            }
        }
    }
    return z;
}

void newton_polish(const std::vector<double>& c, std::vector<Complex>& z) {
    for (auto& zi : z) {
        for (int k = 0; k < 3; ++k) {
            Complex p, dp;
            eval_with_derivative(c, zi, p, dp);
            if (dp == Complex{0.0, 0.0}) break;
            Complex step = p / dp;
            if (!(std::abs(step) < 1.0 + std::abs(zi))) break;  // diverging, keep what we have
            zi -= step;
        }
    }
}

// Real-coefficient polynomials must have conjugate-symmetric root sets; snap
// near-real roots onto the axis and average the remaining pairs.
void enforce_conjugate_pairs(std::vector<Complex>& z) {
    std::vector<Complex> upper, lower;
    std::vector<Complex> out;
    for (Complex& r : z) {
        if (std::abs(r.imag()) <= 1e-7 * (1.0 + std::abs(r))) {
            out.emplace_back(r.real(), 0.0);
        } else if (r.imag() > 0) {
            upper.push_back(r);
        } else {
            lower.push_back(r);
        }
    }
    for (Complex u : upper) {
        if (lower.empty()) {
            out.emplace_back(u.real(), 0.0);
            continue;
        }
        auto best = lower.begin();
        double best_d = std::abs(u - std::conj(*best));
        for (auto it = lower.begin() + 1; it != lower.end(); ++it) {
            double d = std::abs(u - std::conj(*it));
            if (d < best_d) {
                best_d = d;
                best = it;
            }
        }
        Complex mean = 0.5 * (u + std::conj(*best));
        lower.erase(best);
        out.push_back(mean);
        out.push_back(std::conj(mean));
    }
    for (Complex l : lower) out.emplace_back(l.real(), 0.0);
    z = std::move(out);
}

}  // namespace

RootSet poly_roots(const RealPolynomial& p, double tol, int max_iter) {
    if (p.is_zero()) throw ZeroPolynomialError();

    std::vector<double> c = p.coeffs();
    std::vector<Complex> roots;
    while (c.size() > 1 && c.front() == 0.0) {
        roots.emplace_back(0.0, 0.0);
        c.erase(c.begin());
    }

    const int n = static_cast<int>(c.size()) - 1;
    if (n == 1) {
        roots.emplace_back(-c[0] / c[1], 0.0);
    } else if (n == 2) {
        double a = c[2], b = c[1], cc = c[0];
        double disc = b * b - 4.0 * a * cc;
        if (disc >= 0.0) {
            double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
            double r1 = (b == 0.0 && cc == 0.0) ? 0.0 : q / a;
            double r2 = (q == 0.0) ? 0.0 : cc / q;
            roots.emplace_back(r1, 0.0);
            roots.emplace_back(r2, 0.0);
        } else {
            double re = -b / (2.0 * a);
            double im = std::sqrt(-disc) / (2.0 * a);
            roots.emplace_back(re, std::abs(im));
            roots.emplace_back(re, -std::abs(im));
        }
    } else if (n >= 3) {
        std::vector<Complex> z = aberth(c, tol, max_iter);
        newton_polish(c, z);
        enforce_conjugate_pairs(z);
        roots.insert(roots.end(), z.begin(), z.end());
    }

    std::sort(roots.begin(), roots.end(), [](Complex a, Complex b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });

    RootSet out;
    out.roots = std::move(roots);
    for (Complex r : out.roots) out.residual = std::max(out.residual, std::abs(p.eval(r)));
    return out;
}

namespace {

constexpr double kRouthZeroRel = 1e-12;
constexpr double kRouthEpsilon = 1e-30;

double row_max(const std::vector<double>& r) {
    double m = 0.0;
    for (double v : r) m = std::max(m, std::abs(v));
    return m;
}

// Screens an auxiliary polynomial (single-parity powers, top power `power`)
// for roots on the imaginary axis by looking at its u = s^2 form.
bool aux_has_imaginary_roots(const std::vector<double>& row, int power) {
    std::vector<double> u_desc;  // descending powers of u
    for (double v : row) u_desc.push_back(v);
    std::vector<double> u_asc(u_desc.rbegin(), u_desc.rend());
    RealPolynomial au(u_asc);
    if (au.degree() < 1) return false;
    RootSet rs = poly_roots(au, 1e-12, 400);
    for (Complex u : rs.roots) {
        if (u.real() < 0.0 && std::abs(u.imag()) <= 1e-8 * std::max(1.0, std::abs(u)))
            return true;
        if (std::abs(u) <= 1e-18) return true;
    }
    (void)power;
    return false;
}

// Builds the array for one epsilon sign and counts first-column sign changes.
// Throws IndeterminateError when a vanished row's auxiliary polynomial has
// imaginary-axis roots.
int routh_count_signed(const std::vector<double>& coeffs, double eps_sign) {
    const int n = static_cast<int>(coeffs.size()) - 1;
    const std::size_t width = static_cast<std::size_t>(n) / 2 + 1;

    // rows[0] holds c_n, c_{n-2}, ...; rows[1] holds c_{n-1}, c_{n-3}, ...
    std::vector<std::vector<double>> rows(2, std::vector<double>(width, 0.0));
    for (int k = n; k >= 0; --k) {
        int i = n - k;
        rows[i % 2][i / 2] = coeffs[k];
    }
    if (n == 0) return 0;

    std::vector<double> first_col;
    std::vector<double> prev = rows[0], cur = rows[1];

    auto normalize = [](std::vector<double>& r) {
        double m = row_max(r);
        if (m > 0.0)
            for (double& v : r) v /= m;
    };
    normalize(prev);
    normalize(cur);
    first_col.push_back(prev[0]);

    int power = n - 1;  // power of s that `cur` belongs to
    while (power >= 0) {
        double m = row_max(cur);
        if (m <= 0.0 || m <= kRouthZeroRel * row_max(prev)) {
            // Vanished row: the auxiliary polynomial sits in `prev` at power+1.
            if (aux_has_imaginary_roots(prev, power + 1))
                throw IndeterminateError("auxiliary polynomial has imaginary-axis roots");
            for (std::size_t j = 0; j < width; ++j) {
                int p = power + 1 - 2 * static_cast<int>(j);
                cur[j] = (p > 0) ? prev[j] * static_cast<double>(p) : 0.0;
            }
            m = row_max(cur);
            if (m <= 0.0) throw IndeterminateError("degenerate array row");
        }
        if (std::abs(cur[0]) <= kRouthZeroRel * m) {
            cur[0] = eps_sign * kRouthEpsilon * m;
        }
        normalize(cur);
        first_col.push_back(cur[0]);
        if (power == 0) break;

        std::vector<double> next(width, 0.0);
        for (std::size_t j = 0; j + 1 < width; ++j) {
            next[j] = (cur[0] * prev[j + 1] - prev[0] * cur[j + 1]) / cur[0];
        }
        prev = cur;
        cur = std::move(next);
        --power;
    }

    int changes = 0;
    for (std::size_t i = 1; i < first_col.size(); ++i) {
        if ((first_col[i - 1] > 0.0) != (first_col[i] > 0.0)) ++changes;
    }
    return changes;
}

}  // namespace

int routh_rhp_count(const RealPolynomial& p) {
    if (p.is_zero()) throw IndeterminateError("zero polynomial");
    const auto& c = p.coeffs();
    if (p.degree() == 0) return 0;
    if (std::abs(c[0]) <= kRouthZeroRel * p.max_abs_coeff())
        throw IndeterminateError("root at the origin");

    int plus = routh_count_signed(c, +1.0);
    int minus = routh_count_signed(c, -1.0);
    if (plus != minus)
        throw IndeterminateError("epsilon substitution is sign-dependent (marginal case)");
    return plus;
}

}  // namespace crossings
