#include "crossings/transfer_function.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "crossings/errors.hpp"

namespace crossings {

int FactoredTF::numerator_degree() const {
    int d = 0;
    for (const auto& f : zero_factors) d += f.degree();
    return d;
}

int FactoredTF::denominator_degree() const {
    int d = integrator_order;
    for (const auto& f : pole_factors) d += f.degree();
    return d;
}

int FactoredTF::relative_degree() const { return denominator_degree() - numerator_degree(); }

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

namespace {

struct Token {
    enum Type { Num, S, Caret, Star, Slash, Plus, Minus, LParen, RParen, End } type = End;
    double value = 0.0;
    std::size_t pos = 0;
};

std::vector<Token> lex(const std::string& text) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < text.size()) {
        char ch = text[i];
        if (std::isspace(static_cast<unsigned char>(ch))) {
            ++i;
            continue;
        }
        Token tok;
        tok.pos = i;
        if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.') {
            std::size_t j = i;
            while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
            if (j < text.size() && text[j] == '.') {
                ++j;
                while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
            }
            if (j < text.size() && (text[j] == 'e' || text[j] == 'E')) {
                std::size_t k = j + 1;
                if (k < text.size() && (text[k] == '+' || text[k] == '-')) ++k;
                if (k < text.size() && std::isdigit(static_cast<unsigned char>(text[k]))) {
                    ++k;
                    while (k < text.size() && std::isdigit(static_cast<unsigned char>(text[k])))
                        ++k;
                    j = k;
                }
            }
            tok.type = Token::Num;
            tok.value = std::strtod(text.substr(i, j - i).c_str(), nullptr);
            i = j;
        } else if (ch == 's' || ch == 'S') {
            tok.type = Token::S;
            ++i;
        } else {
            switch (ch) {
                case '^': tok.type = Token::Caret; break;
                case '*': tok.type = Token::Star; break;
                case '/': tok.type = Token::Slash; break;
                case '+': tok.type = Token::Plus; break;
                case '-': tok.type = Token::Minus; break;
                case '(': tok.type = Token::LParen; break;
                case ')': tok.type = Token::RParen; break;
                default:
                    throw ParseError(i, "number, 's', operator, or parenthesis",
                                     std::string(1, ch));
            }
            ++i;
        }
        out.push_back(tok);
    }
    Token end;
    end.type = Token::End;
    end.pos = text.size();
    out.push_back(end);
    return out;
}

std::string token_name(const Token& t) {
    switch (t.type) {
        case Token::Num: return "number";
        case Token::S: return "'s'";
        case Token::Caret: return "'^'";
        case Token::Star: return "'*'";
        case Token::Slash: return "'/'";
        case Token::Plus: return "'+'";
        case Token::Minus: return "'-'";
        case Token::LParen: return "'('";
        case Token::RParen: return "')'";
        case Token::End: return "end of input";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

// A multiplicative unit: either a bare power of s or a parenthesized
// polynomial of degree <= 2.
struct Unit {
    bool is_s_power = false;
    int s_power = 0;
    RealPolynomial poly = RealPolynomial::one();
};

class Parser {
public:
    explicit Parser(const std::string& text) : toks_(lex(text)) {}

    // tf := [sign] [number] units [ "/" units ]
    FactoredTF parse() {
        double sign = parse_sign();
        double gain = 1.0;
        bool have_gain = false;
        std::vector<Unit> num_units, den_units;

        if (peek().type == Token::Num) {
            gain = next().value;
            have_gain = true;
        }
        if (starts_unit(peek())) {
            if (have_gain && peek().type == Token::Star) next();
            num_units = parse_units();
        } else if (!have_gain) {
            fail("number, 's', or '('");
        }
        if (peek().type == Token::Slash) {
            next();
            den_units = parse_units();
        }
        if (peek().type != Token::End) fail("'*', '/', or end of input");

        return build(sign * gain, num_units, den_units);
    }

private:
    const Token& peek(int ahead = 0) const {
        std::size_t i = std::min(pos_ + static_cast<std::size_t>(ahead), toks_.size() - 1);
        return toks_[i];
    }
    const Token& next() { return toks_[std::min(pos_++, toks_.size() - 1)]; }
    [[noreturn]] void fail(const std::string& expected) const {
        throw ParseError(peek().pos, expected, token_name(peek()));
    }

    static bool starts_unit(const Token& t) {
        return t.type == Token::S || t.type == Token::LParen || t.type == Token::Star;
    }

    double parse_sign() {
        double sign = 1.0;
        while (peek().type == Token::Plus || peek().type == Token::Minus) {
            if (next().type == Token::Minus) sign = -sign;
        }
        return sign;
    }

    // units := unit { ["*"] unit }
    std::vector<Unit> parse_units() {
        std::vector<Unit> out;
        append_unit(out);
        for (;;) {
            if (peek().type == Token::Star && starts_unit(peek(1))) {
                next();
                append_unit(out);
            } else if (peek().type == Token::S || peek().type == Token::LParen) {
                append_unit(out);
            } else {
                break;
            }
        }
        return out;
    }

    // unit := "s" ["^" integer] | "(" units ")" | "(" poly ")"
    void append_unit(std::vector<Unit>& out) {
        if (peek().type == Token::S) {
            next();
            Unit u;
            u.is_s_power = true;
            u.s_power = parse_power();
            out.push_back(u);
            return;
        }
        if (peek().type != Token::LParen) fail("'s' or '('");
        std::size_t open_pos = peek().pos;
        next();

        // A parenthesized product of units is a grouping; anything else must
        // parse as a polynomial. Try the grouping reading first.
        std::size_t save = pos_;
        if (starts_unit(peek()) && peek().type != Token::Star) {
            try {
                std::vector<Unit> inner = parse_units();
                if (peek().type == Token::RParen) {
                    next();
                    for (auto& u : inner) out.push_back(std::move(u));
                    return;
                }
            } catch (const ParseError&) {
            }
            pos_ = save;
        }

        Unit u;
        u.poly = parse_poly(open_pos);
        if (peek().type != Token::RParen) fail("')'");
        next();
        out.push_back(u);
    }

    int parse_power() {
        if (peek().type != Token::Caret) return 1;
        next();
        double sign = 1.0;
        if (peek().type == Token::Minus) {
            next();
            sign = -1.0;
        }
        if (peek().type != Token::Num) fail("integer exponent");
        double v = sign * next().value;
        int k = static_cast<int>(std::lround(v));
        if (k < 0 || std::abs(v - k) > 0.0) fail("nonnegative integer exponent");
        return k;
    }

    // poly := [sign] term { (+|-) term }, each term c * s^k
    RealPolynomial parse_poly(std::size_t open_pos) {
        std::vector<double> coeffs(1, 0.0);
        bool first = true;
        for (;;) {
            double sign = 1.0;
            if (peek().type == Token::Plus || peek().type == Token::Minus) {
                sign = parse_sign();
            } else if (!first) {
                break;
            }
            auto [coef, power] = parse_term();
            if (power >= static_cast<int>(coeffs.size())) coeffs.resize(power + 1, 0.0);
            coeffs[power] += sign * coef;
            first = false;
        }
        RealPolynomial p{coeffs};
        if (p.degree() > 2)
            throw DegreeError("factor starting at position " + std::to_string(open_pos) +
                              " has degree " + std::to_string(p.degree()) +
                              "; supported factor degrees are 1 and 2");
        return p;
    }

    // term := primary { "*" primary | "/" [sign] number | implicit s }
    std::pair<double, int> parse_term() {
        double coef = 1.0;
        int power = 0;
        parse_primary(coef, power);
        for (;;) {
            if (peek().type == Token::Star) {
                next();
                parse_primary(coef, power);
            } else if (peek().type == Token::Slash) {
                next();
                double sign = 1.0;
                if (peek().type == Token::Minus) {
                    next();
                    sign = -1.0;
                }
                if (peek().type != Token::Num) fail("number after '/'");
                double d = sign * next().value;
                if (d == 0.0) fail("nonzero divisor");
                coef /= d;
            } else if (peek().type == Token::S) {
                parse_primary(coef, power);
            } else {
                break;
            }
        }
        return {coef, power};
    }

    void parse_primary(double& coef, int& power) {
        if (peek().type == Token::Num) {
            coef *= next().value;
        } else if (peek().type == Token::S) {
            next();
            power += parse_power();
        } else {
            fail("number or 's'");
        }
    }

    // Flattens the unit lists into gain / integrator / factor structure.
    static FactoredTF build(double gain, const std::vector<Unit>& num,
                            const std::vector<Unit>& den) {
        FactoredTF tf;
        tf.gain = gain;
        for (const Unit& u : num) {
            if (u.is_s_power) {
                for (int k = 0; k < u.s_power; ++k)
                    tf.zero_factors.push_back(RealPolynomial({0.0, 1.0}));
                continue;
            }
            RealPolynomial p = u.poly;
            while (p.degree() >= 1 && p[0] == 0.0) {
                tf.zero_factors.push_back(RealPolynomial({0.0, 1.0}));
                p = strip_origin_root(p);
            }
            if (p.degree() == 0) {
                tf.gain *= p[0];
            } else {
                tf.zero_factors.push_back(p);
            }
        }
        for (const Unit& u : den) {
            if (u.is_s_power) {
                tf.integrator_order += u.s_power;
                continue;
            }
            RealPolynomial p = u.poly;
            while (p.degree() >= 1 && p[0] == 0.0) {
                tf.integrator_order += 1;
                p = strip_origin_root(p);
            }
            if (p.degree() == 0) {
                if (p[0] == 0.0) throw Error("zero constant factor in denominator");
                tf.gain /= p[0];
            } else {
                tf.pole_factors.push_back(p);
            }
        }
        if (tf.gain == 0.0) {
            tf.zero_factors.clear();
        }
        return tf;
    }

    static RealPolynomial strip_origin_root(const RealPolynomial& p) {
        std::vector<double> c(p.coeffs().begin() + 1, p.coeffs().end());
        return RealPolynomial(c);
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

std::string fmt12(double v) {
    if (v == 0.0) v = 0.0;  // normalize -0
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

// Scale of a degree-1/2 factor folded out so the constant term becomes +-1;
// returns the printable body and multiplies the extracted scale into gain.
std::string factor_body(const RealPolynomial& f, double& gain) {
    if (f.degree() == 1 && f[0] == 0.0) {
        gain *= f[1];
        return "s";
    }
    if (f.degree() == 1) {
        double root = -f[0] / f[1];
        if (root < 0.0) {
            gain *= f[0];
            return "(s/" + fmt12(-root) + "+1)";
        }
        gain *= -f[0];
        return "(s/" + fmt12(root) + "-1)";
    }
    // degree 2; constant term nonzero after parse normalization
    double k = std::abs(f[0]);
    gain *= k;
    double c0 = f[0] / k, c1 = f[1] / k, c2 = f[2] / k;
    std::string body = "(" + fmt12(c2) + "*s^2";
    if (c1 != 0.0) body += (c1 > 0 ? "+" : "-") + fmt12(std::abs(c1)) + "*s";
    body += (c0 > 0 ? "+1)" : "-1)");
    return body;
}

}  // namespace

FactoredTF parse_tf(const std::string& text) {
    Parser parser(text);
    return parser.parse();
}

std::string print_tf(const FactoredTF& tf) {
    if (tf.gain == 0.0) return "0";

    double gain = tf.gain;
    std::vector<std::string> zparts, pparts;
    int origin_zeros = 0;
    for (const auto& f : tf.zero_factors) {
        if (f.degree() == 1 && f[0] == 0.0) {
            gain *= f[1];
            ++origin_zeros;
        } else {
            zparts.push_back(factor_body(f, gain));
        }
    }
    if (origin_zeros == 1) zparts.insert(zparts.begin(), "s");
    if (origin_zeros > 1) zparts.insert(zparts.begin(), "s^" + std::to_string(origin_zeros));

    double den_gain = 1.0;
    if (tf.integrator_order == 1) pparts.push_back("s");
    if (tf.integrator_order > 1) pparts.push_back("s^" + std::to_string(tf.integrator_order));
    for (const auto& f : tf.pole_factors) pparts.push_back(factor_body(f, den_gain));
    gain /= den_gain;

    std::string out;
    bool neg = gain < 0.0;
    double mag = std::abs(gain);
    if (neg) out += "-";
    if (zparts.empty() || mag != 1.0) out += fmt12(mag);
    for (std::size_t i = 0; i < zparts.size(); ++i) {
        if (!out.empty() && out != "-") out += "*";
        out += zparts[i];
    }
    if (!pparts.empty()) {
        out += "/";
        if (pparts.size() == 1) {
            out += pparts[0];
        } else {
            out += "(";
            for (std::size_t i = 0; i < pparts.size(); ++i) {
                if (i) out += "*";
                out += pparts[i];
            }
            out += ")";
        }
    }
    return out;
}

RationalTF expand(const FactoredTF& tf) {
    RationalTF out;
    out.num = RealPolynomial({tf.gain});
    for (const auto& f : tf.zero_factors) out.num = out.num * f;
    out.den = RealPolynomial::one();
    for (const auto& f : tf.pole_factors) out.den = out.den * f;
    out.den = out.den.shifted_up(tf.integrator_order);
    return out;
}

Complex eval_tf(const FactoredTF& tf, Complex s) {
    Complex v{tf.gain, 0.0};
    for (const auto& f : tf.zero_factors) v *= f.eval(s);
    for (const auto& f : tf.pole_factors) v /= f.eval(s);
    for (int i = 0; i < tf.integrator_order; ++i) v /= s;
    return v;
}

FactoredTF compose(const FactoredTF& a, const FactoredTF& b) {
    FactoredTF out;
    out.gain = a.gain * b.gain;
    out.integrator_order = a.integrator_order + b.integrator_order;
    out.zero_factors = a.zero_factors;
    out.zero_factors.insert(out.zero_factors.end(), b.zero_factors.begin(),
                            b.zero_factors.end());
    out.pole_factors = a.pole_factors;
    out.pole_factors.insert(out.pole_factors.end(), b.pole_factors.begin(),
                            b.pole_factors.end());
    if (out.gain == 0.0) out.zero_factors.clear();
    return out;
}

std::vector<Complex> factor_roots(const RealPolynomial& factor) {
    return poly_roots(factor).roots;
}

std::vector<Complex> zero_locations(const FactoredTF& tf) {
    std::vector<Complex> out;
    for (const auto& f : tf.zero_factors) {
        auto r = factor_roots(f);
        out.insert(out.end(), r.begin(), r.end());
    }
    return out;
}

std::vector<Complex> pole_locations(const FactoredTF& tf) {
    std::vector<Complex> out;
    for (int i = 0; i < tf.integrator_order; ++i) out.emplace_back(0.0, 0.0);
    for (const auto& f : tf.pole_factors) {
        auto r = factor_roots(f);
        out.insert(out.end(), r.begin(), r.end());
    }
    return out;
}

std::vector<CancelPair> cancel_check(const FactoredTF& tf, double tol) {
    std::vector<CancelPair> out;
    std::vector<Complex> poles = pole_locations(tf);
    for (Complex z : zero_locations(tf)) {
        for (auto it = poles.begin(); it != poles.end(); ++it) {
            double scale = std::max(1.0, std::max(std::abs(z), std::abs(*it)));
            if (std::abs(z - *it) <= tol * scale) {
                out.push_back({z, *it});
                poles.erase(it);
                break;
            }
        }
    }
    return out;
}

namespace {

// Factor with scale folded out: constant term exactly +1 (or leading
// coefficient +1 for the origin form). Folding the signed constant makes the
// representation unique, so two spellings of the same factor compare equal.
RealPolynomial normalize_factor(const RealPolynomial& f, double& gain) {
    double k = f[0] == 0.0 ? f[f.degree()] : f[0];
    gain *= k;
    std::vector<double> c(f.coeffs());
    for (double& v : c) v /= k;
    return RealPolynomial(c);
}

bool factor_close(const RealPolynomial& a, const RealPolynomial& b, double tol) {
    if (a.degree() != b.degree()) return false;
    for (int i = 0; i <= a.degree(); ++i) {
        double scale = std::max({1.0, std::abs(a[i]), std::abs(b[i])});
        if (std::abs(a[i] - b[i]) > tol * scale) return false;
    }
    return true;
}

bool match_factor_lists(std::vector<RealPolynomial> a, std::vector<RealPolynomial> b,
                        double tol) {
    if (a.size() != b.size()) return false;
    for (const auto& fa : a) {
        bool found = false;
        for (auto it = b.begin(); it != b.end(); ++it) {
            if (factor_close(fa, *it, tol)) {
                b.erase(it);
                found = true;
                break;
            }
        }
        if (!found) return false;
    }
    return true;
}

}  // namespace

bool structurally_equal(const FactoredTF& a, const FactoredTF& b, double tol) {
    if (a.gain == 0.0 || b.gain == 0.0) return a.gain == b.gain;
    if (a.integrator_order != b.integrator_order) return false;

    double ga = a.gain, gb = b.gain;
    std::vector<RealPolynomial> za, zb, pa, pb;
    for (const auto& f : a.zero_factors) za.push_back(normalize_factor(f, ga));
    for (const auto& f : b.zero_factors) zb.push_back(normalize_factor(f, gb));
    double da = 1.0, db = 1.0;
    for (const auto& f : a.pole_factors) pa.push_back(normalize_factor(f, da));
    for (const auto& f : b.pole_factors) pb.push_back(normalize_factor(f, db));
    ga /= da;
    gb /= db;

    if (std::abs(ga - gb) > tol * std::max({1.0, std::abs(ga), std::abs(gb)})) return false;
    return match_factor_lists(za, zb, tol) && match_factor_lists(pa, pb, tol);
}

}  // namespace crossings
